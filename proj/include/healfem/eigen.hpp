#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "healfem/solvers.hpp"
#include "healfem/sparse.hpp"

namespace healfem {

namespace detail {

/// Extreme eigenvalue of a symmetric tridiagonal matrix by Sturm bisection.
inline double tridiag_extreme(const std::vector<double>& alpha,
                              const std::vector<double>& beta, bool want_max) {
    const std::size_t k = alpha.size();
    double lo = alpha[0], hi = alpha[0];
    for (std::size_t i = 0; i < k; ++i) {
        const double bl = i > 0 ? std::abs(beta[i - 1]) : 0.0;
        const double br = i + 1 < k ? std::abs(beta[i]) : 0.0;
        lo = std::min(lo, alpha[i] - bl - br);
        hi = std::max(hi, alpha[i] + bl + br);
    }
    auto count_less = [&](double x) {
        // Sturm sequence: number of eigenvalues below x
        std::size_t count = 0;
        double d = 1.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double b2 = i > 0 ? beta[i - 1] * beta[i - 1] : 0.0;
            d = alpha[i] - x - b2 / d;
            if (d == 0.0) d = -1e-300;
            if (d < 0.0) ++count;
        }
        return count;
    };
    const double span = hi - lo;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)) &&
                     hi - lo > 1e-15 * span;
         ++it) {
        const double mid = 0.5 * (lo + hi);
        const std::size_t c = count_less(mid);
        if (want_max ? (c == k) : (c >= 1))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Largest eigenvalue of a symmetric operator by Lanczos iteration with full
/// reorthogonalization and a deterministic seeded start vector.
inline double lanczos_max_eigenvalue(const std::function<void(const std::vector<double>&,
                                                              std::vector<double>&)>& op,
                                     std::size_t dim, double tol = 1e-9,
                                     std::uint64_t seed = 20240601u,
                                     int max_steps = 0) {
    if (max_steps <= 0) max_steps = static_cast<int>(std::min<std::size_t>(dim, 400));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<std::vector<double>> V;
    std::vector<double> v(dim), w(dim), alpha, beta;
    for (auto& x : v) x = unif(rng);
    double nv = norm2(v);
    for (auto& x : v) x /= nv;
    double theta_prev = 0.0;
    for (int j = 0; j < max_steps; ++j) {
        V.push_back(v);
        op(v, w);
        const double a = dot(v, w);
        alpha.push_back(a);
        for (std::size_t i = 0; i < dim; ++i)
            w[i] -= a * v[i] + (j > 0 ? beta.back() * V[j - 1][i] : 0.0);
        // full reorthogonalization, twice
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : V) {
                const double c = dot(q, w);
                if (c != 0.0) axpy(-c, q, w);
            }
        const double b = norm2(w);
        const double theta = detail::tridiag_extreme(alpha, beta, true);
        if (j > 0 && std::abs(theta - theta_prev) <= tol * std::max(1e-300, std::abs(theta)))
            return theta;
        theta_prev = theta;
        if (b < 1e-14 * std::max(1.0, std::abs(a))) return theta; // invariant subspace
        beta.push_back(b);
        for (std::size_t i = 0; i < dim; ++i) v[i] = w[i] / b;
    }
    return theta_prev;
}

/// Extreme eigenvalues (lambda_min, lambda_max) of a symmetric positive
/// definite sparse matrix. lambda_max comes from Lanczos on A, lambda_min
/// from Lanczos on A^{-1} through a banded Cholesky factorization.
/// Non-symmetric input (max |A - A^T| >= 1e-10) is rejected.
inline std::pair<double, double> extreme_eigenvalues(const SparseMatrix& A,
                                                     double tol = 1e-9,
                                                     std::uint64_t seed = 20240601u) {
    if (A.asymmetry() >= 1e-10)
        throw std::invalid_argument("extreme_eigenvalues: matrix is not symmetric");
    const std::size_t n = A.rows();
    const double lmax = lanczos_max_eigenvalue(
        [&A](const std::vector<double>& x, std::vector<double>& y) { A.apply(x, y); }, n,
        tol, seed);
    const BandedCholesky chol(A); // throws if not positive definite
    const double inv_max = lanczos_max_eigenvalue(
        [&chol](const std::vector<double>& x, std::vector<double>& y) {
            y = chol.solve(x);
        },
        n, tol, seed + 1);
    return {1.0 / inv_max, lmax};
}

/// Empirical condition number lambda_max / lambda_min.
inline double empirical_condition(const SparseMatrix& A, double tol = 1e-9,
                                  std::uint64_t seed = 20240601u) {
    const auto [lmin, lmax] = extreme_eigenvalues(A, tol, seed);
    return lmax / lmin;
}

/// Largest generalized eigenvalue of K x = mu M x (both symmetric, M SPD),
/// via Lanczos on L^{-1} K L^{-T} with M = L L^T.
inline double generalized_max_eigenvalue(const SparseMatrix& K, const SparseMatrix& M,
                                         double tol = 1e-9,
                                         std::uint64_t seed = 20240601u) {
    const BandedCholesky chol(M);
    const std::size_t n = M.rows();
    std::vector<double> t(n);
    return lanczos_max_eigenvalue(
        [&](const std::vector<double>& x, std::vector<double>& y) {
            t = x;
            chol.solve_upper(t); // t = L^{-T} x
            K.apply(t, y);
            chol.solve_lower(y); // y = L^{-1} K L^{-T} x
        },
        n, tol, seed);
}

} // namespace healfem
