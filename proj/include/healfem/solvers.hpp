#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "healfem/sparse.hpp"

namespace healfem {

/// Thrown when an iterative solve misses its tolerance within the iteration
/// cap; carries the final relative residual.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double rel_residual, int iterations)
        : std::runtime_error(what + " (rel residual " + std::to_string(rel_residual) +
                             " after " + std::to_string(iterations) + " iterations)"),
          rel_residual_(rel_residual),
          iterations_(iterations) {}
    double rel_residual() const { return rel_residual_; }
    int iterations() const { return iterations_; }

private:
    double rel_residual_;
    int iterations_;
};

struct SolveStats {
    int iterations = 0;
    double rel_residual = 0.0;
};

/// Conjugate gradients for symmetric positive (semi-)definite systems.
inline std::vector<double> solve_cg(const SparseMatrix& A, const std::vector<double>& b,
                                    double tol, int max_iter, SolveStats* stats = nullptr) {
    const std::size_t n = b.size();
    std::vector<double> x(n, 0.0), r = b, p = r, Ap(n);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        if (stats) *stats = {0, 0.0};
        return x;
    }
    double rr = dot(r, r);
    int it = 0;
    while (it < max_iter) {
        if (std::sqrt(rr) <= tol * bnorm) break;
        A.apply(p, Ap);
        const double pap = dot(p, Ap);
        if (!(pap > 0.0)) break; // breakdown: indefinite or singular operator
        const double alpha = rr / pap;
        axpy(alpha, p, x);
        axpy(-alpha, Ap, r);
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        rr = rr_new;
        ++it;
    }
    const double rel = std::sqrt(rr) / bnorm;
    if (stats) *stats = {it, rel};
    if (!(rel <= tol)) throw SolverError("cg: no convergence", rel, it);
    return x;
}

/// BiCGSTAB for general systems.
inline std::vector<double> solve_bicgstab(const SparseMatrix& A,
                                          const std::vector<double>& b, double tol,
                                          int max_iter, SolveStats* stats = nullptr) {
    const std::size_t n = b.size();
    std::vector<double> x(n, 0.0), r = b;
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        if (stats) *stats = {0, 0.0};
        return x;
    }
    std::vector<double> r0 = r, p = r, v(n), s(n), t(n);
    double rho = dot(r0, r), rnorm = norm2(r);
    int it = 0;
    while (it < max_iter && rnorm > tol * bnorm) {
        A.apply(p, v);
        const double r0v = dot(r0, v);
        if (r0v == 0.0 || !std::isfinite(r0v)) break;
        const double alpha = rho / r0v;
        for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        if (norm2(s) <= tol * bnorm) {
            axpy(alpha, p, x);
            rnorm = norm2(s);
            ++it;
            break;
        }
        A.apply(s, t);
        const double tt = dot(t, t);
        if (tt == 0.0 || !std::isfinite(tt)) break;
        const double omega = dot(t, s) / tt;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        const double rho_new = dot(r0, r);
        const double beta = (rho_new / rho) * (alpha / omega);
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        rho = rho_new;
        rnorm = norm2(r);
        ++it;
    }
    const double rel = rnorm / bnorm;
    if (stats) *stats = {it, rel};
    if (!(rel <= tol)) throw SolverError("bicgstab: no convergence", rel, it);
    return x;
}

/// Residual-controlled sparse solve: CG on symmetric-flagged systems,
/// BiCGSTAB otherwise. Iteration cap is 10*l.
inline std::vector<double> solve_linear(const SparseMatrix& A, const std::vector<double>& b,
                                        double tol = 1e-10, SolveStats* stats = nullptr) {
    if (A.rows() != b.size())
        throw std::invalid_argument("solve_linear: dimension mismatch");
    const int cap = static_cast<int>(10 * A.rows());
    return A.symmetric() ? solve_cg(A, b, tol, cap, stats)
                         : solve_bicgstab(A, b, tol, cap, stats);
}

/// Banded Cholesky factorization A = L L^T for SPD matrices with the FE
/// band structure of lexicographic node numbering.
class BandedCholesky {
public:
    explicit BandedCholesky(const SparseMatrix& A) {
        n_ = A.rows();
        const auto& p = A.pattern();
        bw_ = 0;
        for (std::size_t r = 0; r < n_; ++r)
            for (auto k = p.row_ptr[r]; k < p.row_ptr[r + 1]; ++k)
                bw_ = std::max<std::ptrdiff_t>(
                    bw_, static_cast<std::ptrdiff_t>(r) - p.col_idx[k]);
        band_.assign(n_ * (bw_ + 1), 0.0);
        // band_[i*(bw+1) + (i - j)] holds entry (i, j), j in [i-bw, i]
        for (std::size_t r = 0; r < n_; ++r)
            for (auto k = p.row_ptr[r]; k < p.row_ptr[r + 1]; ++k) {
                const std::ptrdiff_t c = p.col_idx[k];
                if (c <= static_cast<std::ptrdiff_t>(r))
                    at(r, c) = A.values()[k];
            }
        factor();
    }

    std::size_t size() const { return n_; }

    std::vector<double> solve(const std::vector<double>& b) const {
        std::vector<double> y = b;
        solve_lower(y);
        solve_upper(y);
        return y;
    }

    /// L y = b, in place.
    void solve_lower(std::vector<double>& y) const {
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t j0 = i > static_cast<std::size_t>(bw_) ? i - bw_ : 0;
            double s = y[i];
            for (std::size_t j = j0; j < i; ++j) s -= cat(i, j) * y[j];
            y[i] = s / cat(i, i);
        }
    }

    /// L^T x = y, in place.
    void solve_upper(std::vector<double>& x) const {
        for (std::size_t ii = n_; ii-- > 0;) {
            const std::size_t jmax = std::min(n_ - 1, ii + bw_);
            double s = x[ii];
            for (std::size_t j = ii + 1; j <= jmax; ++j) s -= cat(j, ii) * x[j];
            x[ii] = s / cat(ii, ii);
        }
    }

private:
    double& at(std::size_t i, std::size_t j) { return band_[i * (bw_ + 1) + (i - j)]; }
    double cat(std::size_t i, std::size_t j) const {
        return band_[i * (bw_ + 1) + (i - j)];
    }

    void factor() {
        for (std::size_t j = 0; j < n_; ++j) {
            double d = at(j, j);
            const std::size_t k0 = j > static_cast<std::size_t>(bw_) ? j - bw_ : 0;
            for (std::size_t k = k0; k < j; ++k) d -= cat(j, k) * cat(j, k);
            if (d <= 0.0)
                throw std::runtime_error("BandedCholesky: matrix not positive definite");
            const double ljj = std::sqrt(d);
            at(j, j) = ljj;
            const std::size_t imax = std::min(n_ - 1, j + bw_);
            for (std::size_t i = j + 1; i <= imax; ++i) {
                double s = at(i, j);
                const std::size_t kk0 =
                    std::max(k0, i > static_cast<std::size_t>(bw_) ? i - bw_ : 0);
                for (std::size_t k = kk0; k < j; ++k) s -= cat(i, k) * cat(j, k);
                at(i, j) = s / ljj;
            }
        }
    }

    std::size_t n_ = 0;
    std::ptrdiff_t bw_ = 0;
    std::vector<double> band_;
};

} // namespace healfem
