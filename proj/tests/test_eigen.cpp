#include <catch2/catch_amalgamated.hpp>

#include <memory>

#include "healfem/assembly.hpp"
#include "healfem/eigen.hpp"
#include "support/dense_eigen.hpp"

using namespace healfem;
using Catch::Approx;

namespace {
const Rect unit_square{{-1.0, -1.0}, {1.0, 1.0}};

std::shared_ptr<const SparsityPattern> diag_pattern(std::size_t n) {
    auto p = std::make_shared<SparsityPattern>();
    p->row_ptr.resize(n + 1);
    p->col_idx.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p->row_ptr[i + 1] = static_cast<std::int64_t>(i + 1);
        p->col_idx[i] = static_cast<std::int32_t>(i);
    }
    return p;
}
} // namespace

TEST_CASE("diagonal extremes", "[eigen]") {
    SparseMatrix D(diag_pattern(5), true);
    for (std::size_t i = 0; i < 5; ++i) D.values()[i] = static_cast<double>(i + 1);
    const auto [lmin, lmax] = extreme_eigenvalues(D);
    CHECK(lmin == Approx(1.0).epsilon(1e-9));
    CHECK(lmax == Approx(5.0).epsilon(1e-9));
    CHECK(empirical_condition(D) == Approx(5.0).epsilon(1e-8));

    SparseMatrix I(diag_pattern(7), true);
    for (auto& v : I.values()) v = 1.0;
    CHECK(empirical_condition(I) == Approx(1.0).epsilon(1e-10));

    SparseMatrix D2(diag_pattern(2), true);
    D2.values() = {1.0, 10.0};
    CHECK(empirical_condition(D2) == Approx(10.0).epsilon(1e-9));
}

TEST_CASE("scaling of extremes", "[eigen]") {
    const Mesh m = build_mesh(2, unit_square);
    const auto pat = build_fe_pattern(m);
    const SparseMatrix M = assemble_mass(m, pat);
    SparseMatrix cM = M;
    cM.scale(3.7);
    const auto [a, b] = extreme_eigenvalues(M);
    const auto [ca, cb] = extreme_eigenvalues(cM);
    CHECK(ca == Approx(3.7 * a).epsilon(1e-8));
    CHECK(cb == Approx(3.7 * b).epsilon(1e-8));
}

TEST_CASE("mass extremes match the dense oracle", "[eigen]") {
    const Mesh m = build_mesh(2, unit_square); // 25 nodes
    const auto pat = build_fe_pattern(m);
    const SparseMatrix M = assemble_mass(m, pat);
    const auto [lmin, lmax] = extreme_eigenvalues(M, 1e-10);
    const auto dense = test::dense_eigenvalues(M);
    CHECK(lmin == Approx(dense.front()).epsilon(1e-8));
    CHECK(lmax == Approx(dense.back()).epsilon(1e-8));
}

TEST_CASE("non-symmetric input rejected", "[eigen]") {
    const Mesh m = build_mesh(2, unit_square);
    const auto pat = build_fe_pattern(m);
    FeField w(m, 1.0);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += 0.3 * (i % 5);
    SparseMatrix H = assemble_convective(m, pat, w);
    CHECK_THROWS_AS(extreme_eigenvalues(H), std::invalid_argument);
}

TEST_CASE("positive semidefinite input reported", "[eigen]") {
    const Mesh m = build_mesh(2, unit_square);
    const auto pat = build_fe_pattern(m);
    const SparseMatrix K = assemble_stiffness(m, pat);
    CHECK_THROWS_AS(extreme_eigenvalues(K), std::runtime_error);
}

TEST_CASE("generalized eigenvalue matches dense congruence", "[eigen]") {
    const Mesh m = build_mesh(2, unit_square);
    const auto pat = build_fe_pattern(m);
    const SparseMatrix M = assemble_mass(m, pat);
    const SparseMatrix K = assemble_stiffness(m, pat);
    const double mu = generalized_max_eigenvalue(K, M, 1e-10);
    const double dense = test::dense_generalized_max(K, M);
    CHECK(mu == Approx(dense).epsilon(1e-7));
}

TEST_CASE("deterministic given a seed", "[eigen]") {
    const Mesh m = build_mesh(3, unit_square);
    const auto pat = build_fe_pattern(m);
    const SparseMatrix M = assemble_mass(m, pat);
    const auto [a1, b1] = extreme_eigenvalues(M, 1e-9, 777);
    const auto [a2, b2] = extreme_eigenvalues(M, 1e-9, 777);
    CHECK(a1 == a2);
    CHECK(b1 == b2);
}
