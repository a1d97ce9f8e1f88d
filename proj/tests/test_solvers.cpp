#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <random>

#include "healfem/assembly.hpp"
#include "healfem/solvers.hpp"

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

TEST_CASE("cg solves mass systems", "[solvers]") {
    const Mesh m = build_mesh(3, unit_square);
    const auto pat = build_fe_pattern(m);
    const SparseMatrix M = assemble_mass(m, pat);

    const std::vector<double> ones(m.node_count(), 1.0);
    SolveStats stats;
    const auto x = solve_linear(M, M.apply(ones), 1e-12, &stats);
    for (double v : x) REQUIRE(v == Approx(1.0).margin(1e-8));
    CHECK(stats.iterations > 0);
    CHECK(stats.rel_residual <= 1e-12);

    // (1/dt) M x = (1/dt) M c recovers c
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> c(m.node_count());
    for (auto& v : c) v = unif(rng);
    SparseMatrix A = M;
    A.scale(5.0);
    const auto y = solve_linear(A, A.apply(c), 1e-12);
    for (std::size_t i = 0; i < c.size(); ++i) REQUIRE(y[i] == Approx(c[i]).margin(1e-8));
}

TEST_CASE("diagonal system solved componentwise", "[solvers]") {
    const std::size_t n = 40;
    SparseMatrix D(diag_pattern(n), true);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unif(0.5, 4.0);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        D.values()[i] = unif(rng);
        b[i] = unif(rng) - 2.0;
    }
    const auto x = solve_linear(D, b, 1e-14);
    for (std::size_t i = 0; i < n; ++i)
        REQUIRE(x[i] == Approx(b[i] / D.values()[i]).margin(1e-12));
}

TEST_CASE("bicgstab handles non-symmetric systems", "[solvers]") {
    const Mesh m = build_mesh(2, unit_square);
    const auto pat = build_fe_pattern(m);
    const SparseMatrix M = assemble_mass(m, pat);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unif(0.2, 1.0);
    FeField w(m);
    for (auto& v : w.coeffs) v = unif(rng);
    SparseMatrix A = M;
    A.scale(5.0);
    A.add_scaled_transpose(-0.05, assemble_convective(m, pat, w));
    A.set_symmetric(false);
    REQUIRE(A.asymmetry() > 0.0);

    std::vector<double> c(m.node_count());
    for (auto& v : c) v = unif(rng);
    const auto b = A.apply(c);
    const auto x = solve_linear(A, b, 1e-11);
    std::vector<double> r = A.apply(x);
    axpy(-1.0, b, r);
    CHECK(norm2(r) <= 1e-10 * norm2(b));
}

TEST_CASE("singular system reports failure with residual", "[solvers]") {
    const Mesh m = build_mesh(2, unit_square);
    const auto pat = build_fe_pattern(m);
    const SparseMatrix K = assemble_stiffness(m, pat);
    const SparseMatrix M = assemble_mass(m, pat);
    // K is singular (constants); a right-hand side with a component along
    // the kernel is unsolvable
    const std::vector<double> ones(m.node_count(), 1.0);
    const auto b = M.apply(ones);
    try {
        solve_linear(K, b, 1e-12);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.rel_residual() > 0.0);
        CHECK(e.iterations() > 0);
    }
}

TEST_CASE("banded cholesky factors SPD and rejects singular", "[solvers]") {
    const Mesh m = build_mesh(3, unit_square);
    const auto pat = build_fe_pattern(m);
    const SparseMatrix M = assemble_mass(m, pat);
    const BandedCholesky chol(M);
    const std::vector<double> ones(m.node_count(), 1.0);
    const auto x = chol.solve(M.apply(ones));
    for (double v : x) REQUIRE(v == Approx(1.0).margin(1e-11));

    const SparseMatrix K = assemble_stiffness(m, pat);
    CHECK_THROWS_AS(BandedCholesky(K), std::runtime_error);
}

TEST_CASE("dimension mismatch rejected", "[solvers]") {
    const Mesh m = build_mesh(1, unit_square);
    const auto pat = build_fe_pattern(m);
    const SparseMatrix M = assemble_mass(m, pat);
    CHECK_THROWS_AS(solve_linear(M, std::vector<double>(3, 1.0)), std::invalid_argument);
}
