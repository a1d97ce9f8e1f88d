#pragma once

#include <array>
#include <memory>
#include <vector>

#include "healfem/field.hpp"
#include "healfem/mesh.hpp"
#include "healfem/quadrature.hpp"
#include "healfem/sparse.hpp"

namespace healfem {

/// FE connectivity pattern: entry (i, j) present iff nodes i and j share an
/// element. Built once per mesh and shared by all matrices assembled on it.
inline std::shared_ptr<const SparsityPattern> build_fe_pattern(const Mesh& mesh) {
    const std::size_t l = mesh.node_count();
    std::vector<std::vector<std::int32_t>> adj(l);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto& el = mesh.element(e);
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) adj[el[a]].push_back(el[b]);
    }
    auto p = std::make_shared<SparsityPattern>();
    p->row_ptr.assign(l + 1, 0);
    for (std::size_t i = 0; i < l; ++i) {
        auto& row = adj[i];
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        p->row_ptr[i + 1] = p->row_ptr[i] + static_cast<std::int64_t>(row.size());
    }
    p->col_idx.reserve(p->row_ptr[l]);
    for (auto& row : adj) p->col_idx.insert(p->col_idx.end(), row.begin(), row.end());
    return p;
}

/// Precomputed basis data at the quadrature points of one rule. The mesh has
/// two element orientation classes (lower/upper triangle of each cell);
/// values are class-independent, gradients are not.
struct ElementTables {
    std::vector<QuadPoint> rule;
    std::vector<BasisEval> lower; // per quad point, element class 0
    std::vector<BasisEval> upper; // per quad point, element class 1
    double jac;                   // |det J| = hx*hy, constant on uniform meshes

    ElementTables(const Mesh& mesh, int degree) : rule(quadrature_rule(degree)) {
        jac = mesh.hx() * mesh.hy();
        for (const auto& q : rule) {
            lower.push_back(mesh.eval_basis(0, {q.l0, q.l1, q.l2}));
            if (mesh.element_count() > 1)
                upper.push_back(mesh.eval_basis(1, {q.l0, q.l1, q.l2}));
            else
                upper.push_back(lower.back());
        }
    }

    const BasisEval& basis(std::size_t elem, std::size_t qi) const {
        return (elem % 2 == 0) ? lower[qi] : upper[qi];
    }
};

namespace detail {

template <class LocalKernel>
SparseMatrix assemble(const Mesh& mesh,
                      std::shared_ptr<const SparsityPattern> pattern, int degree,
                      bool symmetric, LocalKernel&& kernel) {
    SparseMatrix A(std::move(pattern), symmetric);
    const ElementTables tab(mesh, degree);
    std::array<std::array<double, 6>, 6> loc{};
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        for (auto& row : loc) row.fill(0.0);
        for (std::size_t qi = 0; qi < tab.rule.size(); ++qi) {
            const double w = tab.rule[qi].w * tab.jac;
            kernel(e, tab.basis(e, qi), w, loc);
        }
        const auto& el = mesh.element(e);
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) A.add(el[a], el[b], loc[a][b]);
    }
    return A;
}

} // namespace detail

/// Mass matrix M_{to} = integral of psi_t psi_o.
inline SparseMatrix assemble_mass(const Mesh& mesh,
                                  std::shared_ptr<const SparsityPattern> pattern) {
    return detail::assemble(
        mesh, std::move(pattern), 4, true,
        [](std::size_t, const BasisEval& b, double w,
           std::array<std::array<double, 6>, 6>& loc) {
            for (int a = 0; a < 6; ++a)
                for (int c = 0; c < 6; ++c) loc[a][c] += w * b.value[a] * b.value[c];
        });
}

/// Stiffness matrix K_{to} = integral of <grad psi_t, grad psi_o>. Pure
/// Neumann: constants are in the kernel, so K is only positive semi-definite.
inline SparseMatrix assemble_stiffness(const Mesh& mesh,
                                       std::shared_ptr<const SparsityPattern> pattern) {
    return detail::assemble(
        mesh, std::move(pattern), 2, true,
        [](std::size_t, const BasisEval& b, double w,
           std::array<std::array<double, 6>, 6>& loc) {
            for (int a = 0; a < 6; ++a)
                for (int c = 0; c < 6; ++c) loc[a][c] += w * b.grad[a].dot(b.grad[c]);
        });
}

/// Weighted mass matrix T(w)_{to} = sum_q w_q integral of psi_q psi_t psi_o.
/// The integrand is degree 6, so a degree-6 rule keeps it exact.
inline SparseMatrix assemble_weighted_mass(const Mesh& mesh,
                                           std::shared_ptr<const SparsityPattern> pattern,
                                           const FeField& weight) {
    if (weight.size() != mesh.node_count())
        throw std::invalid_argument("assemble_weighted_mass: weight length mismatch");
    return detail::assemble(
        mesh, std::move(pattern), 6, true,
        [&mesh, &weight](std::size_t e, const BasisEval& b, double w,
                         std::array<std::array<double, 6>, 6>& loc) {
            const auto& el = mesh.element(e);
            double wq = 0.0;
            for (int k = 0; k < 6; ++k) wq += weight[el[k]] * b.value[k];
            for (int a = 0; a < 6; ++a)
                for (int c = 0; c < 6; ++c)
                    loc[a][c] += w * wq * b.value[a] * b.value[c];
        });
}

/// Convective matrix H(w)_{to} = sum_q w_q integral of <grad psi_q, grad psi_o> psi_t,
/// i.e. row index carries the plain basis factor and the weight sits in the
/// first gradient slot. Generally non-symmetric.
inline SparseMatrix assemble_convective(const Mesh& mesh,
                                        std::shared_ptr<const SparsityPattern> pattern,
                                        const FeField& weight) {
    if (weight.size() != mesh.node_count())
        throw std::invalid_argument("assemble_convective: weight length mismatch");
    return detail::assemble(
        mesh, std::move(pattern), 4, false,
        [&mesh, &weight](std::size_t e, const BasisEval& b, double w,
                         std::array<std::array<double, 6>, 6>& loc) {
            const auto& el = mesh.element(e);
            Vec2 gw{0.0, 0.0};
            for (int k = 0; k < 6; ++k) gw = gw + weight[el[k]] * b.grad[k];
            for (int a = 0; a < 6; ++a)
                for (int c = 0; c < 6; ++c)
                    loc[a][c] += w * b.value[a] * gw.dot(b.grad[c]);
        });
}

/// Load vector (F)_o = integral of f(x) psi_o dx, with f supplied per
/// quadrature point through the local basis data: fn(elem, basis) must return
/// the integrand value at that point.
template <class Fn>
std::vector<double> assemble_load(const Mesh& mesh, int degree, Fn&& fn) {
    std::vector<double> F(mesh.node_count(), 0.0);
    const ElementTables tab(mesh, degree);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto& el = mesh.element(e);
        for (std::size_t qi = 0; qi < tab.rule.size(); ++qi) {
            const auto& b = tab.basis(e, qi);
            const double w = tab.rule[qi].w * tab.jac;
            const double f = fn(e, b);
            for (int a = 0; a < 6; ++a) F[el[a]] += w * f * b.value[a];
        }
    }
    return F;
}

/// Value of the interpolant with the given coefficients at a quadrature
/// point, from the element-local data.
inline double local_value(const std::vector<double>& coeffs,
                          const std::array<std::int32_t, 6>& el, const BasisEval& b) {
    double v = 0.0;
    for (int k = 0; k < 6; ++k) v += coeffs[el[k]] * b.value[k];
    return v;
}

} // namespace healfem
