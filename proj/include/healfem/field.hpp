#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "healfem/mesh.hpp"

namespace healfem {

/// Coefficient vector of a scalar finite-element function over the P2 nodes
/// of a mesh.
struct FeField {
    const Mesh* mesh = nullptr;
    std::vector<double> coeffs;

    FeField() = default;
    FeField(const Mesh& m, double fill = 0.0)
        : mesh(&m), coeffs(m.node_count(), fill) {}
    FeField(const Mesh& m, std::vector<double> c) : mesh(&m), coeffs(std::move(c)) {
        if (coeffs.size() != m.node_count())
            throw std::invalid_argument("FeField: coefficient length != node count");
    }

    std::size_t size() const { return coeffs.size(); }
    double& operator[](std::size_t i) { return coeffs[i]; }
    double operator[](std::size_t i) const { return coeffs[i]; }

    bool finite() const {
        for (double v : coeffs)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

/// Nodal interpolant of a scalar function.
template <class F>
FeField interpolate(const Mesh& mesh, F&& f) {
    FeField out(mesh);
    for (std::size_t i = 0; i < mesh.node_count(); ++i)
        out.coeffs[i] = f(mesh.node(i));
    return out;
}

inline bool try_eval_field(const FeField& u, const Vec2& p, double& value) {
    std::size_t e;
    Barycentric bc;
    if (!u.mesh->find_element(p, e, bc)) return false;
    const BasisEval b = u.mesh->eval_basis(e, bc);
    const auto& el = u.mesh->element(e);
    value = 0.0;
    for (int k = 0; k < 6; ++k) value += u.coeffs[el[k]] * b.value[k];
    return true;
}

inline bool try_eval_gradient(const FeField& u, const Vec2& p, Vec2& grad) {
    std::size_t e;
    Barycentric bc;
    if (!u.mesh->find_element(p, e, bc)) return false;
    const BasisEval b = u.mesh->eval_basis(e, bc);
    const auto& el = u.mesh->element(e);
    grad = {0.0, 0.0};
    for (int k = 0; k < 6; ++k) grad = grad + u.coeffs[el[k]] * b.grad[k];
    return true;
}

/// FE interpolant value at a physical point; throws when the point is outside
/// the domain.
inline double eval_field(const FeField& u, const Vec2& p) {
    double v;
    if (!try_eval_field(u, p, v))
        throw std::domain_error("eval_field: point outside mesh domain");
    return v;
}

inline Vec2 eval_gradient(const FeField& u, const Vec2& p) {
    Vec2 g;
    if (!try_eval_gradient(u, p, g))
        throw std::domain_error("eval_gradient: point outside mesh domain");
    return g;
}

} // namespace healfem
