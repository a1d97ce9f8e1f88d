#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "healfem/assembly.hpp"
#include "healfem/nonlocal.hpp"
#include "healfem/params.hpp"
#include "healfem/solvers.hpp"

namespace healfem {

/// Placement of the Taylor-reduced adhesion flux. Amended evaluates it at
/// time N and moves it to the right-hand side, keeping every system matrix
/// symmetric; Original keeps the flux implicit (f^{N+1}), which adds the
/// non-symmetric convective matrices to A_f and A_m.
enum class SchemeVariant { amended, original };

/// Flux evaluation route: the Taylor/moment reduction (convective matrices)
/// or the full sensing-square quadrature of the non-local integral.
enum class NonlocalMode { taylor, full };

enum class Equation { g = 0, f = 1, m = 2, e = 3 };

inline const char* equation_name(Equation eq) {
    switch (eq) {
        case Equation::g: return "g";
        case Equation::f: return "f";
        case Equation::m: return "m";
        default: return "e";
    }
}

struct LinearSystem {
    SparseMatrix A;
    std::vector<double> F;
};

struct StepInfo {
    std::array<SolveStats, 4> solve; // indexed by Equation
};

/// Appendix-style initial data: uniform growth factor and a linear wound
/// (strip around x1 = 0) in the three tissue fields.
inline StateFields initial_state(const Mesh& mesh, const ModelParams&) {
    auto wound = [](const Vec2& p) {
        return (0.5 + 0.5 * std::tanh(20.0 * p.x - 3.0)) +
               (0.5 + 0.5 * std::tanh(-20.0 * p.x - 3.0));
    };
    StateFields s;
    s.g = interpolate(mesh, [](const Vec2&) { return 0.1; });
    s.f = interpolate(mesh, [&](const Vec2& p) { return 0.2 * wound(p); });
    s.m = interpolate(mesh, [&](const Vec2& p) { return 0.5 * wound(p); });
    s.e = interpolate(mesh, [&](const Vec2& p) { return 1.0 * wound(p); });
    s.t = 0.0;
    return s;
}

/// Split backward Euler for the coupled system: each equation is implicit in
/// its own variable with every other field frozen at time N, so the four
/// solves of one step are independent.
class Stepper {
public:
    Stepper(const Mesh& mesh, const ModelParams& params,
            SchemeVariant variant = SchemeVariant::amended,
            NonlocalMode mode = NonlocalMode::taylor)
        : mesh_(&mesh),
          params_(params),
          variant_(variant),
          mode_(mode),
          pattern_(build_fe_pattern(mesh)),
          M_(assemble_mass(mesh, pattern_)),
          K_(assemble_stiffness(mesh, pattern_)) {
        params_.validate();
    }

    const Mesh& mesh() const { return *mesh_; }
    const ModelParams& params() const { return params_; }
    SchemeVariant variant() const { return variant_; }
    const SparseMatrix& mass() const { return M_; }
    const SparseMatrix& stiffness() const { return K_; }
    std::shared_ptr<const SparsityPattern> pattern() const { return pattern_; }

    LinearSystem build_system_g(const StateFields& s) const {
        const auto& p = params_;
        SparseMatrix A(pattern_, true);
        A.add_scaled(1.0 / p.dt + p.lambda_g, M_);
        A.add_scaled(p.D_g, K_);
        std::vector<double> combo(mesh_->node_count());
        for (std::size_t i = 0; i < combo.size(); ++i)
            combo[i] = s.g[i] / p.dt + p.p_g_f * s.f[i] + p.p_g_m * s.m[i];
        return {std::move(A), M_.apply(combo)};
    }

    LinearSystem build_system_e(const StateFields& s) const {
        const auto& p = params_;
        SparseMatrix A = assemble_weighted_mass(*mesh_, pattern_, s.f);
        A.scale(p.alpha_f + 2.0 * p.p_e * p.w_e);
        A.add_scaled(p.alpha_m, assemble_weighted_mass(*mesh_, pattern_, s.m));
        A.add_scaled(1.0 / p.dt + p.alpha_e, M_);
        auto F = assemble_load(*mesh_, 6, [&](std::size_t e, const BasisEval& b) {
            const auto& el = mesh_->element(e);
            const double gv = local_value(s.g.coeffs, el, b);
            const double fv = local_value(s.f.coeffs, el, b);
            const double mv = local_value(s.m.coeffs, el, b);
            const double ev = local_value(s.e.coeffs, el, b);
            return p.p_e * fv * (1.0 - (p.w_g * gv + p.w_f * fv + p.w_m * mv)) + p.e_c +
                   ev / p.dt;
        });
        return {std::move(A), std::move(F)};
    }

    LinearSystem build_system_f(const StateFields& s) const {
        const auto& p = params_;
        return build_cell_system(s, s.f, p.D_f, p.lambda_f, p.p_f, p.w_f, p.adhesion.mu_f,
                                 Species::f);
    }

    LinearSystem build_system_m(const StateFields& s) const {
        const auto& p = params_;
        return build_cell_system(s, s.m, p.D_m, p.lambda_m, p.p_m, p.w_m, p.adhesion.mu_m,
                                 Species::m);
    }

    /// One split backward-Euler step. All four systems are built from the
    /// same time-N state, so the sub-step order is immaterial.
    StateFields advance(const StateFields& s, StepInfo* info = nullptr) const {
        StateFields next;
        next.g = FeField(*mesh_, solve_eq(build_system_g(s), Equation::g, info));
        next.f = FeField(*mesh_, solve_eq(build_system_f(s), Equation::f, info));
        next.m = FeField(*mesh_, solve_eq(build_system_m(s), Equation::m, info));
        next.e = FeField(*mesh_, solve_eq(build_system_e(s), Equation::e, info));
        next.t = s.t + params_.dt;
        return next;
    }

    /// L2 norm of an FE function, sqrt(<Mc, c>).
    double l2_norm(const FeField& u) const {
        return std::sqrt(dot(M_.apply(u.coeffs), u.coeffs));
    }

    double l2_field_difference(const FeField& a, const FeField& b) const {
        std::vector<double> d(a.coeffs.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
        return std::sqrt(dot(M_.apply(d), d));
    }

private:
    /// Shared construction for the fibroblast and macrophage systems; they
    /// differ only in their parameter set and S_max row.
    LinearSystem build_cell_system(const StateFields& s, const FeField& own, double D,
                                   double lambda, double prolif, double w_own, double mu,
                                   Species species) const {
        const auto& p = params_;
        const int row = static_cast<int>(species);
        SparseMatrix A = assemble_weighted_mass(*mesh_, pattern_, s.g);
        A.scale(2.0 * prolif * w_own);
        A.add_scaled(1.0 / p.dt + lambda, M_);
        A.add_scaled(D, K_);

        // logistic source linearized about time N: the own-field term moved
        // into the matrix, the rest stays here
        auto F = assemble_load(*mesh_, 6, [&](std::size_t e, const BasisEval& b) {
            const auto& el = mesh_->element(e);
            const double gv = local_value(s.g.coeffs, el, b);
            const double fv = local_value(s.f.coeffs, el, b);
            const double mv = local_value(s.m.coeffs, el, b);
            const double ev = local_value(s.e.coeffs, el, b);
            const double others = species == Species::f
                                      ? p.w_g * gv + p.w_m * mv + p.w_e * ev
                                      : p.w_g * gv + p.w_f * fv + p.w_e * ev;
            const double own = species == Species::f ? fv : mv;
            return prolif * gv * (1.0 - others) + own / p.dt;
        });

        if (mu != 0.0) {
            if (mode_ == NonlocalMode::taylor)
                apply_taylor_flux(s, own, mu, row, A, F);
            else
                apply_full_flux(s, own, mu, species, A, F);
        }
        return {std::move(A), std::move(F)};
    }

    /// Taylor-reduced flux via the convective matrix. H is linear in its
    /// weight, so the three S_max-weighted matrices collapse into one
    /// assembly. The weak form tests the gradient with psi_o, which is the
    /// transpose orientation of H as defined.
    void apply_taylor_flux(const StateFields& s, const FeField& own, double mu, int row,
                           SparseMatrix& A, std::vector<double>& F) const {
        const auto& a = params_.adhesion;
        FeField combo(*mesh_);
        for (std::size_t i = 0; i < combo.size(); ++i)
            combo[i] = a.S_max[row][0] * s.f[i] + a.S_max[row][1] * s.m[i] +
                       a.S_max[row][2] * s.e[i];
        const SparseMatrix H = assemble_convective(*mesh_, pattern_, combo);
        const double coeff = mu * flux_prefactor(a, params_.nonlocal);
        if (variant_ == SchemeVariant::amended) {
            axpy(coeff, H.apply_transpose(own.coeffs), F);
        } else {
            A.add_scaled_transpose(-coeff, H);
            A.set_symmetric(false);
        }
    }

    /// Full quadrature of the non-local integral, sampled at the element
    /// quadrature points.
    void apply_full_flux(const StateFields& s, const FeField& own, double mu,
                         Species species, SparseMatrix& A, std::vector<double>& F) const {
        const ElementTables tab(*mesh_, 4);
        const bool amended = variant_ == SchemeVariant::amended;
        std::array<std::array<double, 6>, 6> loc{};
        for (std::size_t e = 0; e < mesh_->element_count(); ++e) {
            const auto& el = mesh_->element(e);
            if (!amended)
                for (auto& r : loc) r.fill(0.0);
            for (std::size_t qi = 0; qi < tab.rule.size(); ++qi) {
                const auto& q = tab.rule[qi];
                const auto& b = tab.basis(e, qi);
                const double w = q.w * tab.jac;
                const Vec2 x = mesh_->map_point(e, {q.l0, q.l1, q.l2});
                const Vec2 flux = adhesion_integral_full(s, params_, x, species);
                if (amended) {
                    const double fv = local_value(own.coeffs, el, b);
                    for (int k = 0; k < 6; ++k)
                        F[el[k]] += w * mu * fv * flux.dot(b.grad[k]);
                } else {
                    for (int k = 0; k < 6; ++k)
                        for (int c = 0; c < 6; ++c)
                            loc[k][c] -= w * mu * flux.dot(b.grad[k]) * b.value[c];
                }
            }
            if (!amended)
                for (int k = 0; k < 6; ++k)
                    for (int c = 0; c < 6; ++c) A.add(el[k], el[c], loc[k][c]);
        }
        if (!amended) A.set_symmetric(false);
    }

    std::vector<double> solve_eq(const LinearSystem& sys, Equation eq,
                                 StepInfo* info) const {
        SolveStats stats;
        try {
            auto x = solve_linear(sys.A, sys.F, params_.solver_tol, &stats);
            if (info) info->solve[static_cast<int>(eq)] = stats;
            return x;
        } catch (const SolverError& err) {
            throw SolverError(std::string("advance[") + equation_name(eq) +
                                  "]: " + err.what(),
                              err.rel_residual(), err.iterations());
        }
    }

    const Mesh* mesh_;
    ModelParams params_;
    SchemeVariant variant_;
    NonlocalMode mode_;
    std::shared_ptr<const SparsityPattern> pattern_;
    SparseMatrix M_, K_;
};

} // namespace healfem
