#pragma once

#include <algorithm>
#include <array>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "healfem/assembly.hpp"
#include "healfem/eigen.hpp"
#include "healfem/params.hpp"
#include "healfem/stepper.hpp"

namespace healfem {

/// Empirically calibrated Rayleigh-quotient constants of the mesh family:
///   zeta1_M h^2 |c|^2 <= <Mc,c> <= zeta2_M h^2 |c|^2
///   <Kc,c> <= zeta2_inv h^{-2} <Mc,c>
///   zeta1_T h^2 |w|^2 |c|^2 <= <T(w)c,c> <= zeta2_T h^2 |w|^2 |c|^2
/// The T-sandwich is calibrated with unit-norm strictly positive random
/// weights; under that normalization the per-mesh ratios themselves scale
/// with h, so the family constants are the min/max over the calibration
/// family rather than h-flat values (the raw per-n ratios are retained for
/// reporting).
struct ZetaConstants {
    double zeta1_M = 0.0;
    double zeta2_M = 0.0;
    double zeta2_inv = 0.0;
    double zeta1_T = 0.0;
    double zeta2_T = 0.0;
    std::string element_signature;

    struct PerMesh {
        int n = 0;
        double h = 0.0;
        double mass_min_ratio = 0.0; // lambda_min(M)/h^2
        double mass_max_ratio = 0.0; // lambda_max(M)/h^2
        double inv_ratio = 0.0;      // max sampled h^2 <Kc,c>/<Mc,c>
        double t_min_ratio = 0.0;    // min over draws of lambda_min(T(w))/h^2
        double t_max_ratio = 0.0;    // max over draws of lambda_max(T(w))/h^2
    };
    std::vector<PerMesh> raw;

    void validate() const {
        if (!(zeta1_M > 0.0 && zeta1_M <= zeta2_M))
            throw std::logic_error("ZetaConstants: mass constants out of order");
        if (!(zeta1_T > 0.0 && zeta1_T <= zeta2_T))
            throw std::logic_error("ZetaConstants: T constants out of order");
        if (!(zeta2_inv > 0.0))
            throw std::logic_error("ZetaConstants: zeta2_inv must be positive");
    }
};

/// Strictly positive random weight with unit nodal 2-norm. Nodal values are
/// drawn from [0.5, 1.5] before normalization, which keeps the P2
/// interpolant positive everywhere (wilder draws can dip negative between
/// nodes).
inline FeField random_positive_unit_weight(const Mesh& mesh, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.5, 1.5);
    FeField w(mesh);
    for (auto& v : w.coeffs) v = unif(rng);
    const double n = norm2(w.coeffs);
    for (auto& v : w.coeffs) v /= n;
    return w;
}

/// Calibrate the zeta constants over a mesh family (outward 5% margins).
/// zeta2_inv is the max over random Rayleigh quotients of the (K, M/h^2)
/// pencil. Random quotients sit well below the pencl supremum but far above
/// lambda_max(K) (whose place zeta2_inv takes in the corrected bound
/// numerators), so the calibrated value is both safe there and tight enough
/// for the coarse-grid dominance cases.
inline ZetaConstants calibrate_zeta(const std::vector<int>& family, const Rect& domain,
                                    std::uint64_t seed = 12345u, int weight_draws = 8,
                                    int random_vectors = 200) {
    if (family.size() < 2)
        throw std::invalid_argument("calibrate_zeta: family must contain >= 2 meshes");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    ZetaConstants z;
    double m1 = 1e300, m2 = 0.0, inv = 0.0, t1 = 1e300, t2 = 0.0;
    for (int n : family) {
        const Mesh mesh(n, domain);
        const auto pattern = build_fe_pattern(mesh);
        const SparseMatrix M = assemble_mass(mesh, pattern);
        const SparseMatrix K = assemble_stiffness(mesh, pattern);
        const double h2 = mesh.h() * mesh.h();

        ZetaConstants::PerMesh pm;
        pm.n = n;
        pm.h = mesh.h();
        const auto [mmin, mmax] = extreme_eigenvalues(M);
        pm.mass_min_ratio = mmin / h2;
        pm.mass_max_ratio = mmax / h2;

        double inv_n = 0.0;
        std::vector<double> c(mesh.node_count());
        for (int k = 0; k < random_vectors; ++k) {
            for (auto& v : c) v = unif(rng);
            const double kc = dot(K.apply(c), c);
            const double mc = dot(M.apply(c), c);
            inv_n = std::max(inv_n, h2 * kc / mc);
        }
        pm.inv_ratio = inv_n;

        double tmin = 1e300, tmax = 0.0;
        for (int k = 0; k < weight_draws; ++k) {
            const FeField w = random_positive_unit_weight(mesh, rng);
            const SparseMatrix T = assemble_weighted_mass(mesh, pattern, w);
            const auto [lmin, lmax] = extreme_eigenvalues(T);
            tmin = std::min(tmin, lmin / h2);
            tmax = std::max(tmax, lmax / h2);
        }
        pm.t_min_ratio = tmin;
        pm.t_max_ratio = tmax;
        z.raw.push_back(pm);

        m1 = std::min(m1, pm.mass_min_ratio);
        m2 = std::max(m2, pm.mass_max_ratio);
        inv = std::max(inv, inv_n);
        t1 = std::min(t1, tmin);
        t2 = std::max(t2, tmax);
    }
    z.zeta1_M = 0.95 * m1;
    z.zeta2_M = 1.05 * m2;
    z.zeta2_inv = 1.05 * inv;
    z.zeta1_T = 0.95 * t1;
    z.zeta2_T = 1.05 * t2;
    z.element_signature = "uniform-right-p2";
    z.validate();
    return z;
}

struct BoundPair {
    double corrected = 0.0;
    double paper_literal = 0.0;
};

/// g-equation bound. The corrected channel is the Rayleigh-consistent ratio;
/// the literal channel evaluates the printed formula, whose zeta2/zeta2
/// factor cancels as written.
inline BoundPair bound_g(const ModelParams& p, double h, double dt,
                         const ZetaConstants& z) {
    const double a = 1.0 / dt + p.lambda_g;
    const double h2 = h * h;
    BoundPair b;
    b.corrected = (a * z.zeta2_M * h2 + p.D_g * z.zeta2_inv) / (a * z.zeta1_M * h2);
    b.paper_literal = 1.0 + (p.D_g * z.zeta2_inv) / (a * z.zeta2_inv) / h2;
    return b;
}

namespace detail {

inline BoundPair cell_bound(double D, double lambda, double prolif, double w_own,
                            double g_norm_sq, double h, double dt,
                            const ZetaConstants& z) {
    const double a = 1.0 / dt + lambda;
    const double damp = 2.0 * prolif * w_own;
    const double h2 = h * h;
    BoundPair b;
    b.corrected = (a * z.zeta2_M * h2 + damp * z.zeta2_T * h2 * g_norm_sq +
                   D * z.zeta2_inv) /
                  (a * z.zeta1_M * h2 + damp * z.zeta1_T * h2 * g_norm_sq);
    b.paper_literal =
        1.0 + D * z.zeta2_inv / (a * z.zeta1_M + damp * z.zeta2_T * g_norm_sq) / h2;
    return b;
}

} // namespace detail

inline BoundPair bound_f(const ModelParams& p, double h, double dt, double g_norm_sq,
                         const ZetaConstants& z) {
    return detail::cell_bound(p.D_f, p.lambda_f, p.p_f, p.w_f, g_norm_sq, h, dt, z);
}

inline BoundPair bound_m(const ModelParams& p, double h, double dt, double g_norm_sq,
                         const ZetaConstants& z) {
    return detail::cell_bound(p.D_m, p.lambda_m, p.p_m, p.w_m, g_norm_sq, h, dt, z);
}

/// e-equation bound; h cancels. The printed ratio has identical numerator
/// and denominator, so the literal channel is exactly 1.
inline BoundPair bound_e(const ModelParams& p, double dt, double f_norm_sq,
                         double m_norm_sq, const ZetaConstants& z) {
    const double a = 1.0 / dt + p.alpha_e;
    const double cf = (p.alpha_f + 2.0 * p.p_e * p.w_e) * f_norm_sq;
    const double cm = p.alpha_m * m_norm_sq;
    BoundPair b;
    b.corrected = (a * z.zeta2_M + cf * z.zeta2_T + cm * z.zeta2_T) /
                  (a * z.zeta1_M + cf * z.zeta1_T + cm * z.zeta1_T);
    b.paper_literal = 1.0;
    return b;
}

enum class DtRegime { much_less, comparable, much_greater };

inline const char* dt_regime_name(DtRegime r) {
    switch (r) {
        case DtRegime::much_less: return "<<";
        case DtRegime::comparable: return "~";
        default: return ">>";
    }
}

/// Per-matrix conditioning record: estimated extremes, the empirical ratio,
/// both bound channels and the sweep coordinates.
struct ConditionReport {
    std::string equation; // g | f | m | e | system
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double k_empirical = 0.0;
    double bound_corrected = 0.0;
    double bound_paper_literal = 0.0;
    double h = 0.0;
    double dt = 0.0;
    int step = 0;
    std::string dominant;
};

/// System condition number: max rule over the four equations. The dominant
/// label is the arg-max of the empirical channel, ties broken in the order
/// g, f, m, e.
inline ConditionReport system_condition(const std::array<ConditionReport, 4>& reports) {
    ConditionReport out;
    out.equation = "system";
    out.h = reports[0].h;
    out.dt = reports[0].dt;
    out.step = reports[0].step;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        out.lambda_min = std::max(out.lambda_min, 0.0);
        out.k_empirical = std::max(out.k_empirical, reports[i].k_empirical);
        out.bound_corrected = std::max(out.bound_corrected, reports[i].bound_corrected);
        out.bound_paper_literal =
            std::max(out.bound_paper_literal, reports[i].bound_paper_literal);
        if (reports[i].k_empirical > reports[arg].k_empirical) arg = i;
    }
    out.dominant = reports[arg].equation;
    return out;
}

struct RegimeLabel {
    char case_label = '?';       // A..F
    DtRegime dt_regime = DtRegime::comparable;
    std::string dominant;        // arg-max equation of the corrected bounds
};

/// Classify the parameter/discretization regime from the corrected bounds.
/// Fixed documented cutoffs: dt/h^2 < 0.1 and > 10 delimit the time-step
/// regimes; case E requires the four bounds within 20% of each other
/// ((max-min)/max <= 0.2) together with damping terms that dominate the
/// time-decay terms in both the f- and m-denominators; case F requires all
/// decay rates above twice their baseline values and dt/h^2 > 10.
inline RegimeLabel classify_regime(const ModelParams& p, double h, double dt,
                                   double g_norm_sq, const ZetaConstants& z,
                                   double f_norm_sq = 0.0, double m_norm_sq = 0.0) {
    RegimeLabel out;
    const double r = dt / (h * h);
    out.dt_regime = r < 0.1    ? DtRegime::much_less
                    : r > 10.0 ? DtRegime::much_greater
                               : DtRegime::comparable;

    const std::array<double, 4> bounds = {
        bound_g(p, h, dt, z).corrected,
        bound_f(p, h, dt, g_norm_sq, z).corrected,
        bound_m(p, h, dt, g_norm_sq, z).corrected,
        bound_e(p, dt, f_norm_sq, m_norm_sq, z).corrected};
    static const char* names[4] = {"g", "f", "m", "e"};
    std::size_t arg = 0;
    double bmax = bounds[0], bmin = bounds[0];
    for (std::size_t i = 1; i < 4; ++i) {
        if (bounds[i] > bmax) {
            bmax = bounds[i];
            arg = i;
        }
        bmin = std::min(bmin, bounds[i]);
    }
    out.dominant = names[arg];

    const double spread = (bmax - bmin) / bmax;
    const bool damping_large =
        2.0 * p.p_f * p.w_f * z.zeta2_T * g_norm_sq > (1.0 / dt + p.lambda_f) * z.zeta1_M &&
        2.0 * p.p_m * p.w_m * z.zeta2_T * g_norm_sq > (1.0 / dt + p.lambda_m) * z.zeta1_M;
    if (spread <= 0.2 && damping_large) {
        out.case_label = 'E';
        return out;
    }
    if (arg == 0) out.case_label = 'A';
    else if (arg == 1) out.case_label = 'B';
    else if (arg == 2) out.case_label = 'C';
    else {
        const ModelParams baseline;
        const bool high_decay = p.lambda_g > 2.0 * baseline.lambda_g &&
                                p.lambda_f > 2.0 * baseline.lambda_f &&
                                p.lambda_m > 2.0 * baseline.lambda_m;
        out.case_label = (high_decay && r > 10.0) ? 'F' : 'D';
    }
    return out;
}

/// Conditioning reports for the four step-1 systems of a state (amended
/// variant matrices; the empirical channel needs symmetric input).
inline std::array<ConditionReport, 4> condition_step(const Stepper& stepper,
                                                     const StateFields& s,
                                                     const ZetaConstants& z, int step,
                                                     double tol = 1e-9) {
    const auto& p = stepper.params();
    const double h = stepper.mesh().h();
    const double g_n = dot(s.g.coeffs, s.g.coeffs);
    const double f_n = dot(s.f.coeffs, s.f.coeffs);
    const double m_n = dot(s.m.coeffs, s.m.coeffs);

    std::array<ConditionReport, 4> out;
    const std::array<std::pair<Equation, BoundPair>, 4> specs = {
        std::pair{Equation::g, bound_g(p, h, p.dt, z)},
        std::pair{Equation::f, bound_f(p, h, p.dt, g_n, z)},
        std::pair{Equation::m, bound_m(p, h, p.dt, g_n, z)},
        std::pair{Equation::e, bound_e(p, p.dt, f_n, m_n, z)}};
    for (std::size_t i = 0; i < 4; ++i) {
        const Equation eq = specs[i].first;
        LinearSystem sys = eq == Equation::g   ? stepper.build_system_g(s)
                           : eq == Equation::f ? stepper.build_system_f(s)
                           : eq == Equation::m ? stepper.build_system_m(s)
                                               : stepper.build_system_e(s);
        ConditionReport r;
        r.equation = equation_name(eq);
        const auto [lmin, lmax] = extreme_eigenvalues(sys.A, tol);
        r.lambda_min = lmin;
        r.lambda_max = lmax;
        r.k_empirical = lmax / lmin;
        r.bound_corrected = specs[i].second.corrected;
        r.bound_paper_literal = specs[i].second.paper_literal;
        r.h = h;
        r.dt = p.dt;
        r.step = step;
        out[i] = r;
    }
    return out;
}

} // namespace healfem
