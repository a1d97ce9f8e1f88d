#pragma once

#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "healfem/field.hpp"
#include "healfem/params.hpp"

namespace healfem {

enum class Species { f = 0, m = 1 };

/// The four coupled fields (growth factor, fibroblasts, macrophages, ECM) on
/// one shared mesh, at one time level.
struct StateFields {
    FeField g, f, m, e;
    double t = 0.0;

    const Mesh& mesh() const { return *g.mesh; }
    bool finite() const { return g.finite() && f.finite() && m.finite() && e.finite(); }
};

/// Radial Gaussian kernel K(r) = r/(2 pi sigma^2) exp(-r^2 / 2 sigma^2).
inline double kernel(double r, double sigma) {
    if (r < 0.0) throw std::invalid_argument("kernel: r must be >= 0");
    const double s2 = sigma * sigma;
    return r / (2.0 * std::numbers::pi * s2) * std::exp(-r * r / (2.0 * s2));
}

/// Unit radial vector y/|y|, zero at the origin.
inline Vec2 unit_radial(const Vec2& y) {
    const double n = y.norm();
    if (n == 0.0) return {0.0, 0.0};
    return {y.x / n, y.y / n};
}

/// Combined volume fraction rho(u) = w_g g + w_f f + w_m m + w_e e at a point.
inline double volume_fraction(const StateFields& s, const ModelParams& p, const Vec2& x) {
    return p.w_g * eval_field(s.g, x) + p.w_f * eval_field(s.f, x) +
           p.w_m * eval_field(s.m, x) + p.w_e * eval_field(s.e, x);
}

/// Free-space clamp (1 - rho)^+.
inline double free_space(double rho) { return rho < 1.0 ? 1.0 - rho : 0.0; }

/// Saturating adhesion strength S_ij = S_max (e+g)/(1+e+g).
inline double adhesion_strength(double e_plus_g, double s_max) {
    return s_max * e_plus_g / (1.0 + e_plus_g);
}

/// Second moment of the truncated Gaussian over the sensing square:
///   C = integral over [-R,R]^2 of exp(-|y|^2 / 2 sigma^2) y_1^2 dy.
/// Evaluated by the exact tensor factorization into 1-D integrals.
inline double moment_constant(double sigma, double R) {
    const double E = std::erf(R / (std::numbers::sqrt2 * sigma));
    const double X = std::exp(-R * R / (2.0 * sigma * sigma));
    const double B = sigma * std::sqrt(2.0 * std::numbers::pi) * E; // 1-D Gaussian mass
    const double A = sigma * sigma * (B - 2.0 * R * X);             // 1-D second moment
    return A * B;
}

/// Alternative normalization of the moment, moment_constant / (2 pi sigma^2);
/// this is the factor that multiplies 1/R in the reduced-flux prefactor and
/// feeds the literal bound channel.
inline double moment_constant_literal_form(double sigma, double R) {
    const double E = std::erf(R * std::numbers::sqrt2 / (2.0 * sigma));
    const double X = std::exp(-R * R / (2.0 * sigma * sigma));
    return -sigma * E *
           (std::sqrt(2.0 * std::numbers::pi) * X * R - std::numbers::pi * sigma * E) /
           std::numbers::pi;
}

/// Scalar factor multiplying the gradient combination in the Taylor-reduced
/// flux, per the configured convention.
inline double flux_prefactor(const AdhesionParams& a, const NonlocalOptions& opts) {
    const double c = moment_constant(a.sigma, a.R);
    if (opts.prefactor == PrefactorConvention::m_form_literal) return c / a.R;
    return c / (2.0 * std::numbers::pi * a.sigma * a.sigma * a.R);
}

namespace detail {

struct PointState {
    double g, f, m, e;
};

// One point location and basis evaluation shared by all four fields; this is
// the hot path of the sensing-square quadrature.
inline bool sample_state(const StateFields& s, const Vec2& x, const NonlocalOptions& opts,
                         PointState& out) {
    Vec2 q = x;
    const Mesh& mesh = s.mesh();
    if (!mesh.domain().contains(q)) {
        if (opts.outside == OutsidePolicy::zero) return false;
        const Rect& d = mesh.domain();
        q.x = std::min(std::max(q.x, d.lo.x), d.hi.x);
        q.y = std::min(std::max(q.y, d.lo.y), d.hi.y);
    }
    std::size_t e;
    Barycentric bc;
    if (!mesh.find_element(q, e, bc)) return false;
    const BasisEval b = mesh.eval_basis(e, bc);
    const auto& el = mesh.element(e);
    out.g = out.f = out.m = out.e = 0.0;
    for (int k = 0; k < 6; ++k) {
        const double w = b.value[k];
        const std::int32_t id = el[k];
        out.g += s.g[id] * w;
        out.f += s.f[id] * w;
        out.m += s.m[id] * w;
        out.e += s.e[id] * w;
    }
    return true;
}

inline double gamma_term(const PointState& ps, Species i, const ModelParams& p) {
    const auto& a = p.adhesion;
    const int row = static_cast<int>(i);
    double sat = 1.0;
    if (!p.nonlocal.force_saturation_max) {
        const double eg = ps.e + ps.g;
        sat = eg / (1.0 + eg);
    }
    return sat * (a.S_max[row][0] * ps.f + a.S_max[row][1] * ps.m + a.S_max[row][2] * ps.e);
}

} // namespace detail

/// Full non-local adhesion flux
///   A_i[u](x) = (1/R) integral over [-R,R]^2 of
///               K(|y|) n(y) ((1-rho)^+ Gamma_i)(x+y) dy
/// by a tensor midpoint rule with quad_n^2 cells. Sensing points outside the
/// domain follow the configured policy (zero contribution or clamp to the
/// boundary).
inline Vec2 adhesion_integral_full(const StateFields& s, const ModelParams& p,
                                   const Vec2& x, Species i, int quad_n = 0) {
    if (!s.mesh().domain().contains(x))
        throw std::domain_error("adhesion_integral_full: x outside domain");
    const auto& a = p.adhesion;
    const int q = quad_n > 0 ? quad_n : p.nonlocal.quad_n;
    if (q < 4) throw std::invalid_argument("adhesion_integral_full: quad_n must be >= 4");
    const double cell = 2.0 * a.R / q;
    const double dA = cell * cell;
    Vec2 acc{0.0, 0.0};
#ifndef NDEBUG
    double kernel_mass = 0.0, gamma_max = 0.0;
#endif
    for (int iy = 0; iy < q; ++iy) {
        for (int ix = 0; ix < q; ++ix) {
            const Vec2 y{-a.R + (ix + 0.5) * cell, -a.R + (iy + 0.5) * cell};
            detail::PointState ps;
            if (!detail::sample_state(s, x + y, p.nonlocal, ps)) continue;
            const double rho =
                p.w_g * ps.g + p.w_f * ps.f + p.w_m * ps.m + p.w_e * ps.e;
            const double clamp = p.nonlocal.force_clamp_one ? 1.0 : free_space(rho);
            const double gam = detail::gamma_term(ps, i, p);
            const double k = kernel(y.norm(), a.sigma);
            acc = acc + (k * clamp * gam * dA) * unit_radial(y);
#ifndef NDEBUG
            kernel_mass += k * dA;
            gamma_max = std::max(gamma_max, std::abs(gam));
#endif
        }
    }
    const Vec2 out = (1.0 / a.R) * acc;
#ifndef NDEBUG
    // |A| <= (1/R) max|Gamma| * integral of K over the counted cells
    assert(out.norm() <= kernel_mass * gamma_max / a.R + 1e-12);
#endif
    return out;
}

/// Taylor/moment reduction of the adhesion flux:
///   A~_i(x) = prefactor * (S_max[i][f] grad f + S_max[i][m] grad m
///             + S_max[i][e] grad e)(x).
inline Vec2 adhesion_approx(const StateFields& s, const ModelParams& p, const Vec2& x,
                            Species i) {
    const auto& a = p.adhesion;
    const int row = static_cast<int>(i);
    const Vec2 gf = eval_gradient(s.f, x);
    const Vec2 gm = eval_gradient(s.m, x);
    const Vec2 ge = eval_gradient(s.e, x);
    const double c = flux_prefactor(a, p.nonlocal);
    return c * (a.S_max[row][0] * gf + a.S_max[row][1] * gm + a.S_max[row][2] * ge);
}

} // namespace healfem
