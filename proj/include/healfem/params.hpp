#pragma once

#include <stdexcept>

namespace healfem {

/// Out-of-domain policy for sensing-region points of the non-local integral.
enum class OutsidePolicy { zero, clamp };

/// Prefactor convention for the Taylor-reduced adhesion flux; sigma_form is
/// C_raw/(2 pi sigma^2 R), m_form_literal is C_raw/R.
enum class PrefactorConvention { sigma_form, m_form_literal };

struct NonlocalOptions {
    int quad_n = 16; // midpoint cells per axis of the sensing square
    OutsidePolicy outside = OutsidePolicy::zero;
    PrefactorConvention prefactor = PrefactorConvention::sigma_form;
    // test-mode switches: force (1 - rho)^+ to 1 and S_ij to S_max, which is
    // the setting under which the Taylor reduction is exactly comparable
    bool force_clamp_one = false;
    bool force_saturation_max = false;
};

/// Maximal adhesion strengths S_max[i][j], i in {f, m}, j in {f, m, e},
/// sensing radius, kernel width, and haptotactic rates.
struct AdhesionParams {
    double S_max[2][3] = {{0.2, 0.1, 0.1}, {0.1, 0.2, 1.0}};
    double R = 0.1;
    double sigma = 0.04;
    double mu_f = 0.08;
    double mu_m = 0.08;

    void validate() const {
        if (!(R > 0.0) || !(sigma > 0.0))
            throw std::invalid_argument("AdhesionParams: R and sigma must be positive");
        if (mu_f < 0.0 || mu_m < 0.0)
            throw std::invalid_argument("AdhesionParams: haptotactic rates must be >= 0");
        for (const auto& row : S_max)
            for (double s : row)
                if (s < 0.0)
                    throw std::invalid_argument("AdhesionParams: S_max must be >= 0");
    }
};

/// All model scalars with their dimensionless baseline values, plus the time
/// step and horizon.
struct ModelParams {
    double D_g = 0.0035;
    double D_f = 0.0008;
    double D_m = 0.0008;
    double lambda_g = 0.2;
    double lambda_f = 0.025;
    double lambda_m = 0.025;
    double p_g_f = 0.2;
    double p_g_m = 0.2;
    double p_f = 5.0;
    double p_m = 5.0;
    double p_e = 5.0;
    double alpha_f = 0.015;
    double alpha_m = 0.015;
    double alpha_e = 0.05;
    double e_c = 0.1;
    double w_g = 1.0;
    double w_f = 1.0;
    double w_m = 1.0;
    double w_e = 1.0;
    AdhesionParams adhesion;
    NonlocalOptions nonlocal;
    double dt = 0.2;
    double t_end = 100.0;
    double solver_tol = 1e-10;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("ModelParams: dt must be > 0");
        if (!(D_g > 0.0 && D_f > 0.0 && D_m > 0.0))
            throw std::invalid_argument("ModelParams: diffusion coefficients must be > 0");
        const double rates[] = {lambda_g, lambda_f, lambda_m, p_g_f, p_g_m, p_f,
                                p_m,      p_e,      alpha_f,  alpha_m, alpha_e,
                                e_c,      w_g,      w_f,      w_m,     w_e};
        for (double r : rates)
            if (r < 0.0) throw std::invalid_argument("ModelParams: rates must be >= 0");
        adhesion.validate();
    }
};

} // namespace healfem
