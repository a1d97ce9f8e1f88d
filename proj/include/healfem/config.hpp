#pragma once

#include <cstdint>
#include <charconv>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "healfem/params.hpp"
#include "healfem/stepper.hpp"

namespace healfem {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Full experiment description. Defaults reproduce the baseline setup:
/// domain [-1,1]^2, dt = 0.2, horizon 100, baseline parameter table, desk
/// resolution n = 16.
struct ExperimentConfig {
    int n = 16;
    Rect domain{{-1.0, -1.0}, {1.0, 1.0}};
    ModelParams params;
    SchemeVariant variant = SchemeVariant::amended;
    NonlocalMode nonlocal_mode = NonlocalMode::taylor;
    std::string out_dir = "out";
    std::vector<double> snapshot_times;
    std::vector<int> sweep_n;
    std::vector<double> sweep_dt;
    std::vector<std::pair<std::string, std::vector<double>>> sweep_scale;
    std::vector<int> calib_family = {4, 8, 16};
    std::uint64_t seed = 12345;
    int threads = 1;
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& s) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: malformed number for '" + key + "': " + s);
    }
    if (pos != s.size())
        throw ConfigError("config: malformed number for '" + key + "': " + s);
    return v;
}

inline long parse_int(const std::string& key, const std::string& s) {
    std::size_t pos = 0;
    long v;
    try {
        v = std::stol(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: malformed integer for '" + key + "': " + s);
    }
    if (pos != s.size())
        throw ConfigError("config: malformed integer for '" + key + "': " + s);
    return v;
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

inline double* param_slot(ModelParams& p, const std::string& name) {
    static const char* names[] = {
        "D_g",     "D_f",     "D_m",     "lambda_g", "lambda_f", "lambda_m",
        "p_g_f",   "p_g_m",   "p_f",     "p_m",      "p_e",      "alpha_f",
        "alpha_m", "alpha_e", "e_c",     "w_g",      "w_f",      "w_m",
        "w_e",     "S_ff",    "S_fm",    "S_fe",     "S_mf",     "S_mm",
        "S_me",    "mu_f",    "mu_m",    "R",        "sigma"};
    double* slots[] = {
        &p.D_g,     &p.D_f,     &p.D_m,     &p.lambda_g,
        &p.lambda_f, &p.lambda_m, &p.p_g_f,   &p.p_g_m,
        &p.p_f,     &p.p_m,     &p.p_e,     &p.alpha_f,
        &p.alpha_m, &p.alpha_e, &p.e_c,     &p.w_g,
        &p.w_f,     &p.w_m,     &p.w_e,     &p.adhesion.S_max[0][0],
        &p.adhesion.S_max[0][1], &p.adhesion.S_max[0][2], &p.adhesion.S_max[1][0],
        &p.adhesion.S_max[1][1], &p.adhesion.S_max[1][2], &p.adhesion.mu_f,
        &p.adhesion.mu_m, &p.adhesion.R, &p.adhesion.sigma};
    for (std::size_t i = 0; i < std::size(names); ++i)
        if (name == names[i]) return slots[i];
    return nullptr;
}

} // namespace detail

/// Parse flat key = value text ('#' comments). Unknown keys are errors; any
/// baseline parameter can be overridden as params.<name>.
inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (!detail::split_ws(line).empty())
                throw ConfigError("config: expected 'key = value' at line " +
                                  std::to_string(lineno));
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config: empty key or value at line " +
                              std::to_string(lineno));

        if (key == "n") {
            cfg.n = static_cast<int>(detail::parse_int(key, val));
        } else if (key == "domain") {
            const auto parts = detail::split_ws(val);
            if (parts.size() != 4)
                throw ConfigError("config: domain needs 'x0 y0 x1 y1'");
            cfg.domain.lo = {detail::parse_double(key, parts[0]),
                             detail::parse_double(key, parts[1])};
            cfg.domain.hi = {detail::parse_double(key, parts[2]),
                             detail::parse_double(key, parts[3])};
        } else if (key == "dt") {
            cfg.params.dt = detail::parse_double(key, val);
        } else if (key == "t_end") {
            cfg.params.t_end = detail::parse_double(key, val);
        } else if (key == "solver_tol") {
            cfg.params.solver_tol = detail::parse_double(key, val);
        } else if (key == "variant") {
            if (val == "amended") cfg.variant = SchemeVariant::amended;
            else if (val == "original") cfg.variant = SchemeVariant::original;
            else throw ConfigError("config: variant must be amended|original");
        } else if (key == "nonlocal_mode") {
            if (val == "taylor") cfg.nonlocal_mode = NonlocalMode::taylor;
            else if (val == "full") cfg.nonlocal_mode = NonlocalMode::full;
            else throw ConfigError("config: nonlocal_mode must be taylor|full");
        } else if (key == "nonlocal_quad_n") {
            cfg.params.nonlocal.quad_n = static_cast<int>(detail::parse_int(key, val));
        } else if (key == "outside") {
            if (val == "zero") cfg.params.nonlocal.outside = OutsidePolicy::zero;
            else if (val == "clamp") cfg.params.nonlocal.outside = OutsidePolicy::clamp;
            else throw ConfigError("config: outside must be zero|clamp");
        } else if (key == "prefactor_convention") {
            if (val == "sigma") cfg.params.nonlocal.prefactor = PrefactorConvention::sigma_form;
            else if (val == "m_literal")
                cfg.params.nonlocal.prefactor = PrefactorConvention::m_form_literal;
            else throw ConfigError("config: prefactor_convention must be sigma|m_literal");
        } else if (key == "out_dir") {
            cfg.out_dir = val;
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(detail::parse_int(key, val));
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(detail::parse_int(key, val));
        } else if (key == "snapshot_times") {
            cfg.snapshot_times.clear();
            for (const auto& t : detail::split_ws(val))
                cfg.snapshot_times.push_back(detail::parse_double(key, t));
        } else if (key == "sweep.n") {
            cfg.sweep_n.clear();
            for (const auto& t : detail::split_ws(val))
                cfg.sweep_n.push_back(static_cast<int>(detail::parse_int(key, t)));
        } else if (key == "sweep.dt") {
            cfg.sweep_dt.clear();
            for (const auto& t : detail::split_ws(val))
                cfg.sweep_dt.push_back(detail::parse_double(key, t));
        } else if (key.rfind("sweep.scale.", 0) == 0) {
            const std::string pname = key.substr(12);
            ModelParams probe;
            if (!detail::param_slot(probe, pname))
                throw ConfigError("config: unknown parameter in '" + key + "'");
            std::vector<double> factors;
            for (const auto& t : detail::split_ws(val))
                factors.push_back(detail::parse_double(key, t));
            cfg.sweep_scale.emplace_back(pname, std::move(factors));
        } else if (key == "calib.family") {
            cfg.calib_family.clear();
            for (const auto& t : detail::split_ws(val))
                cfg.calib_family.push_back(static_cast<int>(detail::parse_int(key, t)));
        } else if (key.rfind("params.", 0) == 0) {
            double* slot = detail::param_slot(cfg.params, key.substr(7));
            if (!slot) throw ConfigError("config: unknown key '" + key + "'");
            *slot = detail::parse_double(key, val);
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    if (cfg.n < 1) throw ConfigError("config: n must be >= 1");
    if (!(cfg.params.dt > 0.0)) throw ConfigError("config: dt must be > 0");
    if (cfg.params.t_end < 0.0) throw ConfigError("config: t_end must be >= 0");
    if (cfg.threads < 1) throw ConfigError("config: threads must be >= 1");
    try {
        cfg.params.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

/// Fully resolved echo of a config; parse_config(echo_config(c)) reproduces c.
inline std::string echo_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    auto num = [](double v) {
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof buf, v); // shortest round-trip
        return std::string(buf, res.ptr);
    };
    os << "n = " << cfg.n << "\n";
    os << "domain = " << num(cfg.domain.lo.x) << ' ' << num(cfg.domain.lo.y) << ' '
       << num(cfg.domain.hi.x) << ' ' << num(cfg.domain.hi.y) << "\n";
    os << "dt = " << num(cfg.params.dt) << "\n";
    os << "t_end = " << num(cfg.params.t_end) << "\n";
    os << "solver_tol = " << num(cfg.params.solver_tol) << "\n";
    os << "variant = " << (cfg.variant == SchemeVariant::amended ? "amended" : "original")
       << "\n";
    os << "nonlocal_mode = "
       << (cfg.nonlocal_mode == NonlocalMode::taylor ? "taylor" : "full") << "\n";
    os << "nonlocal_quad_n = " << cfg.params.nonlocal.quad_n << "\n";
    os << "outside = "
       << (cfg.params.nonlocal.outside == OutsidePolicy::zero ? "zero" : "clamp") << "\n";
    os << "prefactor_convention = "
       << (cfg.params.nonlocal.prefactor == PrefactorConvention::sigma_form ? "sigma"
                                                                            : "m_literal")
       << "\n";
    os << "out_dir = " << cfg.out_dir << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "threads = " << cfg.threads << "\n";
    if (!cfg.snapshot_times.empty()) {
        os << "snapshot_times =";
        for (double t : cfg.snapshot_times) os << ' ' << num(t);
        os << "\n";
    }
    if (!cfg.sweep_n.empty()) {
        os << "sweep.n =";
        for (int n : cfg.sweep_n) os << ' ' << n;
        os << "\n";
    }
    if (!cfg.sweep_dt.empty()) {
        os << "sweep.dt =";
        for (double t : cfg.sweep_dt) os << ' ' << num(t);
        os << "\n";
    }
    for (const auto& [pname, factors] : cfg.sweep_scale) {
        os << "sweep.scale." << pname << " =";
        for (double fct : factors) os << ' ' << num(fct);
        os << "\n";
    }
    os << "calib.family =";
    for (int n : cfg.calib_family) os << ' ' << n;
    os << "\n";

    ModelParams base; // only echo parameter entries, all of them, by name
    const char* names[] = {"D_g",     "D_f",     "D_m",     "lambda_g", "lambda_f",
                           "lambda_m", "p_g_f",   "p_g_m",   "p_f",      "p_m",
                           "p_e",     "alpha_f", "alpha_m", "alpha_e",  "e_c",
                           "w_g",     "w_f",     "w_m",     "w_e",      "S_ff",
                           "S_fm",    "S_fe",    "S_mf",    "S_mm",     "S_me",
                           "mu_f",    "mu_m",    "R",       "sigma"};
    ModelParams copy = cfg.params;
    for (const char* name : names)
        os << "params." << name << " = " << num(*detail::param_slot(copy, name)) << "\n";
    return os.str();
}

} // namespace healfem
