#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "healfem/conditioning.hpp"
#include "healfem/config.hpp"

namespace healfem {

/// Lossless CSV number format (17 significant digits, scientific).
inline std::string format_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << text;
}

inline std::filesystem::path prepare_out_dir(const ExperimentConfig& cfg) {
    std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    write_text_file(dir / "resolved_config.txt", echo_config(cfg));
    return dir;
}

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min<std::size_t>(threads, count);
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    for (auto& th : pool) th.join();
}

} // namespace detail

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SnapshotRecord {
    double t = 0.0;
    double e_min = 0.0;
    double e_max = 0.0;
    double e_range() const { return e_max - e_min; }
};

struct SimulateResult {
    std::vector<SnapshotRecord> snapshots;
    double min_nodal_value = 0.0; // over all fields and steps
    int steps = 0;
};

/// Run the healing simulation to t_end, emitting one CSV per requested
/// snapshot time, a per-step run log and an ECM-range summary.
inline SimulateResult cmd_simulate(const ExperimentConfig& cfg) {
    const auto dir = detail::prepare_out_dir(cfg);
    const Mesh mesh(cfg.n, cfg.domain);
    const Stepper stepper(mesh, cfg.params, cfg.variant, cfg.nonlocal_mode);
    StateFields s = initial_state(mesh, cfg.params);

    const double dt = cfg.params.dt;
    const int steps = static_cast<int>(std::llround(cfg.params.t_end / dt));

    SimulateResult result;
    result.steps = steps;
    result.min_nodal_value = 1e300;

    auto track_min = [&result](const StateFields& state) {
        for (const FeField* f : {&state.g, &state.f, &state.m, &state.e})
            for (double v : f->coeffs)
                result.min_nodal_value = std::min(result.min_nodal_value, v);
    };

    auto maybe_snapshot = [&](const StateFields& state, int step) {
        for (double want : cfg.snapshot_times) {
            // nearest step wins; requests beyond the horizon never match
            if (static_cast<int>(std::llround(want / dt)) == step) {
                char name[64];
                std::snprintf(name, sizeof name, "snapshot_t%g.csv", want);
                std::ofstream os(dir / name, std::ios::binary);
                os << "node_id,x,y,g,f,m,e\n";
                for (std::size_t i = 0; i < mesh.node_count(); ++i) {
                    os << i << ',' << format_sci(mesh.node(i).x) << ','
                       << format_sci(mesh.node(i).y) << ',' << format_sci(state.g[i])
                       << ',' << format_sci(state.f[i]) << ',' << format_sci(state.m[i])
                       << ',' << format_sci(state.e[i]) << '\n';
                }
                SnapshotRecord rec;
                rec.t = want;
                rec.e_min = *std::min_element(state.e.coeffs.begin(), state.e.coeffs.end());
                rec.e_max = *std::max_element(state.e.coeffs.begin(), state.e.coeffs.end());
                result.snapshots.push_back(rec);
            }
        }
    };

    std::ofstream log(dir / "run_log.csv", std::ios::binary);
    log << "step,t,l2_g,l2_f,l2_m,l2_e,iters_g,iters_f,iters_m,iters_e\n";

    track_min(s);
    maybe_snapshot(s, 0);
    for (int k = 1; k <= steps; ++k) {
        StepInfo info;
        s = stepper.advance(s, &info);
        track_min(s);
        log << k << ',' << format_sci(k * dt) << ',' << format_sci(stepper.l2_norm(s.g))
            << ',' << format_sci(stepper.l2_norm(s.f)) << ','
            << format_sci(stepper.l2_norm(s.m)) << ',' << format_sci(stepper.l2_norm(s.e));
        for (const auto& st : info.solve) log << ',' << st.iterations;
        log << '\n';
        maybe_snapshot(s, k);
    }

    std::ofstream summary(dir / "summary.csv", std::ios::binary);
    summary << "t,e_min,e_max,e_range\n";
    for (const auto& rec : result.snapshots)
        summary << format_sci(rec.t) << ',' << format_sci(rec.e_min) << ','
                << format_sci(rec.e_max) << ',' << format_sci(rec.e_range()) << '\n';
    return result;
}

// ---------------------------------------------------------------------------
// scheme-diff
// ---------------------------------------------------------------------------

struct SchemeDiffResult {
    std::array<double, 4> final_diff{};   // g, f, m, e at the last step
    std::array<double, 4> max_diff{};     // over the whole run
    int steps = 0;
};

/// Run the amended and original schemes side by side from identical initial
/// data and record the per-step L2 differences.
inline SchemeDiffResult cmd_scheme_diff(const ExperimentConfig& cfg) {
    const auto dir = detail::prepare_out_dir(cfg);
    const Mesh mesh(cfg.n, cfg.domain);
    const Stepper amended(mesh, cfg.params, SchemeVariant::amended, cfg.nonlocal_mode);
    const Stepper original(mesh, cfg.params, SchemeVariant::original, cfg.nonlocal_mode);
    StateFields sa = initial_state(mesh, cfg.params);
    StateFields so = sa;

    const double dt = cfg.params.dt;
    const int steps = static_cast<int>(std::llround(cfg.params.t_end / dt));

    std::ofstream os(dir / "scheme_diff.csv", std::ios::binary);
    os << "step,t,dg,df,dm,de\n";

    SchemeDiffResult result;
    result.steps = steps;
    for (int k = 1; k <= steps; ++k) {
        sa = amended.advance(sa);
        so = original.advance(so);
        const std::array<double, 4> d = {
            amended.l2_field_difference(sa.g, so.g), amended.l2_field_difference(sa.f, so.f),
            amended.l2_field_difference(sa.m, so.m), amended.l2_field_difference(sa.e, so.e)};
        os << k << ',' << format_sci(k * dt);
        for (double v : d) os << ',' << format_sci(v);
        os << '\n';
        result.final_diff = d;
        for (int i = 0; i < 4; ++i) result.max_diff[i] = std::max(result.max_diff[i], d[i]);
    }
    return result;
}

// ---------------------------------------------------------------------------
// cond-sweep / calibrate / classify
// ---------------------------------------------------------------------------

struct SweepPoint {
    int n = 0;
    double dt = 0.0;
    std::string scaling; // "name*factor;..." or "baseline"
    std::array<ConditionReport, 4> reports;
    ConditionReport system;
    RegimeLabel regime;
};

struct CondSweepResult {
    std::vector<SweepPoint> points;
    int dominance_matches = 0; // empirical vs corrected-bound arg-max
};

/// Assemble the step-1 systems for every sweep tuple, estimate their extreme
/// eigenvalues, evaluate both bound channels and classify the regime.
inline CondSweepResult cmd_cond_sweep(const ExperimentConfig& cfg,
                                      const ZetaConstants* zeta_in = nullptr) {
    const auto dir = detail::prepare_out_dir(cfg);
    const ZetaConstants zeta = zeta_in
                                   ? *zeta_in
                                   : calibrate_zeta(cfg.calib_family, cfg.domain, cfg.seed);

    const std::vector<int> ns = cfg.sweep_n.empty() ? std::vector<int>{cfg.n} : cfg.sweep_n;
    const std::vector<double> dts =
        cfg.sweep_dt.empty() ? std::vector<double>{cfg.params.dt} : cfg.sweep_dt;

    // cross product of the per-parameter scale lists
    struct Scaling {
        std::string label = "baseline";
        std::vector<std::pair<std::string, double>> factors;
    };
    std::vector<Scaling> scalings{Scaling{}};
    for (const auto& [pname, factors] : cfg.sweep_scale) {
        std::vector<Scaling> next;
        for (const auto& base : scalings) {
            for (double f : factors) {
                Scaling s = base;
                char buf[64];
                std::snprintf(buf, sizeof buf, "%s*%g", pname.c_str(), f);
                s.label = (base.factors.empty() ? std::string() : base.label + ";") + buf;
                s.factors.emplace_back(pname, f);
                next.push_back(std::move(s));
            }
        }
        scalings = std::move(next);
    }

    struct Tuple {
        int n;
        double dt;
        const Scaling* scaling;
    };
    std::vector<Tuple> tuples;
    for (int n : ns)
        for (double dt : dts)
            for (const auto& s : scalings) tuples.push_back({n, dt, &s});

    CondSweepResult result;
    result.points.resize(tuples.size());
    detail::parallel_for(tuples.size(), cfg.threads, [&](std::size_t i) {
        const Tuple& t = tuples[i];
        ModelParams p = cfg.params;
        p.dt = t.dt;
        for (const auto& [pname, f] : t.scaling->factors)
            *detail::param_slot(p, pname) *= f;
        const Mesh mesh(t.n, cfg.domain);
        const Stepper stepper(mesh, p, SchemeVariant::amended, cfg.nonlocal_mode);
        const StateFields s = initial_state(mesh, p);
        SweepPoint& pt = result.points[i];
        pt.n = t.n;
        pt.dt = t.dt;
        pt.scaling = t.scaling->label;
        pt.reports = condition_step(stepper, s, zeta, 1);
        pt.system = system_condition(pt.reports);
        pt.regime = classify_regime(p, mesh.h(), t.dt, dot(s.g.coeffs, s.g.coeffs), zeta,
                                    dot(s.f.coeffs, s.f.coeffs),
                                    dot(s.m.coeffs, s.m.coeffs));
    });

    std::ofstream os(dir / "cond_sweep.csv", std::ios::binary);
    os << "n,h,dt,step,equation,lambda_min,lambda_max,k_empirical,bound_corrected,"
          "bound_paper_literal,dominant,case_label,dt_regime,scaling\n";
    std::ofstream agree(dir / "dominance_agreement.csv", std::ios::binary);
    agree << "n,dt,scaling,empirical_dominant,bound_dominant,match\n";
    for (const auto& pt : result.points) {
        auto row = [&](const ConditionReport& r) {
            os << pt.n << ',' << format_sci(r.h) << ',' << format_sci(pt.dt) << ','
               << r.step << ',' << r.equation << ',' << format_sci(r.lambda_min) << ','
               << format_sci(r.lambda_max) << ',' << format_sci(r.k_empirical) << ','
               << format_sci(r.bound_corrected) << ',' << format_sci(r.bound_paper_literal)
               << ',' << (r.equation == "system" ? pt.system.dominant : "") << ','
               << pt.regime.case_label << ',' << dt_regime_name(pt.regime.dt_regime) << ','
               << pt.scaling << '\n';
        };
        for (const auto& r : pt.reports) row(r);
        ConditionReport sys = pt.system;
        sys.h = pt.reports[0].h;
        row(sys);
        const bool match = pt.system.dominant == pt.regime.dominant;
        if (match) ++result.dominance_matches;
        agree << pt.n << ',' << format_sci(pt.dt) << ',' << pt.scaling << ','
              << pt.system.dominant << ',' << pt.regime.dominant << ','
              << (match ? 1 : 0) << '\n';
    }
    return result;
}

/// Calibrate the zeta constants and emit them as key-value text together
/// with the per-mesh raw ratios.
inline ZetaConstants cmd_calibrate(const ExperimentConfig& cfg) {
    const auto dir = detail::prepare_out_dir(cfg);
    const ZetaConstants z = calibrate_zeta(cfg.calib_family, cfg.domain, cfg.seed);
    std::ostringstream os;
    os << "zeta1_M = " << format_sci(z.zeta1_M) << "\n";
    os << "zeta2_M = " << format_sci(z.zeta2_M) << "\n";
    os << "zeta2_inv = " << format_sci(z.zeta2_inv) << "\n";
    os << "zeta1_T = " << format_sci(z.zeta1_T) << "\n";
    os << "zeta2_T = " << format_sci(z.zeta2_T) << "\n";
    os << "element_signature = " << z.element_signature << "\n";
    for (const auto& pm : z.raw) {
        os << "raw.n" << pm.n << ".h = " << format_sci(pm.h) << "\n";
        os << "raw.n" << pm.n << ".mass_min_ratio = " << format_sci(pm.mass_min_ratio)
           << "\n";
        os << "raw.n" << pm.n << ".mass_max_ratio = " << format_sci(pm.mass_max_ratio)
           << "\n";
        os << "raw.n" << pm.n << ".inv_ratio = " << format_sci(pm.inv_ratio) << "\n";
        os << "raw.n" << pm.n << ".t_min_ratio = " << format_sci(pm.t_min_ratio) << "\n";
        os << "raw.n" << pm.n << ".t_max_ratio = " << format_sci(pm.t_max_ratio) << "\n";
    }
    detail::write_text_file(dir / "zeta.txt", os.str());
    return z;
}

/// Classify the configured discretization point and record the labels.
inline RegimeLabel cmd_classify(const ExperimentConfig& cfg) {
    const auto dir = detail::prepare_out_dir(cfg);
    const ZetaConstants z = calibrate_zeta(cfg.calib_family, cfg.domain, cfg.seed);
    const Mesh mesh(cfg.n, cfg.domain);
    const StateFields s = initial_state(mesh, cfg.params);
    const RegimeLabel label =
        classify_regime(cfg.params, mesh.h(), cfg.params.dt,
                        dot(s.g.coeffs, s.g.coeffs), z, dot(s.f.coeffs, s.f.coeffs),
                        dot(s.m.coeffs, s.m.coeffs));
    std::ostringstream os;
    os << "case = " << label.case_label << "\n";
    os << "dominant = " << label.dominant << "\n";
    os << "dt_regime = " << dt_regime_name(label.dt_regime) << "\n";
    detail::write_text_file(dir / "classify.txt", os.str());
    return label;
}

// ---------------------------------------------------------------------------
// plot scripts
// ---------------------------------------------------------------------------

/// Standalone matplotlib script that only reads the CSV; no computation.
inline std::string emit_plot_script(const std::string& csv_path, const std::string& kind) {
    if (!std::filesystem::exists(csv_path))
        throw ConfigError("plot: CSV not found: " + csv_path);
    std::ostringstream os;
    os << "#!/usr/bin/env python3\n"
       << "# plots " << csv_path << " (" << kind << ")\n"
       << "import csv\n"
       << "import matplotlib\n"
       << "matplotlib.use('Agg')\n"
       << "import matplotlib.pyplot as plt\n\n"
       << "rows = list(csv.DictReader(open(r'" << csv_path << "')))\n";
    if (kind == "scheme-diff") {
        os << "t = [float(r['t']) for r in rows]\n"
           << "for field, label in [('dg', 'growth factor'), ('df', 'fibroblasts'),\n"
           << "                     ('dm', 'macrophages'), ('de', 'ECM')]:\n"
           << "    plt.semilogy(t, [float(r[field]) for r in rows], label=label)\n"
           << "plt.xlabel('t')\n"
           << "plt.ylabel('L2 difference')\n"
           << "plt.legend()\n";
    } else if (kind == "cond-sweep") {
        os << "eqs = sorted({r['equation'] for r in rows} - {'system'})\n"
           << "for eq in eqs:\n"
           << "    pts = [(float(r['h']), float(r['k_empirical'])) for r in rows\n"
           << "           if r['equation'] == eq]\n"
           << "    pts.sort()\n"
           << "    plt.loglog([p[0] for p in pts], [p[1] for p in pts], 'o-', label=eq)\n"
           << "plt.xlabel('h')\n"
           << "plt.ylabel('empirical condition number')\n"
           << "plt.legend()\n";
    } else {
        throw ConfigError("plot: unknown kind '" + kind + "'");
    }
    os << "plt.savefig(r'" << csv_path << ".png', dpi=150)\n";
    return os.str();
}

} // namespace healfem
