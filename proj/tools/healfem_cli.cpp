// Command-line front end: simulate | scheme-diff | cond-sweep | calibrate |
// classify | plot. Exit codes: 0 success, 2 config error, 3 solver failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "healfem/experiments.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "configuration file (key = value)");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "random seed override");
    cmd->add_option("--threads", opts.threads, "worker threads for sweeps");
}

healfem::ExperimentConfig load_config(const CommonOpts& opts) {
    healfem::ExperimentConfig cfg;
    if (!opts.config_path.empty()) {
        std::ifstream is(opts.config_path);
        if (!is)
            throw healfem::ConfigError("config: cannot open '" + opts.config_path + "'");
        std::ostringstream ss;
        ss << is.rdbuf();
        cfg = healfem::parse_config(ss.str());
    }
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
    if (opts.threads > 0) cfg.threads = opts.threads;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-element solver and conditioning analyzer for a coupled "
                 "non-local wound-healing model"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto* simulate = app.add_subcommand("simulate", "run the healing simulation");
    auto* scheme_diff =
        app.add_subcommand("scheme-diff", "compare amended vs original flux schemes");
    auto* cond_sweep =
        app.add_subcommand("cond-sweep", "empirical condition numbers and bounds");
    auto* calibrate = app.add_subcommand("calibrate", "calibrate the zeta constants");
    auto* classify = app.add_subcommand("classify", "label the parameter regime");
    for (auto* cmd : {simulate, scheme_diff, cond_sweep, calibrate, classify})
        add_common(cmd, opts);

    auto* plot = app.add_subcommand("plot", "emit a plot script for a result CSV");
    std::string plot_csv, plot_kind, plot_out;
    plot->add_option("--csv", plot_csv, "input CSV")->required();
    plot->add_option("--kind", plot_kind, "scheme-diff | cond-sweep")->required();
    plot->add_option("--out-script", plot_out, "script path (default: <csv>.py)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) {
            const auto result = healfem::cmd_simulate(load_config(opts));
            std::cout << "simulate: " << result.steps << " steps, "
                      << result.snapshots.size() << " snapshots\n";
            for (const auto& s : result.snapshots)
                std::cout << "  t=" << s.t << " ecm_range=" << s.e_range() << "\n";
        } else if (scheme_diff->parsed()) {
            const auto result = healfem::cmd_scheme_diff(load_config(opts));
            std::cout << "scheme-diff: " << result.steps << " steps; final L2 diffs"
                      << " g=" << result.final_diff[0] << " f=" << result.final_diff[1]
                      << " m=" << result.final_diff[2] << " e=" << result.final_diff[3]
                      << "\n";
        } else if (cond_sweep->parsed()) {
            const auto result = healfem::cmd_cond_sweep(load_config(opts));
            std::cout << "cond-sweep: " << result.points.size() << " tuples, dominance"
                      << " agreement " << result.dominance_matches << "/"
                      << result.points.size() << "\n";
        } else if (calibrate->parsed()) {
            const auto z = healfem::cmd_calibrate(load_config(opts));
            std::cout << "calibrate: zeta1_M=" << z.zeta1_M << " zeta2_M=" << z.zeta2_M
                      << " zeta2_inv=" << z.zeta2_inv << " zeta1_T=" << z.zeta1_T
                      << " zeta2_T=" << z.zeta2_T << "\n";
        } else if (classify->parsed()) {
            const auto label = healfem::cmd_classify(load_config(opts));
            std::cout << "classify: case=" << label.case_label
                      << " dominant=" << label.dominant
                      << " dt_regime=" << healfem::dt_regime_name(label.dt_regime) << "\n";
        } else if (plot->parsed()) {
            const std::string script = healfem::emit_plot_script(plot_csv, plot_kind);
            const std::string path = plot_out.empty() ? plot_csv + ".py" : plot_out;
            std::ofstream os(path, std::ios::binary);
            if (!os) throw std::runtime_error("cannot write " + path);
            os << script;
            std::cout << "plot: wrote " << path << "\n";
        }
    } catch (const healfem::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const healfem::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
