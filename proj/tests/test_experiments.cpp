#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "healfem/experiments.hpp"

using namespace healfem;
using Catch::Approx;

namespace {
namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "healfem_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}
} // namespace

TEST_CASE("simulate emits snapshots, log and summary", "[experiments]") {
    ExperimentConfig cfg;
    cfg.n = 4;
    cfg.params.t_end = 0.4;
    cfg.snapshot_times = {0.0, 0.4};
    cfg.out_dir = fresh_dir("sim").string();
    const SimulateResult r = cmd_simulate(cfg);
    CHECK(r.steps == 2);
    REQUIRE(r.snapshots.size() == 2);
    CHECK(r.snapshots[0].t == 0.0);
    CHECK(r.snapshots[0].e_range() > 0.9); // wound vs far field
    CHECK(fs::exists(fs::path(cfg.out_dir) / "snapshot_t0.csv"));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "snapshot_t0.4.csv"));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "run_log.csv"));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "summary.csv"));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "resolved_config.txt"));

    const std::string snap = slurp(fs::path(cfg.out_dir) / "snapshot_t0.csv");
    CHECK(snap.rfind("node_id,x,y,g,f,m,e\n", 0) == 0);

    SECTION("t_end = 0 emits only the initial snapshot") {
        ExperimentConfig c0 = cfg;
        c0.params.t_end = 0.0;
        c0.snapshot_times = {0.0};
        c0.out_dir = fresh_dir("sim0").string();
        const SimulateResult r0 = cmd_simulate(c0);
        CHECK(r0.steps == 0);
        CHECK(r0.snapshots.size() == 1);
    }

    SECTION("off-grid snapshot times emit exactly once at the nearest step") {
        ExperimentConfig c1 = cfg;
        c1.snapshot_times = {0.3}; // equidistant between steps 1 and 2
        c1.out_dir = fresh_dir("simoff").string();
        const SimulateResult r1 = cmd_simulate(c1);
        CHECK(r1.snapshots.size() == 1);
        // a request beyond the horizon never matches
        ExperimentConfig c2 = cfg;
        c2.snapshot_times = {7.0};
        c2.out_dir = fresh_dir("simfar").string();
        CHECK(cmd_simulate(c2).snapshots.empty());
    }
}

TEST_CASE("simulate is deterministic", "[experiments]") {
    ExperimentConfig cfg;
    cfg.n = 4;
    cfg.params.t_end = 0.6;
    cfg.snapshot_times = {0.6};
    cfg.out_dir = fresh_dir("det1").string();
    cmd_simulate(cfg);
    const std::string first = slurp(fs::path(cfg.out_dir) / "snapshot_t0.6.csv");
    cfg.out_dir = fresh_dir("det2").string();
    cmd_simulate(cfg);
    const std::string second = slurp(fs::path(cfg.out_dir) / "snapshot_t0.6.csv");
    CHECK(first == second);
}

TEST_CASE("scheme-diff vanishes without haptotaxis", "[experiments]") {
    ExperimentConfig cfg;
    cfg.n = 4;
    cfg.params.t_end = 0.6;
    cfg.params.adhesion.mu_f = 0.0;
    cfg.params.adhesion.mu_m = 0.0;
    cfg.out_dir = fresh_dir("sd0").string();
    const SchemeDiffResult r = cmd_scheme_diff(cfg);
    for (double v : r.max_diff) CHECK(v < 1e-12);
}

TEST_CASE("scheme-diff grows with the haptotactic rate", "[experiments]") {
    // short horizon: over longer runs the m-coupled contribution partially
    // cancels the direct mu_f term and the ordering can invert
    ExperimentConfig cfg;
    cfg.n = 8;
    cfg.params.t_end = 0.4;
    cfg.out_dir = fresh_dir("sd1").string();
    const SchemeDiffResult base = cmd_scheme_diff(cfg);

    ExperimentConfig cfg2 = cfg;
    cfg2.params.adhesion.mu_f *= 2.0;
    cfg2.out_dir = fresh_dir("sd2").string();
    const SchemeDiffResult doubled = cmd_scheme_diff(cfg2);

    CHECK(base.final_diff[1] > 0.0);
    CHECK(doubled.final_diff[1] > base.final_diff[1]);
}

TEST_CASE("cond-sweep writes per-equation and system rows", "[experiments]") {
    ExperimentConfig cfg;
    cfg.sweep_n = {2, 4};
    cfg.sweep_dt = {0.2};
    cfg.calib_family = {2, 4};
    cfg.out_dir = fresh_dir("sweep").string();
    cfg.threads = 2;
    const CondSweepResult r = cmd_cond_sweep(cfg);
    REQUIRE(r.points.size() == 2);
    for (const auto& pt : r.points) {
        for (const auto& rep : pt.reports) {
            CHECK(rep.k_empirical >= 1.0);
            CHECK(rep.bound_corrected >= rep.k_empirical);
        }
        CHECK(pt.system.k_empirical >=
              std::max({pt.reports[0].k_empirical, pt.reports[1].k_empirical,
                        pt.reports[2].k_empirical, pt.reports[3].k_empirical}) -
                  1e-12);
    }
    const std::string csv = slurp(fs::path(cfg.out_dir) / "cond_sweep.csv");
    CHECK(csv.find(",system,") != std::string::npos);
    CHECK(csv.find(",g,") != std::string::npos);
    CHECK(fs::exists(fs::path(cfg.out_dir) / "dominance_agreement.csv"));

    // deterministic across thread counts
    ExperimentConfig cfg1 = cfg;
    cfg1.threads = 1;
    cfg1.out_dir = fresh_dir("sweep1").string();
    cmd_cond_sweep(cfg1);
    CHECK(slurp(fs::path(cfg1.out_dir) / "cond_sweep.csv") == csv);
}

TEST_CASE("cond-sweep crosses parameter scalings", "[experiments]") {
    ExperimentConfig cfg;
    cfg.sweep_n = {8};
    cfg.sweep_dt = {0.2};
    cfg.sweep_scale = {{"D_g", {1.0, 100.0}}};
    cfg.calib_family = {2, 4};
    cfg.out_dir = fresh_dir("sweepscale").string();
    const CondSweepResult r = cmd_cond_sweep(cfg);
    REQUIRE(r.points.size() == 2);
    CHECK(r.points[0].scaling == "D_g*1");
    CHECK(r.points[1].scaling == "D_g*100");
    // the scaled point's growth-factor system is much worse conditioned
    CHECK(r.points[1].reports[0].k_empirical > 2.0 * r.points[0].reports[0].k_empirical);
    CHECK(r.points[1].regime.case_label == 'A');
    const std::string agree = slurp(fs::path(cfg.out_dir) / "dominance_agreement.csv");
    CHECK(agree.rfind("n,dt,scaling,empirical_dominant,bound_dominant,match\n", 0) == 0);
}

TEST_CASE("calibrate emits constants and raw ratios", "[experiments]") {
    ExperimentConfig cfg;
    cfg.calib_family = {2, 4};
    cfg.out_dir = fresh_dir("calib").string();
    const ZetaConstants z = cmd_calibrate(cfg);
    const std::string txt = slurp(fs::path(cfg.out_dir) / "zeta.txt");
    CHECK(txt.find("zeta1_M = ") != std::string::npos);
    CHECK(txt.find("raw.n2.mass_min_ratio") != std::string::npos);
    CHECK(txt.find("raw.n4.t_max_ratio") != std::string::npos);
    CHECK(z.zeta1_M > 0.0);
}

TEST_CASE("classify writes its labels", "[experiments]") {
    ExperimentConfig cfg;
    cfg.n = 4;
    cfg.calib_family = {2, 4};
    cfg.params.dt = 1e-4;
    cfg.out_dir = fresh_dir("classify").string();
    const RegimeLabel label = cmd_classify(cfg);
    CHECK(label.dt_regime == DtRegime::much_less);
    const std::string txt = slurp(fs::path(cfg.out_dir) / "classify.txt");
    CHECK(txt.find("dt_regime = <<") != std::string::npos);
}

TEST_CASE("plot scripts", "[experiments]") {
    CHECK_THROWS_AS(emit_plot_script("/no/such/file.csv", "scheme-diff"), ConfigError);

    const fs::path dir = fresh_dir("plot");
    const fs::path csv = dir / "scheme_diff.csv";
    std::ofstream(csv) << "step,t,dg,df,dm,de\n1,0.2,1e-5,1e-6,1e-5,1e-4\n";
    const std::string script = emit_plot_script(csv.string(), "scheme-diff");
    CHECK(script.find("semilogy") != std::string::npos);
    CHECK(script.find(csv.string()) != std::string::npos);

    const fs::path csv2 = dir / "cond_sweep.csv";
    std::ofstream(csv2) << "n,h,dt,step,equation,lambda_min,lambda_max,k_empirical,"
                           "bound_corrected,bound_paper_literal,dominant,case_label,"
                           "dt_regime,scaling\n";
    const std::string script2 = emit_plot_script(csv2.string(), "cond-sweep");
    CHECK(script2.find("loglog") != std::string::npos);

    CHECK_THROWS_AS(emit_plot_script(csv.string(), "pie-chart"), ConfigError);
}
