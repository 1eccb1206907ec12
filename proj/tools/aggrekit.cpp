#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "agg/config.hpp"
#include "agg/duhamel.hpp"
#include "agg/report.hpp"
#include "agg/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIndeterminate = 3;
constexpr int kExitNonContractive = 11;

json num(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    if (std::isnan(v)) return json("nan");
    return json(v);
}

struct KernelArgs {
    std::string variant = "gaussian";
    double alpha = 1.0;
    double beta = 1.5;
    double c = 1.0;
    double amplitude = 1.0;
    double sigma = 1.0;
    std::string sign;
    std::string table;
    int dim = 2;
};

void add_kernel_options(CLI::App* app, KernelArgs& args) {
    app->add_option("--kernel", args.variant,
                    "kernel variant: zero|gaussian|exponential|bessel|newtonian|power_law|"
                    "repulsive_bessel|custom_radial")
        ->required();
    app->add_option("--alpha", args.alpha, "bessel/exponential parameter");
    app->add_option("--beta", args.beta, "power-law exponent, 1 < beta < dim");
    app->add_option("--c", args.c, "power-law amplitude");
    app->add_option("--amplitude", args.amplitude, "gaussian amplitude");
    app->add_option("--sigma", args.sigma, "gaussian width");
    app->add_option("--sign", args.sign, "attractive|repulsive");
    app->add_option("--table", args.table, "csv path for custom_radial (r,k,k')");
    app->add_option("--dim", args.dim, "spatial dimension")->check(CLI::Range(1, 3));
}

agg::KernelSpec kernel_from_args(const KernelArgs& args) {
    json j;
    j["variant"] = args.variant;
    if (args.variant == "bessel" || args.variant == "exponential") j["alpha"] = args.alpha;
    if (args.variant == "power_law") {
        j["beta"] = args.beta;
        j["c"] = args.c;
    }
    if (args.variant == "gaussian") {
        j["amplitude"] = args.amplitude;
        j["sigma"] = args.sigma;
    }
    if (args.variant == "bessel" || args.variant == "newtonian" || args.variant == "power_law")
        j["dim"] = args.dim;
    if (!args.sign.empty()) j["sign"] = args.sign;
    if (!args.table.empty()) j["table"] = args.table;
    return agg::kernel_from_json(j, fs::current_path());
}

int cmd_analyze(const KernelArgs& args, const std::vector<double>& deltas,
                const std::vector<double>& i0_grid, double s_max) {
    agg::KernelSpec kernel = kernel_from_args(args);
    const int n = args.dim;
    json out;
    out["kernel"] = kernel.name();
    out["dim"] = n;

    agg::SingularityClass cls;
    try {
        cls = agg::classify(kernel, n);
    } catch (const agg::IndeterminateClassification& e) {
        out["class"] = {{"verdict", "indeterminate"}, {"diagnostics", e.what()}};
        std::cout << out.dump(2) << "\n";
        return kExitIndeterminate;
    }
    out["class"] = {{"verdict", agg::to_string(cls.verdict)},
                    {"qprime_sup", num(cls.qprime_sup)},
                    {"weak_qprime", num(cls.weak_qprime)},
                    {"near_origin_exponent", cls.near_origin_exponent}};

    try {
        agg::OsgoodResult os = agg::osgood(kernel, n);
        out["osgood"] = {{"finite", os.finite}, {"value", num(os.value)}};
    } catch (const std::exception& e) {
        out["osgood"] = {{"error", e.what()}};
    }

    json blowup = json::array();
    json masses = json::array();
    for (double delta : deltas) {
        json entry;
        entry["delta"] = delta;
        try {
            agg::BlowupParams p = agg::blowup_params(kernel, n, delta, std::max(s_max, 2.0 * delta));
            entry["admissible"] = true;
            entry["gamma"] = p.gamma;
            entry["c_bar"] = p.c_bar;
            for (double i0 : i0_grid) {
                masses.push_back({{"delta", delta},
                                  {"i0", i0},
                                  {"critical_mass", agg::critical_mass(p, n, i0)}});
            }
        } catch (const agg::NotBlowupAdmissible&) {
            entry["admissible"] = false;
        }
        blowup.push_back(entry);
    }
    out["blowup_params"] = blowup;
    out["critical_mass"] = masses;
    bool any_admissible = false;
    for (const auto& e : blowup)
        if (e.value("admissible", false)) any_admissible = true;
    out["blowup"] = any_admissible ? "admissible" : "not admissible";

    if (n >= 2) {
        json table = json::array();
        std::vector<double> qprimes;
        for (int k = 1; k <= 4; ++k) qprimes.push_back(1.0 + k * (n - 1.0) / 4.0);
        if (std::isfinite(cls.weak_qprime) && cls.weak_qprime > 1.0 && cls.weak_qprime <= n)
            qprimes.push_back(cls.weak_qprime);
        for (double qp : qprimes) {
            agg::QStarReport q = agg::q_star_smallness(n, qp, 0.0);
            table.push_back({{"qprime", qp},
                             {"q_star", q.q_star},
                             {"smallness_threshold_unit_kernel", num(q.bound_used)},
                             {"empirical", q.empirical},
                             {"degenerate", q.degenerate},
                             {"kernel_endpoint", qp == cls.weak_qprime}});
        }
        out["q_star"] = table;
    }

    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_override, bool no_plot) {
    agg::ExperimentConfig cfg = agg::load_experiment_config(config_path);
    const fs::path base = fs::path(config_path).parent_path();
    agg::SimConfig sim = agg::build_sim_config(cfg, base);
    agg::RunResult result = agg::run(sim);
    fs::path out_dir = out_override.empty() ? fs::path(cfg.out_directory) : fs::path(out_override);
    if (out_dir.is_relative() && out_override.empty()) out_dir = base / out_dir;
    agg::BundleSummary summary =
        agg::write_report_bundle(out_dir, cfg, sim, result, cfg.plot && !no_plot);
    if (result.max_negativity > 1e-8)
        std::fprintf(stderr, "warning: density undershoot reached %.3e of max|u| (tolerance 1e-8)\n",
                     result.max_negativity);
    std::fprintf(stderr, "%s: %s (t_final=%.6g, steps=%ld) -> %s\n", "aggrekit simulate",
                 agg::to_string(result.termination), result.series.rows.back().t,
                 result.steps_taken, out_dir.string().c_str());
    return summary.exit_code;
}

int cmd_sweep(const std::string& config_path, const std::string& out_override, int parallelism) {
    agg::ExperimentConfig cfg = agg::load_experiment_config(config_path);
    if (!cfg.has_sweep) throw agg::ConfigError("sweep: config has no sweep section");
    const fs::path base = fs::path(config_path).parent_path();
    fs::path out_dir = out_override.empty() ? fs::path(cfg.out_directory) : fs::path(out_override);
    if (out_dir.is_relative() && out_override.empty()) out_dir = base / out_dir;
    agg::SweepResult result = agg::run_sweep(cfg, out_dir, parallelism, base);
    agg::write_sweep_summary_csv(result, out_dir / "summary.csv");
    agg::write_sweep_summary_json(result, out_dir / "sweep_summary.json");
    for (const auto& row : result.rows)
        std::fprintf(stderr, "  value=%.6g -> %s\n", row.value, row.termination.c_str());
    return 0;
}

int cmd_picard(const std::string& config_path, double tol, int max_iter) {
    agg::ExperimentConfig cfg = agg::load_experiment_config(config_path);
    const fs::path base = fs::path(config_path).parent_path();
    agg::SimConfig sim = agg::build_sim_config(cfg, base);
    const int n = cfg.grid.dim;

    agg::SingularityClass cls = agg::classify(cfg.kernel, n);
    agg::Regime regime = cls.verdict == agg::SingularityClass::Verdict::StronglySingular
                             ? agg::Regime::Strong
                             : agg::Regime::Mild;
    double qprime, q;
    if (regime == agg::Regime::Strong) {
        qprime = 0.5 * (1.0 + std::min<double>(n, cls.qprime_sup));
        q = qprime / (qprime - 1.0);
    } else if (cls.near_origin_exponent > 0.0) {
        qprime = n / std::sqrt(cls.near_origin_exponent);
        q = qprime / (qprime - 1.0);
    } else {
        qprime = std::numeric_limits<double>::infinity();
        q = 1.0;
    }
    const double r_max = 2.0 * cfg.grid.half_length * std::sqrt(n);
    const double grad_norm = std::isinf(qprime) ? agg::grad_sup_norm(cfg.kernel, n)
                                                : agg::grad_lq_norm(cfg.kernel, n, qprime, r_max);
    const double u0_l1 = agg::lp_norm(sim.u0, 1.0);
    const double u0_lq = agg::lp_norm(sim.u0, q);
    agg::LocalExistenceEstimate est =
        agg::local_existence_time(regime, u0_l1, u0_lq, grad_norm, q, n);

    const double horizon = std::isfinite(est.T) ? est.T : cfg.t_end;
    agg::PicardOptions opts;
    opts.regime = regime;
    opts.q = q;
    agg::PicardState st = agg::picard_solve(sim.u0, cfg.kernel, horizon, tol, max_iter, opts);

    json out;
    out["regime"] = agg::to_string(est.regime);
    out["q"] = est.q;
    out["qprime"] = num(est.qprime);
    out["T"] = num(est.T);
    out["horizon_used"] = horizon;
    json ledger;
    for (const auto& [key, value] : est.constants_ledger) ledger[key] = num(value);
    out["constants"] = ledger;
    out["iterates"] = st.iterate_index;
    out["converged"] = st.converged;
    json ratios = json::array();
    for (double r : st.contraction_ratios) ratios.push_back(num(r));
    out["contraction_ratios"] = ratios;
    out["weighted_norm"] = num(st.weighted_norm);
    out["residual"] = num(st.residual);

    if (st.converged) {
        agg::SimConfig check = sim;
        check.t_end = horizon;
        check.dt_init = std::min(check.dt_init, horizon / 500.0);
        check.snapshot_times = {horizon};
        agg::RunResult res = agg::run(check);
        if (res.termination == agg::Termination::Completed && !res.snapshots.empty()) {
            const agg::Field& a = res.snapshots.back().second;
            const agg::Field& b = st.trajectory.slices.back();
            double err = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i)
                err = std::max(err, std::abs(a.values[i] - b.values[i]));
            out["solver_agreement_linf"] = err;
        } else {
            out["solver_agreement_linf"] = "unavailable";
        }
    }

    std::cout << out.dump(2) << "\n";
    return st.converged ? 0 : kExitNonContractive;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aggregation-diffusion simulator and kernel analysis toolkit"};
    app.require_subcommand(1);

    KernelArgs kargs;
    std::vector<double> deltas = {0.1, 0.5, 1.0, 2.0};
    std::vector<double> i0_grid = {0.0};
    double s_max = 50.0;
    CLI::App* analyze = app.add_subcommand("analyze", "classify a kernel and report its constants");
    add_kernel_options(analyze, kargs);
    analyze->add_option("--delta", deltas, "delta grid for the blow-up constants");
    analyze->add_option("--i0", i0_grid, "second-moment grid for critical masses");
    analyze->add_option("--s-max", s_max, "upper radius for the quadratic-growth constant");

    std::string config_path, out_dir;
    bool no_plot = false;
    CLI::App* simulate = app.add_subcommand("simulate", "run one configured experiment");
    simulate->add_option("--config", config_path, "experiment JSON")->required();
    simulate->add_option("--out", out_dir, "output directory override");
    simulate->add_flag("--no-plot", no_plot, "skip plot.svg");

    std::string sweep_config, sweep_out;
    int parallelism = 0;
    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    sweep->add_option("--config", sweep_config, "experiment JSON with a sweep section")->required();
    sweep->add_option("--out", sweep_out, "output directory override");
    sweep->add_option("--parallelism", parallelism, "worker count (default: cores)");

    std::string picard_config;
    double picard_tol = 1e-10;
    int picard_iters = 30;
    CLI::App* picard = app.add_subcommand("picard", "fixed-point study of the mild formulation");
    picard->add_option("--config", picard_config, "experiment JSON")->required();
    picard->add_option("--tol", picard_tol, "weighted-norm stopping tolerance");
    picard->add_option("--max-iter", picard_iters, "iteration cap");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return cmd_analyze(kargs, deltas, i0_grid, s_max);
        if (simulate->parsed()) return cmd_simulate(config_path, out_dir, no_plot);
        if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_out, parallelism);
        if (picard->parsed()) return cmd_picard(picard_config, picard_tol, picard_iters);
    } catch (const agg::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const agg::IndeterminateClassification& e) {
        std::fprintf(stderr, "indeterminate classification: %s\n", e.what());
        return kExitIndeterminate;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid arguments: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
