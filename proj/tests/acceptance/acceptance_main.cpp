// Acceptance suite: runs every release criterion end to end (through the CLI
// binary where a simulation is involved) and prints one PASS/FAIL line per
// criterion. Exits with the number of failed criteria.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "agg/diagnostics.hpp"
#include "agg/duhamel.hpp"
#include "agg/heat.hpp"
#include "agg/kernels.hpp"
#include "agg/quadrature.hpp"
#include "agg/report.hpp"
#include "agg/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace agg;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::vector<std::pair<std::string, double>> g_completed_drifts;
int g_failures = 0;

void report(int id, const std::string& label, const Outcome& outcome) {
    std::printf("[%s] %2d. %s%s%s\n", outcome.pass ? "PASS" : "FAIL", id, label.c_str(),
                outcome.detail.empty() ? "" : " -- ", outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++g_failures;
}

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "agg_acceptance";
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
    const fs::path path = work_dir() / name;
    std::ofstream os(path);
    os << text;
    return path;
}

struct CliRun {
    int exit_code = -1;
    double seconds = 0.0;
    fs::path out_dir;
};

CliRun run_simulate(const fs::path& config, const std::string& tag) {
    CliRun run;
    run.out_dir = work_dir() / tag;
    fs::remove_all(run.out_dir);
    const std::string cmd = std::string(AGGREKIT_BIN) + " simulate --config " + config.string() +
                            " --out " + run.out_dir.string() + " 2>/dev/null";
    const auto start = std::chrono::steady_clock::now();
    const int status = std::system(cmd.c_str());
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return run;
}

DiagnosticsSeries load_series(const fs::path& dir) {
    std::ifstream is(dir / "series.csv");
    return load_series_csv(is);
}

json load_verdict(const fs::path& dir) {
    std::ifstream is(dir / "verdict.json");
    return json::parse(is);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void note_completed(const std::string& tag, const DiagnosticsSeries& series) {
    g_completed_drifts.emplace_back(tag, mass_drift(series));
}

char fmt_buf[512];
std::string fmt(const char* f, auto... args) {
    std::snprintf(fmt_buf, sizeof(fmt_buf), f, args...);
    return fmt_buf;
}

// ---------------------------------------------------------------------------
// shared configs

const char* kHeatConfig = R"JSON({
  "grid": {"dim": 1, "half_length": 20.0, "points_per_dim": 256},
  "kernel": {"variant": "zero"},
  "initial_data": {"type": "gaussian", "mass": 1.0, "sigma": 0.5},
  "time": {"t_end": 1.0, "dt_init": 0.01},
  "outputs": {"diagnostics_stride": 10, "snapshot_count": 2, "plot": false}
})JSON";

std::string newtonian_2d_config(double mass, double sigma, double t_end, int stride) {
    std::ostringstream os;
    os << R"({
  "grid": {"dim": 2, "half_length": 10.0, "points_per_dim": 128},
  "kernel": {"variant": "newtonian"},
  "initial_data": {"type": "gaussian", "mass": )"
       << mass << R"(, "sigma": )" << sigma << R"(},
  "time": {"t_end": )" << t_end
       << R"(, "dt_init": 0.02, "dt_min": 1e-9},
  "outputs": {"diagnostics_stride": )"
       << stride << R"(, "snapshot_count": 2, "plot": false}
})";
    return os.str();
}

const char* kVirialConfig = R"JSON({
  "grid": {"dim": 1, "half_length": 10.0, "points_per_dim": 256},
  "kernel": {"variant": "gaussian", "amplitude": 3.0, "sigma": 1.0},
  "initial_data": {"type": "gaussian", "mass": 3.0, "sigma": 0.6},
  "time": {"t_end": 1.0, "dt_init": 0.002},
  "outputs": {"diagnostics_stride": 1, "virial_rhs": true, "plot": false}
})JSON";

const char* kBoundConfig = R"JSON({
  "grid": {"dim": 2, "half_length": 4.0, "points_per_dim": 256},
  "kernel": {"variant": "newtonian"},
  "initial_data": {"type": "gaussian", "mass": 100.53096491487338, "sigma": 0.125},
  "time": {"t_end": 0.05, "dt_init": 0.0002, "dt_min": 1e-10},
  "outputs": {"diagnostics_stride": 1, "plot": false}
})JSON";

const char* kPicardConfig = R"JSON({
  "grid": {"dim": 1, "half_length": 12.0, "points_per_dim": 256},
  "kernel": {"variant": "gaussian", "amplitude": 0.8, "sigma": 1.0},
  "initial_data": {"type": "gaussian", "mass": 1.0, "sigma": 0.5},
  "time": {"t_end": 0.5, "dt_init": 0.005}
})JSON";

const char* kRepulsiveConfig = R"JSON({
  "grid": {"dim": 2, "half_length": 8.0, "points_per_dim": 128},
  "kernel": {"variant": "repulsive_bessel"},
  "initial_data": {"type": "gaussian", "mass": 2.0, "sigma": 0.5},
  "time": {"t_end": 2.0, "dt_init": 0.01},
  "outputs": {"diagnostics_stride": 2, "plot": false}
})JSON";

// ---------------------------------------------------------------------------
// oracles for criterion 3

double heat_lq_oracle(double t, double q, int n) {
    if (std::isinf(q)) return std::pow(4.0 * M_PI * t, -0.5 * n);
    const double area = 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
    auto f = [&](double r) {
        const std::array<double, 2> x = {r, 0.0};
        return area * std::pow(heat_kernel_value(std::span(x.data(), n), t), q) *
               std::pow(r, n - 1.0);
    };
    const double rmax = std::sqrt(4.0 * t / q) * 20.0 + 1.0;
    return std::pow(quad::integrate(f, 1e-12, rmax, 64, 16), 1.0 / q);
}

double grad_heat_l1_oracle(double t, int n) {
    const double area = 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
    auto f = [&](double r) {
        const std::array<double, 2> x = {r, 0.0};
        return area * (r / (2.0 * t)) * heat_kernel_value(std::span(x.data(), n), t) *
               std::pow(r, n - 1.0);
    };
    const double rmax = std::sqrt(4.0 * t) * 20.0 + 1.0;
    return quad::integrate(f, 1e-12, rmax, 64, 16);
}

// three-point derivative of the moment column at row i
double didt_at(const DiagnosticsSeries& s, std::size_t i) {
    const auto& lo = s.rows[i - 1];
    const auto& mid = s.rows[i];
    const auto& hi = s.rows[i + 1];
    const double hm = mid.t - lo.t, hp = hi.t - mid.t;
    return (hm * hm * hi.moment + (hp * hp - hm * hm) * mid.moment - hp * hp * lo.moment) /
           (hp * hm * (hp + hm));
}

}  // namespace

int main() {
    std::printf("aggrekit acceptance suite\n");
    const fs::path heat_cfg = write_file("heat.json", kHeatConfig);
    const fs::path virial_cfg = write_file("virial.json", kVirialConfig);
    const fs::path sub_cfg =
        write_file("newtonian_sub.json", newtonian_2d_config(0.5 * 8.0 * M_PI, 0.5, 4.0, 2));
    const fs::path super_cfg =
        write_file("newtonian_super.json", newtonian_2d_config(2.0 * 8.0 * M_PI, 0.5, 4.0, 1));
    const fs::path bound_cfg = write_file("bound.json", kBoundConfig);
    const fs::path picard_cfg = write_file("picard.json", kPicardConfig);
    const fs::path repulsive_cfg = write_file("repulsive.json", kRepulsiveConfig);

    // ------------------------------------------------------------------ 1
    CliRun heat_run = run_simulate(heat_cfg, "out_heat");
    {
        Outcome res;
        if (heat_run.exit_code != 0) {
            res = {false, fmt("exit code %d", heat_run.exit_code)};
        } else {
            Field final_field = read_snapshot(heat_run.out_dir / "snapshots" / "snap_0001.aggf");
            const double var = 0.25 + 2.0 * 1.0;
            Field expect = gaussian_field(final_field.grid,
                                          {GaussianBump{1.0, {0.0, 0.0}, std::sqrt(var)}});
            double err = 0.0;
            for (std::size_t i = 0; i < expect.size(); ++i)
                err = std::max(err, std::abs(final_field.values[i] - expect.values[i]));
            DiagnosticsSeries series = load_series(heat_run.out_dir);
            note_completed("heat", series);
            res.pass = err < 1e-8 && heat_run.seconds < 5.0;
            res.detail = fmt("Linf error %.3e (tol 1e-8), runtime %.2fs (budget 5s)", err,
                             heat_run.seconds);
        }
        report(1, "heat oracle: zero-kernel run vs analytic solution", res);
    }

    // ------------------------------------------------------------------ 3
    {
        Outcome res;
        double worst = 0.0;
        const double qs[] = {1.0, 1.5, 2.0, kInf};
        for (int n : {1, 2}) {
            for (double t : {0.1, 1.0, 10.0}) {
                for (double q : qs) {
                    const double oracle = heat_lq_oracle(t, q, n);
                    worst = std::max(worst, std::abs(heat_lq_norm(t, q, n) - oracle) / oracle);
                }
                const double goracle = grad_heat_l1_oracle(t, n);
                worst = std::max(worst, std::abs(grad_heat_l1_norm(t, n) - goracle) / goracle);
            }
        }
        res.pass = worst < 1e-6;
        res.detail = fmt("max relative deviation %.3e (tol 1e-6)", worst);
        report(3, "heat-norm formulas vs quadrature oracles (n in {1,2})", res);
    }

    // ------------------------------------------------------------------ 4
    CliRun virial_run = run_simulate(virial_cfg, "out_virial");
    {
        Outcome res;
        if (virial_run.exit_code != 0) {
            res = {false, fmt("exit code %d", virial_run.exit_code)};
        } else {
            DiagnosticsSeries series = load_series(virial_run.out_dir);
            note_completed("virial", series);
            double worst = 0.0;
            int checked = 0;
            for (std::size_t i = 1; i + 1 < series.rows.size(); ++i) {
                const double t = series.rows[i].t;
                if (t < 0.1 || t > 1.0 || !series.rows[i].virial_rhs) continue;
                const double fd = didt_at(series, i);
                const double rhs = *series.rows[i].virial_rhs;
                worst = std::max(worst, std::abs(fd - rhs) / std::abs(rhs));
                ++checked;
            }
            res.pass = checked > 100 && worst < 0.01 && virial_run.seconds < 30.0;
            res.detail = fmt("max relative gap %.3e over %d rows (tol 1e-2), runtime %.1fs", worst,
                             checked, virial_run.seconds);
        }
        report(4, "virial identity: dI/dt vs pairwise sum on a mollified kernel", res);
    }

    // ---------------------------------------------------------------- 5, 6
    CliRun sub_run = run_simulate(sub_cfg, "out_sub");
    CliRun super_run = run_simulate(super_cfg, "out_super");
    {
        Outcome res;
        BlowupParams p = blowup_params(KernelSpec::newtonian(2), 2, 1.0,
                                       2.0 * 10.0 * std::sqrt(2.0));
        const double gamma_err = std::abs(p.gamma - 1.0 / (2.0 * M_PI));
        const double cbar_err = std::abs(p.c_bar - 1.0 / (2.0 * M_PI));
        if (sub_run.exit_code != 0) {
            res = {false, fmt("subcritical run exit %d", sub_run.exit_code)};
        } else if (super_run.exit_code != 10) {
            res = {false, fmt("supercritical run exit %d (want 10)", super_run.exit_code)};
        } else {
            DiagnosticsSeries sub_series = load_series(sub_run.out_dir);
            DiagnosticsSeries super_series = load_series(super_run.out_dir);
            note_completed("newtonian_subcritical", sub_series);
            VirialBoundReport sub_rep = virial_bound_check(sub_series, p, 2, 0.05);
            VirialBoundReport super_rep = virial_bound_check(super_series, p, 2, 0.05);
            res.pass = gamma_err < 1e-6 && cbar_err < 1e-6 && sub_rep.pass && super_rep.pass &&
                       sub_run.seconds < 300.0 && super_run.seconds < 300.0;
            res.detail = fmt(
                "gamma/c_bar err %.1e/%.1e; violations sub %.3e super %.3e (tol 5e-2); runtimes "
                "%.1fs/%.1fs",
                gamma_err, cbar_err, sub_rep.max_violation, super_rep.max_violation,
                sub_run.seconds, super_run.seconds);
        }
        report(5, "second-moment inequality holds on sub- and supercritical runs", res);
    }
    {
        Outcome res;
        if (sub_run.exit_code != 0 || super_run.exit_code != 10) {
            res = {false, fmt("exit codes %d/%d (want 0/10)", sub_run.exit_code,
                              super_run.exit_code)};
        } else {
            DiagnosticsSeries sub_series = load_series(sub_run.out_dir);
            bool monotone = true;
            double prev = kInf;
            for (const auto& row : sub_series.rows) {
                if (row.t < 0.5) continue;
                if (row.linf > prev * (1.0 + 1e-9)) monotone = false;
                prev = row.linf;
            }
            json verdict = load_verdict(super_run.out_dir);
            const double t_detect = verdict["termination"]["t_detect"].get<double>();
            const double critical = 8.0 * M_PI;
            const bool brackets =
                0.5 * 8.0 * M_PI >= critical / 2.0 && 2.0 * 8.0 * M_PI <= 2.0 * critical;
            res.pass = monotone && std::isfinite(t_detect) && t_detect > 0.0 && brackets;
            res.detail = fmt("sup monotone after t=0.5: %s; t_detect %.4f; masses 0.5/2.0 x 8pi "
                             "bracket the threshold",
                             monotone ? "yes" : "no", t_detect);
        }
        report(6, "mass dichotomy around 8 pi for the 2D newtonian kernel", res);
    }

    // ------------------------------------------------------------------ 7
    CliRun bound_run = run_simulate(bound_cfg, "out_bound");
    {
        Outcome res;
        BlowupParams exact{1.0, 1.0 / (2.0 * M_PI), 1.0 / (2.0 * M_PI)};
        const double bound = blowup_time_bound(32.0 * M_PI, M_PI, exact, 2);
        const double arith_err = std::abs(bound * 256.0 - 1.0);
        if (bound_run.exit_code != 10) {
            res = {false, fmt("supercritical bound run exit %d (want 10)", bound_run.exit_code)};
        } else {
            json verdict = load_verdict(bound_run.out_dir);
            const double t_detect = verdict["termination"]["t_detect"].get<double>();
            res.pass = arith_err < 1e-12 && std::isfinite(t_detect) && t_detect > 0.0;
            res.detail = fmt("bound error |256 b - 1| = %.2e (tol 1e-12); t_detect %.5f finite",
                             arith_err, t_detect);
        }
        report(7, "blow-up time bound 1/256 at M=32pi, I0=pi; detection finite", res);
    }

    // ------------------------------------------------------------------ 8
    {
        Outcome res;
        const fs::path out_file = work_dir() / "picard_stdout.json";
        const std::string cmd = std::string(AGGREKIT_BIN) + " picard --config " +
                                picard_cfg.string() + " > " + out_file.string() + " 2>/dev/null";
        const int status = std::system(cmd.c_str());
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        if (code != 0) {
            res = {false, fmt("picard exit %d", code)};
        } else {
            json out = json::parse(slurp(out_file));
            double max_ratio = 0.0;
            for (const auto& r : out["contraction_ratios"])
                max_ratio = std::max(max_ratio, r.get<double>());
            const double residual = out["residual"].get<double>();
            const double agreement = out["solver_agreement_linf"].get<double>();
            res.pass = out["converged"] == true && max_ratio < 1.0 && residual < 1e-6 &&
                       agreement < 1e-4;
            res.detail = fmt("max ratio %.3f (<1), residual %.2e (tol 1e-6), solver gap %.2e "
                             "(tol 1e-4)",
                             max_ratio, residual, agreement);
        }
        report(8, "Picard contraction at the computed existence horizon", res);
    }

    // ------------------------------------------------------------------ 9
    {
        Outcome res;
        const double e1 = std::abs(q_star_smallness(3, 1.5, 0.0).q_star - 1.5);
        const double e2 = std::abs(q_star_smallness(2, 2.0, 0.0).q_star - 1.0);
        const double e3 = std::abs(q_star_smallness(4, 2.0, 0.0).q_star - 4.0 / 3.0);
        const double worst = std::max({e1, e2, e3});
        res.pass = worst < 1e-12;
        res.detail = fmt("max deviation %.2e (tol 1e-12)", worst);
        report(9, "q* exponent table {(3,3/2),(2,2),(4,2)}", res);
    }

    // ----------------------------------------------------------------- 10
    CliRun rep_run = run_simulate(repulsive_cfg, "out_repulsive");
    {
        Outcome res;
        if (rep_run.exit_code != 0) {
            res = {false, fmt("exit code %d", rep_run.exit_code)};
        } else {
            json verdict = load_verdict(rep_run.out_dir);
            const auto& gron = verdict["checks"]["gronwall"];
            DiagnosticsSeries series = load_series(rep_run.out_dir);
            note_completed("repulsive_bessel", series);

            KernelDecomposition d = decompose(KernelSpec::repulsive_bessel());
            Grid g = Grid::make(2, 8.0, 128);
            double recon_err = 0.0;
            bool sign_ok = true;
            for (std::size_t i = 0; i < g.cell_count(); ++i) {
                const double xisq = wavevector_sq(g, i);
                const double full = symbol(KernelSpec::repulsive_bessel(), 2, xisq);
                recon_err =
                    std::max(recon_err, std::abs(d.k1_symbol(xisq) + d.k2_symbol(xisq) - full));
                if (xisq > 0.0 && -xisq * d.k1_symbol(xisq) < 0.0) sign_ok = false;
            }
            res.pass = gron["available"] == true && gron["pass"] == true && recon_err < 1e-12 &&
                       sign_ok;
            res.detail = fmt("gronwall pass %s; reconstruction error %.2e (tol 1e-12); "
                             "-|xi|^2 K1_hat >= 0: %s",
                             gron["pass"] == true ? "yes" : "no", recon_err,
                             sign_ok ? "yes" : "no");
        }
        report(10, "repulsive-kernel global bound: Gronwall check and decomposition", res);
    }

    // ----------------------------------------------------------------- 11
    {
        Outcome res;
        auto verdict_of = [](const KernelSpec& k, int n) { return classify(k, n).verdict; };
        using V = SingularityClass::Verdict;
        const bool ok = verdict_of(KernelSpec::gaussian(), 2) == V::Mild &&
                        verdict_of(KernelSpec::exponential(1.0), 1) == V::Mild &&
                        verdict_of(KernelSpec::bessel(1.0, 2), 2) == V::StronglySingular &&
                        classify(KernelSpec::bessel(1.0, 2), 2).qprime_sup == 2.0 &&
                        verdict_of(KernelSpec::newtonian(2), 2) == V::StronglySingular &&
                        classify(KernelSpec::newtonian(2), 2).qprime_sup == 2.0 &&
                        verdict_of(KernelSpec::power_law(1.5, 2), 2) == V::StronglySingular;
        res.pass = ok;
        res.detail = ok ? "all five verdicts exact" : "verdict table mismatch";
        report(11, "kernel classification table", res);
    }

    // ----------------------------------------------------------------- 12
    {
        Outcome res;
        CliRun heat2 = run_simulate(heat_cfg, "out_heat_repeat");
        CliRun sub2 = run_simulate(sub_cfg, "out_sub_repeat");
        CliRun super2 = run_simulate(super_cfg, "out_super_repeat");
        const bool same_heat =
            slurp(heat_run.out_dir / "series.csv") == slurp(heat2.out_dir / "series.csv");
        const bool same_sub =
            slurp(sub_run.out_dir / "series.csv") == slurp(sub2.out_dir / "series.csv");
        const bool same_super =
            slurp(super_run.out_dir / "series.csv") == slurp(super2.out_dir / "series.csv");
        res.pass = same_heat && same_sub && same_super &&
                   !slurp(heat_run.out_dir / "series.csv").empty();
        res.detail = fmt("byte-identical series: heat %s, subcritical %s, supercritical %s",
                         same_heat ? "yes" : "no", same_sub ? "yes" : "no",
                         same_super ? "yes" : "no");
        report(12, "determinism of repeated runs (criteria 1, 5, 6)", res);
    }

    // ------------------------------------------------------------------ 2
    {
        Outcome res;
        double worst = 0.0;
        std::string worst_tag = "none";
        for (const auto& [tag, drift] : g_completed_drifts) {
            if (drift > worst) {
                worst = drift;
                worst_tag = tag;
            }
        }
        res.pass = !g_completed_drifts.empty() && worst < 1e-10;
        res.detail = fmt("max drift %.2e on '%s' across %zu completed runs (tol 1e-10)", worst,
                         worst_tag.c_str(), g_completed_drifts.size());
        report(2, "mass conservation on every completed run", res);
    }

    std::printf("%d of 12 criteria failed\n", g_failures);
    return g_failures;
}
