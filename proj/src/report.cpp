#include "agg/report.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "agg/duhamel.hpp"

namespace agg {

namespace {

using nlohmann::json;

void put_u32_le(std::ofstream& os, std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    os.write(b, 4);
}

void put_f64_le(std::ofstream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    os.write(b, 8);
}

std::uint32_t get_u32_le(std::ifstream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f64_le(std::ifstream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | b[i];
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

/// JSON-safe number: infinities become the strings "inf"/"-inf".
json num(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    if (std::isnan(v)) return json("nan");
    return json(v);
}

json classification_json(const KernelSpec& kernel, int dim) {
    json out;
    try {
        SingularityClass c = classify(kernel, dim);
        out["verdict"] = to_string(c.verdict);
        out["qprime_sup"] = num(c.qprime_sup);
        out["weak_qprime"] = num(c.weak_qprime);
        out["near_origin_exponent"] = c.near_origin_exponent;
        if (c.fit_residual > 0.0) out["fit_residual"] = c.fit_residual;
    } catch (const IndeterminateClassification& e) {
        out["verdict"] = "indeterminate";
        out["diagnostics"] = e.what();
    }
    return out;
}

/// Existence exponents chosen from the classification: mild kernels use
/// q' between n and n/a (geometric midpoint), strongly singular ones use the
/// midpoint of [1, min(n, qprime_sup)).
struct ExistenceChoice {
    Regime regime;
    double q;
    double qprime;
};

ExistenceChoice choose_existence_exponents(const SingularityClass& cls, int n) {
    ExistenceChoice out{Regime::Mild, 1.0, std::numeric_limits<double>::infinity()};
    const double a = cls.near_origin_exponent;
    if (cls.verdict == SingularityClass::Verdict::StronglySingular) {
        out.regime = Regime::Strong;
        out.qprime = 0.5 * (1.0 + std::min<double>(n, cls.qprime_sup));
        out.q = out.qprime / (out.qprime - 1.0);
    } else if (a > 0.0) {
        out.qprime = n / std::sqrt(a);  // inside (n, n/a)
        out.q = out.qprime / (out.qprime - 1.0);
    }
    return out;
}

json local_existence_json(const ExperimentConfig& cfg, const SimConfig& sim) {
    json out;
    try {
        SingularityClass cls = classify(cfg.kernel, cfg.grid.dim);
        ExistenceChoice choice = choose_existence_exponents(cls, cfg.grid.dim);
        const double r_max = 2.0 * cfg.grid.half_length * std::sqrt(cfg.grid.dim);
        const double grad_norm = std::isinf(choice.qprime)
                                     ? grad_sup_norm(cfg.kernel, cfg.grid.dim)
                                     : grad_lq_norm(cfg.kernel, cfg.grid.dim, choice.qprime, r_max);
        const double u0_l1 = lp_norm(sim.u0, 1.0);
        const double u0_lq = lp_norm(sim.u0, choice.q);
        LocalExistenceEstimate est = local_existence_time(choice.regime, u0_l1, u0_lq, grad_norm,
                                                          choice.q, cfg.grid.dim);
        out["regime"] = to_string(est.regime);
        out["q"] = est.q;
        out["qprime"] = num(est.qprime);
        out["T"] = num(est.T);
        out["grad_norm_truncation_radius"] = r_max;
        json ledger;
        for (const auto& [key, value] : est.constants_ledger) ledger[key] = num(value);
        out["constants"] = ledger;
        out["empirical"] = true;  // traced constants, not proof-grade
    } catch (const std::exception& e) {
        out["error"] = e.what();
    }
    return out;
}

json virial_bound_json(const ExperimentConfig& cfg, const RunResult& result) {
    json out;
    try {
        const double delta = 1.0;
        const double s_max =
            std::max(2.0 * delta, 2.0 * cfg.grid.half_length * std::sqrt(cfg.grid.dim));
        BlowupParams p = blowup_params(cfg.kernel, cfg.grid.dim, delta, s_max);
        out["delta"] = p.delta;
        out["gamma"] = p.gamma;
        out["c_bar"] = p.c_bar;
        const auto [mass, i0] = std::pair(result.series.rows.front().mass,
                                          result.series.rows.front().moment);
        out["critical_mass"] = critical_mass(p, cfg.grid.dim, i0);
        out["mass"] = mass;
        out["i0"] = i0;
        if (i0 > 0.0) out["blowup_time_bound"] = num(blowup_time_bound(mass, i0, p, cfg.grid.dim));
        if (result.series.rows.size() >= 3) {
            VirialBoundReport rep = virial_bound_check(result.series, p, cfg.grid.dim);
            out["check"] = {{"pass", rep.pass},
                            {"max_violation", rep.max_violation},
                            {"tolerance", rep.tolerance},
                            {"rows_checked", rep.rows_checked}};
        }
    } catch (const NotBlowupAdmissible&) {
        out["admissible"] = false;
        return out;
    } catch (const std::exception& e) {
        out["error"] = e.what();
        return out;
    }
    out["admissible"] = true;
    return out;
}

json gronwall_json(const ExperimentConfig& cfg, const RunResult& result) {
    json out;
    try {
        KernelDecomposition d = decompose(cfg.kernel);
        const double q = cfg.lq_exponent;
        const double c_eps = 0.5 * (q - 1.0);  // epsilon-Young split at epsilon = 1/2
        const double mass = result.series.rows.front().mass;
        GronwallReport rep = gronwall_check(result.series, q, d.k2_grad_inf_bound, mass, c_eps);
        out["pass"] = rep.pass;
        out["min_margin"] = num(rep.min_margin);
        out["growth_constant"] = rep.growth_constant;
        out["q"] = rep.q;
        out["k2_grad_inf_bound"] = d.k2_grad_inf_bound;
        out["c_eps"] = c_eps;
        out["available"] = true;
    } catch (const std::invalid_argument&) {
        out["available"] = false;  // kernel admits no known decomposition
    }
    return out;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Field& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_snapshot: cannot open " + path.string());
    os.write("AGGF", 4);
    os.put(1);
    os.put(static_cast<char>(f.grid.dim));
    put_u32_le(os, static_cast<std::uint32_t>(f.grid.points_per_dim));
    put_f64_le(os, f.grid.half_length);
    put_f64_le(os, f.time_tag);
    for (double v : f.values) put_f64_le(os, v);
}

Field read_snapshot(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_snapshot: cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "AGGF", 4) != 0)
        throw std::runtime_error("read_snapshot: bad magic in " + path.string());
    const int version = is.get();
    if (version != 1) throw std::runtime_error("read_snapshot: unsupported version");
    const int dim = is.get();
    const std::uint32_t n = get_u32_le(is);
    const double half_length = get_f64_le(is);
    const double t = get_f64_le(is);
    Grid g = Grid::make(dim, half_length, static_cast<int>(n));
    Field f = Field::zeros(g);
    f.time_tag = t;
    for (auto& v : f.values) v = get_f64_le(is);
    if (!is) throw std::runtime_error("read_snapshot: truncated file " + path.string());
    return f;
}

int exit_code_for(Termination t) {
    switch (t) {
        case Termination::Completed: return 0;
        case Termination::BlowupDetected: return 10;
        default: return 20;
    }
}

json build_verdict(const ExperimentConfig& cfg, const SimConfig& sim, const RunResult& result) {
    json v;
    json term;
    term["cause"] = to_string(result.termination);
    term["t_final"] = result.series.rows.back().t;
    if (result.blowup) {
        term["trigger"] = to_string(result.blowup->trigger);
        term["t_detect"] = result.blowup->t_detect;
        term["linf_at_detect"] = result.blowup->linf_at_detect;
        term["moment_at_detect"] = result.blowup->moment_at_detect;
    }
    v["termination"] = term;
    v["exit_code"] = exit_code_for(result.termination);
    v["steps"] = result.steps_taken;
    v["mass_drift"] = mass_drift(result.series);
    v["boundary_leakage"] = result.boundary_leakage;
    v["max_negativity"] = result.max_negativity;
    v["negativity_warning"] = result.max_negativity > 1e-8;
    v["classification"] = classification_json(cfg.kernel, cfg.grid.dim);
    v["checks"] = {{"virial_bound", virial_bound_json(cfg, result)},
                   {"gronwall", gronwall_json(cfg, result)}};
    v["local_existence"] = local_existence_json(cfg, sim);
    return v;
}

void write_plot_svg(const DiagnosticsSeries& series, const std::filesystem::path& path) {
    const int width = 900, height = 480, margin = 60;
    const auto& rows = series.rows;
    if (rows.empty()) return;
    const double t0 = rows.front().t, t1 = std::max(rows.back().t, t0 + 1e-300);

    struct Channel {
        const char* name;
        const char* color;
        double lo, hi;
    };
    auto value = [&](const DiagnosticsRow& r, int c) {
        return c == 0 ? r.mass : (c == 1 ? r.moment : r.linf);
    };
    Channel ch[3] = {{"mass", "#1f77b4", 0, 0}, {"moment", "#2ca02c", 0, 0}, {"linf", "#d62728", 0, 0}};
    for (int c = 0; c < 3; ++c) {
        double lo = value(rows.front(), c), hi = lo;
        for (const auto& r : rows) {
            lo = std::min(lo, value(r, c));
            hi = std::max(hi, value(r, c));
        }
        ch[c].lo = lo;
        ch[c].hi = hi > lo ? hi : lo + 1.0;
    }

    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_plot_svg: cannot open " + path.string());
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
       << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    os << "<rect x='" << margin << "' y='" << margin << "' width='" << width - 2 * margin
       << "' height='" << height - 2 * margin << "' fill='none' stroke='#444'/>\n";
    char buf[160];
    for (int c = 0; c < 3; ++c) {
        os << "<polyline fill='none' stroke='" << ch[c].color << "' stroke-width='1.5' points='";
        for (const auto& r : rows) {
            const double x = margin + (width - 2.0 * margin) * (r.t - t0) / (t1 - t0);
            const double ynorm = (value(r, c) - ch[c].lo) / (ch[c].hi - ch[c].lo);
            const double y = height - margin - (height - 2.0 * margin) * ynorm;
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", x, y);
            os << buf;
        }
        os << "'/>\n";
        std::snprintf(buf, sizeof(buf),
                      "<text x='%d' y='%d' fill='%s' font-size='13'>%s [%.4g, %.4g]</text>\n",
                      margin + 6, margin + 18 + 18 * c, ch[c].color, ch[c].name, ch[c].lo, ch[c].hi);
        os << buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x='%d' y='%d' fill='#444' font-size='13'>t in [%.6g, %.6g] (each curve "
                  "scaled to its own range)</text>\n",
                  margin, height - margin + 30, t0, t1);
    os << buf << "</svg>\n";
}

BundleSummary write_report_bundle(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                                  const SimConfig& sim, const RunResult& result, bool plot) {
    std::filesystem::create_directories(dir);
    std::filesystem::create_directories(dir / "snapshots");
    {
        std::ofstream os(dir / "series.csv", std::ios::binary);
        write_series_csv(result.series, os);
    }
    {
        std::ofstream os(dir / "verdict.json", std::ios::binary);
        os << build_verdict(cfg, sim, result).dump(2) << "\n";
    }
    char name[64];
    for (std::size_t i = 0; i < result.snapshots.size(); ++i) {
        std::snprintf(name, sizeof(name), "snap_%04zu.aggf", i);
        write_snapshot(dir / "snapshots" / name, result.snapshots[i].second);
    }
    if (plot) write_plot_svg(result.series, dir / "plot.svg");

    BundleSummary summary;
    summary.termination = result.termination;
    if (result.blowup) summary.t_detect = result.blowup->t_detect;
    summary.min_moment = result.series.rows.front().moment;
    summary.max_linf = 0.0;
    for (const auto& row : result.series.rows) {
        summary.min_moment = std::min(summary.min_moment, row.moment);
        summary.max_linf = std::max(summary.max_linf, row.linf);
    }
    summary.exit_code = exit_code_for(result.termination);
    return summary;
}

}  // namespace agg
