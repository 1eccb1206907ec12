#pragma once

#include <filesystem>

#include <json.hpp>

#include "agg/config.hpp"
#include "agg/diagnostics.hpp"
#include "agg/solver.hpp"

namespace agg {

/// Binary snapshot: magic "AGGF", u8 version=1, u8 dim, u32 N, f64 L, f64 t,
/// then N^dim little-endian f64 values row-major.
void write_snapshot(const std::filesystem::path& path, const Field& f);
Field read_snapshot(const std::filesystem::path& path);

/// Theorem-check summary attached to every run: termination cause, mass
/// drift, boundary leakage, kernel classification, virial bound and Gronwall
/// checks when applicable, the local-existence ledger and the blow-up bound.
nlohmann::json build_verdict(const ExperimentConfig& cfg, const SimConfig& sim,
                             const RunResult& result);

/// Minimal line chart of mass, second moment and sup norm against time.
void write_plot_svg(const DiagnosticsSeries& series, const std::filesystem::path& path);

struct BundleSummary {
    Termination termination = Termination::Completed;
    double t_detect = std::numeric_limits<double>::quiet_NaN();
    double min_moment = 0.0;
    double max_linf = 0.0;
    int exit_code = 0;
};

/// Exit codes: 0 completed, 10 blow-up detected, 20 numerical failure.
int exit_code_for(Termination t);

/// Write series.csv, verdict.json, snapshots/*.aggf and (optionally) plot.svg
/// into dir.
BundleSummary write_report_bundle(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                                  const SimConfig& sim, const RunResult& result, bool plot);

}  // namespace agg
