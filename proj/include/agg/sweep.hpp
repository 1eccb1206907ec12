#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "agg/config.hpp"
#include "agg/report.hpp"

namespace agg {

struct SweepRow {
    double value = 0.0;
    std::string termination;  // completed / blowup_detected / numerical_failure / error
    double t_detect = std::numeric_limits<double>::quiet_NaN();
    double min_moment = 0.0;
    double max_linf = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;                 // in sweep-value order
    std::optional<double> largest_completed;    // empirical critical value bracket
    std::optional<double> smallest_blowup;
    bool all_rows_produced = true;
};

/// One run per sweep value, executed by a pool of `parallelism` workers
/// (hardware concurrency when 0, overridable by AGGREKIT_THREADS). Each run
/// writes its bundle to dir/run_NNN; failures are recorded per row.
SweepResult run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                      int parallelism, const std::filesystem::path& base_dir = {});

void write_sweep_summary_csv(const SweepResult& result, const std::filesystem::path& path);
void write_sweep_summary_json(const SweepResult& result, const std::filesystem::path& path);

}  // namespace agg
