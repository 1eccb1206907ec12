#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "agg/kernels.hpp"
#include "agg/solver.hpp"

namespace agg {

/// Schema or semantic violation in an experiment config; the message carries
/// the JSON path (or line/column for parse errors).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Validated experiment document. Sections: grid, kernel, initial_data, time
/// (required) and caps, outputs, sweep (optional). Unknown keys anywhere are
/// rejected.
struct ExperimentConfig {
    nlohmann::json raw;

    Grid grid;
    KernelSpec kernel;

    std::vector<GaussianBump> bumps;  // empty when loading from file
    std::string u0_file;

    double t_end = 1.0;
    double dt_init = 1e-2;
    double dt_min = 1e-9;
    Scheme scheme = Scheme::EtdRk2;
    Caps caps;

    std::string out_directory = "out";
    int diagnostics_stride = 1;
    double lq_exponent = 2.0;
    bool record_virial = false;
    int snapshot_count = 2;
    bool plot = true;

    bool has_sweep = false;
    std::string sweep_parameter;
    std::vector<double> sweep_values;
};

/// Kernel DSL: {"variant": "bessel", "alpha": 1.0}, etc.
KernelSpec kernel_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Copy of the document with the dotted sweep parameter replaced by value.
nlohmann::json with_sweep_value(const nlohmann::json& doc, const std::string& parameter,
                                double value);

/// Materialize the solver configuration (samples or loads u0, computes
/// snapshot times, resolves caps).
SimConfig build_sim_config(const ExperimentConfig& cfg,
                           const std::filesystem::path& base_dir = {});

/// Load the (r, k, k') radial table CSV used by custom kernels.
RadialTable load_radial_table_csv(const std::filesystem::path& path);

}  // namespace agg
