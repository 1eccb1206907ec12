#include "agg/sweep.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace agg {

namespace {

int resolve_parallelism(int requested, std::size_t jobs) {
    int n = requested;
    if (const char* env = std::getenv("AGGREKIT_THREADS"); env != nullptr && *env != '\0') {
        n = std::atoi(env);
    }
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    return static_cast<int>(std::min<std::size_t>(n, jobs));
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                      int parallelism, const std::filesystem::path& base_dir) {
    if (!cfg.has_sweep || cfg.sweep_values.empty())
        throw ConfigError("sweep: config has no sweep values");
    std::filesystem::create_directories(dir);

    SweepResult result;
    result.rows.resize(cfg.sweep_values.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfg.sweep_values.size()) return;
            const double value = cfg.sweep_values[i];
            SweepRow& row = result.rows[i];
            row.value = value;
            char name[32];
            std::snprintf(name, sizeof(name), "run_%03zu", i);
            try {
                nlohmann::json child_doc = with_sweep_value(cfg.raw, cfg.sweep_parameter, value);
                ExperimentConfig child = parse_experiment_config(child_doc.dump(), base_dir);
                SimConfig sim = build_sim_config(child, base_dir);
                RunResult run_result = run(sim);
                BundleSummary summary =
                    write_report_bundle(dir / name, child, sim, run_result, child.plot);
                row.termination = to_string(summary.termination);
                row.t_detect = summary.t_detect;
                row.min_moment = summary.min_moment;
                row.max_linf = summary.max_linf;
            } catch (const std::exception& e) {
                row.termination = "error";
                result.all_rows_produced = false;
                std::filesystem::create_directories(dir / name);
                std::ofstream os(dir / name / "error.txt");
                os << e.what() << "\n";
            }
        }
    };

    const int threads = resolve_parallelism(parallelism, cfg.sweep_values.size());
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (const SweepRow& row : result.rows) {
        if (row.termination == "completed") {
            if (!result.largest_completed || row.value > *result.largest_completed)
                result.largest_completed = row.value;
        } else if (row.termination == "blowup_detected") {
            if (!result.smallest_blowup || row.value < *result.smallest_blowup)
                result.smallest_blowup = row.value;
        }
    }
    return result;
}

void write_sweep_summary_csv(const SweepResult& result, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    os << "value,termination,t_detect,min_moment,max_linf\n";
    char buf[256];
    for (const SweepRow& row : result.rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%s,%.17g,%.17g,%.17g\n", row.value,
                      row.termination.c_str(), row.t_detect, row.min_moment, row.max_linf);
        os << buf;
    }
}

void write_sweep_summary_json(const SweepResult& result, const std::filesystem::path& path) {
    nlohmann::json j;
    j["largest_completed"] =
        result.largest_completed ? nlohmann::json(*result.largest_completed) : nlohmann::json();
    j["smallest_blowup"] =
        result.smallest_blowup ? nlohmann::json(*result.smallest_blowup) : nlohmann::json();
    j["all_rows_produced"] = result.all_rows_produced;
    std::ofstream os(path, std::ios::binary);
    os << j.dump(2) << "\n";
}

}  // namespace agg
