#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "shisha/baselines.hpp"
#include "shisha/evaluator.hpp"
#include "shisha/model.hpp"
#include "shisha/pipeline.hpp"
#include "shisha/platform.hpp"
#include "shisha/trace.hpp"
#include "shisha/tuner.hpp"

namespace shisha {

// One (algorithm, parameters) run request inside an experiment.
struct ExperimentCell {
    std::string algo;  // shisha | es | hc | sa | rw
    std::optional<std::string> heuristic;
    std::uint32_t alpha = 10;
    StartMode start = StartMode::Random;
    std::uint64_t budget = 1000;
    std::optional<std::uint32_t> hc_proximity;  // default: layer count
    double sa_cooling = 0.95;
    std::optional<double> sa_initial_temp;  // default: start-config throughput
    std::uint64_t rng_seed = 0;
    std::uint32_t runs = 1;
    bool rw_with_replacement = true;
};

struct ExperimentSpec {
    std::string name;
    std::string network_file;
    std::string platform_ref;  // file path or built-in name C1..C6
    double fast_speed = 3.0;
    double slow_speed = 1.0;
    std::optional<std::uint32_t> n_stages;                      // tuner stage count
    std::optional<std::pair<std::uint32_t, std::uint32_t>> n_range;  // search space range
    std::vector<ExperimentCell> cells;
    std::string out_dir = "results";
};

// Experiment file: JSON mirroring ExperimentSpec. Validation happens before
// any cell runs; unknown algorithm or heuristic names fail the whole spec.
ExperimentSpec parse_experiment(const nlohmann::json& j);
ExperimentSpec load_experiment_file(const std::string& path);

// Resolves a platform reference: a built-in name (C1..C6, with the given
// speeds) or a JSON file path.
Platform resolve_platform(const std::string& ref, double fast_speed, double slow_speed);

// Runs every cell, writes one trace CSV per cell plus report.json under
// spec.out_dir, and returns the report. Cells with runs > 1 report every
// final throughput and keep the trace of the best run. Deterministic given
// the seeds; the generated_at field is the only varying report line.
nlohmann::json run_experiment(const ExperimentSpec& spec);

// Built-in experiment presets: "paper-fig5" (4-EP comparison against
// exhaustive search) and "paper-fig4" (SynthNet-18 on 8 EPs, all
// algorithms). The alpha sweep ("paper-fig9") is exposed via alpha_sweep.
ExperimentSpec preset_experiment(const std::string& name, const std::string& data_dir = "data");

struct AlphaSweepCell {
    double ratio = 1.0;      // FAST over SLOW speed
    std::uint32_t alpha = 0;
    double best_throughput = 0.0;
    double normalized = 0.0;  // against the alpha = 100 run of the same ratio
    std::uint64_t evaluations = 0;
};

// Re-runs the tuner from the same seed for every (ratio, alpha) pair. The
// layout platform supplies EP ids/cores/classes; FAST EPs get fast_speed and
// SLOW EPs fast_speed / ratio. An alpha = 100 reference run is always
// included.
std::vector<AlphaSweepCell> alpha_sweep(const Network& network, const Platform& layout,
                                        double fast_speed, const std::vector<double>& ratios,
                                        std::vector<std::uint32_t> alphas,
                                        const Heuristic& heuristic, std::uint64_t rng_seed = 0);
nlohmann::json alpha_sweep_report(const std::vector<AlphaSweepCell>& cells);

// Design-space size for a network/platform pair (full range when n_range is
// not given).
BigCount space_size(const Network& network, const Platform& platform,
                    std::optional<std::pair<std::uint32_t, std::uint32_t>> n_range = {});
double explored_fraction(std::uint64_t evaluations, const BigCount& size);

nlohmann::json config_to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const nlohmann::json& j);

}  // namespace shisha
