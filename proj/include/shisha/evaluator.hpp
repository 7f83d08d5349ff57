#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "shisha/model.hpp"
#include "shisha/pipeline.hpp"
#include "shisha/platform.hpp"

namespace shisha {

// Result of measuring one pipeline configuration.
struct Evaluation {
    std::vector<double> stage_times;  // one entry per stage
    std::size_t slowest = 0;          // lowest index among the maximal times
    double throughput = 0.0;          // 1 / max stage time
    double eval_cost = 0.0;           // simulated time charged for the measurement
};

struct CostModelParams {
    double noise_stddev = 0.0;          // relative multiplicative jitter, >= 0
    std::uint64_t rng_seed = 0;         // only used when noise_stddev > 0
    std::uint32_t measure_batches = 1;  // inputs charged per online measurement
};

struct InvalidConfig : std::logic_error {
    explicit InvalidConfig(std::vector<std::string> v);
    std::vector<std::string> violations;
};

// Time to run a stage of the given aggregate weight on an EP:
//   weight / (cores * speed) + boundary_latency
double stage_time(std::uint64_t stage_weight, const ExecutionPlace& ep, double boundary_latency);
// Noisy variant: multiplied by max(0.01, 1 + eps), eps ~ Normal(0, stddev).
double stage_time(std::uint64_t stage_weight, const ExecutionPlace& ep, double boundary_latency,
                  double noise_stddev, std::mt19937_64& rng);

// Measures configurations against one network/platform pair. Stage weights
// come from a prefix-sum cache, so a call is O(stages). With noise_stddev = 0
// calls are pure and safe to issue concurrently; the noisy overload takes the
// caller's generator so there is no hidden shared state.
class Evaluator {
  public:
    Evaluator(const Network& network, const Platform& platform, CostModelParams params = {});

    // Validates the config first; throws InvalidConfig with the violation list.
    Evaluation operator()(const PipelineConfig& config) const;
    Evaluation operator()(const PipelineConfig& config, std::mt19937_64& noise_rng) const;

    // Noise-free throughput without building an Evaluation. The config must
    // already be valid; used by the bulk search kernels.
    double throughput_only(const PipelineConfig& config) const;

    const Network& network() const { return *network_; }
    const Platform& platform() const { return *platform_; }
    const CostModelParams& params() const { return params_; }

    std::uint64_t stage_weight(const PipelineConfig& config, std::size_t stage) const;

  private:
    Evaluation run(const PipelineConfig& config, std::mt19937_64* rng) const;

    const Network* network_;
    const Platform* platform_;
    CostModelParams params_;
    std::vector<std::uint64_t> prefix_;           // prefix_[i] = weight of layers [0, i)
    std::vector<std::pair<int, double>> scores_;  // (ep id, perf score), sorted by id
    double score_of(int ep_id) const;
};

// One-off convenience wrapper.
Evaluation evaluate(const PipelineConfig& config, const Network& network,
                    const Platform& platform, const CostModelParams& params = {});

}  // namespace shisha
