#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "shisha/evaluator.hpp"
#include "shisha/pipeline.hpp"
#include "shisha/trace.hpp"
#include "shisha/tuner.hpp"

namespace shisha {

enum class StartMode { Random, ShishaSeed };

struct ExplorerParams {
    StartMode start = StartMode::Random;
    std::uint64_t rng_seed = 0;
    std::uint64_t budget = 1000;             // max evaluations
    std::uint32_t hc_proximity = 1;          // max boundary-shift distance
    double sa_cooling = 0.95;                // geometric temperature factor, in (0,1)
    std::optional<double> sa_initial_temp;   // default: throughput of the start config
    std::optional<DesignSpace> space;        // default: full range [1, min(L, E)]
    Assignment seed_assignment = Assignment::RankW;  // for StartMode::ShishaSeed
    bool rw_with_replacement = true;

    void check() const;
};

struct ExploreResult {
    PipelineConfig best;
    double best_throughput = 0.0;
    std::uint64_t evaluations = 0;
    double cum_eval_cost = 0.0;
    Trace trace;  // one row per evaluation (parallel ES keeps only the winner)
};

// Serial reference: walks the whole enumeration in order, evaluating every
// configuration; ties keep the earliest. Errors out when the space exceeds
// the budget. Records a full trace.
ExploreResult exhaustive_search(const Evaluator& evaluator, const DesignSpace& space,
                                std::uint64_t budget);

// Same result computed in parallel: the rank space is cut into fixed chunks,
// each chunk is enumerated independently (OpenMP), and chunk winners fold in
// rank order, so the best config and the tie-break match the serial reference
// for any thread count. The trace holds just the winning row.
ExploreResult exhaustive_search_parallel(const Evaluator& evaluator, const DesignSpace& space,
                                         std::uint64_t budget);

// The local move set for hill climbing and annealing: every boundary shifted
// by 1..proximity layers either way (stages never emptied), every pairwise
// assignment swap, and every replacement of one assigned EP by an unassigned
// one. Deterministic order, no duplicates.
std::vector<PipelineConfig> neighbors(const PipelineConfig& config, std::uint32_t hc_proximity,
                                      const Platform& platform);

// Steepest-ascent hill climbing: evaluates all neighbors of the current
// config (in parallel) and moves to the best strictly-improving one; stops at
// a local optimum or when the budget runs out.
ExploreResult hill_climb(const ExplorerParams& params, const Evaluator& evaluator,
                         std::optional<PipelineConfig> start_override = {});

// Per-step detail used by tests to pin the acceptance rule.
struct SaStep {
    double current_throughput = 0.0;
    double proposal_throughput = 0.0;
    double temperature = 0.0;
    bool accepted = false;
};

// Classic simulated annealing over the same neighborhood: accept improvements
// outright, worse proposals with probability exp(dTp / T); T decays by
// sa_cooling each step, stopping at the budget or once T < 1e-9.
ExploreResult simulated_annealing(const ExplorerParams& params, const Evaluator& evaluator,
                                  std::optional<PipelineConfig> start_override = {},
                                  std::vector<SaStep>* step_log = nullptr);

// Uniform random samples over the enumeration rank space. Without replacement
// the budget must cover at most the whole space, which is then exhausted in
// shuffled order.
ExploreResult random_walk(const ExplorerParams& params, const Evaluator& evaluator);

// Uniformly random valid configuration (used for StartMode::Random).
PipelineConfig random_config(const DesignSpace& space, const Platform& platform,
                             std::mt19937_64& rng);

}  // namespace shisha
