#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shisha/evaluator.hpp"
#include "shisha/model.hpp"
#include "shisha/pipeline.hpp"
#include "shisha/platform.hpp"
#include "shisha/trace.hpp"

namespace shisha {

// How seed stages are matched to EPs.
enum class Assignment {
    RankL,   // stages by descending layer count onto SLOW EPs first
    RankW,   // stages by descending aggregate weight onto the fastest EPs
    Random,  // seeded uniform injective assignment
};

// Which stage receives the layer shed by the slowest stage.
enum class Balancing {
    Nlfep,  // least-loaded stage on a strictly faster EP
    Nfep,   // nearest stage on a strictly faster EP
};

struct Heuristic {
    Assignment assignment = Assignment::RankW;
    Balancing balancing = Balancing::Nlfep;

    bool operator==(const Heuristic&) const = default;
};

// The heuristic name table:
//   H1 RankL/nlFEP   H2 RankL/nFEP   H3 RankW/nlFEP
//   H4 RankW/nFEP    H5 random/nlFEP H6 random/nFEP
Heuristic heuristic_by_name(std::string_view name);
std::string heuristic_name(const Heuristic& h);

struct TunerParams {
    std::uint32_t alpha = 10;    // consecutive non-improving evaluations before stopping
    std::uint64_t rng_seed = 0;  // used only by Assignment::Random
};

struct SeedResult {
    PipelineConfig config;
    // (group index, neighbor index) at each merge, in merge order
    std::vector<std::pair<std::uint32_t, std::uint32_t>> merge_log;
};

struct TuneResult {
    PipelineConfig best;
    double best_throughput = 0.0;
    Trace trace;
};

// Builds the starting configuration from static information only. Merging
// repeats L - n_stages times: take the minimum-weight group (ties to the
// lowest index) and fold it into its smaller-weight immediate neighbor (ties
// to the left); then stages are matched to EPs per the assignment choice.
SeedResult generate_seed(const Network& network, const Platform& platform,
                         std::uint32_t n_stages, Assignment assignment,
                         std::uint64_t rng_seed = 0);

// Online tuning: repeatedly sheds one layer from the slowest stage toward a
// stage on a strictly faster EP (chosen per the balancing rule), keeping the
// best configuration seen; stops after alpha consecutive non-improving
// evaluations, or at once when no legal move exists. The trace starts with
// the seed evaluation. Passing noise_rng turns on the evaluator's jitter for
// every measurement in the run (the online setting).
TuneResult tune(const SeedResult& seed, const Network& network, const Platform& platform,
                const TunerParams& params, Balancing balancing, const Evaluator& evaluator,
                std::mt19937_64* noise_rng = nullptr);

// Seed generation followed by tuning. n_stages defaults to min(|EPs|, L).
TuneResult run_shisha(const Network& network, const Platform& platform, const Heuristic& heuristic,
                      const TunerParams& params, std::optional<std::uint32_t> n_stages = {},
                      const CostModelParams& cost_params = {});

}  // namespace shisha
