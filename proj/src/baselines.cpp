#include "shisha/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "shisha/util.hpp"

namespace shisha {

namespace {

constexpr std::uint64_t kChunkSize = 8192;  // fixed so reductions are thread-count independent
constexpr std::uint64_t kMaxNoReplacementSpace = std::uint64_t{1} << 24;

DesignSpace space_or_full(const ExplorerParams& params, const Evaluator& evaluator) {
    if (params.space) return *params.space;
    return full_design_space(static_cast<std::uint32_t>(evaluator.network().layer_count()),
                             static_cast<std::uint32_t>(evaluator.platform().ep_count()));
}

std::uint64_t require_u64_space(const DesignSpace& space, const char* what) {
    const auto size = design_space_size_u64(space);
    if (!size)
        throw ConfigError(std::string(what) + ": design space exceeds 64-bit rank arithmetic");
    return *size;
}

// eval_cost of a noise-free measurement, recovered from the throughput
double cost_of(double throughput, const Evaluator& evaluator) {
    return static_cast<double>(evaluator.params().measure_batches) / throughput;
}

PipelineConfig resolve_start(const ExplorerParams& params, const Evaluator& evaluator,
                             std::mt19937_64& rng,
                             const std::optional<PipelineConfig>& start_override) {
    if (start_override) return *start_override;
    if (params.start == StartMode::Random)
        return random_config(space_or_full(params, evaluator), evaluator.platform(), rng);
    const auto n = static_cast<std::uint32_t>(
        std::min(evaluator.platform().ep_count(), evaluator.network().layer_count()));
    return generate_seed(evaluator.network(), evaluator.platform(), n, params.seed_assignment,
                         params.rng_seed)
        .config;
}

}  // namespace

void ExplorerParams::check() const {
    if (budget < 1) throw ConfigError("budget must be >= 1");
    if (hc_proximity < 1) throw ConfigError("hc_proximity must be >= 1");
    if (!(sa_cooling > 0.0) || !(sa_cooling < 1.0))
        throw ConfigError("sa_cooling must lie in (0, 1)");
}

PipelineConfig random_config(const DesignSpace& space, const Platform& platform,
                             std::mt19937_64& rng) {
    const std::uint64_t size = require_u64_space(space, "random_config");
    return unrank_config(uniform_u64(rng, size), space, platform);
}

ExploreResult exhaustive_search(const Evaluator& evaluator, const DesignSpace& space,
                                std::uint64_t budget) {
    const BigCount size = design_space_size(space);
    if (size > budget)
        throw ConfigError("exhaustive search needs " + size.str() + " evaluations, budget is " +
                          std::to_string(budget));

    ExploreResult result;
    result.trace.reserve(static_cast<std::size_t>(size.convert_to<std::uint64_t>()));
    ConfigEnumerator stream(space, evaluator.platform());
    double cum_cost = 0.0;
    std::uint64_t step = 0;
    for (const PipelineConfig* cfg = stream.next(); cfg != nullptr; cfg = stream.next()) {
        const double tp = evaluator.throughput_only(*cfg);
        cum_cost += cost_of(tp, evaluator);
        if (step == 0 || tp > result.best_throughput) {
            result.best_throughput = tp;
            result.best = *cfg;
        }
        result.trace.push_back({step, *cfg, tp, result.best_throughput, cum_cost, std::nullopt});
        ++step;
    }
    result.evaluations = step;
    result.cum_eval_cost = cum_cost;
    return result;
}

ExploreResult exhaustive_search_parallel(const Evaluator& evaluator, const DesignSpace& space,
                                         std::uint64_t budget) {
    const std::uint64_t size = require_u64_space(space, "exhaustive_search_parallel");
    if (BigCount(size) > budget)
        throw ConfigError("exhaustive search needs " + std::to_string(size) +
                          " evaluations, budget is " + std::to_string(budget));

    struct ChunkResult {
        double best_tp = 0.0;
        std::uint64_t best_rank = 0;
        double cost = 0.0;
    };
    const std::uint64_t chunk_count = (size + kChunkSize - 1) / kChunkSize;
    std::vector<ChunkResult> chunks(static_cast<std::size_t>(chunk_count));

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunk_count); ++c) {
        const std::uint64_t lo = static_cast<std::uint64_t>(c) * kChunkSize;
        const std::uint64_t hi = std::min(lo + kChunkSize, size);
        ConfigEnumerator stream(space, evaluator.platform());
        stream.seek(lo);
        ChunkResult local;
        for (std::uint64_t r = lo; r < hi; ++r) {
            const double tp = evaluator.throughput_only(*stream.next());
            local.cost += cost_of(tp, evaluator);
            if (r == lo || tp > local.best_tp) {
                local.best_tp = tp;
                local.best_rank = r;
            }
        }
        chunks[static_cast<std::size_t>(c)] = local;
    }

    ExploreResult result;
    double cum_cost = 0.0;
    for (std::size_t c = 0; c < chunks.size(); ++c) {
        cum_cost += chunks[c].cost;
        if (c == 0 || chunks[c].best_tp > result.best_throughput) {
            result.best_throughput = chunks[c].best_tp;
            result.best = unrank_config(chunks[c].best_rank, space, evaluator.platform());
        }
    }
    result.evaluations = size;
    result.cum_eval_cost = cum_cost;
    result.trace.push_back({size - 1, result.best, result.best_throughput,
                            result.best_throughput, cum_cost, std::nullopt});
    return result;
}

std::vector<PipelineConfig> neighbors(const PipelineConfig& config, std::uint32_t hc_proximity,
                                      const Platform& platform) {
    std::vector<PipelineConfig> out;
    const std::size_t n = config.n_stages();

    // boundary shifts; the three groups cannot collide: shifts change sizes
    // only, swaps permute the assigned set, replacements introduce a new EP
    for (std::size_t b = 0; b + 1 < n; ++b) {
        for (std::uint32_t d = 1; d <= hc_proximity; ++d) {
            if (config.stage_sizes[b] > d) {
                PipelineConfig c = config;
                c.stage_sizes[b] -= d;
                c.stage_sizes[b + 1] += d;
                out.push_back(std::move(c));
            }
            if (config.stage_sizes[b + 1] > d) {
                PipelineConfig c = config;
                c.stage_sizes[b] += d;
                c.stage_sizes[b + 1] -= d;
                out.push_back(std::move(c));
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            PipelineConfig c = config;
            std::swap(c.ep_assignment[i], c.ep_assignment[j]);
            out.push_back(std::move(c));
        }
    }
    std::vector<int> unused;
    for (const auto& ep : platform.eps) {
        if (std::find(config.ep_assignment.begin(), config.ep_assignment.end(), ep.id) ==
            config.ep_assignment.end())
            unused.push_back(ep.id);
    }
    std::sort(unused.begin(), unused.end());
    for (std::size_t i = 0; i < n; ++i) {
        for (int id : unused) {
            PipelineConfig c = config;
            c.ep_assignment[i] = id;
            out.push_back(std::move(c));
        }
    }
    return out;
}

ExploreResult hill_climb(const ExplorerParams& params, const Evaluator& evaluator,
                         std::optional<PipelineConfig> start_override) {
    params.check();
    std::mt19937_64 rng(params.rng_seed);
    PipelineConfig current = resolve_start(params, evaluator, rng, start_override);

    ExploreResult result;
    double current_tp = evaluator.throughput_only(current);
    result.best = current;
    result.best_throughput = current_tp;
    double cum_cost = cost_of(current_tp, evaluator);
    std::uint64_t step = 0;
    result.trace.push_back({step, current, current_tp, current_tp, cum_cost, std::nullopt});
    ++step;

    while (step < params.budget) {
        const auto moves = neighbors(current, params.hc_proximity, evaluator.platform());
        if (moves.empty()) break;
        const std::size_t scan = std::min<std::uint64_t>(moves.size(), params.budget - step);

        std::vector<double> tps(scan);
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(scan); ++i)
            tps[static_cast<std::size_t>(i)] = evaluator.throughput_only(moves[i]);

        std::size_t best_idx = scan;  // sentinel: no strictly-improving neighbor
        for (std::size_t i = 0; i < scan; ++i) {
            cum_cost += cost_of(tps[i], evaluator);
            if (tps[i] > result.best_throughput) {
                result.best_throughput = tps[i];
                result.best = moves[i];
            }
            if (tps[i] > current_tp && (best_idx == scan || tps[i] > tps[best_idx]))
                best_idx = i;
            result.trace.push_back({step, moves[i], tps[i], result.best_throughput, cum_cost,
                                    std::nullopt});
            ++step;
        }
        if (best_idx == scan) break;  // local optimum (or truncated scan found nothing better)
        current = moves[best_idx];
        current_tp = tps[best_idx];
    }
    result.evaluations = step;
    result.cum_eval_cost = cum_cost;
    return result;
}

ExploreResult simulated_annealing(const ExplorerParams& params, const Evaluator& evaluator,
                                  std::optional<PipelineConfig> start_override,
                                  std::vector<SaStep>* step_log) {
    params.check();
    std::mt19937_64 rng(params.rng_seed);
    PipelineConfig current = resolve_start(params, evaluator, rng, start_override);

    ExploreResult result;
    double current_tp = evaluator.throughput_only(current);
    result.best = current;
    result.best_throughput = current_tp;
    double cum_cost = cost_of(current_tp, evaluator);
    std::uint64_t step = 0;
    result.trace.push_back({step, current, current_tp, current_tp, cum_cost, std::nullopt});
    ++step;

    double temperature = params.sa_initial_temp.value_or(current_tp);
    while (step < params.budget && temperature >= 1e-9) {
        const auto moves = neighbors(current, params.hc_proximity, evaluator.platform());
        if (moves.empty()) break;
        const auto& proposal = moves[uniform_u64(rng, moves.size())];
        const double tp = evaluator.throughput_only(proposal);
        cum_cost += cost_of(tp, evaluator);

        bool accept = tp >= current_tp;
        if (!accept) accept = uniform_real01(rng) < std::exp((tp - current_tp) / temperature);
        if (step_log) step_log->push_back({current_tp, tp, temperature, accept});
        if (accept) {
            current = proposal;
            current_tp = tp;
        }
        if (tp > result.best_throughput) {
            result.best_throughput = tp;
            result.best = proposal;
        }
        result.trace.push_back({step, proposal, tp, result.best_throughput, cum_cost,
                                std::nullopt});
        ++step;
        temperature *= params.sa_cooling;
    }
    result.evaluations = step;
    result.cum_eval_cost = cum_cost;
    return result;
}

ExploreResult random_walk(const ExplorerParams& params, const Evaluator& evaluator) {
    params.check();
    const DesignSpace space = space_or_full(params, evaluator);
    const std::uint64_t size = require_u64_space(space, "random_walk");
    std::mt19937_64 rng(params.rng_seed);

    std::vector<std::uint64_t> ranks;
    if (params.rw_with_replacement) {
        ranks.resize(params.budget);
        for (auto& r : ranks) r = uniform_u64(rng, size);
    } else {
        if (size > kMaxNoReplacementSpace)
            throw ConfigError("random_walk without replacement supports spaces up to 2^24");
        if (params.budget > size)
            throw ConfigError("random_walk without replacement: budget exceeds the design space");
        ranks.resize(size);
        std::iota(ranks.begin(), ranks.end(), std::uint64_t{0});
        shuffle_seeded(ranks, rng);
        ranks.resize(params.budget);
    }

    ExploreResult result;
    ConfigEnumerator stream(space, evaluator.platform());
    double cum_cost = 0.0;
    std::uint64_t step = 0;
    for (std::uint64_t r : ranks) {
        stream.seek(r);
        const PipelineConfig& cfg = *stream.next();
        const double tp = evaluator.throughput_only(cfg);
        cum_cost += cost_of(tp, evaluator);
        if (step == 0 || tp > result.best_throughput) {
            result.best_throughput = tp;
            result.best = cfg;
        }
        result.trace.push_back({step, cfg, tp, result.best_throughput, cum_cost, std::nullopt});
        ++step;
    }
    result.evaluations = step;
    result.cum_eval_cost = cum_cost;
    return result;
}

}  // namespace shisha
