#include "shisha/tuner.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <random>

#include "shisha/util.hpp"

namespace shisha {

Heuristic heuristic_by_name(std::string_view name) {
    if (name == "H1") return {Assignment::RankL, Balancing::Nlfep};
    if (name == "H2") return {Assignment::RankL, Balancing::Nfep};
    if (name == "H3") return {Assignment::RankW, Balancing::Nlfep};
    if (name == "H4") return {Assignment::RankW, Balancing::Nfep};
    if (name == "H5") return {Assignment::Random, Balancing::Nlfep};
    if (name == "H6") return {Assignment::Random, Balancing::Nfep};
    throw ConfigError("unknown heuristic '" + std::string(name) + "' (expected H1..H6)");
}

std::string heuristic_name(const Heuristic& h) {
    if (h.assignment == Assignment::RankL) return h.balancing == Balancing::Nlfep ? "H1" : "H2";
    if (h.assignment == Assignment::RankW) return h.balancing == Balancing::Nlfep ? "H3" : "H4";
    return h.balancing == Balancing::Nlfep ? "H5" : "H6";
}

namespace {

struct Group {
    std::uint64_t weight;
    std::uint32_t size;
};

// Stage order for assignment: sort by the key descending, ties to the lower
// stage index.
std::vector<std::size_t> stages_by_desc(const std::vector<std::uint64_t>& key) {
    std::vector<std::size_t> order(key.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
    return order;
}

// EP order for RankL: every SLOW EP before every FAST one, each class by
// descending perf score, ties by ascending id.
std::vector<int> slow_first_order(const Platform& platform) {
    std::vector<const ExecutionPlace*> eps;
    for (const auto& ep : platform.eps) eps.push_back(&ep);
    std::sort(eps.begin(), eps.end(), [](const ExecutionPlace* a, const ExecutionPlace* b) {
        if (a->mem_class != b->mem_class) return a->mem_class == MemClass::Slow;
        const double sa = perf_score(*a), sb = perf_score(*b);
        if (sa != sb) return sa > sb;
        return a->id < b->id;
    });
    std::vector<int> ids;
    for (const auto* ep : eps) ids.push_back(ep->id);
    return ids;
}

}  // namespace

SeedResult generate_seed(const Network& network, const Platform& platform,
                         std::uint32_t n_stages, Assignment assignment,
                         std::uint64_t rng_seed) {
    const std::size_t layer_count = network.layer_count();
    if (n_stages < 1 || n_stages > layer_count || n_stages > platform.ep_count())
        throw ConfigError("n_stages must lie in [1, min(layers, EPs)] = [1, " +
                          std::to_string(std::min(layer_count, platform.ep_count())) + "]");

    // Phase 1: fold L singleton groups down to n_stages, always merging the
    // lightest group into its lighter neighbor.
    std::vector<Group> groups;
    groups.reserve(layer_count);
    for (const Layer& l : network.layers) groups.push_back({l.weight, 1});

    SeedResult result;
    result.merge_log.reserve(layer_count - n_stages);
    for (std::size_t pass = layer_count - n_stages; pass > 0; --pass) {
        std::size_t min_idx = 0;
        for (std::size_t i = 1; i < groups.size(); ++i)
            if (groups[i].weight < groups[min_idx].weight) min_idx = i;

        std::size_t neighbor;
        if (min_idx == 0) {
            neighbor = 1;
        } else if (min_idx == groups.size() - 1) {
            neighbor = min_idx - 1;
        } else {
            // ties go left
            neighbor = groups[min_idx + 1].weight < groups[min_idx - 1].weight ? min_idx + 1
                                                                               : min_idx - 1;
        }
        result.merge_log.emplace_back(static_cast<std::uint32_t>(min_idx),
                                      static_cast<std::uint32_t>(neighbor));
        const std::size_t keep = std::min(min_idx, neighbor);
        const std::size_t drop = std::max(min_idx, neighbor);
        groups[keep].weight += groups[drop].weight;
        groups[keep].size += groups[drop].size;
        groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(drop));
    }

    result.config.stage_sizes.resize(n_stages);
    std::vector<std::uint64_t> stage_weights(n_stages);
    std::vector<std::uint64_t> stage_layers(n_stages);
    for (std::uint32_t i = 0; i < n_stages; ++i) {
        result.config.stage_sizes[i] = groups[i].size;
        stage_weights[i] = groups[i].weight;
        stage_layers[i] = groups[i].size;
    }

    // Phase 2: stage -> EP matching.
    result.config.ep_assignment.resize(n_stages);
    switch (assignment) {
        case Assignment::RankL: {
            const auto stage_order = stages_by_desc(stage_layers);
            const auto ep_order = slow_first_order(platform);
            for (std::uint32_t i = 0; i < n_stages; ++i)
                result.config.ep_assignment[stage_order[i]] = ep_order[i];
            break;
        }
        case Assignment::RankW: {
            const auto stage_order = stages_by_desc(stage_weights);
            const auto ep_order = rank_eps(platform);
            for (std::uint32_t i = 0; i < n_stages; ++i)
                result.config.ep_assignment[stage_order[i]] = ep_order[i];
            break;
        }
        case Assignment::Random: {
            std::vector<int> ids;
            for (const auto& ep : platform.eps) ids.push_back(ep.id);
            std::sort(ids.begin(), ids.end());
            std::mt19937_64 rng(rng_seed);
            shuffle_seeded(ids, rng);
            for (std::uint32_t i = 0; i < n_stages; ++i)
                result.config.ep_assignment[i] = ids[i];
            break;
        }
    }
    return result;
}

namespace {

// Target stage for the next layer move, or nullopt when the pipeline cannot
// progress (slowest stage is a single layer, or nothing runs strictly below
// it). Candidates are stages on strictly faster EPs; when none exist (for
// instance on a homogeneous platform, or when the slowest stage already owns
// the fastest EP) the set widens to all stages with a strictly lower current
// stage time.
std::optional<std::size_t> select_target(const PipelineConfig& config, const Evaluation& ev,
                                         const Platform& platform, Balancing balancing) {
    const std::size_t slowest = ev.slowest;
    if (config.stage_sizes[slowest] < 2) return std::nullopt;

    const double slowest_score = perf_score(platform.ep_by_id(config.ep_assignment[slowest]));
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < config.n_stages(); ++i) {
        if (i == slowest) continue;
        if (perf_score(platform.ep_by_id(config.ep_assignment[i])) > slowest_score)
            candidates.push_back(i);
    }
    if (candidates.empty()) {
        for (std::size_t i = 0; i < config.n_stages(); ++i) {
            if (i == slowest) continue;
            if (ev.stage_times[i] < ev.stage_times[slowest]) candidates.push_back(i);
        }
    }
    if (candidates.empty()) return std::nullopt;

    const auto distance = [slowest](std::size_t i) {
        return i > slowest ? i - slowest : slowest - i;
    };
    std::size_t best = candidates.front();
    for (std::size_t i : candidates) {
        if (balancing == Balancing::Nfep) {
            if (std::make_pair(distance(i), i) < std::make_pair(distance(best), best)) best = i;
        } else {
            const auto key = std::make_tuple(ev.stage_times[i], distance(i), i);
            const auto best_key = std::make_tuple(ev.stage_times[best], distance(best), best);
            if (key < best_key) best = i;
        }
    }
    return best;
}

}  // namespace

TuneResult tune(const SeedResult& seed, const Network& network, const Platform& platform,
                const TunerParams& params, Balancing balancing, const Evaluator& evaluator,
                std::mt19937_64* noise_rng) {
    if (params.alpha < 1) throw ConfigError("alpha must be >= 1");
    if (auto violations = validate(seed.config, network, platform); !violations.empty())
        throw InvalidConfig(std::move(violations));

    const auto measure = [&](const PipelineConfig& c) {
        return noise_rng ? evaluator(c, *noise_rng) : evaluator(c);
    };
    PipelineConfig current = seed.config;
    Evaluation ev = measure(current);

    TuneResult result;
    result.best = current;
    result.best_throughput = ev.throughput;

    double cum_cost = ev.eval_cost;
    std::uint32_t gamma = 0;
    std::uint64_t step = 0;
    result.trace.push_back({step, current, ev.throughput, ev.throughput, cum_cost, gamma});

    while (gamma < params.alpha) {
        const auto target = select_target(current, ev, platform, balancing);
        if (!target) break;  // no legal move: the state cannot change, stop now

        current = move_layer(current, ev.slowest, *target);
        ev = measure(current);
        cum_cost += ev.eval_cost;
        ++step;

        if (ev.throughput > result.best_throughput) {
            result.best_throughput = ev.throughput;
            result.best = current;
            gamma = 0;
        } else {
            ++gamma;
        }
        result.trace.push_back({step, current, ev.throughput, result.best_throughput, cum_cost,
                                gamma});
    }
    return result;
}

TuneResult run_shisha(const Network& network, const Platform& platform, const Heuristic& heuristic,
                      const TunerParams& params, std::optional<std::uint32_t> n_stages,
                      const CostModelParams& cost_params) {
    const std::uint32_t n = n_stages.value_or(static_cast<std::uint32_t>(
        std::min(platform.ep_count(), network.layer_count())));
    const SeedResult seed = generate_seed(network, platform, n, heuristic.assignment,
                                          params.rng_seed);
    const Evaluator evaluator(network, platform, cost_params);
    if (cost_params.noise_stddev > 0.0) {
        std::mt19937_64 noise_rng(cost_params.rng_seed);
        return tune(seed, network, platform, params, heuristic.balancing, evaluator, &noise_rng);
    }
    return tune(seed, network, platform, params, heuristic.balancing, evaluator);
}

}  // namespace shisha
