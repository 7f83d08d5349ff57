#pragma once

// Shared helpers for the test binaries: seeded random instances mirroring the
// built-in platform shapes, plus an independent recursive search used as the
// oracle for exhaustive search. The oracle deliberately avoids the library's
// enumerator and evaluator; it computes stage times inline from raw weights.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "shisha/model.hpp"
#include "shisha/platform.hpp"
#include "shisha/util.hpp"

namespace testsupport {

struct Instance {
    shisha::Network net;
    shisha::Platform plat;
};

inline shisha::Network weights_network(const std::vector<std::uint64_t>& weights,
                                       const std::string& name = "w") {
    shisha::Network net;
    net.name = name;
    for (std::size_t i = 0; i < weights.size(); ++i)
        net.layers.push_back({i, "", std::nullopt, weights[i]});
    return net;
}

// Two single-core EPs, FAST speed 2 / SLOW speed 1, zero latency: the small
// hand-traceable platform used across the suite.
inline shisha::Platform two_ep_platform() {
    shisha::Platform p;
    p.name = "fast_slow";
    p.inter_ep_latency = 0.0;
    p.eps = {{0, 1, 2.0, shisha::MemClass::Fast, 0}, {1, 1, 1.0, shisha::MemClass::Slow, 1}};
    return p;
}

// Layers in [4, max_layers] with weights uniform in [1, 64]; EPs in
// [2, max_eps] with 4 or 8 cores, FAST:SLOW speeds 3:1, zero latency.
inline Instance random_instance(std::uint64_t seed, std::uint32_t max_layers = 10,
                                std::uint32_t max_eps = 4) {
    std::mt19937_64 rng(seed);
    Instance inst;
    const auto L = 4 + shisha::uniform_u64(rng, max_layers - 3);
    std::vector<std::uint64_t> weights(L);
    for (auto& w : weights) w = 1 + shisha::uniform_u64(rng, 64);
    inst.net = weights_network(weights, "rand" + std::to_string(seed));

    const auto E = 2 + shisha::uniform_u64(rng, max_eps - 1);
    inst.plat.name = "randplat" + std::to_string(seed);
    inst.plat.inter_ep_latency = 0.0;
    for (std::uint64_t i = 0; i < E; ++i) {
        const int cores = shisha::uniform_u64(rng, 2) == 0 ? 4 : 8;
        const bool fast = shisha::uniform_u64(rng, 2) == 0;
        inst.plat.eps.push_back({static_cast<int>(i), cores, fast ? 3.0 : 1.0,
                                 fast ? shisha::MemClass::Fast : shisha::MemClass::Slow,
                                 static_cast<int>(i)});
    }
    return inst;
}

struct OracleResult {
    double best_throughput = 0.0;
    std::uint64_t configs = 0;
};

namespace detail {

inline void oracle_rec(const std::vector<std::uint64_t>& weights,
                       const std::vector<const shisha::ExecutionPlace*>& eps,
                       double latency, std::uint32_t n_min, std::uint32_t n_max,
                       std::size_t layer_pos, std::uint32_t used_mask, std::uint32_t stages,
                       double max_time, OracleResult& out) {
    const std::size_t L = weights.size();
    if (layer_pos == L) {
        if (stages < n_min || stages > n_max) return;
        ++out.configs;
        const double tp = 1.0 / max_time;
        if (tp > out.best_throughput) out.best_throughput = tp;
        return;
    }
    if (stages == n_max) return;
    for (std::size_t len = 1; len + layer_pos <= L; ++len) {
        std::uint64_t w = 0;
        for (std::size_t i = 0; i < len; ++i) w += weights[layer_pos + i];
        for (std::size_t e = 0; e < eps.size(); ++e) {
            if (used_mask & (1u << e)) continue;
            const double score = static_cast<double>(eps[e]->cores) * eps[e]->speed;
            const double t = static_cast<double>(w) / score + (stages == 0 ? 0.0 : latency);
            oracle_rec(weights, eps, latency, n_min, n_max, layer_pos + len,
                       used_mask | (1u << e), stages + 1, std::max(max_time, t), out);
        }
    }
}

}  // namespace detail

// Exhaustive recursive search over (composition, injective assignment) pairs.
inline OracleResult brute_force_best(const shisha::Network& net, const shisha::Platform& plat,
                                     std::uint32_t n_min, std::uint32_t n_max) {
    std::vector<std::uint64_t> weights;
    for (const auto& l : net.layers) weights.push_back(l.weight);
    std::vector<const shisha::ExecutionPlace*> eps;
    for (const auto& ep : plat.eps) eps.push_back(&ep);
    // the enumeration alphabet is ids ascending; order here only affects the
    // visit sequence, not the best value or the count
    std::sort(eps.begin(), eps.end(),
              [](const auto* a, const auto* b) { return a->id < b->id; });
    OracleResult out;
    detail::oracle_rec(weights, eps, plat.inter_ep_latency, n_min, n_max, 0, 0, 0, 0.0, out);
    return out;
}

}  // namespace testsupport
