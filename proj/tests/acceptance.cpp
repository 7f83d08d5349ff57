// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run from the repository root (ctest does this automatically).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "shisha/baselines.hpp"
#include "shisha/evaluator.hpp"
#include "shisha/harness.hpp"
#include "shisha/model.hpp"
#include "shisha/pipeline.hpp"
#include "shisha/platform.hpp"
#include "shisha/trace.hpp"
#include "shisha/tuner.hpp"
#include "shisha/util.hpp"

#include "support.hpp"

using namespace shisha;

namespace {

int failures = 0;
std::vector<std::string> notes;

void check(bool ok, const std::string& what) {
    if (!ok) {
        ++failures;
        notes.push_back(what);
    }
}

void criterion(int number, const std::string& title, const std::function<void()>& body) {
    notes.clear();
    const int before = failures;
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const double secs = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    const bool ok = failures == before;
    std::printf("[%s] criterion %d: %s (%.2fs)\n", ok ? "PASS" : "FAIL", number, title.c_str(),
                secs);
    for (const auto& n : notes) std::printf("         - %s\n", n.c_str());
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// The acceptance platform family: uniform 8-core EPs, FAST/SLOW memory split
// at the default 3:1 core-performance ratio, zero latency.
testsupport::Instance random_instance_8core(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    testsupport::Instance inst;
    const auto L = 4 + uniform_u64(rng, 7);   // [4, 10]
    std::vector<std::uint64_t> w(L);
    for (auto& x : w) x = 1 + uniform_u64(rng, 64);
    inst.net = testsupport::weights_network(w, "acc" + std::to_string(seed));
    const auto E = 2 + uniform_u64(rng, 3);   // [2, 4]
    inst.plat.name = "accplat";
    for (std::uint64_t i = 0; i < E; ++i) {
        const bool fast = uniform_u64(rng, 2) == 0;
        inst.plat.eps.push_back({static_cast<int>(i), 8, fast ? 3.0 : 1.0,
                                 fast ? MemClass::Fast : MemClass::Slow, static_cast<int>(i)});
    }
    return inst;
}

void criterion1_layer_weights() {
    check(layer_weight({1, 1, 1, 1, 1, 1}) == 1, "identity dims");
    check(layer_weight({4, 4, 2, 3, 3, 8}) == 2304, "product example 2304");
    check(layer_weight({2, 3, 1, 1, 1, 5}) == 30, "product example 30");
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        const LayerDims d{1 + uniform_u64(rng, 128), 1 + uniform_u64(rng, 128),
                          1 + uniform_u64(rng, 128), 1 + uniform_u64(rng, 16),
                          1 + uniform_u64(rng, 16), 1 + uniform_u64(rng, 512)};
        unsigned __int128 expect = 1;
        for (std::uint64_t v : {d.h, d.w, d.c, d.r, d.s, d.k}) expect *= v;
        if (expect > std::numeric_limits<std::uint64_t>::max()) continue;
        if (layer_weight(d) != static_cast<std::uint64_t>(expect)) {
            check(false, "randomized dims mismatch at iteration " + std::to_string(i));
            return;
        }
    }
}

void criterion2_seed_hand_traces() {
    using MergeLog = std::vector<std::pair<std::uint32_t, std::uint32_t>>;
    const auto plat = testsupport::two_ep_platform();
    {
        const auto seed = generate_seed(testsupport::weights_network({5, 1, 2, 8}), plat, 2,
                                        Assignment::RankW);
        check(seed.config.stage_sizes == std::vector<std::uint32_t>{3, 1},
              "[5,1,2,8] stage sizes");
        check(seed.merge_log == MergeLog{{1, 2}, {1, 0}}, "[5,1,2,8] merge log");
    }
    {
        const auto seed = generate_seed(testsupport::weights_network({3, 1, 1, 5}), plat, 2,
                                        Assignment::RankW);
        check(seed.config.stage_sizes == std::vector<std::uint32_t>{3, 1},
              "[3,1,1,5] stage sizes");
        check(seed.merge_log == MergeLog{{1, 2}, {1, 0}}, "[3,1,1,5] merge log");
    }
}

void criterion3_oracle_optimality() {
    // the hand instance first
    const auto demo = testsupport::weights_network({4, 4, 4, 4});
    const auto demo_plat = testsupport::two_ep_platform();
    const Evaluator demo_ev(demo, demo_plat);
    const auto demo_es = exhaustive_search(demo_ev, make_design_space(4, 2, 1, 2), 100);
    const auto demo_sh = run_shisha(demo, demo_plat, heuristic_by_name("H3"), {10, 0}, 2u);
    check(demo_es.best_throughput == 1.0 / 6.0, "ES optimum on the 4-layer instance is 1/6");
    check(demo_sh.best_throughput == demo_es.best_throughput,
          "H3 equals the ES optimum exactly on the 4-layer instance");

    std::vector<double> gaps;
    int exact = 0;
    for (int i = 0; i < 100; ++i) {
        const auto inst = random_instance_8core(42000 + i);
        const Evaluator ev(inst.net, inst.plat);
        const auto space = full_design_space(
            static_cast<std::uint32_t>(inst.net.layer_count()),
            static_cast<std::uint32_t>(inst.plat.ep_count()));
        const auto es = exhaustive_search(ev, space, std::uint64_t{1} << 22);
        const auto sh = run_shisha(inst.net, inst.plat, heuristic_by_name("H3"), {10, 0});
        check(validate(sh.best, inst.net, inst.plat).empty(),
              "shisha best config valid on instance " + std::to_string(i));
        std::uint64_t improvements = 0;
        for (std::size_t k = 1; k < sh.trace.size(); ++k)
            if (sh.trace[k].throughput > sh.trace[k - 1].best_so_far) ++improvements;
        check(sh.trace.size() <= 10 * (improvements + 1) + 1,
              "tuner terminated within the trace bound on instance " + std::to_string(i));
        const double gap = (es.best_throughput - sh.best_throughput) / es.best_throughput;
        gaps.push_back(gap);
        if (gap <= 0.0) ++exact;
    }
    std::vector<double> sorted_gaps = gaps;
    std::sort(sorted_gaps.begin(), sorted_gaps.end());
    const double med = median(gaps);
    std::printf("         gap distribution over 100 instances: median=%.4g, exact=%d/100, "
                "p90=%.4g, max=%.4g\n",
                med, exact, sorted_gaps[89], sorted_gaps.back());
    check(med == 0.0, "median Shisha/ES gap is zero");
}

void criterion4_frugality() {
    const auto net = load_network_file("data/networks/synthnet18.json");
    const auto plat = load_platform_file("data/platforms/c2x2_8ep.json");
    const auto r = run_shisha(net, plat, heuristic_by_name("H3"), {10, 0});
    const auto size = design_space_size(full_design_space(18, 8));
    const double fraction = explored_fraction(r.trace.size(), size);
    std::printf("         SynthNet-18 on 8 EPs: %zu evaluations, %.3g%% of %s configs\n",
                r.trace.size(), 100.0 * fraction, size.str().c_str());
    check(r.trace.size() >= 11 && r.trace.size() <= 60, "evaluations within [11, 60]");
    check(fraction < 0.005, "explored fraction below 0.5%");
}

void criterion5_alpha_monotonicity() {
    const auto net = load_network_file("data/networks/yolov3_52.json");
    const auto layout = load_platform_file("data/platforms/c2x2_8ep.json");
    const auto cells = alpha_sweep(net, layout, 3.0, {3.0, 6.0, 12.0}, {1, 5, 10, 25, 100},
                                   heuristic_by_name("H3"));
    double prev = 0.0;
    double prev_ratio = -1.0;
    for (const auto& c : cells) {
        if (c.ratio != prev_ratio) {
            prev_ratio = c.ratio;
            prev = 0.0;
        }
        check(c.best_throughput >= prev,
              "throughput non-decreasing in alpha at ratio " + fmt_double(c.ratio) +
                  ", alpha " + std::to_string(c.alpha));
        prev = c.best_throughput;
        if (c.alpha == 100)
            check(c.normalized == 1.0, "self-normalization at alpha=100, ratio " +
                                           fmt_double(c.ratio));
    }
}

void criterion6_trace_invariants() {
    for (int run = 0; run < 60; ++run) {
        const auto inst = random_instance_8core(60000 + run);
        const Evaluator ev(inst.net, inst.plat);
        const std::uint32_t alpha = 1 + run % 15;

        Trace first, second;
        std::uint64_t improvements = 0;
        const int algo = run % 4;
        for (int rep = 0; rep < 2; ++rep) {
            Trace trace;
            if (algo == 0) {
                const auto r = run_shisha(inst.net, inst.plat, heuristic_by_name("H5"),
                                          {alpha, static_cast<std::uint64_t>(run)});
                trace = r.trace;
            } else {
                ExplorerParams params;
                params.budget = 80;
                params.hc_proximity = 3;
                params.rng_seed = run;
                const auto r = algo == 1   ? hill_climb(params, ev)
                               : algo == 2 ? simulated_annealing(params, ev)
                                           : random_walk(params, ev);
                trace = r.trace;
            }
            if (rep == 0) first = trace; else second = trace;
        }
        check(first == second, "rerun is bit-identical, run " + std::to_string(run));
        check(trace_csv_string(first) == trace_csv_string(second),
              "trace CSV bytes identical, run " + std::to_string(run));

        improvements = 0;
        for (std::size_t i = 1; i < first.size(); ++i) {
            if (first[i].best_so_far < first[i - 1].best_so_far) {
                check(false, "best-so-far decreased, run " + std::to_string(run));
                break;
            }
            if (first[i].throughput > first[i - 1].best_so_far) ++improvements;
        }
        for (const auto& row : first) {
            if (!validate(row.config, inst.net, inst.plat).empty()) {
                check(false, "invalid config in trace, run " + std::to_string(run));
                break;
            }
        }
        if (algo == 0)
            check(first.size() <= alpha * (improvements + 1) + 1,
                  "tuner trace length bound, run " + std::to_string(run));
    }
}

void criterion7_es_correctness() {
    // every small space: enumeration count == closed form
    for (std::uint32_t L = 1; L <= 8; ++L) {
        for (std::uint32_t E = 1; E <= 4; ++E) {
            Platform plat;
            for (std::uint32_t i = 0; i < E; ++i)
                plat.eps.push_back({static_cast<int>(i), 1, 1.0, MemClass::Fast,
                                    static_cast<int>(i)});
            const std::uint32_t cap = std::min(L, E);
            for (std::uint32_t lo = 1; lo <= cap; ++lo) {
                for (std::uint32_t hi = lo; hi <= cap; ++hi) {
                    const auto space = make_design_space(L, E, lo, hi);
                    ConfigEnumerator stream(space, plat);
                    std::uint64_t count = 0;
                    while (stream.next() != nullptr) ++count;
                    if (BigCount(count) != design_space_size(space)) {
                        check(false, "count mismatch at L=" + std::to_string(L) + " E=" +
                                         std::to_string(E) + " N=[" + std::to_string(lo) + "," +
                                         std::to_string(hi) + "]");
                        return;
                    }
                }
            }
        }
    }
    // ES against the independent recursive oracle
    for (int i = 0; i < 20; ++i) {
        const auto inst = testsupport::random_instance(70000 + i, 8, 4);
        const Evaluator ev(inst.net, inst.plat);
        const auto space = full_design_space(
            static_cast<std::uint32_t>(inst.net.layer_count()),
            static_cast<std::uint32_t>(inst.plat.ep_count()));
        const auto es = exhaustive_search(ev, space, std::uint64_t{1} << 22);
        const auto es_par = exhaustive_search_parallel(ev, space, std::uint64_t{1} << 22);
        const auto oracle = testsupport::brute_force_best(inst.net, inst.plat, space.n_min,
                                                          space.n_max);
        check(es.best_throughput == oracle.best_throughput,
              "ES equals the recursive oracle, instance " + std::to_string(i));
        check(es.evaluations == oracle.configs,
              "ES visit count equals the oracle, instance " + std::to_string(i));
        check(es_par.best == es.best && es_par.best_throughput == es.best_throughput,
              "parallel ES equals serial ES, instance " + std::to_string(i));
    }
}

void criterion8_baseline_sanity() {
    const auto net = testsupport::weights_network({4, 4, 4, 4});
    const auto plat = testsupport::two_ep_platform();
    const Evaluator ev(net, plat);
    const auto space = make_design_space(4, 2, 1, 2);
    const auto es = exhaustive_search(ev, space, 100);

    // hill climbing fixes the global optimum
    ExplorerParams hc;
    hc.budget = 200;
    hc.hc_proximity = 4;
    hc.space = space;
    const auto fixed = hill_climb(hc, ev, es.best);
    check(fixed.best == es.best && fixed.best_throughput == es.best_throughput,
          "HC started at the ES optimum returns it unchanged");

    // annealing degenerates to greedy once the temperature collapses
    ExplorerParams sa;
    sa.budget = 50;
    sa.hc_proximity = 3;
    sa.rng_seed = 23;
    sa.sa_cooling = 1e-4;
    sa.space = space;
    std::vector<SaStep> log;
    const auto r = simulated_annealing(sa, ev, es.best, &log);
    check(log.size() >= 2, "annealing observed past step 1");
    for (std::size_t i = 1; i < log.size(); ++i) {
        const bool downhill = log[i].proposal_throughput < log[i].current_throughput;
        if (downhill == log[i].accepted) {
            check(false, "annealing not greedy at step " + std::to_string(i + 1));
            break;
        }
    }
    check(r.best_throughput == es.best_throughput, "annealing keeps the optimum as best");

    // exhaustive random walk without replacement certainly finds the optimum
    ExplorerParams rw;
    rw.budget = 8;
    rw.rw_with_replacement = false;
    rw.rng_seed = 5;
    rw.space = space;
    const auto walked = random_walk(rw, ev);
    check(walked.best_throughput == es.best_throughput,
          "RW without replacement at full budget finds the ES optimum");
}

void criterion9_seeded_start_benefit() {
    std::vector<double> eval_diffs, tp_diffs;
    for (int i = 0; i < 20; ++i) {
        const auto inst = random_instance_8core(77000 + i);
        const auto n = static_cast<std::uint32_t>(
            std::min(inst.plat.ep_count(), inst.net.layer_count()));
        const Evaluator ev(inst.net, inst.plat);
        const auto own = run_shisha(inst.net, inst.plat, heuristic_by_name("H3"), {10, 0});

        const auto space = make_design_space(
            static_cast<std::uint32_t>(inst.net.layer_count()),
            static_cast<std::uint32_t>(inst.plat.ep_count()), n, n);
        std::mt19937_64 rng(500 + i);
        std::vector<double> tps, evals;
        for (int s = 0; s < 100; ++s) {
            const SeedResult seed{random_config(space, inst.plat, rng), {}};
            const auto r = tune(seed, inst.net, inst.plat, {10, 0}, Balancing::Nlfep, ev);
            tps.push_back(r.best_throughput);
            evals.push_back(static_cast<double>(r.trace.size()));
        }
        eval_diffs.push_back(static_cast<double>(own.trace.size()) - median(evals));
        tp_diffs.push_back(own.best_throughput - median(tps));
    }
    const double med_eval_diff = median(eval_diffs);
    const double med_tp_diff = median(tp_diffs);
    std::printf("         vs 100 random seeds per instance: median eval diff=%+.1f, "
                "median throughput diff=%+.4g\n",
                med_eval_diff, med_tp_diff);
    check(med_eval_diff <= 0.0,
          "median over instances: own-seed evaluation count <= random-seed median");
    check(med_tp_diff >= 0.0,
          "median over instances: own-seed throughput >= random-seed median");
}

}  // namespace

int main() {
    criterion(1, "layer weight unit suite against the fold oracle", criterion1_layer_weights);
    criterion(2, "seed generation hand traces reproduce exactly", criterion2_seed_hand_traces);
    criterion(3, "desk-scale oracle optimality (Shisha vs exhaustive search)",
              criterion3_oracle_optimality);
    criterion(4, "exploration frugality on SynthNet-18 / 8 EPs", criterion4_frugality);
    criterion(5, "alpha monotonicity across heterogeneity ratios", criterion5_alpha_monotonicity);
    criterion(6, "trace invariants and deterministic reruns (60 seeded runs)",
              criterion6_trace_invariants);
    criterion(7, "exhaustive search correctness against independent oracles",
              criterion7_es_correctness);
    criterion(8, "baseline sanity: HC fixed point, greedy SA limit, RW exhaustion",
              criterion8_baseline_sanity);
    criterion(9, "seeded-start benefit over random starting configurations",
              criterion9_seeded_start_benefit);

    if (failures != 0) std::printf("%d check(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
