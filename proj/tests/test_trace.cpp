#include <doctest.h>

#include <random>
#include <sstream>

#include "shisha/trace.hpp"
#include "shisha/util.hpp"

using namespace shisha;

TEST_CASE("trace CSV round-trips exactly, including awkward doubles") {
    std::mt19937_64 rng(31);
    for (int iter = 0; iter < 50; ++iter) {
        Trace trace;
        const auto rows = 1 + uniform_u64(rng, 20);
        double best = 0.0, cost = 0.0;
        for (std::uint64_t s = 0; s < rows; ++s) {
            TraceRow row;
            row.step = s;
            const auto n = 1 + uniform_u64(rng, 5);
            for (std::uint64_t i = 0; i < n; ++i) {
                row.config.stage_sizes.push_back(
                    static_cast<std::uint32_t>(1 + uniform_u64(rng, 9)));
                row.config.ep_assignment.push_back(static_cast<int>(i));
            }
            row.throughput = uniform_real01(rng) / (1.0 + uniform_real01(rng) * 1e6);
            best = std::max(best, row.throughput);
            cost += 1.0 / row.throughput;
            row.best_so_far = best;
            row.cum_eval_cost = cost;
            if (uniform_u64(rng, 2)) row.gamma = static_cast<std::int64_t>(uniform_u64(rng, 11));
            trace.push_back(std::move(row));
        }
        const std::string text = trace_csv_string(trace);
        std::istringstream in(text);
        CHECK(parse_trace_csv(in) == trace);
        CHECK(trace_csv_string(trace) == text);  // stable bytes
    }
}

TEST_CASE("trace CSV column layout is pinned") {
    Trace trace;
    TraceRow row;
    row.step = 0;
    row.config = {{2, 2}, {1, 0}};
    row.throughput = 0.125;
    row.best_so_far = 0.125;
    row.cum_eval_cost = 8.0;
    row.gamma = 0;
    trace.push_back(row);
    CHECK(trace_csv_string(trace) ==
          "step,throughput,best_so_far,cum_eval_cost,gamma,stage_sizes,ep_assignment\n"
          "0,0.125,0.125,8,0,2;2,1;0\n");
}

TEST_CASE("trace CSV parser rejects malformed input") {
    std::istringstream missing_header("1,2,3\n");
    CHECK_THROWS_AS(parse_trace_csv(missing_header), ParseError);
    std::istringstream short_row(
        "step,throughput,best_so_far,cum_eval_cost,gamma,stage_sizes,ep_assignment\n1,2\n");
    CHECK_THROWS_AS(parse_trace_csv(short_row), ParseError);
    std::istringstream bad_num(
        "step,throughput,best_so_far,cum_eval_cost,gamma,stage_sizes,ep_assignment\n"
        "x,0.1,0.1,1,,2;2,0;1\n");
    CHECK_THROWS_AS(parse_trace_csv(bad_num), ParseError);
}
