#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "shisha/pipeline.hpp"

namespace shisha {

// One evaluation in an exploration run. gamma is carried only by the online
// tuner (the consecutive non-improvement counter after this step).
struct TraceRow {
    std::uint64_t step = 0;
    PipelineConfig config;
    double throughput = 0.0;
    double best_so_far = 0.0;
    double cum_eval_cost = 0.0;
    std::optional<std::int64_t> gamma;

    bool operator==(const TraceRow&) const = default;
};

using Trace = std::vector<TraceRow>;

// CSV columns, fixed: step,throughput,best_so_far,cum_eval_cost,gamma,
// stage_sizes,ep_assignment. Lists are semicolon-joined, doubles use the
// shortest round-trip form, gamma is empty for non-tuner rows. parse is the
// exact inverse of write.
void write_trace_csv(const Trace& trace, std::ostream& out);
std::string trace_csv_string(const Trace& trace);
Trace parse_trace_csv(std::istream& in);
void write_trace_csv_file(const Trace& trace, const std::string& path);
Trace parse_trace_csv_file(const std::string& path);

}  // namespace shisha
