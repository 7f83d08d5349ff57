#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace shisha {

enum class MemClass { Fast, Slow };

// A set of cores attached to one memory module; the unit a pipeline stage is
// mapped to.
struct ExecutionPlace {
    int id = 0;
    int cores = 1;          // >= 1
    double speed = 1.0;     // per-core relative throughput, > 0
    MemClass mem_class = MemClass::Fast;
    int position = 0;       // physical ordering; defaults to list order

    bool operator==(const ExecutionPlace&) const = default;
};

struct Platform {
    std::string name;
    std::vector<ExecutionPlace> eps;
    double inter_ep_latency = 0.0;  // time units charged per stage boundary

    std::size_t ep_count() const { return eps.size(); }
    const ExecutionPlace& ep_by_id(int id) const;
    bool has_ep(int id) const;

    bool operator==(const Platform&) const = default;
};

// Aggregate compute capacity of an EP, work units per time unit.
inline double perf_score(const ExecutionPlace& ep) {
    return static_cast<double>(ep.cores) * ep.speed;
}

// EP ids in descending performance order. Ties break FAST before SLOW, then
// ascending id, so the ranking is a deterministic function of the EP set.
std::vector<int> rank_eps(const Platform& platform);

// Built-in platform layouts C1..C6 (FAST EPs first, then SLOW):
//   C1: 1x8-core FAST + 1x8-core SLOW     C4: 2x8-core FAST + 4x4-core SLOW
//   C2: 2x8-core FAST + 2x8-core SLOW     C5: 4x4-core FAST + 4x4-core SLOW
//   C3: 4x4-core FAST + 2x8-core SLOW     C6: 8x4-core FAST only
// inter_ep_latency defaults to 20 time units (nanoseconds in the nominal scale).
Platform builtin_config(std::string_view name, double fast_speed = 3.0, double slow_speed = 1.0);
bool is_builtin_config_name(std::string_view name);

// Platform file format: JSON
//   { "name": str, "inter_ep_latency": number,
//     "eps": [ {"id": int, "cores": int, "speed": number, "mem_class": "FAST"|"SLOW"} ] }
Platform load_platform(std::istream& in);
Platform load_platform_file(const std::string& path);
void save_platform(const Platform& platform, std::ostream& out);

std::string_view mem_class_name(MemClass m);

}  // namespace shisha
