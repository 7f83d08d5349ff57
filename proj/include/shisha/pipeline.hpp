#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "shisha/model.hpp"
#include "shisha/platform.hpp"

namespace shisha {

using BigCount = boost::multiprecision::cpp_int;

// A contiguous partition of the network's layers into N stages plus an
// injective stage -> EP assignment. stage i covers the layer window
// [prefix(i), prefix(i) + stage_sizes[i]). Immutable value type.
struct PipelineConfig {
    std::vector<std::uint32_t> stage_sizes;  // N positive counts summing to L
    std::vector<int> ep_assignment;          // N distinct EP ids, index = stage

    std::size_t n_stages() const { return stage_sizes.size(); }
    std::uint64_t layer_count() const;
    // first layer index of stage i
    std::uint64_t stage_begin(std::size_t i) const;

    bool operator==(const PipelineConfig&) const = default;
};

// All valid configurations for L layers, ep_count EPs and stage counts in
// [n_min, n_max]. Invariant: 1 <= n_min <= n_max <= min(L, ep_count).
struct DesignSpace {
    std::uint32_t layer_count = 1;
    std::uint32_t ep_count = 1;
    std::uint32_t n_min = 1;
    std::uint32_t n_max = 1;
};

DesignSpace make_design_space(std::uint32_t layer_count, std::uint32_t ep_count,
                              std::uint32_t n_min, std::uint32_t n_max);
// full stage-count range [1, min(L, E)]
DesignSpace full_design_space(std::uint32_t layer_count, std::uint32_t ep_count);

// Returns the list of violated invariants; empty means the config is valid
// for this network/platform pair.
std::vector<std::string> validate(const PipelineConfig& config, const Network& network,
                                  const Platform& platform);

struct MoveWouldEmptyStage : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Transfers one layer from from_stage to to_stage, rippling every boundary in
// between by one position so stages stay contiguous: for to < from the source
// loses its front layer and the target gains one at its back (intermediate
// stages keep their sizes but their windows shift); symmetric for to > from.
// The EP assignment is unchanged. Throws MoveWouldEmptyStage if the source
// has a single layer.
PipelineConfig move_layer(const PipelineConfig& config, std::size_t from_stage,
                          std::size_t to_stage);

// Exact design-space cardinality:
//   sum over N in [n_min, n_max] of C(L-1, N-1) * E! / (E-N)!
BigCount design_space_size(const DesignSpace& space);
// Same value when it fits in 64 bits (required by rank/unrank and sampling).
std::optional<std::uint64_t> design_space_size_u64(const DesignSpace& space);

// Deterministic enumeration order: N ascending; per N, compositions of L into
// N parts in lexicographic order; per composition, injective EP id sequences
// in lexicographic order over ids sorted ascending. Single-consumer stream;
// the returned pointer is invalidated by the next call.
class ConfigEnumerator {
  public:
    ConfigEnumerator(const DesignSpace& space, const Platform& platform);

    // nullptr once exhausted
    const PipelineConfig* next();

    // Repositions the stream so the following next() yields the config with
    // the given enumeration rank. Requires the space size to fit in u64.
    void seek(std::uint64_t rank);

  private:
    void load_stage_sizes();
    bool advance_assignment();
    bool advance_composition();
    bool start_n(std::uint32_t n);

    DesignSpace space_;
    std::vector<int> sorted_ids_;
    std::uint32_t n_ = 0;
    std::vector<std::uint32_t> cuts_;  // increasing cut points in [1, L-1]
    std::vector<int> perm_state_;      // first n_ entries form the assignment
    PipelineConfig current_;
    bool fresh_ = false;   // current_ holds an unreturned config
    bool done_ = false;
};

// Enumeration rank of a valid config within its design space (the inverse of
// ConfigEnumerator order), and the config at a given rank. Both require the
// space to fit in u64.
std::uint64_t rank_config(const PipelineConfig& config, const DesignSpace& space,
                          const Platform& platform);
PipelineConfig unrank_config(std::uint64_t rank, const DesignSpace& space,
                             const Platform& platform);

}  // namespace shisha
