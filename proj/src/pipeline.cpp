#include "shisha/pipeline.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "shisha/util.hpp"

namespace shisha {

namespace {

BigCount binom_big(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    BigCount r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

// E! / (E-n)!  — ordered injective choices of n EPs
BigCount falling_big(std::uint64_t e, std::uint64_t n) {
    if (n > e) return 0;
    BigCount r = 1;
    for (std::uint64_t i = 0; i < n; ++i) r *= e - i;
    return r;
}

std::uint64_t to_u64(const BigCount& v, const char* what) {
    if (v > std::numeric_limits<std::uint64_t>::max())
        throw ConfigError(std::string(what) + ": design space too large for ranked access");
    return v.convert_to<std::uint64_t>();
}

std::uint64_t binom_u64(std::uint64_t n, std::uint64_t k) {
    return to_u64(binom_big(n, k), "binomial");
}

std::uint64_t falling_u64(std::uint64_t e, std::uint64_t n) {
    return to_u64(falling_big(e, n), "permutation count");
}

void check_space(const DesignSpace& s) {
    if (s.layer_count < 1 || s.ep_count < 1)
        throw ConfigError("design space needs at least one layer and one EP");
    const std::uint32_t cap = std::min(s.layer_count, s.ep_count);
    if (s.n_min < 1 || s.n_min > s.n_max || s.n_max > cap)
        throw ConfigError("invalid stage-count range [" + std::to_string(s.n_min) + ", " +
                          std::to_string(s.n_max) + "] for L=" + std::to_string(s.layer_count) +
                          ", E=" + std::to_string(s.ep_count));
}

std::vector<int> sorted_ep_ids(const Platform& platform) {
    std::vector<int> ids;
    ids.reserve(platform.eps.size());
    for (const auto& ep : platform.eps) ids.push_back(ep.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

// Lexicographic rank of an increasing k-subset of {1..n}.
std::uint64_t rank_combination(const std::vector<std::uint32_t>& cuts, std::uint32_t n) {
    std::uint64_t r = 0;
    std::uint32_t prev = 0;
    const std::uint32_t k = static_cast<std::uint32_t>(cuts.size());
    for (std::uint32_t i = 0; i < k; ++i) {
        for (std::uint32_t v = prev + 1; v < cuts[i]; ++v)
            r += binom_u64(n - v, k - 1 - i);
        prev = cuts[i];
    }
    return r;
}

std::vector<std::uint32_t> unrank_combination(std::uint64_t rank, std::uint32_t n, std::uint32_t k) {
    std::vector<std::uint32_t> cuts(k);
    std::uint32_t prev = 0;
    for (std::uint32_t i = 0; i < k; ++i) {
        std::uint32_t v = prev + 1;
        for (;; ++v) {
            const std::uint64_t cnt = binom_u64(n - v, k - 1 - i);
            if (rank < cnt) break;
            rank -= cnt;
        }
        cuts[i] = v;
        prev = v;
    }
    return cuts;
}

}  // namespace

std::uint64_t PipelineConfig::layer_count() const {
    return std::accumulate(stage_sizes.begin(), stage_sizes.end(), std::uint64_t{0});
}

std::uint64_t PipelineConfig::stage_begin(std::size_t i) const {
    return std::accumulate(stage_sizes.begin(), stage_sizes.begin() + i, std::uint64_t{0});
}

DesignSpace make_design_space(std::uint32_t layer_count, std::uint32_t ep_count,
                              std::uint32_t n_min, std::uint32_t n_max) {
    DesignSpace s{layer_count, ep_count, n_min, n_max};
    check_space(s);
    return s;
}

DesignSpace full_design_space(std::uint32_t layer_count, std::uint32_t ep_count) {
    return make_design_space(layer_count, ep_count, 1, std::min(layer_count, ep_count));
}

std::vector<std::string> validate(const PipelineConfig& config, const Network& network,
                                  const Platform& platform) {
    std::vector<std::string> violations;
    const std::size_t n = config.stage_sizes.size();
    if (n == 0) {
        violations.push_back("config has no stages");
        return violations;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (config.stage_sizes[i] == 0)
            violations.push_back("stage " + std::to_string(i) + " has zero layers");

    const std::uint64_t total = config.layer_count();
    if (total != network.layer_count())
        violations.push_back("stage sizes sum to " + std::to_string(total) + " but the network has " +
                             std::to_string(network.layer_count()) + " layers");

    if (config.ep_assignment.size() != n) {
        violations.push_back("assignment lists " + std::to_string(config.ep_assignment.size()) +
                             " EPs for " + std::to_string(n) + " stages");
    } else {
        std::unordered_set<int> seen;
        for (int id : config.ep_assignment) {
            if (!seen.insert(id).second)
                violations.push_back("EP " + std::to_string(id) + " assigned to more than one stage");
            if (!platform.has_ep(id))
                violations.push_back("unknown EP id " + std::to_string(id));
        }
    }
    if (n > platform.ep_count())
        violations.push_back("more stages than EPs (" + std::to_string(n) + " > " +
                             std::to_string(platform.ep_count()) + ")");
    return violations;
}

PipelineConfig move_layer(const PipelineConfig& config, std::size_t from_stage,
                          std::size_t to_stage) {
    const std::size_t n = config.n_stages();
    if (from_stage >= n || to_stage >= n)
        throw std::invalid_argument("move_layer: stage index out of range");
    if (from_stage == to_stage)
        throw std::invalid_argument("move_layer: source and target stage are the same");
    if (config.stage_sizes[from_stage] < 2)
        throw MoveWouldEmptyStage("move_layer: stage " + std::to_string(from_stage) +
                                  " has a single layer");
    PipelineConfig out = config;
    out.stage_sizes[from_stage] -= 1;
    out.stage_sizes[to_stage] += 1;
    return out;
}

BigCount design_space_size(const DesignSpace& space) {
    check_space(space);
    BigCount total = 0;
    for (std::uint32_t n = space.n_min; n <= space.n_max; ++n)
        total += binom_big(space.layer_count - 1, n - 1) * falling_big(space.ep_count, n);
    return total;
}

std::optional<std::uint64_t> design_space_size_u64(const DesignSpace& space) {
    const BigCount total = design_space_size(space);
    if (total > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
    return total.convert_to<std::uint64_t>();
}

ConfigEnumerator::ConfigEnumerator(const DesignSpace& space, const Platform& platform)
    : space_(space), sorted_ids_(sorted_ep_ids(platform)) {
    check_space(space);
    if (sorted_ids_.size() != space.ep_count)
        throw ConfigError("design space EP count disagrees with the platform");
    done_ = !start_n(space_.n_min);
}

bool ConfigEnumerator::start_n(std::uint32_t n) {
    if (n > space_.n_max) return false;
    n_ = n;
    cuts_.resize(n_ - 1);
    std::iota(cuts_.begin(), cuts_.end(), 1u);  // first composition: (1,1,...,L-N+1)
    perm_state_ = sorted_ids_;
    return true;
}

void ConfigEnumerator::load_stage_sizes() {
    current_.stage_sizes.resize(n_);
    std::uint32_t prev = 0;
    for (std::uint32_t i = 0; i + 1 < n_; ++i) {
        current_.stage_sizes[i] = cuts_[i] - prev;
        prev = cuts_[i];
    }
    current_.stage_sizes[n_ - 1] = space_.layer_count - prev;
    current_.ep_assignment.assign(perm_state_.begin(), perm_state_.begin() + n_);
}

bool ConfigEnumerator::advance_assignment() {
    std::reverse(perm_state_.begin() + n_, perm_state_.end());
    return std::next_permutation(perm_state_.begin(), perm_state_.end());
}

bool ConfigEnumerator::advance_composition() {
    const std::uint32_t k = n_ - 1;
    const std::uint32_t max_cut = space_.layer_count - 1;
    if (k == 0) return false;
    // next lexicographic k-combination of {1..L-1}
    std::int64_t i = k - 1;
    while (i >= 0 && cuts_[i] == max_cut - (k - 1 - i)) --i;
    if (i < 0) return false;
    ++cuts_[i];
    for (std::uint32_t j = i + 1; j < k; ++j) cuts_[j] = cuts_[j - 1] + 1;
    return true;
}

const PipelineConfig* ConfigEnumerator::next() {
    if (done_) return nullptr;
    load_stage_sizes();
    // advance the cursor past the config we are about to return
    if (!advance_assignment()) {
        if (advance_composition()) {
            perm_state_ = sorted_ids_;
        } else if (!start_n(n_ + 1)) {
            done_ = true;
        }
    }
    return &current_;
}

void ConfigEnumerator::seek(std::uint64_t rank) {
    std::uint64_t r = rank;
    for (std::uint32_t n = space_.n_min; n <= space_.n_max; ++n) {
        const std::uint64_t comp_count = binom_u64(space_.layer_count - 1, n - 1);
        const std::uint64_t perm_count = falling_u64(space_.ep_count, n);
        std::uint64_t block = 0;
        // a block larger than u64 certainly contains any remaining u64 rank
        const bool huge = __builtin_mul_overflow(comp_count, perm_count, &block);
        if (!huge && r >= block) {
            r -= block;
            continue;
        }
        n_ = n;
        cuts_ = unrank_combination(r / perm_count, space_.layer_count - 1, n - 1);
        std::uint64_t pr = r % perm_count;
        // factoradic-style unranking of the injective id sequence, then append
        // the unused ids ascending (the canonical cursor state)
        std::vector<int> avail = sorted_ids_;
        perm_state_.clear();
        for (std::uint32_t i = 0; i < n; ++i) {
            const std::uint64_t completions = falling_u64(space_.ep_count - 1 - i, n - 1 - i);
            const std::size_t d = static_cast<std::size_t>(pr / completions);
            pr %= completions;
            perm_state_.push_back(avail[d]);
            avail.erase(avail.begin() + d);
        }
        perm_state_.insert(perm_state_.end(), avail.begin(), avail.end());
        done_ = false;
        return;
    }
    throw std::out_of_range("ConfigEnumerator::seek: rank beyond design space");
}

std::uint64_t rank_config(const PipelineConfig& config, const DesignSpace& space,
                          const Platform& platform) {
    check_space(space);
    const std::uint32_t n = static_cast<std::uint32_t>(config.n_stages());
    if (n < space.n_min || n > space.n_max)
        throw std::out_of_range("rank_config: stage count outside the design space");
    if (config.layer_count() != space.layer_count)
        throw std::out_of_range("rank_config: layer count mismatch");

    std::uint64_t offset = 0;
    for (std::uint32_t m = space.n_min; m < n; ++m) {
        std::uint64_t block = 0;
        if (__builtin_mul_overflow(binom_u64(space.layer_count - 1, m - 1),
                                   falling_u64(space.ep_count, m), &block) ||
            __builtin_add_overflow(offset, block, &offset))
            throw ConfigError("rank_config: design space too large for ranked access");
    }

    std::vector<std::uint32_t> cuts(n - 1);
    std::uint32_t prev = 0;
    for (std::uint32_t i = 0; i + 1 < n; ++i) {
        prev += config.stage_sizes[i];
        cuts[i] = prev;
    }
    const std::uint64_t comp_rank = rank_combination(cuts, space.layer_count - 1);

    const std::vector<int> ids = sorted_ep_ids(platform);
    std::vector<int> avail = ids;
    std::uint64_t perm_rank = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto it = std::find(avail.begin(), avail.end(), config.ep_assignment[i]);
        if (it == avail.end())
            throw std::out_of_range("rank_config: assignment is not injective over platform ids");
        const std::uint64_t completions = falling_u64(space.ep_count - 1 - i, n - 1 - i);
        perm_rank += static_cast<std::uint64_t>(it - avail.begin()) * completions;
        avail.erase(it);
    }
    return offset + comp_rank * falling_u64(space.ep_count, n) + perm_rank;
}

PipelineConfig unrank_config(std::uint64_t rank, const DesignSpace& space,
                             const Platform& platform) {
    ConfigEnumerator e(space, platform);
    e.seek(rank);
    const PipelineConfig* cfg = e.next();
    if (cfg == nullptr) throw std::out_of_range("unrank_config: rank beyond design space");
    return *cfg;
}

}  // namespace shisha
