#include "shisha/evaluator.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "shisha/util.hpp"

namespace shisha {

namespace {
std::string join_violations(const std::vector<std::string>& v) {
    std::ostringstream os;
    os << "invalid pipeline configuration:";
    for (const auto& s : v) os << ' ' << s << ';';
    return os.str();
}

double noise_factor(double stddev, std::mt19937_64& rng) {
    return std::max(0.01, 1.0 + normal_sample(rng, stddev));
}
}  // namespace

InvalidConfig::InvalidConfig(std::vector<std::string> v)
    : std::logic_error(join_violations(v)), violations(std::move(v)) {}

double stage_time(std::uint64_t stage_weight, const ExecutionPlace& ep, double boundary_latency) {
    return static_cast<double>(stage_weight) / perf_score(ep) + boundary_latency;
}

double stage_time(std::uint64_t stage_weight, const ExecutionPlace& ep, double boundary_latency,
                  double noise_stddev, std::mt19937_64& rng) {
    return stage_time(stage_weight, ep, boundary_latency) * noise_factor(noise_stddev, rng);
}

Evaluator::Evaluator(const Network& network, const Platform& platform, CostModelParams params)
    : network_(&network), platform_(&platform), params_(params) {
    if (params_.noise_stddev < 0.0)
        throw ConfigError("noise_stddev must be >= 0");
    if (params_.measure_batches < 1)
        throw ConfigError("measure_batches must be >= 1");
    prefix_.resize(network.layers.size() + 1, 0);
    for (std::size_t i = 0; i < network.layers.size(); ++i)
        prefix_[i + 1] = prefix_[i] + network.layers[i].weight;
    scores_.reserve(platform.eps.size());
    for (const auto& ep : platform.eps) scores_.emplace_back(ep.id, perf_score(ep));
    std::sort(scores_.begin(), scores_.end());
}

double Evaluator::score_of(int ep_id) const {
    const auto it = std::lower_bound(scores_.begin(), scores_.end(), ep_id,
                                     [](const auto& p, int id) { return p.first < id; });
    if (it == scores_.end() || it->first != ep_id)
        throw std::logic_error("evaluator: config references EP " + std::to_string(ep_id) +
                               " outside the platform");
    return it->second;
}

std::uint64_t Evaluator::stage_weight(const PipelineConfig& config, std::size_t stage) const {
    const std::uint64_t begin = config.stage_begin(stage);
    return prefix_[begin + config.stage_sizes[stage]] - prefix_[begin];
}

Evaluation Evaluator::run(const PipelineConfig& config, std::mt19937_64* rng) const {
    const std::size_t n = config.n_stages();
    Evaluation ev;
    ev.stage_times.resize(n);
    std::uint64_t begin = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t w = prefix_[begin + config.stage_sizes[i]] - prefix_[begin];
        begin += config.stage_sizes[i];
        const double latency = i == 0 ? 0.0 : platform_->inter_ep_latency;
        double t = static_cast<double>(w) / score_of(config.ep_assignment[i]) + latency;
        if (rng != nullptr && params_.noise_stddev > 0.0)
            t *= noise_factor(params_.noise_stddev, *rng);
        ev.stage_times[i] = t;
    }
    const auto it = std::max_element(ev.stage_times.begin(), ev.stage_times.end());
    ev.slowest = static_cast<std::size_t>(it - ev.stage_times.begin());
    ev.throughput = 1.0 / *it;
    ev.eval_cost = *it * static_cast<double>(params_.measure_batches);
    return ev;
}

Evaluation Evaluator::operator()(const PipelineConfig& config) const {
    auto violations = validate(config, *network_, *platform_);
    if (!violations.empty()) throw InvalidConfig(std::move(violations));
    return run(config, nullptr);
}

Evaluation Evaluator::operator()(const PipelineConfig& config, std::mt19937_64& noise_rng) const {
    auto violations = validate(config, *network_, *platform_);
    if (!violations.empty()) throw InvalidConfig(std::move(violations));
    return run(config, &noise_rng);
}

double Evaluator::throughput_only(const PipelineConfig& config) const {
    double max_t = 0.0;
    std::uint64_t begin = 0;
    const std::size_t n = config.n_stages();
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t w = prefix_[begin + config.stage_sizes[i]] - prefix_[begin];
        begin += config.stage_sizes[i];
        const double latency = i == 0 ? 0.0 : platform_->inter_ep_latency;
        max_t = std::max(max_t, static_cast<double>(w) / score_of(config.ep_assignment[i]) + latency);
    }
    return 1.0 / max_t;
}

Evaluation evaluate(const PipelineConfig& config, const Network& network,
                    const Platform& platform, const CostModelParams& params) {
    return Evaluator(network, platform, params)(config);
}

}  // namespace shisha
