#include "shisha/platform.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "shisha/util.hpp"

namespace shisha {

namespace {
constexpr double kDefaultInterEpLatency = 20.0;  // ~20ns in the nominal time scale
}

const ExecutionPlace& Platform::ep_by_id(int id) const {
    for (const auto& ep : eps)
        if (ep.id == id) return ep;
    throw std::out_of_range("no EP with id " + std::to_string(id));
}

bool Platform::has_ep(int id) const {
    return std::any_of(eps.begin(), eps.end(), [id](const auto& ep) { return ep.id == id; });
}

std::vector<int> rank_eps(const Platform& platform) {
    std::vector<const ExecutionPlace*> order;
    order.reserve(platform.eps.size());
    for (const auto& ep : platform.eps) order.push_back(&ep);
    std::sort(order.begin(), order.end(), [](const ExecutionPlace* a, const ExecutionPlace* b) {
        const double sa = perf_score(*a), sb = perf_score(*b);
        if (sa != sb) return sa > sb;
        if (a->mem_class != b->mem_class) return a->mem_class == MemClass::Fast;
        return a->id < b->id;
    });
    std::vector<int> ids;
    ids.reserve(order.size());
    for (const auto* ep : order) ids.push_back(ep->id);
    return ids;
}

bool is_builtin_config_name(std::string_view name) {
    return name.size() == 2 && name[0] == 'C' && name[1] >= '1' && name[1] <= '6';
}

Platform builtin_config(std::string_view name, double fast_speed, double slow_speed) {
    if (fast_speed <= 0.0 || slow_speed <= 0.0)
        throw ConfigError("builtin_config: speeds must be > 0");

    struct Group { int count; int cores; };
    Group fast{}, slow{};
    if (name == "C1")      { fast = {1, 8}; slow = {1, 8}; }
    else if (name == "C2") { fast = {2, 8}; slow = {2, 8}; }
    else if (name == "C3") { fast = {4, 4}; slow = {2, 8}; }
    else if (name == "C4") { fast = {2, 8}; slow = {4, 4}; }
    else if (name == "C5") { fast = {4, 4}; slow = {4, 4}; }
    else if (name == "C6") { fast = {8, 4}; slow = {0, 0}; }
    else throw ConfigError("unknown built-in platform '" + std::string(name) + "' (expected C1..C6)");

    Platform p;
    p.name = std::string(name);
    p.inter_ep_latency = kDefaultInterEpLatency;
    int id = 0;
    for (int i = 0; i < fast.count; ++i, ++id)
        p.eps.push_back({id, fast.cores, fast_speed, MemClass::Fast, id});
    for (int i = 0; i < slow.count; ++i, ++id)
        p.eps.push_back({id, slow.cores, slow_speed, MemClass::Slow, id});
    return p;
}

std::string_view mem_class_name(MemClass m) {
    return m == MemClass::Fast ? "FAST" : "SLOW";
}

Platform load_platform(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("platform file: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("platform file: top level must be an object");

    Platform p;
    p.name = j.value("name", "");
    p.inter_ep_latency = j.value("inter_ep_latency", 0.0);
    if (p.inter_ep_latency < 0.0)
        throw ParseError("platform file: inter_ep_latency must be >= 0");
    if (!j.contains("eps") || !j["eps"].is_array() || j["eps"].empty())
        throw ParseError("platform file: needs a non-empty 'eps' array");

    std::unordered_set<int> seen;
    int position = 0;
    for (const auto& je : j["eps"]) {
        const std::string where = "eps[" + std::to_string(position) + "]";
        ExecutionPlace ep;
        if (!je.contains("id") || !je["id"].is_number_integer())
            throw ParseError(where + ": id must be an integer");
        ep.id = je["id"].get<int>();
        if (!seen.insert(ep.id).second)
            throw ParseError(where + ": duplicate EP id " + std::to_string(ep.id));
        ep.cores = je.value("cores", 0);
        if (ep.cores < 1) throw ParseError(where + ": cores must be >= 1");
        ep.speed = je.value("speed", 0.0);
        if (!(ep.speed > 0.0)) throw ParseError(where + ": speed must be > 0");
        const std::string mem = je.value("mem_class", "");
        if (mem == "FAST") ep.mem_class = MemClass::Fast;
        else if (mem == "SLOW") ep.mem_class = MemClass::Slow;
        else throw ParseError(where + ": mem_class must be \"FAST\" or \"SLOW\"");
        ep.position = je.value("position", position);
        p.eps.push_back(ep);
        ++position;
    }
    return p;
}

Platform load_platform_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open platform file: " + path);
    return load_platform(in);
}

void save_platform(const Platform& p, std::ostream& out) {
    nlohmann::json j;
    j["name"] = p.name;
    j["inter_ep_latency"] = p.inter_ep_latency;
    auto& eps = j["eps"] = nlohmann::json::array();
    for (const auto& ep : p.eps) {
        eps.push_back({{"id", ep.id},
                       {"cores", ep.cores},
                       {"speed", ep.speed},
                       {"mem_class", std::string(mem_class_name(ep.mem_class))},
                       {"position", ep.position}});
    }
    out << j.dump(2) << '\n';
}

}  // namespace shisha
