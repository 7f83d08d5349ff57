#include "shisha/model.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "shisha/util.hpp"

namespace shisha {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out))
        throw std::overflow_error(std::string(what) + ": 64-bit overflow");
    return out;
}

void require_positive(std::uint64_t v, const std::string& field) {
    if (v == 0) throw ParseError(field + " must be >= 1");
}

}  // namespace

std::uint64_t layer_weight(const LayerDims& d) {
    for (auto [v, n] : {std::pair{d.h, "h"}, {d.w, "w"}, {d.c, "c"},
                        {d.r, "r"}, {d.s, "s"}, {d.k, "k"}}) {
        if (v == 0) throw std::invalid_argument(std::string("layer_weight: dims.") + n + " must be >= 1");
    }
    std::uint64_t w = d.h;
    w = checked_mul(w, d.w, "layer_weight");
    w = checked_mul(w, d.c, "layer_weight");
    w = checked_mul(w, d.r, "layer_weight");
    w = checked_mul(w, d.s, "layer_weight");
    w = checked_mul(w, d.k, "layer_weight");
    return w;
}

std::uint64_t total_weight(const Network& net) {
    std::uint64_t sum = 0;
    for (const Layer& l : net.layers) {
        if (__builtin_add_overflow(sum, l.weight, &sum))
            throw std::overflow_error("total_weight: 64-bit overflow");
    }
    return sum;
}

Network load_network(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("network file: ") + e.what());
    }

    Network net;
    if (!j.is_object()) throw ParseError("network file: top level must be an object");
    net.name = j.value("name", "");
    if (!j.contains("layers") || !j["layers"].is_array())
        throw ParseError("network file: missing 'layers' array");
    const auto& layers = j["layers"];
    if (layers.empty()) throw ParseError("network file: 'layers' must not be empty");

    net.layers.reserve(layers.size());
    std::size_t idx = 0;
    for (const auto& jl : layers) {
        const std::string where = "layer " + std::to_string(idx);
        if (!jl.is_object()) throw ParseError(where + ": must be an object");
        Layer layer;
        layer.id = idx;
        layer.name = jl.value("name", "");

        const bool has_dims = jl.contains("dims");
        const bool has_weight = jl.contains("weight");
        if (!has_dims && !has_weight)
            throw ParseError(where + ": needs 'dims' or 'weight'");

        if (has_dims) {
            const auto& jd = jl["dims"];
            LayerDims d;
            for (auto [field, dst] : {std::pair{"h", &d.h}, {"w", &d.w}, {"c", &d.c},
                                      {"r", &d.r}, {"s", &d.s}, {"k", &d.k}}) {
                if (!jd.contains(field) || !jd[field].is_number_integer())
                    throw ParseError(where + ": dims." + field + " must be an integer");
                const auto v = jd[field].get<std::int64_t>();
                if (v < 1) throw ParseError(where + ": dims." + std::string(field) + " must be >= 1");
                *dst = static_cast<std::uint64_t>(v);
            }
            layer.dims = d;
            try {
                layer.weight = layer_weight(d);
            } catch (const std::overflow_error&) {
                throw ParseError(where + ": weight product overflows 64 bits");
            }
        }
        if (has_weight) {
            if (!jl["weight"].is_number_integer())
                throw ParseError(where + ": weight must be an integer");
            const auto v = jl["weight"].get<std::int64_t>();
            require_positive(v > 0 ? static_cast<std::uint64_t>(v) : 0, where + ": weight");
            const auto w = static_cast<std::uint64_t>(v);
            if (has_dims && w != layer.weight)
                throw ParseError(where + ": explicit weight " + std::to_string(w) +
                                 " disagrees with dims product " + std::to_string(layer.weight));
            layer.weight = w;
        }
        net.layers.push_back(std::move(layer));
        ++idx;
    }
    return net;
}

Network load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open network file: " + path);
    return load_network(in);
}

void save_network(const Network& net, std::ostream& out) {
    nlohmann::json j;
    j["name"] = net.name;
    auto& layers = j["layers"] = nlohmann::json::array();
    for (const Layer& l : net.layers) {
        nlohmann::json jl;
        if (!l.name.empty()) jl["name"] = l.name;
        if (l.dims) {
            const LayerDims& d = *l.dims;
            jl["dims"] = {{"h", d.h}, {"w", d.w}, {"c", d.c},
                          {"r", d.r}, {"s", d.s}, {"k", d.k}};
        }
        jl["weight"] = l.weight;
        layers.push_back(std::move(jl));
    }
    out << j.dump(2) << '\n';
}

}  // namespace shisha
