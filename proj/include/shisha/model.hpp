#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace shisha {

// Convolution dimensions of one layer: input tensor height/width/depth,
// kernel height/width, filter count. All fields >= 1.
struct LayerDims {
    std::uint64_t h = 1;
    std::uint64_t w = 1;
    std::uint64_t c = 1;
    std::uint64_t r = 1;
    std::uint64_t s = 1;
    std::uint64_t k = 1;

    bool operator==(const LayerDims&) const = default;
};

struct Layer {
    std::size_t id = 0;                 // zero-based position in the network
    std::string name;                   // optional label
    std::optional<LayerDims> dims;      // absent for direct-weight layers
    std::uint64_t weight = 1;           // computational work units, >= 1

    bool operator==(const Layer&) const = default;
};

// A CNN as an ordered layer list. Immutable after construction; safe to share
// across threads by reference.
struct Network {
    std::string name;
    std::vector<Layer> layers;

    std::size_t layer_count() const { return layers.size(); }

    bool operator==(const Network&) const = default;
};

// Computational weight of a layer: h*w*c*r*s*k, exact 64-bit product.
// Throws std::overflow_error if the product exceeds 2^64-1.
std::uint64_t layer_weight(const LayerDims& dims);

// Sum of all layer weights, overflow-checked.
std::uint64_t total_weight(const Network& network);

// Network file format: JSON
//   { "name": str, "layers": [ { "name"?: str,
//                                "dims"?: {"h","w","c","r","s","k": int},
//                                "weight"?: int } ] }
// Exactly one of dims/weight is required per layer; if both are present they
// must agree. Layer ids are assigned from file order.
Network load_network(std::istream& in);
Network load_network_file(const std::string& path);
void save_network(const Network& network, std::ostream& out);

}  // namespace shisha
