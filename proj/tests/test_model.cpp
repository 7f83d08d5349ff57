#include <doctest.h>

#include <random>
#include <sstream>

#include "shisha/model.hpp"
#include "shisha/util.hpp"

#include "support.hpp"

using namespace shisha;

namespace {

// independent oracle: fold the six fields through 128-bit arithmetic
bool oracle_weight(const LayerDims& d, std::uint64_t& out) {
    unsigned __int128 p = 1;
    for (std::uint64_t v : {d.h, d.w, d.c, d.r, d.s, d.k}) p *= v;
    if (p > std::numeric_limits<std::uint64_t>::max()) return false;
    out = static_cast<std::uint64_t>(p);
    return true;
}

}  // namespace

TEST_CASE("layer_weight matches the product definition") {
    CHECK(layer_weight({1, 1, 1, 1, 1, 1}) == 1);
    CHECK(layer_weight({4, 4, 2, 3, 3, 8}) == 2304);
    CHECK(layer_weight({2, 3, 1, 1, 1, 5}) == 30);
}

TEST_CASE("layer_weight agrees with the 128-bit fold oracle") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 1000; ++i) {
        LayerDims d{1 + uniform_u64(rng, 100), 1 + uniform_u64(rng, 100),
                    1 + uniform_u64(rng, 100), 1 + uniform_u64(rng, 100),
                    1 + uniform_u64(rng, 100), 1 + uniform_u64(rng, 100)};
        std::uint64_t expect = 0;
        REQUIRE(oracle_weight(d, expect));
        CHECK(layer_weight(d) == expect);
    }
}

TEST_CASE("layer_weight detects overflow instead of wrapping") {
    CHECK_THROWS_AS(layer_weight({65536, 65536, 65536, 65536, 1, 1}), std::overflow_error);
    CHECK_THROWS_AS(layer_weight({1u << 31, 1u << 31, 4, 1, 1, 1}), std::overflow_error);
}

TEST_CASE("layer_weight is invariant under h<->w and r<->s swaps") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        LayerDims d{1 + uniform_u64(rng, 40), 1 + uniform_u64(rng, 40),
                    1 + uniform_u64(rng, 40), 1 + uniform_u64(rng, 40),
                    1 + uniform_u64(rng, 40), 1 + uniform_u64(rng, 40)};
        LayerDims swapped{d.w, d.h, d.c, d.s, d.r, d.k};
        CHECK(layer_weight(d) == layer_weight(swapped));
        const std::uint64_t maxdim = std::max({d.h, d.w, d.c, d.r, d.s, d.k});
        CHECK(layer_weight(d) >= maxdim);
    }
}

TEST_CASE("total_weight sums layer weights") {
    CHECK(total_weight(testsupport::weights_network({5, 1, 2, 8})) == 16);
    CHECK(total_weight(testsupport::weights_network({7})) == 7);
    CHECK(total_weight(testsupport::weights_network({1, 30})) == 31);
    const auto huge = testsupport::weights_network(
        {std::numeric_limits<std::uint64_t>::max(), 2});
    CHECK_THROWS_AS(total_weight(huge), std::overflow_error);
}

TEST_CASE("load_network computes weights from dims") {
    std::istringstream in(R"({"name":"t","layers":[
        {"dims":{"h":1,"w":1,"c":1,"r":1,"s":1,"k":1}},
        {"dims":{"h":2,"w":3,"c":1,"r":1,"s":1,"k":5}}]})");
    const Network net = load_network(in);
    REQUIRE(net.layer_count() == 2);
    CHECK(net.layers[0].weight == 1);
    CHECK(net.layers[1].weight == 30);
    CHECK(net.layers[0].id == 0);
    CHECK(net.layers[1].id == 1);
}

TEST_CASE("load_network passes explicit weights through") {
    std::istringstream in(R"({"name":"t","layers":[
        {"weight":5},{"weight":1},{"weight":2},{"weight":8}]})");
    const Network net = load_network(in);
    REQUIRE(net.layer_count() == 4);
    CHECK(net.layers[0].weight == 5);
    CHECK(net.layers[3].weight == 8);
}

TEST_CASE("load_network rejects bad input") {
    SUBCASE("zero dimension") {
        std::istringstream in(R"({"layers":[{"dims":{"h":1,"w":1,"c":0,"r":1,"s":1,"k":1}}]})");
        CHECK_THROWS_WITH_AS(load_network(in), doctest::Contains("dims.c"), ParseError);
    }
    SUBCASE("empty layer list") {
        std::istringstream in(R"({"layers":[]})");
        CHECK_THROWS_AS(load_network(in), ParseError);
    }
    SUBCASE("neither dims nor weight") {
        std::istringstream in(R"({"layers":[{"name":"x"}]})");
        CHECK_THROWS_WITH_AS(load_network(in), doctest::Contains("layer 0"), ParseError);
    }
    SUBCASE("dims and weight disagree") {
        std::istringstream in(
            R"({"layers":[{"dims":{"h":2,"w":3,"c":1,"r":1,"s":1,"k":5},"weight":31}]})");
        CHECK_THROWS_AS(load_network(in), ParseError);
    }
    SUBCASE("dims and weight agreeing is fine") {
        std::istringstream in(
            R"({"layers":[{"dims":{"h":2,"w":3,"c":1,"r":1,"s":1,"k":5},"weight":30}]})");
        CHECK(load_network(in).layers[0].weight == 30);
    }
    SUBCASE("not json at all") {
        std::istringstream in("pipeline");
        CHECK_THROWS_AS(load_network(in), ParseError);
    }
}

TEST_CASE("save/load round-trip is the identity") {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 50; ++iter) {
        Network net;
        net.name = "rt" + std::to_string(iter);
        const auto L = 1 + uniform_u64(rng, 12);
        for (std::uint64_t i = 0; i < L; ++i) {
            Layer l;
            l.id = i;
            if (uniform_u64(rng, 2) == 0) l.name = "layer" + std::to_string(i);
            if (uniform_u64(rng, 2) == 0) {
                l.dims = LayerDims{1 + uniform_u64(rng, 50), 1 + uniform_u64(rng, 50),
                                   1 + uniform_u64(rng, 50), 1 + uniform_u64(rng, 7),
                                   1 + uniform_u64(rng, 7), 1 + uniform_u64(rng, 200)};
                l.weight = layer_weight(*l.dims);
            } else {
                l.weight = 1 + uniform_u64(rng, 1'000'000);
            }
            net.layers.push_back(std::move(l));
        }
        std::stringstream io;
        save_network(net, io);
        CHECK(load_network(io) == net);
    }
}
