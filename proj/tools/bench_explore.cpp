// Compares the serial exhaustive-search reference against the chunked OpenMP
// kernel on growing slices of the SynthNet-18 / 8-EP design space. The serial
// reference keeps the full per-evaluation trace (that is its job in tests),
// so the kernel is also timed at one thread to isolate the threading gain.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "shisha/baselines.hpp"
#include "shisha/evaluator.hpp"
#include "shisha/harness.hpp"
#include "shisha/model.hpp"
#include "shisha/pipeline.hpp"
#include "shisha/platform.hpp"

namespace {

template <typename F>
double time_of(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    std::string data_dir = "data";
    std::uint32_t n_max = 4;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--data-dir" && i + 1 < argc) data_dir = argv[++i];
        else if (arg == "--n-max" && i + 1 < argc)
            n_max = static_cast<std::uint32_t>(std::stoul(argv[++i]));
        else {
            std::cerr << "usage: bench_explore [--data-dir DIR] [--n-max N]\n";
            return 1;
        }
    }

    const shisha::Network net =
        shisha::load_network_file(data_dir + "/networks/synthnet18.json");
    const shisha::Platform plat =
        shisha::load_platform_file(data_dir + "/platforms/c2x2_8ep.json");
    const shisha::Evaluator evaluator(net, plat);

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("threads: %d\n", threads);
    std::printf("%-10s %12s %12s %12s %12s %9s %6s\n", "space", "configs", "reference[s]",
                "kernel@1[s]", "kernel[s]", "speedup", "match");

    for (std::uint32_t n = 2; n <= n_max; ++n) {
        const auto space = shisha::make_design_space(
            static_cast<std::uint32_t>(net.layer_count()),
            static_cast<std::uint32_t>(plat.ep_count()), 1, n);
        const auto size = shisha::design_space_size_u64(space);
        if (!size) break;

        shisha::ExploreResult serial, par1, parN;
        const double t_ref =
            time_of([&] { serial = shisha::exhaustive_search(evaluator, space, *size); });

#ifdef _OPENMP
        omp_set_num_threads(1);
#endif
        const double t_par1 = time_of(
            [&] { par1 = shisha::exhaustive_search_parallel(evaluator, space, *size); });
#ifdef _OPENMP
        omp_set_num_threads(threads);
#endif
        const double t_parN = time_of(
            [&] { parN = shisha::exhaustive_search_parallel(evaluator, space, *size); });

        const bool match = serial.best == parN.best && serial.best == par1.best &&
                           serial.best_throughput == parN.best_throughput &&
                           serial.trace.size() == *size;
        std::printf("N in [1,%u] %12llu %12.3f %12.3f %12.3f %8.2fx %6s\n", n,
                    static_cast<unsigned long long>(*size), t_ref, t_par1, t_parN,
                    t_par1 / t_parN, match ? "yes" : "NO");
        if (!match) return 2;
    }
    return 0;
}
