#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shisha/baselines.hpp"
#include "shisha/harness.hpp"
#include "shisha/model.hpp"
#include "shisha/pipeline.hpp"
#include "shisha/platform.hpp"
#include "shisha/trace.hpp"
#include "shisha/tuner.hpp"
#include "shisha/util.hpp"

namespace {

struct PlatformArgs {
    std::string ref;
    double fast_speed = 3.0;
    double slow_speed = 1.0;

    shisha::Platform load() const {
        return shisha::resolve_platform(ref, fast_speed, slow_speed);
    }
};

void add_platform_options(CLI::App* cmd, PlatformArgs& args, bool positional = true) {
    cmd->add_option(positional ? "platform" : "--platform", args.ref,
                    "platform JSON file or built-in name C1..C6")
        ->required();
    cmd->add_option("--fast-speed", args.fast_speed, "per-core speed of FAST EPs (built-ins)");
    cmd->add_option("--slow-speed", args.slow_speed, "per-core speed of SLOW EPs (built-ins)");
}

nlohmann::json tune_result_json(const shisha::TuneResult& r) {
    return {{"best_config", shisha::config_to_json(r.best)},
            {"best_throughput", r.best_throughput},
            {"evaluations", r.trace.size()},
            {"cum_eval_cost", r.trace.back().cum_eval_cost}};
}

int run(int argc, char** argv) {
    CLI::App app{"pipeline scheduling toolkit: seed generation, online tuning and "
                 "reference explorers for CNN pipelines on heterogeneous platforms"};
    app.require_subcommand(1);

    // weight <network>
    std::string network_file;
    auto* weight_cmd = app.add_subcommand("weight", "print per-layer weights and the total");
    weight_cmd->add_option("network", network_file, "network JSON file")->required();

    // seed <network> <platform> --stages N --heuristic Hk
    PlatformArgs seed_platform;
    std::optional<std::uint32_t> seed_stages;
    std::string seed_heuristic = "H3";
    std::uint64_t seed_rng = 0;
    auto* seed_cmd = app.add_subcommand("seed", "generate the starting configuration");
    seed_cmd->add_option("network", network_file, "network JSON file")->required();
    add_platform_options(seed_cmd, seed_platform);
    seed_cmd->add_option("--stages", seed_stages, "stage count (default min(EPs, layers))");
    seed_cmd->add_option("--heuristic", seed_heuristic, "H1..H6 (default H3)");
    seed_cmd->add_option("--rng-seed", seed_rng, "seed for the random assignment heuristics");

    // tune <network> <platform> [--stages N] [--heuristic Hk] [--alpha A] ...
    PlatformArgs tune_platform;
    std::optional<std::uint32_t> tune_stages;
    std::string tune_heuristic = "H3";
    std::uint32_t tune_alpha = 10;
    std::uint64_t tune_rng = 0;
    std::string tune_trace_file;
    auto* tune_cmd = app.add_subcommand("tune", "run seed generation plus online tuning");
    tune_cmd->add_option("network", network_file, "network JSON file")->required();
    add_platform_options(tune_cmd, tune_platform);
    tune_cmd->add_option("--stages", tune_stages, "stage count (default min(EPs, layers))");
    tune_cmd->add_option("--heuristic", tune_heuristic, "H1..H6 (default H3)");
    tune_cmd->add_option("--alpha", tune_alpha, "non-improvement budget (default 10)");
    tune_cmd->add_option("--rng-seed", tune_rng, "seed for the random assignment heuristics");
    tune_cmd->add_option("--trace", tune_trace_file, "write the evaluation trace CSV here");

    // explore --algo ...
    PlatformArgs explore_platform;
    std::string explore_algo;
    std::string explore_start = "random";
    std::string explore_heuristic = "H3";
    std::uint32_t explore_alpha = 10;
    std::uint64_t explore_budget = 1000;
    std::optional<std::uint32_t> explore_proximity;
    double explore_cooling = 0.95;
    std::optional<double> explore_temp;
    std::uint64_t explore_rng = 0;
    std::uint32_t explore_runs = 1;
    std::optional<std::uint32_t> explore_nmin, explore_nmax;
    std::string explore_trace_file;
    bool explore_no_replacement = false;
    auto* explore_cmd = app.add_subcommand("explore", "run one exploration algorithm");
    explore_cmd->add_option("--algo", explore_algo, "es|hc|sa|rw|shisha")->required();
    explore_cmd->add_option("--network", network_file, "network JSON file")->required();
    add_platform_options(explore_cmd, explore_platform, /*positional=*/false);
    explore_cmd->add_option("--start", explore_start, "hc/sa start: random|seed");
    explore_cmd->add_option("--heuristic", explore_heuristic, "H1..H6 for shisha and seeded starts");
    explore_cmd->add_option("--alpha", explore_alpha, "shisha non-improvement budget");
    explore_cmd->add_option("--budget", explore_budget, "max evaluations (default 1000)");
    explore_cmd->add_option("--hc-proximity", explore_proximity,
                            "max boundary shift (default: layer count)");
    explore_cmd->add_option("--sa-cooling", explore_cooling, "annealing cooling factor");
    explore_cmd->add_option("--sa-initial-temp", explore_temp,
                            "annealing start temperature (default: start throughput)");
    explore_cmd->add_option("--rng-seed", explore_rng, "base RNG seed");
    explore_cmd->add_option("--runs", explore_runs, "repetitions with consecutive seeds");
    explore_cmd->add_option("--n-min", explore_nmin, "min stage count of the search space");
    explore_cmd->add_option("--n-max", explore_nmax, "max stage count of the search space");
    explore_cmd->add_option("--trace", explore_trace_file, "write the best run's trace CSV here");
    explore_cmd->add_flag("--no-replacement", explore_no_replacement,
                          "rw: sample ranks without replacement");

    // compare --preset name | --spec file
    std::string compare_preset, compare_spec_file, compare_out_dir, compare_network_override;
    std::string compare_data_dir = "data";
    auto* compare_cmd = app.add_subcommand("compare", "run a multi-algorithm experiment");
    compare_cmd->add_option("--preset", compare_preset, "paper-fig4 | paper-fig5 | paper-fig9");
    compare_cmd->add_option("--spec", compare_spec_file, "experiment spec JSON file");
    compare_cmd->add_option("--out-dir", compare_out_dir, "output directory override");
    compare_cmd->add_option("--network", compare_network_override, "network file override");
    compare_cmd->add_option("--data-dir", compare_data_dir, "directory with shipped data files");

    // space <network> <platform>
    PlatformArgs space_platform;
    std::optional<std::uint32_t> space_nmin, space_nmax;
    auto* space_cmd = app.add_subcommand("space", "print the design-space size");
    space_cmd->add_option("network", network_file, "network JSON file")->required();
    add_platform_options(space_cmd, space_platform);
    space_cmd->add_option("--n-min", space_nmin, "min stage count (default 1)");
    space_cmd->add_option("--n-max", space_nmax, "max stage count (default min(EPs, layers))");

    CLI11_PARSE(app, argc, argv);

    if (weight_cmd->parsed()) {
        const shisha::Network net = shisha::load_network_file(network_file);
        std::cout << "network: " << net.name << " (" << net.layer_count() << " layers)\n";
        for (const auto& l : net.layers) {
            std::cout << "  " << l.id;
            if (!l.name.empty()) std::cout << " " << l.name;
            std::cout << ": " << l.weight << '\n';
        }
        std::cout << "total_weight: " << shisha::total_weight(net) << '\n';
        return 0;
    }

    if (seed_cmd->parsed()) {
        const shisha::Network net = shisha::load_network_file(network_file);
        const shisha::Platform plat = seed_platform.load();
        const auto h = shisha::heuristic_by_name(seed_heuristic);
        const auto n = seed_stages.value_or(static_cast<std::uint32_t>(
            std::min(plat.ep_count(), net.layer_count())));
        const auto seed = shisha::generate_seed(net, plat, n, h.assignment, seed_rng);
        nlohmann::json out = {{"config", shisha::config_to_json(seed.config)},
                              {"merge_log", seed.merge_log},
                              {"heuristic", seed_heuristic}};
        std::cout << out.dump(2) << '\n';
        return 0;
    }

    if (tune_cmd->parsed()) {
        const shisha::Network net = shisha::load_network_file(network_file);
        const shisha::Platform plat = tune_platform.load();
        const auto h = shisha::heuristic_by_name(tune_heuristic);
        const auto r = shisha::run_shisha(net, plat, h, {tune_alpha, tune_rng}, tune_stages);
        if (!tune_trace_file.empty()) shisha::write_trace_csv_file(r.trace, tune_trace_file);
        nlohmann::json out = tune_result_json(r);
        out["heuristic"] = tune_heuristic;
        out["alpha"] = tune_alpha;
        std::cout << out.dump(2) << '\n';
        return 0;
    }

    if (explore_cmd->parsed()) {
        shisha::ExperimentCell cell;
        cell.algo = explore_algo;
        if (explore_algo == "shisha" || explore_algo == "hc" || explore_algo == "sa")
            cell.heuristic = explore_heuristic;
        cell.alpha = explore_alpha;
        cell.start = explore_start == "seed" ? shisha::StartMode::ShishaSeed
                                             : shisha::StartMode::Random;
        cell.budget = explore_budget;
        cell.hc_proximity = explore_proximity;
        cell.sa_cooling = explore_cooling;
        cell.sa_initial_temp = explore_temp;
        cell.rng_seed = explore_rng;
        cell.runs = explore_runs;
        cell.rw_with_replacement = !explore_no_replacement;

        shisha::ExperimentSpec spec;
        spec.name = "explore_" + explore_algo;
        spec.network_file = network_file;
        spec.platform_ref = explore_platform.ref;
        spec.fast_speed = explore_platform.fast_speed;
        spec.slow_speed = explore_platform.slow_speed;
        if (explore_nmin || explore_nmax) {
            const shisha::Network net = shisha::load_network_file(network_file);
            const shisha::Platform plat = explore_platform.load();
            const auto cap = static_cast<std::uint32_t>(
                std::min(plat.ep_count(), net.layer_count()));
            spec.n_range = {explore_nmin.value_or(1), explore_nmax.value_or(cap)};
        }
        spec.cells = {cell};
        spec.out_dir = "results/explore";
        const nlohmann::json report = shisha::run_experiment(spec);
        if (!explore_trace_file.empty()) {
            const std::string src = std::string("results/explore/") +
                                    report["cells"][0]["trace_file"].get<std::string>();
            shisha::write_trace_csv_file(shisha::parse_trace_csv_file(src), explore_trace_file);
        }
        std::cout << report["cells"][0].dump(2) << '\n';
        return 0;
    }

    if (compare_cmd->parsed()) {
        if (compare_preset.empty() == compare_spec_file.empty())
            throw shisha::ConfigError("compare needs exactly one of --preset / --spec");

        if (compare_preset == "paper-fig9") {
            const std::string net_file = compare_network_override.empty()
                                             ? compare_data_dir + "/networks/yolov3_52.json"
                                             : compare_network_override;
            const shisha::Network net = shisha::load_network_file(net_file);
            const shisha::Platform layout =
                shisha::load_platform_file(compare_data_dir + "/platforms/c2x2_8ep.json");
            const auto cells = shisha::alpha_sweep(net, layout, 3.0, {3, 6, 12},
                                                   {1, 2, 5, 10, 25, 50, 100},
                                                   shisha::heuristic_by_name("H3"));
            const nlohmann::json report = shisha::alpha_sweep_report(cells);
            const std::string out_dir =
                compare_out_dir.empty() ? "results/paper-fig9" : compare_out_dir;
            std::filesystem::create_directories(out_dir);
            std::ofstream out(out_dir + "/report.json");
            out << report.dump(2) << '\n';
            std::cout << report.dump(2) << '\n';
            return 0;
        }

        shisha::ExperimentSpec spec = compare_preset.empty()
                                          ? shisha::load_experiment_file(compare_spec_file)
                                          : shisha::preset_experiment(compare_preset,
                                                                      compare_data_dir);
        if (!compare_out_dir.empty()) spec.out_dir = compare_out_dir;
        if (!compare_network_override.empty()) spec.network_file = compare_network_override;
        const nlohmann::json report = shisha::run_experiment(spec);
        std::cout << report.dump(2) << '\n';
        return 0;
    }

    if (space_cmd->parsed()) {
        const shisha::Network net = shisha::load_network_file(network_file);
        const shisha::Platform plat = space_platform.load();
        std::optional<std::pair<std::uint32_t, std::uint32_t>> range;
        if (space_nmin || space_nmax) {
            const auto cap = static_cast<std::uint32_t>(
                std::min(plat.ep_count(), net.layer_count()));
            range = {space_nmin.value_or(1), space_nmax.value_or(cap)};
        }
        std::cout << shisha::space_size(net, plat, range).str() << '\n';
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const shisha::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
}
