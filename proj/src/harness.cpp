#include "shisha/harness.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>

#include "shisha/util.hpp"

namespace shisha {

namespace {

const std::set<std::string> kAlgos = {"shisha", "es", "hc", "sa", "rw"};
constexpr std::uint64_t kDefaultEsBudget = 10'000'000;
// below this the serial reference runs and keeps a full trace; larger spaces
// go through the chunked OpenMP kernel with a winner-only trace
constexpr std::uint64_t kSerialEsLimit = std::uint64_t{1} << 18;

std::string two_digits(std::size_t v) {
    std::string s = std::to_string(v);
    return s.size() < 2 ? "0" + s : s;
}

std::string cell_label(std::size_t index, const ExperimentCell& cell) {
    std::string label = "cell" + two_digits(index) + "_" + cell.algo;
    if (cell.heuristic) label += "_" + *cell.heuristic;
    if (cell.algo == "hc" || cell.algo == "sa")
        label += cell.start == StartMode::ShishaSeed ? "_seed" : "_rand";
    return label;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct CellOutcome {
    PipelineConfig best;
    double best_throughput = 0.0;
    std::uint64_t evaluations = 0;
    double cum_eval_cost = 0.0;
    Trace trace;
};

CellOutcome from_explore(ExploreResult&& r) {
    return {std::move(r.best), r.best_throughput, r.evaluations, r.cum_eval_cost,
            std::move(r.trace)};
}

CellOutcome run_cell_once(const ExperimentCell& cell, const Network& network,
                          const Platform& platform, const DesignSpace& space,
                          std::optional<std::uint32_t> n_stages, std::uint64_t rng_seed) {
    const Evaluator evaluator(network, platform);
    const Heuristic heuristic = heuristic_by_name(cell.heuristic.value_or("H3"));

    if (cell.algo == "shisha") {
        TuneResult r = run_shisha(network, platform, heuristic, {cell.alpha, rng_seed}, n_stages);
        CellOutcome out;
        out.best = std::move(r.best);
        out.best_throughput = r.best_throughput;
        out.evaluations = r.trace.size();
        out.cum_eval_cost = r.trace.back().cum_eval_cost;
        out.trace = std::move(r.trace);
        return out;
    }
    if (cell.algo == "es") {
        const BigCount size = design_space_size(space);
        if (size > cell.budget)
            throw ConfigError("exhaustive search needs " + size.str() +
                              " evaluations, budget is " + std::to_string(cell.budget));
        if (size <= kSerialEsLimit)
            return from_explore(exhaustive_search(evaluator, space, cell.budget));
        return from_explore(exhaustive_search_parallel(evaluator, space, cell.budget));
    }

    ExplorerParams params;
    params.start = cell.start;
    params.rng_seed = rng_seed;
    params.budget = cell.budget;
    params.hc_proximity =
        cell.hc_proximity.value_or(static_cast<std::uint32_t>(network.layer_count()));
    params.sa_cooling = cell.sa_cooling;
    params.sa_initial_temp = cell.sa_initial_temp;
    params.space = space;
    params.seed_assignment = heuristic.assignment;
    params.rw_with_replacement = cell.rw_with_replacement;

    if (cell.algo == "hc") return from_explore(hill_climb(params, evaluator));
    if (cell.algo == "sa") return from_explore(simulated_annealing(params, evaluator));
    if (cell.algo == "rw") return from_explore(random_walk(params, evaluator));
    throw ConfigError("unknown algorithm '" + cell.algo + "'");
}

void check_cell(const ExperimentCell& cell) {
    if (kAlgos.count(cell.algo) == 0)
        throw ConfigError("unknown algorithm '" + cell.algo + "' (expected shisha|es|hc|sa|rw)");
    if (cell.heuristic) heuristic_by_name(*cell.heuristic);  // throws on bad names
    if (cell.runs < 1) throw ConfigError("cell runs must be >= 1");
    if (cell.alpha < 1) throw ConfigError("cell alpha must be >= 1");
}

}  // namespace

nlohmann::json config_to_json(const PipelineConfig& config) {
    return {{"stage_sizes", config.stage_sizes}, {"ep_assignment", config.ep_assignment}};
}

PipelineConfig config_from_json(const nlohmann::json& j) {
    PipelineConfig c;
    if (!j.contains("stage_sizes") || !j.contains("ep_assignment"))
        throw ParseError("config JSON needs 'stage_sizes' and 'ep_assignment'");
    c.stage_sizes = j["stage_sizes"].get<std::vector<std::uint32_t>>();
    c.ep_assignment = j["ep_assignment"].get<std::vector<int>>();
    return c;
}

Platform resolve_platform(const std::string& ref, double fast_speed, double slow_speed) {
    // any C<digit> is meant as a built-in name; C7..C9 get the clearer error
    if (ref.size() == 2 && ref[0] == 'C' && ref[1] >= '0' && ref[1] <= '9')
        return builtin_config(ref, fast_speed, slow_speed);
    return load_platform_file(ref);
}

ExperimentSpec parse_experiment(const nlohmann::json& j) {
    ExperimentSpec spec;
    if (!j.is_object()) throw ParseError("experiment file: top level must be an object");
    spec.name = j.value("name", "experiment");
    if (!j.contains("network")) throw ParseError("experiment file: missing 'network'");
    spec.network_file = j["network"].get<std::string>();
    if (!j.contains("platform")) throw ParseError("experiment file: missing 'platform'");
    spec.platform_ref = j["platform"].get<std::string>();
    spec.fast_speed = j.value("fast_speed", 3.0);
    spec.slow_speed = j.value("slow_speed", 1.0);
    if (j.contains("n_stages")) spec.n_stages = j["n_stages"].get<std::uint32_t>();
    if (j.contains("n_range")) {
        const auto& r = j["n_range"];
        if (!r.is_array() || r.size() != 2)
            throw ParseError("experiment file: n_range must be [lo, hi]");
        spec.n_range = {r[0].get<std::uint32_t>(), r[1].get<std::uint32_t>()};
    }
    spec.out_dir = j.value("out_dir", "results");

    if (!j.contains("cells") || !j["cells"].is_array() || j["cells"].empty())
        throw ConfigError("experiment file: needs a non-empty 'cells' array");
    for (const auto& jc : j["cells"]) {
        ExperimentCell cell;
        cell.algo = jc.value("algo", "");
        if (jc.contains("heuristic")) cell.heuristic = jc["heuristic"].get<std::string>();
        cell.alpha = jc.value("alpha", 10u);
        const std::string start = jc.value("start", "random");
        if (start == "random") cell.start = StartMode::Random;
        else if (start == "seed") cell.start = StartMode::ShishaSeed;
        else throw ConfigError("cell start must be 'random' or 'seed'");
        cell.budget = jc.value("budget", cell.algo == "es" ? kDefaultEsBudget : 1000ull);
        if (jc.contains("hc_proximity")) cell.hc_proximity = jc["hc_proximity"].get<std::uint32_t>();
        cell.sa_cooling = jc.value("sa_cooling", 0.95);
        if (jc.contains("sa_initial_temp")) cell.sa_initial_temp = jc["sa_initial_temp"].get<double>();
        cell.rng_seed = jc.value("rng_seed", 0ull);
        cell.runs = jc.value("runs", 1u);
        cell.rw_with_replacement = jc.value("rw_with_replacement", true);
        check_cell(cell);
        spec.cells.push_back(std::move(cell));
    }
    return spec;
}

ExperimentSpec load_experiment_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open experiment file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("experiment file: ") + e.what());
    }
    return parse_experiment(j);
}

nlohmann::json run_experiment(const ExperimentSpec& spec) {
    if (spec.cells.empty()) throw ConfigError("experiment has no cells");
    for (const auto& cell : spec.cells) check_cell(cell);

    const Network network = load_network_file(spec.network_file);
    const Platform platform = resolve_platform(spec.platform_ref, spec.fast_speed, spec.slow_speed);
    const auto L = static_cast<std::uint32_t>(network.layer_count());
    const auto E = static_cast<std::uint32_t>(platform.ep_count());
    const DesignSpace space = spec.n_range
                                  ? make_design_space(L, E, spec.n_range->first, spec.n_range->second)
                                  : full_design_space(L, E);
    const BigCount size = design_space_size(space);

    std::filesystem::create_directories(spec.out_dir);

    nlohmann::json report;
    report["name"] = spec.name;
    report["generated_at"] = utc_timestamp();
    report["network"] = {{"file", spec.network_file},
                         {"name", network.name},
                         {"layers", network.layer_count()},
                         {"total_weight", total_weight(network)}};
    report["platform"] = {{"ref", spec.platform_ref},
                          {"name", platform.name},
                          {"eps", platform.ep_count()},
                          {"inter_ep_latency", platform.inter_ep_latency}};
    report["n_range"] = {space.n_min, space.n_max};
    report["design_space_size"] = size.str();

    struct CellRun {
        CellOutcome best;
        std::vector<double> finals;
        std::vector<std::uint64_t> evals;
        std::uint64_t total_evals = 0;
        double total_cost = 0.0;
    };
    std::vector<CellRun> runs_by_cell(spec.cells.size());

    for (std::size_t i = 0; i < spec.cells.size(); ++i) {
        const ExperimentCell& cell = spec.cells[i];
        CellRun cr;
        std::vector<CellOutcome> outs(cell.runs);
#pragma omp parallel for schedule(dynamic) if (cell.runs > 1)
        for (std::int64_t r = 0; r < static_cast<std::int64_t>(cell.runs); ++r)
            outs[static_cast<std::size_t>(r)] = run_cell_once(
                cell, network, platform, space, spec.n_stages,
                cell.rng_seed + static_cast<std::uint64_t>(r));
        std::size_t best_idx = 0;
        for (std::size_t r = 0; r < outs.size(); ++r) {
            cr.finals.push_back(outs[r].best_throughput);
            cr.evals.push_back(outs[r].evaluations);
            cr.total_evals += outs[r].evaluations;
            cr.total_cost += outs[r].cum_eval_cost;
            if (outs[r].best_throughput > outs[best_idx].best_throughput) best_idx = r;
        }
        cr.best = std::move(outs[best_idx]);
        runs_by_cell[i] = std::move(cr);
    }

    // ES anchors the normalization when present
    std::optional<double> es_optimum;
    for (std::size_t i = 0; i < spec.cells.size(); ++i) {
        if (spec.cells[i].algo == "es") {
            es_optimum = runs_by_cell[i].best.best_throughput;
            break;
        }
    }
    if (es_optimum) report["es_optimum"] = *es_optimum;

    auto& cells_json = report["cells"] = nlohmann::json::array();
    for (std::size_t i = 0; i < spec.cells.size(); ++i) {
        const ExperimentCell& cell = spec.cells[i];
        const CellRun& cr = runs_by_cell[i];
        const std::string label = cell_label(i, cell);
        const std::string trace_file = label + ".csv";
        write_trace_csv_file(cr.best.trace,
                             (std::filesystem::path(spec.out_dir) / trace_file).string());

        nlohmann::json jc;
        jc["label"] = label;
        jc["algo"] = cell.algo;
        if (cell.heuristic) jc["heuristic"] = *cell.heuristic;
        if (cell.algo == "shisha") jc["alpha"] = cell.alpha;
        if (cell.algo == "hc" || cell.algo == "sa")
            jc["start"] = cell.start == StartMode::ShishaSeed ? "seed" : "random";
        jc["rng_seed"] = cell.rng_seed;
        jc["runs"] = cell.runs;
        jc["final_throughput"] = cr.best.best_throughput;
        if (es_optimum) jc["normalized_throughput"] = cr.best.best_throughput / *es_optimum;
        jc["evaluations"] = cr.total_evals;
        jc["explored_fraction"] = explored_fraction(cr.total_evals, size);
        jc["cum_eval_cost"] = cr.total_cost;
        jc["best_config"] = config_to_json(cr.best.best);
        jc["trace_file"] = trace_file;
        if (cell.runs > 1) {
            jc["run_finals"] = cr.finals;
            jc["run_evaluations"] = cr.evals;
            auto sorted = cr.finals;
            std::sort(sorted.begin(), sorted.end());
            const std::size_t n = sorted.size();
            jc["run_median_throughput"] =
                n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
        }
        cells_json.push_back(std::move(jc));
    }

    std::ofstream out(std::filesystem::path(spec.out_dir) / "report.json");
    if (!out) throw ConfigError("cannot write report under " + spec.out_dir);
    out << report.dump(2) << '\n';
    return report;
}

ExperimentSpec preset_experiment(const std::string& name, const std::string& data_dir) {
    ExperimentSpec spec;
    spec.name = name;

    const auto cell = [](const char* algo, std::uint64_t rng_seed, std::uint64_t budget,
                         const char* heuristic = nullptr, StartMode start = StartMode::Random) {
        ExperimentCell c;
        c.algo = algo;
        c.rng_seed = rng_seed;
        c.budget = budget;
        if (heuristic != nullptr) c.heuristic = heuristic;
        c.start = start;
        return c;
    };

    if (name == "paper-fig5") {
        spec.network_file = data_dir + "/networks/synthnet18.json";
        spec.platform_ref = "C2";
        spec.out_dir = "results/paper-fig5";
        spec.cells = {
            cell("es", 0, kDefaultEsBudget),
            cell("shisha", 1, 1000, "H3"),
            cell("hc", 2, 3000, "H3", StartMode::ShishaSeed),
            cell("hc", 3, 3000),
            cell("sa", 4, 3000, "H3", StartMode::ShishaSeed),
            cell("sa", 5, 3000),
            cell("rw", 6, 3000),
        };
        return spec;
    }
    if (name == "paper-fig4") {
        spec.network_file = data_dir + "/networks/synthnet18.json";
        spec.platform_ref = data_dir + "/platforms/c2x2_8ep.json";
        spec.out_dir = "results/paper-fig4";
        spec.cells = {
            cell("shisha", 1, 1000, "H3"),
            cell("hc", 2, 5000, "H3", StartMode::ShishaSeed),
            cell("hc", 3, 5000),
            cell("sa", 4, 5000, "H3", StartMode::ShishaSeed),
            cell("sa", 5, 5000),
            cell("rw", 6, 5000),
            cell("es", 0, 2'000'000'000),
        };
        return spec;
    }
    throw ConfigError("unknown preset '" + name + "' (expected paper-fig5 or paper-fig4; "
                      "the alpha sweep runs via 'compare --preset paper-fig9')");
}

std::vector<AlphaSweepCell> alpha_sweep(const Network& network, const Platform& layout,
                                        double fast_speed, const std::vector<double>& ratios,
                                        std::vector<std::uint32_t> alphas,
                                        const Heuristic& heuristic, std::uint64_t rng_seed) {
    for (double r : ratios)
        if (!(r > 0.0)) throw ConfigError("alpha sweep ratios must be > 0");
    if (std::find(alphas.begin(), alphas.end(), 100u) == alphas.end()) alphas.push_back(100);
    std::sort(alphas.begin(), alphas.end());
    alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());

    std::vector<AlphaSweepCell> cells;
    for (double ratio : ratios) {
        Platform platform = layout;
        platform.name = layout.name + "_ratio" + fmt_double(ratio);
        for (auto& ep : platform.eps)
            ep.speed = ep.mem_class == MemClass::Fast ? fast_speed : fast_speed / ratio;

        const auto n = static_cast<std::uint32_t>(
            std::min(platform.ep_count(), network.layer_count()));
        const SeedResult seed = generate_seed(network, platform, n, heuristic.assignment, rng_seed);
        const Evaluator evaluator(network, platform);

        double reference = 0.0;
        std::vector<AlphaSweepCell> ratio_cells;
        for (std::uint32_t alpha : alphas) {
            TuneResult r = tune(seed, network, platform, {alpha, rng_seed}, heuristic.balancing,
                                evaluator);
            AlphaSweepCell cell;
            cell.ratio = ratio;
            cell.alpha = alpha;
            cell.best_throughput = r.best_throughput;
            cell.evaluations = r.trace.size();
            if (alpha == 100) reference = r.best_throughput;
            ratio_cells.push_back(cell);
        }
        for (auto& cell : ratio_cells) cell.normalized = cell.best_throughput / reference;
        cells.insert(cells.end(), ratio_cells.begin(), ratio_cells.end());
    }
    return cells;
}

nlohmann::json alpha_sweep_report(const std::vector<AlphaSweepCell>& cells) {
    nlohmann::json j;
    j["generated_at"] = utc_timestamp();
    auto& arr = j["cells"] = nlohmann::json::array();
    for (const auto& c : cells) {
        arr.push_back({{"ratio", c.ratio},
                       {"alpha", c.alpha},
                       {"best_throughput", c.best_throughput},
                       {"normalized", c.normalized},
                       {"evaluations", c.evaluations}});
    }
    return j;
}

BigCount space_size(const Network& network, const Platform& platform,
                    std::optional<std::pair<std::uint32_t, std::uint32_t>> n_range) {
    const auto L = static_cast<std::uint32_t>(network.layer_count());
    const auto E = static_cast<std::uint32_t>(platform.ep_count());
    const DesignSpace space = n_range ? make_design_space(L, E, n_range->first, n_range->second)
                                      : full_design_space(L, E);
    return design_space_size(space);
}

double explored_fraction(std::uint64_t evaluations, const BigCount& size) {
    return static_cast<double>(evaluations) / size.convert_to<double>();
}

}  // namespace shisha
