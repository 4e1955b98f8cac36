#include "dars/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dars/errors.hpp"
#include "dars/io.hpp"
#include "dars/linear_model.hpp"
#include "dars/preference.hpp"
#include "dars/select.hpp"
#include "dars/simgen.hpp"
#include "dars/vdg.hpp"

namespace dars::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

double j9(double v) { return round_g9(v); }

json matrix_to_json(const Matrix<double>& m, bool absent_as_null) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            if (absent_as_null && is_absent(v))
                row.push_back(nullptr);
            else
                row.push_back(j9(v));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string timestamp_utc() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Context {
    std::string output_dir = ".";
    std::uint64_t seed = 1;
    bool seed_given = false;
    bool quiet = false;

    fs::path out_path(const std::string& name) const { return fs::path(output_dir) / name; }

    void info(const std::string& line) const {
        if (!quiet) std::cout << line << '\n';
    }

    void write_file(const std::string& name, const std::string& content,
                    std::vector<std::string>& outputs) const {
        fs::create_directories(output_dir);
        std::ofstream out(out_path(name));
        if (!out) throw std::runtime_error("cannot write " + out_path(name).string());
        out << content;
        outputs.push_back(name);
    }

    void write_manifest(const std::string& subcommand, const json& inputs, const json& options,
                        std::vector<std::string>& outputs) const {
        json manifest;
        manifest["subcommand"] = subcommand;
        manifest["inputs"] = inputs;
        manifest["outputs"] = outputs;
        manifest["seed"] = seed;
        manifest["options"] = options;
        manifest["tool_version"] = kToolVersion;
        manifest["rng"] = SplitMix64::algorithm_name();
        manifest["timestamp"] = timestamp_utc();
        fs::create_directories(output_dir);
        std::ofstream out(out_path("manifest.json"));
        out << manifest.dump(2) << '\n';
    }
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open input file: " + path);
    return in;
}

StrengthsAlgorithm algorithm_from_name(const std::string& name) {
    if (name == "auto") return StrengthsAlgorithm::Auto;
    if (name == "exact") return StrengthsAlgorithm::ExactPaths;
    if (name == "relaxation") return StrengthsAlgorithm::Relaxation;
    throw ParseError("unknown strengths algorithm \"" + name + "\"");
}

// ---------------------------------------------------------------- identify ---

int cmd_identify(Context& ctx, const std::string& prefs_path, bool header, bool significance,
                 double confidence, double membership_lower, double membership_upper) {
    auto in = open_input(prefs_path);
    const PreferenceMatrix prefs = load_preferences(in, header);
    // subcommands other than simulate run single-threaded
    const EellsMatrix eta = eells_measure(prefs, /*parallel=*/false);
    std::optional<Matrix<std::uint8_t>> mask;
    if (significance) mask = significance_filter(prefs, eta, confidence);
    const Membership membership{membership_lower, membership_upper};
    const auto deps = to_dependencies(eta, mask, membership);
    const auto graph =
        ValueDependencyGraph::from_dependencies(prefs.requirements, deps);

    std::vector<std::string> outputs;
    {
        std::ostringstream csv;
        write_dependency_csv(csv, graph);
        ctx.write_file("dependencies.csv", csv.str(), outputs);
    }
    {
        json doc;
        doc["n"] = eta.n;
        doc["users"] = prefs.users;
        json rows = json::array();
        for (int i = 0; i < eta.n; ++i) {
            json row = json::array();
            for (int j = 0; j < eta.n; ++j) {
                if (eta.defined(i, j))
                    row.push_back(j9(eta.values(i, j)));
                else
                    row.push_back(nullptr);
            }
            rows.push_back(std::move(row));
        }
        doc["values"] = rows;
        ctx.write_file("eells.json", doc.dump(2) + "\n", outputs);
    }
    json inputs{{"preferences", prefs_path}};
    json options{{"header", header},
                 {"significance", significance},
                 {"confidence", j9(confidence)},
                 {"membership_lower", j9(membership_lower)},
                 {"membership_upper", j9(membership_upper)}};
    ctx.write_manifest("identify", inputs, options, outputs);
    ctx.info("identified " + std::to_string(graph.edge_count()) + " dependencies from " +
             std::to_string(prefs.users) + " users x " + std::to_string(prefs.requirements) +
             " requirements");
    return kExitOk;
}

// ----------------------------------------------------------------- analyze ---

int cmd_analyze(Context& ctx, const std::string& deps_path, int n_hint,
                const std::string& algorithm) {
    auto in = open_input(deps_path);
    const ValueDependencyGraph graph = read_dependency_csv(in, n_hint);
    StrengthsOptions opts;
    opts.algorithm = algorithm_from_name(algorithm);
    opts.parallel = false;
    const StrengthMatrices strengths = all_pairs_strengths(graph, opts);
    const Matrix<double> inf = influence(strengths);

    std::vector<std::string> outputs;
    {
        json doc;
        doc["n"] = graph.n;
        doc["positive"] = matrix_to_json(strengths.positive, true);
        doc["negative"] = matrix_to_json(strengths.negative, true);
        ctx.write_file("strengths.json", doc.dump(2) + "\n", outputs);
    }
    {
        json doc;
        doc["n"] = graph.n;
        doc["influence"] = matrix_to_json(inf, false);
        ctx.write_file("influence.json", doc.dump(2) + "\n", outputs);
    }
    {
        json doc;
        doc["n"] = graph.n;
        doc["edges"] = graph.edge_count();
        doc["negative_edges"] = graph.negative_edge_count();
        doc["vdl"] = j9(vdl(graph));
        if (graph.edge_count() > 0)
            doc["nvdl"] = j9(nvdl(graph));
        else
            doc["nvdl"] = nullptr;
        ctx.write_file("metrics.json", doc.dump(2) + "\n", outputs);
    }
    json inputs{{"dependencies", deps_path}};
    json options{{"n", n_hint}, {"algorithm", algorithm}};
    ctx.write_manifest("analyze", inputs, options, outputs);
    ctx.info("analyzed " + std::to_string(graph.n) + " requirements, " +
             std::to_string(graph.edge_count()) + " dependencies");
    return kExitOk;
}

// ------------------------------------------------------------------ select ---

json solution_to_json(const Solution& sol, Method method) {
    json doc;
    doc["method"] = method_name(method);
    doc["x"] = sol.x;
    json theta = json::array();
    for (double t : sol.theta) theta.push_back(j9(t));
    doc["theta"] = theta;
    doc["av"] = j9(sol.av);
    doc["ev"] = j9(sol.ev);
    doc["ov"] = j9(sol.ov);
    doc["objective"] = j9(sol.objective);
    doc["feasible"] = sol.feasible;
    doc["optimal"] = sol.optimal;
    json y = json::array();
    for (double v : sol.y) y.push_back(j9(v));
    doc["y"] = y;
    doc["g"] = sol.g;
    doc["stats"] = json{{"nodes", sol.stats.nodes}, {"wall_ms", j9(sol.stats.wall_ms)}};
    return doc;
}

// Accepts "40", "40.5" or an integer range "1..100".
std::vector<double> parse_percent_spec(const std::string& spec) {
    const auto dots = spec.find("..");
    if (dots == std::string::npos) {
        double v;
        if (!parse_double(spec, v)) throw ParseError("bad percentage \"" + spec + "\"");
        return {v};
    }
    long long lo, hi;
    if (!parse_int(spec.substr(0, dots), lo) || !parse_int(spec.substr(dots + 2), hi) || lo > hi)
        throw ParseError("bad percentage range \"" + spec + "\"");
    std::vector<double> out;
    for (long long p = lo; p <= hi; ++p) out.push_back(static_cast<double>(p));
    return out;
}

struct SelectArgs {
    std::string requirements_path;
    std::string precedence_path;
    std::string deps_path;
    std::string method = "dars";
    std::string budget_pct;
    double budget_abs = -1.0;
    std::string value_cap_pct;
    double value_cap_abs = -1.0;
    double floor_value = 0.0;
    std::string comp_mode = "max-value";
    bool use_estimated = false;
    bool heuristic = false;
    bool emit_lp = false;
    int capacity = 25;
    std::string algorithm = "auto";
};

int cmd_select(Context& ctx, const SelectArgs& args) {
    auto req_in = open_input(args.requirements_path);
    SelectionProblem problem;
    problem.requirements = read_requirements_csv(req_in);
    const int n = problem.size();

    if (!args.precedence_path.empty()) {
        auto in = open_input(args.precedence_path);
        problem.precedence = read_precedence_csv(in, n);
    } else {
        problem.precedence.n = n;
    }

    if (!args.deps_path.empty()) {
        auto in = open_input(args.deps_path);
        const ValueDependencyGraph graph = read_dependency_csv(in, n);
        if (graph.n != n)
            throw ParseError("dependency file names requirement " + std::to_string(graph.n) +
                             " but the requirements file has only " + std::to_string(n));
        StrengthsOptions opts;
        opts.algorithm = algorithm_from_name(args.algorithm);
        opts.parallel = false;
        problem.influence = influence(all_pairs_strengths(graph, opts));
    } else {
        problem.influence = Matrix<double>(n, n, 0.0);
    }

    problem.use_expected_values = !args.use_estimated;

    const auto method = method_from_name(args.method);
    if (!method) throw ParseError("unknown method \"" + args.method + "\"");

    SolverOptions solver_options;
    solver_options.floor_value = args.floor_value;
    solver_options.allow_heuristic = args.heuristic;
    solver_options.exact_capacity = args.capacity;
    if (args.comp_mode == "max-value")
        solver_options.complementary_mode = ComplementaryMode::MaximizeExpectedValue;
    else if (args.comp_mode == "max-count")
        solver_options.complementary_mode = ComplementaryMode::MaximizeCount;
    else
        throw ParseError("unknown complementary mode \"" + args.comp_mode + "\"");

    if (!args.value_cap_pct.empty() && args.value_cap_abs >= 0.0)
        throw ParseError("give either --value-cap-pct or --value-cap, not both");
    if (!args.value_cap_pct.empty()) {
        const auto pcts = parse_percent_spec(args.value_cap_pct);
        if (pcts.size() != 1) throw ParseError("--value-cap-pct takes a single percentage");
        problem.value_cap = pcts[0] / 100.0 * problem.total_value();
    } else if (args.value_cap_abs >= 0.0) {
        problem.value_cap = args.value_cap_abs;
    }

    if (!args.budget_pct.empty() && args.budget_abs >= 0.0)
        throw ParseError("give either --budget-pct or --budget, not both");
    std::vector<std::pair<std::string, double>> budgets;  // (file suffix, absolute budget)
    if (!args.budget_pct.empty()) {
        const auto pcts = parse_percent_spec(args.budget_pct);
        const double total = problem.total_cost();
        if (pcts.size() == 1) {
            budgets.emplace_back("", pcts[0] / 100.0 * total);
        } else {
            for (double p : pcts) {
                char suffix[16];
                std::snprintf(suffix, sizeof(suffix), "_p%03d", static_cast<int>(p));
                budgets.emplace_back(suffix, p / 100.0 * total);
            }
        }
    } else if (args.budget_abs >= 0.0) {
        budgets.emplace_back("", args.budget_abs);
    } else {
        throw ParseError("a budget is required: --budget-pct or --budget");
    }

    std::vector<std::string> outputs;
    bool any_feasible = false;
    for (const auto& [suffix, budget] : budgets) {
        problem.budget = budget;
        const Solution sol = solve(problem, *method, solver_options);
        any_feasible = any_feasible || sol.feasible;
        json doc = solution_to_json(sol, *method);
        doc["budget"] = j9(budget);
        ctx.write_file("solution" + suffix + ".json", doc.dump(2) + "\n", outputs);
        if (args.emit_lp) {
            const LinearModel model = linearized_model(problem);
            ctx.write_file("model" + suffix + ".lp", to_lp_format(model), outputs);
        }
    }

    json inputs{{"requirements", args.requirements_path},
                {"precedence", args.precedence_path},
                {"dependencies", args.deps_path}};
    json options{{"method", args.method},
                 {"budget_pct", args.budget_pct},
                 {"budget", args.budget_abs},
                 {"value_cap_pct", args.value_cap_pct},
                 {"value_cap", args.value_cap_abs},
                 {"floor", j9(args.floor_value)},
                 {"comp_mode", args.comp_mode},
                 {"use_estimated_values", args.use_estimated},
                 {"heuristic", args.heuristic},
                 {"emit_lp", args.emit_lp},
                 {"capacity", args.capacity},
                 {"algorithm", args.algorithm}};
    ctx.write_manifest("select", inputs, options, outputs);
    ctx.info("wrote " + std::to_string(budgets.size()) + " solution file(s)");
    return any_feasible ? kExitOk : kExitInfeasible;
}

// ---------------------------------------------------------------- simulate ---

int cmd_simulate(Context& ctx, const std::string& config_path, bool serial) {
    auto in = open_input(config_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    SimulationConfig config = parse_config_json(buffer.str());
    if (ctx.seed_given) config.seed = ctx.seed;

    std::vector<SimulationRecord> records;
    bool runtime_mode = config.mode == SimulationMode::Runtime;
    if (runtime_mode) {
        records = runtime_sweep(config);
    } else {
        std::vector<Requirement> base;
        if (!config.base_requirements_path.empty()) {
            auto req_in = open_input(config.base_requirements_path);
            base = read_requirements_csv(req_in);
        } else {
            SplitMix64 rng = SplitMix64::stream(config.seed, 0x5eed0000ULL + config.n);
            base = gen_requirements(config.n, rng);
        }
        records = run_grid(config, base, !serial);
    }

    std::vector<std::string> outputs;
    {
        std::ostringstream csv;
        write_records_csv(csv, records, runtime_mode);
        ctx.write_file("records.csv", csv.str(), outputs);
    }
    {
        std::ostringstream csv;
        write_deltas_csv(csv, records);
        ctx.write_file("deltas.csv", csv.str(), outputs);
    }
    json inputs{{"config", config_path}};
    json options{{"mode", runtime_mode ? "runtime" : "performance"},
                 {"seed", config.seed},
                 {"serial", serial}};
    ctx.write_manifest("simulate", inputs, options, outputs);
    ctx.info("wrote " + std::to_string(records.size()) + " simulation records");
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"value-dependency identification, analysis, and requirement selection"};
    app.require_subcommand(1);
    app.fallthrough();  // accept the global flags after the subcommand as well

    Context ctx;
    app.add_option("--output-dir", ctx.output_dir, "directory for all output files");
    auto* seed_opt = app.add_option("--seed", ctx.seed, "seed override for randomized commands");
    app.add_flag("--quiet", ctx.quiet, "suppress progress output");

    // identify
    auto* identify = app.add_subcommand("identify", "derive value dependencies from preferences");
    std::string prefs_path;
    bool header = false, significance = false;
    double confidence = 0.95, membership_lower = 0.0, membership_upper = 1.0;
    identify->add_option("--prefs", prefs_path, "preference matrix CSV")->required();
    identify->add_flag("--header", header, "first row of the CSV is a header");
    identify->add_flag("--significance", significance, "apply the odds-ratio filter");
    identify->add_option("--confidence", confidence, "odds-ratio confidence level");
    identify->add_option("--membership-lower", membership_lower, "strength cutoff");
    identify->add_option("--membership-upper", membership_upper, "strength saturation");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "propagate dependencies over the graph");
    std::string deps_path;
    int n_hint = 0;
    std::string algorithm = "auto";
    analyze->add_option("--deps", deps_path, "dependency CSV")->required();
    analyze->add_option("--n", n_hint, "requirement count when larger than any index used");
    analyze->add_option("--algorithm", algorithm, "auto, exact, or relaxation");

    // select
    auto* select = app.add_subcommand("select", "solve a requirement-selection model");
    SelectArgs sargs;
    select->add_option("--requirements", sargs.requirements_path, "requirements CSV")->required();
    select->add_option("--precedence", sargs.precedence_path, "precedence CSV");
    select->add_option("--deps", sargs.deps_path, "dependency CSV");
    select->add_option("--method", sargs.method, "bk, pcbk, sbk, dars, or dars_complementary");
    select->add_option("--budget-pct", sargs.budget_pct, "budget as % of total cost, or A..B sweep");
    select->add_option("--budget", sargs.budget_abs, "absolute budget");
    select->add_option("--value-cap-pct", sargs.value_cap_pct, "value cap as % of total value");
    select->add_option("--value-cap", sargs.value_cap_abs, "absolute value cap");
    select->add_option("--floor", sargs.floor_value, "complementary lower bound V");
    select->add_option("--comp-mode", sargs.comp_mode, "max-value (default) or max-count");
    select->add_flag("--use-estimated-values", sargs.use_estimated,
                     "weight objectives by estimated instead of expected values");
    select->add_flag("--heuristic", sargs.heuristic, "allow the heuristic above the capacity");
    select->add_flag("--emit-lp", sargs.emit_lp, "also write the linearized model as LP text");
    select->add_option("--capacity", sargs.capacity, "exact-solve capacity");
    select->add_option("--algorithm", sargs.algorithm, "strength propagation: auto/exact/relaxation");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run a randomized comparison grid");
    std::string config_path;
    bool serial = false;
    simulate->add_option("--config", config_path, "simulation config JSON")->required();
    simulate->add_flag("--serial", serial, "evaluate grid cells on one thread");

    std::vector<const char*> argv;
    argv.push_back("dars");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    ctx.seed_given = seed_opt->count() > 0;

    try {
        if (identify->parsed())
            return cmd_identify(ctx, prefs_path, header, significance, confidence,
                                membership_lower, membership_upper);
        if (analyze->parsed()) return cmd_analyze(ctx, deps_path, n_hint, algorithm);
        if (select->parsed()) return cmd_select(ctx, sargs);
        if (simulate->parsed()) return cmd_simulate(ctx, config_path, serial);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCapacity;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace dars::cli
