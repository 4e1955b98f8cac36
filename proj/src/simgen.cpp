#include "dars/simgen.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dars/errors.hpp"
#include "dars/io.hpp"

namespace dars {

namespace {

long long round_count(double density, long long slots) {
    return std::llround(density * static_cast<double>(slots));
}

std::vector<std::pair<int, int>> ordered_pairs(int n) {
    std::vector<std::pair<int, int>> slots;
    slots.reserve(static_cast<std::size_t>(n) * (n - 1));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) slots.emplace_back(i, j);
    return slots;
}

}  // namespace

void SimulationConfig::validate() const {
    auto in_unit = [](const std::vector<double>& v) {
        for (double d : v)
            if (d < 0.0 || d > 1.0) return false;
        return !v.empty();
    };
    if (n < 1) throw ConfigError("config field 'n' must be at least 1");
    if (budget_percents.empty()) throw ConfigError("config field 'budget_percents' is empty");
    for (double b : budget_percents)
        if (b < 0.0 || b > 100.0)
            throw ConfigError("config field 'budget_percents' must lie in [0,100]");
    if (!in_unit(vdl)) throw ConfigError("config field 'vdl' must be nonempty with values in [0,1]");
    if (!in_unit(nvdl))
        throw ConfigError("config field 'nvdl' must be nonempty with values in [0,1]");
    if (!in_unit(pdl)) throw ConfigError("config field 'pdl' must be nonempty with values in [0,1]");
    if (!in_unit(npdl))
        throw ConfigError("config field 'npdl' must be nonempty with values in [0,1]");
    if (methods.empty()) throw ConfigError("config field 'methods' is empty");
    if (replicates < 1) throw ConfigError("config field 'replicates' must be at least 1");
    for (int v : n_values)
        if (v < 1) throw ConfigError("config field 'n_values' entries must be at least 1");
}

ValueDependencyGraph gen_value_dependencies(int n, double vdl_target, double nvdl_target,
                                            SplitMix64& rng) {
    ValueDependencyGraph g = ValueDependencyGraph::empty(n);
    auto slots = ordered_pairs(n);
    const long long k = round_count(vdl_target, static_cast<long long>(slots.size()));
    if (k == 0) return g;
    rng.shuffle(slots);
    const long long m = round_count(nvdl_target, k);
    for (long long e = 0; e < k; ++e) {
        const auto [i, j] = slots[static_cast<std::size_t>(e)];
        // negative quota takes the magnitudes of negative draws
        const Quality q = e < m ? Quality::Negative : Quality::Positive;
        double draw = rng.next_unit_open();
        g.add_edge(i, j, q, draw);
    }
    return g;
}

PrecedenceGraph gen_precedence(int n, double pdl_target, double npdl_target, SplitMix64& rng) {
    PrecedenceGraph g;
    g.n = n;
    auto slots = ordered_pairs(n);
    const long long k = round_count(pdl_target, static_cast<long long>(slots.size()));
    if (k == 0) return g;
    rng.shuffle(slots);
    const long long c = round_count(npdl_target, k);
    for (long long e = 0; e < k; ++e) {
        const auto [i, j] = slots[static_cast<std::size_t>(e)];
        g.edges.push_back({i, j, e < c ? PrecedenceKind::Conflicts : PrecedenceKind::Precedes});
    }
    return g;
}

std::vector<Requirement> gen_requirements(int n, SplitMix64& rng) {
    std::vector<Requirement> reqs(n);
    for (int i = 0; i < n; ++i) {
        reqs[i].id = i;
        reqs[i].cost = static_cast<double>(rng.next_below(21));   // integers in [0,20]
        reqs[i].value = static_cast<double>(rng.next_below(21));  // integers in [0,20]
        reqs[i].probability = rng.next_double();
    }
    return reqs;
}

namespace {

struct Cell {
    int n;
    double budget_pct, vdl, nvdl, pdl, npdl;
    int replicate;
};

std::vector<Cell> expand_cells(const SimulationConfig& cfg, const std::vector<int>& ns) {
    std::vector<Cell> cells;
    for (int n : ns)
        for (double b : cfg.budget_percents)
            for (double v : cfg.vdl)
                for (double nv : cfg.nvdl)
                    for (double p : cfg.pdl)
                        for (double np : cfg.npdl)
                            for (int r = 0; r < cfg.replicates; ++r)
                                cells.push_back({n, b, v, nv, p, np, r});
    return cells;
}

void run_cell(const SimulationConfig& cfg, const std::vector<Requirement>& base,
              const Cell& cell, std::size_t cell_index, const SolverOptions& solver_options,
              std::vector<SimulationRecord>& records, std::size_t record_base) {
    SplitMix64 rng = SplitMix64::stream(cfg.seed, static_cast<std::uint64_t>(cell_index));
    const ValueDependencyGraph graph = gen_value_dependencies(cell.n, cell.vdl, cell.nvdl, rng);
    const PrecedenceGraph precedence = gen_precedence(cell.n, cell.pdl, cell.npdl, rng);

    SelectionProblem problem;
    problem.requirements = base;
    problem.precedence = precedence;
    problem.use_expected_values = false;  // grids score against estimated values
    problem.budget = cell.budget_pct / 100.0 * problem.total_cost();

    const double value_sum = problem.total_value();

    std::string influence_note;
    try {
        problem.influence = influence(all_pairs_strengths(graph, {StrengthsAlgorithm::Auto,
                                                                  /*parallel=*/false}));
    } catch (const CapacityError& e) {
        influence_note = e.what();
    }

    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        SimulationRecord rec;
        rec.n = cell.n;
        rec.budget_pct = cell.budget_pct;
        rec.vdl = cell.vdl;
        rec.nvdl = cell.nvdl;
        rec.pdl = cell.pdl;
        rec.npdl = cell.npdl;
        rec.method = cfg.methods[mi];
        rec.replicate = cell.replicate;
        if (!influence_note.empty()) {
            rec.solved = false;
            rec.note = influence_note;
            records[record_base + mi] = rec;
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        try {
            Solution sol = solve(problem, cfg.methods[mi], solver_options);
            rec.feasible = sol.feasible;
            if (sol.feasible && value_sum > 0.0) {
                rec.pct_av = 100.0 * sol.av / value_sum;
                rec.pct_ov = 100.0 * sol.ov / value_sum;
            }
        } catch (const CapacityError& e) {
            rec.solved = false;
            rec.note = e.what();
        }
        rec.runtime_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
        records[record_base + mi] = rec;
    }
}

}  // namespace

std::vector<SimulationRecord> run_grid(const SimulationConfig& config,
                                       const std::vector<Requirement>& base, bool parallel) {
    config.validate();
    if (base.empty()) throw std::invalid_argument("base requirement set is empty");
    const auto cells = expand_cells(config, {static_cast<int>(base.size())});
    const std::size_t methods = config.methods.size();
    std::vector<SimulationRecord> records(cells.size() * methods);
    SolverOptions solver_options;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::size_t c = 0; c < cells.size(); ++c) {
        run_cell(config, base, cells[c], c, solver_options, records, c * methods);
    }
    return records;
}

std::vector<SimulationRecord> runtime_sweep(const SimulationConfig& config) {
    config.validate();
    std::vector<int> ns = config.n_values.empty() ? std::vector<int>{config.n} : config.n_values;
    const auto cells = expand_cells(config, ns);
    const std::size_t methods = config.methods.size();
    std::vector<SimulationRecord> records(cells.size() * methods);
    SolverOptions solver_options;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        SplitMix64 req_rng = SplitMix64::stream(config.seed, 0x5eed0000ULL + cells[c].n);
        const auto base = gen_requirements(cells[c].n, req_rng);
        run_cell(config, base, cells[c], c, solver_options, records, c * methods);
    }
    return records;
}

namespace {

std::string bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<SimulationRecord>& records,
                       bool include_n) {
    if (include_n) out << "n,";
    out << "budget_pct,vdl,nvdl,pdl,npdl,method,replicate,pct_av,pct_ov,feasible,runtime_ms\n";
    for (const auto& r : records) {
        if (include_n) out << r.n << ',';
        out << format_g9(r.budget_pct) << ',' << format_g9(r.vdl) << ',' << format_g9(r.nvdl)
            << ',' << format_g9(r.pdl) << ',' << format_g9(r.npdl) << ',' << method_name(r.method)
            << ',' << r.replicate << ',' << format_g9(r.pct_av) << ',' << format_g9(r.pct_ov)
            << ',' << bool_text(r.feasible) << ',' << format_g9(r.runtime_ms) << '\n';
    }
}

void write_deltas_csv(std::ostream& out, const std::vector<SimulationRecord>& records) {
    out << "budget_pct,vdl,nvdl,pdl,npdl,replicate,method_a,method_b,delta_pct_ov,delta_pct_av\n";
    // records arrive grouped per cell: consecutive runs over the same cell differ
    // only in method
    std::size_t i = 0;
    while (i < records.size()) {
        std::size_t j = i;
        auto same_cell = [&](const SimulationRecord& a, const SimulationRecord& b) {
            return a.n == b.n && a.budget_pct == b.budget_pct && a.vdl == b.vdl &&
                   a.nvdl == b.nvdl && a.pdl == b.pdl && a.npdl == b.npdl &&
                   a.replicate == b.replicate;
        };
        while (j < records.size() && same_cell(records[i], records[j])) ++j;
        for (std::size_t a = i; a < j; ++a) {
            for (std::size_t b = i; b < j; ++b) {
                if (a == b || !records[a].solved || !records[b].solved) continue;
                const auto& ra = records[a];
                const auto& rb = records[b];
                out << format_g9(ra.budget_pct) << ',' << format_g9(ra.vdl) << ','
                    << format_g9(ra.nvdl) << ',' << format_g9(ra.pdl) << ',' << format_g9(ra.npdl)
                    << ',' << ra.replicate << ',' << method_name(ra.method) << ','
                    << method_name(rb.method) << ',' << format_g9(ra.pct_ov - rb.pct_ov) << ','
                    << format_g9(ra.pct_av - rb.pct_av) << '\n';
            }
        }
        i = j;
    }
}

SimulationConfig parse_config_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");

    SimulationConfig cfg;
    auto get_double_list = [&](const char* field, std::vector<double>& out) {
        if (!doc.contains(field)) return;
        const auto& v = doc[field];
        if (!v.is_array()) throw ConfigError(std::string("config field '") + field +
                                             "' must be an array of numbers");
        out.clear();
        for (const auto& e : v) {
            if (!e.is_number())
                throw ConfigError(std::string("config field '") + field +
                                  "' must contain only numbers");
            out.push_back(e.get<double>());
        }
    };

    if (doc.contains("n")) {
        if (!doc["n"].is_number_integer()) throw ConfigError("config field 'n' must be an integer");
        cfg.n = doc["n"].get<int>();
    }
    get_double_list("budget_percents", cfg.budget_percents);
    get_double_list("vdl", cfg.vdl);
    get_double_list("nvdl", cfg.nvdl);
    get_double_list("pdl", cfg.pdl);
    get_double_list("npdl", cfg.npdl);
    if (doc.contains("methods")) {
        if (!doc["methods"].is_array())
            throw ConfigError("config field 'methods' must be an array of method names");
        cfg.methods.clear();
        for (const auto& m : doc["methods"]) {
            if (!m.is_string())
                throw ConfigError("config field 'methods' must contain strings");
            auto parsed = method_from_name(m.get<std::string>());
            if (!parsed)
                throw ConfigError("config field 'methods': unknown method \"" +
                                  m.get<std::string>() + "\"");
            cfg.methods.push_back(*parsed);
        }
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer())
            throw ConfigError("config field 'seed' must be an integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("replicates")) {
        if (!doc["replicates"].is_number_integer())
            throw ConfigError("config field 'replicates' must be an integer");
        cfg.replicates = doc["replicates"].get<int>();
    }
    if (doc.contains("mode")) {
        if (!doc["mode"].is_string())
            throw ConfigError("config field 'mode' must be \"performance\" or \"runtime\"");
        const std::string mode = doc["mode"].get<std::string>();
        if (mode == "performance")
            cfg.mode = SimulationMode::Performance;
        else if (mode == "runtime")
            cfg.mode = SimulationMode::Runtime;
        else
            throw ConfigError("config field 'mode' must be \"performance\" or \"runtime\"");
    }
    if (doc.contains("n_values")) {
        if (!doc["n_values"].is_array())
            throw ConfigError("config field 'n_values' must be an array of integers");
        for (const auto& e : doc["n_values"]) {
            if (!e.is_number_integer())
                throw ConfigError("config field 'n_values' must contain integers");
            cfg.n_values.push_back(e.get<int>());
        }
    }
    if (doc.contains("base_requirements_path")) {
        if (!doc["base_requirements_path"].is_string())
            throw ConfigError("config field 'base_requirements_path' must be a string");
        cfg.base_requirements_path = doc["base_requirements_path"].get<std::string>();
    }
    for (const auto& [key, value] : doc.items()) {
        static const char* known[] = {"n",       "budget_percents", "vdl",
                                      "nvdl",    "pdl",             "npdl",
                                      "methods", "seed",            "replicates",
                                      "mode",    "n_values",        "base_requirements_path"};
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) throw ConfigError("unknown config field '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

}  // namespace dars
