#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dars/rng.hpp"
#include "dars/select.hpp"
#include "dars/vdg.hpp"

namespace dars {

enum class SimulationMode : std::uint8_t { Performance, Runtime };

// One grid of randomized instances. The five density/budget axes form a full
// cross product; runtime mode additionally sweeps requirement counts.
struct SimulationConfig {
    int n = 12;
    std::vector<double> budget_percents{100.0};
    std::vector<double> vdl{0.0};
    std::vector<double> nvdl{0.0};
    std::vector<double> pdl{0.0};
    std::vector<double> npdl{0.0};
    std::vector<Method> methods{Method::Dars};
    std::uint64_t seed = 1;
    int replicates = 1;
    SimulationMode mode = SimulationMode::Performance;
    std::vector<int> n_values;  // runtime mode only; defaults to {n}
    std::string base_requirements_path;  // optional "id,cost,value,probability" file

    void validate() const;  // throws ConfigError naming the offending field
};

struct SimulationRecord {
    int n = 0;
    double budget_pct = 0.0;
    double vdl = 0.0;
    double nvdl = 0.0;
    double pdl = 0.0;
    double npdl = 0.0;
    Method method = Method::Dars;
    int replicate = 0;
    double pct_av = 0.0;
    double pct_ov = 0.0;
    bool feasible = false;
    double runtime_ms = 0.0;
    bool solved = true;       // false when the cell was skipped (capacity)
    std::string note;         // skip reason, empty otherwise
};

// Exactly round(vdl * n(n-1)) ordered pairs receive edges, round(nvdl * k) of
// them negative. Edge strengths are magnitudes of uniform draws whose sign is
// the edge quality.
ValueDependencyGraph gen_value_dependencies(int n, double vdl, double nvdl, SplitMix64& rng);

// Same density scheme for precedence: round(pdl * n(n-1)) edges, round(npdl * k)
// of them conflicts, the rest precedes.
PrecedenceGraph gen_precedence(int n, double pdl, double npdl, SplitMix64& rng);

// Default base requirement set: integer costs and values in [0,20], selection
// probabilities uniform in [0,1].
std::vector<Requirement> gen_requirements(int n, SplitMix64& rng);

// One record per (grid point x method x replicate). Budgets are percentages of
// the base set's total cost; objective weights are the estimated values. Cells
// run on independent rng streams derived from (seed, cell index), so the
// parallel flag cannot change any result.
std::vector<SimulationRecord> run_grid(const SimulationConfig& config,
                                       const std::vector<Requirement>& base,
                                       bool parallel = true);

// Wall-clock measurement across the configured axes (runtime mode). Cells above
// the solver capacity are recorded as skipped, not fatal.
std::vector<SimulationRecord> runtime_sweep(const SimulationConfig& config);

void write_records_csv(std::ostream& out, const std::vector<SimulationRecord>& records,
                       bool include_n = false);

// Pairwise %OV / %AV differences per grid cell for every ordered method pair.
void write_deltas_csv(std::ostream& out, const std::vector<SimulationRecord>& records);

SimulationConfig parse_config_json(const std::string& text);

}  // namespace dars
