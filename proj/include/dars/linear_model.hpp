#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dars/select.hpp"

namespace dars {

// A mixed 0-1 linear program: the linearized form of the dependency-aware model.
// Variables use the roles x (selection), g (guard), y (= x * theta), t (theta).

enum class VarKind : std::uint8_t { Select, Guard, PenaltyProduct, Penalty };

struct LinearVariable {
    std::string name;
    VarKind kind;
    int index;  // requirement index the variable belongs to
    bool binary;
    double lower = 0.0;
    double upper = 1.0;
};

struct LinearTerm {
    int var;  // position in LinearModel::variables
    double coefficient;
};

enum class RowSense : std::uint8_t { LessEqual, GreaterEqual };

struct LinearRow {
    std::string name;
    std::vector<LinearTerm> terms;
    RowSense sense;
    double rhs;
};

struct LinearModel {
    int n = 0;
    bool maximize = true;
    std::vector<LinearVariable> variables;
    std::vector<LinearTerm> objective;
    std::vector<LinearRow> rows;

    int var_index(VarKind kind, int requirement) const;
};

// Emits the full linearized model: objective sum w_i x_i - w_i y_i; budget,
// precedence and optional value-cap rows; the pairwise penalty lower bounds
// theta_i + I_ij x_j >= (|I_ij| + I_ij)/2 for every ordered pair; and the x/g and
// y/g coupling rows that pin y_i = x_i * theta_i.
LinearModel linearized_model(const SelectionProblem& problem);

// CPLEX-style LP text (Maximize / Subject To / Bounds / Binaries / End).
std::string to_lp_format(const LinearModel& model);

struct LinearSolveResult {
    bool feasible = false;
    double objective = 0.0;
    std::vector<int> x;
    std::vector<int> g;
    std::vector<double> y;
    std::vector<double> theta;
};

// Exact solve of an emitted model by enumerating the binary variables
// depth-first (binary-only rows prune partial assignments) and resolving the
// continuous y/theta block greedily at each leaf, verifying every row. Intended
// for the equivalence checks; practical to roughly a dozen requirements.
LinearSolveResult solve_linearized(const LinearModel& model);

}  // namespace dars
