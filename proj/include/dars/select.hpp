#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dars/matrix.hpp"

namespace dars {

struct Requirement {
    int id = 0;          // 0-based index
    double cost = 0.0;   // currency units, >= 0
    double value = 0.0;  // estimated value units, >= 0
    double probability = 1.0;  // chance users select it, in [0,1]
};

inline double expected_value(const Requirement& r) { return r.probability * r.value; }

enum class PrecedenceKind : std::uint8_t { Precedes, Conflicts };

// Edge (i, j, Precedes) reads "selecting i requires j": x_i <= x_j.
// Edge (i, j, Conflicts) reads "i cannot join j":       x_i <= 1 - x_j.
struct PrecedenceEdge {
    int dependent = 0;
    int target = 0;
    PrecedenceKind kind = PrecedenceKind::Precedes;
};

struct PrecedenceGraph {
    int n = 0;
    std::vector<PrecedenceEdge> edges;
};

struct SelectionProblem {
    std::vector<Requirement> requirements;
    double budget = 0.0;
    PrecedenceGraph precedence;
    Matrix<double> influence;  // n x n, entries in [-1, 1]
    std::optional<double> value_cap;  // price ceiling on the estimated value sum
    bool use_expected_values = true;  // objective weights: p(r)*v when true, v otherwise

    int size() const { return static_cast<int>(requirements.size()); }
    double total_cost() const;
    double total_value() const;
    double weight(int i) const;  // the w_i the dependency-aware objective uses
    void validate() const;
};

enum class Method : std::uint8_t { Bk, Pcbk, Sbk, Dars, DarsComplementary };

const char* method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

// The complementary model trades the two utilities "expected value" and
// "selection count" against each other; one is maximized, the other floored.
enum class ComplementaryMode : std::uint8_t {
    MaximizeExpectedValue,  // max sum x*E(v) s.t. count >= floor (the default)
    MaximizeCount,          // max sum x      s.t. sum x*E(v) >= floor
};

struct SolverOptions {
    double floor_value = 0.0;  // lower bound V of the complementary model
    ComplementaryMode complementary_mode = ComplementaryMode::MaximizeExpectedValue;
    bool allow_heuristic = false;  // required above exact_capacity
    int exact_capacity = 25;
};

struct SolverStats {
    long long nodes = 0;
    double wall_ms = 0.0;
};

struct Solution {
    std::vector<int> x;
    std::vector<double> theta;  // penalties at x, each in [0, 1]
    double av = 0.0;  // accumulated value, sum x*v
    double ev = 0.0;  // expected value, sum x*p*v
    double ov = 0.0;  // overall value, sum x*(1-theta)*w
    double objective = 0.0;  // the solved model's objective at x
    bool feasible = false;   // against budget, precedence and value cap
    bool optimal = false;    // exact search completed (false for the heuristic)
    std::vector<double> y;   // linearization diagnostics: y_i = x_i * theta_i
    std::vector<int> g;      // linearization diagnostics: g_i = x_i
    SolverStats stats;
};

inline constexpr double kObjectiveTolerance = 1e-9;

// Penalty of requirement i under selection x: largest value-loss fraction caused
// by an ignored positive or selected negative influencer. Always in [0, 1].
double penalty(const Matrix<double>& influence, std::span<const int> x, int i);

// Scores an arbitrary selection vector. Infeasible selections come back with
// feasible=false and zeroed av/ev/ov.
Solution overall_value(const SelectionProblem& problem, std::span<const int> x);

// Exact depth-first branch-and-bound for every method, up to
// options.exact_capacity requirements. Beyond that a greedy + local-search
// heuristic runs when allow_heuristic is set (optimal=false), otherwise a
// CapacityError is thrown. Ties are broken toward the lexicographically
// smallest selection vector.
Solution solve(const SelectionProblem& problem, Method method, const SolverOptions& options = {});

// "id,cost,value,probability" rows, 1-based ids covering 1..n exactly.
std::vector<Requirement> read_requirements_csv(std::istream& in);
void write_requirements_csv(std::ostream& out, std::span<const Requirement> requirements);

// "i,j,kind" rows with kind in {precedes, conflicts}, 1-based indices.
PrecedenceGraph read_precedence_csv(std::istream& in, int n);
void write_precedence_csv(std::ostream& out, const PrecedenceGraph& g);

}  // namespace dars
