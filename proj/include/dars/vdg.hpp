#pragma once

#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "dars/matrix.hpp"
#include "dars/preference.hpp"

namespace dars {

// Sentinel for "no path of that quality exists". Kept distinct from a genuine
// zero-strength value throughout.
inline constexpr double kNoPath = -std::numeric_limits<double>::infinity();

inline bool is_absent(double strength) { return strength == kNoPath; }

// Signed directed fuzzy graph over requirements: strength(i,j) in [0,1] with
// quality(i,j) in {+,-}; strength 0 <=> quality Nonspecified <=> no edge.
// Diagonal entries are always absent (no self-dependencies).
struct ValueDependencyGraph {
    int n = 0;
    Matrix<double> strength;   // rho
    Matrix<Quality> quality;   // sigma

    static ValueDependencyGraph empty(int n);
    static ValueDependencyGraph from_dependencies(int n, std::span<const DependencyEstimate> deps);

    void add_edge(int from, int to, Quality q, double rho);
    bool has_edge(int from, int to) const { return strength(from, to) != 0.0; }
    int edge_count() const;
    int negative_edge_count() const;
};

// All-pairs strongest positive / strongest negative dependency-path strengths.
// Diagonal fixed at 0; off-diagonal entries are kNoPath when no path of that
// quality exists.
struct StrengthMatrices {
    Matrix<double> positive;
    Matrix<double> negative;
};

// ExactPaths is the defining semantics: supremum of min-edge strength over simple
// paths, split by the sign product of the traversed edges. Relaxation is the
// O(n^3) four-case min/max pass; it can over-report entries through non-simple
// walks whose sign parity differs from any simple path (see tests), which is why
// Auto prefers ExactPaths wherever it is affordable.
enum class StrengthsAlgorithm { Auto, ExactPaths, Relaxation };

struct StrengthsOptions {
    StrengthsAlgorithm algorithm = StrengthsAlgorithm::Auto;
    bool parallel = true;
    int exact_limit = 16;  // Auto switches to Relaxation above this
};

// Hard size cap of the exact route: the DP table is 2^n * n * 2 doubles.
inline constexpr int kExactPathsMaxN = 18;

// Min of edge strengths along the path; path nodes are 0-based, length >= 2,
// no repeats, every hop an existing edge. Throws InvalidPathError otherwise.
double path_strength(const ValueDependencyGraph& g, std::span<const int> path);

// Sign product of the traversed edges: even number of negatives -> Positive.
Quality path_quality(const ValueDependencyGraph& g, std::span<const int> path);

StrengthMatrices all_pairs_strengths(const ValueDependencyGraph& g,
                                     const StrengthsOptions& options = {});

// Influence of requirement j on the value of i: positive minus negative strength,
// absent read as zero. Entries lie in [-1, 1]; diagonal is 0.
Matrix<double> influence(const StrengthMatrices& s);

// Share of ordered pairs carrying an edge: k / (n(n-1)). Zero for n < 2.
double vdl(const ValueDependencyGraph& g);

// Share of edges that are negative. Throws UndefinedMetricError on an edgeless graph.
double nvdl(const ValueDependencyGraph& g);

// "from,to,quality,strength" rows, 1-based indices, quality +/-, strength in (0,1].
// Absent pairs are simply not written.
ValueDependencyGraph read_dependency_csv(std::istream& in, int n_hint = 0);
void write_dependency_csv(std::ostream& out, const ValueDependencyGraph& g);

}  // namespace dars
