#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dars/matrix.hpp"

namespace dars {

// Sign of a value dependency: does selecting the influencer raise or lower the
// dependent requirement's value. Nonspecified doubles as "no dependency".
enum class Quality : std::uint8_t { Positive, Negative, Nonspecified };

// Binary user-by-requirement preference records.
struct PreferenceMatrix {
    int users = 0;
    int requirements = 0;
    Matrix<std::uint8_t> entries;  // entries(u, i) == 1 iff user u preferred requirement i
};

// Causal-strength scores eta(i,j) = p(r_i|r_j) - p(r_i|not r_j) in [-1, 1].
// A pair is undefined when requirement j is preferred by all users or by none.
struct EellsMatrix {
    int n = 0;
    Matrix<double> values;
    Matrix<std::uint8_t> defined;
};

struct DependencyEstimate {
    int from = 0;  // dependent requirement (0-based)
    int to = 0;    // influencing requirement (0-based)
    Quality quality = Quality::Nonspecified;
    double strength = 0.0;  // in [0, 1]; 0 iff quality is Nonspecified
    bool significant = false;
};

// Maps |eta| to a dependency strength. Identity by default; lower_cutoff drops
// weak scores to 0 and upper_saturation promotes strong ones to 1, linear in
// between. Monotone nondecreasing with f(0) = 0 for any valid parameters.
struct Membership {
    double lower_cutoff = 0.0;
    double upper_saturation = 1.0;

    double operator()(double magnitude) const;
};

// Reads a comma-separated 0/1 table, one user per row. Throws ParseError with the
// offending row/column on non-binary cells, ragged rows, or an empty table.
PreferenceMatrix load_preferences(std::istream& source, bool has_header = false);

EellsMatrix eells_measure(const PreferenceMatrix& m, bool parallel = true);
EellsMatrix eells_measure_serial(const PreferenceMatrix& m);

// True where the odds-ratio confidence interval for the (i,j) contingency table
// excludes 1 (Haldane-Anscombe 0.5 correction on zero cells, Wald interval on the
// log odds ratio). Degenerate tables are never significant.
Matrix<std::uint8_t> significance_filter(const PreferenceMatrix& m, const EellsMatrix& eta,
                                         double confidence);

// One estimate per ordered pair (i, j), i != j. Pairs that are undefined, masked
// out, or mapped to zero strength come back as (Nonspecified, 0).
std::vector<DependencyEstimate> to_dependencies(const EellsMatrix& eta,
                                                const std::optional<Matrix<std::uint8_t>>& mask,
                                                const Membership& membership = {});

// Inverse standard normal CDF (Acklam's rational approximation, ~1e-9 accurate).
double normal_quantile(double p);

}  // namespace dars
