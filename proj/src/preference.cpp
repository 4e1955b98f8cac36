#include "dars/preference.hpp"

#include <cmath>
#include <istream>
#include <stdexcept>
#include <string>

#include "dars/errors.hpp"
#include "dars/io.hpp"

namespace dars {

double Membership::operator()(double magnitude) const {
    if (lower_cutoff < 0.0 || upper_saturation > 1.0 || lower_cutoff > upper_saturation) {
        throw std::invalid_argument("membership cutoffs must satisfy 0 <= lower <= upper <= 1");
    }
    if (magnitude <= lower_cutoff) return 0.0;
    if (magnitude >= upper_saturation) return 1.0;
    return (magnitude - lower_cutoff) / (upper_saturation - lower_cutoff);
}

PreferenceMatrix load_preferences(std::istream& source, bool has_header) {
    std::vector<std::vector<std::uint8_t>> rows;
    std::string line;
    int line_no = 0;
    int cols = -1;
    bool skipped_header = false;
    while (std::getline(source, line)) {
        ++line_no;
        if (has_header && !skipped_header) {
            skipped_header = true;
            continue;
        }
        // allow (and ignore) fully blank trailing lines
        auto fields = split_csv_line(line);
        bool all_empty = true;
        for (const auto& f : fields)
            if (!f.empty()) all_empty = false;
        if (all_empty) continue;

        std::vector<std::uint8_t> row;
        row.reserve(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const std::string& f = fields[c];
            if (f == "0") {
                row.push_back(0);
            } else if (f == "1") {
                row.push_back(1);
            } else {
                throw ParseError("preference matrix row " + std::to_string(line_no) + ", column " +
                                 std::to_string(c + 1) + ": expected 0 or 1, got \"" + f + "\"");
            }
        }
        if (cols == -1) {
            cols = static_cast<int>(row.size());
        } else if (static_cast<int>(row.size()) != cols) {
            throw ParseError("preference matrix row " + std::to_string(line_no) + ": expected " +
                             std::to_string(cols) + " columns, got " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty() || cols <= 0) {
        throw ParseError("preference matrix is empty");
    }
    PreferenceMatrix m;
    m.users = static_cast<int>(rows.size());
    m.requirements = cols;
    m.entries = Matrix<std::uint8_t>(rows.size(), cols);
    for (std::size_t u = 0; u < rows.size(); ++u)
        for (int i = 0; i < cols; ++i) m.entries(u, i) = rows[u][i];
    return m;
}

namespace {

void eells_column(const PreferenceMatrix& m, int j, EellsMatrix& out) {
    const int users = m.users;
    const int n = m.requirements;
    int count_j = 0;
    for (int u = 0; u < users; ++u) count_j += m.entries(u, j);
    const int count_not_j = users - count_j;
    if (count_j == 0 || count_not_j == 0) {
        // conditional on j (or on its complement) is undefined; whole column absent
        for (int i = 0; i < n; ++i) out.defined(i, j) = 0;
        return;
    }
    for (int i = 0; i < n; ++i) {
        int with_j = 0, without_j = 0;
        for (int u = 0; u < users; ++u) {
            if (m.entries(u, i)) {
                if (m.entries(u, j))
                    ++with_j;
                else
                    ++without_j;
            }
        }
        const double p_given_j = static_cast<double>(with_j) / count_j;
        const double p_given_not_j = static_cast<double>(without_j) / count_not_j;
        out.values(i, j) = p_given_j - p_given_not_j;
        out.defined(i, j) = 1;
    }
}

}  // namespace

EellsMatrix eells_measure_serial(const PreferenceMatrix& m) {
    EellsMatrix out;
    out.n = m.requirements;
    out.values = Matrix<double>(out.n, out.n, 0.0);
    out.defined = Matrix<std::uint8_t>(out.n, out.n, 0);
    for (int j = 0; j < out.n; ++j) eells_column(m, j, out);
    return out;
}

EellsMatrix eells_measure(const PreferenceMatrix& m, bool parallel) {
    if (!parallel) return eells_measure_serial(m);
    EellsMatrix out;
    out.n = m.requirements;
    out.values = Matrix<double>(out.n, out.n, 0.0);
    out.defined = Matrix<std::uint8_t>(out.n, out.n, 0);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < out.n; ++j) eells_column(m, j, out);
    return out;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("normal_quantile requires p in (0,1)");
    }
    // Acklam's rational approximation with one Halley refinement step.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

Matrix<std::uint8_t> significance_filter(const PreferenceMatrix& m, const EellsMatrix& eta,
                                         double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw std::invalid_argument("confidence must lie in (0,1)");
    }
    const int n = m.requirements;
    Matrix<std::uint8_t> mask(n, n, 0);
    const double z = normal_quantile(0.5 + confidence / 2.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j || !eta.defined(i, j)) continue;
            double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
            for (int u = 0; u < m.users; ++u) {
                const bool pi = m.entries(u, i) != 0;
                const bool pj = m.entries(u, j) != 0;
                if (pi && pj)
                    ++n11;
                else if (pi && !pj)
                    ++n10;
                else if (!pi && pj)
                    ++n01;
                else
                    ++n00;
            }
            if (n11 == 0 || n10 == 0 || n01 == 0 || n00 == 0) {
                n11 += 0.5;
                n10 += 0.5;
                n01 += 0.5;
                n00 += 0.5;
            }
            const double log_or = std::log((n11 * n00) / (n10 * n01));
            const double se = std::sqrt(1.0 / n11 + 1.0 / n10 + 1.0 / n01 + 1.0 / n00);
            const double lo = log_or - z * se;
            const double hi = log_or + z * se;
            mask(i, j) = (lo > 0.0 || hi < 0.0) ? 1 : 0;
        }
    }
    return mask;
}

std::vector<DependencyEstimate> to_dependencies(const EellsMatrix& eta,
                                                const std::optional<Matrix<std::uint8_t>>& mask,
                                                const Membership& membership) {
    const int n = eta.n;
    std::vector<DependencyEstimate> deps;
    deps.reserve(static_cast<std::size_t>(n) * (n - 1));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;  // self-causation
            DependencyEstimate d;
            d.from = i;
            d.to = j;
            const bool kept = eta.defined(i, j) && (!mask || (*mask)(i, j));
            d.significant = eta.defined(i, j) && mask && (*mask)(i, j);
            if (kept) {
                const double value = eta.values(i, j);
                d.strength = membership(std::fabs(value));
                if (d.strength > 0.0 && value != 0.0) {
                    d.quality = value > 0.0 ? Quality::Positive : Quality::Negative;
                } else {
                    d.strength = 0.0;
                    d.quality = Quality::Nonspecified;
                }
            }
            deps.push_back(d);
        }
    }
    return deps;
}

}  // namespace dars
