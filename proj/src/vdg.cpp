#include "dars/vdg.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "dars/errors.hpp"
#include "dars/io.hpp"

namespace dars {

ValueDependencyGraph ValueDependencyGraph::empty(int n) {
    ValueDependencyGraph g;
    g.n = n;
    g.strength = Matrix<double>(n, n, 0.0);
    g.quality = Matrix<Quality>(n, n, Quality::Nonspecified);
    return g;
}

ValueDependencyGraph ValueDependencyGraph::from_dependencies(
    int n, std::span<const DependencyEstimate> deps) {
    ValueDependencyGraph g = empty(n);
    for (const auto& d : deps) {
        if (d.quality == Quality::Nonspecified || d.strength == 0.0) continue;
        g.add_edge(d.from, d.to, d.quality, d.strength);
    }
    return g;
}

void ValueDependencyGraph::add_edge(int from, int to, Quality q, double rho) {
    if (from == to) throw std::invalid_argument("self-dependencies are not allowed");
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("edge strength must lie in (0,1]");
    if (q == Quality::Nonspecified)
        throw std::invalid_argument("an edge must be positive or negative");
    strength(from, to) = rho;
    quality(from, to) = q;
}

int ValueDependencyGraph::edge_count() const {
    int k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (strength(i, j) != 0.0) ++k;
    return k;
}

int ValueDependencyGraph::negative_edge_count() const {
    int m = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (strength(i, j) != 0.0 && quality(i, j) == Quality::Negative) ++m;
    return m;
}

double path_strength(const ValueDependencyGraph& g, std::span<const int> path) {
    if (path.size() < 2) throw InvalidPathError("a dependency path needs at least two nodes");
    std::vector<char> seen(g.n, 0);
    for (int node : path) {
        if (node < 0 || node >= g.n) throw InvalidPathError("path node out of range");
        if (seen[node]) throw InvalidPathError("path repeats node " + std::to_string(node + 1));
        seen[node] = 1;
    }
    double strength = std::numeric_limits<double>::infinity();
    for (std::size_t h = 1; h < path.size(); ++h) {
        const double rho = g.strength(path[h - 1], path[h]);
        if (rho == 0.0) {
            throw InvalidPathError("no dependency from " + std::to_string(path[h - 1] + 1) +
                                   " to " + std::to_string(path[h] + 1));
        }
        strength = std::min(strength, rho);
    }
    return strength;
}

Quality path_quality(const ValueDependencyGraph& g, std::span<const int> path) {
    path_strength(g, path);  // runs the same validation
    int negatives = 0;
    for (std::size_t h = 1; h < path.size(); ++h)
        if (g.quality(path[h - 1], path[h]) == Quality::Negative) ++negatives;
    return negatives % 2 == 0 ? Quality::Positive : Quality::Negative;
}

namespace {

StrengthMatrices init_strengths(int n) {
    StrengthMatrices s;
    s.positive = Matrix<double>(n, n, kNoPath);
    s.negative = Matrix<double>(n, n, kNoPath);
    for (int i = 0; i < n; ++i) {
        s.positive(i, i) = 0.0;
        s.negative(i, i) = 0.0;
    }
    return s;
}

void seed_edges(const ValueDependencyGraph& g, StrengthMatrices& s) {
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) {
            if (i == j || g.strength(i, j) == 0.0) continue;
            if (g.quality(i, j) == Quality::Positive)
                s.positive(i, j) = g.strength(i, j);
            else
                s.negative(i, j) = g.strength(i, j);
        }
    }
}

struct Arc {
    int to;
    double rho;
    int flip;  // 1 on negative edges; toggles the sign parity
};

std::vector<std::vector<Arc>> adjacency(const ValueDependencyGraph& g) {
    std::vector<std::vector<Arc>> adj(g.n);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            if (i != j && g.strength(i, j) != 0.0)
                adj[i].push_back(
                    {j, g.strength(i, j), g.quality(i, j) == Quality::Negative ? 1 : 0});
    return adj;
}

// One source of the exact route: DP over (visited set, end node, sign parity).
// dp value is the min edge strength of the best path reaching that state; masks
// only grow, so a single ascending sweep suffices.
void exact_from_source(const std::vector<std::vector<Arc>>& adj, int n, int src,
                       std::vector<double>& dp, StrengthMatrices& out) {
    const std::size_t states = (std::size_t{1} << n) * n * 2;
    std::fill(dp.begin(), dp.begin() + states, kNoPath);
    const auto at = [n](std::size_t mask, int v, int parity) {
        return (mask * n + v) * 2 + parity;
    };
    dp[at(std::size_t{1} << src, src, 0)] = std::numeric_limits<double>::infinity();

    const std::size_t full = std::size_t{1} << n;
    for (std::size_t mask = std::size_t{1} << src; mask < full; ++mask) {
        if (!(mask & (std::size_t{1} << src))) continue;
        for (int v = 0; v < n; ++v) {
            if (!(mask & (std::size_t{1} << v))) continue;
            for (int parity = 0; parity < 2; ++parity) {
                const double cur = dp[at(mask, v, parity)];
                if (cur == kNoPath) continue;
                for (const Arc& a : adj[v]) {
                    if (mask & (std::size_t{1} << a.to)) continue;
                    const double val = std::min(cur, a.rho);
                    const int p = parity ^ a.flip;
                    double& slot = dp[at(mask | (std::size_t{1} << a.to), a.to, p)];
                    if (val > slot) slot = val;
                    if (a.to != src) {
                        double& best = p == 0 ? out.positive(src, a.to) : out.negative(src, a.to);
                        if (val > best) best = val;
                    }
                }
            }
        }
    }
}

StrengthMatrices exact_paths(const ValueDependencyGraph& g, bool parallel) {
    if (g.n > kExactPathsMaxN) {
        throw CapacityError("exact path strengths are limited to n <= " +
                            std::to_string(kExactPathsMaxN) + " (got n = " + std::to_string(g.n) +
                            "); use the relaxation algorithm instead");
    }
    StrengthMatrices out = init_strengths(g.n);
    const auto adj = adjacency(g);
    const std::size_t states = (std::size_t{1} << g.n) * g.n * 2;
    if (parallel) {
#pragma omp parallel
        {
            std::vector<double> dp(states);
#pragma omp for schedule(dynamic)
            for (int src = 0; src < g.n; ++src) exact_from_source(adj, g.n, src, dp, out);
        }
    } else {
        std::vector<double> dp(states);
        for (int src = 0; src < g.n; ++src) exact_from_source(adj, g.n, src, dp, out);
    }
    return out;
}

// The four-case min/max pass. Deterministic (k, i, j ascending); compositions
// through the diagonal (k == i, k == j) and diagonal targets (i == j) are skipped,
// otherwise the fixed 0 diagonal would fabricate zero-strength entries.
StrengthMatrices relaxation(const ValueDependencyGraph& g, bool parallel) {
    StrengthMatrices s = init_strengths(g.n);
    seed_edges(g, s);
    const int n = g.n;
    for (int k = 0; k < n; ++k) {
#pragma omp parallel for schedule(static) if (parallel && n > 64)
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            const double pos_ik = s.positive(i, k);
            const double neg_ik = s.negative(i, k);
            if (pos_ik == kNoPath && neg_ik == kNoPath) continue;
            for (int j = 0; j < n; ++j) {
                if (j == k || j == i) continue;
                const double pos_kj = s.positive(k, j);
                const double neg_kj = s.negative(k, j);
                double& pos_ij = s.positive(i, j);
                double& neg_ij = s.negative(i, j);
                const double pp = std::min(pos_ik, pos_kj);
                if (pp > pos_ij) pos_ij = pp;
                const double nn = std::min(neg_ik, neg_kj);
                if (nn > pos_ij) pos_ij = nn;
                const double pn = std::min(pos_ik, neg_kj);
                if (pn > neg_ij) neg_ij = pn;
                const double np = std::min(neg_ik, pos_kj);
                if (np > neg_ij) neg_ij = np;
            }
        }
        // implicit barrier at the end of the parallel loop keeps the per-k order
    }
    return s;
}

}  // namespace

StrengthMatrices all_pairs_strengths(const ValueDependencyGraph& g,
                                     const StrengthsOptions& options) {
    switch (options.algorithm) {
        case StrengthsAlgorithm::ExactPaths:
            return exact_paths(g, options.parallel);
        case StrengthsAlgorithm::Relaxation:
            return relaxation(g, options.parallel);
        case StrengthsAlgorithm::Auto:
        default:
            if (g.n <= std::min(options.exact_limit, kExactPathsMaxN))
                return exact_paths(g, options.parallel);
            return relaxation(g, options.parallel);
    }
}

Matrix<double> influence(const StrengthMatrices& s) {
    const std::size_t n = s.positive.rows();
    Matrix<double> inf(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double pos = is_absent(s.positive(i, j)) ? 0.0 : s.positive(i, j);
            const double neg = is_absent(s.negative(i, j)) ? 0.0 : s.negative(i, j);
            inf(i, j) = pos - neg;
        }
    }
    return inf;
}

double vdl(const ValueDependencyGraph& g) {
    if (g.n < 2) return 0.0;
    return static_cast<double>(g.edge_count()) / (static_cast<double>(g.n) * (g.n - 1));
}

double nvdl(const ValueDependencyGraph& g) {
    const int k = g.edge_count();
    if (k == 0) throw UndefinedMetricError("negative dependency share is undefined: no edges");
    return static_cast<double>(g.negative_edge_count()) / k;
}

ValueDependencyGraph read_dependency_csv(std::istream& in, int n_hint) {
    struct Row {
        int from, to;
        Quality q;
        double rho;
    };
    std::vector<Row> rows;
    std::string line;
    int line_no = 0;
    int max_index = n_hint;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_csv_line(line);
        bool all_empty = true;
        for (const auto& f : fields)
            if (!f.empty()) all_empty = false;
        if (all_empty) continue;
        if (line_no == 1 && !fields.empty() && fields[0] == "from") continue;
        if (fields.size() != 4) {
            throw ParseError("dependency file row " + std::to_string(line_no) +
                             ": expected 4 fields (from,to,quality,strength)");
        }
        long long from, to;
        if (!parse_int(fields[0], from) || from < 1)
            throw ParseError("dependency file row " + std::to_string(line_no) +
                             ": bad 'from' index \"" + fields[0] + "\"");
        if (!parse_int(fields[1], to) || to < 1)
            throw ParseError("dependency file row " + std::to_string(line_no) +
                             ": bad 'to' index \"" + fields[1] + "\"");
        Quality q;
        if (fields[2] == "+")
            q = Quality::Positive;
        else if (fields[2] == "-")
            q = Quality::Negative;
        else
            throw ParseError("dependency file row " + std::to_string(line_no) +
                             ": quality must be + or -, got \"" + fields[2] + "\"");
        double rho;
        if (!parse_double(fields[3], rho) || !(rho > 0.0 && rho <= 1.0))
            throw ParseError("dependency file row " + std::to_string(line_no) +
                             ": strength must lie in (0,1], got \"" + fields[3] + "\"");
        if (from == to)
            throw ParseError("dependency file row " + std::to_string(line_no) +
                             ": self-dependency is not allowed");
        rows.push_back({static_cast<int>(from), static_cast<int>(to), q, rho});
        max_index = std::max(max_index, static_cast<int>(std::max(from, to)));
    }
    ValueDependencyGraph g = ValueDependencyGraph::empty(max_index);
    for (const auto& r : rows) {
        if (g.strength(r.from - 1, r.to - 1) != 0.0) {
            throw ParseError("duplicate dependency " + std::to_string(r.from) + " -> " +
                             std::to_string(r.to));
        }
        g.add_edge(r.from - 1, r.to - 1, r.q, r.rho);
    }
    return g;
}

void write_dependency_csv(std::ostream& out, const ValueDependencyGraph& g) {
    out << "from,to,quality,strength\n";
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) {
            if (g.strength(i, j) == 0.0) continue;
            out << (i + 1) << ',' << (j + 1) << ','
                << (g.quality(i, j) == Quality::Positive ? '+' : '-') << ','
                << format_g9(g.strength(i, j)) << '\n';
        }
    }
}

}  // namespace dars
