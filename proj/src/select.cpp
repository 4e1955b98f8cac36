#include "dars/select.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dars/errors.hpp"
#include "dars/io.hpp"

namespace dars {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clock_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

}  // namespace

double SelectionProblem::total_cost() const {
    double s = 0.0;
    for (const auto& r : requirements) s += r.cost;
    return s;
}

double SelectionProblem::total_value() const {
    double s = 0.0;
    for (const auto& r : requirements) s += r.value;
    return s;
}

double SelectionProblem::weight(int i) const {
    const Requirement& r = requirements[i];
    return use_expected_values ? expected_value(r) : r.value;
}

void SelectionProblem::validate() const {
    const int n = size();
    if (n == 0) throw std::invalid_argument("selection problem has no requirements");
    if (budget < 0.0) throw std::invalid_argument("budget must be nonnegative");
    if (value_cap && *value_cap < 0.0)
        throw std::invalid_argument("value cap must be nonnegative");
    for (const auto& r : requirements) {
        if (r.cost < 0.0 || r.value < 0.0)
            throw std::invalid_argument("requirement costs and values must be nonnegative");
        if (r.probability < 0.0 || r.probability > 1.0)
            throw std::invalid_argument("selection probabilities must lie in [0,1]");
    }
    if (influence.rows() != static_cast<std::size_t>(n) ||
        influence.cols() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("influence matrix does not match the requirement count");
    }
    if (precedence.n != n)
        throw std::invalid_argument("precedence graph does not match the requirement count");
    for (const auto& e : precedence.edges) {
        if (e.dependent < 0 || e.dependent >= n || e.target < 0 || e.target >= n)
            throw std::invalid_argument("precedence edge index out of range");
        if (e.dependent == e.target)
            throw std::invalid_argument("precedence self-edges are not allowed");
    }
}

const char* method_name(Method m) {
    switch (m) {
        case Method::Bk: return "bk";
        case Method::Pcbk: return "pcbk";
        case Method::Sbk: return "sbk";
        case Method::Dars: return "dars";
        case Method::DarsComplementary: return "dars_complementary";
    }
    return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
    if (name == "bk") return Method::Bk;
    if (name == "pcbk") return Method::Pcbk;
    if (name == "sbk") return Method::Sbk;
    if (name == "dars") return Method::Dars;
    if (name == "dars_complementary" || name == "dars-complementary")
        return Method::DarsComplementary;
    return std::nullopt;
}

double penalty(const Matrix<double>& influence, std::span<const int> x, int i) {
    const int n = static_cast<int>(influence.rows());
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("selection vector does not match the influence matrix");
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double inf_ij = influence(i, j);
        const double term = (std::fabs(inf_ij) + (1.0 - 2.0 * x[j]) * inf_ij) / 2.0;
        worst = std::max(worst, term);
    }
    return worst;
}

namespace {

// Model shape per method: which constraints the optimization itself enforces.
// Reported feasibility always checks the full system.
struct ModelSpec {
    bool enforce_precedence = false;
    bool enforce_cap = false;
    bool dependency_aware = false;  // objective carries penalties
    bool has_floor = false;
    bool floor_on_count = false;  // true: count >= V; false: weighted sum >= V
    std::vector<double> obj;      // objective coefficient per requirement
};

ModelSpec make_model(const SelectionProblem& p, Method method, const SolverOptions& options) {
    const int n = p.size();
    ModelSpec m;
    m.obj.resize(n);
    switch (method) {
        case Method::Bk:
            for (int i = 0; i < n; ++i) m.obj[i] = p.requirements[i].value;
            break;
        case Method::Pcbk:
            m.enforce_precedence = true;
            m.enforce_cap = p.value_cap.has_value();
            for (int i = 0; i < n; ++i) m.obj[i] = p.requirements[i].value;
            break;
        case Method::Sbk:
            m.enforce_precedence = true;
            m.enforce_cap = p.value_cap.has_value();
            for (int i = 0; i < n; ++i) m.obj[i] = p.weight(i);
            break;
        case Method::Dars:
            m.enforce_precedence = true;
            m.enforce_cap = p.value_cap.has_value();
            m.dependency_aware = true;
            for (int i = 0; i < n; ++i) m.obj[i] = p.weight(i);
            break;
        case Method::DarsComplementary:
            m.enforce_precedence = true;
            m.enforce_cap = p.value_cap.has_value();
            m.has_floor = true;
            m.floor_on_count = options.complementary_mode == ComplementaryMode::MaximizeExpectedValue;
            if (m.floor_on_count) {
                for (int i = 0; i < n; ++i) m.obj[i] = p.weight(i);
            } else {
                for (int i = 0; i < n; ++i) m.obj[i] = 1.0;
            }
            break;
    }
    return m;
}

struct Adjacency {
    std::vector<std::vector<int>> requires_out;  // i -> targets i depends on
    std::vector<std::vector<int>> requires_in;   // i -> dependents of i
    std::vector<std::vector<int>> conflicts;     // symmetric
};

Adjacency build_adjacency(const PrecedenceGraph& g) {
    Adjacency a;
    a.requires_out.resize(g.n);
    a.requires_in.resize(g.n);
    a.conflicts.resize(g.n);
    for (const auto& e : g.edges) {
        if (e.kind == PrecedenceKind::Precedes) {
            a.requires_out[e.dependent].push_back(e.target);
            a.requires_in[e.target].push_back(e.dependent);
        } else {
            a.conflicts[e.dependent].push_back(e.target);
            a.conflicts[e.target].push_back(e.dependent);
        }
    }
    return a;
}

bool satisfies_full_system(const SelectionProblem& p, std::span<const int> x) {
    double cost = 0.0, value = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if (!x[i]) continue;
        cost += p.requirements[i].cost;
        value += p.requirements[i].value;
    }
    if (cost > p.budget + kObjectiveTolerance) return false;
    if (p.value_cap && value > *p.value_cap + kObjectiveTolerance) return false;
    for (const auto& e : p.precedence.edges) {
        if (e.kind == PrecedenceKind::Precedes) {
            if (x[e.dependent] > x[e.target]) return false;
        } else {
            if (x[e.dependent] + x[e.target] > 1) return false;
        }
    }
    return true;
}

double model_floor_utility(const SelectionProblem& p, const ModelSpec& m,
                           std::span<const int> x) {
    double u = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if (!x[i]) continue;
        u += m.floor_on_count ? 1.0 : p.weight(i);
    }
    return u;
}

bool satisfies_model(const SelectionProblem& p, const ModelSpec& m, const SolverOptions& options,
                     std::span<const int> x) {
    double cost = 0.0, value = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if (!x[i]) continue;
        cost += p.requirements[i].cost;
        value += p.requirements[i].value;
    }
    if (cost > p.budget + kObjectiveTolerance) return false;
    if (m.enforce_cap && value > *p.value_cap + kObjectiveTolerance) return false;
    if (m.enforce_precedence) {
        for (const auto& e : p.precedence.edges) {
            if (e.kind == PrecedenceKind::Precedes) {
                if (x[e.dependent] > x[e.target]) return false;
            } else {
                if (x[e.dependent] + x[e.target] > 1) return false;
            }
        }
    }
    if (m.has_floor &&
        model_floor_utility(p, m, x) < options.floor_value - kObjectiveTolerance) {
        return false;
    }
    return true;
}

double model_objective(const SelectionProblem& p, const ModelSpec& m, std::span<const int> x) {
    double obj = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if (!x[i]) continue;
        if (m.dependency_aware) {
            obj += (1.0 - penalty(p.influence, x, i)) * m.obj[i];
        } else {
            obj += m.obj[i];
        }
    }
    return obj;
}

// Greedy by objective-per-cost with requires-closure repair, then 1-flip / 2-swap
// local search on the model objective. Used to seed the exact search and as the
// standalone fallback above the exact capacity.
std::optional<std::vector<int>> heuristic_selection(const SelectionProblem& p, const ModelSpec& m,
                                                    const SolverOptions& options,
                                                    const Adjacency& adj) {
    const int n = p.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto ratio = [&](int i) {
        const double c = p.requirements[i].cost;
        if (c <= 0.0) return kInf;
        return m.obj[i] / c;
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return ratio(a) > ratio(b); });

    std::vector<int> x(n, 0);
    double cost = 0.0, value = 0.0;

    auto closure_of = [&](int i) {
        std::vector<int> closure;
        std::vector<char> seen(n, 0);
        std::vector<int> stack{i};
        seen[i] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (!x[v]) closure.push_back(v);
            for (int t : adj.requires_out[v]) {
                if (!seen[t]) {
                    seen[t] = 1;
                    stack.push_back(t);
                }
            }
        }
        return closure;
    };

    auto try_add = [&](int i) {
        if (x[i]) return;
        auto closure = m.enforce_precedence ? closure_of(i) : std::vector<int>{i};
        double add_cost = 0.0, add_value = 0.0;
        for (int v : closure) {
            add_cost += p.requirements[v].cost;
            add_value += p.requirements[v].value;
        }
        if (cost + add_cost > p.budget + kObjectiveTolerance) return;
        if (m.enforce_cap && value + add_value > *p.value_cap + kObjectiveTolerance) return;
        if (m.enforce_precedence) {
            for (int v : closure) {
                for (int c : adj.conflicts[v]) {
                    if (x[c]) return;
                    for (int w : closure)
                        if (w == c) return;
                }
            }
        }
        for (int v : closure) x[v] = 1;
        cost += add_cost;
        value += add_value;
    };

    for (int i : order) try_add(i);

    // if the floor is unmet, pad with the cheapest remaining closures
    if (m.has_floor) {
        std::vector<int> by_cost(n);
        std::iota(by_cost.begin(), by_cost.end(), 0);
        std::stable_sort(by_cost.begin(), by_cost.end(), [&](int a, int b) {
            return p.requirements[a].cost < p.requirements[b].cost;
        });
        for (int i : by_cost) {
            if (model_floor_utility(p, m, x) >= options.floor_value - kObjectiveTolerance) break;
            try_add(i);
        }
    }

    if (!satisfies_model(p, m, options, x)) return std::nullopt;
    double best = model_objective(p, m, x);

    auto evaluate = [&](const std::vector<int>& cand) -> double {
        if (!satisfies_model(p, m, options, cand)) return -kInf;
        return model_objective(p, m, cand);
    };

    const int max_rounds = 30;
    const bool try_swaps = n <= 60;
    for (int round = 0; round < max_rounds; ++round) {
        double best_gain = kObjectiveTolerance;
        std::vector<int> best_cand;
        std::vector<int> cand = x;
        for (int i = 0; i < n; ++i) {
            cand[i] = 1 - cand[i];
            const double obj = evaluate(cand);
            if (obj - best > best_gain) {
                best_gain = obj - best;
                best_cand = cand;
            }
            cand[i] = 1 - cand[i];
        }
        if (try_swaps) {
            for (int i = 0; i < n; ++i) {
                if (!x[i]) continue;
                for (int j = 0; j < n; ++j) {
                    if (x[j]) continue;
                    cand[i] = 0;
                    cand[j] = 1;
                    const double obj = evaluate(cand);
                    if (obj - best > best_gain) {
                        best_gain = obj - best;
                        best_cand = cand;
                    }
                    cand[i] = 1;
                    cand[j] = 0;
                }
            }
        }
        if (best_cand.empty()) break;
        x = best_cand;
        best += best_gain;
    }
    return x;
}

class BranchAndBound {
public:
    BranchAndBound(const SelectionProblem& p, const ModelSpec& m, const SolverOptions& options)
        : p_(p), m_(m), options_(options), n_(p.size()), adj_(build_adjacency(p.precedence)) {
        x_.assign(n_, 0);
        decided_.assign(n_, 0);
        theta_partial_.assign(n_, 0.0);
        ratio_order_.resize(n_);
        std::iota(ratio_order_.begin(), ratio_order_.end(), 0);
        std::stable_sort(ratio_order_.begin(), ratio_order_.end(), [&](int a, int b) {
            const double ca = p_.requirements[a].cost, cb = p_.requirements[b].cost;
            const double ra = ca <= 0.0 ? kInf : m_.obj[a] / ca;
            const double rb = cb <= 0.0 ? kInf : m_.obj[b] / cb;
            return ra > rb;
        });
    }

    void seed(double objective) { best_obj_ = std::max(best_obj_, objective - 1e-6); }

    // Runs the exact search; returns true when some leaf satisfied the model.
    bool run() {
        dfs(0);
        return !best_x_.empty();
    }

    const std::vector<int>& best_x() const { return best_x_; }
    double best_objective() const { return found_obj_; }
    long long nodes() const { return nodes_; }

private:
    bool decision_consistent(int d, int val) const {
        if (val == 1) {
            if (cost_sel_ + p_.requirements[d].cost > p_.budget + kObjectiveTolerance)
                return false;
            if (m_.enforce_cap &&
                value_sel_ + p_.requirements[d].value > *p_.value_cap + kObjectiveTolerance)
                return false;
        }
        if (!m_.enforce_precedence) return true;
        if (val == 1) {
            for (int t : adj_.requires_out[d])
                if (decided_[t] && !x_[t]) return false;
            for (int c : adj_.conflicts[d])
                if (decided_[c] && x_[c]) return false;
        } else {
            for (int dep : adj_.requires_in[d])
                if (decided_[dep] && x_[dep]) return false;
        }
        return true;
    }

    bool forced_zero(int i) const {
        if (!m_.enforce_precedence) return false;
        for (int t : adj_.requires_out[i])
            if (decided_[t] && !x_[t]) return true;
        for (int c : adj_.conflicts[i])
            if (decided_[c] && x_[c]) return true;
        return false;
    }

    double upper_bound(int next) const {
        double base = 0.0;
        if (m_.dependency_aware) {
            for (int i : selected_) base += (1.0 - theta_partial_[i]) * m_.obj[i];
        } else {
            base = obj_sel_;
        }
        // optimistic completion: undecided items at full weight, fractional on budget
        double rb = std::max(0.0, p_.budget - cost_sel_);
        double add = 0.0;
        int addable = 0;
        for (int i : ratio_order_) {
            if (i < next) continue;  // branching follows index order, so these are decided
            if (forced_zero(i)) continue;
            ++addable;
            const double w = m_.obj[i];
            if (w <= 0.0) continue;
            const double c = p_.requirements[i].cost;
            if (c <= rb) {
                add += w;
                rb -= c;
            } else if (c > 0.0 && rb > 0.0) {
                add += w * (rb / c);
                rb = 0.0;
            }
        }
        if (m_.has_floor) {
            const double reachable = m_.floor_on_count
                                         ? floor_sel_ + addable
                                         : floor_sel_ + max_floor_gain(next);
            if (reachable < options_.floor_value - kObjectiveTolerance) return -kInf;
        }
        return base + add;
    }

    double max_floor_gain(int next) const {
        double gain = 0.0;
        for (int i = next; i < n_; ++i)
            if (!forced_zero(i)) gain += p_.weight(i);
        return gain;
    }

    void dfs(int d) {
        ++nodes_;
        if (d == n_) {
            if (m_.has_floor && floor_sel_ < options_.floor_value - kObjectiveTolerance) return;
            double obj = 0.0;
            if (m_.dependency_aware) {
                for (int i : selected_) obj += (1.0 - theta_partial_[i]) * m_.obj[i];
            } else {
                obj = obj_sel_;
            }
            if (obj > best_obj_ + kObjectiveTolerance) {
                best_obj_ = obj;
                found_obj_ = obj;
                best_x_ = x_;
            }
            return;
        }
        for (int val = 0; val <= 1; ++val) {  // 0 first keeps the first optimum lexicographically smallest
            if (!decision_consistent(d, val)) continue;
            apply(d, val);
            if (upper_bound(d + 1) > best_obj_ + kObjectiveTolerance) dfs(d + 1);
            undo(d, val);
        }
    }

    void apply(int d, int val) {
        x_[d] = val;
        decided_[d] = 1;
        if (val == 1) {
            cost_sel_ += p_.requirements[d].cost;
            value_sel_ += p_.requirements[d].value;
            obj_sel_ += m_.obj[d];
            floor_sel_ += m_.floor_on_count ? 1.0 : p_.weight(d);
            selected_.push_back(d);
        }
        if (m_.dependency_aware) {
            for (int i = 0; i < n_; ++i) {
                if (i == d) continue;
                const double inf_id = p_.influence(i, d);
                if (inf_id == 0.0) continue;
                const double term = (std::fabs(inf_id) + (1.0 - 2.0 * val) * inf_id) / 2.0;
                if (term > theta_partial_[i]) {
                    undo_stack_.push_back({d, i, theta_partial_[i]});
                    theta_partial_[i] = term;
                }
            }
        }
    }

    void undo(int d, int val) {
        while (!undo_stack_.empty() && undo_stack_.back().depth == d) {
            theta_partial_[undo_stack_.back().index] = undo_stack_.back().previous;
            undo_stack_.pop_back();
        }
        if (val == 1) {
            selected_.pop_back();
            cost_sel_ -= p_.requirements[d].cost;
            value_sel_ -= p_.requirements[d].value;
            obj_sel_ -= m_.obj[d];
            floor_sel_ -= m_.floor_on_count ? 1.0 : p_.weight(d);
        }
        decided_[d] = 0;
        x_[d] = 0;
    }

    struct ThetaUndo {
        int depth;
        int index;
        double previous;
    };

    const SelectionProblem& p_;
    const ModelSpec& m_;
    const SolverOptions& options_;
    int n_;
    Adjacency adj_;
    std::vector<int> ratio_order_;
    std::vector<int> x_;
    std::vector<char> decided_;
    std::vector<double> theta_partial_;
    std::vector<int> selected_;
    std::vector<ThetaUndo> undo_stack_;
    double cost_sel_ = 0.0;
    double value_sel_ = 0.0;
    double obj_sel_ = 0.0;
    double floor_sel_ = 0.0;
    double best_obj_ = -kInf;
    double found_obj_ = -kInf;
    std::vector<int> best_x_;
    long long nodes_ = 0;
};

Solution finalize(const SelectionProblem& p, std::span<const int> x, double objective,
                  bool optimal, long long nodes, double wall_ms) {
    const int n = p.size();
    Solution s;
    s.x.assign(x.begin(), x.end());
    s.theta.resize(n);
    s.y.resize(n);
    s.g.resize(n);
    for (int i = 0; i < n; ++i) {
        s.theta[i] = penalty(p.influence, x, i);
        s.g[i] = s.x[i];
        s.y[i] = s.x[i] ? s.theta[i] : 0.0;
    }
    s.feasible = satisfies_full_system(p, x);
    if (s.feasible) {
        for (int i = 0; i < n; ++i) {
            if (!s.x[i]) continue;
            s.av += p.requirements[i].value;
            s.ev += expected_value(p.requirements[i]);
            s.ov += (1.0 - s.theta[i]) * p.weight(i);
        }
    }
    s.objective = objective;
    s.optimal = optimal;
    s.stats.nodes = nodes;
    s.stats.wall_ms = wall_ms;
    return s;
}

}  // namespace

Solution overall_value(const SelectionProblem& problem, std::span<const int> x) {
    problem.validate();
    if (static_cast<int>(x.size()) != problem.size())
        throw std::invalid_argument("selection vector does not match the problem size");
    Solution s = finalize(problem, x, 0.0, false, 0, 0.0);
    s.objective = s.ov;
    return s;
}

Solution solve(const SelectionProblem& problem, Method method, const SolverOptions& options) {
    problem.validate();
    const auto start = std::chrono::steady_clock::now();
    const int n = problem.size();
    const ModelSpec model = make_model(problem, method, options);
    const Adjacency adj = build_adjacency(problem.precedence);

    if (n > options.exact_capacity) {
        if (!options.allow_heuristic) {
            throw CapacityError("instance with " + std::to_string(n) +
                                " requirements exceeds the exact-solve capacity of " +
                                std::to_string(options.exact_capacity) +
                                "; pass the heuristic flag to continue");
        }
        auto x = heuristic_selection(problem, model, options, adj);
        if (!x) {
            Solution s = finalize(problem, std::vector<int>(n, 0), 0.0, false, 0, clock_ms(start));
            s.feasible = false;
            s.av = s.ev = s.ov = 0.0;
            return s;
        }
        const double obj = model_objective(problem, model, *x);
        return finalize(problem, *x, obj, false, 0, clock_ms(start));
    }

    BranchAndBound search(problem, model, options);
    if (n >= 16) {
        if (auto seed_x = heuristic_selection(problem, model, options, adj))
            search.seed(model_objective(problem, model, *seed_x));
    }
    if (search.run()) {
        return finalize(problem, search.best_x(), search.best_objective(), true, search.nodes(),
                        clock_ms(start));
    }
    // exact search proved the model infeasible
    Solution s =
        finalize(problem, std::vector<int>(n, 0), 0.0, true, search.nodes(), clock_ms(start));
    s.feasible = false;
    s.av = s.ev = s.ov = 0.0;
    return s;
}

std::vector<Requirement> read_requirements_csv(std::istream& in) {
    std::vector<Requirement> reqs;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_csv_line(line);
        bool all_empty = true;
        for (const auto& f : fields)
            if (!f.empty()) all_empty = false;
        if (all_empty) continue;
        if (line_no == 1 && !fields.empty() && fields[0] == "id") continue;
        if (fields.size() != 4)
            throw ParseError("requirements file row " + std::to_string(line_no) +
                             ": expected 4 fields (id,cost,value,probability)");
        long long id;
        double cost, value, prob;
        if (!parse_int(fields[0], id) || id < 1)
            throw ParseError("requirements file row " + std::to_string(line_no) +
                             ": bad id \"" + fields[0] + "\"");
        if (!parse_double(fields[1], cost) || cost < 0.0)
            throw ParseError("requirements file row " + std::to_string(line_no) +
                             ": bad cost \"" + fields[1] + "\"");
        if (!parse_double(fields[2], value) || value < 0.0)
            throw ParseError("requirements file row " + std::to_string(line_no) +
                             ": bad value \"" + fields[2] + "\"");
        if (!parse_double(fields[3], prob) || prob < 0.0 || prob > 1.0)
            throw ParseError("requirements file row " + std::to_string(line_no) +
                             ": bad probability \"" + fields[3] + "\"");
        Requirement r;
        r.id = static_cast<int>(id - 1);
        r.cost = cost;
        r.value = value;
        r.probability = prob;
        reqs.push_back(r);
    }
    if (reqs.empty()) throw ParseError("requirements file is empty");
    std::vector<char> seen(reqs.size(), 0);
    for (const auto& r : reqs) {
        if (r.id >= static_cast<int>(reqs.size()) || seen[r.id])
            throw ParseError("requirement ids must cover 1.." + std::to_string(reqs.size()) +
                             " exactly");
        seen[r.id] = 1;
    }
    std::sort(reqs.begin(), reqs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return reqs;
}

void write_requirements_csv(std::ostream& out, std::span<const Requirement> requirements) {
    out << "id,cost,value,probability\n";
    for (const auto& r : requirements) {
        out << (r.id + 1) << ',' << format_g9(r.cost) << ',' << format_g9(r.value) << ','
            << format_g9(r.probability) << '\n';
    }
}

void write_precedence_csv(std::ostream& out, const PrecedenceGraph& g) {
    out << "i,j,kind\n";
    for (const auto& e : g.edges) {
        out << (e.dependent + 1) << ',' << (e.target + 1) << ','
            << (e.kind == PrecedenceKind::Precedes ? "precedes" : "conflicts") << '\n';
    }
}

PrecedenceGraph read_precedence_csv(std::istream& in, int n) {
    PrecedenceGraph g;
    g.n = n;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_csv_line(line);
        bool all_empty = true;
        for (const auto& f : fields)
            if (!f.empty()) all_empty = false;
        if (all_empty) continue;
        if (line_no == 1 && !fields.empty() && fields[0] == "i") continue;
        if (fields.size() != 3)
            throw ParseError("precedence file row " + std::to_string(line_no) +
                             ": expected 3 fields (i,j,kind)");
        long long i, j;
        if (!parse_int(fields[0], i) || i < 1 || i > n)
            throw ParseError("precedence file row " + std::to_string(line_no) +
                             ": bad index \"" + fields[0] + "\"");
        if (!parse_int(fields[1], j) || j < 1 || j > n)
            throw ParseError("precedence file row " + std::to_string(line_no) +
                             ": bad index \"" + fields[1] + "\"");
        if (i == j)
            throw ParseError("precedence file row " + std::to_string(line_no) +
                             ": self-edges are not allowed");
        PrecedenceEdge e;
        e.dependent = static_cast<int>(i - 1);
        e.target = static_cast<int>(j - 1);
        if (fields[2] == "precedes")
            e.kind = PrecedenceKind::Precedes;
        else if (fields[2] == "conflicts")
            e.kind = PrecedenceKind::Conflicts;
        else
            throw ParseError("precedence file row " + std::to_string(line_no) +
                             ": kind must be precedes or conflicts, got \"" + fields[2] + "\"");
        g.edges.push_back(e);
    }
    return g;
}

}  // namespace dars
