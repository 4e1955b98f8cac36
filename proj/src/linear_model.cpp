#include "dars/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dars/errors.hpp"
#include "dars/io.hpp"

namespace dars {

namespace {
constexpr double kTol = kObjectiveTolerance;
}

int LinearModel::var_index(VarKind kind, int requirement) const {
    for (std::size_t v = 0; v < variables.size(); ++v) {
        if (variables[v].kind == kind && variables[v].index == requirement)
            return static_cast<int>(v);
    }
    throw std::out_of_range("no such variable in the linear model");
}

LinearModel linearized_model(const SelectionProblem& problem) {
    problem.validate();
    const int n = problem.size();
    LinearModel model;
    model.n = n;
    model.maximize = true;

    auto add_var = [&](const std::string& prefix, VarKind kind, int i, bool binary) {
        model.variables.push_back({prefix + std::to_string(i + 1), kind, i, binary, 0.0, 1.0});
        return static_cast<int>(model.variables.size()) - 1;
    };
    std::vector<int> x(n), g(n), y(n), t(n);
    for (int i = 0; i < n; ++i) x[i] = add_var("x", VarKind::Select, i, true);
    for (int i = 0; i < n; ++i) g[i] = add_var("g", VarKind::Guard, i, true);
    for (int i = 0; i < n; ++i) y[i] = add_var("y", VarKind::PenaltyProduct, i, false);
    for (int i = 0; i < n; ++i) t[i] = add_var("t", VarKind::Penalty, i, false);

    for (int i = 0; i < n; ++i) {
        const double w = problem.weight(i);
        model.objective.push_back({x[i], w});
        model.objective.push_back({y[i], -w});
    }

    LinearRow budget{"budget", {}, RowSense::LessEqual, problem.budget};
    for (int i = 0; i < n; ++i)
        budget.terms.push_back({x[i], problem.requirements[i].cost});
    model.rows.push_back(std::move(budget));

    if (problem.value_cap) {
        LinearRow cap{"valuecap", {}, RowSense::LessEqual, *problem.value_cap};
        for (int i = 0; i < n; ++i)
            cap.terms.push_back({x[i], problem.requirements[i].value});
        model.rows.push_back(std::move(cap));
    }

    int edge_no = 0;
    for (const auto& e : problem.precedence.edges) {
        ++edge_no;
        if (e.kind == PrecedenceKind::Precedes) {
            // x_dep <= x_target
            model.rows.push_back({"prec" + std::to_string(edge_no),
                                  {{x[e.dependent], 1.0}, {x[e.target], -1.0}},
                                  RowSense::LessEqual,
                                  0.0});
        } else {
            // x_dep + x_target <= 1
            model.rows.push_back({"conf" + std::to_string(edge_no),
                                  {{x[e.dependent], 1.0}, {x[e.target], 1.0}},
                                  RowSense::LessEqual,
                                  1.0});
        }
    }

    // penalty lower bounds: t_i + I_ij x_j >= (|I_ij| + I_ij)/2 for all ordered pairs
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double inf_ij = problem.influence(i, j);
            model.rows.push_back({"pen" + std::to_string(i + 1) + "_" + std::to_string(j + 1),
                                  {{t[i], 1.0}, {x[j], inf_ij}},
                                  RowSense::GreaterEqual,
                                  (std::fabs(inf_ij) + inf_ij) / 2.0});
        }
    }

    for (int i = 0; i < n; ++i) {
        const std::string s = std::to_string(i + 1);
        // -g <= x <= g and g <= x <= 2 - g  (together: x = g)
        model.rows.push_back(
            {"xg_lo" + s, {{x[i], -1.0}, {g[i], -1.0}}, RowSense::LessEqual, 0.0});
        model.rows.push_back(
            {"xg_hi" + s, {{x[i], 1.0}, {g[i], -1.0}}, RowSense::LessEqual, 0.0});
        model.rows.push_back(
            {"gx_lo" + s, {{x[i], 1.0}, {g[i], -1.0}}, RowSense::GreaterEqual, 0.0});
        model.rows.push_back(
            {"gx_hi" + s, {{x[i], 1.0}, {g[i], 1.0}}, RowSense::LessEqual, 2.0});
        // -g <= y <= g
        model.rows.push_back(
            {"yg_lo" + s, {{y[i], -1.0}, {g[i], -1.0}}, RowSense::LessEqual, 0.0});
        model.rows.push_back(
            {"yg_hi" + s, {{y[i], 1.0}, {g[i], -1.0}}, RowSense::LessEqual, 0.0});
        // -(1-g) <= y - t <= 1 - g
        model.rows.push_back({"yt_lo" + s,
                              {{y[i], 1.0}, {t[i], -1.0}, {g[i], -1.0}},
                              RowSense::GreaterEqual,
                              -1.0});
        model.rows.push_back({"yt_hi" + s,
                              {{y[i], 1.0}, {t[i], -1.0}, {g[i], 1.0}},
                              RowSense::LessEqual,
                              1.0});
    }
    return model;
}

namespace {

void append_terms(std::ostringstream& out, const LinearModel& model,
                  const std::vector<LinearTerm>& terms) {
    bool first = true;
    for (const auto& term : terms) {
        const double c = term.coefficient;
        if (first) {
            if (c < 0.0) out << "- ";
            first = false;
        } else {
            out << (c < 0.0 ? " - " : " + ");
        }
        const double mag = std::fabs(c);
        if (mag != 1.0) out << format_g9(mag) << ' ';
        out << model.variables[term.var].name;
    }
    if (first) out << '0';
}

}  // namespace

std::string to_lp_format(const LinearModel& model) {
    std::ostringstream out;
    out << (model.maximize ? "Maximize" : "Minimize") << '\n' << " obj: ";
    append_terms(out, model, model.objective);
    out << "\nSubject To\n";
    for (const auto& row : model.rows) {
        out << ' ' << row.name << ": ";
        append_terms(out, model, row.terms);
        out << (row.sense == RowSense::LessEqual ? " <= " : " >= ") << format_g9(row.rhs) << '\n';
    }
    out << "Bounds\n";
    for (const auto& v : model.variables) {
        if (v.binary) continue;
        out << ' ' << format_g9(v.lower) << " <= " << v.name << " <= " << format_g9(v.upper)
            << '\n';
    }
    out << "Binaries\n ";
    bool first = true;
    for (const auto& v : model.variables) {
        if (!v.binary) continue;
        if (!first) out << ' ';
        out << v.name;
        first = false;
    }
    out << "\nEnd\n";
    return out.str();
}

namespace {

// Row bookkeeping for the enumerative solve: a row can be checked as soon as all
// binary variables it touches are assigned, provided it has no continuous part.
struct RowInfo {
    int last_binary_order = -1;  // deepest decision position among its binaries
    bool continuous_free = true;
};

}  // namespace

LinearSolveResult solve_linearized(const LinearModel& model) {
    const int n = model.n;
    const int nvars = static_cast<int>(model.variables.size());
    std::vector<int> binaries;
    for (int v = 0; v < nvars; ++v)
        if (model.variables[v].binary) binaries.push_back(v);
    const int nbin = static_cast<int>(binaries.size());
    if (nbin > 40) {
        throw CapacityError("linearized solve limited to 40 binary variables, got " +
                            std::to_string(nbin));
    }

    // decide x_i and g_i adjacently so the coupling rows prune g != x immediately
    std::vector<int> decision_order;
    decision_order.reserve(nbin);
    {
        std::vector<int> xs, gs, rest;
        for (int v : binaries) {
            if (model.variables[v].kind == VarKind::Select)
                xs.push_back(v);
            else if (model.variables[v].kind == VarKind::Guard)
                gs.push_back(v);
            else
                rest.push_back(v);
        }
        for (std::size_t i = 0; i < xs.size(); ++i) {
            decision_order.push_back(xs[i]);
            if (i < gs.size()) decision_order.push_back(gs[i]);
        }
        for (std::size_t i = xs.size(); i < gs.size(); ++i) decision_order.push_back(gs[i]);
        for (int v : rest) decision_order.push_back(v);
    }
    std::vector<int> order_of(nvars, -1);
    for (int pos = 0; pos < nbin; ++pos) order_of[decision_order[pos]] = pos;

    std::vector<RowInfo> info(model.rows.size());
    for (std::size_t r = 0; r < model.rows.size(); ++r) {
        for (const auto& term : model.rows[r].terms) {
            if (model.variables[term.var].binary) {
                info[r].last_binary_order = std::max(info[r].last_binary_order,
                                                     order_of[term.var]);
            } else {
                info[r].continuous_free = false;
            }
        }
    }
    std::vector<std::vector<int>> rows_at(nbin);
    for (std::size_t r = 0; r < model.rows.size(); ++r) {
        if (info[r].continuous_free && info[r].last_binary_order >= 0)
            rows_at[info[r].last_binary_order].push_back(static_cast<int>(r));
    }

    // rows that bound a single penalty variable from below, bucketed by it
    std::vector<std::vector<int>> penalty_rows(nvars);
    for (std::size_t r = 0; r < model.rows.size(); ++r) {
        const auto& row = model.rows[r];
        if (row.sense != RowSense::GreaterEqual) continue;
        int t_var = -1;
        double t_coef = 0.0;
        bool other_continuous = false;
        for (const auto& term : row.terms) {
            if (model.variables[term.var].binary) continue;
            if (t_var == -1 && model.variables[term.var].kind == VarKind::Penalty) {
                t_var = term.var;
                t_coef = term.coefficient;
            } else {
                other_continuous = true;
            }
        }
        if (t_var != -1 && !other_continuous && t_coef > 0.0)
            penalty_rows[t_var].push_back(static_cast<int>(r));
    }

    std::vector<double> assign(nvars, 0.0);
    double best_obj = -std::numeric_limits<double>::infinity();
    std::vector<double> best_assign;

    auto row_ok = [&](const LinearRow& row) {
        double lhs = 0.0;
        for (const auto& term : row.terms) lhs += term.coefficient * assign[term.var];
        return row.sense == RowSense::LessEqual ? lhs <= row.rhs + kTol : lhs >= row.rhs - kTol;
    };

    auto leaf = [&]() {
        // greedy continuous resolution: theta at its lower envelope, y following
        // the guard; then every row is verified against the candidate.
        for (int i = 0; i < n; ++i) {
            const int ti = model.var_index(VarKind::Penalty, i);
            double lb = 0.0;
            for (int r : penalty_rows[ti]) {
                const auto& row = model.rows[r];
                double binary_part = 0.0;
                double t_coef = 1.0;
                for (const auto& term : row.terms) {
                    if (term.var == ti)
                        t_coef = term.coefficient;
                    else
                        binary_part += term.coefficient * assign[term.var];
                }
                lb = std::max(lb, (row.rhs - binary_part) / t_coef);
            }
            assign[ti] = lb;
            const int yi = model.var_index(VarKind::PenaltyProduct, i);
            const int gi = model.var_index(VarKind::Guard, i);
            assign[yi] = assign[gi] > 0.5 ? lb : 0.0;
        }
        for (int v = 0; v < nvars; ++v) {
            const auto& var = model.variables[v];
            if (!var.binary && (assign[v] < var.lower - kTol || assign[v] > var.upper + kTol))
                return;
        }
        for (const auto& row : model.rows)
            if (!row_ok(row)) return;
        double obj = 0.0;
        for (const auto& term : model.objective) obj += term.coefficient * assign[term.var];
        if (!model.maximize) obj = -obj;
        if (obj > best_obj + kTol) {
            best_obj = obj;
            best_assign = assign;
        }
    };

    // depth-first over the binaries, zero branch first so the first optimum found
    // is the lexicographically smallest
    auto dfs = [&](auto&& self, int depth) -> void {
        if (depth == nbin) {
            leaf();
            return;
        }
        for (int choice = 0; choice <= 1; ++choice) {
            assign[decision_order[depth]] = choice;
            bool ok = true;
            for (int r : rows_at[depth]) {
                if (!row_ok(model.rows[r])) {
                    ok = false;
                    break;
                }
            }
            if (ok) self(self, depth + 1);
        }
        assign[decision_order[depth]] = 0.0;
    };
    dfs(dfs, 0);

    LinearSolveResult best;
    if (best_assign.empty()) return best;
    best.feasible = true;
    best.objective = model.maximize ? best_obj : -best_obj;
    best.x.resize(n);
    best.g.resize(n);
    best.y.resize(n);
    best.theta.resize(n);
    for (int i = 0; i < n; ++i) {
        best.x[i] = best_assign[model.var_index(VarKind::Select, i)] > 0.5 ? 1 : 0;
        best.g[i] = best_assign[model.var_index(VarKind::Guard, i)] > 0.5 ? 1 : 0;
        best.y[i] = best_assign[model.var_index(VarKind::PenaltyProduct, i)];
        best.theta[i] = best_assign[model.var_index(VarKind::Penalty, i)];
    }
    return best;
}

}  // namespace dars
