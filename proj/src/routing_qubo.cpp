#include "cvrp/routing_qubo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

namespace cvrp {

void RoutingProblem::validate() const {
    const int n = size();
    if (n < 2) throw ArgumentError("routing problem needs at least 2 nodes");
    if (truck_count < 1) throw ArgumentError("truck count must be >= 1");
    if (static_cast<int>(cost.size()) != n)
        throw ArgumentError("cost matrix size mismatch");
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(cost[static_cast<size_t>(i)].size()) != n)
            throw ArgumentError("cost matrix is not square");
        if (cost[static_cast<size_t>(i)][static_cast<size_t>(i)] != 0)
            throw ArgumentError("cost matrix diagonal must be zero");
        for (int j = i + 1; j < n; ++j)
            if (cost[static_cast<size_t>(i)][static_cast<size_t>(j)] !=
                cost[static_cast<size_t>(j)][static_cast<size_t>(i)])
                throw ArgumentError("cost matrix must be symmetric");
    }
    weights.validate();
    if (std::llround(weights.big_B) < n - 1)
        throw ArgumentError("big_B must be at least n-1 for a sound MTZ encoding");
}

RoutingProblem RoutingProblem::make(std::vector<RoutingNode> nodes,
                                    int truck_count, long long truck_capacity) {
    RoutingProblem p;
    const int n = static_cast<int>(nodes.size());
    p.nodes = std::move(nodes);
    p.truck_count = truck_count;
    p.truck_capacity = truck_capacity;
    p.cost.assign(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(n), 0));
    int max_cost = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            int d = distance(p.nodes[static_cast<size_t>(i)].point,
                             p.nodes[static_cast<size_t>(j)].point);
            p.cost[static_cast<size_t>(i)][static_cast<size_t>(j)] = d;
            p.cost[static_cast<size_t>(j)][static_cast<size_t>(i)] = d;
            max_cost = std::max(max_cost, d);
        }
    }
    p.weights = PenaltyWeights::defaults(max_cost, n);
    return p;
}

VariableIndex::VariableIndex(int num_nodes, int truck_count)
    : n_(num_nodes), p_(truck_count) {
    order_coeffs_ = QuboModel::slack_coefficients(n_ - 2);
    order_bits_ = static_cast<int>(order_coeffs_.size());
}

int VariableIndex::edge_var(int truck, int from, int to) const {
    if (from == to || truck < 0 || truck >= p_ || from < 0 || from >= n_ ||
        to < 0 || to >= n_)
        throw ArgumentError("bad edge variable request");
    return truck * n_ * (n_ - 1) + from * (n_ - 1) + (to < from ? to : to - 1);
}

int VariableIndex::order_var(int customer, int truck, int bit) const {
    if (customer < 1 || customer >= n_ || truck < 0 || truck >= p_ || bit < 0 ||
        bit >= order_bits_)
        throw ArgumentError("bad order variable request");
    return edge_var_count() + ((customer - 1) * p_ + truck) * order_bits_ + bit;
}

double PenaltyGroup::violation(std::span<const std::uint8_t> bits) const {
    double v = constant;
    for (const auto& [i, c] : terms)
        if (bits[static_cast<size_t>(i)]) v += c;
    return v;
}

double PenaltyFamily::energy(std::span<const std::uint8_t> bits) const {
    double e = 0.0;
    for (const auto& g : groups) {
        const double v = g.violation(bits);
        e += g.weight * v * v;
    }
    return e;
}

std::map<std::string, double> CvrpQubo::penalty_energies(
    std::span<const std::uint8_t> bits) const {
    std::map<std::string, double> out;
    for (const auto* f : families()) out[f->name] = f->energy(bits);
    return out;
}

namespace {

void add_group(QuboModel& model, PenaltyFamily& family,
               std::vector<std::pair<int, double>> terms, double constant,
               double weight) {
    model.add_squared_equality_penalty(terms, constant, weight);
    family.groups.push_back({std::move(terms), constant, weight});
}

// Inequality sum(terms) + constant <= 0 with terms of either sign; slack
// bound must cover the most negative achievable value of the left side.
void add_signed_inequality(CvrpQubo& q, PenaltyFamily& family,
                           std::vector<std::pair<int, double>> structural,
                           double constant, long long slack_bound,
                           double weight, const std::string& slack_kind,
                           int group_id) {
    SlackGroup sg;
    sg.structural_terms = structural;
    sg.constant = constant;
    sg.slack_coeffs = QuboModel::slack_coefficients(slack_bound);
    auto all_terms = std::move(structural);
    for (size_t k = 0; k < sg.slack_coeffs.size(); ++k) {
        int id = q.model.add_variable(
            {slack_kind, -1, group_id, static_cast<int>(k)});
        sg.slack_ids.push_back(id);
        all_terms.emplace_back(id, static_cast<double>(sg.slack_coeffs[k]));
    }
    add_group(q.model, family, std::move(all_terms), constant, weight);
    q.slack_groups.push_back(std::move(sg));
}

long long projected_var_count(const RoutingProblem& problem, bool with_capacity) {
    const long long n = problem.size();
    const long long p = problem.truck_count;
    const long long b =
        static_cast<long long>(QuboModel::slack_coefficients(n - 2).size());
    const long long B = std::llround(problem.weights.big_B);
    const long long mtz_bits =
        static_cast<long long>(QuboModel::slack_coefficients(n + B - 3).size());
    long long total = p * n * (n - 1) + (n - 1) * p * b +
                      p * (n - 1) * (n - 2) * mtz_bits;
    if (with_capacity)
        total += p * static_cast<long long>(
                         QuboModel::slack_coefficients(problem.truck_capacity).size());
    return total;
}

CvrpQubo build_routing_qubo(const RoutingProblem& problem, bool with_capacity) {
    problem.validate();
    const int n = problem.size();
    const int p = problem.truck_count;
    const auto& w = problem.weights;

    if (projected_var_count(problem, with_capacity) > problem.variable_budget)
        throw SizeError(
            "routing QUBO needs " +
            std::to_string(projected_var_count(problem, with_capacity)) +
            " variables, over the budget of " +
            std::to_string(problem.variable_budget) +
            "; decompose the instance cluster-first before building");

    CvrpQubo q;
    q.problem = problem;
    q.index = VariableIndex(n, p);
    q.visit.name = "visit";
    q.depot.name = "depot";
    q.flow.name = "flow";
    q.capacity.name = "capacity";
    q.subtour.name = "subtour";

    // structural variables, in index order
    for (int r = 0; r < p; ++r)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) q.model.add_variable({"edge", r, i, j});
    for (int i = 1; i < n; ++i)
        for (int r = 0; r < p; ++r)
            for (int t = 0; t < q.index.order_bits(); ++t)
                q.model.add_variable({"order", r, i, t});

    // objective: sum of traversed edge costs, unweighted
    for (int r = 0; r < p; ++r)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j)
                    q.model.add_linear(
                        q.index.edge_var(r, i, j),
                        static_cast<double>(
                            problem.cost[static_cast<size_t>(i)][static_cast<size_t>(j)]));

    // each customer entered exactly once across all trucks
    for (int j = 1; j < n; ++j) {
        std::vector<std::pair<int, double>> terms;
        for (int r = 0; r < p; ++r)
            for (int i = 0; i < n; ++i)
                if (i != j) terms.emplace_back(q.index.edge_var(r, i, j), 1.0);
        add_group(q.model, q.visit, std::move(terms), -1.0, w.lambda_visit);
    }

    // each truck leaves the depot exactly once (and mirrored: returns once)
    for (int r = 0; r < p; ++r) {
        std::vector<std::pair<int, double>> out_terms, in_terms;
        for (int j = 1; j < n; ++j) {
            out_terms.emplace_back(q.index.edge_var(r, 0, j), 1.0);
            in_terms.emplace_back(q.index.edge_var(r, j, 0), 1.0);
        }
        add_group(q.model, q.depot, std::move(out_terms), -1.0, w.lambda_depot);
        if (problem.depot_return_penalty)
            add_group(q.model, q.depot, std::move(in_terms), -1.0, w.lambda_depot);
    }

    // flow balance per truck and node: in-degree equals out-degree
    for (int r = 0; r < p; ++r) {
        for (int j = 0; j < n; ++j) {
            std::vector<std::pair<int, double>> terms;
            for (int i = 0; i < n; ++i) {
                if (i == j) continue;
                terms.emplace_back(q.index.edge_var(r, i, j), 1.0);
                terms.emplace_back(q.index.edge_var(r, j, i), -1.0);
            }
            add_group(q.model, q.flow, std::move(terms), 0.0, w.lambda_flow);
        }
    }

    // capacity per truck, via non-negative slack expansion
    if (with_capacity) {
        for (int r = 0; r < p; ++r) {
            std::vector<std::pair<int, double>> terms;
            for (int j = 1; j < n; ++j) {
                const double d =
                    static_cast<double>(problem.nodes[static_cast<size_t>(j)].demand);
                if (d == 0.0) continue;
                for (int i = 0; i < n; ++i)
                    if (i != j) terms.emplace_back(q.index.edge_var(r, i, j), d);
            }
            add_signed_inequality(q, q.capacity, std::move(terms),
                                  -static_cast<double>(problem.truck_capacity),
                                  problem.truck_capacity, w.lambda_capacity,
                                  "cap_slack", r);
        }
    }

    // MTZ subtour elimination per truck: order(j) >= order(i) + 1 whenever
    // truck r drives i -> j, i.e. order(i) - order(j) + B*x <= B - 1.
    const long long B = std::llround(w.big_B);
    const auto& oc = q.index.order_coeffs();
    int group_id = 0;
    for (int r = 0; r < p; ++r) {
        for (int i = 1; i < n; ++i) {
            for (int j = 1; j < n; ++j) {
                if (i == j) continue;
                std::vector<std::pair<int, double>> terms;
                for (int t = 0; t < q.index.order_bits(); ++t) {
                    terms.emplace_back(q.index.order_var(i, r, t),
                                       static_cast<double>(oc[static_cast<size_t>(t)]));
                    terms.emplace_back(q.index.order_var(j, r, t),
                                       -static_cast<double>(oc[static_cast<size_t>(t)]));
                }
                terms.emplace_back(q.index.edge_var(r, i, j),
                                   static_cast<double>(B));
                // constant: the +1/-1 baselines of the two orders cancel;
                // left side must be <= B-1, slack covers [0, n+B-3]
                add_signed_inequality(q, q.subtour, std::move(terms),
                                      -static_cast<double>(B - 1),
                                      static_cast<long long>(n) + B - 3,
                                      w.lambda_subtour, "mtz_slack", group_id++);
            }
        }
    }

    return q;
}

}  // namespace

CvrpQubo build_cvrp_qubo(const RoutingProblem& problem) {
    return build_routing_qubo(problem, true);
}

CvrpQubo build_tsp_qubo(const RoutingProblem& problem) {
    if (problem.truck_count != 1)
        throw ArgumentError("TSP model requires exactly one truck");
    return build_routing_qubo(problem, false);
}

CvrpQubo build_tsp_qubo(const std::vector<Point>& points,
                        const std::vector<std::vector<int>>& cost) {
    if (points.size() < 2) throw ArgumentError("TSP needs at least 2 points");
    RoutingProblem p;
    p.nodes.reserve(points.size());
    for (const auto& pt : points) p.nodes.push_back({pt, 0});
    p.cost = cost;
    p.truck_count = 1;
    p.truck_capacity = 0;
    int max_cost = 0;
    for (const auto& row : cost)
        for (int v : row) max_cost = std::max(max_cost, v);
    p.weights = PenaltyWeights::defaults(max_cost, p.size());
    return build_routing_qubo(p, false);
}

CvrpQubo build_tsp_qubo(const std::vector<Point>& points) {
    std::vector<RoutingNode> nodes;
    nodes.reserve(points.size());
    for (const auto& pt : points) nodes.push_back({pt, 0});
    auto p = RoutingProblem::make(std::move(nodes), 1, 0);
    return build_routing_qubo(p, false);
}

RouteSolution decode(const CvrpQubo& qubo, std::span<const std::uint8_t> bits) {
    if (static_cast<int>(bits.size()) != qubo.model.num_vars())
        throw ArgumentError("bit vector length does not match the model");
    const int n = qubo.problem.size();
    const int p = qubo.problem.truck_count;

    RouteSolution sol;
    sol.routes.assign(static_cast<size_t>(p), {});
    for (int r = 0; r < p; ++r) {
        std::vector<int> successor(static_cast<size_t>(n), -1);
        int used_edges = 0;
        bool branching = false;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                if (!bits[static_cast<size_t>(qubo.index.edge_var(r, i, j))]) continue;
                ++used_edges;
                if (successor[static_cast<size_t>(i)] != -1) branching = true;
                successor[static_cast<size_t>(i)] = j;
            }
        }
        if (branching)
            sol.issues.push_back("truck " + std::to_string(r) +
                                 ": branching successor structure");

        std::vector<bool> seen(static_cast<size_t>(n), false);
        int walked = 0;
        if (successor[0] == -1) {
            if (used_edges > 0)
                sol.issues.push_back("truck " + std::to_string(r) +
                                     ": edges present but no depot departure");
        } else {
            int at = successor[0];
            ++walked;
            while (at != 0 && at != -1) {
                if (seen[static_cast<size_t>(at)]) {
                    sol.issues.push_back("truck " + std::to_string(r) +
                                         ": revisited node " + std::to_string(at));
                    break;
                }
                seen[static_cast<size_t>(at)] = true;
                sol.routes[static_cast<size_t>(r)].push_back(at);
                at = successor[static_cast<size_t>(at)];
                ++walked;
            }
            if (at == -1)
                sol.issues.push_back("truck " + std::to_string(r) +
                                     ": route dead-ends away from the depot");
        }
        if (walked < used_edges)
            sol.issues.push_back("truck " + std::to_string(r) +
                                 ": cycle disconnected from the depot");
    }

    // cost from the cost matrix over decoded depot-anchored walks
    long long cost = 0;
    for (const auto& route : sol.routes) {
        if (route.empty()) continue;
        int prev = 0;
        for (int node : route) {
            cost += qubo.problem.cost[static_cast<size_t>(prev)][static_cast<size_t>(node)];
            prev = node;
        }
        cost += qubo.problem.cost[static_cast<size_t>(prev)][0];
    }
    sol.total_cost = cost;

    sol.penalty_breakdown = qubo.penalty_energies(bits);
    sol.feasible = true;
    for (const auto& [name, e] : sol.penalty_breakdown) {
        (void)name;
        if (e > 1e-9) sol.feasible = false;
    }
    if (!sol.feasible && sol.infeasibility_reason.empty())
        sol.infeasibility_reason = "nonzero constraint penalties";
    if (sol.feasible) sol.infeasibility_reason.clear();
    return sol;
}

namespace {

// Greedy decomposition over trimmed power-of-two coefficients; exact for any
// value in [0, sum(coeffs)].
std::vector<std::uint8_t> decompose_slack(long long value,
                                          const std::vector<long long>& coeffs) {
    std::vector<std::uint8_t> bits(coeffs.size(), 0);
    if (coeffs.empty()) return bits;
    long long remaining = value;
    // the trimmed (last) coefficient first, then descending powers
    if (remaining >= coeffs.back()) {
        bits.back() = 1;
        remaining -= coeffs.back();
    }
    for (size_t k = coeffs.size() - 1; k-- > 0;) {
        if (remaining >= coeffs[k]) {
            bits[k] = 1;
            remaining -= coeffs[k];
        }
    }
    return bits;
}

}  // namespace

std::vector<std::uint8_t> encode(const CvrpQubo& qubo,
                                 const std::vector<std::vector<int>>& routes) {
    const int n = qubo.problem.size();
    const int p = qubo.problem.truck_count;
    if (static_cast<int>(routes.size()) != p)
        throw ArgumentError("route count does not match truck count");

    std::vector<std::uint8_t> bits(static_cast<size_t>(qubo.model.num_vars()), 0);
    const auto& oc = qubo.index.order_coeffs();

    for (int r = 0; r < p; ++r) {
        const auto& route = routes[static_cast<size_t>(r)];
        int prev = 0;
        for (size_t pos = 0; pos < route.size(); ++pos) {
            const int node = route[pos];
            if (node < 1 || node >= n)
                throw ArgumentError("route references unknown node id " +
                                    std::to_string(node));
            bits[static_cast<size_t>(qubo.index.edge_var(r, prev, node))] = 1;
            // order = 1 + position; all-zero order bits already mean order 1
            auto order_bits = decompose_slack(static_cast<long long>(pos),
                                              oc);
            for (size_t t = 0; t < order_bits.size(); ++t)
                if (order_bits[t])
                    bits[static_cast<size_t>(
                        qubo.index.order_var(node, r, static_cast<int>(t)))] = 1;
            prev = node;
        }
        if (!route.empty())
            bits[static_cast<size_t>(qubo.index.edge_var(r, prev, 0))] = 1;
    }

    // fill each slack register so satisfied inequalities score zero
    for (const auto& sg : qubo.slack_groups) {
        double lhs = sg.constant;
        for (const auto& [i, c] : sg.structural_terms)
            if (bits[static_cast<size_t>(i)]) lhs += c;
        long long want = std::llround(-lhs);
        long long bound = std::accumulate(sg.slack_coeffs.begin(),
                                          sg.slack_coeffs.end(), 0LL);
        want = std::clamp(want, 0LL, bound);
        auto slack_bits = decompose_slack(want, sg.slack_coeffs);
        for (size_t k = 0; k < slack_bits.size(); ++k)
            bits[static_cast<size_t>(sg.slack_ids[k])] = slack_bits[k];
    }
    return bits;
}

RouteSolution greedy_repair(const RouteSolution& solution, const CvrpQubo& qubo) {
    if (solution.feasible) return solution;

    const auto& problem = qubo.problem;
    const int n = problem.size();
    const auto& cost = problem.cost;
    auto routes = solution.routes;
    routes.resize(static_cast<size_t>(problem.truck_count));

    auto arc = [&](int a, int b) {
        return cost[static_cast<size_t>(a)][static_cast<size_t>(b)];
    };
    auto removal_saving = [&](const std::vector<int>& route, size_t pos) {
        const int prev = pos == 0 ? 0 : route[pos - 1];
        const int next = pos + 1 == route.size() ? 0 : route[pos + 1];
        return arc(prev, route[pos]) + arc(route[pos], next) - arc(prev, next);
    };

    // drop duplicate visits, keeping the occurrence that is cheapest to keep
    std::vector<int> count(static_cast<size_t>(n), 0);
    for (const auto& route : routes)
        for (int v : route) ++count[static_cast<size_t>(v)];
    for (int v = 1; v < n; ++v) {
        while (count[static_cast<size_t>(v)] > 1) {
            int best_r = -1;
            size_t best_pos = 0;
            int best_saving = -1;
            for (size_t r = 0; r < routes.size(); ++r) {
                for (size_t pos = 0; pos < routes[r].size(); ++pos) {
                    if (routes[r][pos] != v) continue;
                    int s = removal_saving(routes[r], pos);
                    if (s > best_saving) {
                        best_saving = s;
                        best_r = static_cast<int>(r);
                        best_pos = pos;
                    }
                }
            }
            routes[static_cast<size_t>(best_r)].erase(
                routes[static_cast<size_t>(best_r)].begin() +
                static_cast<std::ptrdiff_t>(best_pos));
            --count[static_cast<size_t>(v)];
        }
    }

    std::vector<long long> load(routes.size(), 0);
    for (size_t r = 0; r < routes.size(); ++r)
        for (int v : routes[r])
            load[r] += problem.nodes[static_cast<size_t>(v)].demand;
    const long long cap =
        problem.truck_capacity > 0 ? problem.truck_capacity
                                   : std::numeric_limits<long long>::max();

    // insert missing customers at their cheapest feasible position
    std::vector<int> missing;
    for (int v = 1; v < n; ++v)
        if (count[static_cast<size_t>(v)] == 0) missing.push_back(v);
    std::sort(missing.begin(), missing.end(), [&](int a, int b) {
        int da = problem.nodes[static_cast<size_t>(a)].demand;
        int db = problem.nodes[static_cast<size_t>(b)].demand;
        if (da != db) return da > db;
        return a < b;
    });
    for (int v : missing) {
        const int d = problem.nodes[static_cast<size_t>(v)].demand;
        int best_r = -1;
        size_t best_pos = 0;
        long long best_delta = std::numeric_limits<long long>::max();
        for (size_t r = 0; r < routes.size(); ++r) {
            if (load[r] + d > cap) continue;
            for (size_t pos = 0; pos <= routes[r].size(); ++pos) {
                const int prev = pos == 0 ? 0 : routes[r][pos - 1];
                const int next = pos == routes[r].size() ? 0 : routes[r][pos];
                const long long delta = arc(prev, v) + arc(v, next) - arc(prev, next);
                if (delta < best_delta) {
                    best_delta = delta;
                    best_r = static_cast<int>(r);
                    best_pos = pos;
                }
            }
        }
        if (best_r < 0) {
            RouteSolution out = solution;
            out.infeasibility_reason = "capacity";
            return out;
        }
        routes[static_cast<size_t>(best_r)].insert(
            routes[static_cast<size_t>(best_r)].begin() +
                static_cast<std::ptrdiff_t>(best_pos),
            v);
        load[static_cast<size_t>(best_r)] += d;
    }

    auto bits = encode(qubo, routes);
    RouteSolution out = decode(qubo, bits);
    out.repaired = true;
    if (!out.feasible && out.infeasibility_reason.empty())
        out.infeasibility_reason = "repair left nonzero penalties";
    return out;
}

std::string RouteSolution::to_json() const {
    nlohmann::json j;
    j["routes"] = routes;
    j["cost"] = total_cost;
    j["feasible"] = feasible;
    j["repaired"] = repaired;
    j["penalties"] = penalty_breakdown;
    if (!issues.empty()) j["issues"] = issues;
    if (!infeasibility_reason.empty()) j["reason"] = infeasibility_reason;
    return j.dump(2);
}

}  // namespace cvrp
