#pragma once

#include <map>
#include <string>
#include <vector>

#include "cvrp/instance.hpp"
#include "cvrp/qubo.hpp"

namespace cvrp {

struct RoutingNode {
    Point point;
    int demand = 0;
};

// A routing stage input: node 0 is the depot (or a cluster's anchor).
struct RoutingProblem {
    std::vector<RoutingNode> nodes;
    std::vector<std::vector<int>> cost;  // symmetric, zero diagonal
    int truck_count = 1;
    long long truck_capacity = 0;
    PenaltyWeights weights;
    bool depot_return_penalty = true;  // mirror of the depot-departure term
    int variable_budget = 60000;

    int size() const { return static_cast<int>(nodes.size()); }
    void validate() const;

    // Builds the rounded-distance cost matrix and default penalty weights.
    static RoutingProblem make(std::vector<RoutingNode> nodes, int truck_count,
                               long long truck_capacity);
};

// Bijection between (truck, from, to) edge variables / order bits and flat
// variable ids. Slack ids live past structural_vars().
class VariableIndex {
public:
    VariableIndex() = default;
    VariableIndex(int num_nodes, int truck_count);

    int num_nodes() const { return n_; }
    int truck_count() const { return p_; }
    int edge_var(int truck, int from, int to) const;
    int order_bits() const { return order_bits_; }
    const std::vector<long long>& order_coeffs() const { return order_coeffs_; }
    int order_var(int customer, int truck, int bit) const;
    int edge_var_count() const { return p_ * n_ * (n_ - 1); }
    int structural_vars() const { return edge_var_count() + (n_ - 1) * p_ * order_bits_; }

private:
    int n_ = 0;
    int p_ = 0;
    int order_bits_ = 0;
    std::vector<long long> order_coeffs_;  // order = 1 + sum coeff*bit, range [1, n-1]
};

// One squared penalty expression: weight * (sum terms + constant)^2.
struct PenaltyGroup {
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;
    double weight = 1.0;

    double violation(std::span<const std::uint8_t> bits) const;
};

struct PenaltyFamily {
    std::string name;
    std::vector<PenaltyGroup> groups;

    double energy(std::span<const std::uint8_t> bits) const;
};

// Inequality group metadata used to fill slack bits when encoding routes.
struct SlackGroup {
    std::vector<std::pair<int, double>> structural_terms;
    double constant = 0.0;
    std::vector<int> slack_ids;
    std::vector<long long> slack_coeffs;
};

struct RouteSolution {
    std::vector<std::vector<int>> routes;  // per truck, customer ids in visit order
    long long total_cost = 0;
    std::map<std::string, double> penalty_breakdown;
    bool feasible = false;
    bool repaired = false;
    std::vector<std::string> issues;  // per-truck malformation reports
    std::string infeasibility_reason;

    std::string to_json() const;
};

// A built routing QUBO together with everything needed to decode, encode
// and score bitstrings against the individual constraint families.
struct CvrpQubo {
    RoutingProblem problem;
    VariableIndex index;
    QuboModel model;
    PenaltyFamily visit, depot, flow, capacity, subtour;
    std::vector<SlackGroup> slack_groups;

    std::vector<const PenaltyFamily*> families() const {
        return {&visit, &depot, &flow, &capacity, &subtour};
    }
    std::map<std::string, double> penalty_energies(
        std::span<const std::uint8_t> bits) const;
};

// Full CVRP model: edge-cost objective, single-visit, depot departure
// (+ mirrored return), per-truck flow balance, capacity with binary slack,
// and per-truck MTZ order variables for subtour elimination.
CvrpQubo build_cvrp_qubo(const RoutingProblem& problem);

// Single truck, capacity constraint removed; everything else identical.
CvrpQubo build_tsp_qubo(const RoutingProblem& problem);
CvrpQubo build_tsp_qubo(const std::vector<Point>& points,
                        const std::vector<std::vector<int>>& cost);
CvrpQubo build_tsp_qubo(const std::vector<Point>& points);

RouteSolution decode(const CvrpQubo& qubo, std::span<const std::uint8_t> bits);

// Inverse of decode for well-formed routes: sets edge, order and slack bits
// so that every satisfied constraint contributes zero energy.
std::vector<std::uint8_t> encode(const CvrpQubo& qubo,
                                 const std::vector<std::vector<int>>& routes);

// Drops duplicate visits (keeping the cheaper one) and inserts unvisited
// customers at their cheapest capacity-feasible position. Feasible inputs
// pass through unchanged; unrepairable inputs come back with a reason.
RouteSolution greedy_repair(const RouteSolution& solution, const CvrpQubo& qubo);

}  // namespace cvrp
