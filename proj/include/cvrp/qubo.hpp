#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cvrp/common.hpp"

namespace cvrp {

// What a binary variable stands for in a routing model. Generic models may
// leave everything but `kind` unused.
struct VarLabel {
    std::string kind;  // "edge", "order", "slack", "var", ...
    int truck = -1;
    int from = -1;  // order vars: customer id; slack vars: group id
    int to = -1;    // slack/order vars: bit index

    std::string to_string() const;
};

struct PenaltyWeights {
    double lambda_visit = 0.0;
    double lambda_depot = 0.0;
    double lambda_flow = 0.0;
    double lambda_capacity = 0.0;
    double lambda_subtour = 0.0;
    double big_B = 0.0;

    void validate() const;

    // Defaults scaled so that a single unit constraint violation always costs
    // more than any tour-cost saving: lambdas = 2 * max_edge_cost * n, B = n.
    static PenaltyWeights defaults(int max_edge_cost, int num_nodes);
};

// Upper-triangular QUBO: offset + sum h_i b_i + sum_{i<j} q_ij b_i b_j.
// Diagonal quadratic terms fold into the linear part (x^2 = x for binary x).
class QuboModel {
public:
    QuboModel() = default;

    int add_variable(VarLabel label);
    int num_vars() const { return static_cast<int>(labels_.size()); }

    void add_offset(double v) { offset_ += v; }
    void add_linear(int i, double coeff);
    void add_quadratic(int i, int j, double coeff);

    double offset() const { return offset_; }
    double linear(int i) const;
    double quadratic(int i, int j) const;  // symmetric lookup
    const VarLabel& label(int i) const { return labels_.at(static_cast<size_t>(i)); }

    const std::unordered_map<int, double>& linear_terms() const { return linear_; }
    const std::unordered_map<std::uint64_t, double>& quadratic_terms() const {
        return quadratic_;
    }

    double energy(std::span<const std::uint8_t> bits) const;

    // weight * (sum coeff_i * x_i + constant)^2, expanded into the model.
    void add_squared_equality_penalty(
        const std::vector<std::pair<int, double>>& terms, double constant,
        double weight);

    // Encodes sum terms <= bound (non-negative integer coefficients) by
    // introducing binary slack y with coefficients 2^k, the last trimmed so
    // the slack range is exactly [0, bound], then squaring the equality.
    // Returns the new slack variable ids.
    std::vector<int> add_inequality_penalty_with_slack(
        const std::vector<std::pair<int, double>>& terms, long long bound,
        double weight, const std::string& slack_kind = "slack",
        int slack_group = -1);

    // Binary slack coefficients covering [0, bound] exactly.
    static std::vector<long long> slack_coefficients(long long bound);

    void dump(std::ostream& out) const;
    std::string dump() const;
    static QuboModel parse_dump(std::istream& in);

private:
    static std::uint64_t key(int i, int j);

    double offset_ = 0.0;
    std::unordered_map<int, double> linear_;
    std::unordered_map<std::uint64_t, double> quadratic_;
    std::vector<VarLabel> labels_;
};

}  // namespace cvrp
