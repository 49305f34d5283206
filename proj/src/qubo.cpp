#include "cvrp/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace cvrp {

std::string VarLabel::to_string() const {
    std::string s = kind;
    if (truck >= 0) s += " " + std::to_string(truck);
    if (from >= 0) s += " " + std::to_string(from);
    if (to >= 0) s += " " + std::to_string(to);
    return s;
}

void PenaltyWeights::validate() const {
    for (double v : {lambda_visit, lambda_depot, lambda_flow, lambda_capacity,
                     lambda_subtour, big_B}) {
        if (!(v > 0.0)) throw ArgumentError("penalty weights must be strictly positive");
    }
}

PenaltyWeights PenaltyWeights::defaults(int max_edge_cost, int num_nodes) {
    double lambda = 2.0 * std::max(1, max_edge_cost) * std::max(2, num_nodes);
    PenaltyWeights w;
    w.lambda_visit = w.lambda_depot = w.lambda_flow = w.lambda_capacity =
        w.lambda_subtour = lambda;
    w.big_B = std::max(2, num_nodes);
    return w;
}

std::uint64_t QuboModel::key(int i, int j) {
    if (i > j) std::swap(i, j);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
           static_cast<std::uint32_t>(j);
}

int QuboModel::add_variable(VarLabel label) {
    labels_.push_back(std::move(label));
    return static_cast<int>(labels_.size()) - 1;
}

void QuboModel::add_linear(int i, double coeff) {
    if (i < 0 || i >= num_vars()) throw ArgumentError("variable index out of range");
    if (coeff == 0.0) return;
    linear_[i] += coeff;
}

void QuboModel::add_quadratic(int i, int j, double coeff) {
    if (i < 0 || j < 0 || i >= num_vars() || j >= num_vars())
        throw ArgumentError("variable index out of range");
    if (coeff == 0.0) return;
    if (i == j) {
        linear_[i] += coeff;  // x^2 = x
        return;
    }
    quadratic_[key(i, j)] += coeff;
}

double QuboModel::linear(int i) const {
    auto it = linear_.find(i);
    return it == linear_.end() ? 0.0 : it->second;
}

double QuboModel::quadratic(int i, int j) const {
    auto it = quadratic_.find(key(i, j));
    return it == quadratic_.end() ? 0.0 : it->second;
}

double QuboModel::energy(std::span<const std::uint8_t> bits) const {
    if (static_cast<int>(bits.size()) != num_vars())
        throw ArgumentError("bit vector length " + std::to_string(bits.size()) +
                            " does not match num_vars " +
                            std::to_string(num_vars()));
    double e = offset_;
    for (const auto& [i, h] : linear_) {
        if (bits[static_cast<size_t>(i)]) e += h;
    }
    for (const auto& [k, q] : quadratic_) {
        int i = static_cast<int>(k >> 32);
        int j = static_cast<int>(k & 0xffffffffULL);
        if (bits[static_cast<size_t>(i)] && bits[static_cast<size_t>(j)]) e += q;
    }
    return e;
}

void QuboModel::add_squared_equality_penalty(
    const std::vector<std::pair<int, double>>& terms, double constant,
    double weight) {
    if (!(weight > 0.0)) throw ArgumentError("penalty weight must be positive");
    add_offset(weight * constant * constant);
    for (size_t a = 0; a < terms.size(); ++a) {
        const auto& [i, ci] = terms[a];
        add_linear(i, weight * (ci * ci + 2.0 * constant * ci));
        for (size_t b = a + 1; b < terms.size(); ++b) {
            const auto& [j, cj] = terms[b];
            add_quadratic(i, j, weight * 2.0 * ci * cj);
        }
    }
}

std::vector<long long> QuboModel::slack_coefficients(long long bound) {
    std::vector<long long> coeffs;
    if (bound <= 0) return coeffs;
    long long pow_sum = 0;  // 2^0 + ... + 2^(k-1)
    for (long long c = 1; pow_sum + c < bound; c <<= 1) {
        coeffs.push_back(c);
        pow_sum += c;
    }
    coeffs.push_back(bound - pow_sum);  // trimmed so max slack == bound
    return coeffs;
}

std::vector<int> QuboModel::add_inequality_penalty_with_slack(
    const std::vector<std::pair<int, double>>& terms, long long bound,
    double weight, const std::string& slack_kind, int slack_group) {
    if (bound < 0) throw ArgumentError("inequality bound must be >= 0");
    for (const auto& [i, c] : terms) {
        (void)i;
        if (c < 0.0 || c != std::floor(c))
            throw ArgumentError("inequality coefficients must be non-negative integers");
    }
    std::vector<int> slack_ids;
    auto all_terms = terms;
    const auto coeffs = slack_coefficients(bound);
    for (size_t k = 0; k < coeffs.size(); ++k) {
        int id = add_variable(
            {slack_kind, -1, slack_group, static_cast<int>(k)});
        slack_ids.push_back(id);
        all_terms.emplace_back(id, static_cast<double>(coeffs[k]));
    }
    add_squared_equality_penalty(all_terms, -static_cast<double>(bound), weight);
    return slack_ids;
}

void QuboModel::dump(std::ostream& out) const {
    out << "# qubo num_vars " << num_vars() << "\n";
    out << std::setprecision(17);
    out << "# offset " << offset_ << "\n";
    for (int i = 0; i < num_vars(); ++i) {
        out << "# label " << i << " " << labels_[static_cast<size_t>(i)].to_string()
            << "\n";
    }
    std::vector<std::pair<int, double>> lin(linear_.begin(), linear_.end());
    std::sort(lin.begin(), lin.end());
    for (const auto& [i, h] : lin) out << i << " " << i << " " << h << "\n";
    std::vector<std::pair<std::uint64_t, double>> quad(quadratic_.begin(),
                                                       quadratic_.end());
    std::sort(quad.begin(), quad.end());
    for (const auto& [k, q] : quad) {
        out << static_cast<int>(k >> 32) << " "
            << static_cast<int>(k & 0xffffffffULL) << " " << q << "\n";
    }
}

std::string QuboModel::dump() const {
    std::ostringstream out;
    dump(out);
    return out.str();
}

QuboModel QuboModel::parse_dump(std::istream& in) {
    QuboModel m;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        if (line[0] == '#') {
            std::string hash, kw;
            fields >> hash >> kw;
            if (kw == "qubo") fields >> kw;  // "# qubo num_vars N" header
            if (kw == "num_vars") {
                int n = 0;
                fields >> n;
                while (m.num_vars() < n) m.add_variable({"var"});
            } else if (kw == "offset") {
                double v = 0;
                fields >> v;
                m.offset_ = v;
            } else if (kw == "label") {
                int i = 0;
                fields >> i;
                VarLabel lab;
                fields >> lab.kind;
                fields >> lab.truck >> lab.from >> lab.to;
                if (i >= 0 && i < m.num_vars())
                    m.labels_[static_cast<size_t>(i)] = lab;
            }
            continue;
        }
        int i = 0, j = 0;
        double c = 0;
        if (!(fields >> i >> j >> c))
            throw ParseError("malformed qubo dump line: " + line);
        if (i == j) m.add_linear(i, c);
        else m.add_quadratic(i, j, c);
    }
    return m;
}

}  // namespace cvrp
