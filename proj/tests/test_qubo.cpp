#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "cvrp/qubo.hpp"
#include "cvrp/common.hpp"

using namespace cvrp;

namespace {

QuboModel with_vars(int n) {
    QuboModel m;
    for (int i = 0; i < n; ++i) m.add_variable({"var", -1, i, -1});
    return m;
}

// independent O(n^2) evaluation through the public accessors only
double naive_energy(const QuboModel& m, const std::vector<std::uint8_t>& bits) {
    double e = m.offset();
    for (int i = 0; i < m.num_vars(); ++i) {
        if (!bits[static_cast<size_t>(i)]) continue;
        e += m.linear(i);
        for (int j = i + 1; j < m.num_vars(); ++j)
            if (bits[static_cast<size_t>(j)]) e += m.quadratic(i, j);
    }
    return e;
}

std::vector<std::uint8_t> bits_of(std::uint32_t mask, int n) {
    std::vector<std::uint8_t> b(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) b[static_cast<size_t>(i)] = (mask >> i) & 1u;
    return b;
}

}  // namespace

TEST_CASE("energy evaluates offset + linear + quadratic") {
    QuboModel m = with_vars(2);
    m.add_linear(0, 1.0);
    m.add_linear(1, 3.0);
    m.add_quadratic(0, 1, -2.0);
    CHECK(m.energy(std::vector<std::uint8_t>{1, 1}) == 2.0);
    CHECK(m.energy(std::vector<std::uint8_t>{0, 0}) == 0.0);
    m.add_offset(7.0);
    CHECK(m.energy(std::vector<std::uint8_t>{0, 0}) == 7.0);
    CHECK_THROWS_AS(m.energy(std::vector<std::uint8_t>{0}), ArgumentError);
}

TEST_CASE("diagonal quadratic folds into linear") {
    QuboModel m = with_vars(1);
    m.add_quadratic(0, 0, 4.0);
    CHECK(m.linear(0) == 4.0);
    CHECK(m.energy(std::vector<std::uint8_t>{1}) == 4.0);
}

TEST_CASE("quadratic lookup is symmetric") {
    QuboModel m = with_vars(3);
    m.add_quadratic(2, 0, 5.0);
    CHECK(m.quadratic(0, 2) == 5.0);
    CHECK(m.quadratic(2, 0) == 5.0);
}

TEST_CASE("random 8-var model matches the naive evaluator") {
    Rng rng(99);
    QuboModel m = with_vars(8);
    for (int i = 0; i < 8; ++i)
        m.add_linear(i, std::floor(rng.uniform() * 11) - 5);
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j)
            if (rng.uniform() < 0.6)
                m.add_quadratic(i, j, std::floor(rng.uniform() * 11) - 5);
    m.add_offset(3.0);
    for (std::uint32_t mask = 0; mask < 256; ++mask) {
        const auto b = bits_of(mask, 8);
        CHECK(m.energy(b) == naive_energy(m, b));
    }
}

TEST_CASE("squared equality penalty adds weight * violation^2") {
    const double w = 11.0;
    QuboModel m = with_vars(2);
    m.add_squared_equality_penalty({{0, 1.0}, {1, 1.0}}, -1.0, w);
    CHECK(m.energy(std::vector<std::uint8_t>{1, 0}) == 0.0);
    CHECK(m.energy(std::vector<std::uint8_t>{0, 1}) == 0.0);
    CHECK(m.energy(std::vector<std::uint8_t>{1, 1}) == w);
    CHECK(m.energy(std::vector<std::uint8_t>{0, 0}) == w);
}

TEST_CASE("penalty soundness on random equality constraints") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform() * 7);  // up to 9 vars
        QuboModel m = with_vars(n);
        std::vector<std::pair<int, double>> terms;
        for (int i = 0; i < n; ++i)
            terms.emplace_back(i, std::floor(rng.uniform() * 5) - 2);
        const double c = std::floor(rng.uniform() * 5) - 2;
        m.add_squared_equality_penalty(terms, c, 7.0);
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            const auto b = bits_of(mask, n);
            double v = c;
            for (const auto& [i, coeff] : terms)
                if (b[static_cast<size_t>(i)]) v += coeff;
            CHECK(m.energy(b) == doctest::Approx(7.0 * v * v));
        }
    }
}

TEST_CASE("slack coefficients cover [0, bound] exactly") {
    for (long long bound = 0; bound <= 64; ++bound) {
        const auto coeffs = QuboModel::slack_coefficients(bound);
        std::vector<bool> reachable(static_cast<size_t>(bound) + 1, false);
        const size_t k = coeffs.size();
        REQUIRE(k <= 12);
        for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
            long long sum = 0;
            for (size_t t = 0; t < k; ++t)
                if ((mask >> t) & 1u) sum += coeffs[t];
            REQUIRE(sum >= 0);
            REQUIRE(sum <= bound);  // never overshoots
            reachable[static_cast<size_t>(sum)] = true;
        }
        for (long long v = 0; v <= bound; ++v)
            CHECK(reachable[static_cast<size_t>(v)]);
    }
}

TEST_CASE("inequality penalty: satisfied sums admit a zero-energy slack") {
    const double w = 9.0;
    QuboModel m = with_vars(3);
    for (int i = 0; i < 3; ++i) m.add_linear(i, 0.0);
    const auto slack =
        m.add_inequality_penalty_with_slack({{0, 1.0}, {1, 1.0}, {2, 1.0}}, 5, w);
    const int total = m.num_vars();

    auto min_energy_over_slack = [&](std::uint8_t a, std::uint8_t b,
                                     std::uint8_t c) {
        double best = 1e18;
        std::vector<std::uint8_t> bits(static_cast<size_t>(total), 0);
        bits[0] = a; bits[1] = b; bits[2] = c;
        for (std::uint32_t mask = 0; mask < (1u << slack.size()); ++mask) {
            for (size_t t = 0; t < slack.size(); ++t)
                bits[static_cast<size_t>(slack[t])] = (mask >> t) & 1u;
            best = std::min(best, m.energy(bits));
        }
        return best;
    };
    CHECK(min_energy_over_slack(1, 1, 1) == 0.0);  // sum 3 <= 5
    CHECK(min_energy_over_slack(0, 0, 0) == 0.0);
}

TEST_CASE("inequality penalty: violations cost at least weight") {
    const double w = 9.0;
    QuboModel m = with_vars(2);
    const auto slack =
        m.add_inequality_penalty_with_slack({{0, 3.0}, {1, 3.0}}, 5, w);
    // sum 6 > 5: best over all slack settings is w * 1^2
    double best = 1e18;
    std::vector<std::uint8_t> bits(static_cast<size_t>(m.num_vars()), 0);
    bits[0] = bits[1] = 1;
    for (std::uint32_t mask = 0; mask < (1u << slack.size()); ++mask) {
        for (size_t t = 0; t < slack.size(); ++t)
            bits[static_cast<size_t>(slack[t])] = (mask >> t) & 1u;
        best = std::min(best, m.energy(bits));
    }
    CHECK(best == w);
}

TEST_CASE("inequality with bound 0 adds no slack vars") {
    QuboModel m = with_vars(2);
    const auto slack = m.add_inequality_penalty_with_slack({{0, 1.0}}, 0, 2.0);
    CHECK(slack.empty());
    CHECK(m.energy(std::vector<std::uint8_t>{0, 0}) == 0.0);
    CHECK(m.energy(std::vector<std::uint8_t>{1, 0}) == 2.0);
}

TEST_CASE("negative inequality coefficients are rejected") {
    QuboModel m = with_vars(1);
    CHECK_THROWS_AS(m.add_inequality_penalty_with_slack({{0, -1.0}}, 3, 1.0),
                    ArgumentError);
}

TEST_CASE("default weights dominate any single tour-cost saving") {
    const auto w = PenaltyWeights::defaults(50, 10);
    CHECK(w.lambda_visit == 2.0 * 50 * 10);
    CHECK(w.lambda_visit == w.lambda_depot);
    CHECK(w.big_B == 10.0);
    w.validate();
}

TEST_CASE("dump and parse round-trip energies") {
    Rng rng(123);
    QuboModel m = with_vars(6);
    for (int i = 0; i < 6; ++i)
        m.add_linear(i, std::floor(rng.uniform() * 9) - 4);
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            if (rng.uniform() < 0.5)
                m.add_quadratic(i, j, std::floor(rng.uniform() * 9) - 4);
    m.add_offset(-2.5);

    std::istringstream in(m.dump());
    const QuboModel back = QuboModel::parse_dump(in);
    REQUIRE(back.num_vars() == m.num_vars());
    for (std::uint32_t mask = 0; mask < 64; ++mask) {
        const auto b = bits_of(mask, 6);
        CHECK(back.energy(b) == doctest::Approx(m.energy(b)));
    }
}
