#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cvrp/common.hpp"
#include "cvrp/sampler.hpp"

using namespace cvrp;

namespace {

QuboModel with_vars(int n) {
    QuboModel m;
    for (int i = 0; i < n; ++i) m.add_variable({"var", -1, i, -1});
    return m;
}

QuboModel random_model(int n, std::uint64_t seed) {
    Rng rng(seed);
    QuboModel m = with_vars(n);
    for (int i = 0; i < n; ++i)
        m.add_linear(i, std::floor(rng.uniform() * 21) - 10);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < 0.5)
                m.add_quadratic(i, j, std::floor(rng.uniform() * 21) - 10);
    return m;
}

}  // namespace

TEST_CASE("single-minimum 1-var model is found by every read") {
    QuboModel m = with_vars(1);
    m.add_linear(0, -1.0);
    SamplerConfig cfg;
    cfg.num_reads = 20;
    cfg.sweeps_per_read = 50;
    cfg.seed = 4;
    const SampleSet set = anneal(m, cfg);
    REQUIRE(!set.empty());
    CHECK(set.best().energy == -1.0);
    CHECK(set.best().bits == std::vector<std::uint8_t>{1});
    // all 20 reads collapse into the single minimum
    CHECK(set.samples.size() == 1);
    CHECK(set.samples[0].occurrences == 20);
}

TEST_CASE("frustrated 2-var model settles on exactly one bit") {
    QuboModel m = with_vars(2);
    m.add_linear(0, -1.0);
    m.add_linear(1, -1.0);
    m.add_quadratic(0, 1, 3.0);
    SamplerConfig cfg;
    cfg.num_reads = 10;
    cfg.sweeps_per_read = 100;
    cfg.seed = 9;
    const SampleSet set = anneal(m, cfg);
    CHECK(set.best().energy == -1.0);
    const auto& b = set.best().bits;
    CHECK(b[0] + b[1] == 1);
}

TEST_CASE("anneal is deterministic for a fixed seed") {
    const QuboModel m = random_model(14, 77);
    SamplerConfig cfg;
    cfg.num_reads = 30;
    cfg.sweeps_per_read = 200;
    cfg.seed = 123;
    const SampleSet a = anneal(m, cfg);
    const SampleSet b = anneal(m, cfg);
    REQUIRE(a.samples.size() == b.samples.size());
    for (size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].bits == b.samples[i].bits);
        CHECK(a.samples[i].energy == b.samples[i].energy);
        CHECK(a.samples[i].occurrences == b.samples[i].occurrences);
    }
}

TEST_CASE("reported energies match independent re-evaluation, exactly") {
    const QuboModel m = random_model(16, 3);
    SamplerConfig cfg;
    cfg.num_reads = 25;
    cfg.sweeps_per_read = 300;
    cfg.seed = 8;
    const SampleSet set = anneal(m, cfg);
    double prev = -1e300;
    for (const auto& s : set.samples) {
        CHECK(s.energy == m.energy(s.bits));
        CHECK(s.energy >= prev);  // ascending order
        prev = s.energy;
    }
}

TEST_CASE("exhaustive: zero-var model returns the offset") {
    QuboModel m;
    m.add_offset(4.5);
    const SampleSet set = exhaustive(m);
    REQUIRE(set.samples.size() == 1);
    CHECK(set.best().energy == 4.5);
    CHECK(set.best().bits.empty());
}

TEST_CASE("exhaustive: 3-var model enumerates all 8 states sorted") {
    QuboModel m = random_model(3, 11);
    const SampleSet set = exhaustive(m);
    CHECK(set.samples.size() == 8);
    for (size_t i = 1; i < set.samples.size(); ++i)
        CHECK(set.samples[i - 1].energy <= set.samples[i].energy);
    for (const auto& s : set.samples) CHECK(s.energy == m.energy(s.bits));
}

TEST_CASE("exhaustive refuses models over the 26-var cap") {
    const QuboModel m = with_vars(27);
    CHECK_THROWS_AS(exhaustive(m), SizeError);
}

TEST_CASE("exhaustive keeps at most max_kept states, minimum always first") {
    const QuboModel m = random_model(12, 21);
    const SampleSet all = exhaustive(m, 1u << 12);
    const SampleSet top = exhaustive(m, 16);
    CHECK(all.samples.size() == 4096);
    CHECK(top.samples.size() == 16);
    CHECK(top.best().energy == all.best().energy);
    CHECK(top.best().bits == all.best().bits);
}

TEST_CASE("anneal matches the exhaustive minimum on random 12-var models") {
    int match = 0;
    const int trials = 25;
    for (int t = 0; t < trials; ++t) {
        const QuboModel m = random_model(12, mix_seed(500, t));
        SamplerConfig cfg;
        cfg.num_reads = 50;
        cfg.sweeps_per_read = 500;
        cfg.seed = static_cast<std::uint64_t>(t);
        if (anneal(m, cfg).best().energy == exhaustive(m).best().energy)
            ++match;
    }
    CHECK(match >= trials - 1);  // allow one miss at this reduced budget
}

TEST_CASE("doubling sweeps does not hurt the best energy (median over seeds)") {
    const QuboModel m = random_model(18, 404);
    auto median_best = [&](int sweeps) {
        std::vector<double> best;
        for (std::uint64_t s = 0; s < 11; ++s) {
            SamplerConfig cfg;
            cfg.num_reads = 5;
            cfg.sweeps_per_read = sweeps;
            cfg.seed = s;
            best.push_back(anneal(m, cfg).best().energy);
        }
        std::sort(best.begin(), best.end());
        return best[best.size() / 2];
    };
    CHECK(median_best(400) <= median_best(200));
}

TEST_CASE("invalid sampler configs are rejected") {
    SamplerConfig cfg;
    cfg.num_reads = 0;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    cfg.num_reads = 1;
    cfg.beta_min = 2.0;
    cfg.beta_max = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
}
