#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "cvrp/bench.hpp"
#include "helpers.hpp"

using namespace cvrp;

namespace {

Instance two_pair_instance() {
    return testutil::make_instance(
        "pairs-k2", {{0, 0}, {-50, 0}, {-52, 0}, {50, 0}, {52, 0}},
        {3, 3, 3, 3}, 2, 10);
}

BenchConfig tiny_bench(const std::map<std::string, BestKnown>& ref) {
    BenchConfig cfg;
    cfg.pipeline.sampler.num_reads = 20;
    cfg.pipeline.sampler.sweeps_per_read = 400;
    cfg.pipeline.repair_enabled = true;
    cfg.seeds = {1, 2};
    cfg.reference = ref;
    return cfg;
}

}  // namespace

TEST_CASE("reference file parses names, costs and optimality flags") {
    std::istringstream in(
        "# comment line\n"
        "A-n32-k5 784 1\n"
        "\n"
        "custom-x 1234 0\n");
    const auto ref = parse_reference_costs(in);
    REQUIRE(ref.size() == 2);
    CHECK(ref.at("A-n32-k5").cost == 784);
    CHECK(ref.at("A-n32-k5").proven_optimal);
    CHECK(ref.at("custom-x").cost == 1234);
    CHECK(!ref.at("custom-x").proven_optimal);
}

TEST_CASE("malformed reference lines carry their line number") {
    std::istringstream in("A-n32-k5 784 1\nbroken-line\n");
    CHECK_THROWS_WITH_AS(parse_reference_costs(in), doctest::Contains("2"),
                         ParseError);
}

TEST_CASE("the bundled reference file covers all five instances") {
    const auto ref = load_reference_costs(testutil::data_path("best_known.txt"));
    CHECK(ref.at("A-n32-k5").cost == 784);
    CHECK(ref.at("A-n33-k5").cost == 661);
    CHECK(ref.at("A-n34-k5").cost == 778);
    CHECK(ref.at("A-n36-k5").cost == 799);
    CHECK(ref.at("A-n37-k5").cost == 669);
}

TEST_CASE("gap is computed against the reference, zero when matched") {
    // the two-pair instance solves deterministically to cost 208
    const auto inst = two_pair_instance();
    const auto cfg = tiny_bench({{"pairs-k2", {208, true}}});
    const auto res = run_benchmark({inst}, {Strategy::H2S}, cfg);
    REQUIRE(res.records.size() == 2);  // 1 instance x 1 strategy x 2 seeds
    for (const auto& rec : res.records) {
        CHECK(rec.feasible);
        CHECK(rec.cost == 208);
        REQUIRE(rec.gap.has_value());
        CHECK(*rec.gap == doctest::Approx(0.0));
    }
    REQUIRE(res.summary.size() == 1);
    CHECK(res.summary[0].h2s_cost == 208);
    CHECK(res.summary[0].h2s_gap == doctest::Approx(0.0));
}

TEST_CASE("gap follows (cost - best) / best") {
    const auto inst = two_pair_instance();
    const auto cfg = tiny_bench({{"pairs-k2", {200, true}}});
    const auto res = run_benchmark({inst}, {Strategy::H2S}, cfg);
    for (const auto& rec : res.records) {
        REQUIRE(rec.gap.has_value());
        CHECK(*rec.gap == doctest::Approx((208.0 - 200.0) / 200.0));
    }
}

TEST_CASE("missing reference cost yields a null gap and a warning") {
    const auto inst = two_pair_instance();
    const auto cfg = tiny_bench({});
    const auto res = run_benchmark({inst}, {Strategy::H2S}, cfg);
    for (const auto& rec : res.records) {
        CHECK(!rec.best_known.has_value());
        CHECK(!rec.gap.has_value());
        CHECK(!rec.warning.empty());
    }
}

TEST_CASE("records re-validate costs and emit one JSON object per line") {
    const auto inst = two_pair_instance();
    const auto cfg = tiny_bench({{"pairs-k2", {208, true}}});
    const auto res =
        run_benchmark({inst}, {Strategy::H2S, Strategy::H3S}, cfg);
    const auto jsonl = res.records_jsonl();
    size_t lines = 0;
    std::istringstream in(jsonl);
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        ++lines;
        CHECK(line.front() == '{');
        CHECK(line.back() == '}');
        CHECK(line.find('\n') == std::string::npos);
    }
    CHECK(lines == res.records.size());
    CHECK(res.summary_table().find("pairs-k2") != std::string::npos);
}

TEST_CASE("identical seed sets give identical summaries") {
    const auto inst = two_pair_instance();
    const auto cfg = tiny_bench({{"pairs-k2", {208, true}}});
    const auto a = run_benchmark({inst}, {Strategy::H2S}, cfg);
    const auto b = run_benchmark({inst}, {Strategy::H2S}, cfg);
    CHECK(a.summary_table() == b.summary_table());
    // record streams match except for wall-clock timings
    REQUIRE(a.records.size() == b.records.size());
    for (size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].cost == b.records[i].cost);
        CHECK(a.records[i].feasible == b.records[i].feasible);
        CHECK(a.records[i].seed == b.records[i].seed);
    }
}

TEST_CASE("depot on the hull classifies as corner, interior depot as center") {
    // depot at the bounding-box corner, customers strictly interior
    const auto corner = testutil::make_instance(
        "corner-k1", {{0, 0}, {40, 40}, {60, 40}, {40, 60}, {100, 100}},
        {1, 1, 1, 1}, 1, 10);
    CHECK(classify_instance(corner).depot == "corner");

    // depot at the centroid of a ring of customers
    std::vector<std::pair<double, double>> ring = {{50, 50}};
    for (int k = 0; k < 12; ++k) {
        const double a = 2.0 * 3.14159265358979 * k / 12;
        ring.push_back({50 + 40 * std::cos(a), 50 + 40 * std::sin(a)});
    }
    const auto center = testutil::make_instance(
        "ring-k1", ring, std::vector<int>(12, 1), 1, 20);
    CHECK(classify_instance(center).depot == "center");
}

TEST_CASE("blobs classify as clustered, uniform scatter as scattered") {
    std::vector<std::pair<double, double>> blobs = {{50, 50}};
    for (auto [cx, cy] : {std::pair{0.0, 0.0}, {100.0, 0.0}, {50.0, 90.0}})
        for (auto [dx, dy] : {std::pair{0.0, 0.0}, {2.0, 0.0}, {0.0, 2.0}})
            blobs.push_back({cx + dx, cy + dy});
    const auto clustered = testutil::make_instance(
        "blobs-k3", blobs, std::vector<int>(9, 1), 3, 10);
    CHECK(classify_instance(clustered).distribution == "clustered");

    std::vector<std::pair<double, double>> grid = {{50, 50}};
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y) grid.push_back({x * 30.0, y * 30.0});
    const auto scattered = testutil::make_instance(
        "grid-k2", grid, std::vector<int>(16, 1), 2, 20);
    CHECK(classify_instance(scattered).distribution == "scattered");
}

TEST_CASE("classifier calibration on the bundled instances") {
    const std::vector<std::tuple<const char*, const char*, const char*>> want =
        {{"A-n32-k5.vrp", "scattered", "corner"},
         {"A-n33-k5.vrp", "clustered", "center"},
         {"A-n34-k5.vrp", "scattered", "center"},
         {"A-n36-k5.vrp", "clustered", "corner"},
         {"A-n37-k5.vrp", "scattered", "center"}};
    for (const auto& [file, dist, depot] : want) {
        const auto inst = load_instance(testutil::data_path(file));
        const auto k = classify_instance(inst);
        INFO(file, " silhouette=", k.silhouette, " hull=",
             k.hull_distance_fraction);
        CHECK(k.distribution == dist);
        CHECK(k.depot == depot);
    }
}

TEST_CASE("record json is a single line with the documented fields") {
    BenchmarkRecord rec;
    rec.instance = "x";
    rec.strategy = "h2s";
    rec.cost = 5;
    rec.seed = 7;
    const auto j = rec.to_json();
    CHECK(j.find('\n') == std::string::npos);
    for (const char* key : {"\"instance\"", "\"strategy\"", "\"cost\"",
                            "\"best_known\"", "\"gap\"", "\"feasible\"",
                            "\"repaired\"", "\"seed\""})
        CHECK(j.find(key) != std::string::npos);
}
