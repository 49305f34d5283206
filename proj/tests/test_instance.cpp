#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "cvrp/instance.hpp"
#include "helpers.hpp"

using namespace cvrp;

namespace {

std::string minimal_file(const std::string& extra_header = "") {
    return "NAME : tiny-k1\n" + extra_header +
           "TYPE : CVRP\n"
           "DIMENSION : 2\n"
           "EDGE_WEIGHT_TYPE : EUC_2D\n"
           "CAPACITY : 10\n"
           "NODE_COORD_SECTION\n"
           "1 0 0\n"
           "2 3 4\n"
           "DEMAND_SECTION\n"
           "1 0\n"
           "2 1\n"
           "DEPOT_SECTION\n"
           "1\n"
           "-1\n"
           "EOF\n";
}

}  // namespace

TEST_CASE("minimal two-node file parses") {
    const Instance inst = parse_instance(minimal_file());
    CHECK(inst.size() == 2);
    CHECK(inst.name() == "tiny-k1");
    CHECK(inst.truck_count() == 1);
    CHECK(inst.truck_capacity() == 10);
    CHECK(inst.depot().demand == 0);
    CHECK(inst.node(1).x == 3);
    CHECK(inst.node(1).y == 4);
    CHECK(inst.node(1).demand == 1);
}

TEST_CASE("truck count from name suffix, comment fallback, override") {
    // -k suffix wins over comment
    std::string text = minimal_file("COMMENT : (No of trucks: 7)\n");
    CHECK(parse_instance(text).truck_count() == 1);

    // without suffix, the comment is used
    std::string no_suffix = text;
    no_suffix.replace(no_suffix.find("tiny-k1"), 7, "tinyyyy");
    CHECK(parse_instance(no_suffix).truck_count() == 7);

    // explicit override beats both
    CHECK(parse_instance(text, 3).truck_count() == 3);

    // no source at all
    std::string bare = minimal_file();
    bare.replace(bare.find("tiny-k1"), 7, "unnamed");
    CHECK_THROWS_AS(parse_instance(bare), ParseError);
}

TEST_CASE("missing sections are named in errors") {
    std::string no_demand = minimal_file();
    const auto pos = no_demand.find("DEMAND_SECTION");
    no_demand = no_demand.substr(0, pos) + no_demand.substr(no_demand.find("DEPOT_SECTION"));
    CHECK_THROWS_WITH_AS(parse_instance(no_demand),
                         doctest::Contains("DEMAND_SECTION"), ParseError);

    std::string no_dim = minimal_file();
    no_dim.erase(no_dim.find("DIMENSION : 2\n"), 14);
    CHECK_THROWS_WITH_AS(parse_instance(no_dim), doctest::Contains("DIMENSION"),
                         ParseError);
}

TEST_CASE("non-numeric field errors carry a line number") {
    std::string bad = minimal_file();
    bad.replace(bad.find("2 3 4"), 5, "2 x 4");
    CHECK_THROWS_WITH_AS(parse_instance(bad), doctest::Contains("line 8"),
                         ParseError);
}

TEST_CASE("depot with nonzero demand is rejected") {
    std::string bad = minimal_file();
    bad.replace(bad.find("1 0\n2 1"), 7, "1 5\n2 1");
    CHECK_THROWS_AS(parse_instance(bad), ValidationError);
}

TEST_CASE("non-depot file depot id is re-indexed to 0") {
    std::string text =
        "NAME : swap-k1\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\n"
        "CAPACITY : 10\nNODE_COORD_SECTION\n1 5 5\n2 0 0\n3 9 9\n"
        "DEMAND_SECTION\n1 2\n2 0\n3 3\nDEPOT_SECTION\n2\n-1\nEOF\n";
    const Instance inst = parse_instance(text);
    CHECK(inst.depot().x == 0);
    CHECK(inst.depot().y == 0);
    CHECK(inst.node(1).x == 5);
    CHECK(inst.node(2).x == 9);
    CHECK(inst.node(1).demand == 2);
    CHECK(inst.node(2).demand == 3);
}

TEST_CASE("distance is rounded Euclidean") {
    Node a{0, 0, 0, 0}, b{1, 3, 4, 0};
    CHECK(distance(a, b) == 5);
    CHECK(distance(b, a) == 5);
    CHECK(distance(a, a) == 0);
    Node c{2, 1, 1, 0};
    CHECK(distance(a, c) == 1);  // round(1.414...) = 1
}

TEST_CASE("fractional_distance is exact") {
    CHECK(fractional_distance({0, 0}, {3, 4}) == doctest::Approx(5.0));
    CHECK(fractional_distance({0, 0}, {1, 0}) == doctest::Approx(1.0));
    CHECK(fractional_distance({0, 0}, {1, 1}) ==
          doctest::Approx(1.4142135623730951));
}

TEST_CASE("A-n32-k5 loads with the published header values") {
    const Instance inst = load_instance(testutil::data_path("A-n32-k5.vrp"));
    CHECK(inst.size() == 32);
    CHECK(inst.customer_count() == 31);
    CHECK(inst.truck_count() == 5);
    CHECK(inst.truck_capacity() == 100);
    CHECK(inst.depot().demand == 0);
    CHECK(inst.total_demand() == 410);

    // symmetry across all node pairs
    for (int i = 0; i < inst.size(); ++i)
        for (int j = i + 1; j < inst.size(); ++j)
            CHECK(distance(inst.node(i), inst.node(j)) ==
                  distance(inst.node(j), inst.node(i)));
}

TEST_CASE("all five benchmark files load and validate") {
    for (const char* name : {"A-n32-k5.vrp", "A-n33-k5.vrp", "A-n34-k5.vrp",
                             "A-n36-k5.vrp", "A-n37-k5.vrp"}) {
        const Instance inst = load_instance(testutil::data_path(name));
        CHECK(inst.truck_count() == 5);
        CHECK(inst.truck_capacity() == 100);
        CHECK(inst.total_demand() <= 5 * 100);
    }
}

TEST_CASE("instance invariant violations throw") {
    using testutil::make_instance;
    // total demand above fleet capacity
    CHECK_THROWS_AS(make_instance("x", {{0, 0}, {1, 1}, {2, 2}}, {6, 6}, 1, 10),
                    ValidationError);
    // single demand at/above truck capacity
    CHECK_THROWS_AS(make_instance("x", {{0, 0}, {1, 1}}, {10}, 2, 10),
                    ValidationError);
}
