#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cvrp/instance.hpp"
#include "cvrp/pipeline.hpp"

namespace cvrp {

struct BestKnown {
    long long cost = 0;
    bool proven_optimal = false;
};

// Reference file: one `name cost optimal_flag` entry per line, '#' comments.
std::map<std::string, BestKnown> load_reference_costs(const std::string& path);
std::map<std::string, BestKnown> parse_reference_costs(std::istream& in);

struct ClassifierConfig {
    // depot-to-hull distance below this fraction of the bounding-box
    // diagonal counts as "corner"
    double hull_tolerance = 0.08;
    // "clustered" when the best hard-clustering silhouette over
    // k = 2..truck_count-1 (5 restarts each) exceeds this
    double silhouette_threshold = 0.5;
    FcmConfig fcm;  // restart seeds derive from its seed
};

struct InstanceClass {
    std::string distribution;  // "clustered" | "scattered"
    std::string depot;         // "corner" | "center"
    double silhouette = 0.0;
    double hull_distance_fraction = 0.0;
};

InstanceClass classify_instance(const Instance& instance,
                                const ClassifierConfig& config = {});

struct BenchmarkRecord {
    std::string instance;
    std::string strategy;
    long long cost = 0;
    std::optional<long long> best_known;
    std::optional<double> gap;  // (cost - best_known) / best_known
    bool feasible = false;
    bool repaired = false;
    double wall_clock = 0.0;
    std::uint64_t seed = 0;
    std::string warning;

    std::string to_json() const;  // single line, for record streams
};

struct BenchmarkSummaryRow {
    std::string instance;
    std::optional<long long> best_known;
    std::optional<long long> h2s_cost;  // best feasible across seeds
    std::optional<long long> h3s_cost;
    std::optional<double> h2s_gap;
    std::optional<double> h3s_gap;
    std::string winner;  // "h2s" | "h3s" | "tie" | "" when undecidable
    InstanceClass klass;
};

struct BenchmarkResult {
    std::vector<BenchmarkRecord> records;
    std::vector<BenchmarkSummaryRow> summary;

    std::string records_jsonl() const;
    std::string summary_table() const;
};

struct BenchConfig {
    PipelineConfig pipeline;  // strategy field is overridden per run
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::map<std::string, BestKnown> reference;
    ClassifierConfig classifier;
};

// Cross product of instances x strategies x seeds. Costs are re-validated
// through pipeline::validate, never copied from the solver's own accounting.
BenchmarkResult run_benchmark(const std::vector<Instance>& instances,
                              const std::vector<Strategy>& strategies,
                              const BenchConfig& config);

}  // namespace cvrp
