#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cvrp/assignment.hpp"
#include "cvrp/clustering.hpp"
#include "cvrp/instance.hpp"
#include "cvrp/routing_qubo.hpp"
#include "cvrp/sampler.hpp"

namespace cvrp {

enum class Strategy { H2S, H3S };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

struct PipelineConfig {
    Strategy strategy = Strategy::H2S;
    FcmConfig fcm;
    SamplerConfig sampler;
    std::optional<PenaltyWeights> weights;  // default: derived per stage model
    std::vector<int> cluster_candidates;    // H3S; empty = {p,2p,3p,4p} filtered
    bool repair_enabled = false;
    bool depot_return_penalty = true;
    int variable_budget = 60000;
    std::uint64_t seed = 0;  // master seed; stage seeds are derived from it
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct PipelineReport {
    std::string instance_name;
    Strategy strategy = Strategy::H2S;
    std::uint64_t seed = 0;
    RouteSolution solution;  // routes carry instance customer ids
    MembershipMatrix memberships;
    ClusterAssignment assignment;
    int cluster_count = 0;
    ElbowDiagnostics elbow;                        // H3S only
    std::optional<RouteSolution> centroid_solution;  // H3S; routes carry cluster ids
    std::vector<StageTiming> timings;

    // Deterministic for a fixed (instance, config, seed); timing fields are
    // segregated and excluded when include_timings is false.
    std::string to_json(bool include_timings = true) const;
};

PipelineReport run_h2s(const Instance& instance, const PipelineConfig& config);
PipelineReport run_h3s(const Instance& instance, const PipelineConfig& config);
PipelineReport run_pipeline(const Instance& instance, const PipelineConfig& config);

struct FeasibilityReport {
    bool feasible = true;
    std::vector<std::string> reasons;
    long long cost = 0;  // recomputed from coordinates
};

// Independent checker: never shares code with the QUBO penalty path.
FeasibilityReport validate(const RouteSolution& solution, const Instance& instance);

}  // namespace cvrp
