#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvrp/common.hpp"
#include "cvrp/instance.hpp"

namespace cvrp {

struct FcmConfig {
    double fuzziness = 2.0;      // m, must be > 1
    double tolerance = 1e-5;     // convergence on max-abs membership change
    int max_iterations = 300;
    std::uint64_t seed = 0;
    std::optional<int> depot_copies;  // default: one per cluster

    void validate() const;
};

// Fuzzy membership matrix: gamma[k][i] is point k's affinity to cluster i.
// Rows sum to 1. Depot-copy rows are included while iterating and dropped
// by the pipeline before assignment.
struct MembershipMatrix {
    std::vector<std::vector<double>> gamma;
    std::vector<Point> centroids;
    int iterations_run = 0;
    bool converged = false;
    std::vector<double> objective_trace;  // J per iteration, non-increasing
};

// Customer coordinates followed by `depot_copies` copies of the depot point.
// The copies skew centroids toward the depot.
std::vector<Point> build_fcm_points(const Instance& instance, int depot_copies);

std::vector<Point> update_centroids(const std::vector<Point>& points,
                                    const std::vector<std::vector<double>>& gamma,
                                    double fuzziness);

std::vector<std::vector<double>> update_memberships(
    const std::vector<Point>& points, const std::vector<Point>& centroids,
    double fuzziness);

// FCM objective J = sum_k sum_i gamma_ik^m d_ki^2.
double fcm_objective(const std::vector<Point>& points,
                     const std::vector<std::vector<double>>& gamma,
                     const std::vector<Point>& centroids, double fuzziness);

MembershipMatrix run_fcm(const std::vector<Point>& points, int cluster_count,
                         const FcmConfig& config);

struct ElbowDiagnostics {
    std::vector<int> candidates;              // sorted
    std::vector<double> intra_cluster_sums;   // per candidate
    std::vector<double> second_differences;   // interior candidates only
    int chosen = 0;
    std::string warning;                      // set on degenerate fallbacks
};

// Elbow selection over the hard-assigned sum of intra-cluster distances:
// picks the candidate maximizing the second difference of the curve, ties
// toward smaller c. Depot copies are excluded from the metric.
ElbowDiagnostics select_cluster_count(const Instance& instance,
                                      const std::vector<int>& candidates,
                                      const FcmConfig& config);

// JSON diagnostic dump (keys: centroids, gamma, iterations, converged).
std::string membership_to_json(const MembershipMatrix& m);

}  // namespace cvrp
