#pragma once

#include <string>
#include <vector>

#include "cvrp/common.hpp"

namespace cvrp {

struct Cluster {
    std::vector<int> members;  // customer ids
    Point centroid;
    int aggregate_demand = 0;
    long long capacity = 0;
};

struct ClusterAssignment {
    std::vector<int> cluster_of;   // customer index -> cluster id
    std::vector<Cluster> clusters;
    bool overflow = false;         // some customer exhausted every preference
    std::vector<int> overflowed;   // those customers

    std::string to_json() const;
};

// capacity_cluster = capacity_truck / (n_clusters / n_trucks); the division
// must be exact (the pipeline restricts cluster counts so that it is).
long long cluster_capacity(long long truck_capacity, int n_clusters,
                           int n_trucks);

// Preference-round defuzzification. memberships[k][i] is customer k's
// affinity to cluster i (rows sum to 1); customer ids in the result are the
// row indices. Per round each unassigned customer nominates its highest
// remaining preference; per cluster, nominees are admitted in decreasing
// membership order until one does not fit, and rejected nominees drop that
// preference. A customer with no preferences left goes to the cluster with
// maximum residual capacity and sets the overflow flag.
ClusterAssignment assign(const std::vector<std::vector<double>>& memberships,
                         const std::vector<int>& demands,
                         const std::vector<long long>& capacities,
                         const std::vector<Point>& centroids = {});

}  // namespace cvrp
