#include "cvrp/assignment.hpp"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

namespace cvrp {

long long cluster_capacity(long long truck_capacity, int n_clusters,
                           int n_trucks) {
    if (n_trucks < 1 || n_clusters < 1)
        throw ArgumentError("cluster and truck counts must be positive");
    if (n_clusters % n_trucks != 0)
        throw ArgumentError("cluster count " + std::to_string(n_clusters) +
                            " is not a multiple of truck count " +
                            std::to_string(n_trucks));
    const int ratio = n_clusters / n_trucks;
    if (truck_capacity % ratio != 0)
        throw ArgumentError("truck capacity " + std::to_string(truck_capacity) +
                            " is not divisible by clusters-per-truck " +
                            std::to_string(ratio));
    return truck_capacity / ratio;
}

ClusterAssignment assign(const std::vector<std::vector<double>>& memberships,
                         const std::vector<int>& demands,
                         const std::vector<long long>& capacities,
                         const std::vector<Point>& centroids) {
    const size_t n = memberships.size();
    const size_t c = capacities.size();
    if (demands.size() != n)
        throw ArgumentError("demand count does not match membership rows");
    if (n > 0 && memberships[0].size() != c)
        throw ArgumentError("membership columns do not match capacity count");

    ClusterAssignment out;
    out.cluster_of.assign(n, -1);
    out.clusters.resize(c);
    for (size_t i = 0; i < c; ++i) {
        out.clusters[i].capacity = capacities[i];
        if (i < centroids.size()) out.clusters[i].centroid = centroids[i];
    }
    std::vector<long long> residual(capacities);

    // per-customer preference stack, best-first (ties: lower cluster id)
    std::vector<std::vector<int>> prefs(n);
    for (size_t k = 0; k < n; ++k) {
        prefs[k].resize(c);
        std::iota(prefs[k].begin(), prefs[k].end(), 0);
        std::stable_sort(prefs[k].begin(), prefs[k].end(), [&](int a, int b) {
            return memberships[k][static_cast<size_t>(a)] >
                   memberships[k][static_cast<size_t>(b)];
        });
    }

    std::vector<size_t> unassigned(n);
    std::iota(unassigned.begin(), unassigned.end(), size_t{0});

    while (!unassigned.empty()) {
        // nominees per cluster for this round
        std::vector<std::vector<size_t>> nominees(c);
        std::vector<size_t> exhausted;
        for (size_t k : unassigned) {
            if (prefs[k].empty()) {
                exhausted.push_back(k);
                continue;
            }
            nominees[static_cast<size_t>(prefs[k].front())].push_back(k);
        }

        for (size_t i = 0; i < c; ++i) {
            auto& list = nominees[i];
            // decreasing membership; stable sort keeps lower customer id first
            std::stable_sort(list.begin(), list.end(), [&](size_t a, size_t b) {
                return memberships[a][i] > memberships[b][i];
            });
            bool admitting = true;
            for (size_t k : list) {
                if (admitting && demands[k] <= residual[i]) {
                    out.cluster_of[k] = static_cast<int>(i);
                    out.clusters[i].members.push_back(static_cast<int>(k));
                    out.clusters[i].aggregate_demand += demands[k];
                    residual[i] -= demands[k];
                } else {
                    admitting = false;  // stop at the first nominee that does not fit
                    prefs[k].erase(prefs[k].begin());
                }
            }
        }

        // overflow fallback: cluster with maximum residual capacity
        for (size_t k : exhausted) {
            size_t target = static_cast<size_t>(
                std::max_element(residual.begin(), residual.end()) -
                residual.begin());
            out.cluster_of[k] = static_cast<int>(target);
            out.clusters[target].members.push_back(static_cast<int>(k));
            out.clusters[target].aggregate_demand += demands[k];
            residual[target] -= demands[k];
            out.overflow = true;
            out.overflowed.push_back(static_cast<int>(k));
        }

        std::erase_if(unassigned,
                      [&](size_t k) { return out.cluster_of[k] >= 0; });
    }

    for (auto& cl : out.clusters) std::sort(cl.members.begin(), cl.members.end());
    return out;
}

std::string ClusterAssignment::to_json() const {
    nlohmann::json j;
    j["cluster_of"] = cluster_of;
    j["overflow"] = overflow;
    j["overflowed"] = overflowed;
    auto& arr = j["clusters"] = nlohmann::json::array();
    for (const auto& cl : clusters) {
        arr.push_back({{"members", cl.members},
                       {"centroid", {cl.centroid.x, cl.centroid.y}},
                       {"aggregate_demand", cl.aggregate_demand},
                       {"capacity", cl.capacity}});
    }
    return j.dump(2);
}

}  // namespace cvrp
