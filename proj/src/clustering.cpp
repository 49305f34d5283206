#include "cvrp/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace cvrp {

void FcmConfig::validate() const {
    if (!(fuzziness > 1.0)) throw ArgumentError("fuzziness m must be > 1");
    if (!(tolerance > 0.0)) throw ArgumentError("tolerance must be > 0");
    if (max_iterations < 1) throw ArgumentError("max_iterations must be >= 1");
}

std::vector<Point> build_fcm_points(const Instance& instance, int depot_copies) {
    if (depot_copies < 0) throw ArgumentError("depot_copies must be >= 0");
    std::vector<Point> points;
    points.reserve(static_cast<size_t>(instance.customer_count() + depot_copies));
    for (int i = 1; i < instance.size(); ++i)
        points.push_back(instance.node(i).point());
    for (int c = 0; c < depot_copies; ++c)
        points.push_back(instance.depot().point());
    return points;
}

std::vector<Point> update_centroids(const std::vector<Point>& points,
                                    const std::vector<std::vector<double>>& gamma,
                                    double fuzziness) {
    if (gamma.size() != points.size())
        throw ArgumentError("gamma row count does not match point count");
    const size_t c = gamma.empty() ? 0 : gamma[0].size();
    std::vector<Point> centroids(c);
    std::vector<double> weight_sum(c, 0.0);
    std::vector<double> sx(c, 0.0), sy(c, 0.0);
    for (size_t k = 0; k < points.size(); ++k) {
        for (size_t i = 0; i < c; ++i) {
            const double w = std::pow(gamma[k][i], fuzziness);
            weight_sum[i] += w;
            sx[i] += w * points[k].x;
            sy[i] += w * points[k].y;
        }
    }
    for (size_t i = 0; i < c; ++i) {
        if (weight_sum[i] < 1e-12) {
            // caller is expected to rescue empty clusters; keep a defined value
            centroids[i] = points.empty() ? Point{} : points[0];
            continue;
        }
        centroids[i] = {sx[i] / weight_sum[i], sy[i] / weight_sum[i]};
    }
    return centroids;
}

std::vector<std::vector<double>> update_memberships(
    const std::vector<Point>& points, const std::vector<Point>& centroids,
    double fuzziness) {
    if (centroids.empty()) throw ArgumentError("centroids must be non-empty");
    const size_t c = centroids.size();
    const double expo = 1.0 / (fuzziness - 1.0);
    std::vector<std::vector<double>> gamma(points.size(),
                                           std::vector<double>(c, 0.0));
    std::vector<double> d2(c);
    for (size_t k = 0; k < points.size(); ++k) {
        int coincident = -1;
        for (size_t i = 0; i < c; ++i) {
            const double d = fractional_distance(points[k], centroids[i]);
            d2[i] = d * d;
            if (d2[i] == 0.0 && coincident < 0) coincident = static_cast<int>(i);
        }
        if (coincident >= 0) {
            // singular limit of the update rule: hard-assign
            gamma[k][static_cast<size_t>(coincident)] = 1.0;
            continue;
        }
        for (size_t i = 0; i < c; ++i) {
            double denom = 0.0;
            for (size_t j = 0; j < c; ++j)
                denom += std::pow(d2[i] / d2[j], expo);
            gamma[k][i] = 1.0 / denom;
        }
        // renormalize away accumulated rounding
        double row = 0.0;
        for (double g : gamma[k]) row += g;
        for (double& g : gamma[k]) g /= row;
    }
    return gamma;
}

double fcm_objective(const std::vector<Point>& points,
                     const std::vector<std::vector<double>>& gamma,
                     const std::vector<Point>& centroids, double fuzziness) {
    double j = 0.0;
    for (size_t k = 0; k < points.size(); ++k) {
        for (size_t i = 0; i < centroids.size(); ++i) {
            const double d = fractional_distance(points[k], centroids[i]);
            j += std::pow(gamma[k][i], fuzziness) * d * d;
        }
    }
    return j;
}

namespace {

int argmax_row(const std::vector<double>& row) {
    return static_cast<int>(std::max_element(row.begin(), row.end()) -
                            row.begin());
}

// Re-seed a dead centroid at the customer farthest from its own current
// max-membership centroid.
void rescue_empty_clusters(const std::vector<Point>& points,
                           const std::vector<std::vector<double>>& gamma,
                           std::vector<Point>& centroids, double fuzziness) {
    const size_t c = centroids.size();
    std::vector<double> weight_sum(c, 0.0);
    for (const auto& row : gamma)
        for (size_t i = 0; i < c; ++i)
            weight_sum[i] += std::pow(row[i], fuzziness);
    for (size_t i = 0; i < c; ++i) {
        if (weight_sum[i] >= 1e-12) continue;
        double best_d = -1.0;
        size_t best_k = 0;
        for (size_t k = 0; k < points.size(); ++k) {
            const auto& owner = centroids[static_cast<size_t>(argmax_row(gamma[k]))];
            const double d = fractional_distance(points[k], owner);
            if (d > best_d) {
                best_d = d;
                best_k = k;
            }
        }
        centroids[i] = points[best_k];
    }
}

}  // namespace

MembershipMatrix run_fcm(const std::vector<Point>& points, int cluster_count,
                         const FcmConfig& config) {
    config.validate();
    if (cluster_count < 1) throw ArgumentError("cluster count must be >= 1");
    if (static_cast<size_t>(cluster_count) > points.size())
        throw ArgumentError("cluster count " + std::to_string(cluster_count) +
                            " exceeds point count " +
                            std::to_string(points.size()));

    const size_t c = static_cast<size_t>(cluster_count);
    MembershipMatrix m;
    m.gamma.assign(points.size(), std::vector<double>(c, 0.0));

    // seeded random memberships, rows normalized
    Rng rng(mix_seed(config.seed, "fcm-init"));
    for (auto& row : m.gamma) {
        double sum = 0.0;
        for (double& g : row) {
            g = rng.uniform() + 1e-9;
            sum += g;
        }
        for (double& g : row) g /= sum;
    }

    for (int it = 0; it < config.max_iterations; ++it) {
        m.centroids = update_centroids(points, m.gamma, config.fuzziness);
        rescue_empty_clusters(points, m.gamma, m.centroids, config.fuzziness);
        auto next = update_memberships(points, m.centroids, config.fuzziness);
        double max_change = 0.0;
        for (size_t k = 0; k < points.size(); ++k)
            for (size_t i = 0; i < c; ++i)
                max_change = std::max(max_change,
                                      std::abs(next[k][i] - m.gamma[k][i]));
        m.gamma = std::move(next);
        m.iterations_run = it + 1;
        m.objective_trace.push_back(
            fcm_objective(points, m.gamma, m.centroids, config.fuzziness));
        if (max_change < config.tolerance) {
            m.converged = true;
            break;
        }
    }
    return m;
}

ElbowDiagnostics select_cluster_count(const Instance& instance,
                                      const std::vector<int>& candidates,
                                      const FcmConfig& config) {
    if (candidates.empty()) throw ArgumentError("candidate list is empty");
    ElbowDiagnostics diag;
    diag.candidates = candidates;
    std::sort(diag.candidates.begin(), diag.candidates.end());
    diag.candidates.erase(
        std::unique(diag.candidates.begin(), diag.candidates.end()),
        diag.candidates.end());

    const int n_customers = instance.customer_count();
    for (int c : diag.candidates) {
        if (c < instance.truck_count())
            throw ArgumentError("candidate c=" + std::to_string(c) +
                                " below truck count");
        FcmConfig cfg = config;
        cfg.seed = mix_seed(config.seed, static_cast<std::uint64_t>(c));
        auto points = build_fcm_points(instance, c);
        auto m = run_fcm(points, c, cfg);
        double sse = 0.0;
        for (int k = 0; k < n_customers; ++k) {  // depot copies excluded
            int owner = argmax_row(m.gamma[static_cast<size_t>(k)]);
            sse += fractional_distance(points[static_cast<size_t>(k)],
                                       m.centroids[static_cast<size_t>(owner)]);
        }
        diag.intra_cluster_sums.push_back(sse);
    }

    if (diag.candidates.size() < 3) {
        diag.chosen = diag.candidates.front();
        diag.warning = "fewer than 3 candidates; elbow undefined, using smallest";
        return diag;
    }

    double best_dd = -std::numeric_limits<double>::infinity();
    int best_c = diag.candidates[1];
    for (size_t i = 1; i + 1 < diag.candidates.size(); ++i) {
        const double dd = diag.intra_cluster_sums[i - 1] -
                          2.0 * diag.intra_cluster_sums[i] +
                          diag.intra_cluster_sums[i + 1];
        diag.second_differences.push_back(dd);
        if (dd > best_dd) {  // ties break toward smaller c (first wins)
            best_dd = dd;
            best_c = diag.candidates[i];
        }
    }
    diag.chosen = best_c;
    return diag;
}

std::string membership_to_json(const MembershipMatrix& m) {
    nlohmann::json j;
    j["iterations"] = m.iterations_run;
    j["converged"] = m.converged;
    auto& cents = j["centroids"] = nlohmann::json::array();
    for (const auto& p : m.centroids) cents.push_back({p.x, p.y});
    j["gamma"] = m.gamma;
    return j.dump(2);
}

}  // namespace cvrp
