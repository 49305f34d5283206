#include "cvrp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace cvrp {

std::map<std::string, BestKnown> parse_reference_costs(std::istream& in) {
    std::map<std::string, BestKnown> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream row(line);
        std::string name;
        if (!(row >> name)) continue;  // blank line
        long long cost = 0;
        int flag = 0;
        if (!(row >> cost >> flag))
            throw ParseError("reference cost file line " +
                             std::to_string(line_no) +
                             ": expected `name cost optimal_flag`");
        out[name] = {cost, flag != 0};
    }
    return out;
}

std::map<std::string, BestKnown> load_reference_costs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open reference cost file: " + path);
    return parse_reference_costs(in);
}

namespace {

// Monotone-chain convex hull over all node coordinates.
std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point& a, const Point& b) {
                              return a.x == b.x && a.y == b.y;
                          }),
              pts.end());
    const size_t n = pts.size();
    if (n < 3) return pts;
    auto cross = [](const Point& o, const Point& a, const Point& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    std::vector<Point> hull(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (size_t i = n - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = 0.0;
    if (len2 > 0.0)
        t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len2, 0.0, 1.0);
    return fractional_distance(p, {a.x + t * vx, a.y + t * vy});
}

// Mean silhouette over customers for the hard FCM assignment with k clusters.
double silhouette_score(const Instance& instance, int k, const FcmConfig& fcm) {
    std::vector<Point> pts;
    pts.reserve(static_cast<size_t>(instance.customer_count()));
    for (int id = 1; id < instance.size(); ++id)
        pts.push_back(instance.node(id).point());
    if (k < 2 || static_cast<size_t>(k) > pts.size()) return 0.0;

    const MembershipMatrix m = run_fcm(pts, k, fcm);
    std::vector<int> label(pts.size(), 0);
    std::vector<int> count(static_cast<size_t>(k), 0);
    for (size_t i = 0; i < pts.size(); ++i) {
        const auto& row = m.gamma[i];
        label[i] = static_cast<int>(std::max_element(row.begin(), row.end()) -
                                    row.begin());
        ++count[static_cast<size_t>(label[i])];
    }

    double total = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        std::vector<double> mean_dist(static_cast<size_t>(k), 0.0);
        for (size_t j = 0; j < pts.size(); ++j) {
            if (i == j) continue;
            mean_dist[static_cast<size_t>(label[j])] +=
                fractional_distance(pts[i], pts[j]);
        }
        const int own = label[i];
        if (count[static_cast<size_t>(own)] < 2) continue;  // singleton: s = 0
        double a = mean_dist[static_cast<size_t>(own)] /
                   (count[static_cast<size_t>(own)] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == own || count[static_cast<size_t>(c)] == 0) continue;
            b = std::min(b, mean_dist[static_cast<size_t>(c)] /
                                count[static_cast<size_t>(c)]);
        }
        if (std::isfinite(b) && std::max(a, b) > 0.0)
            total += (b - a) / std::max(a, b);
    }
    return total / static_cast<double>(pts.size());
}

}  // namespace

InstanceClass classify_instance(const Instance& instance,
                                const ClassifierConfig& config) {
    InstanceClass out;

    std::vector<Point> pts;
    pts.reserve(static_cast<size_t>(instance.size()));
    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = min_x, max_y = max_x;
    for (const auto& node : instance.nodes()) {
        pts.push_back(node.point());
        min_x = std::min(min_x, node.x);
        max_x = std::max(max_x, node.x);
        min_y = std::min(min_y, node.y);
        max_y = std::max(max_y, node.y);
    }
    const double diagonal = std::hypot(max_x - min_x, max_y - min_y);

    const auto hull = convex_hull(pts);
    const Point depot = instance.depot().point();
    double dist = std::numeric_limits<double>::infinity();
    if (hull.size() == 1) {
        dist = fractional_distance(depot, hull[0]);
    } else {
        for (size_t i = 0; i < hull.size(); ++i)
            dist = std::min(dist, point_segment_distance(
                                      depot, hull[i], hull[(i + 1) % hull.size()]));
    }
    out.hull_distance_fraction = diagonal > 0.0 ? dist / diagonal : 0.0;
    out.depot = out.hull_distance_fraction <= config.hull_tolerance ? "corner"
                                                                    : "center";

    // Customers count as clustered when some coarse grouping (fewer groups
    // than trucks) separates cleanly; take the best hard-clustering
    // silhouette over those granularities, with a few restarts each.
    out.silhouette = 0.0;
    const int k_max = std::max(2, instance.truck_count() - 1);
    for (int k = 2; k <= k_max; ++k)
        for (std::uint64_t restart = 0; restart < 5; ++restart) {
            FcmConfig fcm = config.fcm;
            fcm.seed = mix_seed(mix_seed(config.fcm.seed, "silhouette"),
                                static_cast<std::uint64_t>(k) * 16 + restart);
            out.silhouette =
                std::max(out.silhouette, silhouette_score(instance, k, fcm));
        }
    out.distribution = out.silhouette > config.silhouette_threshold
                           ? "clustered"
                           : "scattered";
    return out;
}

std::string BenchmarkRecord::to_json() const {
    nlohmann::json j;
    j["instance"] = instance;
    j["strategy"] = strategy;
    j["cost"] = cost;
    j["best_known"] = best_known ? nlohmann::json(*best_known) : nullptr;
    j["gap"] = gap ? nlohmann::json(*gap) : nullptr;
    j["feasible"] = feasible;
    j["repaired"] = repaired;
    j["wall_clock"] = wall_clock;
    j["seed"] = seed;
    if (!warning.empty()) j["warning"] = warning;
    return j.dump();
}

std::string BenchmarkResult::records_jsonl() const {
    std::string out;
    for (const auto& r : records) {
        out += r.to_json();
        out += '\n';
    }
    return out;
}

std::string BenchmarkResult::summary_table() const {
    std::ostringstream t;
    auto cell = [](const std::optional<long long>& v) {
        return v ? std::to_string(*v) : std::string("-");
    };
    auto gap_cell = [](const std::optional<double>& g) {
        if (!g) return std::string("-");
        std::ostringstream s;
        s << std::fixed << std::setprecision(2) << *g * 100.0 << "%";
        return s.str();
    };
    t << std::left << std::setw(12) << "instance" << std::setw(8) << "best"
      << std::setw(8) << "h2s" << std::setw(9) << "h2s_gap" << std::setw(8)
      << "h3s" << std::setw(9) << "h3s_gap" << std::setw(7) << "winner"
      << std::setw(11) << "customers" << "depot\n";
    for (const auto& row : summary) {
        t << std::left << std::setw(12) << row.instance << std::setw(8)
          << cell(row.best_known) << std::setw(8) << cell(row.h2s_cost)
          << std::setw(9) << gap_cell(row.h2s_gap) << std::setw(8)
          << cell(row.h3s_cost) << std::setw(9) << gap_cell(row.h3s_gap)
          << std::setw(7) << (row.winner.empty() ? "-" : row.winner)
          << std::setw(11) << row.klass.distribution << row.klass.depot
          << "\n";
    }
    return t.str();
}

BenchmarkResult run_benchmark(const std::vector<Instance>& instances,
                              const std::vector<Strategy>& strategies,
                              const BenchConfig& config) {
    BenchmarkResult result;
    for (const auto& instance : instances) {
        BenchmarkSummaryRow row;
        row.instance = instance.name();
        const auto ref = config.reference.find(instance.name());
        if (ref != config.reference.end()) row.best_known = ref->second.cost;
        row.klass = classify_instance(instance, config.classifier);

        for (Strategy strategy : strategies) {
            std::optional<long long> best;
            for (std::uint64_t seed : config.seeds) {
                PipelineConfig pc = config.pipeline;
                pc.strategy = strategy;
                pc.seed = seed;

                BenchmarkRecord rec;
                rec.instance = instance.name();
                rec.strategy = to_string(strategy);
                rec.seed = seed;
                rec.best_known = row.best_known;
                if (!row.best_known)
                    rec.warning = "no reference cost for this instance";

                const auto start = std::chrono::steady_clock::now();
                try {
                    const PipelineReport report = run_pipeline(instance, pc);
                    const FeasibilityReport check =
                        validate(report.solution, instance);
                    rec.cost = check.cost;
                    rec.feasible = check.feasible;
                    rec.repaired = report.solution.repaired;
                    if (!check.feasible && !check.reasons.empty())
                        rec.warning = check.reasons.front();
                } catch (const std::exception& e) {
                    rec.feasible = false;
                    rec.warning = e.what();
                }
                rec.wall_clock = std::chrono::duration<double>(
                                     std::chrono::steady_clock::now() - start)
                                     .count();
                if (rec.feasible && rec.best_known)
                    rec.gap = static_cast<double>(rec.cost - *rec.best_known) /
                              static_cast<double>(*rec.best_known);
                if (rec.feasible && (!best || rec.cost < *best)) best = rec.cost;
                result.records.push_back(std::move(rec));
            }
            auto gap_of = [&](long long cost) -> std::optional<double> {
                if (!row.best_known) return std::nullopt;
                return static_cast<double>(cost - *row.best_known) /
                       static_cast<double>(*row.best_known);
            };
            if (strategy == Strategy::H2S) {
                row.h2s_cost = best;
                if (best) row.h2s_gap = gap_of(*best);
            } else {
                row.h3s_cost = best;
                if (best) row.h3s_gap = gap_of(*best);
            }
        }
        if (row.h2s_cost && row.h3s_cost) {
            if (*row.h2s_cost < *row.h3s_cost) row.winner = "h2s";
            else if (*row.h3s_cost < *row.h2s_cost) row.winner = "h3s";
            else row.winner = "tie";
        }
        result.summary.push_back(std::move(row));
    }
    return result;
}

}  // namespace cvrp
