#include "cvrp/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace cvrp {

std::string to_string(Strategy s) {
    return s == Strategy::H2S ? "h2s" : "h3s";
}

Strategy strategy_from_string(const std::string& s) {
    if (s == "h2s" || s == "H2S") return Strategy::H2S;
    if (s == "h3s" || s == "H3S") return Strategy::H3S;
    throw ArgumentError("unknown strategy '" + s + "' (expected h2s or h3s)");
}

namespace {

class StageTimer {
public:
    StageTimer(PipelineReport& report, std::string stage)
        : report_(report), stage_(std::move(stage)),
          start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        const auto end = std::chrono::steady_clock::now();
        report_.timings.push_back(
            {stage_, std::chrono::duration<double>(end - start_).count()});
    }

private:
    PipelineReport& report_;
    std::string stage_;
    std::chrono::steady_clock::time_point start_;
};

// Stage seed derived from the customer set itself, so the same subproblem is
// sampled identically no matter which truck or cluster slot it landed in.
std::uint64_t content_seed(std::uint64_t base, const std::vector<int>& ids) {
    std::uint64_t s = base;
    for (int id : ids) s = mix_seed(s, static_cast<std::uint64_t>(id));
    return s;
}

// Anneal with escalation: doubled sweeps and a fresh seed per retry. A sample
// that decodes feasible wins outright; otherwise, with repair enabled, every
// sampled skeleton is completed by greedy_repair and the cheapest feasible
// completion wins. Samples arrive best-first, so the first feasible decode is
// also the cheapest one.
RouteSolution sample_routes(const CvrpQubo& qubo, const SamplerConfig& base,
                            std::uint64_t stage_seed, bool repair,
                            const std::string& stage) {
    RouteSolution best;
    double best_energy = std::numeric_limits<double>::infinity();
    constexpr int kMaxAttempts = 3;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        SamplerConfig cfg = base;
        cfg.seed = mix_seed(stage_seed, static_cast<std::uint64_t>(attempt));
        cfg.sweeps_per_read = base.sweeps_per_read << attempt;
        const SampleSet set = anneal(qubo.model, cfg);

        std::optional<RouteSolution> repaired;
        for (const Sample& s : set.samples) {
            RouteSolution sol = decode(qubo, s.bits);
            if (sol.feasible) return sol;
            if (s.energy < best_energy) {
                best_energy = s.energy;
                best = sol;
            }
            if (repair) {
                RouteSolution fixed = greedy_repair(sol, qubo);
                if (fixed.feasible &&
                    (!repaired || fixed.total_cost < repaired->total_cost))
                    repaired = std::move(fixed);
            }
        }
        if (repaired) return *repaired;
    }
    std::string why = best.infeasibility_reason.empty()
                          ? "nonzero constraint penalties"
                          : best.infeasibility_reason;
    throw PipelineError("stage '" + stage + "': no feasible sample after " +
                        std::to_string(kMaxAttempts) + " attempts (" + why + ")");
}

std::vector<int> customer_demands(const Instance& instance) {
    std::vector<int> d;
    d.reserve(static_cast<size_t>(instance.customer_count()));
    for (int id = 1; id < instance.size(); ++id)
        d.push_back(instance.node(id).demand);
    return d;
}

// Membership rows for customers only; depot-copy rows are dropped.
std::vector<std::vector<double>> customer_rows(const MembershipMatrix& m,
                                               const Instance& instance) {
    const size_t nc = static_cast<size_t>(instance.customer_count());
    return {m.gamma.begin(), m.gamma.begin() + static_cast<std::ptrdiff_t>(nc)};
}

// TSP over the depot plus a set of customers, solved on the instance metric.
// The returned routes carry instance customer ids.
RouteSolution solve_group_tsp(const Instance& instance,
                              const std::vector<int>& customers,
                              const PipelineConfig& config,
                              const std::string& stage) {
    const int n = static_cast<int>(customers.size()) + 1;
    RoutingProblem prob;
    prob.nodes.reserve(static_cast<size_t>(n));
    prob.nodes.push_back({instance.depot().point(), 0});
    for (int id : customers) prob.nodes.push_back({instance.node(id).point(), 0});
    prob.cost.assign(static_cast<size_t>(n),
                     std::vector<int>(static_cast<size_t>(n), 0));
    int max_cost = 0;
    auto global_id = [&](int local) { return local == 0 ? 0 : customers[static_cast<size_t>(local - 1)]; };
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const int d = distance(instance.node(global_id(i)),
                                   instance.node(global_id(j)));
            prob.cost[static_cast<size_t>(i)][static_cast<size_t>(j)] = d;
            prob.cost[static_cast<size_t>(j)][static_cast<size_t>(i)] = d;
            max_cost = std::max(max_cost, d);
        }
    }
    prob.truck_count = 1;
    prob.truck_capacity = 0;
    prob.weights = config.weights ? *config.weights
                                  : PenaltyWeights::defaults(max_cost, n);
    prob.depot_return_penalty = config.depot_return_penalty;
    prob.variable_budget = config.variable_budget;

    const CvrpQubo qubo = build_tsp_qubo(prob);
    const std::uint64_t seed =
        content_seed(mix_seed(config.seed, "tsp"), customers);
    RouteSolution sol =
        sample_routes(qubo, config.sampler, seed, config.repair_enabled, stage);
    for (auto& route : sol.routes)
        for (auto& v : route) v = global_id(v);
    return sol;
}

// Folds per-truck sub-solutions into one instance-level solution.
void accumulate(RouteSolution& total, const RouteSolution& part, size_t truck) {
    if (!part.routes.empty()) total.routes[truck] = part.routes[0];
    total.total_cost += part.total_cost;
    for (const auto& [name, e] : part.penalty_breakdown)
        total.penalty_breakdown[name] += e;
    total.repaired = total.repaired || part.repaired;
    total.feasible = total.feasible && part.feasible;
    total.issues.insert(total.issues.end(), part.issues.begin(),
                        part.issues.end());
}

// Truck slots are interchangeable; fix a canonical route order so that two
// decompositions of the same tours serialize identically.
void canonicalize(RouteSolution& sol) {
    std::stable_sort(sol.routes.begin(), sol.routes.end(),
                     [](const std::vector<int>& a, const std::vector<int>& b) {
                         if (a.empty() != b.empty()) return !a.empty();
                         return a < b;
                     });
}

void check_capacity(RouteSolution& sol, const Instance& instance) {
    for (size_t r = 0; r < sol.routes.size(); ++r) {
        long long load = 0;
        for (int id : sol.routes[r]) load += instance.node(id).demand;
        if (load > instance.truck_capacity()) {
            sol.feasible = false;
            sol.infeasibility_reason = "capacity";
            sol.issues.push_back("truck " + std::to_string(r) + ": load " +
                                 std::to_string(load) + " exceeds capacity " +
                                 std::to_string(instance.truck_capacity()));
        }
    }
}

}  // namespace

PipelineReport run_h2s(const Instance& instance, const PipelineConfig& config) {
    const int p = instance.truck_count();
    PipelineReport report;
    report.instance_name = instance.name();
    report.strategy = Strategy::H2S;
    report.seed = config.seed;
    report.cluster_count = p;

    {
        StageTimer t(report, "cluster");
        FcmConfig fcm = config.fcm;
        fcm.seed = mix_seed(config.seed, "fcm");
        report.memberships = run_fcm(
            build_fcm_points(instance, fcm.depot_copies.value_or(p)), p, fcm);
    }
    {
        StageTimer t(report, "assign");
        const std::vector<long long> caps(
            static_cast<size_t>(p),
            cluster_capacity(instance.truck_capacity(), p, p));
        report.assignment =
            assign(customer_rows(report.memberships, instance),
                   customer_demands(instance), caps, report.memberships.centroids);
    }

    RouteSolution total;
    total.routes.assign(static_cast<size_t>(p), {});
    total.feasible = true;
    {
        StageTimer t(report, "route");
        for (int k = 0; k < p; ++k) {
            const auto& members = report.assignment.clusters[static_cast<size_t>(k)].members;
            if (members.empty()) continue;
            std::vector<int> customers;
            customers.reserve(members.size());
            for (int row : members) customers.push_back(row + 1);
            accumulate(total,
                       solve_group_tsp(instance, customers, config,
                                       "cluster " + std::to_string(k) + " tsp"),
                       static_cast<size_t>(k));
        }
    }
    canonicalize(total);
    check_capacity(total, instance);
    report.solution = std::move(total);
    return report;
}

PipelineReport run_h3s(const Instance& instance, const PipelineConfig& config) {
    const int p = instance.truck_count();
    PipelineReport report;
    report.instance_name = instance.name();
    report.strategy = Strategy::H3S;
    report.seed = config.seed;

    std::vector<int> candidates = config.cluster_candidates;
    if (candidates.empty()) {
        for (int mult = 1; mult <= 4; ++mult)
            if (mult * p <= instance.customer_count()) candidates.push_back(mult * p);
    }
    // clusters must split evenly over trucks and divide the truck capacity
    std::erase_if(candidates, [&](int c) {
        return c < 1 || c > instance.customer_count() || c % p != 0 ||
               instance.truck_capacity() % (c / p) != 0;
    });
    if (candidates.empty())
        throw PipelineError(
            "no admissible cluster counts: candidates must be positive "
            "multiples of the truck count whose per-truck ratio divides the "
            "truck capacity");

    {
        StageTimer t(report, "elbow");
        FcmConfig fcm = config.fcm;
        fcm.seed = mix_seed(config.seed, "fcm");
        report.elbow = select_cluster_count(instance, candidates, fcm);
    }
    const int c = report.elbow.chosen;
    report.cluster_count = c;

    {
        StageTimer t(report, "cluster");
        FcmConfig fcm = config.fcm;
        fcm.seed = mix_seed(config.seed, "fcm");
        report.memberships = run_fcm(
            build_fcm_points(instance, fcm.depot_copies.value_or(c)), c, fcm);
    }
    {
        StageTimer t(report, "assign");
        const std::vector<long long> caps(
            static_cast<size_t>(c),
            cluster_capacity(instance.truck_capacity(), c, p));
        report.assignment =
            assign(customer_rows(report.memberships, instance),
                   customer_demands(instance), caps, report.memberships.centroids);
    }

    // centroid-level CVRP: node 0 is the true depot, node k+1 is cluster k
    RouteSolution centroid_sol;
    {
        StageTimer t(report, "centroid-cvrp");
        std::vector<RoutingNode> nodes;
        nodes.reserve(static_cast<size_t>(c) + 1);
        nodes.push_back({instance.depot().point(), 0});
        for (const auto& cl : report.assignment.clusters)
            nodes.push_back({cl.centroid, cl.aggregate_demand});
        auto prob = RoutingProblem::make(std::move(nodes), p,
                                         instance.truck_capacity());
        if (config.weights) prob.weights = *config.weights;
        prob.depot_return_penalty = config.depot_return_penalty;
        prob.variable_budget = config.variable_budget;
        const CvrpQubo qubo = build_cvrp_qubo(prob);
        centroid_sol = sample_routes(qubo, config.sampler,
                                     mix_seed(config.seed, "cvrp"),
                                     config.repair_enabled, "centroid cvrp");
        for (auto& route : centroid_sol.routes)
            for (auto& v : route) --v;  // local node id -> cluster id
    }

    RouteSolution total;
    total.routes.assign(static_cast<size_t>(p), {});
    total.feasible = centroid_sol.feasible;
    total.repaired = centroid_sol.repaired;
    {
        StageTimer t(report, "route");
        for (int r = 0; r < p; ++r) {
            std::vector<int> customers;
            for (int cluster : centroid_sol.routes[static_cast<size_t>(r)])
                for (int row : report.assignment.clusters[static_cast<size_t>(cluster)].members)
                    customers.push_back(row + 1);
            if (customers.empty()) continue;
            accumulate(total,
                       solve_group_tsp(instance, customers, config,
                                       "truck " + std::to_string(r) + " tsp"),
                       static_cast<size_t>(r));
        }
    }
    canonicalize(total);
    check_capacity(total, instance);
    report.centroid_solution = std::move(centroid_sol);
    report.solution = std::move(total);
    return report;
}

PipelineReport run_pipeline(const Instance& instance,
                            const PipelineConfig& config) {
    return config.strategy == Strategy::H2S ? run_h2s(instance, config)
                                            : run_h3s(instance, config);
}

FeasibilityReport validate(const RouteSolution& solution,
                           const Instance& instance) {
    FeasibilityReport rep;
    const int n = instance.size();
    if (static_cast<int>(solution.routes.size()) > instance.truck_count())
        rep.reasons.push_back("uses " + std::to_string(solution.routes.size()) +
                              " routes but only " +
                              std::to_string(instance.truck_count()) +
                              " trucks are available");

    std::vector<int> visits(static_cast<size_t>(n), 0);
    for (size_t r = 0; r < solution.routes.size(); ++r) {
        long long load = 0;
        for (int id : solution.routes[r]) {
            if (id < 1 || id >= n) {
                rep.reasons.push_back("truck " + std::to_string(r) +
                                      " visits unknown node " + std::to_string(id));
                continue;
            }
            ++visits[static_cast<size_t>(id)];
            load += instance.node(id).demand;
        }
        if (load > instance.truck_capacity())
            rep.reasons.push_back("truck " + std::to_string(r) + " load " +
                                  std::to_string(load) + " exceeds capacity " +
                                  std::to_string(instance.truck_capacity()));
        // cost recomputed from raw coordinates, not from any model matrix
        const auto& route = solution.routes[r];
        int prev = 0;
        for (int id : route) {
            if (id < 1 || id >= n) continue;
            rep.cost += std::llround(std::hypot(
                instance.node(prev).x - instance.node(id).x,
                instance.node(prev).y - instance.node(id).y));
            prev = id;
        }
        if (!route.empty())
            rep.cost += std::llround(std::hypot(
                instance.node(prev).x - instance.depot().x,
                instance.node(prev).y - instance.depot().y));
    }
    for (int id = 1; id < n; ++id) {
        if (visits[static_cast<size_t>(id)] == 0)
            rep.reasons.push_back("customer " + std::to_string(id) +
                                  " is unvisited");
        else if (visits[static_cast<size_t>(id)] > 1)
            rep.reasons.push_back("customer " + std::to_string(id) +
                                  " is multiply-visited (" +
                                  std::to_string(visits[static_cast<size_t>(id)]) +
                                  " times)");
    }
    rep.feasible = rep.reasons.empty();
    return rep;
}

std::string PipelineReport::to_json(bool include_timings) const {
    nlohmann::json j;
    j["instance"] = instance_name;
    j["strategy"] = cvrp::to_string(strategy);
    j["seed"] = seed;
    j["cluster_count"] = cluster_count;
    j["solution"] = nlohmann::json::parse(solution.to_json());
    j["assignment"] = nlohmann::json::parse(assignment.to_json());
    j["memberships"] = nlohmann::json::parse(membership_to_json(memberships));
    if (centroid_solution)
        j["centroid_solution"] = nlohmann::json::parse(centroid_solution->to_json());
    if (!elbow.candidates.empty()) {
        j["elbow"] = {{"candidates", elbow.candidates},
                      {"intra_cluster_sums", elbow.intra_cluster_sums},
                      {"second_differences", elbow.second_differences},
                      {"chosen", elbow.chosen}};
        if (!elbow.warning.empty()) j["elbow"]["warning"] = elbow.warning;
    }
    if (include_timings) {
        auto& arr = j["timings"] = nlohmann::json::array();
        for (const auto& t : timings)
            arr.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    }
    return j.dump(2);
}

}  // namespace cvrp
