#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cvrp/bench.hpp"
#include "cvrp/pipeline.hpp"
#include "cvrp/svg_plot.hpp"

namespace {

constexpr int kExitFeasible = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitUsage = 64;

// Paths that don't exist as given are retried under $CVRP_DATA_DIR.
std::string resolve_path(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::exists(path)) return path;
    if (const char* dir = std::getenv("CVRP_DATA_DIR")) {
        const auto candidate = fs::path(dir) / path;
        if (fs::exists(candidate)) return candidate.string();
    }
    return path;  // let the loader produce the error
}

void write_or_print(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw cvrp::ArgumentError("cannot open output file: " + out_path);
    out << content;
}

struct SolveArgs {
    std::string path;
    std::string strategy = "h2s";
    std::uint64_t seed = 1;
    int reads = 200;
    int sweeps = 2000;
    int trucks = 0;  // 0 = from file
    bool repair = false;
    bool timings = true;
    std::string out;
    std::string plot;
};

cvrp::PipelineConfig make_config(const SolveArgs& a) {
    cvrp::PipelineConfig cfg;
    cfg.strategy = cvrp::strategy_from_string(a.strategy);
    cfg.seed = a.seed;
    cfg.sampler.num_reads = a.reads;
    cfg.sampler.sweeps_per_read = a.sweeps;
    cfg.repair_enabled = a.repair;
    return cfg;
}

int cmd_solve(const SolveArgs& a) {
    const auto instance = cvrp::load_instance(
        resolve_path(a.path), a.trucks > 0 ? std::optional<int>(a.trucks)
                                           : std::nullopt);
    const auto report = cvrp::run_pipeline(instance, make_config(a));
    write_or_print(a.out, report.to_json(a.timings));
    if (!a.plot.empty())
        write_or_print(a.plot,
                       cvrp::render_routes_svg(instance, report.solution.routes));
    const auto check = cvrp::validate(report.solution, instance);
    return check.feasible && report.solution.feasible ? kExitFeasible
                                                      : kExitInfeasible;
}

int cmd_cluster(const std::string& path, int clusters, std::uint64_t seed,
                int trucks, const std::string& out) {
    const auto instance = cvrp::load_instance(
        resolve_path(path),
        trucks > 0 ? std::optional<int>(trucks) : std::nullopt);
    const int c = clusters > 0 ? clusters : instance.truck_count();
    cvrp::FcmConfig fcm;
    fcm.seed = cvrp::mix_seed(seed, "fcm");
    const auto m = cvrp::run_fcm(cvrp::build_fcm_points(instance, c), c, fcm);

    std::vector<std::vector<double>> rows(
        m.gamma.begin(), m.gamma.begin() + instance.customer_count());
    std::vector<int> demands;
    for (int id = 1; id < instance.size(); ++id)
        demands.push_back(instance.node(id).demand);
    const std::vector<long long> caps(
        static_cast<size_t>(c),
        cvrp::cluster_capacity(instance.truck_capacity(), c,
                               instance.truck_count()));
    const auto assignment = cvrp::assign(rows, demands, caps, m.centroids);

    nlohmann::json j;
    j["instance"] = instance.name();
    j["clusters"] = c;
    j["memberships"] = nlohmann::json::parse(cvrp::membership_to_json(m));
    j["assignment"] = nlohmann::json::parse(assignment.to_json());
    write_or_print(out, j.dump(2));
    return kExitFeasible;
}

int cmd_qubo_dump(const std::string& path, const std::string& level,
                  int cluster, std::uint64_t seed, const std::string& out) {
    const auto instance = cvrp::load_instance(resolve_path(path));
    const int p = instance.truck_count();
    cvrp::FcmConfig fcm;
    fcm.seed = cvrp::mix_seed(seed, "fcm");
    const auto m = cvrp::run_fcm(cvrp::build_fcm_points(instance, p), p, fcm);
    std::vector<std::vector<double>> rows(
        m.gamma.begin(), m.gamma.begin() + instance.customer_count());
    std::vector<int> demands;
    for (int id = 1; id < instance.size(); ++id)
        demands.push_back(instance.node(id).demand);
    const std::vector<long long> caps(static_cast<size_t>(p),
                                      instance.truck_capacity());
    const auto assignment = cvrp::assign(rows, demands, caps, m.centroids);

    if (level == "tsp") {
        if (cluster < 0 || cluster >= p)
            throw cvrp::ArgumentError("cluster index " + std::to_string(cluster) +
                                      " out of range [0, " + std::to_string(p - 1) +
                                      "]");
        std::vector<cvrp::Point> points{instance.depot().point()};
        for (int row : assignment.clusters[static_cast<size_t>(cluster)].members)
            points.push_back(instance.node(row + 1).point());
        if (points.size() < 2)
            throw cvrp::ArgumentError("cluster " + std::to_string(cluster) +
                                      " is empty");
        write_or_print(out, cvrp::build_tsp_qubo(points).model.dump());
        return kExitFeasible;
    }
    if (level == "cvrp") {
        std::vector<cvrp::RoutingNode> nodes{{instance.depot().point(), 0}};
        for (const auto& cl : assignment.clusters)
            nodes.push_back({cl.centroid, cl.aggregate_demand});
        const auto prob = cvrp::RoutingProblem::make(std::move(nodes), p,
                                                     instance.truck_capacity());
        write_or_print(out, cvrp::build_cvrp_qubo(prob).model.dump());
        return kExitFeasible;
    }
    throw cvrp::ArgumentError("unknown qubo level '" + level +
                              "' (expected tsp or cvrp)");
}

int cmd_bench(std::vector<std::string> paths, const std::string& data_dir,
              const std::string& strategies, std::vector<std::uint64_t> seeds,
              int reads, int sweeps, bool repair, const std::string& ref_path,
              const std::string& out) {
    namespace fs = std::filesystem;
    if (paths.empty()) {
        std::string dir = data_dir;
        if (dir.empty())
            if (const char* env = std::getenv("CVRP_DATA_DIR")) dir = env;
        if (dir.empty())
            throw cvrp::ArgumentError(
                "no instances given and no --data directory or CVRP_DATA_DIR set");
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.path().extension() == ".vrp")
                paths.push_back(entry.path().string());
        std::sort(paths.begin(), paths.end());
    }
    std::vector<cvrp::Instance> instances;
    for (const auto& p : paths)
        instances.push_back(cvrp::load_instance(resolve_path(p)));

    cvrp::BenchConfig cfg;
    cfg.pipeline.sampler.num_reads = reads;
    cfg.pipeline.sampler.sweeps_per_read = sweeps;
    cfg.pipeline.repair_enabled = repair;
    if (!seeds.empty()) cfg.seeds = std::move(seeds);
    if (!ref_path.empty())
        cfg.reference = cvrp::load_reference_costs(resolve_path(ref_path));

    std::vector<cvrp::Strategy> strats;
    std::stringstream ss(strategies);
    for (std::string tok; std::getline(ss, tok, ',');)
        strats.push_back(cvrp::strategy_from_string(tok));

    const auto result = cvrp::run_benchmark(instances, strats, cfg);
    if (!out.empty()) write_or_print(out, result.records_jsonl());
    std::cout << result.summary_table();
    for (const auto& rec : result.records)
        if (!rec.feasible) return kExitInfeasible;
    return kExitFeasible;
}

int cmd_plot(const std::string& report_path, const std::string& instance_path,
             const std::string& out) {
    std::ifstream in(resolve_path(report_path));
    if (!in)
        throw cvrp::ArgumentError("cannot open report file: " + report_path);
    nlohmann::json j = nlohmann::json::parse(in);
    const auto& routes_json =
        j.contains("solution") ? j["solution"]["routes"] : j["routes"];
    std::vector<std::vector<int>> routes =
        routes_json.get<std::vector<std::vector<int>>>();
    const auto instance = cvrp::load_instance(resolve_path(instance_path));
    write_or_print(out, cvrp::render_routes_svg(instance, routes));
    return kExitFeasible;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CVRP solver: fuzzy clustering + QUBO annealing pipelines"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a config file");

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "Run a pipeline on an instance");
    solve->add_option("path", sa.path, "VRPLib instance file")->required();
    solve->add_option("--strategy", sa.strategy, "h2s or h3s")
        ->check(CLI::IsMember({"h2s", "h3s"}));
    solve->add_option("--seed", sa.seed, "Master random seed");
    solve->add_option("--reads", sa.reads, "Annealer reads per stage");
    solve->add_option("--sweeps", sa.sweeps, "Annealer sweeps per read");
    solve->add_option("--trucks", sa.trucks, "Override truck count");
    solve->add_flag("--repair", sa.repair, "Enable greedy repair of samples");
    solve->add_flag("--timings,!--no-timings", sa.timings,
                    "Include wall-clock fields in the report");
    solve->add_option("--out", sa.out, "Report JSON path (default stdout)");
    solve->add_option("--plot", sa.plot, "Also write an SVG route map");

    std::string cl_path, cl_out;
    int cl_clusters = 0, cl_trucks = 0;
    std::uint64_t cl_seed = 1;
    auto* cluster = app.add_subcommand("cluster", "Cluster and assign only");
    cluster->add_option("path", cl_path, "VRPLib instance file")->required();
    cluster->add_option("--clusters", cl_clusters, "Cluster count (default: trucks)");
    cluster->add_option("--seed", cl_seed, "Random seed");
    cluster->add_option("--trucks", cl_trucks, "Override truck count");
    cluster->add_option("--out", cl_out, "Output JSON path (default stdout)");

    std::string qd_path, qd_level = "tsp", qd_out;
    int qd_cluster = 0;
    std::uint64_t qd_seed = 1;
    auto* qdump = app.add_subcommand("qubo-dump", "Dump a stage QUBO model");
    qdump->add_option("path", qd_path, "VRPLib instance file")->required();
    qdump->add_option("--level", qd_level, "tsp or cvrp")
        ->check(CLI::IsMember({"tsp", "cvrp"}));
    qdump->add_option("--cluster", qd_cluster, "Cluster index for tsp level");
    qdump->add_option("--seed", qd_seed, "Clustering seed");
    qdump->add_option("--out", qd_out, "Output path (default stdout)");

    std::vector<std::string> b_paths;
    std::string b_data, b_strategies = "h2s,h3s", b_ref, b_out;
    std::vector<std::uint64_t> b_seeds;
    int b_reads = 200, b_sweeps = 2000;
    bool b_repair = false;
    auto* bench = app.add_subcommand("bench", "Run the benchmark harness");
    bench->add_option("paths", b_paths, "Instance files (default: scan data dir)");
    bench->add_option("--data", b_data, "Directory to scan for .vrp files");
    bench->add_option("--strategies", b_strategies, "Comma list: h2s,h3s");
    bench->add_option("--seeds", b_seeds, "Seeds to run per instance/strategy");
    bench->add_option("--reads", b_reads, "Annealer reads per stage");
    bench->add_option("--sweeps", b_sweeps, "Annealer sweeps per read");
    bench->add_flag("--repair", b_repair, "Enable greedy repair of samples");
    bench->add_option("--ref", b_ref, "Reference cost file (name cost flag)");
    bench->add_option("--out", b_out, "Write per-run JSONL records here");

    std::string p_report, p_instance, p_out;
    auto* plot = app.add_subcommand("plot", "Render routes from a report");
    plot->add_option("report", p_report, "Report JSON from solve")->required();
    plot->add_option("instance", p_instance, "VRPLib instance file")->required();
    plot->add_option("--out", p_out, "SVG output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (solve->parsed()) return cmd_solve(sa);
        if (cluster->parsed())
            return cmd_cluster(cl_path, cl_clusters, cl_seed, cl_trucks, cl_out);
        if (qdump->parsed())
            return cmd_qubo_dump(qd_path, qd_level, qd_cluster, qd_seed, qd_out);
        if (bench->parsed())
            return cmd_bench(b_paths, b_data, b_strategies, b_seeds, b_reads,
                             b_sweeps, b_repair, b_ref, b_out);
        if (plot->parsed()) return cmd_plot(p_report, p_instance, p_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitUsage;
}
