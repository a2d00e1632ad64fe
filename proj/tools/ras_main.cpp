#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ras/appointment.hpp"
#include "ras/errors.hpp"
#include "ras/exact.hpp"
#include "ras/instance.hpp"
#include "ras/io.hpp"
#include "ras/lns.hpp"
#include "ras/report.hpp"
#include "ras/routing.hpp"
#include "ras/simulate.hpp"

namespace {

using namespace ras;

// Instance seeds are derived as derive_seed(top_seed, 100 + index); solver
// and simulation seeds go through benchmark_run_seed / derive_seed so the
// whole experiment is a function of one seed.
constexpr std::uint64_t kInstanceStream = 100;

std::string number_tag(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

int cmd_generate(int n, const std::string& regime, double omega_t, int count, std::uint64_t seed,
                 const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const ScvRegime r = regime_from_string(regime);
    Manifest manifest;
    manifest.top_seed = seed;
    for (int i = 0; i < count; ++i) {
        const std::uint64_t inst_seed = derive_seed(seed, kInstanceStream + i);
        const Instance inst = generate_instance(n, r, omega_t, inst_seed);
        ManifestEntry e;
        char name[128];
        std::snprintf(name, sizeof name, "inst_n%d_%s_wt%s_%03d.json", n, regime.c_str(),
                      number_tag(omega_t).c_str(), i);
        e.path = name;
        e.id = e.path.substr(0, e.path.size() - 5);
        e.n = n;
        e.regime = regime;
        e.omega_t = omega_t;
        e.seed = inst_seed;
        save_instance(inst, out_dir + "/" + e.path);
        manifest.entries.push_back(e);
        std::printf("wrote %s/%s\n", out_dir.c_str(), name);
    }
    save_manifest(manifest, out_dir + "/manifest.json");
    std::printf("wrote %s/manifest.json (%d instances)\n", out_dir.c_str(), count);
    return 0;
}

int cmd_solve(const std::string& instance_path, const std::string& algorithm, std::uint64_t seed,
              const BenchmarkOptions& opts, const std::string& out_path) {
    const Instance inst = load_instance(instance_path, opts.travel_scale);
    SolutionRecord sol;
    const RunRecord rec = run_algorithm(inst, algorithm, seed, opts, &sol);
    if (!out_path.empty()) save_solution(sol, out_path);
    std::printf("%s objective %.6f (travel %.6f idle %.6f wait %.6f)\n", algorithm.c_str(),
                rec.objective, rec.travel_comp, rec.idle_comp, rec.wait_comp);
    std::printf("tour:");
    for (int c : sol.tour) std::printf(" %d", c);
    std::printf("\n");
    if (!out_path.empty()) std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

int cmd_evaluate(const std::string& instance_path, const std::string& solution_path,
                 double travel_scale, const FitConfig& fit) {
    const Instance inst = load_instance(instance_path, travel_scale);
    const SolutionRecord sol = load_solution(solution_path);
    const Evaluation ev = evaluate_exact(inst, Tour(sol.tour), Schedule{sol.x}, fit);
    std::printf("objective %.10f (recorded %.10f)\n", ev.objective, sol.objective);
    std::printf("travel %.10f idle %.10f wait %.10f\n", ev.travel_component, ev.idle_component,
                ev.wait_component);
    for (std::size_t j = 0; j < sol.tour.size(); ++j)
        std::printf("  position %zu client %d: E[idle] %.8f E[wait] %.8f\n", j + 1, sol.tour[j],
                    ev.per_client_idle[j], ev.per_client_wait[j]);
    const double tol = 1e-9 * std::max(1.0, std::abs(sol.objective));
    if (std::abs(ev.objective - sol.objective) > tol) {
        std::fprintf(stderr, "MISMATCH: recorded objective differs by %.3e\n",
                     ev.objective - sol.objective);
        return 2;
    }
    std::printf("recorded objective confirmed\n");
    return 0;
}

int cmd_simulate(const std::string& instance_path, const std::string& solution_path, long reps,
                 std::uint64_t seed, bool serial, double travel_scale, const FitConfig& fit) {
    const Instance inst = load_instance(instance_path, travel_scale);
    const SolutionRecord sol = load_solution(solution_path);
    const ExactEvaluator ev(inst, fit);
    SimOptions opts;
    opts.replications = reps;
    opts.seed = seed;
    opts.parallel = !serial;
    const Tour tour(sol.tour);
    const SimEstimate est = simulate_solution(ev, tour.order(), sol.x, opts);
    std::printf("objective %.6f +/- %.6f (%ld replications, seed %" PRIu64 ")\n",
                est.objective_mean, est.objective_stderr, est.replications, est.seed);
    for (std::size_t j = 0; j < sol.tour.size(); ++j)
        std::printf("  position %zu client %d: idle %.6f +/- %.6f wait %.6f +/- %.6f\n", j + 1,
                    sol.tour[j], est.idle_mean[j], est.idle_stderr[j], est.wait_mean[j],
                    est.wait_stderr[j]);
    return 0;
}

int cmd_verify(const std::string& instance_path, const std::string& solution_path, long reps,
               std::uint64_t seed, double travel_scale, const FitConfig& fit) {
    const Instance inst = load_instance(instance_path, travel_scale);
    const SolutionRecord sol = load_solution(solution_path);
    const ExactEvaluator ev(inst, fit);
    const Tour tour(sol.tour);
    const Evaluation exact = ev.evaluate(tour.order(), sol.x);
    SimOptions opts;
    opts.replications = reps;
    opts.seed = seed;
    const SimEstimate est = simulate_solution(ev, tour.order(), sol.x, opts);

    const auto zscore = [](double exact_v, double sim_v, double stderr_v) {
        const double diff = exact_v - sim_v;
        if (stderr_v == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        return diff / stderr_v;
    };
    double worst = 0.0;
    std::printf("component        exact        simulated    stderr       z\n");
    const double z_obj = zscore(exact.objective, est.objective_mean, est.objective_stderr);
    std::printf("objective        %-12.6f %-12.6f %-12.6f %+.3f\n", exact.objective,
                est.objective_mean, est.objective_stderr, z_obj);
    worst = std::abs(z_obj);
    for (std::size_t j = 0; j < sol.tour.size(); ++j) {
        const double zi = zscore(exact.per_client_idle[j], est.idle_mean[j], est.idle_stderr[j]);
        const double zw = zscore(exact.per_client_wait[j], est.wait_mean[j], est.wait_stderr[j]);
        std::printf("idle[%zu]          %-12.6f %-12.6f %-12.6f %+.3f\n", j + 1,
                    exact.per_client_idle[j], est.idle_mean[j], est.idle_stderr[j], zi);
        std::printf("wait[%zu]          %-12.6f %-12.6f %-12.6f %+.3f\n", j + 1,
                    exact.per_client_wait[j], est.wait_mean[j], est.wait_stderr[j], zw);
        worst = std::max({worst, std::abs(zi), std::abs(zw)});
    }
    std::printf("max |z| = %.3f\n", worst);
    if (!(worst <= 4.0)) {
        std::fprintf(stderr, "FAIL: exact and simulated estimates disagree beyond 4 sigma\n");
        return 2;
    }
    return 0;
}

int cmd_benchmark(const std::string& manifest_path, const std::string& algorithms_csv,
                  BenchmarkOptions opts, const std::string& out_csv,
                  const std::string& aggregate_out) {
    const Manifest manifest = load_manifest(manifest_path);
    const std::string dir = std::filesystem::path(manifest_path).parent_path().string();
    std::string item;
    std::stringstream ss(algorithms_csv);
    while (std::getline(ss, item, ','))
        if (!item.empty()) opts.algorithms.push_back(item);
    if (opts.algorithms.empty()) throw std::invalid_argument("benchmark: no algorithms given");
    const std::vector<RunRecord> records = run_benchmark(manifest, dir.empty() ? "." : dir, opts);
    write_csv(records, out_csv);
    long failures = 0;
    for (const RunRecord& r : records)
        if (r.failed) {
            ++failures;
            std::fprintf(stderr, "row failed: %s %s: %s\n", r.instance_id.c_str(),
                         r.algorithm.c_str(), r.error.c_str());
        }
    const std::string table = aggregate_table(records);
    std::fputs(table.c_str(), stdout);
    if (!aggregate_out.empty()) {
        std::ofstream agg(aggregate_out);
        agg << table;
    }
    std::printf("wrote %s (%zu rows, %ld failed)\n", out_csv.c_str(), records.size(), failures);
    return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Routing and appointment scheduling toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string out, instance_path, solution_path, manifest_path, algorithm = "lns";
    double beta = 0.5, travel_scale = 1.0;
    long iters = 2000;
    double time_limit = 0.0;
    int max_phase_dim = 1000;
    std::string accept_variant = "paper";
    int max_removed = 6;
    double accept_fraction = 0.05;
    bool serial = false;

    double scv_floor = 0.0;
    auto add_shared = [&](CLI::App* cmd, bool with_budget) {
        cmd->add_option("--seed", seed, "top-level seed");
        cmd->add_option("--beta", beta, "variance decay rate (default 0.5)");
        cmd->add_option("--max-phase-dim", max_phase_dim, "phase-type dimension cap");
        cmd->add_option("--travel-scale", travel_scale, "scale travel means on load");
        cmd->add_option("--scv-floor", scv_floor,
                        "clamp requirement scvs up to this floor instead of refusing them");
        if (with_budget) {
            cmd->add_option("--iters", iters, "LNS iteration budget (deterministic mode)");
            cmd->add_option("--time-limit", time_limit, "LNS wall-clock budget in seconds");
            cmd->add_option("--accept-variant", accept_variant, "rrt threshold: paper|decreasing");
            cmd->add_option("--max-removed", max_removed, "LNS destroy size cap D");
            cmd->add_option("--accept-fraction", accept_fraction, "rrt H_init fraction");
        }
    };

    int gen_n = 6, gen_count = 1;
    std::string gen_regime = "low", out_dir = ".";
    double gen_omega_t = 1.0;
    CLI::App* generate = app.add_subcommand("generate", "write benchmark instances + manifest");
    generate->add_option("--n", gen_n, "clients per instance")->required();
    generate->add_option("--regime", gen_regime, "service scv regime: low|high");
    generate->add_option("--omega-t", gen_omega_t, "travel-time weight");
    generate->add_option("--count", gen_count, "number of instances");
    generate->add_option("--out-dir", out_dir, "output directory");
    generate->add_option("--seed", seed, "top-level seed");

    CLI::App* solve = app.add_subcommand("solve", "run one algorithm on one instance");
    solve->add_option("--instance", instance_path)->required();
    solve->add_option("--algorithm", algorithm, "lns|tsp|mtsp|msvf|enum");
    solve->add_option("--out", out, "solution file to write");
    add_shared(solve, true);

    CLI::App* evaluate = app.add_subcommand("evaluate", "re-evaluate a solution file exactly");
    evaluate->add_option("--instance", instance_path)->required();
    evaluate->add_option("--solution", solution_path)->required();
    add_shared(evaluate, false);

    long reps = 100000;
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo estimate for a solution");
    simulate->add_option("--instance", instance_path)->required();
    simulate->add_option("--solution", solution_path)->required();
    simulate->add_option("--reps", reps, "replications");
    simulate->add_flag("--serial", serial, "single-threaded reference path");
    add_shared(simulate, false);

    CLI::App* verify = app.add_subcommand("verify", "exact vs simulated z-scores");
    verify->add_option("--instance", instance_path)->required();
    verify->add_option("--solution", solution_path)->required();
    verify->add_option("--reps", reps, "replications");
    add_shared(verify, false);

    std::string algorithms_csv = "lns,tsp,mtsp,msvf";
    std::string aggregate_out;
    CLI::App* benchmark = app.add_subcommand("benchmark", "run an algorithm grid over a manifest");
    benchmark->add_option("--manifest", manifest_path)->required();
    benchmark->add_option("--algorithms", algorithms_csv, "comma-separated algorithm list");
    benchmark->add_option("--out", out, "CSV output path")->required();
    benchmark->add_option("--aggregate-out", aggregate_out, "write the aggregate table here too");
    benchmark->add_flag("--serial", serial, "run the task grid single-threaded");
    add_shared(benchmark, true);

    CLI11_PARSE(app, argc, argv);

    try {
        BenchmarkOptions opts;
        opts.top_seed = seed;
        opts.lns_iterations = iters;
        opts.lns_time_limit_s = time_limit;
        opts.lns.max_removed = max_removed;
        opts.lns.accept_fraction = accept_fraction;
        opts.lns.accept_variant = accept_variant_from_string(accept_variant);
        opts.lns.ht.beta = beta;
        opts.enumerate.ht.beta = beta;
        opts.fit.max_dim = max_phase_dim;
        if (scv_floor > 0.0) {
            opts.fit.scv_min = scv_floor;
            opts.fit.clamp_scv = true;
        }
        opts.travel_scale = travel_scale;
        opts.parallel = !serial;

        if (generate->parsed())
            return cmd_generate(gen_n, gen_regime, gen_omega_t, gen_count, seed, out_dir);
        if (solve->parsed()) return cmd_solve(instance_path, algorithm, seed, opts, out);
        if (evaluate->parsed())
            return cmd_evaluate(instance_path, solution_path, travel_scale, opts.fit);
        if (simulate->parsed())
            return cmd_simulate(instance_path, solution_path, reps, seed, serial, travel_scale,
                                opts.fit);
        if (verify->parsed())
            return cmd_verify(instance_path, solution_path, reps, seed, travel_scale, opts.fit);
        if (benchmark->parsed())
            return cmd_benchmark(manifest_path, algorithms_csv, opts, out, aggregate_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
