#include "ras/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ras/errors.hpp"

namespace ras {

namespace {

std::string fmt_double(double v, const char* spec = "%.10g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string budget_string(const BenchmarkOptions& opts, const std::string& algorithm) {
    if (algorithm != "lns") return "-";
    if (opts.lns_time_limit_s > 0.0) return fmt_double(opts.lns_time_limit_s, "%.3g") + "s";
    return "it" + std::to_string(opts.lns_iterations);
}

}  // namespace

std::uint64_t benchmark_run_seed(std::uint64_t top_seed, std::size_t instance_index,
                                 std::size_t algorithm_index) {
    return derive_seed(derive_seed(top_seed, 200 + instance_index), 300 + algorithm_index);
}

RunRecord run_algorithm(const Instance& inst, const std::string& algorithm, std::uint64_t seed,
                        const BenchmarkOptions& opts, SolutionRecord* solution_out) {
    RunRecord rec;
    rec.algorithm = algorithm;
    rec.seed = seed;
    rec.n = inst.n;
    rec.omega_t = inst.weight_travel;
    rec.budget = budget_string(opts, algorithm);

    ExactEvaluator ev(inst, opts.fit);
    Tour tour;
    Schedule sched;
    double objective = 0.0;
    bool schedule_converged = true;

    if (algorithm == "lns") {
        LnsParams params = opts.lns;
        params.seed = seed;
        params.iterations = opts.lns_iterations;
        params.time_limit_s = opts.lns_time_limit_s;
        Solution sol = lns_solve(ev, params);
        if (sol.aborted) throw EvalError("lns aborted: " + sol.abort_reason);
        tour = sol.tour;
        sched = sol.schedule;
        objective = sol.objective;
        schedule_converged = sol.schedule_converged;
    } else if (algorithm == "enum") {
        EnumerateOptions eopts = opts.enumerate;
        eopts.ht = opts.lns.ht;
        eopts.mode = inst.n <= eopts.max_exact_n ? EnumerationMode::exact
                                                 : EnumerationMode::heavy_traffic_prefilter;
        EnumerationResult res = enumerate_optimal(ev, eopts);
        tour = res.tour;
        sched = res.schedule;
        objective = res.value;
    } else {
        if (algorithm == "tsp") {
            tour = solve_tsp(ev, opts.lns.ht);
        } else if (algorithm == "mtsp") {
            tour = mtsp_tour(ev);
        } else if (algorithm == "msvf") {
            tour = msvf_tour(inst);
        } else {
            throw std::invalid_argument("unknown algorithm: " + algorithm);
        }
        OptimizedSchedule opt = optimize_schedule(ev, tour.order(), opts.lns.ht);
        sched = std::move(opt.schedule);
        objective = opt.value;
        schedule_converged = opt.converged;
    }

    TourEvaluator te(ev, tour.order());
    const Evaluation eval = te.full_evaluation(sched.x);
    rec.objective = objective;
    rec.travel_comp = eval.travel_component;
    rec.idle_comp = eval.idle_component;
    rec.wait_comp = eval.wait_component;

    if (solution_out) {
        solution_out->tour = tour.vec();
        solution_out->x = sched.x;
        solution_out->objective = objective;
        solution_out->objective_kind = "exact-optimized";
        solution_out->travel_comp = eval.travel_component;
        solution_out->idle_comp = eval.idle_component;
        solution_out->wait_comp = eval.wait_component;
        solution_out->algorithm = algorithm;
        solution_out->seed = seed;
        solution_out->beta = opts.lns.ht.beta;
        solution_out->budget = rec.budget;
        if (algorithm == "lns") {
            solution_out->max_removed = opts.lns.max_removed;
            solution_out->accept_fraction = opts.lns.accept_fraction;
            solution_out->accept_variant = to_string(opts.lns.accept_variant);
        }
    }
    (void)schedule_converged;
    return rec;
}

std::vector<RunRecord> run_benchmark(const Manifest& manifest, const std::string& base_dir,
                                     const BenchmarkOptions& opts) {
    struct Task {
        std::size_t inst_idx;
        std::size_t alg_idx;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i)
        for (std::size_t a = 0; a < opts.algorithms.size(); ++a) tasks.push_back({i, a});

    std::vector<RunRecord> records(tasks.size());
    const bool deterministic_wall = opts.lns_time_limit_s <= 0.0;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
#endif
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        const ManifestEntry& entry = manifest.entries[tasks[t].inst_idx];
        const std::string& algorithm = opts.algorithms[tasks[t].alg_idx];
        const std::uint64_t seed =
            benchmark_run_seed(opts.top_seed, tasks[t].inst_idx, tasks[t].alg_idx);
        RunRecord rec;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if (entry.path.empty()) throw ParseError("manifest entry has an empty path");
            const std::string path =
                entry.path.front() == '/' ? entry.path : base_dir + "/" + entry.path;
            const Instance inst = load_instance(path, opts.travel_scale);
            rec = run_algorithm(inst, algorithm, seed, opts);
        } catch (const std::exception& e) {
            rec.algorithm = algorithm;
            rec.seed = seed;
            rec.failed = true;
            rec.error = e.what();
            rec.budget = budget_string(opts, algorithm);
        }
        rec.instance_id = entry.id;
        rec.n = entry.n;
        rec.regime = entry.regime;
        rec.omega_t = entry.omega_t;
        rec.wall_ms = deterministic_wall
                          ? 0
                          : std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
        records[t] = std::move(rec);
    }

    // Per-instance gaps against the best executed objective.
    std::map<std::string, double> best;
    for (const RunRecord& r : records) {
        if (r.failed) continue;
        auto it = best.find(r.instance_id);
        if (it == best.end() || r.objective < it->second) best[r.instance_id] = r.objective;
    }
    for (RunRecord& r : records) {
        if (r.failed) continue;
        const double b = best.at(r.instance_id);
        r.gap_pct = b > 0.0 ? (r.objective - b) / b * 100.0 : 0.0;
    }
    return records;
}

std::string csv_header() {
    return "instance_id,n,regime,omega_t,algorithm,seed,budget,objective,travel_comp,idle_comp,"
           "wait_comp,gap_pct,wall_ms";
}

std::string to_csv_row(const RunRecord& r) {
    std::ostringstream out;
    out << r.instance_id << ',' << r.n << ',' << r.regime << ',' << fmt_double(r.omega_t) << ','
        << r.algorithm << ',' << r.seed << ',' << r.budget << ',';
    if (r.failed) {
        out << "NA,NA,NA,NA,NA," << r.wall_ms;
    } else {
        out << fmt_double(r.objective) << ',' << fmt_double(r.travel_comp) << ','
            << fmt_double(r.idle_comp) << ',' << fmt_double(r.wait_comp) << ','
            << fmt_double(r.gap_pct, "%.6f") << ',' << r.wall_ms;
    }
    return out.str();
}

void write_csv(const std::vector<RunRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("benchmark csv: cannot write " + path);
    out << csv_header() << '\n';
    for (const RunRecord& r : records) out << to_csv_row(r) << '\n';
}

std::vector<RunRecord> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("benchmark csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != csv_header())
        throw ParseError("benchmark csv: unexpected header in " + path);
    std::vector<RunRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) f.push_back(item);
        if (f.size() != 13) throw ParseError("benchmark csv: malformed row: " + line);
        RunRecord r;
        r.instance_id = f[0];
        r.n = std::stoi(f[1]);
        r.regime = f[2];
        r.omega_t = std::stod(f[3]);
        r.algorithm = f[4];
        r.seed = std::stoull(f[5]);
        r.budget = f[6];
        if (f[7] == "NA") {
            r.failed = true;
        } else {
            r.objective = std::stod(f[7]);
            r.travel_comp = std::stod(f[8]);
            r.idle_comp = std::stod(f[9]);
            r.wait_comp = std::stod(f[10]);
            r.gap_pct = std::stod(f[11]);
        }
        r.wall_ms = std::stol(f[12]);
        records.push_back(std::move(r));
    }
    return records;
}

std::string aggregate_table(const std::vector<RunRecord>& records) {
    struct Key {
        int n;
        double omega_t;
        std::string regime;
        bool operator<(const Key& o) const {
            if (n != o.n) return n < o.n;
            if (omega_t != o.omega_t) return omega_t < o.omega_t;
            return regime < o.regime;
        }
    };
    std::set<std::string> algorithms;
    std::map<Key, std::map<std::string, std::pair<double, long>>> groups;
    for (const RunRecord& r : records) {
        if (r.failed) continue;
        algorithms.insert(r.algorithm);
        auto& cell = groups[{r.n, r.omega_t, r.regime}][r.algorithm];
        cell.first += r.gap_pct;
        cell.second += 1;
    }
    std::ostringstream out;
    out << "mean gap_pct by (n, omega_t, regime)\n";
    out << "n,omega_t,regime";
    for (const std::string& a : algorithms) out << ',' << a;
    out << '\n';
    for (const auto& [key, cells] : groups) {
        out << key.n << ',' << fmt_double(key.omega_t) << ',' << key.regime;
        for (const std::string& a : algorithms) {
            auto it = cells.find(a);
            if (it == cells.end() || it->second.second == 0)
                out << ",NA";
            else
                out << ',' << fmt_double(it->second.first / it->second.second, "%.4f");
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace ras
