#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ras/io.hpp"
#include "ras/lns.hpp"
#include "ras/routing.hpp"

namespace ras {

struct RunRecord {
    std::string instance_id;
    int n = 0;
    std::string regime;
    double omega_t = 0.0;
    std::string algorithm;
    std::uint64_t seed = 0;
    std::string budget;
    double objective = 0.0;
    double travel_comp = 0.0;
    double idle_comp = 0.0;
    double wait_comp = 0.0;
    double gap_pct = 0.0;
    long wall_ms = 0;
    bool failed = false;
    std::string error;
};

struct BenchmarkOptions {
    std::vector<std::string> algorithms;  // of lns, tsp, mtsp, msvf, enum
    std::uint64_t top_seed = 0;
    long lns_iterations = 2000;
    double lns_time_limit_s = 0.0;  // > 0 switches LNS to wall-clock budgets
    LnsParams lns;                  // D, H_init, variant, beta
    EnumerateOptions enumerate;
    FitConfig fit;
    double travel_scale = 1.0;
    bool parallel = true;
};

// Runs every algorithm on every manifest entry, computes per-instance gaps
// against the best objective in the executed set, and leaves rows in
// (instance, algorithm) order. Failures are recorded per row and do not
// stop the run. In iteration-budget mode wall_ms is reported as 0 so the
// CSV is a pure function of the seed.
std::vector<RunRecord> run_benchmark(const Manifest& manifest, const std::string& base_dir,
                                     const BenchmarkOptions& opts);

std::string csv_header();
std::string to_csv_row(const RunRecord& rec);
void write_csv(const std::vector<RunRecord>& records, const std::string& path);
std::vector<RunRecord> read_csv(const std::string& path);

// Mean gap per (n, omega_t, regime) group and algorithm; a pure function of
// the records.
std::string aggregate_table(const std::vector<RunRecord>& records);

// Derivation of per-run seeds from the top seed (documented, stable).
std::uint64_t benchmark_run_seed(std::uint64_t top_seed, std::size_t instance_index,
                                 std::size_t algorithm_index);

// Executes one algorithm on one instance; exposed for the solve verb.
RunRecord run_algorithm(const Instance& inst, const std::string& algorithm, std::uint64_t seed,
                        const BenchmarkOptions& opts, SolutionRecord* solution_out = nullptr);

}  // namespace ras
