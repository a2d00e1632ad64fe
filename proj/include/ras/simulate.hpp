#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ras/exact.hpp"
#include "ras/instance.hpp"
#include "ras/rng.hpp"

namespace ras {

struct SimEstimate {
    double objective_mean = 0.0;
    double objective_stderr = 0.0;
    std::vector<double> idle_mean, idle_stderr;  // per visit position
    std::vector<double> wait_mean, wait_stderr;
    long replications = 0;
    std::uint64_t seed = 0;
};

struct SimOptions {
    long replications = 1000000;
    std::uint64_t seed = 0;
    // Replications are sharded into fixed blocks with per-block derived
    // seeds and merged in block order, so the estimate does not depend on
    // the number of worker threads.
    long block_size = 16384;
    bool parallel = true;
};

// Samples every requirement from the same fitted law the exact evaluator
// uses and runs the idle/waiting recursion; the evaluation path is fully
// independent of the matrix machinery it cross-checks.
SimEstimate simulate_solution(const ExactEvaluator& ev, std::span<const int> order,
                              std::span<const double> x, const SimOptions& opts);
SimEstimate simulate_solution(const Instance& inst, const Tour& tour, const Schedule& sched,
                              long replications, std::uint64_t seed, const FitConfig& fit = {});

struct SimPath {
    std::vector<double> requirement;  // drawn U_j per position
    std::vector<double> idle;
    std::vector<double> wait;
};

// One replication with the caller's stream; used to assert per-path
// identities in tests.
SimPath simulate_one_path(const ExactEvaluator& ev, std::span<const int> order,
                          std::span<const double> x, Rng& rng);

}  // namespace ras
