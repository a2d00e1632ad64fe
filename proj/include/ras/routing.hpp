#pragma once

#include <span>
#include <vector>

#include "ras/appointment.hpp"
#include "ras/exact.hpp"
#include "ras/instance.hpp"

namespace ras {

// Minimum-cost closed tour on an (n+1)x(n+1) cost matrix (row 0 = depot).
// Exact Held-Karp dynamic program for n <= 12, nearest-neighbour plus
// 2-opt/Or-opt local search beyond that. Handles asymmetric costs; set
// `symmetric` to false to suppress the 2-opt segment reversals, which are
// only cost-preserving moves for symmetric matrices.
std::vector<int> min_cost_tour(const std::vector<std::vector<double>>& cost, bool symmetric);

double tour_cost(const std::vector<std::vector<double>>& cost, std::span<const int> order);

// Deterministic TSP on mean travel times; of the tour and its reversal,
// returns the orientation with the smaller hybrid objective.
Tour solve_tsp(const ExactEvaluator& ev, const HeavyTrafficConfig& cfg = {});

// Greedy chain: from the current location, next is the unvisited client
// with the lowest variance of combined travel and service time. Ties break
// toward the smallest client index.
Tour msvf_tour(const Instance& inst);

// Modified TSP: arc costs are mean travel plus the newsvendor appointment
// cost at the critical fractile, scaled by 1/weight_travel; asymmetric TSP
// on the modified matrix. Requires weight_travel > 0.
Tour mtsp_tour(const ExactEvaluator& ev);
std::vector<std::vector<double>> mtsp_modified_costs(const ExactEvaluator& ev);

enum class EnumerationMode { exact, heavy_traffic_prefilter };

struct EnumerateOptions {
    EnumerationMode mode = EnumerationMode::exact;
    int max_exact_n = 9;
    int max_prefilter_n = 10;
    // Fraction of tours re-evaluated with the optimal schedule in prefilter
    // mode; <= 0 selects the default 1/(n(n-1)).
    double prefilter_fraction = -1.0;
    bool parallel = true;
    HeavyTrafficConfig ht;
    OptimizerOptions optimizer;
};

struct EnumerationResult {
    Tour tour;
    Schedule schedule;
    double value = 0.0;
    long tours_scored = 0;     // tours whose schedule was optimized
    long tours_considered = 0; // all permutations
};

// Argmin over all n! tours of the schedule-optimized exact objective
// (exact mode), or heavy-traffic ranking of all tours with the top
// fraction re-optimized (prefilter mode). Deterministic: ties in value
// break toward the lexicographically smallest tour, independent of the
// number of worker threads.
EnumerationResult enumerate_optimal(const ExactEvaluator& ev, const EnumerateOptions& opts = {});

}  // namespace ras
