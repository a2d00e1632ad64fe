#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ras/appointment.hpp"
#include "ras/exact.hpp"
#include "ras/instance.hpp"
#include "ras/rng.hpp"

namespace ras {

enum class AcceptVariant {
    paper,      // threshold grows: H = H0 * t/t_max
    decreasing  // threshold shrinks: H = H0 * (1 - t/t_max)
};

std::string to_string(AcceptVariant v);
AcceptVariant accept_variant_from_string(const std::string& s);

struct LnsParams {
    int max_removed = 6;            // D: destroy size drawn uniformly from 1..D
    double accept_fraction = 0.05;  // H_init: H0 = H_init * initial objective
    std::uint64_t seed = 0;
    long iterations = 2000;     // iteration budget (deterministic mode)
    double time_limit_s = 0.0;  // > 0 switches to wall-clock mode
    AcceptVariant accept_variant = AcceptVariant::paper;
    // Selection weights for the destroy operators {random, adjacent}.
    double operator_weights[2] = {1.0, 1.0};
    bool record_trace = true;
    HeavyTrafficConfig ht;
    OptimizerOptions optimizer;
};

enum class ObjectiveKind { hybrid, exact_optimized };

std::string to_string(ObjectiveKind k);

struct Solution {
    Tour tour;
    Schedule schedule;
    double objective = 0.0;
    ObjectiveKind objective_kind = ObjectiveKind::exact_optimized;
    long iterations = 0;
    bool schedule_converged = true;
    // (elapsed, best objective) pairs; elapsed is the iteration count in
    // iteration-budget mode and seconds in wall-clock mode.
    std::vector<std::pair<double, double>> trace;
    // Objective of the accepted (current) solution after each acceptance.
    std::vector<std::pair<double, double>> current_trace;
    bool aborted = false;
    std::string abort_reason;
};

struct DestroyResult {
    std::vector<int> partial;  // survivors in original relative order
    std::vector<int> removed;  // removal order
};

// Removes k clients chosen uniformly without replacement.
DestroyResult destroy_random(std::span<const int> order, int k, Rng& rng);

// Removes a uniformly positioned window of k consecutive clients.
DestroyResult destroy_adjacent(std::span<const int> order, int k, Rng& rng);

// Re-inserts the removed clients one by one (in removal order), each at the
// position that increases the hybrid objective least; ties go to the
// earliest position.
std::vector<int> repair_greedy(std::vector<int> partial, std::span<const int> removed,
                               const ExactEvaluator& ev, const HeavyTrafficConfig& cfg = {});

// Record-to-record acceptance: candidate passes when its objective is less
// than best + H(t). h0 is the absolute starting threshold.
bool accept_rrt(double candidate_obj, double best_obj, double elapsed, double budget, double h0,
                AcceptVariant variant);

// Seeded draw order (part of the determinism contract): the initial tour is
// a Fisher-Yates shuffle of (1..n) consuming uniform_int(0, i) for
// i = n-1..1; each iteration then draws the operator selector, the destroy
// size k, and the operator's own randomness, in that order.
Solution lns_solve(const ExactEvaluator& ev, const LnsParams& params);
Solution lns_solve(const Instance& inst, const LnsParams& params, const FitConfig& fit = {});

}  // namespace ras
