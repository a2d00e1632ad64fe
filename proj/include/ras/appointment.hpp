#pragma once

#include <span>
#include <vector>

#include "ras/exact.hpp"
#include "ras/instance.hpp"

namespace ras {

struct HeavyTrafficConfig {
    double beta = 0.5;  // exponential decay of upstream variance influence
};

// S_j: beta-weighted average of the requirement variances along the tour
// prefix (the most recent client weighs most). beta=0 keeps only the
// current variance, beta=1 is the arithmetic mean.
std::vector<double> decayed_variance(const Instance& inst, std::span<const int> order,
                                     const HeavyTrafficConfig& cfg = {});

// x_j = E U_j + sqrt(w^W_j S_j / (2 w^I)). Requires weight_idle > 0; the
// trade-off divides by it and degenerates otherwise.
Schedule heavy_traffic_schedule(const Instance& inst, std::span<const int> order,
                                const HeavyTrafficConfig& cfg = {});

// Closed-form minimum of the heavy-traffic objective over schedules.
double heavy_traffic_objective(const Instance& inst, std::span<const int> order,
                               const HeavyTrafficConfig& cfg = {});

// Heavy-traffic objective at a given schedule. The approximation is only
// defined for x_j >= E U_j; below that the value is +infinity, and at
// equality the waiting term is 0 when w^W_j S_j = 0 and +infinity otherwise.
double heavy_traffic_objective_at(const Instance& inst, std::span<const int> order,
                                  std::span<const double> x, const HeavyTrafficConfig& cfg = {});

// Exact objective evaluated at the heavy-traffic schedule.
double hybrid_objective(const ExactEvaluator& ev, std::span<const int> order,
                        const HeavyTrafficConfig& cfg = {});
double hybrid_objective(const Instance& inst, const Tour& tour, const HeavyTrafficConfig& cfg = {},
                        const FitConfig& fit = {});

struct OptimizerOptions {
    int max_iterations = 500;
    double tolerance = 1e-6;  // on the projected gradient, relative to 1+|L|
};

struct OptimizedSchedule {
    Schedule schedule;
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Minimizes the exact objective over nonnegative schedules by projected
// quasi-Newton descent with central-difference gradients, started from the
// heavy-traffic schedule.
OptimizedSchedule optimize_schedule(const ExactEvaluator& ev, std::span<const int> order,
                                    const HeavyTrafficConfig& cfg = {},
                                    const OptimizerOptions& opts = {});
OptimizedSchedule optimize_schedule(const Instance& inst, const Tour& tour,
                                    const HeavyTrafficConfig& cfg = {}, const FitConfig& fit = {},
                                    const OptimizerOptions& opts = {});

// Central-difference gradient of the exact objective at x (one-sided where
// the bound x_j >= 0 interferes); step 1e-5 * (1 + x_j).
std::vector<double> schedule_gradient(TourEvaluator& te, std::span<const double> x);

}  // namespace ras
