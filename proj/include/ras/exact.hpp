#pragma once

#include <memory>
#include <span>
#include <vector>

#include "ras/instance.hpp"
#include "ras/phasetype.hpp"
#include "ras/triangular.hpp"

namespace ras {

// Combined travel+service requirement of one tour position. Zero-variance
// inputs are kept as point masses: they cannot be represented by a
// phase-type law, and evaluation supports them only when every position on
// the tour is deterministic.
struct Requirement {
    double mean = 0.0;
    double variance = 0.0;
    bool deterministic = false;
    PhaseType law;  // meaningful when !deterministic

    static Requirement fit(double mean, double variance, const FitConfig& cfg);
};

double sample_requirement(const Requirement& req, Rng& rng);

// Objective value with its weighted breakdown. Components are the weighted
// contributions, so objective = travel + idle + wait component. Per-client
// vectors hold the unweighted expectations by visit position.
struct Evaluation {
    double objective = 0.0;
    double travel_component = 0.0;
    double idle_component = 0.0;
    double wait_component = 0.0;
    std::vector<double> per_client_idle;
    std::vector<double> per_client_wait;
};

// The recursively built phase-type representation of the sojourn variables:
// the leading dims[j] x dims[j] block of `rates` is the rate matrix of the
// chain at position j+1, and alphas[j] is its initial row vector at the
// given schedule.
struct SojournChain {
    std::vector<int> dims;
    std::vector<std::vector<double>> alphas;
    UpperTriangular rates;
};

// Shared, immutable per-instance state: the two-moment fit of every usable
// arc, computed up front so concurrent evaluations only read.
class ExactEvaluator {
  public:
    explicit ExactEvaluator(const Instance& inst, FitConfig cfg = {});

    const Instance& instance() const { return *inst_; }
    const FitConfig& fit_config() const { return cfg_; }
    // Requirement for travelling from -> to (to != 0, from != to).
    const Requirement& requirement(int from, int to) const;

    Evaluation evaluate(std::span<const int> order, std::span<const double> x) const;
    SojournChain build_chain(std::span<const int> order, std::span<const double> x) const;

  private:
    const Instance* inst_;
    FitConfig cfg_;
    std::vector<Requirement> arcs_;  // (n+1)^2, row-major by from
};

// Mutable per-tour workspace. Caches the matrix exponential of every chain
// prefix at the last evaluated schedule, which makes coordinate
// perturbations (finite-difference gradients) cost one fresh exponential
// instead of n. Not safe to share across threads; create one per worker.
class TourEvaluator {
  public:
    TourEvaluator(const ExactEvaluator& ev, std::span<const int> order);
    ~TourEvaluator();
    TourEvaluator(TourEvaluator&&) noexcept;
    TourEvaluator& operator=(TourEvaluator&&) noexcept;

    int positions() const { return n_; }
    bool deterministic() const;
    // Expected requirement per position (E U_j).
    const std::vector<double>& requirement_means() const;

    // Objective at schedule x; makes x the new cache base.
    double objective(std::span<const double> x);
    // Objective with coordinate `pos` (0-based) replaced by value, all
    // other coordinates at the current base; does not disturb the base.
    double perturbed_objective(int pos, double value) const;
    Evaluation full_evaluation(std::span<const double> x);

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int n_ = 0;
};

// One-shot conveniences; they fit the instance on every call, so the
// inner loops use ExactEvaluator/TourEvaluator instead.
Evaluation evaluate_exact(const Instance& inst, const Tour& tour, const Schedule& sched,
                          const FitConfig& cfg = {});
SojournChain build_sojourn_chain(const Instance& inst, const Tour& tour, const Schedule& sched,
                                 const FitConfig& cfg = {});

// Chain evaluation from explicitly supplied requirement laws (one per
// position); used by tests against scalar oracles and by the evaluator.
Evaluation evaluate_chain(std::span<const PhaseType> requirements, std::span<const double> x,
                          double weight_idle, std::span<const double> weight_wait, int max_dim = 1000);
SojournChain build_sojourn_chain(std::span<const PhaseType> requirements, std::span<const double> x,
                                 int max_dim = 1000);

}  // namespace ras
