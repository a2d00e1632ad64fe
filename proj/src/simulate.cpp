#include "ras/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ras/errors.hpp"

namespace ras {

namespace {

struct BlockSums {
    long count = 0;
    double obj = 0.0, obj_sq = 0.0;
    std::vector<double> idle, idle_sq, wait, wait_sq;
};

}  // namespace

SimPath simulate_one_path(const ExactEvaluator& ev, std::span<const int> order,
                          std::span<const double> x, Rng& rng) {
    const int n = static_cast<int>(order.size());
    SimPath path;
    path.requirement.resize(n);
    path.idle.resize(n);
    path.wait.resize(n);
    int prev = 0;
    double backlog = 0.0;  // W_{j-1}
    for (int i = 0; i < n; ++i) {
        const double u = sample_requirement(ev.requirement(prev, order[i]), rng);
        const double slack = x[i] - u - backlog;
        path.requirement[i] = u;
        path.idle[i] = std::max(slack, 0.0);
        path.wait[i] = std::max(-slack, 0.0);
        backlog = path.wait[i];
        prev = order[i];
    }
    return path;
}

SimEstimate simulate_solution(const ExactEvaluator& ev, std::span<const int> order,
                              std::span<const double> x, const SimOptions& opts) {
    if (opts.replications < 1)
        throw std::invalid_argument("simulate_solution: needs at least one replication");
    if (x.size() != order.size())
        throw std::invalid_argument("simulate_solution: schedule length mismatch");
    const int n = static_cast<int>(order.size());
    const Instance& inst = ev.instance();
    const long block = std::max<long>(1, opts.block_size);
    const long num_blocks = (opts.replications + block - 1) / block;

    std::vector<double> pos_weight(n);
    for (int i = 0; i < n; ++i) pos_weight[i] = inst.weight_wait[order[i]];
    const double travel_cost = inst.weight_travel * tour_travel_mean(inst, order);

    std::vector<BlockSums> sums(num_blocks);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (opts.parallel)
#endif
    for (long b = 0; b < num_blocks; ++b) {
        BlockSums& s = sums[b];
        s.idle.assign(n, 0.0);
        s.idle_sq.assign(n, 0.0);
        s.wait.assign(n, 0.0);
        s.wait_sq.assign(n, 0.0);
        Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(b)));
        const long reps = std::min(block, opts.replications - b * block);
        s.count = reps;
        for (long r = 0; r < reps; ++r) {
            int prev = 0;
            double backlog = 0.0;
            double appointment_cost = 0.0;
            for (int i = 0; i < n; ++i) {
                const double u = sample_requirement(ev.requirement(prev, order[i]), rng);
                const double slack = x[i] - u - backlog;
                const double idle = std::max(slack, 0.0);
                const double wait = std::max(-slack, 0.0);
                s.idle[i] += idle;
                s.idle_sq[i] += idle * idle;
                s.wait[i] += wait;
                s.wait_sq[i] += wait * wait;
                appointment_cost += inst.weight_idle * idle + pos_weight[i] * wait;
                backlog = wait;
                prev = order[i];
            }
            s.obj += appointment_cost;
            s.obj_sq += appointment_cost * appointment_cost;
        }
    }

    // Merge in block order: the totals are independent of thread count.
    BlockSums total;
    total.idle.assign(n, 0.0);
    total.idle_sq.assign(n, 0.0);
    total.wait.assign(n, 0.0);
    total.wait_sq.assign(n, 0.0);
    for (const BlockSums& s : sums) {
        total.count += s.count;
        total.obj += s.obj;
        total.obj_sq += s.obj_sq;
        for (int i = 0; i < n; ++i) {
            total.idle[i] += s.idle[i];
            total.idle_sq[i] += s.idle_sq[i];
            total.wait[i] += s.wait[i];
            total.wait_sq[i] += s.wait_sq[i];
        }
    }

    const double reps = static_cast<double>(total.count);
    const auto stderr_of = [reps](double sum, double sum_sq) {
        if (reps < 2) return 0.0;
        const double mean = sum / reps;
        const double var = std::max(0.0, (sum_sq - reps * mean * mean) / (reps - 1.0));
        return std::sqrt(var / reps);
    };

    SimEstimate est;
    est.replications = total.count;
    est.seed = opts.seed;
    est.objective_mean = travel_cost + total.obj / reps;
    est.objective_stderr = stderr_of(total.obj, total.obj_sq);
    est.idle_mean.resize(n);
    est.idle_stderr.resize(n);
    est.wait_mean.resize(n);
    est.wait_stderr.resize(n);
    for (int i = 0; i < n; ++i) {
        est.idle_mean[i] = total.idle[i] / reps;
        est.idle_stderr[i] = stderr_of(total.idle[i], total.idle_sq[i]);
        est.wait_mean[i] = total.wait[i] / reps;
        est.wait_stderr[i] = stderr_of(total.wait[i], total.wait_sq[i]);
    }
    return est;
}

SimEstimate simulate_solution(const Instance& inst, const Tour& tour, const Schedule& sched,
                              long replications, std::uint64_t seed, const FitConfig& fit) {
    ExactEvaluator ev(inst, fit);
    SimOptions opts;
    opts.replications = replications;
    opts.seed = seed;
    return simulate_solution(ev, tour.order(), sched.x, opts);
}

}  // namespace ras
