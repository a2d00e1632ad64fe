// Compares the OpenMP kernels against their serial reference paths:
// Monte Carlo replication blocks and full tour enumeration, plus the raw
// evaluator throughput that dominates both.

#include <chrono>
#include <cstdio>

#include <CLI11.hpp>

#include "ras/appointment.hpp"
#include "ras/exact.hpp"
#include "ras/instance.hpp"
#include "ras/routing.hpp"
#include "ras/simulate.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP kernel comparison"};
    int n = 6;
    long reps = 1000000;
    std::uint64_t seed = 1;
    bool quick = false;
    app.add_option("--n", n, "instance size (enumeration runs n! schedule optimizations)");
    app.add_option("--reps", reps, "Monte Carlo replications");
    app.add_option("--seed", seed, "instance seed");
    app.add_flag("--quick", quick, "shrink the workload for smoke runs");
    CLI11_PARSE(app, argc, argv);
    if (quick) {
        n = 4;
        reps = 100000;
    }

#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP: both paths run serially\n");
#endif

    const ras::Instance inst = ras::generate_instance(n, ras::ScvRegime::high, 1.0, seed);
    const ras::ExactEvaluator ev(inst);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i + 1;
    const ras::Schedule sched = ras::heavy_traffic_schedule(inst, order);

    {
        ras::TourEvaluator te(ev, order);
        const auto t0 = std::chrono::steady_clock::now();
        int evals = 0;
        double sink = 0.0;
        while (seconds_since(t0) < 1.0) {
            std::vector<double> x = sched.x;
            x[evals % n] += 0.01 * (evals % 7);
            sink += te.objective(x);
            ++evals;
        }
        std::printf("exact objective evaluations: %.0f/s (n=%d)\n", evals / seconds_since(t0), n);
        (void)sink;
    }

    for (bool parallel : {false, true}) {
        ras::SimOptions opts;
        opts.replications = reps;
        opts.seed = 7;
        opts.parallel = parallel;
        const auto t0 = std::chrono::steady_clock::now();
        const ras::SimEstimate est = ras::simulate_solution(ev, order, sched.x, opts);
        std::printf("simulate %-8s %ld reps: %.3fs (objective %.4f +/- %.4f)\n",
                    parallel ? "parallel" : "serial", reps, seconds_since(t0), est.objective_mean,
                    est.objective_stderr);
    }

    for (bool parallel : {false, true}) {
        ras::EnumerateOptions opts;
        opts.parallel = parallel;
        const auto t0 = std::chrono::steady_clock::now();
        const ras::EnumerationResult res = ras::enumerate_optimal(ev, opts);
        std::printf("enumerate %-8s %ld tours: %.3fs (best %.4f)\n",
                    parallel ? "parallel" : "serial", res.tours_scored, seconds_since(t0),
                    res.value);
    }
    return 0;
}
