#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ras/appointment.hpp"
#include "ras/simulate.hpp"

using namespace ras;

TEST_CASE("deterministic requirements simulate exactly") {
    const Instance inst = test::arc_moment_instance({2.0, 3.0}, {0.0, 0.0}, 1.0, 1.0, 1.0);
    const ExactEvaluator ev(inst);
    SimOptions opts;
    opts.replications = 1000;
    opts.seed = 1;
    const SimEstimate est =
        simulate_solution(ev, std::vector<int>{1, 2}, std::vector<double>{2.0, 3.0}, opts);
    for (int j = 0; j < 2; ++j) {
        CHECK(est.idle_mean[j] == 0.0);
        CHECK(est.wait_mean[j] == 0.0);
        CHECK(est.idle_stderr[j] == 0.0);
        CHECK(est.wait_stderr[j] == 0.0);
    }
    CHECK(est.objective_stderr == 0.0);
}

TEST_CASE("single exponential client matches the closed form within 3 sigma") {
    const Instance inst = test::arc_moment_instance({1.0}, {1.0}, 0.0, 1.0, 1.0);
    const ExactEvaluator ev(inst);
    SimOptions opts;
    opts.replications = 1000000;
    opts.seed = 99;
    const SimEstimate est =
        simulate_solution(ev, std::vector<int>{1}, std::vector<double>{1.0}, opts);
    const double truth = std::exp(-1.0);
    CHECK(std::abs(est.idle_mean[0] - truth) <= 3.0 * est.idle_stderr[0]);
    CHECK(std::abs(est.wait_mean[0] - truth) <= 3.0 * est.wait_stderr[0]);
    CHECK(est.replications == 1000000);
}

TEST_CASE("single replication is reproducible per seed") {
    const Instance inst = generate_instance(4, ScvRegime::high, 1.0, 12);
    const ExactEvaluator ev(inst);
    SimOptions opts;
    opts.replications = 1;
    opts.seed = 31;
    const std::vector<int> order = {2, 1, 4, 3};
    const std::vector<double> x = {50, 60, 55, 45};
    const SimEstimate a = simulate_solution(ev, order, x, opts);
    const SimEstimate b = simulate_solution(ev, order, x, opts);
    CHECK(a.objective_mean == b.objective_mean);
    CHECK(a.idle_mean == b.idle_mean);
    CHECK(a.wait_mean == b.wait_mean);
    opts.seed = 32;
    const SimEstimate c = simulate_solution(ev, order, x, opts);
    CHECK(a.objective_mean != c.objective_mean);
}

TEST_CASE("per-path identities hold on every sampled path") {
    const Instance inst = generate_instance(5, ScvRegime::high, 1.0, 7);
    const ExactEvaluator ev(inst);
    const std::vector<int> order = {5, 3, 1, 2, 4};
    const std::vector<double> x = {40, 45, 70, 55, 60};
    Rng rng(123);
    for (int rep = 0; rep < 2000; ++rep) {
        const SimPath path = simulate_one_path(ev, order, x, rng);
        double backlog = 0.0;
        for (int j = 0; j < 5; ++j) {
            CHECK(path.idle[j] * path.wait[j] == 0.0);
            CHECK(path.wait[j] - path.idle[j] ==
                  doctest::Approx(path.requirement[j] + backlog - x[j]).epsilon(1e-12));
            backlog = path.wait[j];
        }
    }
}

TEST_CASE("estimates are independent of the block execution order") {
    const Instance inst = generate_instance(3, ScvRegime::low, 1.0, 5);
    const ExactEvaluator ev(inst);
    const std::vector<int> order = {3, 1, 2};
    const std::vector<double> x = {55, 55, 55};
    SimOptions serial;
    serial.replications = 40000;
    serial.seed = 2;
    serial.block_size = 1024;
    serial.parallel = false;
    SimOptions parallel = serial;
    parallel.parallel = true;
    const SimEstimate a = simulate_solution(ev, order, x, serial);
    const SimEstimate b = simulate_solution(ev, order, x, parallel);
    CHECK(a.objective_mean == b.objective_mean);
    CHECK(a.objective_stderr == b.objective_stderr);
    CHECK(a.idle_mean == b.idle_mean);
    CHECK(a.wait_stderr == b.wait_stderr);
    // The block decomposition itself does not change the totals either.
    SimOptions other_blocks = serial;
    other_blocks.block_size = 512;
    const SimEstimate c = simulate_solution(ev, order, x, other_blocks);
    CHECK(std::abs(c.objective_mean - a.objective_mean) <= 1e-9 * std::abs(a.objective_mean) +
                                                               3.0 * a.objective_stderr);
}

TEST_CASE("simulation agrees with the exact evaluator on a small chain") {
    const Instance inst = generate_instance(4, ScvRegime::high, 1.0, 2025);
    const ExactEvaluator ev(inst);
    const std::vector<int> order = {4, 2, 3, 1};
    const Schedule sched = heavy_traffic_schedule(inst, order);
    const Evaluation exact = ev.evaluate(order, sched.x);
    SimOptions opts;
    opts.replications = 200000;
    opts.seed = 909;
    const SimEstimate est = simulate_solution(ev, order, sched.x, opts);
    for (int j = 0; j < 4; ++j) {
        CHECK(std::abs(est.idle_mean[j] - exact.per_client_idle[j]) <=
              4.0 * est.idle_stderr[j] + 1e-9);
        CHECK(std::abs(est.wait_mean[j] - exact.per_client_wait[j]) <=
              4.0 * est.wait_stderr[j] + 1e-9);
    }
    CHECK(std::abs(est.objective_mean - exact.objective) <= 4.0 * est.objective_stderr + 1e-9);
}
