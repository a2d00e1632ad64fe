#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "oracles.hpp"
#include "ras/appointment.hpp"
#include "ras/errors.hpp"

using namespace ras;

TEST_CASE("decayed variance examples") {
    SUBCASE("single requirement") {
        const Instance inst = test::arc_moment_instance({1.0}, {4.0}, 1.0, 1.0, 1.0);
        const std::vector<int> order = {1};
        const std::vector<double> s = decayed_variance(inst, order);
        CHECK(s[0] == doctest::Approx(4.0));
    }
    SUBCASE("hand-computed weighted average") {
        // Var U = (1, 4), beta = 0.5 -> S_2 = (0.5*1 + 4)/1.5 = 3.
        const Instance inst = test::arc_moment_instance({1.0, 2.0}, {1.0, 1.0}, 1.0, 1.0, 1.0);
        const std::vector<int> order = {1, 2};
        const std::vector<double> s = decayed_variance(inst, order);
        CHECK(s[0] == doctest::Approx(1.0));
        CHECK(s[1] == doctest::Approx(3.0));
    }
    SUBCASE("constant variances stay constant") {
        const Instance inst =
            test::arc_moment_instance({2.0, 2.0, 2.0}, {0.25, 0.25, 0.25}, 1.0, 1.0, 1.0);
        const std::vector<int> order = {2, 3, 1};
        for (double v : decayed_variance(inst, order)) CHECK(v == doctest::Approx(1.0));
    }
    SUBCASE("beta limits") {
        const Instance inst = test::arc_moment_instance({1.0, 1.0}, {1.0, 4.0}, 1.0, 1.0, 1.0);
        const std::vector<int> order = {1, 2};
        const std::vector<double> s0 = decayed_variance(inst, order, {0.0});
        CHECK(s0[1] == doctest::Approx(4.0));  // only the current variance
        const std::vector<double> s1 = decayed_variance(inst, order, {1.0});
        CHECK(s1[1] == doctest::Approx(2.5));  // arithmetic mean
    }
}

TEST_CASE("heavy-traffic schedule formula") {
    SUBCASE("zero variance gives the means") {
        const Instance inst = test::arc_moment_instance({5.0, 7.0}, {0.0, 0.0}, 1.0, 1.0, 1.0);
        const Schedule s = heavy_traffic_schedule(inst, std::vector<int>{1, 2});
        CHECK(s.x[0] == doctest::Approx(5.0));
        CHECK(s.x[1] == doctest::Approx(7.0));
    }
    SUBCASE("direct substitution") {
        // E U = 10, Var U = 4, w^W = 2, w^I = 1 -> x = 10 + sqrt(8/2) = 12.
        const Instance inst = test::arc_moment_instance({10.0}, {0.04}, 1.0, 1.0, 2.0);
        const Schedule s = heavy_traffic_schedule(inst, std::vector<int>{1});
        CHECK(s.x[0] == doctest::Approx(12.0).epsilon(1e-12));
    }
    SUBCASE("zero waiting weight gives the mean") {
        const Instance inst = test::arc_moment_instance({10.0}, {0.04}, 1.0, 1.0, 0.0);
        CHECK(heavy_traffic_schedule(inst, std::vector<int>{1}).x[0] == doctest::Approx(10.0));
    }
    SUBCASE("zero idle weight is an error") {
        const Instance inst = test::arc_moment_instance({10.0}, {0.04}, 1.0, 0.0, 2.0);
        CHECK_THROWS_AS((void)heavy_traffic_schedule(inst, std::vector<int>{1}),
                        std::domain_error);
        CHECK_THROWS_AS((void)heavy_traffic_objective(inst, std::vector<int>{1}),
                        std::domain_error);
    }
}

TEST_CASE("closed-form heavy-traffic objective: hand example") {
    // n=2, sum E T = 10, w^I = 2, w^W = 1, Var U = (0, 2), beta 0.5:
    // S = (0, 4/3); value = 10 + 2*sqrt(4/3).
    Instance inst = test::arc_moment_instance({4.0, 3.0}, {0.0, 2.0 / 9.0}, 1.0, 2.0, 1.0);
    inst.travel_mean[2][0] = 3.0;
    inst.travel_mean[1][0] = 3.0;
    const std::vector<int> order = {1, 2};
    const double value = heavy_traffic_objective(inst, order);
    CHECK(value == doctest::Approx(10.0 + 2.0 * std::sqrt(4.0 / 3.0)).epsilon(1e-12));
    // Equals the schedule-evaluated form at the optimizer.
    const Schedule s = heavy_traffic_schedule(inst, order);
    CHECK(heavy_traffic_objective_at(inst, order, s.x) == doctest::Approx(value).epsilon(1e-12));
}

TEST_CASE("heavy-traffic schedule is the argmin of the approximate objective") {
    Rng rng(61);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_int(0, 4));
        std::vector<double> means, scvs, ww;
        for (int i = 0; i < n; ++i) {
            means.push_back(rng.uniform(0.5, 10.0));
            scvs.push_back(rng.uniform(0.05, 2.0));
            ww.push_back(rng.uniform(0.1, 5.0));
        }
        const Instance inst = test::arc_moment_instance(means, scvs, rng.uniform(0.0, 2.0),
                                                        rng.uniform(0.5, 4.0), ww);
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i + 1;
        const Schedule s = heavy_traffic_schedule(inst, order);
        const double at_opt = heavy_traffic_objective_at(inst, order, s.x);
        CHECK(at_opt == doctest::Approx(heavy_traffic_objective(inst, order)).epsilon(1e-10));
        for (int j = 0; j < n; ++j) {
            for (double delta : {-1e-1, -1e-3, 1e-3, 1e-1}) {
                std::vector<double> pert = s.x;
                pert[j] = std::max(0.0, pert[j] + delta);
                CHECK(heavy_traffic_objective_at(inst, order, pert) >= at_opt - 1e-12);
            }
        }
    }
}

TEST_CASE("with no travel, increasing variance order minimizes the closed form (n<=6)") {
    Rng rng(71);
    for (int n : {4, 5, 6}) {
        std::vector<double> means(n), scvs(n);
        for (int i = 0; i < n; ++i) {
            means[i] = 1.0;
            scvs[i] = rng.uniform(0.1, 2.5) * (i + 1);  // distinct variances
        }
        const Instance inst = test::service_only_instance(means, scvs, 0.8,
                                                          std::vector<double>(n, 0.2));
        std::vector<int> increasing(n);
        for (int i = 0; i < n; ++i) increasing[i] = i + 1;
        std::sort(increasing.begin(), increasing.end(), [&](int a, int b) {
            return inst.service_scv[a] * inst.service_mean[a] * inst.service_mean[a] <
                   inst.service_scv[b] * inst.service_mean[b] * inst.service_mean[b];
        });
        double best = 1e300;
        std::vector<int> argmin;
        for (const auto& perm : test::all_permutations(n)) {
            const double v = heavy_traffic_objective(inst, perm);
            if (v < best) {
                best = v;
                argmin = perm;
            }
        }
        CHECK(argmin == increasing);
    }
}

TEST_CASE("hybrid objective: single exponential client in closed form") {
    // U ~ exp(1), w^T = 0, w^I = w^W = 1: x_ht = 1 + sqrt(1/2),
    // L_hyb = (x - 1 + exp(-x)) + exp(-x).
    const Instance inst = test::arc_moment_instance({1.0}, {1.0}, 0.0, 1.0, 1.0);
    const ExactEvaluator ev(inst);
    const std::vector<int> order = {1};
    const double x = 1.0 + std::sqrt(0.5);
    CHECK(heavy_traffic_schedule(inst, order).x[0] == doctest::Approx(x).epsilon(1e-12));
    const double expected = (x - 1.0 + std::exp(-x)) + std::exp(-x);
    CHECK(hybrid_objective(ev, order) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("optimizer: single exponential client has x* = ln 2") {
    const Instance inst = test::arc_moment_instance({1.0}, {1.0}, 0.0, 1.0, 1.0);
    const ExactEvaluator ev(inst);
    const OptimizedSchedule opt = optimize_schedule(ev, std::vector<int>{1});
    CHECK(opt.converged);
    CHECK(std::abs(opt.schedule.x[0] - std::log(2.0)) <= 1e-4);
    CHECK(opt.value == doctest::Approx(std::log(2.0)).epsilon(1e-8));
}

TEST_CASE("optimizer: deterministic requirements give x = E U and zero cost") {
    const Instance inst = test::arc_moment_instance({4.0, 2.0}, {0.0, 0.0}, 1.5, 1.0, 1.0);
    const ExactEvaluator ev(inst);
    const OptimizedSchedule opt = optimize_schedule(ev, std::vector<int>{2, 1});
    CHECK(opt.converged);
    CHECK(opt.schedule.x[0] == doctest::Approx(2.0));
    CHECK(opt.schedule.x[1] == doctest::Approx(4.0));
    CHECK(opt.value == doctest::Approx(inst.weight_travel *
                                       tour_travel_mean(inst, std::vector<int>{2, 1})));
    // Hybrid equals the optimum here.
    CHECK(hybrid_objective(ev, std::vector<int>{2, 1}) == doctest::Approx(opt.value));
}

TEST_CASE("bound chain: optimized value below hybrid and any feasible schedule") {
    Rng rng(83);
    for (int trial = 0; trial < 6; ++trial) {
        const Instance inst =
            generate_instance(4, trial % 2 ? ScvRegime::low : ScvRegime::high, 1.0, 1000 + trial);
        const ExactEvaluator ev(inst);
        const std::vector<int> order = {2, 4, 1, 3};
        const double hyb = hybrid_objective(ev, order);
        const OptimizedSchedule opt = optimize_schedule(ev, order);
        CHECK(opt.value <= hyb + 1e-9);
        TourEvaluator te(ev, order);
        for (int k = 0; k < 5; ++k) {
            std::vector<double> x(4);
            for (int j = 0; j < 4; ++j) x[j] = rng.uniform(0.0, 150.0);
            CHECK(opt.value <= te.objective(x) + 1e-9);
        }
    }
}

TEST_CASE("optimizer meets the stationarity contract") {
    const Instance inst = generate_instance(5, ScvRegime::high, 1.0, 321);
    const ExactEvaluator ev(inst);
    const std::vector<int> order = {5, 2, 1, 4, 3};
    const OptimizedSchedule opt = optimize_schedule(ev, order);
    CHECK(opt.converged);
    TourEvaluator te(ev, order);
    te.objective(opt.schedule.x);
    const std::vector<double> g = schedule_gradient(te, opt.schedule.x);
    for (int j = 0; j < 5; ++j) {
        if (opt.schedule.x[j] > 1e-12)
            CHECK(std::abs(g[j]) <= 1e-6 * (1.0 + std::abs(opt.value)));
        else
            CHECK(g[j] >= -1e-6 * (1.0 + std::abs(opt.value)));
    }
}

TEST_CASE("scaling all weights scales the objectives and keeps the schedule") {
    Instance inst = generate_instance(4, ScvRegime::low, 1.0, 77);
    Instance scaled = inst;
    const double c = 3.7;
    scaled.weight_travel *= c;
    scaled.weight_idle *= c;
    for (double& w : scaled.weight_wait) w *= c;
    const std::vector<int> order = {3, 1, 4, 2};
    const Schedule s1 = heavy_traffic_schedule(inst, order);
    const Schedule s2 = heavy_traffic_schedule(scaled, order);
    for (int j = 0; j < 4; ++j) CHECK(s1.x[j] == doctest::Approx(s2.x[j]).epsilon(1e-12));
    CHECK(heavy_traffic_objective(scaled, order) ==
          doctest::Approx(c * heavy_traffic_objective(inst, order)).epsilon(1e-12));
    const ExactEvaluator e1(inst), e2(scaled);
    CHECK(hybrid_objective(e2, order) ==
          doctest::Approx(c * hybrid_objective(e1, order)).epsilon(1e-10));
    const OptimizedSchedule o1 = optimize_schedule(e1, order);
    const OptimizedSchedule o2 = optimize_schedule(e2, order);
    CHECK(o2.value == doctest::Approx(c * o1.value).epsilon(1e-7));
}
