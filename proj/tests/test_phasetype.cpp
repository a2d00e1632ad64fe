#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ras/errors.hpp"
#include "ras/phasetype.hpp"

using namespace ras;

TEST_CASE("fit at scv=1 collapses to the exponential") {
    const PhaseType pt = fit_phase_type({1.0, 1.0});
    CHECK(pt.kind() == PhaseType::Kind::erlang_mixture);
    CHECK(pt.erlang_order() == 2);
    CHECK(pt.mix_p() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pt.rate1() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pt.dim() == 2);
    CHECK(pt.alpha()[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(pt.alpha()[1] == doctest::Approx(1.0).epsilon(1e-12));
    const MomentPair m = moments(pt);
    CHECK(m.mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.scv == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fit at scv=0.5 is the pure Erlang-2 with rate 2") {
    const PhaseType pt = fit_phase_type({1.0, 0.5});
    CHECK(pt.erlang_order() == 3);
    CHECK(pt.mix_p() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pt.rate1() == doctest::Approx(2.0).epsilon(1e-12));
    const MomentPair m = moments(pt);
    CHECK(m.mean == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.scv == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("fit at scv=3 is the balanced-means hyperexponential") {
    const PhaseType pt = fit_phase_type({1.0, 3.0});
    CHECK(pt.kind() == PhaseType::Kind::hyperexponential);
    CHECK(pt.mix_p() == doctest::Approx(0.8535533906).epsilon(1e-9));
    CHECK(pt.rate1() == doctest::Approx(1.7071067812).epsilon(1e-9));
    CHECK(pt.rate2() == doctest::Approx(0.2928932188).epsilon(1e-9));
    // Cross-check the first two moments through explicit mixture integrals.
    const double p = pt.mix_p();
    const double mean = p / pt.rate1() + (1 - p) / pt.rate2();
    const double second = 2 * p / (pt.rate1() * pt.rate1()) + 2 * (1 - p) / (pt.rate2() * pt.rate2());
    CHECK(mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((second - mean * mean) / (mean * mean) == doctest::Approx(3.0).epsilon(1e-12));
    const MomentPair m = moments(pt);
    CHECK(m.mean == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.scv == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("fit rejects bad inputs") {
    CHECK_THROWS_AS((void)fit_phase_type({-1.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS((void)fit_phase_type({0.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_WITH_AS((void)fit_phase_type({1.0, 1e-5}), doctest::Contains("below floor"),
                         FitError);
    FitConfig tight;
    tight.max_dim = 10;
    CHECK_THROWS_WITH_AS((void)fit_phase_type({1.0, 0.05}, tight), doctest::Contains("21"),
                         FitError);
}

TEST_CASE("fit round-trips moments for random pairs") {
    Rng rng(12345);
    for (int i = 0; i < 500; ++i) {
        MomentPair in;
        in.mean = rng.uniform(0.5, 60.0);
        in.scv = rng.uniform(0.05, 3.0);
        const PhaseType pt = fit_phase_type(in);
        const MomentPair out = moments(pt);
        CHECK(std::abs(out.mean - in.mean) <= 1e-9 * in.mean);
        CHECK(std::abs(out.scv - in.scv) <= 1e-9 * in.scv);
    }
}

TEST_CASE("balanced-means scv identity 1/(2p(1-p)) - 1") {
    Rng rng(99);
    for (int i = 0; i < 100; ++i) {
        const double scv = rng.uniform(1.0001, 5.0);
        const PhaseType pt = fit_phase_type({2.0, scv});
        const double p = pt.mix_p();
        CHECK(1.0 / (2.0 * p * (1.0 - p)) - 1.0 == doctest::Approx(scv).epsilon(1e-12));
    }
}

TEST_CASE("cdf examples") {
    const PhaseType exp1 = PhaseType::exponential(1.0);
    CHECK(cdf(exp1, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cdf(exp1, 0.0) == doctest::Approx(0.0).epsilon(1e-14));
    const PhaseType erl = PhaseType::erlang(2, 2.0);
    CHECK(cdf(erl, 0.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(cdf(erl, 1.0) == doctest::Approx(1.0 - 3.0 * std::exp(-2.0)).epsilon(1e-12));
    CHECK_THROWS_AS((void)cdf(exp1, -0.1), std::invalid_argument);
}

TEST_CASE("cdf is nondecreasing") {
    const PhaseType pt = fit_phase_type({2.0, 0.7});
    double prev = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double f = cdf(pt, 0.1 * i);
        CHECK(f >= prev - 1e-14);
        prev = f;
    }
}

TEST_CASE("quantile examples and inverse property") {
    const PhaseType exp1 = PhaseType::exponential(1.0);
    CHECK(quantile(exp1, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-8));
    const PhaseType exp3 = PhaseType::exponential(3.0);
    for (double q : {0.1, 0.25, 0.5, 0.9, 0.99})
        CHECK(quantile(exp3, q) == doctest::Approx(-std::log(1.0 - q) / 3.0).epsilon(1e-7));
    const PhaseType erl = PhaseType::erlang(2, 2.0);
    CHECK(quantile(erl, 1.0 - 3.0 * std::exp(-2.0)) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS_AS((void)quantile(exp1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)quantile(exp1, 1.0), std::invalid_argument);
}

TEST_CASE("quantile of cdf is the identity on interior points") {
    Rng rng(4242);
    for (int i = 0; i < 10; ++i) {
        const MomentPair in = {rng.uniform(0.5, 5.0), rng.uniform(0.1, 2.5)};
        const PhaseType pt = fit_phase_type(in);
        for (double frac : {0.3, 0.7, 1.0, 1.6}) {
            const double x = frac * in.mean;
            const double q = cdf(pt, x);
            if (q < 1e-6 || q > 1.0 - 1e-6) continue;
            CHECK(std::abs(quantile(pt, q) - x) <= 1e-8 * std::max(1.0, x) * 10.0);
            CHECK(std::abs(cdf(pt, quantile(pt, q)) - q) <= 1e-10);
        }
    }
}

TEST_CASE("expected excess examples") {
    const PhaseType exp1 = PhaseType::exponential(1.0);
    CHECK(expected_excess(exp1, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(expected_excess(exp1, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    const PhaseType h2 = PhaseType::hyperexponential(0.853553390593274, 1.70710678118655,
                                                     0.292893218813452);
    const double x = 2.0;
    const double closed = 0.853553390593274 / 1.70710678118655 * std::exp(-1.70710678118655 * x) +
                          (1.0 - 0.853553390593274) / 0.292893218813452 *
                              std::exp(-0.292893218813452 * x);
    CHECK(std::abs(expected_excess(h2, x) - closed) <= 1e-10);
    CHECK(expected_excess_closed_form(h2, x) == doctest::Approx(closed).epsilon(1e-14));
}

TEST_CASE("matrix-form excess equals the closed forms on a grid of random fits") {
    Rng rng(2024);
    for (int i = 0; i < 25; ++i) {
        const MomentPair in = {rng.uniform(0.5, 5.0), rng.uniform(0.05, 3.0)};
        const PhaseType pt = fit_phase_type(in);
        for (int g = 0; g <= 20; ++g) {
            const double x = in.mean * (0.2 * g);
            const double matrix_form = expected_excess(pt, x);
            const double closed_form = expected_excess_closed_form(pt, x);
            CHECK(std::abs(matrix_form - closed_form) <= 1e-10);
        }
    }
}

TEST_CASE("excess is nonincreasing convex and anchored at the mean") {
    const PhaseType pt = fit_phase_type({2.0, 0.4});
    double prev = expected_excess(pt, 0.0);
    CHECK(prev == doctest::Approx(2.0).epsilon(1e-10));
    double prev_slope = -1e300;
    for (int i = 1; i <= 40; ++i) {
        const double cur = expected_excess(pt, 0.25 * i);
        CHECK(cur <= prev + 1e-12);
        const double slope = cur - prev;
        CHECK(slope >= prev_slope - 1e-10);  // convexity: slopes nondecreasing
        prev_slope = slope;
        prev = cur;
    }
    CHECK(expected_excess(pt, 50.0) <= 1e-8);
}

TEST_CASE("excess minus deficit equals mean minus x") {
    Rng rng(31);
    for (int i = 0; i < 5; ++i) {
        const MomentPair in = {rng.uniform(0.5, 3.0), rng.uniform(0.2, 2.0)};
        const PhaseType pt = fit_phase_type(in);
        for (double x : {0.3, 1.0, 2.7}) {
            const double excess = expected_excess(pt, x);
            // Independent deficit: E(x-X)^+ = int_0^x F(t) dt by quadrature.
            const double deficit =
                test::simpson([&](double t) { return cdf(pt, t); }, 0.0, x, 200);
            CHECK(excess - deficit == doctest::Approx(in.mean - x).epsilon(1e-6));
        }
    }
}

TEST_CASE("sampling matches moments and is reproducible") {
    const long reps = 1000000;
    {
        Rng rng(555);
        const PhaseType exp1 = PhaseType::exponential(1.0);
        double sum = 0.0;
        for (long i = 0; i < reps; ++i) sum += sample(exp1, rng);
        const double mean = sum / reps;
        CHECK(mean >= 0.997);
        CHECK(mean <= 1.003);
    }
    {
        Rng rng(556);
        const PhaseType erl = PhaseType::erlang(2, 2.0);
        double sum = 0.0, sq = 0.0;
        for (long i = 0; i < reps; ++i) {
            const double v = sample(erl, rng);
            sum += v;
            sq += v * v;
        }
        const double mean = sum / reps;
        const double scv = (sq / reps - mean * mean) / (mean * mean);
        CHECK(std::abs(scv - 0.5) <= 0.01);
    }
    {
        Rng a(77), b(77);
        const PhaseType pt = fit_phase_type({1.0, 2.0});
        for (int i = 0; i < 100; ++i) CHECK(sample(pt, a) == sample(pt, b));
    }
}

TEST_CASE("general-representation sampling walks the chain correctly") {
    // Erlang-2 built as a general representation (no mixture metadata).
    UpperTriangular v(2);
    v.set(0, 0, -2.0);
    v.set(0, 1, 2.0);
    v.set(1, 1, -2.0);
    const PhaseType pt = PhaseType::general({1.0, 0.0}, v);
    CHECK(pt.kind() == PhaseType::Kind::general);
    Rng rng(31337);
    const long reps = 200000;
    double sum = 0.0;
    for (long i = 0; i < reps; ++i) sum += sample(pt, rng);
    CHECK(std::abs(sum / reps - 1.0) <= 3.0 * std::sqrt(0.5) / std::sqrt(double(reps)));
}

TEST_CASE("phase-type validation rejects malformed triples") {
    UpperTriangular good(1);
    good.set(0, 0, -1.0);
    CHECK_THROWS_AS((void)PhaseType::general({0.5}, good), std::invalid_argument);  // mass != 1
    UpperTriangular bad_diag(1);
    bad_diag.set(0, 0, 1.0);
    CHECK_THROWS_AS((void)PhaseType::general({1.0}, bad_diag), std::invalid_argument);
    UpperTriangular no_exit(2);
    no_exit.set(0, 0, -1.0);
    no_exit.set(0, 1, 1.0);
    no_exit.set(1, 1, -1.0);
    (void)PhaseType::general({1.0, 0.0}, no_exit);  // exit via second state: fine
    UpperTriangular conserving(1);
    conserving.set(0, 0, -0.0);
    CHECK_THROWS_AS((void)PhaseType::general({1.0}, conserving), std::invalid_argument);
}
