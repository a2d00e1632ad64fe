#include "ras/phasetype.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ras/errors.hpp"

namespace ras {

void PhaseType::validate() const {
    if (dim_ <= 0) throw std::invalid_argument("PhaseType: dimension must be positive");
    double sum = 0.0;
    for (double a : alpha_) {
        if (a < 0.0) throw std::invalid_argument("PhaseType: negative initial probability");
        sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("PhaseType: initial distribution does not sum to 1");
    double max_exit = 0.0;
    for (int i = 0; i < dim_; ++i) {
        if (!(rates_(i, i) < 0.0))
            throw std::invalid_argument("PhaseType: diagonal rates must be strictly negative");
        double row_sum = 0.0;
        for (int j = i; j < dim_; ++j) {
            if (j > i && rates_(i, j) < 0.0)
                throw std::invalid_argument("PhaseType: negative off-diagonal rate");
            row_sum += rates_(i, j);
        }
        if (row_sum > 1e-12) throw std::invalid_argument("PhaseType: positive row sum");
        max_exit = std::max(max_exit, -row_sum);
    }
    if (max_exit <= 0.0) throw std::invalid_argument("PhaseType: exit vector is identically zero");
}

PhaseType PhaseType::exponential(double rate) { return erlang(1, rate); }

PhaseType PhaseType::erlang(int k, double rate) {
    if (k < 1) throw std::invalid_argument("erlang: order must be at least 1");
    PhaseType pt;
    pt.dim_ = k;
    pt.alpha_.assign(k, 0.0);
    pt.alpha_[0] = 1.0;
    pt.rates_ = UpperTriangular(k);
    for (int i = 0; i < k; ++i) {
        pt.rates_.set(i, i, -rate);
        if (i + 1 < k) pt.rates_.set(i, i + 1, rate);
    }
    // A pure k-phase Erlang is the mixture E_{k+1}(rate, 1); the metadata
    // drives the closed forms and sampling regardless of the matrix layout.
    pt.kind_ = Kind::erlang_mixture;
    pt.order_ = k + 1;
    pt.p_ = 1.0;
    pt.mu1_ = rate;
    pt.validate();
    return pt;
}

PhaseType PhaseType::erlang_mixture(int order, double mu, double p) {
    if (order < 2) throw std::invalid_argument("erlang_mixture: order must be at least 2");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("erlang_mixture: p outside [0,1]");
    PhaseType pt;
    pt.dim_ = order;
    pt.alpha_.assign(order, 0.0);
    pt.alpha_[0] = 1.0 - p;  // start in phase 1: order phases until absorption
    pt.alpha_[1] = p;        // start in phase 2: order-1 phases
    pt.rates_ = UpperTriangular(order);
    for (int i = 0; i < order; ++i) {
        pt.rates_.set(i, i, -mu);
        if (i + 1 < order) pt.rates_.set(i, i + 1, mu);
    }
    pt.kind_ = Kind::erlang_mixture;
    pt.order_ = order;
    pt.p_ = p;
    pt.mu1_ = mu;
    pt.validate();
    return pt;
}

PhaseType PhaseType::hyperexponential(double p, double mu1, double mu2) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("hyperexponential: p outside [0,1]");
    PhaseType pt;
    pt.dim_ = 2;
    pt.alpha_ = {p, 1.0 - p};
    pt.rates_ = UpperTriangular(2);
    pt.rates_.set(0, 0, -mu1);
    pt.rates_.set(1, 1, -mu2);
    pt.kind_ = Kind::hyperexponential;
    pt.p_ = p;
    pt.mu1_ = mu1;
    pt.mu2_ = mu2;
    pt.validate();
    return pt;
}

PhaseType PhaseType::general(std::vector<double> alpha, UpperTriangular rates) {
    PhaseType pt;
    pt.dim_ = rates.dim();
    pt.alpha_ = std::move(alpha);
    if (static_cast<int>(pt.alpha_.size()) != pt.dim_)
        throw std::invalid_argument("PhaseType: alpha/rates dimension mismatch");
    pt.rates_ = std::move(rates);
    pt.kind_ = Kind::general;
    pt.validate();
    return pt;
}

namespace {

// Unique K with scv in (1/K, 1/(K-1)].
int erlang_order_for(double scv) {
    int k = static_cast<int>(std::floor(1.0 / scv)) + 1;
    if (k < 2) k = 2;
    while (scv <= 1.0 / k) ++k;
    while (k > 2 && scv > 1.0 / (k - 1)) --k;
    return k;
}

}  // namespace

PhaseType fit_phase_type(MomentPair m, const FitConfig& cfg) {
    if (!(m.mean > 0.0)) throw std::invalid_argument("fit_phase_type: mean must be positive");
    if (m.scv < cfg.scv_min) {
        if (cfg.clamp_scv) {
            m.scv = cfg.scv_min;
        } else {
            const double k_approx = std::floor(1.0 / std::max(m.scv, 1e-300)) + 1.0;
            throw FitError("fit_phase_type: scv " + std::to_string(m.scv) + " below floor " +
                           std::to_string(cfg.scv_min) + " (required Erlang order ~" +
                           std::to_string(k_approx) + ")");
        }
    }
    if (m.scv > 1.0) {
        const double p = 0.5 * (1.0 + std::sqrt((m.scv - 1.0) / (m.scv + 1.0)));
        return PhaseType::hyperexponential(p, 2.0 * p / m.mean, 2.0 * (1.0 - p) / m.mean);
    }
    const int k = erlang_order_for(m.scv);
    if (k > cfg.max_dim)
        throw FitError("fit_phase_type: required Erlang order " + std::to_string(k) +
                       " exceeds dimension cap " + std::to_string(cfg.max_dim));
    const double radicand = std::max(0.0, (1.0 + m.scv) * k - m.scv * k * static_cast<double>(k));
    double p = (m.scv * k - std::sqrt(radicand)) / (1.0 + m.scv);
    p = std::clamp(p, 0.0, 1.0);
    const double mu = (k - p) / m.mean;
    return PhaseType::erlang_mixture(k, mu, p);
}

MomentPair moments(const PhaseType& pt) {
    const std::vector<double> ones(pt.dim(), 1.0);
    const std::vector<double> y = tri_solve(pt.rates(), ones);   // V^{-1} 1
    const std::vector<double> z = tri_solve(pt.rates(), y);      // V^{-2} 1
    double mean = 0.0, second = 0.0;
    for (int i = 0; i < pt.dim(); ++i) {
        mean -= pt.alpha()[i] * y[i];
        second += 2.0 * pt.alpha()[i] * z[i];
    }
    const double var = second - mean * mean;
    return {mean, var / (mean * mean)};
}

double cdf(const PhaseType& pt, double x) {
    if (x < 0.0) throw std::invalid_argument("cdf: x must be nonnegative");
    UpperTriangular vx(pt.dim());
    for (int i = 0; i < pt.dim(); ++i)
        for (int j = i; j < pt.dim(); ++j) vx.set(i, j, pt.rates()(i, j) * x);
    const UpperTriangular e = matrix_exponential(vx);
    const std::vector<double> row = row_times(pt.alpha(), e);
    const double tail = std::accumulate(row.begin(), row.end(), 0.0);
    return std::clamp(1.0 - tail, 0.0, 1.0);
}

double quantile(const PhaseType& pt, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile: q outside (0,1)");
    const MomentPair mp = moments(pt);
    double hi = mp.mean * (1.0 + 40.0 * std::sqrt(mp.scv));
    int guard = 0;
    while (cdf(pt, hi) < q) {
        hi *= 2.0;
        if (++guard > 200) throw EvalError("quantile: bracket expansion failed");
    }
    double lo = 0.0;
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f = cdf(pt, mid);
        if (std::abs(f - q) <= 1e-10) return mid;
        (f < q ? lo : hi) = mid;
    }
    throw EvalError("quantile: bisection did not reach tolerance");
}

double expected_excess(const PhaseType& pt, double x) {
    if (x < 0.0) throw std::invalid_argument("expected_excess: x must be nonnegative");
    UpperTriangular vx(pt.dim());
    for (int i = 0; i < pt.dim(); ++i)
        for (int j = i; j < pt.dim(); ++j) vx.set(i, j, pt.rates()(i, j) * x);
    const UpperTriangular e = matrix_exponential(vx);
    std::vector<double> u(pt.dim(), 0.0);  // e^{Vx} 1 = row sums
    for (int i = 0; i < pt.dim(); ++i) {
        const double* r = e.row(i);
        for (int j = i; j < pt.dim(); ++j) u[i] += r[j];
    }
    const std::vector<double> w = tri_solve(pt.rates(), u);
    double v = 0.0;
    for (int i = 0; i < pt.dim(); ++i) v -= pt.alpha()[i] * w[i];
    return std::max(0.0, v);
}

namespace {

// Regularized upper incomplete gamma Q(m, t) = Gamma(m, t)/(m-1)! for
// integer m >= 1, as the finite sum e^{-t} sum_{i<m} t^i/i!.
double regularized_gamma_q(int m, double t) {
    if (t == 0.0) return 1.0;
    double term = std::exp(-t);
    double sum = term;
    for (int i = 1; i < m; ++i) {
        term *= t / i;
        sum += term;
    }
    return sum;
}

}  // namespace

double expected_excess_closed_form(const PhaseType& pt, double x) {
    if (x < 0.0) throw std::invalid_argument("expected_excess_closed_form: x must be nonnegative");
    switch (pt.kind()) {
        case PhaseType::Kind::hyperexponential: {
            const double p = pt.mix_p();
            return p / pt.rate1() * std::exp(-pt.rate1() * x) +
                   (1.0 - p) / pt.rate2() * std::exp(-pt.rate2() * x);
        }
        case PhaseType::Kind::erlang_mixture: {
            const int k = pt.erlang_order();
            const double p = pt.mix_p();
            const double mu = pt.rate1();
            const double t = mu * x;
            const double q = regularized_gamma_q(k - 1, t);
            // e^{-t} t^{k-1}/(k-1)!
            double tail = std::exp(-t);
            for (int i = 1; i <= k - 1; ++i) tail *= t / i;
            return std::max(0.0, (k - p - t) / mu * q + (k - p) / mu * tail);
        }
        case PhaseType::Kind::general:
            throw std::invalid_argument(
                "expected_excess_closed_form: needs a fitted mixed-Erlang or hyperexponential");
    }
    return 0.0;
}

double sample(const PhaseType& pt, Rng& rng) {
    switch (pt.kind()) {
        case PhaseType::Kind::erlang_mixture: {
            const int k = pt.erlang_order();
            const double u = rng.next_u01();
            return rng.erlang(u < pt.mix_p() ? k - 1 : k, pt.rate1());
        }
        case PhaseType::Kind::hyperexponential: {
            const double u = rng.next_u01();
            return rng.exponential(u < pt.mix_p() ? pt.rate1() : pt.rate2());
        }
        case PhaseType::Kind::general:
            break;
    }
    // Walk the chain: pick a start state from alpha, then jump until the
    // accumulated exit rate wins.
    double t = 0.0;
    double u = rng.next_u01();
    int state = pt.dim() - 1;
    double acc = 0.0;
    for (int i = 0; i < pt.dim(); ++i) {
        acc += pt.alpha()[i];
        if (u < acc) {
            state = i;
            break;
        }
    }
    while (true) {
        const double total = -pt.rates()(state, state);
        t += rng.exponential(total);
        double exit_rate = total;
        for (int j = state + 1; j < pt.dim(); ++j) exit_rate -= pt.rates()(state, j);
        const double draw = rng.next_u01() * total;
        if (draw < exit_rate) return t;  // absorbed
        double cum = exit_rate;
        int next = pt.dim() - 1;
        for (int j = state + 1; j < pt.dim(); ++j) {
            cum += pt.rates()(state, j);
            if (draw < cum) {
                next = j;
                break;
            }
        }
        state = next;
    }
}

}  // namespace ras
