#pragma once

// Independent reference computations used only by tests. Nothing here may
// call into the matrix-based evaluation path it cross-checks.

#include <cassert>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace ras::test {

// Exact expected idle/waiting times for exponential requirements with
// pairwise-distinct rates: the waiting-time survival function stays a
// mixture of exponentials through the Lindley recursion, so each step is
// closed-form coefficient algebra.
struct ExpLindleyOracle {
    std::vector<double> expected_idle;
    std::vector<double> expected_wait;

    ExpLindleyOracle(const std::vector<double>& rates, const std::vector<double>& x) {
        std::vector<double> coef;  // survival of W_{j-1}: sum coef_i e^{-nu_i t}
        std::vector<double> nu;
        for (std::size_t j = 0; j < rates.size(); ++j) {
            const double lambda = rates[j];
            double atom = 1.0;
            for (double c : coef) atom -= c;
            // R = W + Exp(lambda); survival is again a mixture.
            std::vector<double> d, rho;
            double lambda_coef = atom;
            for (std::size_t i = 0; i < coef.size(); ++i) {
                if (std::abs(lambda - nu[i]) < 1e-9)
                    throw std::invalid_argument("oracle needs pairwise-distinct rates");
                d.push_back(coef[i] * lambda / (lambda - nu[i]));
                rho.push_back(nu[i]);
                lambda_coef -= coef[i] * nu[i] / (lambda - nu[i]);
            }
            d.push_back(lambda_coef);
            rho.push_back(lambda);

            // E I_j = x_j - int_0^{x_j} S_R(t) dt, E W_j = int_0^inf S_R(x_j + t) dt.
            double integral_to_x = 0.0, wait = 0.0;
            coef.assign(d.size(), 0.0);
            nu = rho;
            for (std::size_t k = 0; k < d.size(); ++k) {
                const double decayed = d[k] * std::exp(-rho[k] * x[j]);
                integral_to_x += (d[k] - decayed) / rho[k];
                wait += decayed / rho[k];
                coef[k] = decayed;
            }
            expected_idle.push_back(x[j] - integral_to_x);
            expected_wait.push_back(wait);
        }
    }
};

// Brute-force numeric integration of the idle/waiting recursion for
// exponential requirements. The waiting-time law is an atom at 0 plus a
// density tabulated at the nodes t_i = i*h; each step convolves with the
// exponential density in O(nodes) through a damped prefix sum, and all
// integrals use the trapezoid rule. Schedule entries must sit on grid
// nodes (within round-off).
struct GridLindleyOracle {
    std::vector<double> expected_idle;
    std::vector<double> expected_wait;

    GridLindleyOracle(const std::vector<double>& rates, const std::vector<double>& x,
                      double horizon = 25.0, int nodes = 100001) {
        const double h = horizon / (nodes - 1);
        double atom = 1.0;
        std::vector<double> density(nodes, 0.0);
        for (std::size_t j = 0; j < rates.size(); ++j) {
            const double lambda = rates[j];
            const double damp = std::exp(-lambda * h);
            // f_R(t_i) = lambda (atom e^{-lambda t_i} + trapz_k f_W(t_k) e^{-lambda(t_i-t_k)})
            std::vector<double> f_r(nodes);
            double full_prefix = 0.0;  // full-weight damped prefix sum
            double decay = 1.0;        // e^{-lambda t_i}
            for (int i = 0; i < nodes; ++i) {
                full_prefix = full_prefix * damp + h * density[i];
                const double trapz = full_prefix - 0.5 * h * (density[0] * decay + density[i]);
                f_r[i] = lambda * (atom * decay + trapz);
                decay *= damp;
            }
            const int shift = static_cast<int>(std::lround(x[j] / h));
            assert(std::abs(shift * h - x[j]) < 1e-9);
            double idle = 0.0, new_atom = 0.0;
            for (int i = 0; i <= shift && i < nodes; ++i) {
                const double w = (i == 0 || i == shift) ? 0.5 * h : h;
                idle += w * (x[j] - i * h) * f_r[i];
                new_atom += w * f_r[i];
            }
            double wait = 0.0;
            for (int i = shift; i < nodes; ++i) {
                const double w = (i == shift || i == nodes - 1) ? 0.5 * h : h;
                wait += w * (i * h - x[j]) * f_r[i];
            }
            std::vector<double> next(nodes, 0.0);
            for (int i = 0; i + shift < nodes; ++i) next[i] = f_r[i + shift];
            expected_idle.push_back(idle);
            expected_wait.push_back(wait);
            atom = new_atom;
            density = std::move(next);
        }
    }
};

// Composite Simpson rule on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
    assert(intervals % 2 == 0);
    const double h = (b - a) / intervals;
    double sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

// All permutations of {1..n}, lexicographic.
inline std::vector<std::vector<int>> all_permutations(int n) {
    std::vector<int> base(n);
    for (int i = 0; i < n; ++i) base[i] = i + 1;
    std::vector<std::vector<int>> out;
    do {
        out.push_back(base);
    } while (std::next_permutation(base.begin(), base.end()));
    return out;
}

}  // namespace ras::test
