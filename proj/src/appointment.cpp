#include "ras/appointment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ras/errors.hpp"

namespace ras {

std::vector<double> decayed_variance(const Instance& inst, std::span<const int> order,
                                     const HeavyTrafficConfig& cfg) {
    std::vector<double> s(order.size());
    double num = 0.0, den = 0.0;
    int prev = 0;
    for (std::size_t j = 0; j < order.size(); ++j) {
        num = cfg.beta * num + requirement_variance(inst, prev, order[j]);
        den = cfg.beta * den + 1.0;
        s[j] = num / den;
        prev = order[j];
    }
    return s;
}

Schedule heavy_traffic_schedule(const Instance& inst, std::span<const int> order,
                                const HeavyTrafficConfig& cfg) {
    if (!(inst.weight_idle > 0.0))
        throw std::domain_error(
            "heavy_traffic_schedule: weight_idle must be positive (the optimal slack divides by "
            "it)");
    const std::vector<double> s = decayed_variance(inst, order, cfg);
    Schedule sched;
    sched.x.resize(order.size());
    int prev = 0;
    for (std::size_t j = 0; j < order.size(); ++j) {
        const double mean = requirement_mean(inst, prev, order[j]);
        const double ww = inst.weight_wait[order[j]];
        sched.x[j] = mean + std::sqrt(ww * s[j] / (2.0 * inst.weight_idle));
        prev = order[j];
    }
    return sched;
}

double heavy_traffic_objective(const Instance& inst, std::span<const int> order,
                               const HeavyTrafficConfig& cfg) {
    if (!(inst.weight_idle > 0.0))
        throw std::domain_error("heavy_traffic_objective: weight_idle must be positive");
    const std::vector<double> s = decayed_variance(inst, order, cfg);
    double appointment = 0.0;
    for (std::size_t j = 0; j < order.size(); ++j)
        appointment += std::sqrt(inst.weight_wait[order[j]] * s[j]);
    return inst.weight_travel * tour_travel_mean(inst, order) +
           std::sqrt(2.0 * inst.weight_idle) * appointment;
}

double heavy_traffic_objective_at(const Instance& inst, std::span<const int> order,
                                  std::span<const double> x, const HeavyTrafficConfig& cfg) {
    if (x.size() != order.size())
        throw std::invalid_argument("heavy_traffic_objective_at: schedule length mismatch");
    const std::vector<double> s = decayed_variance(inst, order, cfg);
    double cost = inst.weight_travel * tour_travel_mean(inst, order);
    int prev = 0;
    for (std::size_t j = 0; j < order.size(); ++j) {
        const double slack = x[j] - requirement_mean(inst, prev, order[j]);
        const double ws = inst.weight_wait[order[j]] * s[j];
        if (slack < 0.0 || (slack == 0.0 && ws > 0.0))
            return std::numeric_limits<double>::infinity();
        if (slack > 0.0) cost += inst.weight_idle * slack + ws / (2.0 * slack);
        prev = order[j];
    }
    return cost;
}

double hybrid_objective(const ExactEvaluator& ev, std::span<const int> order,
                        const HeavyTrafficConfig& cfg) {
    const Schedule sched = heavy_traffic_schedule(ev.instance(), order, cfg);
    TourEvaluator te(ev, order);
    return te.objective(sched.x);
}

double hybrid_objective(const Instance& inst, const Tour& tour, const HeavyTrafficConfig& cfg,
                        const FitConfig& fit) {
    ExactEvaluator ev(inst, fit);
    return hybrid_objective(ev, tour.order(), cfg);
}

std::vector<double> schedule_gradient(TourEvaluator& te, std::span<const double> x) {
    te.objective(x);  // set the cache base
    const int n = te.positions();
    std::vector<double> g(n);
    for (int j = 0; j < n; ++j) {
        const double h = 1e-5 * (1.0 + x[j]);
        const double up = te.perturbed_objective(j, x[j] + h);
        if (x[j] >= h) {
            const double dn = te.perturbed_objective(j, x[j] - h);
            g[j] = (up - dn) / (2.0 * h);
        } else {
            g[j] = (up - te.perturbed_objective(j, x[j])) / h;
        }
    }
    return g;
}

namespace {

double projected_gradient_norm(std::span<const double> x, std::span<const double> g) {
    double norm = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double pg = x[j] > 1e-12 ? g[j] : std::min(g[j], 0.0);
        norm = std::max(norm, std::abs(pg));
    }
    return norm;
}

}  // namespace

OptimizedSchedule optimize_schedule(const ExactEvaluator& ev, std::span<const int> order,
                                    const HeavyTrafficConfig& cfg, const OptimizerOptions& opts) {
    const int n = static_cast<int>(order.size());
    TourEvaluator te(ev, order);
    OptimizedSchedule result;
    if (te.deterministic()) {
        // Zero-variance requirements: x = E U removes all idle and waiting,
        // which is a global minimum (both terms are nonnegative).
        result.schedule.x = te.requirement_means();
        result.value = te.objective(result.schedule.x);
        result.converged = true;
        return result;
    }

    std::vector<double> x = heavy_traffic_schedule(ev.instance(), order, cfg).x;
    double f = te.objective(x);
    std::vector<double> g = schedule_gradient(te, x);

    // Projected L-BFGS with Armijo backtracking.
    constexpr int kMemory = 10;
    std::vector<std::vector<double>> s_hist, y_hist;
    std::vector<double> rho_hist;

    int it = 0;
    bool converged = false;
    for (; it < opts.max_iterations; ++it) {
        if (projected_gradient_norm(x, g) <= opts.tolerance * (1.0 + std::abs(f))) {
            converged = true;
            break;
        }
        // Two-loop recursion for the quasi-Newton direction.
        std::vector<double> d(g.begin(), g.end());
        std::vector<double> alpha_mem(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            double a = 0.0;
            for (int j = 0; j < n; ++j) a += s_hist[i][j] * d[j];
            a *= rho_hist[i];
            alpha_mem[i] = a;
            for (int j = 0; j < n; ++j) d[j] -= a * y_hist[i][j];
        }
        if (!s_hist.empty()) {
            double sy = 0.0, yy = 0.0;
            const auto& s_last = s_hist.back();
            const auto& y_last = y_hist.back();
            for (int j = 0; j < n; ++j) {
                sy += s_last[j] * y_last[j];
                yy += y_last[j] * y_last[j];
            }
            if (yy > 0.0) {
                const double scale = sy / yy;
                for (int j = 0; j < n; ++j) d[j] *= scale;
            }
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            double b = 0.0;
            for (int j = 0; j < n; ++j) b += y_hist[i][j] * d[j];
            b *= rho_hist[i];
            for (int j = 0; j < n; ++j) d[j] += s_hist[i][j] * (alpha_mem[i] - b);
        }
        for (int j = 0; j < n; ++j) d[j] = -d[j];
        double dg = 0.0;
        for (int j = 0; j < n; ++j) dg += d[j] * g[j];
        if (!(dg < 0.0)) {
            for (int j = 0; j < n; ++j) d[j] = -g[j];
        }

        // Backtracking on the projected point.
        double step = 1.0;
        std::vector<double> x_new(n);
        double f_new = f;
        bool moved = false;
        for (int ls = 0; ls < 40; ++ls) {
            for (int j = 0; j < n; ++j) x_new[j] = std::max(0.0, x[j] + step * d[j]);
            double decrease = 0.0;
            for (int j = 0; j < n; ++j) decrease += g[j] * (x_new[j] - x[j]);
            f_new = te.objective(x_new);
            if (f_new <= f + 1e-4 * decrease && f_new < f) {
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) {
            // No acceptable decrease left at line-search resolution.
            te.objective(x);
            converged = projected_gradient_norm(x, g) <= opts.tolerance * (1.0 + std::abs(f));
            break;
        }
        std::vector<double> g_new = schedule_gradient(te, x_new);
        std::vector<double> s_vec(n), y_vec(n);
        double sy = 0.0;
        for (int j = 0; j < n; ++j) {
            s_vec[j] = x_new[j] - x[j];
            y_vec[j] = g_new[j] - g[j];
            sy += s_vec[j] * y_vec[j];
        }
        if (sy > 1e-12) {
            s_hist.push_back(std::move(s_vec));
            y_hist.push_back(std::move(y_vec));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > kMemory) {
                s_hist.erase(s_hist.begin());
                y_hist.erase(y_hist.begin());
                rho_hist.erase(rho_hist.begin());
            }
        }
        x = std::move(x_new);
        f = f_new;
        g = std::move(g_new);
    }

    result.schedule.x = x;
    result.value = f;
    result.converged = converged;
    result.iterations = it;
    return result;
}

OptimizedSchedule optimize_schedule(const Instance& inst, const Tour& tour,
                                    const HeavyTrafficConfig& cfg, const FitConfig& fit,
                                    const OptimizerOptions& opts) {
    ExactEvaluator ev(inst, fit);
    return optimize_schedule(ev, tour.order(), cfg, opts);
}

}  // namespace ras
