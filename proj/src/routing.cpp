#include "ras/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ras/errors.hpp"

namespace ras {

double tour_cost(const std::vector<std::vector<double>>& cost, std::span<const int> order) {
    double total = 0.0;
    int prev = 0;
    for (int c : order) {
        total += cost[prev][c];
        prev = c;
    }
    total += cost[prev][0];
    return total;
}

namespace {

constexpr double kImprovementEps = 1e-12;

std::vector<int> held_karp(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size()) - 1;
    const std::size_t full = std::size_t{1} << n;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dp(full * n, inf);
    std::vector<std::int16_t> parent(full * n, -1);
    for (int i = 0; i < n; ++i) dp[(std::size_t{1} << i) * n + i] = cost[0][i + 1];
    for (std::size_t mask = 1; mask < full; ++mask) {
        for (int last = 0; last < n; ++last) {
            if (!(mask >> last & 1)) continue;
            const double d = dp[mask * n + last];
            if (d == inf) continue;
            for (int j = 0; j < n; ++j) {
                if (mask >> j & 1) continue;
                const std::size_t nm = mask | std::size_t{1} << j;
                const double nd = d + cost[last + 1][j + 1];
                if (nd < dp[nm * n + j]) {
                    dp[nm * n + j] = nd;
                    parent[nm * n + j] = static_cast<std::int16_t>(last);
                }
            }
        }
    }
    int best_last = 0;
    double best = inf;
    for (int last = 0; last < n; ++last) {
        const double total = dp[(full - 1) * n + last] + cost[last + 1][0];
        if (total < best) {
            best = total;
            best_last = last;
        }
    }
    std::vector<int> order(n);
    std::size_t mask = full - 1;
    int last = best_last;
    for (int pos = n - 1; pos >= 0; --pos) {
        order[pos] = last + 1;
        const int prev = parent[mask * n + last];
        mask &= ~(std::size_t{1} << last);
        last = prev;
    }
    return order;
}

std::vector<int> nearest_neighbour(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size()) - 1;
    std::vector<char> visited(n + 1, 0);
    std::vector<int> order;
    order.reserve(n);
    int at = 0;
    for (int step = 0; step < n; ++step) {
        int pick = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int j = 1; j <= n; ++j) {
            if (visited[j]) continue;
            if (cost[at][j] < best) {
                best = cost[at][j];
                pick = j;
            }
        }
        visited[pick] = 1;
        order.push_back(pick);
        at = pick;
    }
    return order;
}

bool two_opt_pass(const std::vector<std::vector<double>>& cost, std::vector<int>& order) {
    const int n = static_cast<int>(order.size());
    bool improved = false;
    for (int i = 0; i < n - 1; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const int a = i == 0 ? 0 : order[i - 1];
            const int b = order[i];
            const int c = order[j];
            const int d = j == n - 1 ? 0 : order[j + 1];
            const double delta = cost[a][c] + cost[b][d] - cost[a][b] - cost[c][d];
            if (delta < -kImprovementEps) {
                std::reverse(order.begin() + i, order.begin() + j + 1);
                improved = true;
            }
        }
    }
    return improved;
}

bool or_opt_pass(const std::vector<std::vector<double>>& cost, std::vector<int>& order) {
    const int n = static_cast<int>(order.size());
    bool improved = false;
    for (int len = 1; len <= std::min(3, n - 1); ++len) {
        for (int i = 0; i + len <= n; ++i) {
            const int before = i == 0 ? 0 : order[i - 1];
            const int after = i + len == n ? 0 : order[i + len];
            const int seg_first = order[i];
            const int seg_last = order[i + len - 1];
            const double removal_gain =
                cost[before][seg_first] + cost[seg_last][after] - cost[before][after];
            // Try reinserting between every remaining consecutive pair.
            std::vector<int> rest;
            rest.reserve(n - len);
            for (int k = 0; k < n; ++k)
                if (k < i || k >= i + len) rest.push_back(order[k]);
            int best_pos = -1;
            double best_delta = -kImprovementEps;
            for (int pos = 0; pos <= static_cast<int>(rest.size()); ++pos) {
                if (pos == i) continue;  // original slot
                const int a = pos == 0 ? 0 : rest[pos - 1];
                const int b = pos == static_cast<int>(rest.size()) ? 0 : rest[pos];
                const double insertion = cost[a][seg_first] + cost[seg_last][b] - cost[a][b];
                const double delta = insertion - removal_gain;
                if (delta < best_delta) {
                    best_delta = delta;
                    best_pos = pos;
                }
            }
            if (best_pos >= 0) {
                rest.insert(rest.begin() + best_pos, order.begin() + i, order.begin() + i + len);
                order = rest;
                improved = true;
            }
        }
    }
    return improved;
}

std::vector<int> local_search_tour(const std::vector<std::vector<double>>& cost, bool symmetric) {
    std::vector<int> order = nearest_neighbour(cost);
    const int n = static_cast<int>(order.size());
    const int max_passes = n * n;
    for (int pass = 0; pass < max_passes; ++pass) {
        bool improved = false;
        if (symmetric) improved |= two_opt_pass(cost, order);
        improved |= or_opt_pass(cost, order);
        if (!improved) break;
    }
    return order;
}

}  // namespace

std::vector<int> min_cost_tour(const std::vector<std::vector<double>>& cost, bool symmetric) {
    const int n = static_cast<int>(cost.size()) - 1;
    if (n < 1) throw std::invalid_argument("min_cost_tour: empty instance");
    if (n == 1) return {1};
    if (n <= 12) return held_karp(cost);
    return local_search_tour(cost, symmetric);
}

Tour solve_tsp(const ExactEvaluator& ev, const HeavyTrafficConfig& cfg) {
    const Instance& inst = ev.instance();
    std::vector<int> order = min_cost_tour(inst.travel_mean, true);
    std::vector<int> rev(order.rbegin(), order.rend());
    const double fwd = hybrid_objective(ev, order, cfg);
    const double bwd = hybrid_objective(ev, rev, cfg);
    if (bwd < fwd || (bwd == fwd && rev[0] < order[0])) return Tour(std::move(rev));
    return Tour(std::move(order));
}

Tour msvf_tour(const Instance& inst) {
    const int n = inst.n;
    std::vector<char> visited(n + 1, 0);
    std::vector<int> order;
    order.reserve(n);
    int at = 0;
    for (int step = 0; step < n; ++step) {
        int pick = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int j = 1; j <= n; ++j) {
            if (visited[j]) continue;
            const double tm = inst.travel_mean[at][j];
            const double var = inst.travel_scv[at][j] * tm * tm +
                               inst.service_scv[j] * inst.service_mean[j] * inst.service_mean[j];
            if (var < best) {
                best = var;
                pick = j;
            }
        }
        visited[pick] = 1;
        order.push_back(pick);
        at = pick;
    }
    return Tour(std::move(order));
}

std::vector<std::vector<double>> mtsp_modified_costs(const ExactEvaluator& ev) {
    const Instance& inst = ev.instance();
    if (!(inst.weight_travel > 0.0))
        throw std::invalid_argument(
            "mtsp_tour: weight_travel must be positive (modified costs divide by it); use the "
            "tsp, msvf or lns heuristics for pure appointment instances");
    const int m = inst.n + 1;
    std::vector<std::vector<double>> chat(m, std::vector<double>(m, 0.0));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            if (j == 0) {
                chat[i][0] = inst.travel_mean[i][0];  // return leg: travel only
                continue;
            }
            const Requirement& req = ev.requirement(i, j);
            double appointment_cost = 0.0;
            if (!req.deterministic && inst.weight_idle > 0.0) {
                const double ww = inst.weight_wait[j];
                const double q = ww / (ww + inst.weight_idle);
                const double xstar = q > 0.0 ? quantile(req.law, q) : 0.0;
                const double excess = expected_excess_closed_form(req.law, xstar);
                appointment_cost = std::max(
                    0.0, (ww + inst.weight_idle) * excess + inst.weight_idle * (xstar - req.mean));
            }
            chat[i][j] = inst.travel_mean[i][j] + appointment_cost / inst.weight_travel;
        }
    }
    return chat;
}

Tour mtsp_tour(const ExactEvaluator& ev) {
    return Tour(min_cost_tour(mtsp_modified_costs(ev), false));
}

namespace {

long factorial(int n) {
    long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

std::vector<int> unrank_permutation(long rank, int n) {
    std::vector<int> items(n);
    std::iota(items.begin(), items.end(), 1);
    std::vector<int> out;
    out.reserve(n);
    long f = factorial(n);
    for (int i = n; i >= 1; --i) {
        f /= i;
        const long idx = rank / f;
        rank %= f;
        out.push_back(items[idx]);
        items.erase(items.begin() + idx);
    }
    return out;
}

struct BestTour {
    double value = std::numeric_limits<double>::infinity();
    long rank = -1;
    Schedule schedule;

    // Total order on (value, rank): deterministic however the permutation
    // space is sharded.
    void consider(double v, long r, Schedule s) {
        if (v < value || (v == value && (rank < 0 || r < rank))) {
            value = v;
            rank = r;
            schedule = std::move(s);
        }
    }
    void merge(const BestTour& other) {
        if (other.rank >= 0) consider(other.value, other.rank, other.schedule);
    }
};

}  // namespace

EnumerationResult enumerate_optimal(const ExactEvaluator& ev, const EnumerateOptions& opts) {
    const Instance& inst = ev.instance();
    const int n = inst.n;
    const bool prefilter = opts.mode == EnumerationMode::heavy_traffic_prefilter;
    const int cap = prefilter ? opts.max_prefilter_n : opts.max_exact_n;
    if (n > cap)
        throw std::invalid_argument("enumerate_optimal: n=" + std::to_string(n) +
                                    " above the cap " + std::to_string(cap) + " for " +
                                    (prefilter ? "prefilter" : "exact") + " mode");
    const long total = factorial(n);

    std::vector<long> ranks_to_optimize;
    if (prefilter) {
        std::vector<double> ht_values(total);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (opts.parallel)
#endif
        for (long r = 0; r < total; ++r) {
            const std::vector<int> perm = unrank_permutation(r, n);
            ht_values[r] = heavy_traffic_objective(inst, perm, opts.ht);
        }
        const double fraction =
            opts.prefilter_fraction > 0.0 ? opts.prefilter_fraction
                                          : 1.0 / (static_cast<double>(n) * (n - 1));
        long keep = std::max<long>(1, std::lround(static_cast<double>(total) * fraction));
        keep = std::min(keep, total);
        std::vector<long> idx(total);
        std::iota(idx.begin(), idx.end(), 0);
        const auto by_value = [&](long a, long b) {
            return ht_values[a] < ht_values[b] || (ht_values[a] == ht_values[b] && a < b);
        };
        std::nth_element(idx.begin(), idx.begin() + keep - 1, idx.end(), by_value);
        idx.resize(keep);
        std::sort(idx.begin(), idx.end());
        ranks_to_optimize = std::move(idx);
    } else {
        ranks_to_optimize.resize(total);
        std::iota(ranks_to_optimize.begin(), ranks_to_optimize.end(), 0);
    }

    const long count = static_cast<long>(ranks_to_optimize.size());
    BestTour best;
#ifdef _OPENMP
#pragma omp parallel if (opts.parallel)
    {
        BestTour local;
#pragma omp for schedule(dynamic, 16)
        for (long i = 0; i < count; ++i) {
            const long r = ranks_to_optimize[i];
            const std::vector<int> perm = unrank_permutation(r, n);
            OptimizedSchedule opt = optimize_schedule(ev, perm, opts.ht, opts.optimizer);
            local.consider(opt.value, r, std::move(opt.schedule));
        }
#pragma omp critical
        best.merge(local);
    }
#else
    for (long i = 0; i < count; ++i) {
        const long r = ranks_to_optimize[i];
        const std::vector<int> perm = unrank_permutation(r, n);
        OptimizedSchedule opt = optimize_schedule(ev, perm, opts.ht, opts.optimizer);
        best.consider(opt.value, r, std::move(opt.schedule));
    }
#endif

    EnumerationResult result;
    result.tour = Tour(unrank_permutation(best.rank, n));
    result.schedule = std::move(best.schedule);
    result.value = best.value;
    result.tours_scored = count;
    result.tours_considered = total;
    return result;
}

}  // namespace ras
