#include "ras/lns.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ras/errors.hpp"

namespace ras {

std::string to_string(AcceptVariant v) { return v == AcceptVariant::paper ? "paper" : "decreasing"; }

AcceptVariant accept_variant_from_string(const std::string& s) {
    if (s == "paper") return AcceptVariant::paper;
    if (s == "decreasing") return AcceptVariant::decreasing;
    throw std::invalid_argument("unknown acceptance variant: " + s);
}

std::string to_string(ObjectiveKind k) {
    return k == ObjectiveKind::hybrid ? "hybrid" : "exact-optimized";
}

DestroyResult destroy_random(std::span<const int> order, int k, Rng& rng) {
    const int n = static_cast<int>(order.size());
    if (k < 1 || k > n) throw std::invalid_argument("destroy_random: k outside 1..n");
    std::vector<int> positions(n);
    std::iota(positions.begin(), positions.end(), 0);
    for (int i = 0; i < k; ++i) {
        const int j = static_cast<int>(rng.uniform_int(i, n - 1));
        std::swap(positions[i], positions[j]);
    }
    std::vector<char> gone(n, 0);
    DestroyResult res;
    res.removed.reserve(k);
    for (int i = 0; i < k; ++i) {
        gone[positions[i]] = 1;
        res.removed.push_back(order[positions[i]]);
    }
    res.partial.reserve(n - k);
    for (int i = 0; i < n; ++i)
        if (!gone[i]) res.partial.push_back(order[i]);
    return res;
}

DestroyResult destroy_adjacent(std::span<const int> order, int k, Rng& rng) {
    const int n = static_cast<int>(order.size());
    if (k < 1 || k > n) throw std::invalid_argument("destroy_adjacent: k outside 1..n");
    const int start = static_cast<int>(rng.uniform_int(0, n - k));
    DestroyResult res;
    res.removed.assign(order.begin() + start, order.begin() + start + k);
    res.partial.assign(order.begin(), order.begin() + start);
    res.partial.insert(res.partial.end(), order.begin() + start + k, order.end());
    return res;
}

namespace {

// Greedy insertion returning the tour together with its hybrid objective,
// so the caller does not re-evaluate the final candidate.
std::pair<std::vector<int>, double> repair_greedy_scored(std::vector<int> partial,
                                                         std::span<const int> removed,
                                                         const ExactEvaluator& ev,
                                                         const HeavyTrafficConfig& cfg) {
    double last_obj = 0.0;
    bool have_obj = false;
    for (int client : removed) {
        int best_pos = -1;
        double best_obj = 0.0;
        std::vector<int> candidate;
        candidate.reserve(partial.size() + 1);
        for (int pos = 0; pos <= static_cast<int>(partial.size()); ++pos) {
            candidate.assign(partial.begin(), partial.begin() + pos);
            candidate.push_back(client);
            candidate.insert(candidate.end(), partial.begin() + pos, partial.end());
            const double obj = hybrid_objective(ev, candidate, cfg);
            if (best_pos < 0 || obj < best_obj) {
                best_pos = pos;
                best_obj = obj;
            }
        }
        partial.insert(partial.begin() + best_pos, client);
        last_obj = best_obj;
        have_obj = true;
    }
    if (!have_obj) {
        last_obj = hybrid_objective(ev, partial, cfg);
    }
    return {std::move(partial), last_obj};
}

}  // namespace

std::vector<int> repair_greedy(std::vector<int> partial, std::span<const int> removed,
                               const ExactEvaluator& ev, const HeavyTrafficConfig& cfg) {
    return repair_greedy_scored(std::move(partial), removed, ev, cfg).first;
}

bool accept_rrt(double candidate_obj, double best_obj, double elapsed, double budget, double h0,
                AcceptVariant variant) {
    const double frac = budget > 0.0 ? std::clamp(elapsed / budget, 0.0, 1.0) : 1.0;
    const double h = variant == AcceptVariant::paper ? h0 * frac : h0 * (1.0 - frac);
    return candidate_obj - best_obj < h;
}

Solution lns_solve(const ExactEvaluator& ev, const LnsParams& params) {
    const Instance& inst = ev.instance();
    const int n = inst.n;
    if (params.max_removed < 1) throw std::invalid_argument("lns_solve: max_removed must be >= 1");
    const int d_max = std::min(params.max_removed, n);
    const bool wall_clock = params.time_limit_s > 0.0;
    if (!wall_clock && params.iterations < 1)
        throw std::invalid_argument("lns_solve: iteration budget must be positive");

    Rng rng(params.seed);
    std::vector<int> current(n);
    std::iota(current.begin(), current.end(), 1);
    for (int i = n - 1; i >= 1; --i) {
        const int j = static_cast<int>(rng.uniform_int(0, i));
        std::swap(current[i], current[j]);
    }

    Solution sol;
    double cur_obj = 0.0;
    try {
        cur_obj = hybrid_objective(ev, current, params.ht);
    } catch (const std::runtime_error& e) {
        // Nothing evaluated yet: hand back the initial tour, unvalued.
        sol.aborted = true;
        sol.abort_reason = e.what();
        sol.tour = Tour(current);
        sol.objective = std::numeric_limits<double>::quiet_NaN();
        sol.objective_kind = ObjectiveKind::hybrid;
        return sol;
    }
    std::vector<int> best = current;
    double best_obj = cur_obj;
    const double h0 = params.accept_fraction * best_obj;
    const double op_total = params.operator_weights[0] + params.operator_weights[1];
    if (!(op_total > 0.0)) throw std::invalid_argument("lns_solve: operator weights must sum > 0");

    const auto start = std::chrono::steady_clock::now();
    const auto now_s = [&start] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    const double budget = wall_clock ? params.time_limit_s : static_cast<double>(params.iterations);

    if (params.record_trace) {
        sol.trace.emplace_back(0.0, best_obj);
        sol.current_trace.emplace_back(0.0, cur_obj);
    }

    long iter = 0;
    while (true) {
        double elapsed;
        if (wall_clock) {
            elapsed = now_s();
            if (elapsed >= params.time_limit_s) break;
        } else {
            if (iter >= params.iterations) break;
            elapsed = static_cast<double>(iter);
        }
        try {
            const double op_draw = rng.next_u01() * op_total;
            const int k = static_cast<int>(rng.uniform_int(1, d_max));
            DestroyResult destroyed = op_draw < params.operator_weights[0]
                                          ? destroy_random(current, k, rng)
                                          : destroy_adjacent(current, k, rng);
            auto [candidate, cand_obj] = repair_greedy_scored(std::move(destroyed.partial),
                                                              destroyed.removed, ev, params.ht);
            const bool accepted = accept_rrt(cand_obj, best_obj, elapsed, budget, h0,
                                             params.accept_variant);
            const double stamp = wall_clock ? now_s() : static_cast<double>(iter + 1);
            if (cand_obj < best_obj) {
                best = candidate;
                best_obj = cand_obj;
                if (params.record_trace) sol.trace.emplace_back(stamp, best_obj);
            }
            if (accepted) {
                current = std::move(candidate);
                cur_obj = cand_obj;
                if (params.record_trace) sol.current_trace.emplace_back(stamp, cur_obj);
            }
        } catch (const std::runtime_error& e) {
            sol.aborted = true;
            sol.abort_reason = e.what();
            break;
        }
        ++iter;
    }
    sol.iterations = iter;

    sol.tour = Tour(best);
    try {
        OptimizedSchedule opt = optimize_schedule(ev, best, params.ht, params.optimizer);
        sol.schedule = std::move(opt.schedule);
        sol.objective = opt.value;
        sol.objective_kind = ObjectiveKind::exact_optimized;
        sol.schedule_converged = opt.converged;
    } catch (const std::runtime_error& e) {
        sol.aborted = true;
        sol.abort_reason = e.what();
        sol.schedule = heavy_traffic_schedule(inst, best, params.ht);
        sol.objective = best_obj;
        sol.objective_kind = ObjectiveKind::hybrid;
    }
    return sol;
}

Solution lns_solve(const Instance& inst, const LnsParams& params, const FitConfig& fit) {
    ExactEvaluator ev(inst, fit);
    return lns_solve(ev, params);
}

}  // namespace ras
