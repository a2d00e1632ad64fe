#include "ras/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ras/errors.hpp"

namespace ras {

Requirement Requirement::fit(double mean, double variance, const FitConfig& cfg) {
    Requirement r;
    r.mean = mean;
    r.variance = variance;
    // Zero variance stays a point mass unless the clamp policy asks for a
    // phase-type stand-in (a mean > 0 is then required to fit one).
    if (variance == 0.0 && !(cfg.clamp_scv && mean > 0.0)) {
        r.deterministic = true;
        return r;
    }
    if (!(mean > 0.0)) throw std::invalid_argument("Requirement::fit: nonpositive mean");
    r.law = fit_phase_type({mean, variance / (mean * mean)}, cfg);
    return r;
}

double sample_requirement(const Requirement& req, Rng& rng) {
    return req.deterministic ? req.mean : sample(req.law, rng);
}

namespace {

double checked_expectation(double v, const char* which, int pos) {
    if (v >= 0.0) return v;
    if (v >= -1e-10) return 0.0;
    throw EvalError(std::string("evaluate_exact: expected ") + which + " at position " +
                    std::to_string(pos + 1) + " is negative beyond round-off (" +
                    std::to_string(v) + ")");
}

UpperTriangular scaled_leading_block(const UpperTriangular& full, int dim, double factor) {
    UpperTriangular b(dim);
    for (int i = 0; i < dim; ++i) {
        const double* src = full.row(i);
        double* dst = b.row(i);
        for (int j = i; j < dim; ++j) dst[j] = factor * src[j];
    }
    return b;
}

// Phase-type machinery for one fixed position order. Holds the recursive
// block matrix (independent of the schedule) and a cache of per-position
// matrix exponentials keyed by the last schedule seen.
struct ChainImpl {
    int n = 0;
    std::vector<PhaseType> laws;          // per position
    std::vector<int> cum;                 // D_j, cumulative dimensions
    std::vector<int> offset;              // block start per position
    UpperTriangular full;                 // V^{(n)}
    std::vector<std::vector<double>> inv_ones;  // y_j = (V^{(j)})^{-1} 1

    double weight_idle = 0.0;
    std::vector<double> weight_wait;      // per position
    double travel_weighted = 0.0;

    // Base-schedule cache.
    bool has_base = false;
    std::vector<double> base_x;
    std::vector<UpperTriangular> exp_base;
    std::vector<std::vector<double>> alpha_chain;  // alpha_(j) at the base
    std::vector<double> idle, wait;                // unweighted, at the base
    std::vector<double> prefix_cost;               // weighted idle+wait over positions < j
    double base_objective = 0.0;

    ChainImpl(std::vector<PhaseType> laws_in, double w_idle, std::vector<double> w_wait,
              double travel_cost, int max_dim)
        : n(static_cast<int>(laws_in.size())),
          laws(std::move(laws_in)),
          weight_idle(w_idle),
          weight_wait(std::move(w_wait)),
          travel_weighted(travel_cost) {
        cum.resize(n);
        offset.resize(n);
        int total = 0;
        for (int i = 0; i < n; ++i) {
            offset[i] = total;
            total += laws[i].dim();
            cum[i] = total;
            if (total > max_dim)
                throw EvalError("sojourn chain dimension D_" + std::to_string(i + 1) + "=" +
                                std::to_string(total) + " at position " + std::to_string(i + 1) +
                                " exceeds cap " + std::to_string(max_dim));
        }
        full = UpperTriangular(total);
        for (int i = 0; i < n; ++i) {
            const PhaseType& pt = laws[i];
            const int off = offset[i];
            for (int r = 0; r < pt.dim(); ++r)
                for (int c = r; c < pt.dim(); ++c) full.set(off + r, off + c, pt.rates()(r, c));
            if (i + 1 < n) {
                // Coupling block: exit vector of U_j times alpha of U_{j+1}.
                const PhaseType& next = laws[i + 1];
                for (int r = 0; r < pt.dim(); ++r) {
                    double exit_rate = 0.0;
                    for (int c = r; c < pt.dim(); ++c) exit_rate -= pt.rates()(r, c);
                    if (exit_rate == 0.0) continue;
                    for (int c = 0; c < next.dim(); ++c)
                        full.set(off + r, offset[i + 1] + c, exit_rate * next.alpha()[c]);
                }
            }
        }
        inv_ones.resize(n);
        for (int i = 0; i < n; ++i) {
            const UpperTriangular block = full.leading_block(cum[i]);
            inv_ones[i] = tri_solve(block, std::vector<double>(cum[i], 1.0));
        }
        base_x.assign(n, -1.0);
        exp_base.resize(n);
        alpha_chain.resize(n);
        idle.assign(n, 0.0);
        wait.assign(n, 0.0);
        prefix_cost.assign(n + 1, 0.0);
    }

    // One position step: from the running initial vector and e^{V x_j},
    // produce the idle/wait expectations for this client.
    void step(int i, std::span<const double> alpha, const UpperTriangular& exp_vx, double x,
              double& out_idle, double& out_wait, std::vector<double>& out_r) const {
        out_r = row_times(alpha, exp_vx);
        const std::vector<double>& y = inv_ones[i];
        double wait_v = 0.0, mean_r = 0.0;
        for (int k = 0; k < cum[i]; ++k) {
            wait_v -= out_r[k] * y[k];
            mean_r -= alpha[k] * y[k];
        }
        out_wait = checked_expectation(wait_v, "waiting time", i);
        out_idle = checked_expectation(x - mean_r + wait_v, "idle time", i);
    }

    std::vector<double> next_alpha(int i, const std::vector<double>& r) const {
        double tail = std::accumulate(r.begin(), r.end(), 0.0);
        double absorbed = 1.0 - tail;
        if (absorbed < -1e-9 || absorbed > 1.0 + 1e-9)
            throw EvalError("sojourn chain: CDF value " + std::to_string(absorbed) +
                            " out of [0,1] at position " + std::to_string(i + 1));
        absorbed = std::clamp(absorbed, 0.0, 1.0);
        const PhaseType& next = laws[i + 1];
        std::vector<double> a(cum[i + 1], 0.0);
        std::copy(r.begin(), r.end(), a.begin());
        for (int c = 0; c < next.dim(); ++c) a[cum[i] + c] = next.alpha()[c] * absorbed;
        return a;
    }

    double set_base(std::span<const double> x) {
        int first = 0;
        if (has_base) {
            first = n;
            for (int i = 0; i < n; ++i)
                if (x[i] != base_x[i]) {
                    first = i;
                    break;
                }
            if (first == n) return base_objective;
        }
        for (int i = first; i < n; ++i) {
            if (!has_base || x[i] != base_x[i]) {
                exp_base[i] = matrix_exponential(scaled_leading_block(full, cum[i], x[i]));
                base_x[i] = x[i];
            }
            if (i == 0) {
                alpha_chain[0].assign(laws[0].alpha().begin(), laws[0].alpha().end());
            }
            std::vector<double> r;
            step(i, alpha_chain[i], exp_base[i], x[i], idle[i], wait[i], r);
            if (i + 1 < n) alpha_chain[i + 1] = next_alpha(i, r);
            prefix_cost[i + 1] =
                prefix_cost[i] + weight_idle * idle[i] + weight_wait[i] * wait[i];
        }
        has_base = true;
        base_objective = travel_weighted + prefix_cost[n];
        return base_objective;
    }

    double perturbed(int pos, double value) const {
        const UpperTriangular exp_scratch =
            matrix_exponential(scaled_leading_block(full, cum[pos], value));
        double cost = prefix_cost[pos];
        std::vector<double> a = alpha_chain[pos];
        std::vector<double> r;
        for (int i = pos; i < n; ++i) {
            const UpperTriangular& e = i == pos ? exp_scratch : exp_base[i];
            const double xi = i == pos ? value : base_x[i];
            double idle_i, wait_i;
            step(i, a, e, xi, idle_i, wait_i, r);
            cost += weight_idle * idle_i + weight_wait[i] * wait_i;
            if (i + 1 < n) a = next_alpha(i, r);
        }
        return travel_weighted + cost;
    }
};

std::vector<double> position_weights(const Instance& inst, std::span<const int> order) {
    std::vector<double> w(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) w[i] = inst.weight_wait[order[i]];
    return w;
}

}  // namespace

ExactEvaluator::ExactEvaluator(const Instance& inst, FitConfig cfg) : inst_(&inst), cfg_(cfg) {
    const int m = inst.n + 1;
    arcs_.resize(static_cast<std::size_t>(m) * m);
    for (int from = 0; from < m; ++from) {
        for (int to = 1; to < m; ++to) {
            if (from == to) continue;
            try {
                arcs_[static_cast<std::size_t>(from) * m + to] = Requirement::fit(
                    requirement_mean(inst, from, to), requirement_variance(inst, from, to), cfg);
            } catch (const FitError& e) {
                throw FitError("arc (" + std::to_string(from) + "," + std::to_string(to) +
                               "): " + e.what());
            }
        }
    }
}

const Requirement& ExactEvaluator::requirement(int from, int to) const {
    const int m = inst_->n + 1;
    if (from < 0 || from >= m || to < 1 || to >= m || from == to)
        throw std::invalid_argument("ExactEvaluator::requirement: bad arc");
    return arcs_[static_cast<std::size_t>(from) * m + to];
}

Evaluation ExactEvaluator::evaluate(std::span<const int> order, std::span<const double> x) const {
    TourEvaluator te(*this, order);
    return te.full_evaluation(x);
}

SojournChain ExactEvaluator::build_chain(std::span<const int> order,
                                         std::span<const double> x) const {
    std::vector<PhaseType> laws;
    int prev = 0;
    for (int c : order) {
        const Requirement& req = requirement(prev, c);
        if (req.deterministic)
            throw EvalError("build_chain: zero-variance requirement at position " +
                            std::to_string(laws.size() + 1));
        laws.push_back(req.law);
        prev = c;
    }
    ChainImpl impl(std::move(laws), inst_->weight_idle, position_weights(*inst_, order), 0.0,
                   cfg_.max_dim);
    impl.set_base(x);
    SojournChain chain;
    chain.dims = impl.cum;
    chain.alphas = impl.alpha_chain;
    chain.rates = impl.full;
    return chain;
}

struct TourEvaluator::Impl {
    const ExactEvaluator* ev = nullptr;
    const Instance* inst = nullptr;
    std::vector<int> order;
    std::vector<double> means;
    std::vector<double> pos_weights;
    double travel_weighted = 0.0;
    bool deterministic = false;
    std::vector<double> det_base_x;    // base schedule for the degenerate path
    std::unique_ptr<ChainImpl> chain;  // null when deterministic

    void lindley_deterministic(std::span<const double> x, std::vector<double>& idle,
                               std::vector<double>& wait) const {
        const int n = static_cast<int>(order.size());
        idle.assign(n, 0.0);
        wait.assign(n, 0.0);
        double backlog = 0.0;  // W_{j-1}
        for (int i = 0; i < n; ++i) {
            const double slack = x[i] - means[i] - backlog;
            idle[i] = std::max(slack, 0.0);
            wait[i] = std::max(-slack, 0.0);
            backlog = wait[i];
        }
    }

    double objective_from(const std::vector<double>& idle, const std::vector<double>& wait) const {
        double cost = travel_weighted;
        for (std::size_t i = 0; i < idle.size(); ++i)
            cost += inst->weight_idle * idle[i] + pos_weights[i] * wait[i];
        return cost;
    }
};

TourEvaluator::TourEvaluator(const ExactEvaluator& ev, std::span<const int> order)
    : impl_(std::make_unique<Impl>()), n_(static_cast<int>(order.size())) {
    impl_->ev = &ev;
    impl_->inst = &ev.instance();
    impl_->order.assign(order.begin(), order.end());
    impl_->pos_weights = position_weights(*impl_->inst, order);
    impl_->travel_weighted =
        impl_->inst->weight_travel * tour_travel_mean(*impl_->inst, order);

    std::vector<const Requirement*> reqs;
    int prev = 0;
    for (int c : impl_->order) {
        reqs.push_back(&ev.requirement(prev, c));
        prev = c;
    }
    impl_->means.resize(n_);
    int det_count = 0;
    for (int i = 0; i < n_; ++i) {
        impl_->means[i] = reqs[i]->mean;
        det_count += reqs[i]->deterministic ? 1 : 0;
    }
    if (det_count == n_) {
        impl_->deterministic = true;
        return;
    }
    if (det_count > 0) {
        for (int i = 0; i < n_; ++i)
            if (reqs[i]->deterministic)
                throw EvalError("evaluate_exact: zero-variance requirement at position " +
                                std::to_string(i + 1) +
                                " cannot join a phase-type chain (mixed deterministic/stochastic "
                                "tour)");
    }
    std::vector<PhaseType> laws;
    laws.reserve(n_);
    for (const Requirement* r : reqs) laws.push_back(r->law);
    impl_->chain = std::make_unique<ChainImpl>(std::move(laws), impl_->inst->weight_idle,
                                               impl_->pos_weights, impl_->travel_weighted,
                                               ev.fit_config().max_dim);
}

TourEvaluator::~TourEvaluator() = default;
TourEvaluator::TourEvaluator(TourEvaluator&&) noexcept = default;
TourEvaluator& TourEvaluator::operator=(TourEvaluator&&) noexcept = default;

bool TourEvaluator::deterministic() const { return impl_->deterministic; }

const std::vector<double>& TourEvaluator::requirement_means() const { return impl_->means; }

namespace {

void check_schedule(std::span<const double> x, int n) {
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("schedule length does not match tour length");
    for (double v : x)
        if (!(v >= 0.0)) throw std::invalid_argument("schedule entries must be nonnegative");
}

}  // namespace

double TourEvaluator::objective(std::span<const double> x) {
    check_schedule(x, n_);
    if (impl_->deterministic) {
        impl_->det_base_x.assign(x.begin(), x.end());
        std::vector<double> idle, wait;
        impl_->lindley_deterministic(x, idle, wait);
        return impl_->objective_from(idle, wait);
    }
    return impl_->chain->set_base(x);
}

double TourEvaluator::perturbed_objective(int pos, double value) const {
    if (!(value >= 0.0)) throw std::invalid_argument("schedule entries must be nonnegative");
    if (impl_->deterministic) {
        if (impl_->det_base_x.empty())
            throw EvalError("perturbed_objective: call objective() first to set a base schedule");
        std::vector<double> x = impl_->det_base_x;
        x[pos] = value;
        std::vector<double> idle, wait;
        impl_->lindley_deterministic(x, idle, wait);
        return impl_->objective_from(idle, wait);
    }
    if (!impl_->chain->has_base)
        throw EvalError("perturbed_objective: call objective() first to set a base schedule");
    return impl_->chain->perturbed(pos, value);
}

Evaluation TourEvaluator::full_evaluation(std::span<const double> x) {
    check_schedule(x, n_);
    Evaluation ev;
    ev.per_client_idle.resize(n_);
    ev.per_client_wait.resize(n_);
    if (impl_->deterministic) {
        impl_->lindley_deterministic(x, ev.per_client_idle, ev.per_client_wait);
    } else {
        impl_->chain->set_base(x);
        ev.per_client_idle = impl_->chain->idle;
        ev.per_client_wait = impl_->chain->wait;
    }
    ev.travel_component = impl_->travel_weighted;
    for (int i = 0; i < n_; ++i) {
        ev.idle_component += impl_->inst->weight_idle * ev.per_client_idle[i];
        ev.wait_component += impl_->pos_weights[i] * ev.per_client_wait[i];
    }
    ev.objective = ev.travel_component + ev.idle_component + ev.wait_component;
    return ev;
}

Evaluation evaluate_exact(const Instance& inst, const Tour& tour, const Schedule& sched,
                          const FitConfig& cfg) {
    ExactEvaluator ev(inst, cfg);
    return ev.evaluate(tour.order(), sched.x);
}

SojournChain build_sojourn_chain(const Instance& inst, const Tour& tour, const Schedule& sched,
                                 const FitConfig& cfg) {
    ExactEvaluator ev(inst, cfg);
    return ev.build_chain(tour.order(), sched.x);
}

SojournChain build_sojourn_chain(std::span<const PhaseType> requirements, std::span<const double> x,
                                 int max_dim) {
    std::vector<PhaseType> laws(requirements.begin(), requirements.end());
    ChainImpl impl(std::move(laws), 0.0, std::vector<double>(requirements.size(), 0.0), 0.0,
                   max_dim);
    check_schedule(x, static_cast<int>(requirements.size()));
    impl.set_base(x);
    SojournChain chain;
    chain.dims = impl.cum;
    chain.alphas = impl.alpha_chain;
    chain.rates = impl.full;
    return chain;
}

Evaluation evaluate_chain(std::span<const PhaseType> requirements, std::span<const double> x,
                          double weight_idle, std::span<const double> weight_wait, int max_dim) {
    std::vector<PhaseType> laws(requirements.begin(), requirements.end());
    std::vector<double> w(weight_wait.begin(), weight_wait.end());
    ChainImpl impl(std::move(laws), weight_idle, std::move(w), 0.0, max_dim);
    check_schedule(x, static_cast<int>(requirements.size()));
    impl.set_base(x);
    Evaluation ev;
    ev.per_client_idle = impl.idle;
    ev.per_client_wait = impl.wait;
    for (std::size_t i = 0; i < impl.idle.size(); ++i) {
        ev.idle_component += weight_idle * impl.idle[i];
        ev.wait_component += weight_wait[i] * impl.wait[i];
    }
    ev.objective = ev.idle_component + ev.wait_component;
    return ev;
}

}  // namespace ras
