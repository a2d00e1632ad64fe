#include "ras/instance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ras/errors.hpp"
#include "ras/rng.hpp"

namespace ras {

std::string to_string(ScvRegime r) { return r == ScvRegime::low ? "low" : "high"; }

ScvRegime regime_from_string(const std::string& s) {
    if (s == "low") return ScvRegime::low;
    if (s == "high") return ScvRegime::high;
    throw std::invalid_argument("unknown scv regime: " + s);
}

void Instance::validate() const {
    const std::size_t m = static_cast<std::size_t>(n) + 1;
    if (n < 1) throw std::invalid_argument("Instance: needs at least one client");
    if (coords.size() != m || travel_mean.size() != m || travel_scv.size() != m ||
        service_mean.size() != m || service_scv.size() != m || weight_wait.size() != m)
        throw std::invalid_argument("Instance: inconsistent field sizes");
    for (const auto& row : travel_mean)
        if (row.size() != m) throw std::invalid_argument("Instance: ragged travel_mean");
    for (const auto& row : travel_scv)
        if (row.size() != m) throw std::invalid_argument("Instance: ragged travel_scv");
    for (std::size_t i = 0; i < m; ++i) {
        if (travel_mean[i][i] != 0.0)
            throw std::invalid_argument("Instance: nonzero travel_mean diagonal");
        for (std::size_t j = 0; j < m; ++j) {
            if (travel_mean[i][j] < 0.0) throw std::invalid_argument("Instance: negative travel mean");
            if (i != j && travel_scv[i][j] < 0.0)
                throw std::invalid_argument("Instance: negative travel scv");
        }
    }
    if (service_mean[0] != 0.0) throw std::invalid_argument("Instance: depot service must be 0");
    for (std::size_t i = 1; i < m; ++i) {
        if (service_mean[i] < 0.0) throw std::invalid_argument("Instance: negative service mean");
        if (service_mean[i] > 0.0 && service_scv[i] < 0.0)
            throw std::invalid_argument("Instance: negative service scv");
        if (weight_wait[i] < 0.0) throw std::invalid_argument("Instance: negative waiting weight");
    }
    if (weight_travel < 0.0 || weight_idle < 0.0)
        throw std::invalid_argument("Instance: negative weight");
}

void Instance::scale_travel(double f) {
    if (!(f > 0.0)) throw std::invalid_argument("scale_travel: factor must be positive");
    for (auto& row : travel_mean)
        for (double& v : row) v *= f;
}

Tour::Tour(std::vector<int> order) : order_(std::move(order)) {
    std::vector<char> seen(order_.size() + 1, 0);
    for (int c : order_) {
        if (c < 1 || c > static_cast<int>(order_.size()) || seen[c])
            throw std::invalid_argument("Tour: order is not a permutation of 1..n");
        seen[c] = 1;
    }
}

Tour Tour::reversed() const {
    std::vector<int> r(order_.rbegin(), order_.rend());
    return Tour(std::move(r));
}

namespace {
constexpr std::uint64_t kStreamBase = 101;
constexpr std::uint64_t kStreamScvLow = 102;
constexpr std::uint64_t kStreamScvHigh = 103;
}  // namespace

Instance generate_instance(int n, ScvRegime regime, double weight_travel, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate_instance: n must be at least 1");
    const std::size_t m = static_cast<std::size_t>(n) + 1;
    Instance inst;
    inst.n = n;
    inst.weight_travel = weight_travel;
    inst.weight_idle = 2.5;
    inst.coords.assign(m, Point{});
    inst.service_mean.assign(m, 0.0);
    inst.service_scv.assign(m, 0.0);
    inst.weight_wait.assign(m, 0.0);

    Rng base(derive_seed(seed, kStreamBase));
    for (std::size_t i = 1; i < m; ++i) {
        inst.coords[i].x = base.uniform(0.0, 50.0);
        inst.coords[i].y = base.uniform(0.0, 50.0);
    }
    for (std::size_t i = 1; i < m; ++i) inst.service_mean[i] = base.uniform(30.0, 60.0);
    for (std::size_t i = 1; i < m; ++i) inst.weight_wait[i] = base.uniform(1.0, 10.0);

    Rng scv_rng(derive_seed(seed, regime == ScvRegime::low ? kStreamScvLow : kStreamScvHigh));
    const double lo = regime == ScvRegime::low ? 0.15 : 0.5;
    const double hi = regime == ScvRegime::low ? 0.5 : 1.5;
    for (std::size_t i = 1; i < m; ++i) inst.service_scv[i] = scv_rng.uniform(lo, hi);

    inst.travel_mean.assign(m, std::vector<double>(m, 0.0));
    inst.travel_scv.assign(m, std::vector<double>(m, 0.15));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            const double dx = inst.coords[i].x - inst.coords[j].x;
            const double dy = inst.coords[i].y - inst.coords[j].y;
            inst.travel_mean[i][j] = std::hypot(dx, dy);
        }
    }
    inst.validate();
    return inst;
}

MomentPair service_requirement(const Instance& inst, int from, int to) {
    if (from == to) throw std::invalid_argument("service_requirement: from == to");
    const int m = inst.n + 1;
    if (from < 0 || from >= m || to < 0 || to >= m)
        throw std::invalid_argument("service_requirement: location index out of range");
    const double mean = requirement_mean(inst, from, to);
    const double var = requirement_variance(inst, from, to);
    return {mean, var / (mean * mean)};
}

double requirement_mean(const Instance& inst, int from, int to) {
    return inst.travel_mean[from][to] + inst.service_mean[from];
}

double requirement_variance(const Instance& inst, int from, int to) {
    const double tm = inst.travel_mean[from][to];
    const double sm = inst.service_mean[from];
    return inst.travel_scv[from][to] * tm * tm + inst.service_scv[from] * sm * sm;
}

double tour_travel_mean(const Instance& inst, std::span<const int> order) {
    double sum = 0.0;
    int prev = 0;
    for (int c : order) {
        sum += inst.travel_mean[prev][c];
        prev = c;
    }
    sum += inst.travel_mean[prev][0];
    return sum;
}

}  // namespace ras
