#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ras/phasetype.hpp"

namespace ras {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class ScvRegime { low, high };

std::string to_string(ScvRegime r);
ScvRegime regime_from_string(const std::string& s);

// Problem data: depot at index 0, clients 1..n. Travel moments are per arc,
// service moments per location (none at the depot). Times are abstract
// minutes.
struct Instance {
    int n = 0;
    std::vector<Point> coords;               // n+1 points, [0] = depot
    std::vector<std::vector<double>> travel_mean;  // (n+1) x (n+1)
    std::vector<std::vector<double>> travel_scv;   // (n+1) x (n+1)
    std::vector<double> service_mean;        // n+1, [0] = 0
    std::vector<double> service_scv;         // n+1, [0] unused
    double weight_travel = 1.0;
    double weight_idle = 2.5;
    std::vector<double> weight_wait;         // n+1, [0] unused
    bool explicit_travel = false;            // travel_mean overrides coords

    void validate() const;
    // Multiplies travel means by f; variances follow through the fixed scv.
    void scale_travel(double f);
};

// Visit order: a permutation of {1..n}; the depot is implicit at both ends.
class Tour {
  public:
    Tour() = default;
    explicit Tour(std::vector<int> order);

    int size() const { return static_cast<int>(order_.size()); }
    std::span<const int> order() const { return order_; }
    const std::vector<int>& vec() const { return order_; }
    int operator[](int pos) const { return order_[pos]; }

    Tour reversed() const;

  private:
    std::vector<int> order_;
};

struct Schedule {
    std::vector<double> x;  // inter-appointment times, one per visited client
};

// Uniform clients on [0,50]^2 with the depot at the origin, Euclidean travel
// means with scv 0.15, service means U(30,60), service scvs per regime,
// waiting weights U(1,10), idle weight 2.5. The same seed shares
// coordinates, service means and waiting weights across the two regimes;
// only the service scvs are redrawn.
Instance generate_instance(int n, ScvRegime regime, double weight_travel, std::uint64_t seed);

// Moments of the combined requirement: travel from -> to plus the service
// performed at `from` before departing (zero when leaving the depot).
// Travel and service are independent, so means and variances add.
MomentPair service_requirement(const Instance& inst, int from, int to);

double requirement_mean(const Instance& inst, int from, int to);
double requirement_variance(const Instance& inst, int from, int to);

// Sum of expected travel times along the closed tour (n+1 legs, including
// the return to the depot).
double tour_travel_mean(const Instance& inst, std::span<const int> order);

}  // namespace ras
