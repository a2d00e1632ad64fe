#pragma once

// Instance builders shared by the tests.

#include <vector>

#include "ras/instance.hpp"

namespace ras::test {

// Instance whose combined requirement into client j has the prescribed
// moments regardless of the predecessor: the travel matrix column j carries
// (mean_j, scv_j) and all service times are zero. The return leg to the
// depot costs nothing.
inline Instance arc_moment_instance(const std::vector<double>& means,
                                    const std::vector<double>& scvs, double weight_travel,
                                    double weight_idle, const std::vector<double>& weight_wait) {
    const int n = static_cast<int>(means.size());
    Instance inst;
    inst.n = n;
    inst.explicit_travel = true;
    inst.coords.assign(n + 1, Point{});
    inst.travel_mean.assign(n + 1, std::vector<double>(n + 1, 0.0));
    inst.travel_scv.assign(n + 1, std::vector<double>(n + 1, 0.0));
    for (int from = 0; from <= n; ++from) {
        for (int to = 1; to <= n; ++to) {
            if (from == to) continue;
            inst.travel_mean[from][to] = means[to - 1];
            inst.travel_scv[from][to] = scvs[to - 1];
        }
    }
    inst.service_mean.assign(n + 1, 0.0);
    inst.service_scv.assign(n + 1, 0.0);
    inst.weight_travel = weight_travel;
    inst.weight_idle = weight_idle;
    inst.weight_wait.assign(n + 1, 0.0);
    for (int j = 1; j <= n; ++j) inst.weight_wait[j] = weight_wait[j - 1];
    inst.validate();
    return inst;
}

inline Instance arc_moment_instance(const std::vector<double>& means,
                                    const std::vector<double>& scvs, double weight_travel,
                                    double weight_idle, double weight_wait_all) {
    return arc_moment_instance(means, scvs, weight_travel, weight_idle,
                               std::vector<double>(means.size(), weight_wait_all));
}

// Zero travel times; appointment costs come from the service moments only.
inline Instance service_only_instance(const std::vector<double>& service_means,
                                      const std::vector<double>& service_scvs, double weight_idle,
                                      const std::vector<double>& weight_wait) {
    const int n = static_cast<int>(service_means.size());
    Instance inst;
    inst.n = n;
    inst.explicit_travel = true;
    inst.coords.assign(n + 1, Point{});
    inst.travel_mean.assign(n + 1, std::vector<double>(n + 1, 0.0));
    inst.travel_scv.assign(n + 1, std::vector<double>(n + 1, 0.0));
    inst.service_mean.assign(n + 1, 0.0);
    inst.service_scv.assign(n + 1, 0.0);
    for (int j = 1; j <= n; ++j) {
        inst.service_mean[j] = service_means[j - 1];
        inst.service_scv[j] = service_scvs[j - 1];
    }
    inst.weight_travel = 1.0;
    inst.weight_idle = weight_idle;
    inst.weight_wait.assign(n + 1, 0.0);
    for (int j = 1; j <= n; ++j) inst.weight_wait[j] = weight_wait[j - 1];
    inst.validate();
    return inst;
}

}  // namespace ras::test
