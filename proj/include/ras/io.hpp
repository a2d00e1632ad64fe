#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ras/instance.hpp"

namespace ras {

// On-disk solution record. Optional LNS parameters are left at their
// sentinel values for the other algorithms.
struct SolutionRecord {
    std::vector<int> tour;
    std::vector<double> x;
    double objective = 0.0;
    std::string objective_kind;  // "hybrid" or "exact-optimized"
    double travel_comp = 0.0;
    double idle_comp = 0.0;
    double wait_comp = 0.0;
    std::string algorithm;
    std::uint64_t seed = 0;
    double beta = 0.5;
    std::string budget;
    int max_removed = -1;
    double accept_fraction = -1.0;
    std::string accept_variant;
};

struct ManifestEntry {
    std::string id;
    std::string path;
    int n = 0;
    std::string regime;
    double omega_t = 1.0;
    std::uint64_t seed = 0;
};

struct Manifest {
    std::uint64_t top_seed = 0;
    std::vector<ManifestEntry> entries;
};

// Instance files are strict: versioned, unknown fields rejected, missing
// fields reported by name. travel_mean is optional; when present it
// overrides the coordinate-derived distances verbatim. travel_scale is a
// load-time transform applied to the travel means only.
Instance load_instance(const std::string& path, double travel_scale = 1.0);
void save_instance(const Instance& inst, const std::string& path);
Instance instance_from_json_text(const std::string& text, double travel_scale = 1.0);
std::string instance_to_json_text(const Instance& inst);

SolutionRecord load_solution(const std::string& path);
void save_solution(const SolutionRecord& sol, const std::string& path);

Manifest load_manifest(const std::string& path);
void save_manifest(const Manifest& m, const std::string& path);

}  // namespace ras
