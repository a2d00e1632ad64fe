#include "ras/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ras/errors.hpp"

namespace ras {

namespace {

using nlohmann::json;

json parse_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ParseError(std::string(what) + ": cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string(what) + " " + path + ": " + e.what());
    }
    return j;
}

void write_file(const json& j, const std::string& path, const char* what) {
    std::ofstream out(path);
    if (!out) throw ParseError(std::string(what) + ": cannot write " + path);
    out << j.dump(2) << '\n';
}

const json& require(const json& j, const char* field, const char* what) {
    auto it = j.find(field);
    if (it == j.end()) throw ParseError(std::string(what) + ": missing field '" + field + "'");
    return *it;
}

void reject_unknown(const json& j, const std::set<std::string>& known, const char* what) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw ParseError(std::string(what) + ": unknown field '" + it.key() + "'");
}

std::vector<std::vector<double>> read_matrix(const json& j, int m, const char* field,
                                             const char* what) {
    if (!j.is_array() || static_cast<int>(j.size()) != m * m)
        throw ParseError(std::string(what) + ": field '" + field + "' must be a row-major array of " +
                         std::to_string(m * m) + " numbers");
    std::vector<std::vector<double>> mat(m, std::vector<double>(m, 0.0));
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) mat[i][k] = j[static_cast<std::size_t>(i) * m + k].get<double>();
    return mat;
}

json matrix_to_json(const std::vector<std::vector<double>>& mat) {
    json a = json::array();
    for (const auto& row : mat)
        for (double v : row) a.push_back(v);
    return a;
}

Instance instance_from_json(const json& j, double travel_scale, const char* what) {
    reject_unknown(j,
                   {"version", "n", "depot", "coords", "travel_mean", "travel_scv", "service_mean",
                    "service_scv", "weight_travel", "weight_idle", "weight_wait"},
                   what);
    const int version = require(j, "version", what).get<int>();
    if (version != 1) throw ParseError(std::string(what) + ": unsupported version");
    Instance inst;
    inst.n = require(j, "n", what).get<int>();
    const int m = inst.n + 1;

    const json& depot = require(j, "depot", what);
    const json& coords = require(j, "coords", what);
    if (!coords.is_array() || static_cast<int>(coords.size()) != inst.n)
        throw ParseError(std::string(what) + ": field 'coords' must list the n client points");
    inst.coords.resize(m);
    inst.coords[0] = {depot.at(0).get<double>(), depot.at(1).get<double>()};
    for (int i = 0; i < inst.n; ++i)
        inst.coords[i + 1] = {coords[i].at(0).get<double>(), coords[i].at(1).get<double>()};

    inst.travel_scv = read_matrix(require(j, "travel_scv", what), m, "travel_scv", what);
    if (j.contains("travel_mean")) {
        inst.travel_mean = read_matrix(j["travel_mean"], m, "travel_mean", what);
        inst.explicit_travel = true;
    } else {
        inst.travel_mean.assign(m, std::vector<double>(m, 0.0));
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                if (a != b)
                    inst.travel_mean[a][b] = std::hypot(inst.coords[a].x - inst.coords[b].x,
                                                        inst.coords[a].y - inst.coords[b].y);
    }
    inst.service_mean = require(j, "service_mean", what).get<std::vector<double>>();
    inst.service_scv = require(j, "service_scv", what).get<std::vector<double>>();
    inst.weight_travel = require(j, "weight_travel", what).get<double>();
    inst.weight_idle = require(j, "weight_idle", what).get<double>();
    inst.weight_wait = require(j, "weight_wait", what).get<std::vector<double>>();
    try {
        inst.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
    if (travel_scale != 1.0) inst.scale_travel(travel_scale);
    return inst;
}

json instance_to_json(const Instance& inst) {
    json j;
    j["version"] = 1;
    j["n"] = inst.n;
    j["depot"] = {inst.coords[0].x, inst.coords[0].y};
    json coords = json::array();
    for (int i = 1; i <= inst.n; ++i) coords.push_back({inst.coords[i].x, inst.coords[i].y});
    j["coords"] = coords;
    if (inst.explicit_travel) j["travel_mean"] = matrix_to_json(inst.travel_mean);
    j["travel_scv"] = matrix_to_json(inst.travel_scv);
    j["service_mean"] = inst.service_mean;
    j["service_scv"] = inst.service_scv;
    j["weight_travel"] = inst.weight_travel;
    j["weight_idle"] = inst.weight_idle;
    j["weight_wait"] = inst.weight_wait;
    return j;
}

}  // namespace

Instance load_instance(const std::string& path, double travel_scale) {
    return instance_from_json(parse_file(path, "instance file"), travel_scale, "instance file");
}

Instance instance_from_json_text(const std::string& text, double travel_scale) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("instance text: ") + e.what());
    }
    return instance_from_json(j, travel_scale, "instance text");
}

void save_instance(const Instance& inst, const std::string& path) {
    write_file(instance_to_json(inst), path, "instance file");
}

std::string instance_to_json_text(const Instance& inst) {
    return instance_to_json(inst).dump(2) + "\n";
}

SolutionRecord load_solution(const std::string& path) {
    const char* what = "solution file";
    json j = parse_file(path, what);
    reject_unknown(j, {"version", "tour", "x", "objective", "objective_kind", "breakdown", "params"},
                   what);
    if (require(j, "version", what).get<int>() != 1)
        throw ParseError(std::string(what) + ": unsupported version");
    SolutionRecord s;
    s.tour = require(j, "tour", what).get<std::vector<int>>();
    s.x = require(j, "x", what).get<std::vector<double>>();
    s.objective = require(j, "objective", what).get<double>();
    s.objective_kind = require(j, "objective_kind", what).get<std::string>();
    const json& b = require(j, "breakdown", what);
    reject_unknown(b, {"travel_comp", "idle_comp", "wait_comp"}, what);
    s.travel_comp = require(b, "travel_comp", what).get<double>();
    s.idle_comp = require(b, "idle_comp", what).get<double>();
    s.wait_comp = require(b, "wait_comp", what).get<double>();
    const json& p = require(j, "params", what);
    reject_unknown(p,
                   {"algorithm", "seed", "beta", "budget", "max_removed", "accept_fraction",
                    "accept_variant"},
                   what);
    s.algorithm = require(p, "algorithm", what).get<std::string>();
    s.seed = require(p, "seed", what).get<std::uint64_t>();
    s.beta = require(p, "beta", what).get<double>();
    s.budget = require(p, "budget", what).get<std::string>();
    if (p.contains("max_removed")) s.max_removed = p["max_removed"].get<int>();
    if (p.contains("accept_fraction")) s.accept_fraction = p["accept_fraction"].get<double>();
    if (p.contains("accept_variant")) s.accept_variant = p["accept_variant"].get<std::string>();
    return s;
}

void save_solution(const SolutionRecord& s, const std::string& path) {
    json j;
    j["version"] = 1;
    j["tour"] = s.tour;
    j["x"] = s.x;
    j["objective"] = s.objective;
    j["objective_kind"] = s.objective_kind;
    j["breakdown"] = {{"travel_comp", s.travel_comp},
                      {"idle_comp", s.idle_comp},
                      {"wait_comp", s.wait_comp}};
    json p;
    p["algorithm"] = s.algorithm;
    p["seed"] = s.seed;
    p["beta"] = s.beta;
    p["budget"] = s.budget;
    if (s.max_removed >= 0) p["max_removed"] = s.max_removed;
    if (s.accept_fraction >= 0.0) p["accept_fraction"] = s.accept_fraction;
    if (!s.accept_variant.empty()) p["accept_variant"] = s.accept_variant;
    j["params"] = p;
    write_file(j, path, "solution file");
}

Manifest load_manifest(const std::string& path) {
    const char* what = "manifest file";
    json j = parse_file(path, what);
    reject_unknown(j, {"version", "top_seed", "entries"}, what);
    if (require(j, "version", what).get<int>() != 1)
        throw ParseError(std::string(what) + ": unsupported version");
    Manifest m;
    m.top_seed = require(j, "top_seed", what).get<std::uint64_t>();
    for (const json& e : require(j, "entries", what)) {
        reject_unknown(e, {"id", "path", "n", "regime", "omega_t", "seed"}, what);
        ManifestEntry me;
        me.id = require(e, "id", what).get<std::string>();
        me.path = require(e, "path", what).get<std::string>();
        me.n = require(e, "n", what).get<int>();
        me.regime = require(e, "regime", what).get<std::string>();
        me.omega_t = require(e, "omega_t", what).get<double>();
        me.seed = require(e, "seed", what).get<std::uint64_t>();
        m.entries.push_back(std::move(me));
    }
    return m;
}

void save_manifest(const Manifest& m, const std::string& path) {
    json j;
    j["version"] = 1;
    j["top_seed"] = m.top_seed;
    json entries = json::array();
    for (const auto& e : m.entries) {
        json je;
        je["id"] = e.id;
        je["path"] = e.path;
        je["n"] = e.n;
        je["regime"] = e.regime;
        je["omega_t"] = e.omega_t;
        je["seed"] = e.seed;
        entries.push_back(je);
    }
    j["entries"] = entries;
    write_file(j, path, "manifest file");
}

}  // namespace ras
