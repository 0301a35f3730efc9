#include "cli/config.hpp"

#include "galpha/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

namespace galpha::cli {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw ConfigError("config key '" + key + "': " + what);
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            throw ConfigError("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
        }
    }
}

double get_real(const json& v, const std::string& key) {
    if (!v.is_number()) fail(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
}

int get_int(const json& v, const std::string& key) {
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<int>();
}

std::string get_string(const json& v, const std::string& key) {
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
}

bool get_bool(const json& v, const std::string& key) {
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
}

std::vector<double> get_reals(const json& v, const std::string& key) {
    std::vector<double> out;
    if (v.is_number()) {
        out.push_back(get_real(v, key));
        return out;
    }
    if (!v.is_array()) fail(key, "expected a number or a list of numbers");
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_real(v[i], key + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<int> get_ints(const json& v, const std::string& key) {
    std::vector<int> out;
    if (v.is_number_integer()) {
        out.push_back(get_int(v, key));
        return out;
    }
    if (!v.is_array()) fail(key, "expected an integer or a list of integers");
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_int(v[i], key + "[" + std::to_string(i) + "]"));
    return out;
}

template <typename T>
std::array<T, 2> get_pair(const json& v, const std::string& key) {
    if (!v.is_array() || v.size() != 2) fail(key, "expected a list of two values");
    if constexpr (std::is_same_v<T, int>) {
        return {get_int(v[0], key), get_int(v[1], key)};
    } else {
        return {get_real(v[0], key), get_real(v[1], key)};
    }
}

Sweep get_sweep(const json& v, const std::string& key, Sweep s) {
    check_keys(v, key, {"tau0", "halvings"});
    if (v.contains("tau0")) s.tau0 = get_real(v["tau0"], key + ".tau0");
    if (v.contains("halvings")) s.halvings = get_int(v["halvings"], key + ".halvings");
    if (!(s.tau0 > 0)) fail(key + ".tau0", "must be positive");
    if (s.halvings < 1) fail(key + ".halvings", "must be at least 1");
    return s;
}

ProblemSpec get_problem(const json& v) {
    check_keys(v, "problem", {"type", "lambda", "u0", "elements", "kappa", "case", "max_forcing_order"});
    ProblemSpec p;
    if (v.contains("type")) p.type = get_string(v["type"], "problem.type");
    if (p.type != "scalar" && p.type != "heat") fail("problem.type", "expected 'scalar' or 'heat'");
    if (v.contains("lambda")) p.lambda = get_real(v["lambda"], "problem.lambda");
    if (v.contains("u0")) p.u0 = get_real(v["u0"], "problem.u0");
    if (v.contains("elements")) p.elements = get_int(v["elements"], "problem.elements");
    if (v.contains("kappa")) p.kappa = get_real(v["kappa"], "problem.kappa");
    if (v.contains("case")) p.manufactured = get_string(v["case"], "problem.case");
    if (v.contains("max_forcing_order")) {
        p.max_forcing_order = get_int(v["max_forcing_order"], "problem.max_forcing_order");
        if (*p.max_forcing_order < 0) fail("problem.max_forcing_order", "must be non-negative");
    }
    if (p.lambda < 0) fail("problem.lambda", "must be non-negative");
    if (p.elements < 2) fail("problem.elements", "need at least 2 elements");
    if (!(p.kappa > 0)) fail("problem.kappa", "must be positive");
    return p;
}

} // namespace

int RunConfig::stages() const {
    if (k) return *k;
    return static_cast<int>(rho.size());
}

MethodParams<double> RunConfig::params(int stages) const {
    if (rho.size() == 1) return params_from_rho(stages, rho[0]);
    if (static_cast<int>(rho.size()) != stages) {
        throw ConfigError("config key 'rho': has " + std::to_string(rho.size()) + " entries but k = " +
                          std::to_string(stages));
    }
    return params_from_rho(RhoSpectrum(rho));
}

double RunConfig::final_time() const {
    if (T) return *T;
    if (tau && steps) return *tau * *steps;
    return 1.0;
}

RunConfig parse_config(const json& j) {
    check_keys(j, "",
               {"command", "k", "rho", "ks", "theta_grid", "theta", "re_range", "im_range", "resolution", "problem",
                "tau", "steps", "T", "sweep", "reference", "precision", "dofs", "every", "recurrence",
                "global_sweep", "perturb_gamma", "out", "svg"});
    RunConfig c;
    if (j.contains("command")) c.command = get_string(j["command"], "command");
    if (j.contains("k")) c.k = get_int(j["k"], "k");
    if (j.contains("rho")) c.rho = get_reals(j["rho"], "rho");
    if (j.contains("ks")) c.ks = get_ints(j["ks"], "ks");
    if (j.contains("theta_grid")) {
        const auto& g = j["theta_grid"];
        check_keys(g, "theta_grid", {"min", "max", "points"});
        if (g.contains("min")) c.theta_min = get_real(g["min"], "theta_grid.min");
        if (g.contains("max")) c.theta_max = get_real(g["max"], "theta_grid.max");
        if (g.contains("points")) c.theta_points = get_int(g["points"], "theta_grid.points");
    }
    if (j.contains("theta")) {
        if (!j["theta"].is_array()) fail("theta", "expected a list of numbers");
        c.theta = get_reals(j["theta"], "theta");
        if (c.theta.empty()) fail("theta", "theta list is empty");
    }
    if (j.contains("re_range")) c.re_range = get_pair<double>(j["re_range"], "re_range");
    if (j.contains("im_range")) c.im_range = get_pair<double>(j["im_range"], "im_range");
    if (j.contains("resolution")) c.resolution = get_pair<int>(j["resolution"], "resolution");
    if (j.contains("problem")) c.problem = get_problem(j["problem"]);
    if (j.contains("tau")) c.tau = get_real(j["tau"], "tau");
    if (j.contains("steps")) c.steps = get_int(j["steps"], "steps");
    if (j.contains("T")) c.T = get_real(j["T"], "T");
    if (j.contains("sweep")) c.sweep = get_sweep(j["sweep"], "sweep", c.sweep);
    if (j.contains("reference")) c.reference = get_string(j["reference"], "reference");
    if (j.contains("precision")) c.precision = get_string(j["precision"], "precision");
    if (j.contains("dofs")) c.dofs = get_ints(j["dofs"], "dofs");
    if (j.contains("every")) c.every = get_int(j["every"], "every");
    if (j.contains("recurrence")) {
        const auto& r = j["recurrence"];
        check_keys(r, "recurrence", {"tau0", "halvings", "lambda"});
        json sweep = json::object();
        if (r.contains("tau0")) sweep["tau0"] = r["tau0"];
        if (r.contains("halvings")) sweep["halvings"] = r["halvings"];
        c.recurrence = get_sweep(sweep, "recurrence", c.recurrence);
        if (r.contains("lambda")) c.recurrence_lambda = get_real(r["lambda"], "recurrence.lambda");
        if (!(c.recurrence_lambda > 0)) fail("recurrence.lambda", "must be positive");
    }
    if (j.contains("global_sweep")) c.global = get_sweep(j["global_sweep"], "global_sweep", c.global);
    if (j.contains("perturb_gamma")) {
        const auto& g = j["perturb_gamma"];
        check_keys(g, "perturb_gamma", {"stage", "delta"});
        PerturbGamma pg;
        if (g.contains("stage")) pg.stage = get_int(g["stage"], "perturb_gamma.stage");
        if (g.contains("delta")) pg.delta = get_real(g["delta"], "perturb_gamma.delta");
        c.perturb_gamma = pg;
    }
    if (j.contains("out")) c.out = get_string(j["out"], "out");
    if (j.contains("svg")) c.svg = get_bool(j["svg"], "svg");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    json j;
    try {
        j = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

void validate(const RunConfig& c) {
    if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
        throw ConfigError("unknown command '" + c.command +
                          "' (expected spectrum, stability-map, converge, order-check or solve)");
    }
    if (c.rho.empty()) fail("rho", "must not be empty");
    RhoSpectrum checked(c.rho);  // range check, names the offending entry
    (void)checked;
    if (c.k && *c.k < 1) fail("k", "must be at least 1");
    if (c.k && c.rho.size() != 1 && static_cast<int>(c.rho.size()) != *c.k) {
        fail("rho", "has " + std::to_string(c.rho.size()) + " entries but k = " + std::to_string(*c.k));
    }
    if (c.precision != "double" && c.precision != "long-double") {
        fail("precision", "expected 'double' or 'long-double'");
    }
    if (c.svg && c.out.empty()) fail("svg", "SVG output needs an output path (--out)");

    if (c.command == "spectrum") {
        if (c.theta.empty() && c.theta_points < 1) fail("theta_grid.points", "theta grid is empty");
        if (c.theta.empty() && !(c.theta_min > 0 && c.theta_max >= c.theta_min)) {
            fail("theta_grid", "need 0 < min <= max");
        }
    }
    if (c.command == "converge") {
        if (c.sweep.halvings < 4) fail("sweep.halvings", "a convergence study needs at least 4 halvings");
        if (c.reference != "semidiscrete" && c.reference != "exact") {
            fail("reference", "expected 'semidiscrete' or 'exact'");
        }
        if (c.T && !(*c.T > 0)) fail("T", "must be positive");
    }
    if (c.command == "order-check") {
        for (int k : c.ks) {
            if (k < 1) fail("ks", "stage counts must be at least 1");
        }
        if (!c.ks.empty() && c.rho.size() != 1) fail("rho", "must be a single value when 'ks' lists several k");
        if (c.perturb_gamma) {
            const int kmax = c.ks.empty() ? c.stages() : *std::max_element(c.ks.begin(), c.ks.end());
            if (c.perturb_gamma->stage < 1 || c.perturb_gamma->stage > std::max(1, kmax)) {
                fail("perturb_gamma.stage", "must name an existing stage (one-based)");
            }
        }
    }
    if (c.command == "solve") {
        const int given = int(bool(c.tau)) + int(bool(c.steps)) + int(bool(c.T));
        if (given < 2) fail("tau", "solve needs two of 'tau', 'steps' and 'T'");
        if (c.tau && !(*c.tau > 0)) fail("tau", "must be positive");
        if (c.T && !(*c.T > 0)) fail("T", "must be positive");
        if (c.steps && *c.steps < 0) fail("steps", "must be non-negative");
        if (c.every < 1) fail("every", "must be at least 1");
    }
}

} // namespace galpha::cli
