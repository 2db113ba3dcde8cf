#pragma once

#include "diad/common.hpp"
#include "diad/metric.hpp"
#include "diad/models.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace diad {

using Json = nlohmann::json;

struct TfGridSpec {
    double min = 0.0;
    double max = 0.0;
    int count = 0;
    enum class Spacing { Linear, Log } spacing = Spacing::Log;

    std::vector<double> values() const {
        std::vector<double> v;
        v.reserve(count);
        if (count == 1) {
            v.push_back(min);
            return v;
        }
        for (int i = 0; i < count; ++i) {
            const double u = static_cast<double>(i) / (count - 1);
            v.push_back(spacing == Spacing::Log ? min * std::pow(max / min, u)
                                                : min + u * (max - min));
        }
        return v;
    }
};

struct PulseConfig {
    int grid_points = 2048;
    std::optional<double> t_f;
    std::optional<TfGridSpec> t_f_grid;
    int repeats = 100;  // bench only

    /// The pulse-time list a sweep iterates over.
    std::vector<double> t_f_values() const {
        if (t_f_grid) return t_f_grid->values();
        if (t_f) return {*t_f};
        throw ConfigError("pulse: t_f or t_f_grid required for this command");
    }

    double single_t_f() const {
        if (!t_f) throw ConfigError("pulse: t_f required for this command");
        return *t_f;
    }
};

struct DiadSection {
    DiadExponents exponents;
    std::vector<std::pair<int, int>> diabatic_pairs;

    TransitionMatrix transition_matrix(int dimension) const {
        return TransitionMatrix::with_pairs(dimension, diabatic_pairs);
    }
};

struct EvolutionConfig {
    int steps = 0;  // 0 = automatic step policy
    int initial = 0;
    int target = 0;
    bool populations = false;
};

enum class OptimizeMethod { GridSweep, NelderMead, RandomSearch };

struct OptimizeConfig {
    OptimizeMethod method = OptimizeMethod::NelderMead;
    std::vector<std::string> axes;
    std::map<std::string, std::array<double, 2>> bounds;
    int budget = 100;
    std::uint64_t seed = 0;
    int resolution = 7;
    std::optional<std::vector<double>> initial;
};

struct RunConfig {
    ModelSpec model;
    DiadSection diad;
    PulseConfig pulse;
    EvolutionConfig evolution;
    std::optional<OptimizeConfig> optimize;
    std::optional<std::string> output;
};

namespace detail {

inline void require_keys(const Json& obj, const std::string& section,
                         const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(section + ": unknown key '" + it.key() + "'");
}

inline double number_at(const Json& obj, const std::string& section, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError(section + ": missing key '" + key + "'");
    if (!obj[key].is_number()) throw ConfigError(section + ": key '" + key + "' must be a number");
    return obj[key].get<double>();
}

inline double number_or(const Json& obj, const std::string& section, const std::string& key,
                        double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError(section + ": key '" + key + "' must be a number");
    return obj[key].get<double>();
}

inline int integer_or(const Json& obj, const std::string& section, const std::string& key,
                      int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer())
        throw ConfigError(section + ": key '" + key + "' must be an integer");
    return obj[key].get<int>();
}

inline ModelSpec parse_model(const Json& obj) {
    if (!obj.is_object()) throw ConfigError("model: section must be an object");
    if (!obj.contains("variant")) throw ConfigError("model: missing key 'variant'");
    const std::string variant = obj["variant"].get<std::string>();

    ModelSpec model;
    if (variant == "landau_zener") {
        require_keys(obj, "model", {"variant", "control_range", "x"});
        LandauZener m;
        m.x = number_at(obj, "model", "x");
        model.family = m;
    } else if (variant == "dqd_init") {
        require_keys(obj, "model", {"variant", "control_range", "t_c", "u_tilde", "e_z", "de_z", "de_x"});
        DqdInit m;
        m.t_c = number_at(obj, "model", "t_c");
        m.u_tilde = number_at(obj, "model", "u_tilde");
        m.e_z = number_at(obj, "model", "e_z");
        m.de_z = number_at(obj, "model", "de_z");
        m.de_x = number_at(obj, "model", "de_x");
        model.family = m;
    } else if (variant == "bucket_brigade") {
        require_keys(obj, "model",
                     {"variant", "control_range", "t_c", "delta_l", "delta_r", "phi_l", "phi_r"});
        BucketBrigade m;
        m.t_c = number_at(obj, "model", "t_c");
        m.delta_l = number_at(obj, "model", "delta_l");
        m.delta_r = number_at(obj, "model", "delta_r");
        m.phi_l = number_at(obj, "model", "phi_l");
        m.phi_r = number_at(obj, "model", "phi_r");
        model.family = m;
    } else {
        throw ConfigError("model: unknown variant '" + variant + "'");
    }

    if (!obj.contains("control_range") || !obj["control_range"].is_array() ||
        obj["control_range"].size() != 2)
        throw ConfigError("model: control_range must be an array [start, end]");
    model.control_start = obj["control_range"][0].get<double>();
    model.control_end = obj["control_range"][1].get<double>();
    model.validate();
    return model;
}

inline DiadSection parse_diad(const Json& obj, int dimension) {
    if (!obj.is_object()) throw ConfigError("diad: section must be an object");
    require_keys(obj, "diad", {"alpha", "beta", "alpha_hat", "beta_hat", "diabatic_pairs"});
    DiadSection diad;
    diad.exponents.alpha = number_or(obj, "diad", "alpha", 2.0);
    diad.exponents.beta = number_or(obj, "diad", "beta", 2.0);
    diad.exponents.alpha_hat = number_or(obj, "diad", "alpha_hat", 0.0);
    diad.exponents.beta_hat = number_or(obj, "diad", "beta_hat", 0.0);
    diad.exponents.validate();
    if (obj.contains("diabatic_pairs")) {
        if (!obj["diabatic_pairs"].is_array())
            throw ConfigError("diad: diabatic_pairs must be an array of [m, n] pairs");
        for (const auto& p : obj["diabatic_pairs"]) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() ||
                !p[1].is_number_integer())
                throw ConfigError("diad: diabatic_pairs entries must be [m, n] index pairs");
            const int m = p[0].get<int>();
            const int n = p[1].get<int>();
            if (m < 0 || n < 0 || m >= dimension || n >= dimension)
                throw ConfigError("diad: diabatic pair index out of range for the model");
            if (m == n) throw ConfigError("diad: diabatic pair indices must differ");
            diad.diabatic_pairs.emplace_back(m, n);
        }
    }
    return diad;
}

inline PulseConfig parse_pulse(const Json& obj) {
    if (!obj.is_object()) throw ConfigError("pulse: section must be an object");
    require_keys(obj, "pulse", {"grid_points", "t_f", "t_f_grid", "repeats"});
    PulseConfig pulse;
    pulse.grid_points = integer_or(obj, "pulse", "grid_points", 2048);
    if (pulse.grid_points < 64) throw ConfigError("pulse: grid_points must be at least 64");
    pulse.repeats = integer_or(obj, "pulse", "repeats", 100);
    if (pulse.repeats < 3) throw ConfigError("pulse: repeats must be at least 3");
    if (obj.contains("t_f")) {
        pulse.t_f = number_at(obj, "pulse", "t_f");
        if (!(*pulse.t_f > 0.0)) throw ConfigError("pulse: t_f must be positive");
    }
    if (obj.contains("t_f_grid")) {
        const Json& g = obj["t_f_grid"];
        if (!g.is_object()) throw ConfigError("pulse: t_f_grid must be an object");
        require_keys(g, "pulse.t_f_grid", {"min", "max", "count", "spacing"});
        TfGridSpec grid;
        grid.min = number_at(g, "pulse.t_f_grid", "min");
        grid.max = number_at(g, "pulse.t_f_grid", "max");
        grid.count = integer_or(g, "pulse.t_f_grid", "count", 20);
        const std::string spacing = g.contains("spacing") ? g["spacing"].get<std::string>() : "log";
        if (spacing == "log")
            grid.spacing = TfGridSpec::Spacing::Log;
        else if (spacing == "linear")
            grid.spacing = TfGridSpec::Spacing::Linear;
        else
            throw ConfigError("pulse.t_f_grid: spacing must be 'linear' or 'log'");
        if (grid.count < 1) throw ConfigError("pulse.t_f_grid: count must be at least 1");
        if (!(grid.min < grid.max) && grid.count > 1)
            throw ConfigError("pulse.t_f_grid: min must be below max");
        if (grid.spacing == TfGridSpec::Spacing::Log && !(grid.min > 0.0))
            throw ConfigError("pulse.t_f_grid: log spacing requires positive min");
        pulse.t_f_grid = grid;
    }
    return pulse;
}

inline EvolutionConfig parse_evolution(const Json& obj, int dimension) {
    if (!obj.is_object()) throw ConfigError("evolution: section must be an object");
    require_keys(obj, "evolution", {"steps", "initial", "target", "populations"});
    EvolutionConfig evo;
    evo.steps = integer_or(obj, "evolution", "steps", 0);
    if (evo.steps < 0) throw ConfigError("evolution: steps must be nonnegative");
    evo.initial = integer_or(obj, "evolution", "initial", 0);
    evo.target = integer_or(obj, "evolution", "target", 0);
    if (evo.initial < 0 || evo.initial >= dimension || evo.target < 0 || evo.target >= dimension)
        throw ConfigError("evolution: level index out of range for the model");
    if (obj.contains("populations")) {
        if (!obj["populations"].is_boolean())
            throw ConfigError("evolution: populations must be a boolean");
        evo.populations = obj["populations"].get<bool>();
    }
    return evo;
}

inline OptimizeConfig parse_optimize(const Json& obj) {
    if (!obj.is_object()) throw ConfigError("optimize: section must be an object");
    require_keys(obj, "optimize",
                 {"method", "axes", "bounds", "budget", "seed", "resolution", "initial"});
    OptimizeConfig opt;
    const std::string method =
        obj.contains("method") ? obj["method"].get<std::string>() : "nelder_mead";
    if (method == "grid_sweep")
        opt.method = OptimizeMethod::GridSweep;
    else if (method == "nelder_mead")
        opt.method = OptimizeMethod::NelderMead;
    else if (method == "random_search")
        opt.method = OptimizeMethod::RandomSearch;
    else
        throw ConfigError("optimize: unknown method '" + method + "'");

    static const std::set<std::string> known_axes = {"alpha", "beta", "alpha_hat", "beta_hat"};
    if (!obj.contains("axes") || !obj["axes"].is_array() || obj["axes"].empty())
        throw ConfigError("optimize: axes must name at least one exponent");
    for (const auto& a : obj["axes"]) {
        const std::string name = a.get<std::string>();
        if (!known_axes.count(name)) throw ConfigError("optimize: unknown axis '" + name + "'");
        for (const auto& seen : opt.axes)
            if (seen == name) throw ConfigError("optimize: duplicate axis '" + name + "'");
        opt.axes.push_back(name);
    }

    if (!obj.contains("bounds") || !obj["bounds"].is_object())
        throw ConfigError("optimize: bounds must map each axis to [lower, upper]");
    for (auto it = obj["bounds"].begin(); it != obj["bounds"].end(); ++it) {
        if (!known_axes.count(it.key()))
            throw ConfigError("optimize: bounds for unknown axis '" + it.key() + "'");
        if (!it.value().is_array() || it.value().size() != 2)
            throw ConfigError("optimize: bounds entries must be [lower, upper]");
        opt.bounds[it.key()] = {it.value()[0].get<double>(), it.value()[1].get<double>()};
    }
    for (const auto& axis : opt.axes) {
        auto it = opt.bounds.find(axis);
        if (it == opt.bounds.end()) throw ConfigError("optimize: missing bounds for axis '" + axis + "'");
        if (!(it->second[0] < it->second[1]))
            throw ConfigError("optimize: lower bound must be below upper for axis '" + axis + "'");
    }

    opt.budget = integer_or(obj, "optimize", "budget", 100);
    if (opt.budget < 1) throw ConfigError("optimize: budget must be at least 1");
    opt.resolution = integer_or(obj, "optimize", "resolution", 7);
    if (opt.resolution < 1) throw ConfigError("optimize: resolution must be at least 1");
    if (obj.contains("seed")) {
        if (!obj["seed"].is_number_unsigned() && !obj["seed"].is_number_integer())
            throw ConfigError("optimize: seed must be an unsigned integer");
        opt.seed = obj["seed"].get<std::uint64_t>();
    }
    if (obj.contains("initial")) {
        if (!obj["initial"].is_array())
            throw ConfigError("optimize: initial must be an array matching axes");
        std::vector<double> initial;
        for (const auto& v : obj["initial"]) initial.push_back(v.get<double>());
        if (initial.size() != opt.axes.size())
            throw ConfigError("optimize: initial must have one value per axis");
        opt.initial = initial;
    }
    return opt;
}

}  // namespace detail

inline RunConfig parse_config_json(const Json& root) {
    if (!root.is_object()) throw ConfigError("config: top level must be an object");
    detail::require_keys(root, "config",
                         {"model", "diad", "pulse", "evolution", "optimize", "output"});
    if (!root.contains("model")) throw ConfigError("config: missing 'model' section");

    RunConfig config;
    config.model = detail::parse_model(root["model"]);
    const int d = config.model.dimension();
    if (root.contains("diad")) config.diad = detail::parse_diad(root["diad"], d);
    if (root.contains("pulse")) config.pulse = detail::parse_pulse(root["pulse"]);
    if (root.contains("evolution")) config.evolution = detail::parse_evolution(root["evolution"], d);
    if (root.contains("optimize")) config.optimize = detail::parse_optimize(root["optimize"]);
    if (root.contains("output")) {
        if (!root["output"].is_string()) throw ConfigError("config: output must be a path string");
        config.output = root["output"].get<std::string>();
    }
    return config;
}

inline RunConfig parse_config_text(const std::string& text) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    return parse_config_json(root);
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

}  // namespace diad
