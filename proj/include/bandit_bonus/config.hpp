#pragma once
/**
 * @file config.hpp
 * @brief Run configuration: sectioned key=value parsing and model builders.
 *
 * Configurations are plain INI-style text (`[section]` headers, `key = value`
 * lines, `#`/`;` comments).  A file whose first non-space character is `{` is
 * instead parsed as JSON, so the `summary.json` emitted by a run — which
 * embeds the exact resolved configuration — can be fed straight back in to
 * reproduce the run.  Builders resolve defaults into the stored section map,
 * validate every model assumption up front, and throw ConfigError (malformed
 * input) or InvariantError (named model assumption violated) on failure.
 */

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "bandit_bonus/continuous.hpp"
#include "bandit_bonus/cost_model.hpp"
#include "bandit_bonus/discrete.hpp"
#include "bandit_bonus/errors.hpp"
#include "bandit_bonus/sim.hpp"
#include "bandit_bonus/valuations.hpp"

namespace bb {

/// Parsed configuration: section -> key -> verbatim string value.  Builders
/// insert the defaults they apply, so after a run the map holds the exact
/// resolved configuration for the summary document.
struct RunConfig {
    std::map<std::string, std::map<std::string, std::string>> sections;

    bool has(const std::string& section, const std::string& key) const {
        const auto sec = sections.find(section);
        return sec != sections.end() && sec->second.count(key) > 0;
    }
    const std::string& require(const std::string& section, const std::string& key) const {
        const auto sec = sections.find(section);
        if (sec == sections.end())
            throw ConfigError("missing config section [" + section + "]");
        const auto entry = sec->second.find(key);
        if (entry == sec->second.end())
            throw ConfigError("missing config key '" + key + "' in section [" + section + "]");
        return entry->second;
    }
    /// Returns the stored value, inserting @p fallback first if the key is
    /// absent (this is how applied defaults become part of the resolved map).
    const std::string& resolve(const std::string& section, const std::string& key,
                               const std::string& fallback) {
        auto& sec = sections[section];
        const auto entry = sec.find(key);
        if (entry != sec.end()) return entry->second;
        return sec.emplace(key, fallback).first->second;
    }
};

namespace detail {

inline std::string trim(const std::string& text) {
    std::size_t lo = text.find_first_not_of(" \t\r\n");
    if (lo == std::string::npos) return "";
    std::size_t hi = text.find_last_not_of(" \t\r\n");
    return text.substr(lo, hi - lo + 1);
}

inline double parse_double(const std::string& section, const std::string& key,
                           const std::string& value) {
    const char* begin = value.c_str();
    char* end = nullptr;
    const double parsed = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ConfigError("[" + section + "] " + key + " = '" + value + "' is not a number");
    return parsed;
}

inline long long parse_int(const std::string& section, const std::string& key,
                           const std::string& value) {
    const char* begin = value.c_str();
    char* end = nullptr;
    const long long parsed = std::strtoll(begin, &end, 10);
    if (end == begin || *end != '\0')
        throw ConfigError("[" + section + "] " + key + " = '" + value + "' is not an integer");
    return parsed;
}

inline bool parse_bool(const std::string& section, const std::string& key,
                       const std::string& value) {
    if (value == "true" || value == "yes" || value == "1") return true;
    if (value == "false" || value == "no" || value == "0") return false;
    throw ConfigError("[" + section + "] " + key + " = '" + value + "' is not a boolean");
}

/// Converts one JSON config leaf to the verbatim-string representation used
/// by the INI path, so both input formats feed identical builder code.
inline std::string json_leaf_to_string(const nlohmann::json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    return value.dump();
}

} // namespace detail

/// Typed accessors over RunConfig that also record applied defaults.
struct ConfigReader {
    RunConfig& cfg;

    double number(const std::string& section, const std::string& key) const {
        return detail::parse_double(section, key, cfg.require(section, key));
    }
    double number(const std::string& section, const std::string& key, double fallback) const {
        return detail::parse_double(section, key, cfg.resolve(section, key, fmt_default(fallback)));
    }
    long long integer(const std::string& section, const std::string& key,
                      long long fallback) const {
        return detail::parse_int(section, key,
                                 cfg.resolve(section, key, std::to_string(fallback)));
    }
    bool flag(const std::string& section, const std::string& key, bool fallback) const {
        return detail::parse_bool(section, key,
                                  cfg.resolve(section, key, fallback ? "true" : "false"));
    }
    std::string text(const std::string& section, const std::string& key,
                     const std::string& fallback) const {
        return cfg.resolve(section, key, fallback);
    }

private:
    static std::string fmt_default(double x) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.12g", x);
        return buf;
    }
};

/// Parses INI-style sectioned key=value text.
inline RunConfig parse_ini(const std::string& text) {
    RunConfig cfg;
    std::istringstream stream(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const std::string trimmed = detail::trim(line);
        if (trimmed.empty() || trimmed.front() == '#' || trimmed.front() == ';') continue;
        if (trimmed.front() == '[') {
            if (trimmed.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": malformed section header '" + trimmed + "'");
            section = detail::trim(trimmed.substr(1, trimmed.size() - 2));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(line_no) + ": empty section name");
            cfg.sections[section];
            continue;
        }
        const std::size_t eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value', got '" + trimmed + "'");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": key=value before any [section] header");
        const std::string key = detail::trim(trimmed.substr(0, eq));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        cfg.sections[section][key] = detail::trim(trimmed.substr(eq + 1));
    }
    return cfg;
}

/// Parses a JSON config document.  A summary document is accepted directly:
/// its embedded "config" object is used as the section map.
inline RunConfig parse_json_config(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw ConfigError(std::string("JSON config parse error: ") + err.what());
    }
    if (doc.contains("config") && doc["config"].is_object()) doc = doc["config"];
    if (!doc.is_object()) throw ConfigError("JSON config root must be an object");
    RunConfig cfg;
    for (const auto& [section, entries] : doc.items()) {
        if (!entries.is_object())
            throw ConfigError("JSON config section '" + section + "' must be an object");
        for (const auto& [key, value] : entries.items())
            cfg.sections[section][key] = detail::json_leaf_to_string(value);
    }
    return cfg;
}

/// Loads a configuration file, sniffing JSON ('{' first) vs INI text.
inline RunConfig load_config(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot read config file: " + path);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    const std::string text = buffer.str();
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return parse_json_config(text);
    return parse_ini(text);
}

/// Solver resolution knobs shared by the continuous-model commands.
struct SolverOptions {
    double grid_step = 1e-4;
    int display_points = 2001;
};

inline SolverOptions build_solver_options(RunConfig& cfg) {
    ConfigReader reader{cfg};
    SolverOptions opts;
    opts.grid_step = reader.number("solver", "grid_step", 1e-4);
    opts.display_points = static_cast<int>(reader.integer("solver", "display_points", 2001));
    if (!(opts.grid_step > 0.0 && opts.grid_step <= 1e-2))
        throw ConfigError("[solver] grid_step must lie in (0, 1e-2]");
    if (opts.display_points < 2) throw ConfigError("[solver] display_points must be >= 2");
    return opts;
}

/// Builds the reporting-cost distribution from the [cost] section.
inline CostDistribution build_cost(RunConfig& cfg) {
    ConfigReader reader{cfg};
    const std::string kind = reader.text("cost", "kind", "uniform");
    if (kind == "uniform") {
        const double cbar = reader.number("cost", "cbar", 1.0);
        return CostDistribution::uniform(cbar);
    }
    if (kind == "tabulated") {
        const std::string csv = cfg.require("cost", "csv");
        return CostDistribution::tabulated_from_csv(csv);
    }
    throw ConfigError("[cost] kind must be 'uniform' or 'tabulated', got '" + kind + "'");
}

/// Reads the continuous-model fields without running the invariant checks;
/// the validate command uses this to report violations instead of throwing.
inline ContinuousModel build_continuous_model_unchecked(RunConfig& cfg) {
    const std::string kind = cfg.require("model", "kind");
    if (kind != "continuous")
        throw ConfigError("this command requires [model] kind = continuous, got '" + kind + "'");
    ConfigReader reader{cfg};
    ContinuousModel model;
    model.discount_rate = reader.number("model", "discount_rate");
    model.arrival_rate = reader.number("model", "arrival_rate");
    model.lump_value = reader.number("model", "lump_value");
    model.safe_flow = reader.number("model", "safe_flow");
    model.assume_cbar_large = reader.flag("model", "assume_cbar_large", false);
    model.costs = build_cost(cfg);
    return model;
}

/// Builds and validates the continuous model from [model] + [cost].
inline ContinuousModel build_continuous_model(RunConfig& cfg) {
    ContinuousModel model = build_continuous_model_unchecked(cfg);
    model.validate();
    return model;
}

/// How the risky-good valuation R1 is specified for the discrete model.
enum class R1Kind { Uniform, RhoMix, Moments };

/// Discrete model plus enough of the R1 law to sweep R2 and to simulate.
struct DiscreteSpec {
    DiscreteModel model;
    R1Kind kind = R1Kind::Uniform;
    double uniform_x = 4.0; ///< upper end of the U[0, X] valuation (Uniform)
    double rho = 0.5;       ///< mixing weight of the two-block law (RhoMix)

    /// E max(R1, r2) as a function of r2, used by the sweep command.
    double emax_at(double r2) const {
        switch (kind) {
            case R1Kind::Uniform: return emax_uniform_r1(uniform_x, r2);
            case R1Kind::RhoMix: return emax_rho_mix(rho, r2);
            case R1Kind::Moments:
                throw ConfigError("[model] r1 = moments fixes E max(R1,R2) at one R2; "
                                  "sweeping requires r1 = uniform or rho_mix");
        }
        throw ConfigError("unreachable R1 kind");
    }

    /// Per-path R1 sampler, used by the discrete simulator.
    R1Sampler sampler() const {
        switch (kind) {
            case R1Kind::Uniform: return make_uniform_r1_sampler(uniform_x);
            case R1Kind::RhoMix: return make_rho_mix_sampler(rho);
            case R1Kind::Moments:
                throw ConfigError("[model] r1 = moments has no sampling law; "
                                  "simulation requires r1 = uniform or rho_mix");
        }
        throw ConfigError("unreachable R1 kind");
    }
};

/// Reads the discrete-model fields without running the invariant checks.
inline DiscreteSpec build_discrete_spec_unchecked(RunConfig& cfg) {
    const std::string kind = cfg.require("model", "kind");
    if (kind != "discrete")
        throw ConfigError("this command requires [model] kind = discrete, got '" + kind + "'");
    ConfigReader reader{cfg};
    DiscreteSpec spec;

    const std::string horizon = reader.text("model", "horizon", "inf");
    if (horizon == "inf") {
        spec.model.horizon = std::nullopt;
    } else {
        const long long periods = detail::parse_int("model", "horizon", horizon);
        if (periods < 1) throw ConfigError("[model] horizon must be >= 1 or 'inf'");
        spec.model.horizon = static_cast<int>(periods);
    }
    spec.model.discount = reader.number("model", "discount");
    spec.model.r2 = reader.number("model", "r2");

    const std::string r1 = reader.text("model", "r1", "uniform");
    if (r1 == "uniform") {
        spec.kind = R1Kind::Uniform;
        spec.uniform_x = reader.number("model", "r1_x", 4.0);
        if (!(spec.uniform_x > 0.0)) throw ConfigError("[model] r1_x must be positive");
        spec.model.er1 = er1_uniform_r1(spec.uniform_x);
        spec.model.emax = emax_uniform_r1(spec.uniform_x, spec.model.r2);
    } else if (r1 == "rho_mix") {
        spec.kind = R1Kind::RhoMix;
        spec.rho = reader.number("model", "rho", 0.5);
        if (!(spec.rho > 0.0 && spec.rho < 1.0))
            throw ConfigError("[model] rho must lie strictly in (0, 1)");
        if (spec.model.r2 != 3.0)
            throw ConfigError("[model] r1 = rho_mix has a closed form specific to r2 = 3");
        spec.model.er1 = er1_rho_mix(spec.rho);
        spec.model.emax = emax_rho_mix(spec.rho, spec.model.r2);
    } else if (r1 == "moments") {
        spec.kind = R1Kind::Moments;
        spec.model.er1 = reader.number("model", "er1");
        spec.model.emax = reader.number("model", "emax");
    } else {
        throw ConfigError("[model] r1 must be 'uniform', 'rho_mix' or 'moments', got '" + r1 +
                          "'");
    }

    spec.model.costs = build_cost(cfg);
    return spec;
}

/// Builds and validates the discrete model from [model] + [cost].
inline DiscreteSpec build_discrete_spec(RunConfig& cfg) {
    DiscreteSpec spec = build_discrete_spec_unchecked(cfg);
    spec.model.validate();
    return spec;
}

/// Builds the simulation controls from [sim]; BANDIT_BONUS_THREADS overrides
/// the configured thread count (the result is thread-count invariant anyway).
inline SimConfig build_sim_config(RunConfig& cfg) {
    ConfigReader reader{cfg};
    SimConfig sim;
    sim.dt = reader.number("sim", "dt", sim.dt);
    sim.horizon = reader.number("sim", "horizon", sim.horizon);
    sim.n_paths = static_cast<std::size_t>(
        reader.integer("sim", "n_paths", static_cast<long long>(sim.n_paths)));
    sim.master_seed = static_cast<std::uint64_t>(
        reader.integer("sim", "master_seed", static_cast<long long>(sim.master_seed)));
    sim.alpha0 = reader.number("sim", "alpha0", sim.alpha0);
    sim.threads = static_cast<int>(reader.integer("sim", "threads", sim.threads));
    sim.tail_correction = reader.flag("sim", "tail_correction", sim.tail_correction);
    sim.trace_paths = static_cast<std::size_t>(
        reader.integer("sim", "trace_paths", static_cast<long long>(sim.trace_paths)));
    if (const char* env = std::getenv("BANDIT_BONUS_THREADS")) {
        const std::string value(env);
        if (!value.empty()) {
            const long long threads = detail::parse_int("env", "BANDIT_BONUS_THREADS", value);
            if (threads < 1) throw ConfigError("BANDIT_BONUS_THREADS must be >= 1");
            sim.threads = static_cast<int>(threads);
            cfg.sections["sim"]["threads"] = std::to_string(threads);
        }
    }
    sim.validate_common();
    return sim;
}

/// R2 sweep range from [sweep]; returns the evaluation grid.
inline std::vector<double> build_sweep_grid(RunConfig& cfg) {
    ConfigReader reader{cfg};
    const double lo = reader.number("sweep", "r2_min", 1.1);
    const double hi = reader.number("sweep", "r2_max", 3.1);
    const double step = reader.number("sweep", "r2_step", 0.05);
    if (!(step > 0.0)) throw ConfigError("[sweep] r2_step must be positive");
    if (!(hi >= lo)) throw ConfigError("[sweep] r2_max must be >= r2_min");
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double r2 = lo + step * i;
        if (r2 > hi + 1e-12) break;
        grid.push_back(std::min(r2, hi));
    }
    return grid;
}

/// Output directory from [output]; created by the CLI before writing.
inline std::string build_output_dir(RunConfig& cfg) {
    ConfigReader reader{cfg};
    return reader.text("output", "dir", "out");
}

} // namespace bb
