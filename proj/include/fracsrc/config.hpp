#pragma once

/**
 * @file config.hpp
 * @brief JSON run configuration shared by the CLI subcommands.
 *
 * Every key is optional; the schema is documented in README.md. Unknown
 * keys are rejected so typos do not silently fall back to defaults.
 */

#include <fracsrc/errors.hpp>
#include <fracsrc/estimator.hpp>
#include <fracsrc/experiment.hpp>
#include <fracsrc/forward_model.hpp>
#include <fracsrc/observation.hpp>
#include <fracsrc/spectral_basis.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fracsrc {

using Json = nlohmann::json;

struct RunConfig {
    ProblemSpec spec;
    SpectralCoefficients source{0.0};
    NoiseSpec noise;
    std::size_t n = 256;                   // observe.n
    std::optional<std::size_t> M;          // estimator.M; default choose_M(n, beta)
    double beta = 2.0;                     // estimator.beta, also experiment default
    ZeroModeConvention mode = ZeroModeConvention::consistent;
    std::size_t dense_points = 0;          // estimator.dense_points
    std::size_t forward_points = 201;      // forward.points, uniform on [0, pi]
    ExperimentConfig experiment;
    Json effective;                        // config after CLI overrides; hashed into outputs
};

namespace detail {

inline void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
T get_or(const Json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

inline Json section(const Json& root, const char* key) {
    if (!root.contains(key)) return Json::object();
    const Json& s = root.at(key);
    if (!s.is_object()) throw ConfigError(std::string("section '") + key + "' must be an object");
    return s;
}

inline std::size_t get_count(const Json& obj, const char* key, std::size_t fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(where + "." + key + " must be a non-negative integer");
    return v.get<std::size_t>();
}

inline TimeFactor parse_time_factor(const Json& r) {
    if (r.is_number()) return TimeFactor::constant(r.get<double>());
    if (!r.is_object()) throw ConfigError("problem.R must be a number or an object");
    const auto type = get_or<std::string>(r, "type", "constant", "problem.R");
    if (type == "constant") {
        reject_unknown(r, {"type", "value"}, "problem.R");
        return TimeFactor::constant(get_or(r, "value", 1.0, "problem.R"));
    }
    if (type == "sine") {
        reject_unknown(r, {"type", "offset", "amplitude", "frequency"}, "problem.R");
        return TimeFactor::sine(get_or(r, "offset", 2.0, "problem.R"), get_or(r, "amplitude", 1.0, "problem.R"),
                                get_or(r, "frequency", 1.0, "problem.R"));
    }
    throw ConfigError("problem.R.type must be 'constant' or 'sine', got '" + type + "'");
}

inline SpectralCoefficients parse_source(const Json& s) {
    if (s.empty()) return SpectralCoefficients{0.0, 1.0};
    if (s.contains("coefficients")) {
        reject_unknown(s, {"coefficients"}, "source");
        const auto c = get_or<std::vector<double>>(s, "coefficients", {}, "source");
        if (c.empty()) throw ConfigError("source.coefficients must not be empty");
        for (double v : c)
            if (!std::isfinite(v)) throw ConfigError("source.coefficients must be finite");
        return SpectralCoefficients(c);
    }
    const auto type = get_or<std::string>(s, "type", "", "source");
    if (type == "power_decay") {
        // f_0 = mean, f_p = amplitude p^{-exponent} for p = 1..modes
        reject_unknown(s, {"type", "exponent", "modes", "mean", "amplitude"}, "source");
        const double exponent = get_or(s, "exponent", 3.0, "source");
        const std::size_t modes = get_count(s, "modes", 64, "source");
        const double amplitude = get_or(s, "amplitude", 1.0, "source");
        if (modes < 1) throw ConfigError("source.modes must be >= 1");
        std::vector<double> c(modes + 1);
        c[0] = get_or(s, "mean", 0.0, "source");
        for (std::size_t p = 1; p <= modes; ++p) c[p] = amplitude * std::pow(static_cast<double>(p), -exponent);
        return SpectralCoefficients(std::move(c));
    }
    if (type == "modes") {
        // sparse {"values": {"p": c_p, ...}}
        reject_unknown(s, {"type", "values"}, "source");
        if (!s.contains("values") || !s.at("values").is_object()) throw ConfigError("source.values must be an object");
        std::vector<double> c(1, 0.0);
        for (const auto& [key, val] : s.at("values").items()) {
            std::size_t p = 0;
            try {
                std::size_t used = 0;
                p = std::stoul(key, &used);
                if (used != key.size()) throw std::invalid_argument(key);
            } catch (const std::exception&) {
                throw ConfigError("source.values key '" + key + "' is not a mode index");
            }
            if (!val.is_number()) throw ConfigError("source.values[" + key + "] must be a number");
            if (c.size() <= p) c.resize(p + 1, 0.0);
            c[p] = val.get<double>();
        }
        return SpectralCoefficients(std::move(c));
    }
    throw ConfigError("source needs 'coefficients' or type 'power_decay' | 'modes'");
}

inline SigmaMode parse_sigma_mode(const std::string& s) {
    if (s == "constant") return SigmaMode::constant;
    if (s == "uniform") return SigmaMode::uniform;
    throw ConfigError("noise.sigma_mode must be 'constant' or 'uniform', got '" + s + "'");
}

}  // namespace detail

inline const char* to_string(SigmaMode m) { return m == SigmaMode::constant ? "constant" : "uniform"; }
inline const char* to_string(ZeroModeConvention m) {
    return m == ZeroModeConvention::consistent ? "consistent" : "paper_literal";
}

/// 64-bit FNV-1a of the canonical (sorted-key, compact) dump.
inline std::uint64_t config_hash(const Json& j) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : j.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << v;
    return os.str();
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return Json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
}

/// Build a RunConfig from parsed JSON. Throws ConfigError on any invalid entry.
inline RunConfig parse_config(const Json& root) {
    if (!root.is_object()) throw ConfigError("config root must be an object");
    detail::reject_unknown(root, {"problem", "source", "noise", "seed", "observe", "estimator", "forward", "experiment"},
                           "config");
    RunConfig cfg;
    cfg.effective = root;

    const Json problem = detail::section(root, "problem");
    detail::reject_unknown(problem, {"alpha", "T", "R"}, "problem");
    cfg.spec.alpha = detail::get_or(problem, "alpha", 0.5, "problem");
    cfg.spec.T = detail::get_or(problem, "T", 1.0, "problem");
    if (problem.contains("R")) cfg.spec.R = detail::parse_time_factor(problem.at("R"));
    try {
        cfg.spec.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("problem: ") + e.what());
    }

    cfg.source = detail::parse_source(detail::section(root, "source"));

    const Json noise = detail::section(root, "noise");
    detail::reject_unknown(noise, {"v_max", "sigma_mode"}, "noise");
    cfg.noise.v_max = detail::get_or(noise, "v_max", 0.0, "noise");
    if (!(cfg.noise.v_max >= 0.0) || !std::isfinite(cfg.noise.v_max)) throw ConfigError("noise.v_max must be >= 0");
    cfg.noise.sigma_mode = detail::parse_sigma_mode(detail::get_or<std::string>(noise, "sigma_mode", "constant", "noise"));
    if (root.contains("seed")) {
        const Json& s = root.at("seed");
        if (!s.is_number_unsigned())
            throw ConfigError("seed must be an unsigned 64-bit integer");
        cfg.noise.seed = s.get<std::uint64_t>();
    }

    const Json observe = detail::section(root, "observe");
    detail::reject_unknown(observe, {"n"}, "observe");
    cfg.n = detail::get_count(observe, "n", 256, "observe");
    if (cfg.n < 2) throw ConfigError("observe.n must be >= 2");

    const Json est = detail::section(root, "estimator");
    detail::reject_unknown(est, {"M", "beta", "paper_literal", "dense_points"}, "estimator");
    if (est.contains("M")) {
        cfg.M = detail::get_count(est, "M", 1, "estimator");
        if (*cfg.M < 1) throw ConfigError("estimator.M must be >= 1");
    }
    cfg.beta = detail::get_or(est, "beta", 2.0, "estimator");
    if (!(cfg.beta > 0.0)) throw ConfigError("estimator.beta must be positive");
    if (detail::get_or(est, "paper_literal", false, "estimator")) cfg.mode = ZeroModeConvention::paper_literal;
    cfg.dense_points = detail::get_count(est, "dense_points", 0, "estimator");

    const Json fwd = detail::section(root, "forward");
    detail::reject_unknown(fwd, {"points"}, "forward");
    cfg.forward_points = detail::get_count(fwd, "points", 201, "forward");
    if (cfg.forward_points < 2) throw ConfigError("forward.points must be >= 2");

    const Json ex = detail::section(root, "experiment");
    detail::reject_unknown(ex, {"n_list", "replicates", "beta", "E", "threads"}, "experiment");
    auto& e = cfg.experiment;
    e.spec = cfg.spec;
    e.f_true = cfg.source;
    e.noise = cfg.noise;
    e.mode = cfg.mode;
    e.beta = detail::get_or(ex, "beta", cfg.beta, "experiment");
    e.replicates = detail::get_count(ex, "replicates", 100, "experiment");
    e.threads = static_cast<unsigned>(detail::get_count(ex, "threads", 0, "experiment"));
    if (ex.contains("E")) e.E = detail::get_or(ex, "E", 0.0, "experiment");
    if (ex.contains("n_list")) {
        const Json& nl = ex.at("n_list");
        if (!nl.is_array()) throw ConfigError("experiment.n_list must be an array");
        for (const auto& v : nl) {
            if (!v.is_number_integer() || v.get<long long>() < 0)
                throw ConfigError("experiment.n_list entries must be non-negative integers");
            e.n_list.push_back(v.get<std::size_t>());
        }
    } else {
        e.n_list = {256, 512, 1024, 2048, 4096};
    }
    try {
        e.validate();
    } catch (const DomainError& err) {
        throw ConfigError(err.what());
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

}  // namespace fracsrc
