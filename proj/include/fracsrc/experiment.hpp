#pragma once

/**
 * @file experiment.hpp
 * @brief Monte Carlo risk study: for each n, M = choose_M(n, beta), many
 *        independent observe -> estimate replicates, empirical risk with its
 *        I1/I2/I3 split, the explicit bound, and the log-log rate fit.
 *
 * Replicate r at sample count n draws its noise from stream (n << 32 | r),
 * so results do not depend on thread count or on the other entries of n_list.
 * Per-replicate values are stored by index and reduced serially.
 */

#include <fracsrc/errors.hpp>
#include <fracsrc/estimator.hpp>
#include <fracsrc/forward_model.hpp>
#include <fracsrc/numeric.hpp>
#include <fracsrc/observation.hpp>
#include <fracsrc/spectral_basis.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace fracsrc {

struct ExperimentConfig {
    ProblemSpec spec;
    SpectralCoefficients f_true;
    double beta = 2.0;
    NoiseSpec noise;
    std::vector<std::size_t> n_list;
    std::size_t replicates = 100;
    std::optional<double> E;  // H^beta bound used in the risk bound; default ||f_true||_{H^beta}
    ZeroModeConvention mode = ZeroModeConvention::consistent;
    unsigned threads = 0;     // 0: hardware concurrency

    void validate() const {
        spec.validate();
        if (!(beta > 0.0)) throw ConfigError("beta must be positive");
        if (replicates < 1) throw ConfigError("replicates must be >= 1");
        if (n_list.empty()) throw ConfigError("n_list must not be empty");
        for (std::size_t i = 0; i < n_list.size(); ++i) {
            if (n_list[i] < 4) throw ConfigError("each n must be >= 4");
            if (i > 0 && n_list[i] <= n_list[i - 1]) throw ConfigError("n_list must be strictly increasing");
        }
        if (!(noise.v_max >= 0.0)) throw ConfigError("v_max must be >= 0");
        if (E && !(*E >= 0.0)) throw ConfigError("E must be >= 0");
    }
};

struct ExperimentRow {
    std::size_t n = 0;
    std::size_t M = 0;
    double risk = 0.0;
    double std_error = 0.0;
    double I1 = 0.0;
    double I2 = 0.0;
    double I3 = 0.0;
    double bound = 0.0;
    double max_decomposition_gap = 0.0;  // max over replicates |I1+I2+I3 - ||f~-f||^2|
};

struct ExperimentResult {
    std::vector<ExperimentRow> rows;
    std::optional<double> slope;
    std::string slope_note;  // why the slope is absent
    double E = 0.0;
};

/// Risks below this are round-off; a log-log fit through them is meaningless.
inline constexpr double kRiskFloor = 1e-20;

/// Least-squares slope of log(risk) against log(n).
inline double fit_rate(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw DomainError("fit_rate needs at least two points");
    CompensatedSum sx, sy;
    for (const auto& [n, r] : points) {
        if (!(n > 0.0 && r > 0.0)) throw DomainError("fit_rate needs positive n and risk");
        sx.add(std::log(n));
        sy.add(std::log(r));
    }
    const double m = static_cast<double>(points.size());
    const double mx = sx.value() / m;
    const double my = sy.value() / m;
    CompensatedSum sxy, sxx;
    for (const auto& [n, r] : points) {
        const double dx = std::log(n) - mx;
        sxy.add(dx * (std::log(r) - my));
        sxx.add(dx * dx);
    }
    if (!(sxx.value() > 0.0)) throw DomainError("fit_rate needs at least two distinct n");
    return sxy.value() / sxx.value();
}

namespace detail {

struct ReplicateOutcome {
    double risk = 0.0;
    ErrorDecomposition parts;
};

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) fn(i);
        });
    for (auto& t : pool) t.join();
}

inline double mean_of(std::span<const double> xs) { return compensated_sum(xs) / static_cast<double>(xs.size()); }

inline double standard_error(std::span<const double> xs, double mean) {
    if (xs.size() < 2) return 0.0;
    CompensatedSum s;
    for (double x : xs) s.add((x - mean) * (x - mean));
    return std::sqrt(s.value() / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

}  // namespace detail

inline std::uint64_t replicate_stream(std::size_t n, std::size_t r) {
    return (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(r);
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t max_M = choose_M(cfg.n_list.back(), cfg.beta);
    const KernelTable table(cfg.spec, std::max(max_M, cfg.f_true.max_mode()));
    const SpectralCoefficients uT = forward_map(table, cfg.f_true);

    ExperimentResult result;
    result.E = cfg.E.value_or(std::sqrt(sobolev_norm_sq(cfg.f_true, cfg.beta)));

    for (std::size_t n : cfg.n_list) {
        const std::size_t M = choose_M(n, cfg.beta);
        const auto clean = sample_on_grid(uT, n);
        const TruncatedEstimator estimator(table, n, M, cfg.mode);

        std::vector<detail::ReplicateOutcome> outcomes(cfg.replicates);
        detail::parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
            const auto obs = add_noise(clean, cfg.noise, replicate_stream(n, r));
            const auto est = estimator(obs.values);
            outcomes[r] = {l2_distance_sq(est.coeffs, cfg.f_true), error_decomposition(est, cfg.f_true)};
        });

        std::vector<double> risk(cfg.replicates), i1(cfg.replicates), i2(cfg.replicates), i3(cfg.replicates);
        ExperimentRow row;
        row.n = n;
        row.M = M;
        for (std::size_t r = 0; r < cfg.replicates; ++r) {
            risk[r] = outcomes[r].risk;
            i1[r] = outcomes[r].parts.I1;
            i2[r] = outcomes[r].parts.I2;
            i3[r] = outcomes[r].parts.I3;
            row.max_decomposition_gap =
                std::max(row.max_decomposition_gap, std::abs(outcomes[r].parts.total() - outcomes[r].risk));
        }
        row.risk = detail::mean_of(risk);
        row.std_error = detail::standard_error(risk, row.risk);
        row.I1 = detail::mean_of(i1);
        row.I2 = detail::mean_of(i2);
        row.I3 = detail::mean_of(i3);
        row.bound = theorem_bound({cfg.spec.alpha, cfg.spec.T, cfg.spec.R.lower, cfg.spec.R.upper, cfg.noise.v_max,
                                   result.E, cfg.beta, n, M});
        result.rows.push_back(row);
    }

    if (result.rows.size() < 2) {
        result.slope_note = "single sample size";
    } else if (std::any_of(result.rows.begin(), result.rows.end(),
                           [](const ExperimentRow& r) { return !(r.risk > kRiskFloor); })) {
        result.slope_note = "risk at round-off level";
    } else {
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : result.rows) pts.emplace_back(static_cast<double>(r.n), r.risk);
        result.slope = fit_rate(pts);
    }
    return result;
}

}  // namespace fracsrc
