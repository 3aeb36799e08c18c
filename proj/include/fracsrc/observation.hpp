#pragma once

/**
 * @file observation.hpp
 * @brief Noisy samples  u~_T(x_k) = u_T(x_k) + sigma_k eps_k  on the midpoint grid.
 *
 * eps_k are i.i.d. N(0,1) drawn from the stream (seed, stream). The noise
 * scales sigma_k are drawn from a separate stream so that switching sigma
 * mode does not shift the eps sequence.
 */

#include <fracsrc/errors.hpp>
#include <fracsrc/forward_model.hpp>
#include <fracsrc/rng.hpp>
#include <fracsrc/spectral_basis.hpp>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fracsrc {

enum class SigmaMode { constant, uniform };

struct NoiseSpec {
    double v_max = 0.0;
    SigmaMode sigma_mode = SigmaMode::constant;
    std::uint64_t seed = 0;
};

struct Observations {
    MidpointGrid grid{2};
    std::vector<double> values;
    std::vector<double> sigmas;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    std::size_t size() const noexcept { return values.size(); }
};

namespace detail {
inline constexpr std::uint64_t kSigmaStreamTag = 0x5157'0000'0000'0000ULL;
}

/// sigma_k: V_max/2 in constant mode, U[0, V_max) in uniform mode.
inline std::vector<double> noise_scales(std::size_t n, const NoiseSpec& noise, std::uint64_t stream) {
    if (!(noise.v_max >= 0.0) || !std::isfinite(noise.v_max)) throw DomainError("v_max must be >= 0");
    std::vector<double> sigma(n, 0.5 * noise.v_max);
    if (noise.sigma_mode == SigmaMode::uniform) {
        NormalStream rng(noise.seed, stream ^ detail::kSigmaStreamTag);
        for (auto& s : sigma) s = noise.v_max * rng.uniform();
    }
    return sigma;
}

/// Add noise to precomputed noise-free samples on the midpoint grid.
inline Observations add_noise(std::span<const double> clean, const NoiseSpec& noise, std::uint64_t stream = 0) {
    if (clean.size() < 2) throw DomainError("observations need n >= 2");
    Observations obs;
    obs.grid = MidpointGrid(clean.size());
    obs.seed = noise.seed;
    obs.stream = stream;
    obs.sigmas = noise_scales(clean.size(), noise, stream);
    obs.values.assign(clean.begin(), clean.end());
    if (noise.v_max > 0.0) {
        NormalStream rng(noise.seed, stream);
        for (std::size_t k = 0; k < obs.values.size(); ++k) obs.values[k] += obs.sigmas[k] * rng.normal();
    }
    return obs;
}

/// Noise-free u_T at the midpoint nodes from its cosine coefficients.
inline std::vector<double> sample_on_grid(const SpectralCoefficients& uT, std::size_t n) {
    const MidpointGrid grid(n);
    std::vector<double> v(n);
    for (std::size_t k = 1; k <= n; ++k) v[k - 1] = synthesize(uT, grid.node(k));
    return v;
}

inline Observations observe(const KernelTable& table, const SpectralCoefficients& f, std::size_t n,
                            const NoiseSpec& noise, std::uint64_t stream = 0) {
    if (n < 2) throw DomainError("observe needs n >= 2, got " + std::to_string(n));
    const auto clean = sample_on_grid(forward_map(table, f), n);
    return add_noise(clean, noise, stream);
}

inline Observations observe(const ProblemSpec& spec, const SpectralCoefficients& f, std::size_t n,
                            const NoiseSpec& noise, std::uint64_t stream = 0) {
    return observe(KernelTable(spec, f.max_mode()), f, n, noise, stream);
}

}  // namespace fracsrc
