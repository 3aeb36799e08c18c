#pragma once

/**
 * @file spectral_basis.hpp
 * @brief Neumann cosine basis on (0, pi), midpoint grid, discrete orthogonality
 *        and the grid aliasing operator.
 *
 * Orthonormal convention used everywhere in the library:
 *     phi_0(x) = 1/sqrt(pi),   phi_p(x) = sqrt(2/pi) cos(p x),  p >= 1.
 *
 * On the midpoint grid x_k = pi (2k-1) / (2n) the grid projection
 *     (pi/n) sum_k u(x_k) phi_p(x_k)
 * equals <u, phi_p> plus contributions of the modes 2ln +- p (aliasing).
 */

#include <fracsrc/errors.hpp>
#include <fracsrc/numeric.hpp>

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace fracsrc {

inline constexpr double kPi = std::numbers::pi;
inline const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);
inline const double kInvSqrtPi = 1.0 / std::sqrt(std::numbers::pi);

/// phi_p(x) in the orthonormal convention.
inline double eval_basis(std::size_t p, double x) {
    if (p == 0) return kInvSqrtPi;
    return kSqrt2OverPi * std::cos(static_cast<double>(p) * x);
}

/// Cosine coefficients c_p = <f, phi_p>, p = 0..P.
class SpectralCoefficients {
public:
    SpectralCoefficients() : c_(1, 0.0) {}
    explicit SpectralCoefficients(std::vector<double> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty()) c_.push_back(0.0);
        for (double v : c_)
            if (!std::isfinite(v)) throw DomainError("spectral coefficients must be finite");
    }
    SpectralCoefficients(std::initializer_list<double> coeffs)
        : SpectralCoefficients(std::vector<double>(coeffs)) {}

    static SpectralCoefficients zeros(std::size_t max_mode) {
        return SpectralCoefficients(std::vector<double>(max_mode + 1, 0.0));
    }
    static SpectralCoefficients single_mode(std::size_t p, double value) {
        auto c = zeros(p);
        c.c_[p] = value;
        return c;
    }

    std::size_t max_mode() const noexcept { return c_.size() - 1; }
    std::size_t size() const noexcept { return c_.size(); }

    /// Coefficient of mode p; zero beyond the bandlimit.
    double operator[](std::size_t p) const noexcept { return p < c_.size() ? c_[p] : 0.0; }
    double& at(std::size_t p) { return c_.at(p); }

    std::span<const double> values() const noexcept { return c_; }

    /// Grow (zero pad) or truncate to the given maximum mode.
    SpectralCoefficients resized(std::size_t max_mode) const {
        std::vector<double> v(max_mode + 1, 0.0);
        for (std::size_t p = 0; p < v.size() && p < c_.size(); ++p) v[p] = c_[p];
        return SpectralCoefficients(std::move(v));
    }

    friend bool operator==(const SpectralCoefficients&, const SpectralCoefficients&) = default;

private:
    std::vector<double> c_;
};

/// f(x) = sum_p c_p phi_p(x).
inline double synthesize(const SpectralCoefficients& c, double x) {
    CompensatedSum s;
    for (std::size_t p = 0; p <= c.max_mode(); ++p)
        if (c[p] != 0.0) s.add(c[p] * eval_basis(p, x));
    return s.value();
}

/// Squared L2(0, pi) norm via Parseval.
inline double l2_norm_sq(const SpectralCoefficients& c) {
    CompensatedSum s;
    for (double v : c.values()) s.add(v * v);
    return s.value();
}

/// Squared L2 distance between two coefficient sequences, including both tails.
inline double l2_distance_sq(const SpectralCoefficients& a, const SpectralCoefficients& b) {
    const std::size_t top = std::max(a.max_mode(), b.max_mode());
    CompensatedSum s;
    for (std::size_t p = 0; p <= top; ++p) {
        const double d = a[p] - b[p];
        s.add(d * d);
    }
    return s.value();
}

/// sum_{p>=1} p^{2 beta} c_p^2. The constant mode does not enter.
inline double sobolev_norm_sq(const SpectralCoefficients& c, double beta) {
    if (!(beta > 0.0)) throw DomainError("sobolev_norm_sq: beta must be positive");
    CompensatedSum s;
    for (std::size_t p = 1; p <= c.max_mode(); ++p)
        s.add(std::pow(static_cast<double>(p), 2.0 * beta) * c[p] * c[p]);
    return s.value();
}

/// x_k = pi (2k - 1) / (2n), k = 1..n.
class MidpointGrid {
public:
    explicit MidpointGrid(std::size_t n) : n_(n) {
        if (n == 0) throw DomainError("midpoint grid needs n >= 1");
    }

    std::size_t size() const noexcept { return n_; }

    /// Node for 1-based index k.
    double node(std::size_t k) const noexcept {
        return kPi * static_cast<double>(2 * k - 1) / static_cast<double>(2 * n_);
    }

    std::vector<double> nodes() const {
        std::vector<double> x(n_);
        for (std::size_t k = 1; k <= n_; ++k) x[k - 1] = node(k);
        return x;
    }

    friend bool operator==(const MidpointGrid&, const MidpointGrid&) = default;

private:
    std::size_t n_;
};

/// (pi/n) sum_k v_k phi_p(x_k) for samples v on the midpoint grid.
inline double grid_projection(std::span<const double> samples, std::size_t p) {
    const MidpointGrid grid(samples.size());
    const double n = static_cast<double>(samples.size());
    CompensatedSum s;
    for (std::size_t k = 1; k <= samples.size(); ++k) s.add(samples[k - 1] * eval_basis(p, grid.node(k)));
    return kPi / n * s.value();
}

/// s_{p,q} = (1/n) sum_k phi_p(x_k) phi_q(x_k), computed on the grid.
inline double discrete_orthogonality(std::size_t p, std::size_t q, std::size_t n) {
    const MidpointGrid grid(n);
    CompensatedSum s;
    for (std::size_t k = 1; k <= n; ++k) s.add(eval_basis(p, grid.node(k)) * eval_basis(q, grid.node(k)));
    return s.value() / static_cast<double>(n);
}

/// (1/n) sum_k phi_p(x_k), computed on the grid.
inline double grid_mode_mean(std::size_t p, std::size_t n) {
    const MidpointGrid grid(n);
    CompensatedSum s;
    for (std::size_t k = 1; k <= n; ++k) s.add(eval_basis(p, grid.node(k)));
    return s.value() / static_cast<double>(n);
}

namespace detail {
// (1/n) sum_k cos(m x_k) on the midpoint grid: (-1)^l if |m| = 2 l n, else 0.
inline int midpoint_cosine_mean(long long m, std::size_t n) {
    const long long period = 2 * static_cast<long long>(n);
    if (m < 0) m = -m;
    if (m % period != 0) return 0;
    return ((m / period) % 2 == 0) ? 1 : -1;
}
}  // namespace detail

/// Closed form of s_{p,q} for p, q >= 1:
/// +1/pi when q - p or q + p equals 2ln with l even, -1/pi with l odd, 0 otherwise
/// (for p, q <= n-1 this reduces to delta_{pq}/pi).
inline double orthogonality_closed_form(std::size_t p, std::size_t q, std::size_t n) {
    const auto pp = static_cast<long long>(p);
    const auto qq = static_cast<long long>(q);
    return (detail::midpoint_cosine_mean(qq - pp, n) + detail::midpoint_cosine_mean(qq + pp, n)) / kPi;
}

/// Closed form of the grid mean of phi_p, p >= 1: (-1)^l sqrt(2/pi) if p = 2ln, else 0.
inline double grid_mode_mean_closed_form(std::size_t p, std::size_t n) {
    return detail::midpoint_cosine_mean(static_cast<long long>(p), n) * kSqrt2OverPi;
}

/// Aliasing correction for a bandlimited u on the n-point midpoint grid:
///   p = 0:        sqrt(2/pi) sum_{l>=1} (-1)^l u_{2ln}
///   1 <= p < n:   sum_{l>=1} (-1)^l (u_{p+2ln} + u_{2ln-p})
/// so that (pi/n) sum_k u(x_k) phi_p(x_k) = u_p + G   for p >= 1 and
///         (sqrt(pi)/n) sum_k u(x_k)      = u_0 + sqrt(pi) G   for p = 0.
inline double aliasing_term(const SpectralCoefficients& u, std::size_t p, std::size_t n) {
    if (n < 1 || p >= n)
        throw DomainError("aliasing_term: need 0 <= p <= n-1 (p=" + std::to_string(p) +
                          ", n=" + std::to_string(n) + ")");
    const std::size_t top = u.max_mode();
    CompensatedSum s;
    for (std::size_t l = 1; 2 * l * n - p <= top; ++l) {
        const double sign = (l % 2 == 0) ? 1.0 : -1.0;
        const std::size_t base = 2 * l * n;
        if (p == 0) {
            s.add(sign * u[base]);
        } else {
            s.add(sign * u[base + p]);
            s.add(sign * u[base - p]);
        }
    }
    return p == 0 ? kSqrt2OverPi * s.value() : s.value();
}

}  // namespace fracsrc
