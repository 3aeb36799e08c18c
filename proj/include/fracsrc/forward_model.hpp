#pragma once

/**
 * @file forward_model.hpp
 * @brief Final-time data of the time-fractional diffusion problem
 *
 *     D_t^a u - u_xx = R(t) f(x)   on (0, pi) x (0, T),
 *     u_x(0, t) = u_x(pi, t) = 0,  u(x, 0) = 0,
 *
 * in the cosine basis: <u(., T), phi_p> = b_p <f, phi_p> with
 *
 *     b_p = int_0^T (T - s)^{a-1} E_{a,a}(-p^2 (T - s)^a) R(s) ds.
 *
 * b_p is integrated after the substitution w = (T - s)^a, which turns the
 * weakly singular kernel into the smooth integrand
 *     (1/a) E_{a,a}(-p^2 w) R(T - w^{1/a}),   w in [0, T^a].
 * For p = 0 the integrand carries E_{a,a}(0) = 1/Gamma(a).
 *
 * l1_oracle() solves the same problem by the L1 time-stepping scheme and
 * central differences in space; it shares no code with the spectral path.
 */

#include <fracsrc/errors.hpp>
#include <fracsrc/mittag_leffler.hpp>
#include <fracsrc/spectral_basis.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace fracsrc {

/// Known time factor R(t) with declared bounds 0 < lower <= R(t) <= upper on [0, T].
struct TimeFactor {
    std::function<double(double)> fn;
    double lower = 1.0;
    double upper = 1.0;
    std::string description;

    double operator()(double t) const { return fn(t); }

    static TimeFactor constant(double c) {
        return {[c](double) { return c; }, c, c, "constant " + std::to_string(c)};
    }
    /// offset + amplitude sin(frequency t), bounds offset -+ |amplitude|.
    static TimeFactor sine(double offset, double amplitude, double frequency) {
        return {[=](double t) { return offset + amplitude * std::sin(frequency * t); },
                offset - std::abs(amplitude), offset + std::abs(amplitude),
                "sine offset=" + std::to_string(offset) + " amplitude=" + std::to_string(amplitude) +
                    " frequency=" + std::to_string(frequency)};
    }
};

struct ProblemSpec {
    double alpha = 0.5;
    double T = 1.0;
    TimeFactor R = TimeFactor::constant(1.0);

    /// Throws DomainError unless 0 < alpha < 1, T > 0 and R sits inside its declared bounds.
    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
        if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("T must be positive");
        if (!R.fn) throw DomainError("time factor R is not set");
        if (!(R.lower > 0.0) || !(R.upper >= R.lower))
            throw DomainError("time factor bounds need 0 < R0 <= Rmax");
        constexpr int kSpots = 1000;
        const double slack = 1e-12 * R.upper;
        for (int i = 0; i <= kSpots; ++i) {
            const double t = T * i / kSpots;
            const double r = R(t);
            if (!(r >= R.lower - slack && r <= R.upper + slack))
                throw DomainError("R(" + std::to_string(t) + ") = " + std::to_string(r) +
                                  " violates declared bounds [" + std::to_string(R.lower) + ", " +
                                  std::to_string(R.upper) + "]");
        }
    }
};

/// How the estimator normalizes the constant mode.
/// consistent: b_0 includes 1/Gamma(alpha) (E_{a,a}(0)); paper_literal: b_0 = int (T-s)^{a-1} R ds.
enum class ZeroModeConvention { consistent, paper_literal };

struct KernelValue {
    std::size_t p = 0;
    double value = 0.0;
    double error_estimate = 0.0;
};

namespace detail {

inline constexpr double kKernelPieceTolerance = 1e-13;
inline constexpr unsigned kKernelMaxDepth = 12;
inline constexpr double kKernelAcceptTolerance = 1e-10;

// Geometric breakpoints 4^j / p^2 between 0 and upper, so each piece sees one
// decay scale of E_{a,a}(-p^2 w).
inline std::vector<double> kernel_breaks(double upper, std::size_t p) {
    std::vector<double> breaks{0.0};
    if (p > 0) {
        const double scale = 1.0 / (static_cast<double>(p) * static_cast<double>(p));
        for (double b = scale / 16.0; b < upper; b *= 4.0) breaks.push_back(b);
    } else {
        breaks.push_back(0.5 * upper);
    }
    breaks.push_back(upper);
    return breaks;
}

template <class F>
KernelValue integrate_breaks(F&& f, const std::vector<double>& breaks, std::size_t p) {
    using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
    double total = 0.0;
    double err_total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        // Integrate on [-1, 1] and rescale: the library's error estimate is
        // not scaled by the interval width, which over-refines short pieces.
        const double mid = 0.5 * (breaks[i] + breaks[i + 1]);
        const double half = 0.5 * (breaks[i + 1] - breaks[i]);
        auto unit = [&](double t) { return f(mid + half * t); };
        double err = 0.0;
        double l1 = 0.0;
        total += half * Rule::integrate(unit, -1.0, 1.0, kKernelMaxDepth, kKernelPieceTolerance, &err, &l1);
        err_total += half * err;
    }
    if (!(std::isfinite(total) && total > 0.0) || err_total > kKernelAcceptTolerance * std::abs(total))
        throw NumericalError("kernel quadrature for p=" + std::to_string(p) + " did not converge",
                             err_total);
    return {p, total, err_total};
}

// int_0^T (T-s)^{a-1} R(s) ds, without the 1/Gamma(a) factor.
inline KernelValue memory_integral(const ProblemSpec& spec) {
    const double a = spec.alpha;
    const double upper = std::pow(spec.T, a);
    auto g = [&](double w) {
        const double s = std::max(0.0, spec.T - std::pow(w, 1.0 / a));
        return spec.R(s) / a;
    };
    return integrate_breaks(g, kernel_breaks(upper, 0), 0);
}

inline KernelValue kernel_with(const ProblemSpec& spec, const MittagLeffler& ml_aa, std::size_t p) {
    const double a = spec.alpha;
    if (p == 0) {
        auto v = memory_integral(spec);
        const double g = std::tgamma(a);
        return {0, v.value / g, v.error_estimate / g};
    }
    const double upper = std::pow(spec.T, a);
    const double p2 = static_cast<double>(p) * static_cast<double>(p);
    auto g = [&](double w) {
        const double s = std::max(0.0, spec.T - std::pow(w, 1.0 / a));
        return ml_aa(-p2 * w) * spec.R(s) / a;
    };
    return integrate_breaks(g, kernel_breaks(upper, p), p);
}

}  // namespace detail

/// b_p for a single mode (consistent convention at p = 0).
inline KernelValue kernel(const ProblemSpec& spec, std::size_t p) {
    spec.validate();
    const MittagLeffler ml_aa(spec.alpha, spec.alpha);
    return detail::kernel_with(spec, ml_aa, p);
}

/// b_0..b_P for one problem, plus the paper-literal zero-mode denominator.
class KernelTable {
public:
    KernelTable(const ProblemSpec& spec, std::size_t max_mode) : spec_(spec) {
        spec_.validate();
        const MittagLeffler ml_aa(spec_.alpha, spec_.alpha);
        values_.reserve(max_mode + 1);
        for (std::size_t p = 0; p <= max_mode; ++p) values_.push_back(detail::kernel_with(spec_, ml_aa, p).value);
        literal_zero_ = values_[0] * std::tgamma(spec_.alpha);
    }

    std::size_t max_mode() const noexcept { return values_.size() - 1; }
    const ProblemSpec& spec() const noexcept { return spec_; }

    double operator[](std::size_t p) const {
        if (p >= values_.size()) throw DomainError("kernel table does not reach mode " + std::to_string(p));
        return values_[p];
    }

    double zero_mode(ZeroModeConvention mode) const {
        return mode == ZeroModeConvention::consistent ? values_[0] : literal_zero_;
    }

private:
    ProblemSpec spec_;
    std::vector<double> values_;
    double literal_zero_ = 0.0;
};

/// <u(., T), phi_p> = b_p f_p for p = 0..P.
inline SpectralCoefficients forward_map(const KernelTable& table, const SpectralCoefficients& f) {
    std::vector<double> u(f.size());
    for (std::size_t p = 0; p <= f.max_mode(); ++p) u[p] = f[p] == 0.0 ? 0.0 : f[p] * table[p];
    return SpectralCoefficients(std::move(u));
}

inline SpectralCoefficients forward_map(const ProblemSpec& spec, const SpectralCoefficients& f) {
    return forward_map(KernelTable(spec, f.max_mode()), f);
}

inline double evaluate_uT(const ProblemSpec& spec, const SpectralCoefficients& f, double x) {
    return synthesize(forward_map(spec, f), x);
}

/// Samples of a function on a spatial grid.
struct SpaceSamples {
    std::vector<double> x;
    std::vector<double> u;
};

/// u(., T) by the L1 scheme on a uniform time grid (nt steps) and second-order
/// central differences on x_j = j pi / nx, j = 0..nx, Neumann via ghost points.
inline SpaceSamples l1_oracle(const ProblemSpec& spec, const SpectralCoefficients& f, std::size_t nx,
                              std::size_t nt) {
    if (nx < 8 || nt < 8) throw DomainError("l1_oracle needs nx, nt >= 8");
    spec.validate();

    const std::size_t N = nx + 1;
    const double h = kPi / static_cast<double>(nx);
    const double tau = spec.T / static_cast<double>(nt);
    const double a = spec.alpha;
    const double c = std::pow(tau, -a) / std::tgamma(2.0 - a);

    SpaceSamples out;
    out.x.resize(N);
    std::vector<double> source(N);
    for (std::size_t j = 0; j < N; ++j) {
        out.x[j] = h * static_cast<double>(j);
        source[j] = synthesize(f, out.x[j]);
    }

    // L1 weights a_j = (j+1)^{1-a} - j^{1-a}
    std::vector<double> w(nt + 1);
    for (std::size_t j = 0; j <= nt; ++j)
        w[j] = std::pow(static_cast<double>(j + 1), 1.0 - a) - std::pow(static_cast<double>(j), 1.0 - a);

    // (c I - D2) with ghost-point Neumann rows, factored once (Thomas).
    const double ih2 = 1.0 / (h * h);
    std::vector<double> sub(N, -ih2), diag(N, c + 2.0 * ih2), sup(N, -ih2);
    sup[0] = -2.0 * ih2;
    sub[N - 1] = -2.0 * ih2;
    std::vector<double> cp(N), inv_den(N);
    inv_den[0] = 1.0 / diag[0];
    cp[0] = sup[0] * inv_den[0];
    for (std::size_t j = 1; j < N; ++j) {
        inv_den[j] = 1.0 / (diag[j] - sub[j] * cp[j - 1]);
        cp[j] = sup[j] * inv_den[j];
    }
    auto solve = [&](std::vector<double>& rhs) {
        rhs[0] *= inv_den[0];
        for (std::size_t j = 1; j < N; ++j) rhs[j] = (rhs[j] - sub[j] * rhs[j - 1]) * inv_den[j];
        for (std::size_t j = N - 1; j-- > 0;) rhs[j] -= cp[j] * rhs[j + 1];
    };

    // d^m = u^m - u^{m-1}, row m-1. History sums are accumulated a block of
    // steps at a time so each stored increment is read once per block.
    constexpr std::size_t kBlock = 64;
    std::vector<double> incr(nt * N);
    std::vector<double> hist(kBlock * N);
    std::vector<double> u_prev(N, 0.0), rhs(N);

    for (std::size_t n0 = 1; n0 <= nt; n0 += kBlock) {
        const std::size_t nb = std::min(kBlock, nt - n0 + 1);
        std::fill(hist.begin(), hist.begin() + static_cast<std::ptrdiff_t>(nb * N), 0.0);
        for (std::size_t m = 1; m < n0; ++m) {
            const double* dm = &incr[(m - 1) * N];
            for (std::size_t t = 0; t < nb; ++t) {
                const double wt = w[n0 + t - m];
                double* hr = &hist[t * N];
                for (std::size_t j = 0; j < N; ++j) hr[j] += wt * dm[j];
            }
        }
        for (std::size_t t = 0; t < nb; ++t) {
            const std::size_t n = n0 + t;
            double* hr = &hist[t * N];
            for (std::size_t m = n0; m < n; ++m) {
                const double wt = w[n - m];
                const double* dm = &incr[(m - 1) * N];
                for (std::size_t j = 0; j < N; ++j) hr[j] += wt * dm[j];
            }
            const double r = spec.R(tau * static_cast<double>(n));
            for (std::size_t j = 0; j < N; ++j) rhs[j] = c * (u_prev[j] - hr[j]) + r * source[j];
            solve(rhs);
            double* dn = &incr[(n - 1) * N];
            for (std::size_t j = 0; j < N; ++j) {
                if (!std::isfinite(rhs[j]))
                    throw NumericalError("l1_oracle diverged at step " + std::to_string(n));
                dn[j] = rhs[j] - u_prev[j];
                u_prev[j] = rhs[j];
            }
        }
    }
    out.u = std::move(u_prev);
    return out;
}

}  // namespace fracsrc
