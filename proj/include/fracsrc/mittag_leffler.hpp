#pragma once

/**
 * @file mittag_leffler.hpp
 * @brief Two-parameter Mittag-Leffler function on the negative real axis.
 *
 *     E_{a,b}(z) = sum_{k>=0} z^k / Gamma(a k + b),   0 < a <= 1, 0 < b <= 2, z <= 0.
 *
 * On the negative axis the power series alternates and its largest term is
 * roughly exp(x) with x = |z|^{1/a}, while the value itself is O(1/|z|).
 * The evaluation regime is therefore selected by x:
 *
 *   x <= 3        power series in double, compensated summation
 *   3 < x < 42    power series accumulated in __float128 (113-bit mantissa),
 *                 coefficients 1/Gamma(a k + b) tabulated per evaluator
 *   x >= 42       asymptotic expansion  -sum_{k>=1} z^{-k} / Gamma(b - a k),
 *                 cut at its smallest term; the dropped remainder is O(exp(-x))
 *
 * For a < 1 there is no exponential contribution on the negative axis, so the
 * asymptotic remainder is exponentially small in x. a = b = 1 is exp(z).
 * If the asymptotic truncation estimate exceeds tolerance the extended series
 * is used instead (valid up to x = 50).
 */

#include <fracsrc/errors.hpp>
#include <fracsrc/numeric.hpp>

#include <quadmath.h>

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace fracsrc {

struct MlfQuery {
    double alpha;
    double beta;
    double z;
};

enum class MlfBranch { closed_form, series, extended_series, asymptotic };

namespace detail {

inline constexpr double kSeriesReach = 3.0;
inline constexpr double kAsymptoticFrom = 42.0;
inline constexpr double kExtendedReach = 50.0;
inline constexpr double kAsymptoticTolerance = 1e-14;
inline constexpr std::size_t kMaxSeriesTerms = 4'000'000;
inline constexpr int kMaxAsymptoticTerms = 4'000'000;

// lgamma without touching the global signgam.
inline double log_gamma(double x) {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

// sin(pi y) with exact zeros at the integers.
inline double sin_pi(double y) {
    double r = std::fmod(y, 2.0);
    if (r == std::trunc(r)) return 0.0;
    if (r > 1.0)
        r -= 2.0;
    else if (r < -1.0)
        r += 2.0;
    if (r > 0.5)
        r = 1.0 - r;
    else if (r < -0.5)
        r = -1.0 - r;
    return std::sin(std::numbers::pi * r);
}

inline void check_parameters(double alpha, double beta) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("Mittag-Leffler: alpha must lie in (0, 1], got " + std::to_string(alpha));
    if (!(beta > 0.0 && beta <= 2.0))
        throw DomainError("Mittag-Leffler: beta must lie in (0, 2], got " + std::to_string(beta));
}

inline void check_argument(double z) {
    if (!(z <= 0.0))
        throw DomainError("Mittag-Leffler: argument must be a real z <= 0, got " + std::to_string(z));
}

/// |z|^{1/alpha}; the exponential scale of the largest power-series term.
inline double exponential_scale(double alpha, double z) { return std::pow(-z, 1.0 / alpha); }

inline MlfBranch select_branch(double alpha, double beta, double z) {
    if (z == 0.0 || (alpha == 1.0 && beta == 1.0)) return MlfBranch::closed_form;
    const double x = exponential_scale(alpha, z);
    if (x <= kSeriesReach) return MlfBranch::series;
    if (x < kAsymptoticFrom) return MlfBranch::extended_series;
    return MlfBranch::asymptotic;
}

inline double closed_form(double alpha, double beta, double z) {
    if (z == 0.0) return 1.0 / std::tgamma(beta);
    (void)alpha;
    return std::exp(z);
}

/// Power series in double precision. Only accurate while |z|^{1/alpha} is small.
inline double series_double(double alpha, double beta, double z) {
    CompensatedSum sum;
    double zk = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < kMaxSeriesTerms; ++k) {
        const double term = zk / std::tgamma(alpha * static_cast<double>(k) + beta);
        sum.add(term);
        const double mag = std::abs(term);
        if (k > 0 && mag <= prev && mag <= 1e-17 * std::abs(sum.value())) return sum.value();
        prev = mag;
        zk *= z;
    }
    throw NumericalError("Mittag-Leffler series did not converge");
}

struct AsymptoticSum {
    double value;
    double truncation_error;  // magnitude envelope of the first dropped term
    int terms;
};

/// -sum_{k>=1} z^{-k}/Gamma(beta - alpha k), stopped at convergence or at the
/// smallest term once the (divergent) series starts to grow.
inline AsymptoticSum asymptotic_expansion(double alpha, double beta, double z) {
    const double log_abs_z = std::log(-z);
    const double log_pi = std::log(std::numbers::pi);
    // The reflection envelope Gamma(1-y)/pi |z|^{-k} is log-convex once y < -1.
    const int monitor_from = static_cast<int>(std::ceil((beta + 1.0) / alpha)) + 1;

    CompensatedSum sum;
    double prev_env = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= kMaxAsymptoticTerms; ++k) {
        const double y = beta - alpha * k;
        double log_env = 0.0;
        double s = 1.0;
        if (y > 0.0) {
            log_env = -log_gamma(y);
        } else {
            // 1/Gamma(y) = Gamma(1-y) sin(pi y) / pi
            log_env = log_gamma(1.0 - y) - log_pi;
            s = sin_pi(y);
        }
        log_env -= k * log_abs_z;
        const double env = std::exp(log_env);
        if (k >= monitor_from && env > prev_env) return {sum.value(), prev_env, k - 1};

        const double sign = (k % 2 == 0) ? -1.0 : 1.0;  // -(-1)^k
        sum.add(sign * env * s);
        const double v = sum.value();
        if (v != 0.0 && env < 1e-17 * std::abs(v)) return {v, env, k};
        prev_env = env;
    }
    return {sum.value(), prev_env, kMaxAsymptoticTerms};
}

}  // namespace detail

/// Evaluator for fixed (alpha, beta). Construction tabulates the extended
/// precision series coefficients; evaluation is const and thread-safe.
class MittagLeffler {
public:
    MittagLeffler(double alpha, double beta) : alpha_(alpha), beta_(beta) {
        detail::check_parameters(alpha, beta);
        const double log_reach = std::log(detail::kExtendedReach);
        const __float128 a = alpha;
        const __float128 b = beta;
        for (std::size_t k = 0;; ++k) {
            const __float128 arg = a * static_cast<__float128>(k) + b;
            // tgammaq is ~100x tighter than expq(-lgammaq) and the series amplifies
            // coefficient error by the cancellation factor
            coeffs_.push_back(arg < 1700 ? 1 / tgammaq(arg) : expq(-lgammaq(arg)));
            const double ad = alpha * static_cast<double>(k) + beta;
            // past the peak at a k ~ reach and below exp(-100) relative to it
            if (ad > detail::kExtendedReach + 1.0 &&
                alpha * static_cast<double>(k) * log_reach - detail::log_gamma(ad) < -100.0)
                break;
            if (k > detail::kMaxSeriesTerms)
                throw NumericalError("Mittag-Leffler: coefficient table too long for alpha");
        }
    }

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }

    MlfBranch branch(double z) const { return detail::select_branch(alpha_, beta_, z); }

    double operator()(double z) const {
        detail::check_argument(z);
        switch (branch(z)) {
            case MlfBranch::closed_form:
                return detail::closed_form(alpha_, beta_, z);
            case MlfBranch::series:
                return detail::series_double(alpha_, beta_, z);
            case MlfBranch::extended_series:
                return extended_series(z);
            case MlfBranch::asymptotic:
                break;
        }
        const auto r = detail::asymptotic_expansion(alpha_, beta_, z);
        if (r.truncation_error <= detail::kAsymptoticTolerance * std::abs(r.value)) return r.value;
        if (detail::exponential_scale(alpha_, z) <= detail::kExtendedReach) return extended_series(z);
        throw NumericalError("Mittag-Leffler asymptotic expansion failed to converge",
                             r.truncation_error / std::abs(r.value));
    }

    /// Power series summed in __float128. Requires |z|^{1/alpha} <= 50.
    double extended_series(double z) const {
        detail::check_argument(z);
        if (detail::exponential_scale(alpha_, z) > detail::kExtendedReach)
            throw DomainError("Mittag-Leffler: |z| beyond extended series reach");
        const __float128 zq = z;
        const __float128 tiny = 1e-36;
        __float128 power = 1;
        __float128 sum = 0;
        __float128 prev = FLT128_MAX;
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
            const __float128 term = power * coeffs_[k];
            sum += term;
            const __float128 mag = fabsq(term);
            if (k > 0 && mag <= prev && mag <= tiny * fabsq(sum)) break;
            prev = mag;
            power *= zq;
        }
        return static_cast<double>(sum);
    }

private:
    double alpha_;
    double beta_;
    std::vector<__float128> coeffs_;
};

/// E_{alpha,beta}(z) for 0 < alpha <= 1, 0 < beta <= 2, z <= 0.
inline double mlf(const MlfQuery& q) {
    detail::check_parameters(q.alpha, q.beta);
    detail::check_argument(q.z);
    switch (detail::select_branch(q.alpha, q.beta, q.z)) {
        case MlfBranch::closed_form:
            return detail::closed_form(q.alpha, q.beta, q.z);
        case MlfBranch::series:
            return detail::series_double(q.alpha, q.beta, q.z);
        case MlfBranch::extended_series:
            return MittagLeffler(q.alpha, q.beta)(q.z);
        case MlfBranch::asymptotic:
            break;
    }
    const auto r = detail::asymptotic_expansion(q.alpha, q.beta, q.z);
    if (r.truncation_error <= detail::kAsymptoticTolerance * std::abs(r.value)) return r.value;
    return MittagLeffler(q.alpha, q.beta)(q.z);
}

inline double mlf(double alpha, double beta, double z) { return mlf(MlfQuery{alpha, beta, z}); }

/// E_{alpha,1}(-x), x >= 0.
inline double mlf_one(double alpha, double x) {
    if (!(x >= 0.0)) throw DomainError("mlf_one: x must be non-negative, got " + std::to_string(x));
    return mlf(alpha, 1.0, -x);
}

}  // namespace fracsrc
