#pragma once

/**
 * @file estimator.hpp
 * @brief Truncated trigonometric reconstruction of the source f from noisy
 *        final-time samples, the a priori truncation rule, the explicit risk
 *        bound, and the exact (aliasing-corrected) representation of f.
 *
 *     c~_p = [(pi/n) sum_k u~(x_k) phi_p(x_k)] / b_p,   p = 1..M,
 *     c~_0 = [(sqrt(pi)/n) sum_k u~(x_k)] / b_0,
 *     c~_p = 0 for p > M.
 *
 * In paper_literal mode the constant part of the estimate is
 * (1/n) sum_k u~(x_k) / int_0^T (T-s)^{a-1} R(s) ds, i.e. b_0 without the
 * 1/Gamma(a) factor; it is stored as the phi_0 coefficient (times sqrt(pi)).
 */

#include <fracsrc/errors.hpp>
#include <fracsrc/forward_model.hpp>
#include <fracsrc/mittag_leffler.hpp>
#include <fracsrc/numeric.hpp>
#include <fracsrc/observation.hpp>
#include <fracsrc/spectral_basis.hpp>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fracsrc {

struct Estimate {
    SpectralCoefficients coeffs;
    std::size_t M = 1;
    std::size_t n = 2;
    ZeroModeConvention mode = ZeroModeConvention::consistent;
};

/// max(1, floor(n^{1/(5+2 beta)})), clamped to n-1.
inline std::size_t choose_M(std::size_t n, double beta) {
    if (n < 2) throw DomainError("choose_M needs n >= 2");
    if (!(beta > 0.0)) throw DomainError("choose_M needs beta > 0");
    const double e = 5.0 + 2.0 * beta;
    const double nd = static_cast<double>(n);
    auto m = static_cast<std::size_t>(std::floor(std::pow(nd, 1.0 / e)));
    // pow(512, 1/9) may round just below 2
    while (std::pow(static_cast<double>(m + 1), e) <= nd) ++m;
    while (m > 1 && std::pow(static_cast<double>(m), e) > nd) --m;
    return std::clamp<std::size_t>(m, 1, n - 1);
}

/// The linear map samples -> coefficients for fixed (n, M, kernel), with the
/// basis values on the grid tabulated once.
class TruncatedEstimator {
public:
    TruncatedEstimator(const KernelTable& table, std::size_t n, std::size_t M,
                       ZeroModeConvention mode = ZeroModeConvention::consistent)
        : n_(n), M_(M), mode_(mode) {
        if (n < 2) throw DomainError("estimator needs n >= 2");
        if (M < 1 || M >= n)
            throw DomainError("truncation level must satisfy 1 <= M <= n-1 (M=" + std::to_string(M) +
                              ", n=" + std::to_string(n) + ")");
        if (table.max_mode() < M) throw DomainError("kernel table shorter than truncation level");

        denominators_.resize(M + 1);
        denominators_[0] = table.zero_mode(mode);
        for (std::size_t p = 1; p <= M; ++p) denominators_[p] = table[p];
        for (std::size_t p = 0; p <= M; ++p)
            if (!(denominators_[p] > 0.0) || !std::isnormal(denominators_[p]))
                throw NumericalError("kernel b_" + std::to_string(p) + " underflowed", denominators_[p]);

        const MidpointGrid grid(n);
        basis_.resize((M + 1) * n);
        for (std::size_t p = 0; p <= M; ++p)
            for (std::size_t k = 1; k <= n; ++k) basis_[p * n + (k - 1)] = eval_basis(p, grid.node(k));
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t M() const noexcept { return M_; }

    Estimate operator()(std::span<const double> samples) const {
        if (samples.size() != n_)
            throw DomainError("estimator expects " + std::to_string(n_) + " samples, got " +
                              std::to_string(samples.size()));
        std::vector<double> c(M_ + 1);
        const double scale = kPi / static_cast<double>(n_);
        for (std::size_t p = 0; p <= M_; ++p) {
            CompensatedSum s;
            const double* phi = &basis_[p * n_];
            for (std::size_t k = 0; k < n_; ++k) s.add(samples[k] * phi[k]);
            c[p] = scale * s.value() / denominators_[p];
        }
        if (mode_ == ZeroModeConvention::paper_literal) {
            // constant term (1/n) sum u~ / b_0^lit, expressed on phi_0 = 1/sqrt(pi)
            CompensatedSum s;
            for (double v : samples) s.add(v);
            c[0] = s.value() / static_cast<double>(n_) / denominators_[0] * std::sqrt(kPi);
        }
        return {SpectralCoefficients(std::move(c)), M_, n_, mode_};
    }

private:
    std::size_t n_;
    std::size_t M_;
    ZeroModeConvention mode_;
    std::vector<double> denominators_;
    std::vector<double> basis_;
};

inline Estimate estimate(const Observations& obs, const KernelTable& table, std::size_t M,
                         ZeroModeConvention mode = ZeroModeConvention::consistent) {
    return TruncatedEstimator(table, obs.size(), M, mode)(obs.values);
}

inline Estimate estimate(const Observations& obs, const ProblemSpec& spec, std::size_t M,
                         ZeroModeConvention mode = ZeroModeConvention::consistent) {
    if (M < 1 || M >= obs.size())
        throw DomainError("truncation level must satisfy 1 <= M <= n-1");
    return estimate(obs, KernelTable(spec, M), M, mode);
}

/// f recovered from noise-free u_T coefficients through the grid sums, the
/// aliasing corrections for p <= M and the exact tail u_p / b_p for p > M.
inline SpectralCoefficients exact_representation(const SpectralCoefficients& uT, const KernelTable& table,
                                                 std::size_t n, std::size_t M) {
    if (n < 2 || M < 1 || M >= n) throw DomainError("exact_representation needs 1 <= M <= n-1");
    const std::size_t top = std::max(M, uT.max_mode());
    if (table.max_mode() < top) throw DomainError("kernel table shorter than representation");

    const auto samples = sample_on_grid(uT, n);
    std::vector<double> f(top + 1, 0.0);
    f[0] = (grid_projection(samples, 0) - std::sqrt(kPi) * aliasing_term(uT, 0, n)) / table[0];
    for (std::size_t p = 1; p <= M; ++p) f[p] = (grid_projection(samples, p) - aliasing_term(uT, p, n)) / table[p];
    for (std::size_t p = M + 1; p <= top; ++p) f[p] = uT[p] / table[p];
    return SpectralCoefficients(std::move(f));
}

inline SpectralCoefficients exact_representation(const SpectralCoefficients& uT, const ProblemSpec& spec,
                                                 std::size_t n, std::size_t M) {
    return exact_representation(uT, KernelTable(spec, std::max(M, uT.max_mode())), n, M);
}

struct ErrorBoundInputs {
    double alpha = 0.5;
    double T = 1.0;
    double R0 = 1.0;
    double Rmax = 1.0;
    double v_max = 0.0;
    double E = 0.0;  // bound on ||f||_{H^beta}
    double beta = 1.0;
    std::size_t n = 2;
    std::size_t M = 1;
};

/// The three summands of the risk bound, kept apart for monotonicity checks.
struct BoundTerms {
    double zero_mode = 0.0;   // (2-a)^2/(R0^2 T^{4-2a}) (pi^2 V^2/n + pi^3 |R|^2 E^2/(288 n^4))
    double spectral = 0.0;    // M^5 (pi^2 V^2/n + pi^4 |R|^2 E^2/(144 n^4)) / (R0^2 (1-E_{a,1}(-T^a))^2)
    double truncation = 0.0;  // M^{-2 beta} E^2
    double total() const noexcept { return zero_mode + spectral + truncation; }
};

inline BoundTerms theorem_bound_terms(const ErrorBoundInputs& in) {
    if (!(in.alpha > 0.0 && in.alpha < 1.0)) throw DomainError("bound: alpha must lie in (0,1)");
    if (!(in.T > 0.0 && in.R0 > 0.0 && in.Rmax >= in.R0)) throw DomainError("bound: need T > 0, 0 < R0 <= Rmax");
    if (!(in.v_max >= 0.0 && in.E >= 0.0 && in.beta > 0.0)) throw DomainError("bound: need V_max, E >= 0, beta > 0");
    if (in.n < 1 || in.M < 1) throw DomainError("bound: need n, M >= 1");

    const double pi2 = kPi * kPi;
    const double n = static_cast<double>(in.n);
    const double n4 = n * n * n * n;
    const double V2 = in.v_max * in.v_max;
    const double RE2 = in.Rmax * in.Rmax * in.E * in.E;
    const double M = static_cast<double>(in.M);
    const double a = in.alpha;

    BoundTerms t;
    t.zero_mode = (2.0 - a) * (2.0 - a) / (in.R0 * in.R0 * std::pow(in.T, 4.0 - 2.0 * a)) *
                  (pi2 * V2 / n + pi2 * kPi / 288.0 * RE2 / n4);
    const double gap = 1.0 - mlf_one(a, std::pow(in.T, a));
    t.spectral = 1.0 / (in.R0 * in.R0 * gap * gap) * (pi2 * V2 / n + pi2 * pi2 * RE2 / (144.0 * n4)) *
                 std::pow(M, 5.0);
    t.truncation = std::pow(M, -2.0 * in.beta) * in.E * in.E;
    return t;
}

inline double theorem_bound(const ErrorBoundInputs& in) { return theorem_bound_terms(in).total(); }

/// Split of ||f~ - f||^2 into constant mode, tail beyond M, and modes 1..M.
struct ErrorDecomposition {
    double I1 = 0.0;
    double I2 = 0.0;
    double I3 = 0.0;
    double total() const noexcept { return I1 + I2 + I3; }
};

inline ErrorDecomposition error_decomposition(const Estimate& est, const SpectralCoefficients& f_true) {
    ErrorDecomposition d;
    const double e0 = est.coeffs[0] - f_true[0];
    d.I1 = e0 * e0;
    CompensatedSum tail, mid;
    for (std::size_t p = est.M + 1; p <= f_true.max_mode(); ++p) tail.add(f_true[p] * f_true[p]);
    for (std::size_t p = 1; p <= est.M; ++p) {
        const double e = est.coeffs[p] - f_true[p];
        mid.add(e * e);
    }
    d.I2 = tail.value();
    d.I3 = mid.value();
    return d;
}

inline ErrorDecomposition error_decomposition(const Observations& obs, const KernelTable& table,
                                              const SpectralCoefficients& f_true, std::size_t M,
                                              ZeroModeConvention mode = ZeroModeConvention::consistent) {
    return error_decomposition(estimate(obs, table, M, mode), f_true);
}

}  // namespace fracsrc
