#include "oracles.hpp"

#include <fracsrc/estimator.hpp>
#include <fracsrc/experiment.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace fracsrc;

namespace {

const ProblemSpec kSpec{0.5, 1.0, TimeFactor::constant(1.0)};

Observations clean_obs(const KernelTable& table, const SpectralCoefficients& f, std::size_t n) {
    return observe(table, f, n, NoiseSpec{0.0, SigmaMode::constant, 0});
}

}  // namespace

TEST_CASE("choose_M examples", "[estimator]") {
    CHECK(choose_M(10000, 2.0) == 2);
    CHECK(choose_M(2, 2.0) == 1);
    CHECK(choose_M(2, 0.01) == 1);
    CHECK(choose_M(1000000, 0.5) == 10);
    CHECK(choose_M(512, 2.0) == 2);  // 512^(1/9) = 2 exactly
    CHECK(choose_M(511, 2.0) == 1);
    CHECK(choose_M(19683, 2.0) == 3);
    CHECK(choose_M(19682, 2.0) == 2);
    CHECK(choose_M(3, 0.001) == 1);
    CHECK_THROWS_AS(choose_M(1, 2.0), DomainError);
    CHECK_THROWS_AS(choose_M(10, 0.0), DomainError);
}

TEST_CASE("choose_M stays within [1, n-1]", "[estimator][property]") {
    for (std::size_t n = 2; n <= 5000; n += 7)
        for (double beta : {0.01, 0.5, 2.0, 10.0}) {
            const auto M = choose_M(n, beta);
            REQUIRE(M >= 1);
            REQUIRE(M <= n - 1);
            REQUIRE(std::pow(static_cast<double>(M), 5.0 + 2.0 * beta) <= static_cast<double>(n) * (1 + 1e-12));
        }
}

TEST_CASE("noise-free round trip recovers a bandlimited source", "[estimator]") {
    const SpectralCoefficients f{0.7, 1.0, -0.5, 0.25, 0.0, -0.125};
    const KernelTable table(kSpec, 8);
    const auto est = estimate(clean_obs(table, f, 64), table, 8);
    REQUIRE(est.coeffs.max_mode() == 8);
    CHECK(est.M == 8);
    CHECK(est.n == 64);
    for (std::size_t p = 0; p <= 8; ++p) CHECK(std::abs(est.coeffs[p] - f[p]) <= 1e-8);
    CHECK(std::sqrt(l2_distance_sq(est.coeffs, f)) <= 1e-8);
}

TEST_CASE("zero observations give a zero estimate", "[estimator]") {
    const KernelTable table(kSpec, 5);
    const TruncatedEstimator est(table, 32, 5);
    const auto e = est(std::vector<double>(32, 0.0));
    for (double c : e.coeffs.values()) CHECK(c == 0.0);
}

TEST_CASE("high mode aliases into mode 1 exactly as predicted", "[estimator]") {
    const std::size_t n = 8;
    const std::size_t q = 2 * n - 1;
    const auto f = SpectralCoefficients::single_mode(q, 0.8);
    const KernelTable table(kSpec, q);
    const auto uT = forward_map(table, f);
    const auto est = estimate(clean_obs(table, f, n), table, n - 1);
    const double G = aliasing_term(uT, 1, n);
    CHECK(G == -uT[q]);
    CHECK(est.coeffs[1] == Catch::Approx(G / table[1]).epsilon(1e-12));
    for (std::size_t p = 2; p < n; ++p) CHECK(std::abs(est.coeffs[p]) <= 1e-14);
}

TEST_CASE("paper-literal zero mode is off by 1/Gamma(alpha)", "[estimator]") {
    const SpectralCoefficients f{1.3, 0.4};
    const KernelTable table(kSpec, 2);
    const auto obs = clean_obs(table, f, 32);
    const auto consistent = estimate(obs, table, 2, ZeroModeConvention::consistent);
    const auto literal = estimate(obs, table, 2, ZeroModeConvention::paper_literal);
    CHECK(consistent.coeffs[0] == Catch::Approx(1.3).epsilon(1e-12));
    CHECK(literal.coeffs[0] == Catch::Approx(1.3 / std::tgamma(0.5)).epsilon(1e-12));
    CHECK(literal.coeffs[1] == consistent.coeffs[1]);
    CHECK(literal.mode == ZeroModeConvention::paper_literal);
}

TEST_CASE("estimator input checks", "[estimator]") {
    const KernelTable table(kSpec, 8);
    CHECK_THROWS_AS(TruncatedEstimator(table, 8, 8), DomainError);
    CHECK_THROWS_AS(TruncatedEstimator(table, 8, 0), DomainError);
    CHECK_THROWS_AS(TruncatedEstimator(KernelTable(kSpec, 2), 16, 3), DomainError);
    const TruncatedEstimator est(table, 16, 3);
    CHECK_THROWS_AS(est(std::vector<double>(15, 0.0)), DomainError);
    const auto obs = clean_obs(table, SpectralCoefficients{1.0}, 4);
    CHECK_THROWS_AS(estimate(obs, kSpec, 4), DomainError);
}

TEST_CASE("estimator is linear in the data", "[estimator][property]") {
    const KernelTable table(kSpec, 6);
    const TruncatedEstimator est(table, 100, 6);
    NormalStream rng(5, 5);
    std::vector<double> a(100), b(100), mix(100);
    for (std::size_t k = 0; k < 100; ++k) {
        a[k] = rng.normal();
        b[k] = rng.normal();
        mix[k] = 2.5 * a[k] - 0.75 * b[k];
    }
    const auto ea = est(a), eb = est(b), em = est(mix);
    for (std::size_t p = 0; p <= 6; ++p)
        CHECK(std::abs(em.coeffs[p] - (2.5 * ea.coeffs[p] - 0.75 * eb.coeffs[p])) <= 1e-12);
}

TEST_CASE("estimate is unbiased on a bandlimited truth", "[estimator][property]") {
    const SpectralCoefficients f{0.5, 1.0, -0.4, 0.2};
    const std::size_t n = 128, M = 4, reps = 2000;
    const KernelTable table(kSpec, M);
    const auto clean = sample_on_grid(forward_map(table, f), n);
    const TruncatedEstimator est(table, n, M);
    std::vector<std::vector<double>> draws(M + 1);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto c = est(add_noise(clean, NoiseSpec{0.2, SigmaMode::uniform, 31337}, r).values).coeffs;
        for (std::size_t p = 0; p <= M; ++p) draws[p].push_back(c[p]);
    }
    for (std::size_t p = 0; p <= M; ++p) {
        double mean = 0.0, var = 0.0;
        for (double v : draws[p]) mean += v;
        mean /= reps;
        for (double v : draws[p]) var += (v - mean) * (v - mean);
        const double se = std::sqrt(var / (reps - 1) / reps);
        INFO("p=" << p << " mean=" << mean << " se=" << se);
        CHECK(std::abs(mean - f[p]) <= 4.0 * se);
    }
}

TEST_CASE("exact representation recovers aliased sources", "[estimator]") {
    const std::size_t n = 8, M = 5;
    std::vector<double> c(31);
    for (std::size_t p = 0; p <= 30; ++p) c[p] = std::cos(0.3 * p) / (1.0 + p);
    const SpectralCoefficients f(c);
    const KernelTable table(kSpec, 30);
    const auto uT = forward_map(table, f);
    const auto rep = exact_representation(uT, table, n, M);
    for (std::size_t p = 0; p <= 30; ++p) CHECK(std::abs(rep[p] - f[p]) <= 1e-8);

    const auto zero = exact_representation(SpectralCoefficients::zeros(3), kSpec, n, M);
    for (double v : zero.values()) CHECK(v == 0.0);

    const auto single = SpectralCoefficients::single_mode(7, 0.3);
    const auto rep7 = exact_representation(forward_map(table, single), table, n, M);
    CHECK(rep7[7] == Catch::Approx(0.3).epsilon(1e-14));
    for (std::size_t p = 0; p <= M; ++p) CHECK(std::abs(rep7[p]) <= 1e-12);
    CHECK_THROWS_AS(exact_representation(uT, table, n, n), DomainError);
}

TEST_CASE("risk bound examples", "[estimator]") {
    ErrorBoundInputs in{0.5, 1.0, 1.0, 1.0, 0.0, 0.0, 2.0, 4096, 2};
    CHECK(theorem_bound(in) == 0.0);

    in.v_max = 0.1;
    in.E = 1.0;
    in.M = choose_M(4096, 2.0);
    REQUIRE(in.M == 2);
    const auto t = theorem_bound_terms(in);
    // 40-digit evaluation of the same expression (mpmath), frozen
    CHECK(t.zero_mode == Catch::Approx(5.421535620801649767e-05).epsilon(1e-12));
    CHECK(t.spectral == Catch::Approx(2.353236649937844861e-03).epsilon(1e-11));
    CHECK(t.truncation == 0.0625);
    CHECK(theorem_bound(in) == Catch::Approx(0.06490745200614586136).epsilon(1e-12));

    CHECK_THROWS_AS(theorem_bound({1.0, 1.0, 1.0, 1.0, 0.1, 1.0, 2.0, 10, 1}), DomainError);
    CHECK_THROWS_AS(theorem_bound({0.5, 1.0, 2.0, 1.0, 0.1, 1.0, 2.0, 10, 1}), DomainError);
}

TEST_CASE("risk bound terms are monotone in M", "[estimator][property]") {
    ErrorBoundInputs in{0.7, 2.0, 0.5, 3.0, 0.2, 4.0, 1.5, 1000, 1};
    BoundTerms prev = theorem_bound_terms(in);
    for (std::size_t M = 2; M <= 200; ++M) {
        in.M = M;
        const auto t = theorem_bound_terms(in);
        CHECK(t.zero_mode == prev.zero_mode);
        CHECK(t.spectral > prev.spectral);
        CHECK(t.truncation < prev.truncation);
        prev = t;
    }
    CHECK(prev.spectral > prev.truncation);
}

TEST_CASE("error decomposition", "[estimator]") {
    const KernelTable table(kSpec, 12);
    const SpectralCoefficients f{0.5, -0.25, 0.75};
    const auto d0 = error_decomposition(clean_obs(table, f, 64), table, f, 4);
    CHECK(d0.I1 <= 1e-20);
    CHECK(d0.I2 == 0.0);
    CHECK(d0.I3 <= 1e-20);

    const auto tail = SpectralCoefficients::single_mode(9, 0.6);
    const auto d1 = error_decomposition(clean_obs(table, tail, 64), table, tail, 4);
    CHECK(d1.I2 == Catch::Approx(0.36).epsilon(1e-15));
    CHECK(d1.I1 + d1.I3 <= 1e-20);
}

TEST_CASE("decomposition sums to the L2 error and matches dense quadrature", "[estimator][property]") {
    const KernelTable table(kSpec, 16);
    std::vector<double> c(17);
    for (std::size_t p = 0; p <= 16; ++p) c[p] = 1.0 / (1.0 + p * p);
    const SpectralCoefficients f(c);
    for (std::size_t M : {1u, 4u, 9u, 16u}) {
        const auto obs = observe(table, f, 64, NoiseSpec{0.3, SigmaMode::constant, 8}, M);
        const auto est = estimate(obs, table, M);
        const auto d = error_decomposition(est, f);
        const double err = l2_distance_sq(est.coeffs, f);
        CHECK(std::abs(d.total() - err) <= 1e-10);
        const double quad = oracle::simpson(
            [&](double x) { return std::pow(synthesize(est.coeffs, x) - synthesize(f, x), 2); }, 0.0,
            std::numbers::pi, 20000);
        CHECK(std::abs(quad - err) <= 1e-6);
    }
}

TEST_CASE("mean squared error of pure noise matches the variance formula", "[estimator][property]") {
    // Var c~_p = pi sigma^2 / (n b_p^2) for 0 <= p <= M < n under constant sigma
    const std::size_t n = 64, M = 3, reps = 4000;
    const double sigma = 0.25;
    const KernelTable table(kSpec, M);
    const TruncatedEstimator est(table, n, M);
    const std::vector<double> clean(n, 0.0);
    const auto f = SpectralCoefficients::zeros(0);
    double expected = 0.0;
    for (std::size_t p = 0; p <= M; ++p) expected += std::numbers::pi * sigma * sigma / (n * table[p] * table[p]);
    std::vector<double> risk(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto d = error_decomposition(est(add_noise(clean, NoiseSpec{2 * sigma, SigmaMode::constant, 11}, r).values), f);
        CHECK(d.I2 == 0.0);
        risk[r] = d.I1 + d.I3;
    }
    double mean = 0.0, var = 0.0;
    for (double v : risk) mean += v;
    mean /= reps;
    for (double v : risk) var += (v - mean) * (v - mean);
    const double se = std::sqrt(var / (reps - 1) / reps);
    INFO("mean=" << mean << " expected=" << expected << " se=" << se);
    CHECK(std::abs(mean - expected) <= 4.0 * se);
}

TEST_CASE("empirical risk stays below the bound", "[estimator][property]") {
    ExperimentConfig cfg;
    cfg.spec = {0.6, 1.0, TimeFactor::sine(1.5, 0.5, 2.0)};
    std::vector<double> c(41);
    for (std::size_t p = 1; p <= 40; ++p) c[p] = std::pow(p, -3.0);
    c[0] = 0.5;
    cfg.f_true = SpectralCoefficients(c);
    cfg.beta = 2.0;
    cfg.noise = {0.15, SigmaMode::uniform, 2718};
    cfg.n_list = {256, 2048};
    cfg.replicates = 500;
    const auto res = run_experiment(cfg);
    for (const auto& row : res.rows) CHECK(row.risk <= row.bound + 3.0 * row.std_error);
}
