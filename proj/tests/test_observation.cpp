#include <fracsrc/observation.hpp>
#include <fracsrc/rng.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace fracsrc;

namespace {

const ProblemSpec kSpec{0.5, 1.0, TimeFactor::constant(1.0)};

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

Moments moments(const std::vector<double>& v) {
    Moments m;
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(v.size());
    for (double x : v) m.var += (x - m.mean) * (x - m.mean);
    m.var /= static_cast<double>(v.size() - 1);
    return m;
}

}  // namespace

TEST_CASE("splitmix64 reference output", "[rng]") {
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(stream_seed(1, 2) != stream_seed(2, 1));
    CHECK(stream_seed(7, 0) != stream_seed(7, 1));
}

TEST_CASE("normal stream moments and lag-1 correlation", "[rng][property]") {
    NormalStream rng(20240917, 3);
    std::vector<double> eps(100000);
    for (double& e : eps) e = rng.normal();
    const auto m = moments(eps);
    CHECK(std::abs(m.mean) <= 0.02);
    CHECK(std::abs(m.var - 1.0) <= 0.02);
    double num = 0.0;
    for (std::size_t i = 1; i < eps.size(); ++i) num += (eps[i] - m.mean) * (eps[i - 1] - m.mean);
    const double rho = num / (m.var * static_cast<double>(eps.size() - 1));
    CHECK(std::abs(rho) <= 0.02);
}

TEST_CASE("uniform draws stay in [0, 1)", "[rng]") {
    NormalStream rng(1, 1);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(lo < 1e-3);
    CHECK(hi > 0.999);
}

TEST_CASE("zero noise returns the exact final-time samples", "[observe]") {
    const SpectralCoefficients f{0.2, 1.0, -0.5, 0.25};
    const auto obs = observe(kSpec, f, 32, NoiseSpec{0.0, SigmaMode::constant, 99});
    const auto uT = forward_map(kSpec, f);
    REQUIRE(obs.size() == 32);
    for (std::size_t k = 1; k <= 32; ++k) {
        CHECK(obs.values[k - 1] == synthesize(uT, obs.grid.node(k)));
        CHECK(obs.sigmas[k - 1] == 0.0);
    }
}

TEST_CASE("observations are a deterministic function of the seed", "[observe]") {
    const SpectralCoefficients f{0.0, 1.0};
    const NoiseSpec noise{0.3, SigmaMode::uniform, 12345};
    const auto a = observe(kSpec, f, 64, noise, 5);
    const auto b = observe(kSpec, f, 64, noise, 5);
    CHECK(a.values == b.values);
    CHECK(a.sigmas == b.sigmas);
    CHECK(a.seed == 12345);
    CHECK(a.stream == 5);
    const auto c = observe(kSpec, f, 64, noise, 6);
    CHECK(a.values != c.values);
    const auto d = observe(kSpec, f, 64, NoiseSpec{0.3, SigmaMode::uniform, 12346}, 5);
    CHECK(a.values != d.values);
}

TEST_CASE("noise scales respect the bound", "[observe]") {
    const auto constant = noise_scales(1000, NoiseSpec{0.4, SigmaMode::constant, 1}, 0);
    for (double s : constant) CHECK(s == 0.2);
    const auto uniform = noise_scales(1000, NoiseSpec{0.4, SigmaMode::uniform, 1}, 0);
    double lo = 1.0, hi = 0.0;
    for (double s : uniform) {
        CHECK(s >= 0.0);
        CHECK(s < 0.4);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    CHECK(hi - lo > 0.3);
    CHECK_THROWS_AS(noise_scales(4, NoiseSpec{-1.0, SigmaMode::constant, 1}, 0), DomainError);
}

TEST_CASE("sigma mode does not shift the standard normal draws", "[observe]") {
    const std::vector<double> clean(500, 0.0);
    const auto a = add_noise(clean, NoiseSpec{1.0, SigmaMode::constant, 77}, 2);
    const auto b = add_noise(clean, NoiseSpec{1.0, SigmaMode::uniform, 77}, 2);
    for (std::size_t k = 0; k < clean.size(); ++k)
        if (b.sigmas[k] > 1e-3) CHECK(a.values[k] / a.sigmas[k] == Catch::Approx(b.values[k] / b.sigmas[k]).epsilon(1e-12));
}

TEST_CASE("sample variance of pure noise", "[observe][property]") {
    const std::size_t n = 10000;
    const double sigma = 0.35;
    const auto obs = observe(kSpec, SpectralCoefficients::zeros(1), n, NoiseSpec{2 * sigma, SigmaMode::constant, 4242});
    const auto m = moments(obs.values);
    // chi-square concentration: sd of the sample variance is sigma^2 sqrt(2/(n-1))
    CHECK(std::abs(m.var - sigma * sigma) <= 3.0 * sigma * sigma * std::sqrt(2.0 / n));
}

TEST_CASE("observe input checks", "[observe]") {
    CHECK_THROWS_AS(observe(kSpec, SpectralCoefficients{1.0}, 1, NoiseSpec{}), DomainError);
    CHECK_THROWS_AS(add_noise(std::vector<double>{1.0}, NoiseSpec{}), DomainError);
}
