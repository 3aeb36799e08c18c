// fracsrc command line: mlf, forward, observe, estimate, experiment.
//
// Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.

#include <fracsrc/fracsrc.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#ifndef FRACSRC_VERSION
#define FRACSRC_VERSION "unknown"
#endif

namespace {

using namespace fracsrc;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool paper_literal = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.seed, "RNG seed (overrides config 'seed')");
    cmd->add_option("--out", f.out, "output CSV path (default: stdout)");
    cmd->add_flag("--paper-literal", f.paper_literal, "zero mode without the 1/Gamma(alpha) factor");
}

Json base_json(const CommonFlags& f) {
    Json j = f.config.empty() ? Json::object() : read_json_file(f.config);
    if (!j.is_object()) throw ConfigError("config root must be an object");
    if (f.seed) j["seed"] = *f.seed;
    if (f.paper_literal) j["estimator"]["paper_literal"] = true;
    return j;
}

CsvMeta base_meta(const RunConfig& cfg) {
    return {{"version", FRACSRC_VERSION},
            {"seed", std::to_string(cfg.noise.seed)},
            {"config_hash", hex64(config_hash(cfg.effective))},
            {"alpha", format_double(cfg.spec.alpha)},
            {"T", format_double(cfg.spec.T)},
            {"R", cfg.spec.R.description},
            {"zero_mode", to_string(cfg.mode)}};
}

void emit(const std::string& path, const std::function<void(std::ostream&)>& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ostringstream buf;
    write(buf);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    out << buf.str();
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

int run_forward(const CommonFlags& f) {
    const RunConfig cfg = parse_config(base_json(f));
    const auto uT = forward_map(cfg.spec, cfg.source);
    std::vector<double> x(cfg.forward_points), u(cfg.forward_points);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = kPi * static_cast<double>(i) / static_cast<double>(x.size() - 1);
        u[i] = synthesize(uT, x[i]);
    }
    emit(f.out, [&](std::ostream& os) { write_samples(os, "x", "uT", x, u, base_meta(cfg)); });
    return kExitOk;
}

int run_observe(const CommonFlags& f, std::optional<std::size_t> n, std::uint64_t stream) {
    Json j = base_json(f);
    if (n) j["observe"]["n"] = *n;
    const RunConfig cfg = parse_config(j);
    const auto obs = observe(cfg.spec, cfg.source, cfg.n, cfg.noise, stream);
    CsvMeta meta = base_meta(cfg);
    meta.erase(meta.begin() + 1);  // seed is written by write_observations
    meta.emplace_back("v_max", format_double(cfg.noise.v_max));
    meta.emplace_back("sigma_mode", to_string(cfg.noise.sigma_mode));
    emit(f.out, [&](std::ostream& os) { write_observations(os, obs, meta); });
    return kExitOk;
}

int run_estimate(const CommonFlags& f, const std::string& obs_path, std::optional<std::size_t> M_flag,
                 const std::string& dense_path) {
    Json j = base_json(f);
    if (M_flag) j["estimator"]["M"] = *M_flag;
    const RunConfig cfg = parse_config(j);

    std::ifstream in(obs_path);
    if (!in) throw ConfigError("cannot open observations file '" + obs_path + "'");
    const Observations obs = read_observations(in);
    const std::size_t M = cfg.M.value_or(choose_M(obs.size(), cfg.beta));
    if (M >= obs.size())
        throw ConfigError("estimator.M=" + std::to_string(M) + " must be below n=" + std::to_string(obs.size()));

    const Estimate est = estimate(obs, KernelTable(cfg.spec, M), M, cfg.mode);
    CsvMeta meta = base_meta(cfg);
    meta.emplace_back("n", std::to_string(est.n));
    meta.emplace_back("M", std::to_string(est.M));
    meta.emplace_back("observations_seed", std::to_string(obs.seed));
    meta.emplace_back("observations_stream", std::to_string(obs.stream));
    emit(f.out, [&](std::ostream& os) { write_coefficients(os, est.coeffs, meta); });

    if (!dense_path.empty()) {
        const std::size_t pts = cfg.dense_points ? cfg.dense_points : 201;
        if (pts < 2) throw ConfigError("estimator.dense_points must be >= 2");
        std::vector<double> x(pts), v(pts);
        for (std::size_t i = 0; i < pts; ++i) {
            x[i] = kPi * static_cast<double>(i) / static_cast<double>(pts - 1);
            v[i] = synthesize(est.coeffs, x[i]);
        }
        emit(dense_path, [&](std::ostream& os) { write_samples(os, "x", "f_tilde", x, v, meta); });
    }
    return kExitOk;
}

int run_experiment_cmd(const CommonFlags& f, std::optional<std::size_t> replicates, std::optional<unsigned> threads) {
    Json j = base_json(f);
    if (replicates) j["experiment"]["replicates"] = *replicates;
    RunConfig cfg = parse_config(j);
    if (threads) cfg.experiment.threads = *threads;  // does not change results, kept out of the hash

    const ExperimentResult result = run_experiment(cfg.experiment);
    CsvMeta meta = base_meta(cfg);
    meta.emplace_back("beta", format_double(cfg.experiment.beta));
    meta.emplace_back("v_max", format_double(cfg.noise.v_max));
    meta.emplace_back("sigma_mode", to_string(cfg.noise.sigma_mode));
    meta.emplace_back("replicates", std::to_string(cfg.experiment.replicates));
    emit(f.out, [&](std::ostream& os) { write_experiment(os, result, meta); });
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Source reconstruction for 1-D time-fractional diffusion from noisy final-time samples"};
    app.set_version_flag("--version", FRACSRC_VERSION);
    app.require_subcommand(1);

    double alpha = 0.5, beta = 1.0, z = 0.0;
    auto* mlf_cmd = app.add_subcommand("mlf", "evaluate E_{alpha,beta}(z) for z <= 0");
    mlf_cmd->add_option("--alpha", alpha, "alpha in (0, 1]")->required();
    mlf_cmd->add_option("--beta", beta, "beta in (0, 2]")->required();
    mlf_cmd->add_option("--z", z, "argument z <= 0")->required()->allow_extra_args(false);

    CommonFlags fwd_flags;
    auto* fwd_cmd = app.add_subcommand("forward", "final-time solution u(x, T) on a uniform grid (x, uT)");
    add_common(fwd_cmd, fwd_flags);

    CommonFlags obs_flags;
    std::optional<std::size_t> obs_n;
    std::uint64_t obs_stream = 0;
    auto* obs_cmd = app.add_subcommand("observe", "noisy samples on the midpoint grid (k, x_k, u_tilde, sigma)");
    add_common(obs_cmd, obs_flags);
    obs_cmd->add_option("--n", obs_n, "number of samples (overrides observe.n)");
    obs_cmd->add_option("--stream", obs_stream, "noise stream index");

    CommonFlags est_flags;
    std::string est_obs, est_dense;
    std::optional<std::size_t> est_M;
    auto* est_cmd = app.add_subcommand("estimate", "truncated reconstruction from an observations CSV (p, c_tilde)");
    add_common(est_cmd, est_flags);
    est_cmd->add_option("--obs", est_obs, "observations CSV written by 'observe'")->required()->check(CLI::ExistingFile);
    est_cmd->add_option("--M", est_M, "truncation level (overrides estimator.M)");
    est_cmd->add_option("--dense", est_dense, "also write (x, f_tilde) samples to this path");

    CommonFlags exp_flags;
    std::optional<std::size_t> exp_reps;
    std::optional<unsigned> exp_threads;
    auto* exp_cmd = app.add_subcommand("experiment", "Monte Carlo risk study over experiment.n_list");
    add_common(exp_cmd, exp_flags);
    exp_cmd->add_option("--replicates", exp_reps, "replicates per n (overrides experiment.replicates)");
    exp_cmd->add_option("--threads", exp_threads, "worker threads, 0 = all cores");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (mlf_cmd->parsed()) {
            std::printf("%.15g\n", mlf(alpha, beta, z));
            return kExitOk;
        }
        if (fwd_cmd->parsed()) return run_forward(fwd_flags);
        if (obs_cmd->parsed()) return run_observe(obs_flags, obs_n, obs_stream);
        if (est_cmd->parsed()) return run_estimate(est_flags, est_obs, est_M, est_dense);
        if (exp_cmd->parsed()) return run_experiment_cmd(exp_flags, exp_reps, exp_threads);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitConfig;
}
