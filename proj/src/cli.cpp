#include "csbmlab/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csbmlab/diagnostics.hpp"
#include "csbmlab/experiments.hpp"

namespace csbmlab {

namespace {

std::string default_out_path(const std::string& filename) {
    if (const char* dir = std::getenv("CSBMLAB_OUT_DIR"); dir != nullptr && *dir != '\0')
        return std::string(dir) + "/" + filename;
    return filename;
}

int run_sweep_command(const std::string& config_path, std::optional<std::uint64_t> seed,
                      std::optional<int> trials, std::optional<std::string> out,
                      std::optional<std::string> alpha) {
    SweepConfig config = load_sweep_config(config_path);
    if (seed) config.master_seed = *seed;
    if (trials) config.trials = *trials;
    if (out) config.out_path = *out;
    if (alpha) {
        if (*alpha == "auto") {
            config.alpha_auto = true;
        } else {
            config.alpha = std::stod(*alpha);
            config.alpha_auto = false;
        }
    }
    if (config.out_path.empty())
        config.out_path = default_out_path(kind_name(config.kind) + ".csv");
    const auto result = run_sweep(config);
    emit_csv(result, config.out_path);
    std::cout << "wrote " << result.trials.size() << " trial rows to " << config.out_path
              << " (+ " << summary_path_for(config.out_path) << ")\n";
    return 0;
}

struct DiagnoseConfig {
    CsbmParams params;
    int seeds = 100;
    std::uint64_t master_seed = 1;
    int pair_sample = 200;
    double envelope_c = 4.0;
    double ratio_c = 3.0;
    double sum_exp_lo = 0.2;
    double sum_exp_hi = 5.0;
    double nu_ratio = 0.1;  // ||nu||/zeta for the attention-driven checks
    std::vector<std::string> checks = {"degree", "class_degree", "uncommon", "sum_exp",
                                       "gamma_ratio"};
    std::string out_path;
};

DiagnoseConfig load_diagnose_config(const std::string& path) {
    const auto entries = parse_key_value_file(path);
    DiagnoseConfig config;
    CsbmParams& params = config.params;
    params.n = 400;
    params.p = 0.4;
    params.q = 0.33;
    params.sigma = 0.1;
    params.zeta = 0.1;
    int d = 0, h = 0;
    double mu_norm = 1.0;
    for (const auto& [key, value] : entries) {
        try {
            if (key == "n") {
                params.n = std::stoi(value);
            } else if (key == "p") {
                params.p = std::stod(value);
            } else if (key == "q") {
                params.q = std::stod(value);
            } else if (key == "sigma") {
                params.sigma = std::stod(value);
            } else if (key == "zeta") {
                params.zeta = std::stod(value);
            } else if (key == "d") {
                d = std::stoi(value);
            } else if (key == "h") {
                h = std::stoi(value);
            } else if (key == "mu_norm") {
                mu_norm = std::stod(value);
            } else if (key == "nu_ratio") {
                config.nu_ratio = std::stod(value);
            } else if (key == "balance") {
                if (value == "exact_half") {
                    params.balance_mode = BalanceMode::ExactHalf;
                } else if (value == "bernoulli") {
                    params.balance_mode = BalanceMode::Bernoulli;
                } else {
                    throw std::invalid_argument("bad balance mode: " + value);
                }
            } else if (key == "self_loops") {
                params.self_loops = value == "true" || value == "1" || value == "yes";
            } else if (key == "seeds") {
                config.seeds = std::stoi(value);
            } else if (key == "seed") {
                config.master_seed = std::stoull(value);
            } else if (key == "pair_sample") {
                config.pair_sample = std::stoi(value);
            } else if (key == "envelope_c") {
                config.envelope_c = std::stod(value);
            } else if (key == "ratio_c") {
                config.ratio_c = std::stod(value);
            } else if (key == "sum_exp_lo") {
                config.sum_exp_lo = std::stod(value);
            } else if (key == "sum_exp_hi") {
                config.sum_exp_hi = std::stod(value);
            } else if (key == "checks") {
                config.checks.clear();
                std::string item;
                for (const char c : value + ",") {
                    if (c == ',') {
                        if (!item.empty()) config.checks.push_back(item);
                        item.clear();
                    } else if (!std::isspace(static_cast<unsigned char>(c))) {
                        item += c;
                    }
                }
            } else if (key == "out") {
                config.out_path = value;
            } else {
                throw std::invalid_argument("unknown config key: " + key);
            }
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("config: bad value for " + key + ": " + value);
        }
    }
    if (d == 0) d = feature_dim_rule(params.n);
    if (h == 0) h = d;
    params.mu.assign(d, 0.0);
    params.mu[0] = mu_norm;
    params.nu.assign(h, 0.0);
    params.nu[0] = config.nu_ratio * params.zeta;
    params.validate();
    return config;
}

void write_report_row(std::ostream& os, std::uint64_t seed, const ConcentrationReport& r) {
    auto fmt = [](double x) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.9g", x);
        return std::string(buf);
    };
    os << seed << ',' << r.statistic << ',' << (r.pass ? 1 : 0) << ',' << r.violations << ','
       << r.checked << ',' << fmt(r.center) << ',' << fmt(r.envelope) << ','
       << fmt(r.max_rel_dev) << ',' << fmt(r.q50) << ',' << fmt(r.q90) << ',' << fmt(r.q99)
       << ',' << (r.degenerate ? 1 : 0) << ',' << (r.warned ? 1 : 0) << ','
       << fmt(r.observed_lo) << ',' << fmt(r.observed_hi) << ',' << fmt(r.mean_signed) << '\n';
}

int run_diagnose_command(const std::string& config_path, std::optional<std::uint64_t> seed,
                         std::optional<int> seeds, std::optional<std::string> out) {
    DiagnoseConfig config = load_diagnose_config(config_path);
    if (seed) config.master_seed = *seed;
    if (seeds) config.seeds = *seeds;
    if (out) config.out_path = *out;
    if (config.out_path.empty()) config.out_path = default_out_path("diagnostics.csv");

    const bool needs_spec =
        std::find(config.checks.begin(), config.checks.end(), "sum_exp") != config.checks.end() ||
        std::find(config.checks.begin(), config.checks.end(), "gamma_ratio") !=
            config.checks.end();
    AttentionSpec spec;
    if (needs_spec) spec = build_lipschitz_spec(config.params, Phi{Phi::Type::Identity});

    std::ofstream os(config.out_path);
    if (!os) throw IoError("cannot open output file: " + config.out_path);
    os << "seed,statistic,pass,violations,checked,center,envelope,max_rel_dev,q50,q90,q99,"
          "degenerate,warned,observed_lo,observed_hi,mean_signed\n";

    int failures = 0;
    for (int k = 0; k < config.seeds; ++k) {
        const std::uint64_t trial_seed = derive_seed(config.master_seed, k);
        const auto sample = sample_csbm(config.params, trial_seed);
        for (const auto& check : config.checks) {
            ConcentrationReport report;
            if (check == "degree") {
                report = check_degree_concentration(sample, config.params, config.envelope_c);
            } else if (check == "class_degree") {
                report =
                    check_class_degree_concentration(sample, config.params, config.envelope_c);
            } else if (check == "uncommon") {
                report = check_uncommon_neighbors(sample, config.params, config.pair_sample,
                                                  trial_seed);
            } else if (check == "sum_exp") {
                report = check_sum_exp_bounds(sample, spec, config.params, config.sum_exp_lo,
                                              config.sum_exp_hi);
            } else if (check == "gamma_ratio") {
                const auto gamma = attention_coefficients(sample, spec);
                report = check_gamma_ratio_bounds(sample, gamma, config.params, config.ratio_c);
            } else {
                throw std::invalid_argument("unknown diagnostic check: " + check);
            }
            if (!report.pass) ++failures;
            write_report_row(os, trial_seed, report);
        }
    }
    os.flush();
    if (!os) throw IoError("write failed: " + config.out_path);
    std::cout << "wrote " << config.seeds << " seeds x " << config.checks.size()
              << " checks to " << config.out_path << " (" << failures << " failing rows)\n";
    return 0;
}

int run_sample_command(const CsbmParams& params, std::uint64_t seed,
                       const std::string& out_path) {
    const auto sample = sample_csbm(params, seed);
    if (out_path.empty() || out_path == "-") {
        dump_graph(sample, std::cout);
    } else {
        std::ofstream os(out_path);
        if (!os) throw IoError("cannot open output file: " + out_path);
        dump_graph(sample, os);
        os.flush();
        if (!os) throw IoError("write failed: " + out_path);
    }
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"CSBM graph attention laboratory"};
    app.require_subcommand(1);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run a configured experiment sweep");
    std::string sweep_config_path;
    sweep->add_option("config", sweep_config_path, "key=value config file")->required();
    std::optional<std::uint64_t> seed_override;
    std::optional<int> trials_override;
    std::optional<std::string> out_override;
    std::optional<std::string> alpha_override;
    sweep->add_option("--seed", seed_override, "master seed override");
    sweep->add_option("--trials", trials_override, "trials per grid point override");
    sweep->add_option("--out", out_override, "output CSV path override");
    sweep->add_option("--alpha", alpha_override, "attention scaling (number or 'auto')");

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "dump one sampled graph as text");
    CsbmParams sample_params;
    sample_params.n = 400;
    sample_params.p = 0.4;
    sample_params.q = 0.33;
    sample_params.sigma = 0.1;
    sample_params.zeta = 0.1;
    int sample_d = 0, sample_h = 0;
    double sample_mu_norm = 1.0, sample_nu_norm = 1.0;
    std::uint64_t sample_seed = 1;
    std::string sample_balance = "exact_half";
    std::string sample_out;
    sample_cmd->add_option("--n", sample_params.n, "node count");
    sample_cmd->add_option("--p", sample_params.p, "intra-class edge probability");
    sample_cmd->add_option("--q", sample_params.q, "inter-class edge probability");
    sample_cmd->add_option("--sigma", sample_params.sigma, "node noise scale");
    sample_cmd->add_option("--zeta", sample_params.zeta, "edge noise scale");
    sample_cmd->add_option("--node-dim", sample_d, "node feature dimension (0 = n/log^2 n)");
    sample_cmd->add_option("--edge-dim", sample_h, "edge feature dimension (0 = same as d)");
    sample_cmd->add_option("--mu-norm", sample_mu_norm, "node mean norm along e1");
    sample_cmd->add_option("--nu-norm", sample_nu_norm, "edge mean norm along e1");
    sample_cmd->add_option("--seed", sample_seed, "sample seed");
    sample_cmd->add_option("--balance", sample_balance, "exact_half | bernoulli");
    sample_cmd->add_flag("--self-loops", sample_params.self_loops, "add the A + I self loops");
    sample_cmd->add_option("--out", sample_out, "output file ('-' = stdout)");

    // diagnose
    auto* diagnose = app.add_subcommand("diagnose", "run concentration diagnostics");
    std::string diagnose_config_path;
    diagnose->add_option("config", diagnose_config_path, "key=value config file")->required();
    std::optional<std::uint64_t> diag_seed;
    std::optional<int> diag_seeds;
    std::optional<std::string> diag_out;
    diagnose->add_option("--seed", diag_seed, "master seed override");
    diagnose->add_option("--seeds", diag_seeds, "number of seeds override");
    diagnose->add_option("--out", diag_out, "output CSV path override");

    auto* list_cmd = app.add_subcommand("list-experiments", "print the experiment kinds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sweep->parsed())
            return run_sweep_command(sweep_config_path, seed_override, trials_override,
                                     out_override, alpha_override);
        if (sample_cmd->parsed()) {
            if (sample_d == 0) sample_d = feature_dim_rule(sample_params.n);
            if (sample_h == 0) sample_h = sample_d;
            sample_params.mu.assign(sample_d, 0.0);
            sample_params.mu[0] = sample_mu_norm;
            sample_params.nu.assign(sample_h, 0.0);
            sample_params.nu[0] = sample_nu_norm;
            if (sample_balance == "exact_half") {
                sample_params.balance_mode = BalanceMode::ExactHalf;
            } else if (sample_balance == "bernoulli") {
                sample_params.balance_mode = BalanceMode::Bernoulli;
            } else {
                throw std::invalid_argument("bad balance mode: " + sample_balance);
            }
            return run_sample_command(sample_params, sample_seed, sample_out);
        }
        if (diagnose->parsed())
            return run_diagnose_command(diagnose_config_path, diag_seed, diag_seeds, diag_out);
        if (list_cmd->parsed()) {
            for (const auto kind : all_experiment_kinds()) std::cout << kind_name(kind) << '\n';
            return 0;
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace csbmlab
