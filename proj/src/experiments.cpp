#include "csbmlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace csbmlab {

const std::vector<ExperimentKind>& all_experiment_kinds() {
    static const std::vector<ExperimentKind> kinds = {
        ExperimentKind::CleanVaryQPositive, ExperimentKind::CleanVaryQNegative,
        ExperimentKind::CleanVaryMu,        ExperimentKind::NoisyVaryQPositive,
        ExperimentKind::NoisyVaryQNegative, ExperimentKind::NoisyVaryMu,
        ExperimentKind::VaryNuGamma,
    };
    return kinds;
}

std::string kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::CleanVaryQPositive: return "clean_vary_q_positive";
        case ExperimentKind::CleanVaryQNegative: return "clean_vary_q_negative";
        case ExperimentKind::CleanVaryMu: return "clean_vary_mu";
        case ExperimentKind::NoisyVaryQPositive: return "noisy_vary_q_positive";
        case ExperimentKind::NoisyVaryQNegative: return "noisy_vary_q_negative";
        case ExperimentKind::NoisyVaryMu: return "noisy_vary_mu";
        case ExperimentKind::VaryNuGamma: return "vary_nu_gamma";
    }
    return "unknown";
}

ExperimentKind kind_from_name(const std::string& name) {
    for (const auto kind : all_experiment_kinds())
        if (kind_name(kind) == name) return kind;
    throw std::invalid_argument("unknown experiment kind: " + name);
}

bool is_vary_q(ExperimentKind kind) {
    return kind == ExperimentKind::CleanVaryQPositive ||
           kind == ExperimentKind::CleanVaryQNegative ||
           kind == ExperimentKind::NoisyVaryQPositive ||
           kind == ExperimentKind::NoisyVaryQNegative;
}

bool is_noisy(ExperimentKind kind) {
    return kind == ExperimentKind::NoisyVaryQPositive ||
           kind == ExperimentKind::NoisyVaryQNegative ||
           kind == ExperimentKind::NoisyVaryMu;
}

std::string method_name(Method method) { return method == Method::Gat ? "gat" : "gcn"; }

namespace {

double mu_threshold_base(const CsbmParams& params) {
    const double n = static_cast<double>(params.n);
    return params.sigma * std::sqrt(std::log(n) / (n * std::max(params.p, params.q)));
}

double clean_nu_scale(const CsbmParams& params) {
    const double n = static_cast<double>(params.n);
    return params.zeta * std::sqrt(std::log(0.5 * n * n * (params.p + params.q)));
}

std::vector<double> along_e1(double norm, int dim) {
    std::vector<double> v(dim, 0.0);
    v[0] = norm;
    return v;
}

}  // namespace

std::vector<double> derive_mu(ExperimentKind kind, const CsbmParams& params, double grid_value) {
    const double base = mu_threshold_base(params);
    const double ratio_pq = params.p == params.q
                                ? 0.0
                                : (params.p + params.q) / std::abs(params.p - params.q);
    double norm = 0.0;
    switch (kind) {
        case ExperimentKind::CleanVaryQPositive: norm = 5.0 * base; break;
        case ExperimentKind::CleanVaryQNegative: norm = base; break;
        case ExperimentKind::NoisyVaryQPositive:
        case ExperimentKind::NoisyVaryQNegative:
            if (params.p == params.q)
                throw std::invalid_argument("derive_mu: noisy kinds need p != q");
            norm = (kind == ExperimentKind::NoisyVaryQPositive ? 8.0 : 0.1) * ratio_pq * base;
            break;
        case ExperimentKind::CleanVaryMu:
        case ExperimentKind::NoisyVaryMu:
            norm = grid_value;
            break;
        case ExperimentKind::VaryNuGamma:
            norm = 5.0 * base;  // accuracy is incidental here; use the clean positive rule
            break;
    }
    return along_e1(norm, params.d());
}

std::vector<double> derive_nu(ExperimentKind kind, const CsbmParams& params, double grid_value,
                              double noisy_nu_ratio) {
    double norm = 0.0;
    switch (kind) {
        case ExperimentKind::CleanVaryQPositive:
        case ExperimentKind::CleanVaryQNegative:
        case ExperimentKind::CleanVaryMu:
            norm = 100.0 * clean_nu_scale(params);
            break;
        case ExperimentKind::NoisyVaryQPositive:
        case ExperimentKind::NoisyVaryQNegative:
        case ExperimentKind::NoisyVaryMu:
            norm = noisy_nu_ratio * params.zeta;
            break;
        case ExperimentKind::VaryNuGamma:
            norm = grid_value * clean_nu_scale(params);
            break;
    }
    return along_e1(norm, params.h());
}

void SweepConfig::finalize() {
    if (n < 2) throw std::invalid_argument("sweep config: n must be >= 2");
    if (trials < 1) throw std::invalid_argument("sweep config: trials must be >= 1");
    if (!run_gat && !run_gcn) throw std::invalid_argument("sweep config: no methods selected");
    if (noisy_nu_ratio <= 0.0)
        throw std::invalid_argument("sweep config: noisy_nu_ratio must be positive");
    if (is_noisy(kind) && !is_vary_q(kind) && p == q)
        throw std::invalid_argument("sweep config: noisy kinds need p != q");
    if (d == 0) d = feature_dim_rule(n);
    if (h == 0) h = d;

    if (grid_points == 0) {
        const double nn = static_cast<double>(n);
        const double log_n = std::log(nn);
        CsbmParams base;
        base.n = n;
        base.p = p;
        base.q = q;
        base.sigma = sigma;
        base.zeta = zeta;
        switch (kind) {
            case ExperimentKind::CleanVaryQPositive:
            case ExperimentKind::CleanVaryQNegative:
            case ExperimentKind::NoisyVaryQPositive:
            case ExperimentKind::NoisyVaryQNegative:
                grid_start = log_n * log_n / nn;
                grid_stop = std::min(2.0 * p, 0.999);
                grid_points = 15;
                grid_scale = GridScale::Linear;
                break;
            case ExperimentKind::CleanVaryMu:
                grid_start = 0.1 * mu_threshold_base(base);
                grid_stop = 20.0 * sigma * std::sqrt(log_n);
                grid_points = 12;
                grid_scale = GridScale::Log;
                break;
            case ExperimentKind::NoisyVaryMu:
                grid_start = 0.01 * (p + q) / std::abs(p - q) * mu_threshold_base(base);
                grid_stop = 20.0 * sigma * std::sqrt(log_n);
                grid_points = 12;
                grid_scale = GridScale::Log;
                break;
            case ExperimentKind::VaryNuGamma:
                grid_start = 0.01;
                grid_stop = 30.0;
                grid_points = 12;
                grid_scale = GridScale::Log;
                break;
        }
    }
    if (grid_points < 1) throw std::invalid_argument("sweep config: empty grid");
    if (grid_scale == GridScale::Log && grid_start <= 0.0)
        throw std::invalid_argument("sweep config: log grid needs a positive start");
    if (grid_points > 1 && grid_stop < grid_start)
        throw std::invalid_argument("sweep config: grid stop below start");
}

std::vector<double> SweepConfig::grid_values() const {
    std::vector<double> values(grid_points);
    if (grid_points == 1) {
        values[0] = grid_start;
        return values;
    }
    if (grid_scale == GridScale::Linear) {
        const double step = (grid_stop - grid_start) / (grid_points - 1);
        for (int k = 0; k < grid_points; ++k) values[k] = grid_start + step * k;
    } else {
        const double ratio = std::pow(grid_stop / grid_start, 1.0 / (grid_points - 1));
        for (int k = 0; k < grid_points; ++k) values[k] = grid_start * std::pow(ratio, k);
    }
    return values;
}

PointSetup resolve_point(const SweepConfig& config, double grid_value) {
    PointSetup setup;
    setup.grid_value = grid_value;
    CsbmParams& params = setup.params;
    params.n = config.n;
    params.p = config.p;
    params.q = is_vary_q(config.kind) ? grid_value : config.q;
    params.sigma = config.sigma;
    params.zeta = config.zeta;
    params.balance_mode = config.balance_mode;
    params.self_loops = config.self_loops;
    params.mu = along_e1(1.0, config.d);  // placeholder so d/h validate
    params.nu = along_e1(1.0, config.h);
    params.mu = derive_mu(config.kind, params, grid_value);
    params.nu = derive_nu(config.kind, params, grid_value, config.noisy_nu_ratio);
    params.validate();

    setup.classifier = build_classifier(params);

    double nu_norm = 0.0;
    for (const double x : params.nu) nu_norm += x * x;
    if (nu_norm == 0.0) {
        setup.gat_spec.kind = AttentionKind::Uniform;  // no edge signal to attend to
    } else if (is_noisy(config.kind)) {
        setup.gat_spec = build_lipschitz_spec(params, Phi{Phi::Type::Identity});
    } else {
        const double alpha = config.alpha_auto ? auto_alpha(params) : config.alpha;
        setup.gat_spec = build_clean_spec(params, alpha);
    }
    return setup;
}

namespace {

double median_of_nonempty_rows(const GammaMatrix& gamma, const std::vector<double>& ssg) {
    std::vector<double> values;
    values.reserve(ssg.size());
    for (int i = 0; i < gamma.nodes(); ++i)
        if (gamma.offsets[i + 1] > gamma.offsets[i]) values.push_back(ssg[i]);
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size() / 2;
    return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

TrialRecord run_one(const SweepConfig& config, const PointSetup& setup, const GraphSample& sample,
                    Method method) {
    TrialRecord rec;
    rec.method = method;
    AttentionSpec spec = setup.gat_spec;
    if (method == Method::Gcn) spec = AttentionSpec{};  // Uniform
    const auto gamma = attention_coefficients(sample, spec);
    const auto prediction =
        classify(attention_convolve(sample, gamma, setup.classifier), sample.labels,
                 setup.classifier.threshold);
    rec.accuracy = prediction.accuracy;
    rec.perfect = prediction.perfect;
    const auto stats = gamma_stats(sample, gamma, config.uniformity_band);
    rec.intra_gamma_mean = stats.intra_mean;
    rec.inter_gamma_mean = stats.inter_mean;
    const auto [intra_mass, inter_mass] = mass_allocation(sample, gamma);
    rec.intra_mass = intra_mass;
    rec.inter_mass = inter_mass;
    rec.sum_sq_gamma_median = median_of_nonempty_rows(gamma, sum_sq_gamma(gamma));
    return rec;
}

}  // namespace

const PointAggregate& SweepResult::aggregate(int point, Method method) const {
    for (const auto& agg : aggregates)
        if (agg.point == point && agg.method == method) return agg;
    throw std::out_of_range("no aggregate for requested (point, method)");
}

SweepResult run_sweep(SweepConfig config) {
    config.finalize();
    const auto grid = config.grid_values();

    // Resolve every point first so configuration errors beat trial work.
    std::vector<PointSetup> setups;
    setups.reserve(grid.size());
    for (const double value : grid) setups.push_back(resolve_point(config, value));

    std::vector<Method> methods;
    if (config.run_gat) methods.push_back(Method::Gat);
    if (config.run_gcn) methods.push_back(Method::Gcn);

    SweepResult result;
    result.config = config;
    const int points = static_cast<int>(grid.size());
    const int per_trial = static_cast<int>(methods.size());
    result.trials.resize(static_cast<std::size_t>(points) * config.trials * per_trial);

    const int total_tasks = points * config.trials;
    std::atomic<int> next_task{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;

    auto worker = [&] {
        try {
            for (int task = next_task++; task < total_tasks; task = next_task++) {
                const int point = task / config.trials;
                const int trial = task % config.trials;
                const auto& setup = setups[point];
                const std::uint64_t seed =
                    derive_seed(config.master_seed, static_cast<std::uint64_t>(task));
                const auto sample = sample_csbm(setup.params, seed);
                for (int m = 0; m < per_trial; ++m) {
                    TrialRecord rec = run_one(config, setup, sample, methods[m]);
                    rec.point = point;
                    rec.grid_value = grid[point];
                    rec.trial = trial;
                    rec.seed = seed;
                    result.trials[static_cast<std::size_t>(task) * per_trial + m] = rec;
                }
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads = std::min<unsigned>(hw, static_cast<unsigned>(total_tasks));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    // Aggregates are exact functions of the trial rows they summarize.
    for (int point = 0; point < points; ++point) {
        for (int m = 0; m < per_trial; ++m) {
            PointAggregate agg;
            agg.point = point;
            agg.grid_value = grid[point];
            agg.method = methods[m];
            agg.trials = config.trials;
            double acc_sum = 0.0, acc_sq = 0.0;
            for (int trial = 0; trial < config.trials; ++trial) {
                const auto& rec =
                    result.trials[(static_cast<std::size_t>(point) * config.trials + trial) *
                                      per_trial +
                                  m];
                acc_sum += rec.accuracy;
                acc_sq += rec.accuracy * rec.accuracy;
                agg.perfect_freq += rec.perfect ? 1.0 : 0.0;
                agg.intra_gamma_mean += rec.intra_gamma_mean;
                agg.inter_gamma_mean += rec.inter_gamma_mean;
                agg.intra_mass_mean += rec.intra_mass;
                agg.inter_mass_mean += rec.inter_mass;
                agg.sum_sq_gamma_median_mean += rec.sum_sq_gamma_median;
            }
            const double t = static_cast<double>(config.trials);
            agg.accuracy_mean = acc_sum / t;
            agg.accuracy_std =
                config.trials > 1
                    ? std::sqrt(std::max(0.0, (acc_sq - acc_sum * acc_sum / t) / (t - 1.0)))
                    : 0.0;
            agg.perfect_freq /= t;
            agg.intra_gamma_mean /= t;
            agg.inter_gamma_mean /= t;
            agg.intra_mass_mean /= t;
            agg.inter_mass_mean /= t;
            agg.sum_sq_gamma_median_mean /= t;
            result.aggregates.push_back(agg);
        }
    }
    return result;
}

const char* const kTrialCsvHeader =
    "experiment,point,grid_value,trial,method,accuracy,perfect,intra_gamma_mean,"
    "inter_gamma_mean,intra_mass,inter_mass,sum_sq_gamma_median,seed";

const char* const kSummaryCsvHeader =
    "experiment,point,grid_value,method,trials,accuracy_mean,accuracy_std,perfect_freq,"
    "intra_gamma_mean_mean,inter_gamma_mean_mean,intra_mass_mean,inter_mass_mean,"
    "sum_sq_gamma_median_mean";

namespace {

std::string fmt9(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

}  // namespace

void write_trial_csv(const SweepResult& result, std::ostream& os) {
    const std::string experiment = kind_name(result.config.kind);
    os << kTrialCsvHeader << '\n';
    for (const auto& rec : result.trials) {
        os << experiment << ',' << rec.point << ',' << fmt9(rec.grid_value) << ',' << rec.trial
           << ',' << method_name(rec.method) << ',' << fmt9(rec.accuracy) << ','
           << (rec.perfect ? 1 : 0) << ',' << fmt9(rec.intra_gamma_mean) << ','
           << fmt9(rec.inter_gamma_mean) << ',' << fmt9(rec.intra_mass) << ','
           << fmt9(rec.inter_mass) << ',' << fmt9(rec.sum_sq_gamma_median) << ',' << rec.seed
           << '\n';
    }
}

void write_summary_csv(const SweepResult& result, std::ostream& os) {
    const std::string experiment = kind_name(result.config.kind);
    os << kSummaryCsvHeader << '\n';
    for (const auto& agg : result.aggregates) {
        os << experiment << ',' << agg.point << ',' << fmt9(agg.grid_value) << ','
           << method_name(agg.method) << ',' << agg.trials << ',' << fmt9(agg.accuracy_mean)
           << ',' << fmt9(agg.accuracy_std) << ',' << fmt9(agg.perfect_freq) << ','
           << fmt9(agg.intra_gamma_mean) << ',' << fmt9(agg.inter_gamma_mean) << ','
           << fmt9(agg.intra_mass_mean) << ',' << fmt9(agg.inter_mass_mean) << ','
           << fmt9(agg.sum_sq_gamma_median_mean) << '\n';
    }
}

std::string summary_path_for(const std::string& path) {
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + "_summary";
    return path.substr(0, dot) + "_summary" + path.substr(dot);
}

void emit_csv(const SweepResult& result, const std::string& path) {
    std::ofstream data(path);
    if (!data) throw IoError("cannot open output file: " + path);
    write_trial_csv(result, data);
    data.flush();
    if (!data) throw IoError("write failed: " + path);

    const std::string summary_path = summary_path_for(path);
    std::ofstream summary(summary_path);
    if (!summary) throw IoError("cannot open output file: " + summary_path);
    write_summary_csv(result, summary);
    summary.flush();
    if (!summary) throw IoError("write failed: " + summary_path);
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw std::invalid_argument("config: bad boolean for " + key + ": " + value);
}

}  // namespace

std::map<std::string, std::string> parse_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::map<std::string, std::string> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": empty key");
        entries[key] = value;
    }
    return entries;
}

SweepConfig load_sweep_config(const std::string& path) {
    const auto entries = parse_key_value_file(path);
    SweepConfig config;
    bool have_kind = false;
    for (const auto& [key, value] : entries) {
        try {
            if (key == "experiment") {
                config.kind = kind_from_name(value);
                have_kind = true;
            } else if (key == "n") {
                config.n = std::stoi(value);
            } else if (key == "p") {
                config.p = std::stod(value);
            } else if (key == "q") {
                config.q = std::stod(value);
            } else if (key == "sigma") {
                config.sigma = std::stod(value);
            } else if (key == "zeta") {
                config.zeta = std::stod(value);
            } else if (key == "d") {
                config.d = std::stoi(value);
            } else if (key == "h") {
                config.h = std::stoi(value);
            } else if (key == "balance") {
                if (value == "exact_half") {
                    config.balance_mode = BalanceMode::ExactHalf;
                } else if (value == "bernoulli") {
                    config.balance_mode = BalanceMode::Bernoulli;
                } else {
                    throw std::invalid_argument("bad balance mode: " + value);
                }
            } else if (key == "self_loops") {
                config.self_loops = parse_bool(value, key);
            } else if (key == "grid_start") {
                config.grid_start = std::stod(value);
            } else if (key == "grid_stop") {
                config.grid_stop = std::stod(value);
            } else if (key == "grid_points") {
                config.grid_points = std::stoi(value);
            } else if (key == "grid_scale") {
                if (value == "linear") {
                    config.grid_scale = GridScale::Linear;
                } else if (value == "log") {
                    config.grid_scale = GridScale::Log;
                } else {
                    throw std::invalid_argument("bad grid scale: " + value);
                }
            } else if (key == "trials") {
                config.trials = std::stoi(value);
            } else if (key == "seed") {
                config.master_seed = std::stoull(value);
            } else if (key == "methods") {
                config.run_gat = value.find("gat") != std::string::npos;
                config.run_gcn = value.find("gcn") != std::string::npos;
                if (!config.run_gat && !config.run_gcn)
                    throw std::invalid_argument("bad methods list: " + value);
            } else if (key == "out") {
                config.out_path = value;
            } else if (key == "alpha") {
                if (value == "auto") {
                    config.alpha_auto = true;
                } else {
                    config.alpha = std::stod(value);
                    config.alpha_auto = false;
                }
            } else if (key == "noisy_nu_ratio") {
                config.noisy_nu_ratio = std::stod(value);
            } else if (key == "uniformity_band") {
                config.uniformity_band = std::stod(value);
            } else {
                throw std::invalid_argument("unknown config key: " + key);
            }
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("config: bad value for " + key + ": " + value);
        }
    }
    if (!have_kind)
        throw std::invalid_argument("config: missing required key 'experiment' in " + path);
    return config;
}

}  // namespace csbmlab
