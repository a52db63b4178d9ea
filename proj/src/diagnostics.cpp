#include "csbmlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace csbmlab {

namespace {

void fill_quantiles(std::vector<double> values, ConcentrationReport& report) {
    if (values.empty()) return;
    std::sort(values.begin(), values.end());
    auto at = [&](double f) {
        const auto idx = static_cast<std::size_t>(std::lround(f * (values.size() - 1)));
        return values[idx];
    };
    report.q50 = at(0.5);
    report.q90 = at(0.9);
    report.q99 = at(0.99);
    report.max_rel_dev = values.back();
}

/// Common neighbors of i and j, not counting i or j themselves.
int common_neighbors(const GraphSample& sample, int i, int j) {
    const auto a = sample.neighbors(i);
    const auto b = sample.neighbors(j);
    int common = 0;
    std::size_t x = 0, y = 0;
    while (x < a.size() && y < b.size()) {
        if (a[x] == b[y]) {
            if (a[x] != i && a[x] != j) ++common;
            ++x;
            ++y;
        } else if (a[x] < b[y]) {
            ++x;
        } else {
            ++y;
        }
    }
    return common;
}

int symmetric_difference_size(const GraphSample& sample, int i, int j) {
    int deg_i = sample.degree(i);
    int deg_j = sample.degree(j);
    // Drop the pair itself from each other's neighborhood.
    if (sample.find_edge_row(i, j) >= 0) {
        --deg_i;
        --deg_j;
    }
    return deg_i + deg_j - 2 * common_neighbors(sample, i, j);
}

}  // namespace

ConcentrationReport check_degree_concentration(const GraphSample& sample,
                                               const CsbmParams& params, double C) {
    ConcentrationReport report;
    report.statistic = "degree";
    report.envelope = C;
    const double n = static_cast<double>(params.n);
    const double center = n * (params.p + params.q) / 2.0;
    report.center = center;
    if (center <= 0.0) {
        report.degenerate = true;
        return report;
    }
    const double bound = C * std::sqrt(std::log(n) / (n * (params.p + params.q)));
    std::vector<double> devs(sample.n);
    for (int i = 0; i < sample.n; ++i) {
        devs[i] = std::abs(sample.degree(i) - center) / center;
        if (devs[i] > bound) ++report.violations;
    }
    report.checked = sample.n;
    fill_quantiles(std::move(devs), report);
    report.pass = report.violations == 0;
    return report;
}

ConcentrationReport check_class_degree_concentration(const GraphSample& sample,
                                                     const CsbmParams& params, double C) {
    ConcentrationReport report;
    report.statistic = "class_degree";
    report.envelope = C;
    const double n = static_cast<double>(params.n);
    const double center_same = n * params.p / 2.0;
    const double center_cross = n * params.q / 2.0;
    report.center = center_same;
    if (center_same <= 0.0 && center_cross <= 0.0) {
        report.degenerate = true;
        return report;
    }
    const double log_n = std::log(n);
    const double bound_same = params.p > 0.0 ? C * std::sqrt(log_n / (n * params.p)) : 0.0;
    const double bound_cross = params.q > 0.0 ? C * std::sqrt(log_n / (n * params.q)) : 0.0;

    std::vector<double> devs;
    devs.reserve(2 * static_cast<std::size_t>(sample.n));
    for (int i = 0; i < sample.n; ++i) {
        int same = 0;
        for (const int j : sample.neighbors(i))
            if (sample.labels[j] == sample.labels[i]) ++same;
        const int cross = sample.degree(i) - same;
        ++report.checked;
        if (center_same > 0.0) {
            const double r = std::abs(same - center_same) / center_same;
            devs.push_back(r);
            if (r > bound_same) ++report.violations;
        } else if (same != 0) {
            ++report.violations;  // p == 0 admits no same-class neighbors
        }
        ++report.checked;
        if (center_cross > 0.0) {
            const double r = std::abs(cross - center_cross) / center_cross;
            devs.push_back(r);
            if (r > bound_cross) ++report.violations;
        } else if (cross != 0) {
            ++report.violations;
        }
    }
    fill_quantiles(std::move(devs), report);
    report.pass = report.violations == 0;
    return report;
}

ConcentrationReport check_uncommon_neighbors(const GraphSample& sample,
                                             const CsbmParams& params, int pair_sample_size,
                                             std::uint64_t pair_seed) {
    ConcentrationReport report;
    report.statistic = "uncommon_neighbors";
    const double n = static_cast<double>(params.n);
    const double log_n = std::log(n);
    if (std::max(params.p, params.q) > 1.0 - 36.0 * log_n / n) report.warned = true;

    const double rate_same = params.p + params.q - params.p * params.p - params.q * params.q;
    const double rate_cross = params.p + params.q - 2.0 * params.p * params.q;
    report.center = n / 2.0 * rate_same;

    auto bound_for = [&](double rate) {
        if (rate <= 0.0) return -1.0;  // vacuous
        const double delta = 3.0 * std::sqrt(log_n / (n * rate));
        return n / 2.0 * rate * (1.0 - delta);
    };
    const double bound_same = bound_for(rate_same);
    const double bound_cross = bound_for(rate_cross);
    if (bound_same <= 0.0 || bound_cross <= 0.0) report.degenerate = true;

    std::vector<std::pair<int, int>> pairs;
    if (pair_sample_size <= 0) {
        if (sample.n > 500)
            throw std::invalid_argument("check_uncommon_neighbors: exact mode needs n <= 500");
        for (int i = 0; i < sample.n; ++i)
            for (int j = i + 1; j < sample.n; ++j) pairs.emplace_back(i, j);
    } else {
        Rng rng(derive_seed(pair_seed, 0x756e636dULL));
        pairs.reserve(pair_sample_size);
        while (static_cast<int>(pairs.size()) < pair_sample_size) {
            const int i = static_cast<int>(rng.uniform_int(sample.n));
            const int j = static_cast<int>(rng.uniform_int(sample.n));
            if (i != j) pairs.emplace_back(std::min(i, j), std::max(i, j));
        }
    }

    std::vector<double> margins;  // observed / bound, for quantile reporting
    margins.reserve(pairs.size());
    for (const auto& [i, j] : pairs) {
        const bool same = sample.labels[i] == sample.labels[j];
        const double bound = same ? bound_same : bound_cross;
        ++report.checked;
        const int observed = symmetric_difference_size(sample, i, j);
        if (bound <= 0.0) continue;  // nonpositive lower bound holds vacuously
        margins.push_back(observed / bound);
        if (observed < bound) ++report.violations;
    }
    fill_quantiles(std::move(margins), report);
    report.envelope = 3.0;
    report.pass = report.checked == 0 ||
                  static_cast<double>(report.violations) <= 0.05 * report.checked;
    return report;
}

ConcentrationReport check_sum_exp_bounds(const GraphSample& sample, const AttentionSpec& spec,
                                         const CsbmParams& params, double c_lo, double c_hi) {
    ConcentrationReport report;
    report.statistic = "sum_exp";
    report.envelope = c_hi;
    const double n = static_cast<double>(params.n);
    const double upper_ref = n * (params.p + params.q);
    const double center_same = n * params.p / 2.0;
    const double center_cross = n * params.q / 2.0;
    report.center = center_same;
    if (upper_ref <= 0.0) {
        report.degenerate = true;
        return report;
    }
    report.observed_lo = std::numeric_limits<double>::infinity();
    report.observed_hi = 0.0;

    std::vector<double> ratios;  // S / center, the lower-side measure
    for (int i = 0; i < sample.n; ++i) {
        const auto nbrs = sample.neighbors(i);
        if (nbrs.empty()) continue;
        const auto edge_rows = sample.neighbor_edge_rows(i);
        double sum_same = 0.0, sum_cross = 0.0;
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            const double w = std::exp(psi(spec, sample.edge_feature(edge_rows[k])));
            if (sample.labels[nbrs[k]] == sample.labels[i])
                sum_same += w;
            else
                sum_cross += w;
        }
        ++report.checked;
        bool ok = true;
        for (const auto& [sum, center] : {std::pair{sum_same, center_same},
                                          std::pair{sum_cross, center_cross}}) {
            const double hi_ratio = sum / upper_ref;
            report.observed_hi = std::max(report.observed_hi, hi_ratio);
            if (hi_ratio > c_hi) ok = false;
            if (center > 0.0) {
                const double lo_ratio = sum / center;
                report.observed_lo = std::min(report.observed_lo, lo_ratio);
                ratios.push_back(lo_ratio);
                if (lo_ratio < c_lo) ok = false;
            }
        }
        if (!ok) ++report.violations;
    }
    fill_quantiles(std::move(ratios), report);
    report.pass = report.checked > 0 &&
                  static_cast<double>(report.violations) <= 0.05 * report.checked;
    return report;
}

ConcentrationReport check_gamma_ratio_bounds(const GraphSample& sample,
                                             const GammaMatrix& gamma,
                                             const CsbmParams& params, double c) {
    ConcentrationReport report;
    report.statistic = "gamma_ratio";
    report.envelope = c;
    const double denom = params.p + params.q;
    if (denom <= 0.0) {
        report.degenerate = true;
        return report;
    }
    const double band_unit = std::abs(params.p - params.q) / denom;
    report.center = band_unit;
    if (band_unit == 0.0) report.degenerate = true;

    std::vector<double> constants;
    double diff_sum = 0.0;
    long diff_count = 0;
    for (int i = 0; i < sample.n; ++i) {
        const auto row = gamma.row(i);
        if (row.empty()) continue;
        const auto nbrs = sample.neighbors(i);
        double intra_mass = 0.0, inter_mass = 0.0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (sample.labels[nbrs[k]] == sample.labels[i])
                intra_mass += row[k];
            else
                inter_mass += row[k];
        }
        const double diff = inter_mass - intra_mass;
        diff_sum += diff;
        ++diff_count;
        if (band_unit > 0.0) {
            ++report.checked;
            const double c_i = std::abs(diff) / band_unit;
            constants.push_back(c_i);
            if (c_i > c) ++report.violations;
        }
    }
    report.mean_signed = diff_count > 0 ? diff_sum / diff_count : 0.0;
    fill_quantiles(std::move(constants), report);
    if (report.degenerate) {
        // Band collapses at p == q; require only that the difference
        // concentrates at zero across nodes.
        report.pass = std::abs(report.mean_signed) <= 0.03;
    } else {
        report.pass = report.checked > 0 &&
                      static_cast<double>(report.violations) <= 0.05 * report.checked;
    }
    return report;
}

}  // namespace csbmlab
