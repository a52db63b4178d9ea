#include "csbmlab/attention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace csbmlab {

double Phi::operator()(double x) const {
    switch (type) {
        case Type::Identity: return x;
        case Type::LeakyRelu: return x > 0.0 ? x : slope * x;
        case Type::TanhScaled: return offset + scale * std::tanh(x);
    }
    return x;
}

double Phi::lipschitz() const {
    switch (type) {
        case Type::Identity: return 1.0;
        case Type::LeakyRelu: return std::max(1.0, slope);
        case Type::TanhScaled: return scale;
    }
    return 1.0;
}

double Phi::bound_at_zero() const {
    return type == Type::TanhScaled ? std::abs(offset) : 0.0;
}

namespace {

double norm(std::span<const double> v) {
    double s = 0.0;
    for (const double x : v) s += x * x;
    return std::sqrt(s);
}

std::vector<double> unit_direction(const CsbmParams& params) {
    if (params.p == params.q)
        throw std::invalid_argument("attention spec: p == q leaves the edge direction undefined");
    const double nu_norm = norm(params.nu);
    if (nu_norm == 0.0)
        throw std::invalid_argument("attention spec: nu must be nonzero");
    const double sign = params.p > params.q ? 1.0 : -1.0;
    std::vector<double> s(params.nu);
    for (auto& x : s) x *= sign / nu_norm;
    return s;
}

}  // namespace

void AttentionSpec::validate(int h) const {
    if (kind == AttentionKind::Uniform) return;
    if (static_cast<int>(s.size()) != h)
        throw std::invalid_argument("attention spec: s has wrong dimension");
    if (std::abs(norm(s) - 1.0) > 1e-12)
        throw std::invalid_argument("attention spec: s must be unit norm");
    if (kind == AttentionKind::ConstructedClean && alpha <= 0.0)
        throw std::invalid_argument("attention spec: alpha must be positive");
}

AttentionSpec build_clean_spec(const CsbmParams& params, double alpha) {
    AttentionSpec spec;
    spec.kind = AttentionKind::ConstructedClean;
    spec.s = unit_direction(params);
    spec.alpha = alpha;
    spec.validate(params.h());
    return spec;
}

AttentionSpec build_lipschitz_spec(const CsbmParams& params, Phi phi) {
    AttentionSpec spec;
    spec.kind = AttentionKind::LipschitzLinear;
    spec.s = unit_direction(params);
    spec.phi = phi;
    spec.validate(params.h());
    return spec;
}

double auto_alpha(const CsbmParams& params) {
    const double nu_norm = norm(params.nu);
    if (params.zeta <= 0.0 || nu_norm == 0.0)
        throw std::invalid_argument("auto_alpha: requires zeta > 0 and nu != 0");
    const double edges = 0.5 * static_cast<double>(params.n) * params.n * (params.p + params.q);
    const double log_edges = std::log(std::max(edges, 2.0));
    return 1.0 / std::sqrt((nu_norm / params.zeta) * std::sqrt(log_edges));
}

double psi(const AttentionSpec& spec, std::span<const double> edge_feature) {
    if (spec.kind == AttentionKind::Uniform) return 0.0;
    if (edge_feature.size() != spec.s.size())
        throw std::invalid_argument("psi: edge feature dimension mismatch");
    double dot = 0.0;
    for (std::size_t k = 0; k < spec.s.size(); ++k) dot += spec.s[k] * edge_feature[k];
    if (spec.kind == AttentionKind::ConstructedClean) return spec.alpha * dot;
    return spec.phi(dot);
}

std::vector<double> softmax_stable(std::span<const double> values) {
    std::vector<double> out(values.size());
    if (values.empty()) return out;
    const double m = *std::max_element(values.begin(), values.end());
    double total = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        out[k] = std::exp(values[k] - m);
        total += out[k];
    }
    for (auto& x : out) x /= total;
    return out;
}

GammaMatrix attention_coefficients(const GraphSample& sample, const AttentionSpec& spec) {
    spec.validate(sample.h);
    GammaMatrix gamma;
    gamma.offsets = sample.neighbor_offsets;
    gamma.coefficients.resize(sample.neighbor_nodes.size());
    std::vector<double> scores;
    for (int i = 0; i < sample.n; ++i) {
        const auto edge_rows = sample.neighbor_edge_rows(i);
        if (edge_rows.empty()) continue;
        scores.resize(edge_rows.size());
        for (std::size_t k = 0; k < edge_rows.size(); ++k)
            scores[k] = psi(spec, sample.edge_feature(edge_rows[k]));
        const auto row = softmax_stable(scores);
        std::copy(row.begin(), row.end(), gamma.coefficients.begin() + gamma.offsets[i]);
    }
    return gamma;
}

namespace {

struct Accumulator {
    double sum = 0.0, sum_sq = 0.0;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    std::size_t count = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        min = std::min(min, x);
        max = std::max(max, x);
        ++count;
    }
    void write(double& mean, double& stdev, double& mn, double& mx) const {
        if (count == 0) {
            mean = stdev = mn = mx = 0.0;
            return;
        }
        mean = sum / static_cast<double>(count);
        const double var = std::max(0.0, sum_sq / static_cast<double>(count) - mean * mean);
        stdev = std::sqrt(var);
        mn = min;
        mx = max;
    }
};

}  // namespace

GammaStats gamma_stats(const GraphSample& sample, const GammaMatrix& gamma,
                       double band_constant) {
    GammaStats stats;
    Accumulator intra, inter;
    double uniform_fraction_sum = 0.0;
    int non_isolated = 0;
    int uniform_nodes = 0;
    for (int i = 0; i < sample.n; ++i) {
        const auto row = gamma.row(i);
        if (row.empty()) continue;
        ++non_isolated;
        const double deg = static_cast<double>(row.size());
        const double lo = 1.0 / (band_constant * deg);
        const double hi = band_constant / deg;
        const auto edge_rows = sample.neighbor_edge_rows(i);
        std::size_t in_band = 0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (sample.edge_is_intra(edge_rows[k]))
                intra.add(row[k]);
            else
                inter.add(row[k]);
            if (row[k] >= lo && row[k] <= hi) ++in_band;
        }
        const double fraction = static_cast<double>(in_band) / deg;
        uniform_fraction_sum += fraction;
        if (fraction >= 0.9) ++uniform_nodes;
    }
    intra.write(stats.intra_mean, stats.intra_std, stats.intra_min, stats.intra_max);
    inter.write(stats.inter_mean, stats.inter_std, stats.inter_min, stats.inter_max);
    stats.intra_count = intra.count;
    stats.inter_count = inter.count;
    if (non_isolated > 0) {
        stats.mean_uniform_fraction = uniform_fraction_sum / non_isolated;
        stats.frac_nodes_uniform = static_cast<double>(uniform_nodes) / non_isolated;
    }
    return stats;
}

std::vector<double> sum_sq_gamma(const GammaMatrix& gamma) {
    std::vector<double> out(gamma.nodes(), 0.0);
    for (int i = 0; i < gamma.nodes(); ++i) {
        double s = 0.0;
        for (const double g : gamma.row(i)) s += g * g;
        out[i] = s;
    }
    return out;
}

}  // namespace csbmlab
