#include "csbmlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace csbmlab {

void CsbmParams::validate() const {
    if (n < 2) throw std::invalid_argument("CsbmParams: n must be >= 2");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("CsbmParams: p must be in [0,1]");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("CsbmParams: q must be in [0,1]");
    if (sigma < 0.0) throw std::invalid_argument("CsbmParams: sigma must be >= 0");
    if (zeta < 0.0) throw std::invalid_argument("CsbmParams: zeta must be >= 0");
    if (d() < 1) throw std::invalid_argument("CsbmParams: node-feature dimension must be >= 1");
    if (h() < 1) throw std::invalid_argument("CsbmParams: edge-feature dimension must be >= 1");
    if (balance_mode == BalanceMode::ExactHalf && n % 2 != 0)
        throw std::invalid_argument("CsbmParams: exact_half balance requires even n");
}

int feature_dim_rule(int n) {
    const double log_n = std::log(static_cast<double>(n));
    const int d = static_cast<int>(std::lround(n / (log_n * log_n)));
    return std::max(1, d);
}

int GraphSample::find_edge_row(int i, int j) const {
    const auto nbrs = neighbors(i);
    const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), j);
    if (it == nbrs.end() || *it != j) return -1;
    return neighbor_edge[neighbor_offsets[i] + static_cast<int>(it - nbrs.begin())];
}

std::vector<std::uint8_t> sample_labels(const CsbmParams& params, Rng& rng) {
    params.validate();
    std::vector<std::uint8_t> labels(params.n, 0);
    if (params.balance_mode == BalanceMode::Bernoulli) {
        for (auto& bit : labels) bit = rng.bernoulli(0.5) ? 1 : 0;
    } else {
        std::fill(labels.begin() + params.n / 2, labels.end(), std::uint8_t{1});
        // Fisher-Yates; makes every size-n/2 subset equally likely.
        for (int i = params.n - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i) + 1));
            std::swap(labels[i], labels[j]);
        }
    }
    return labels;
}

void sample_graph(const std::vector<std::uint8_t>& labels, const CsbmParams& params,
                  Rng& rng, GraphSample& out) {
    const int n = static_cast<int>(labels.size());
    out.n = n;
    out.labels = labels;
    out.edges.clear();
    for (int i = 0; i < n; ++i) {
        if (params.self_loops) out.edges.emplace_back(i, i);
        for (int j = i + 1; j < n; ++j) {
            const double prob = labels[i] == labels[j] ? params.p : params.q;
            if (rng.bernoulli(prob)) out.edges.emplace_back(i, j);
        }
    }

    // CSR over directed slots; self-loops contribute a single slot.
    std::vector<int> degree(n, 0);
    for (const auto& [i, j] : out.edges) {
        ++degree[i];
        if (i != j) ++degree[j];
    }
    out.neighbor_offsets.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) out.neighbor_offsets[i + 1] = out.neighbor_offsets[i] + degree[i];
    out.neighbor_nodes.resize(out.neighbor_offsets[n]);
    out.neighbor_edge.resize(out.neighbor_offsets[n]);
    std::vector<int> cursor(out.neighbor_offsets.begin(), out.neighbor_offsets.end() - 1);
    for (int row = 0; row < static_cast<int>(out.edges.size()); ++row) {
        const auto& [i, j] = out.edges[row];
        out.neighbor_nodes[cursor[i]] = j;
        out.neighbor_edge[cursor[i]++] = row;
        if (i != j) {
            out.neighbor_nodes[cursor[j]] = i;
            out.neighbor_edge[cursor[j]++] = row;
        }
    }
    // Per-node lists come out sorted because edges are generated in
    // lexicographic order; keep that as an invariant for binary search.
}

void sample_features(const CsbmParams& params, Rng& rng, GraphSample& out) {
    out.d = params.d();
    out.h = params.h();
    out.node_features.resize(static_cast<std::size_t>(out.n) * out.d);
    for (int i = 0; i < out.n; ++i) {
        const double sign = out.labels[i] ? 1.0 : -1.0;
        double* row = out.node_features.data() + static_cast<std::size_t>(i) * out.d;
        for (int k = 0; k < out.d; ++k)
            row[k] = sign * params.mu[k] + params.sigma * rng.normal();
    }
    out.edge_features.resize(out.edges.size() * out.h);
    for (std::size_t e = 0; e < out.edges.size(); ++e) {
        const auto& [i, j] = out.edges[e];
        const double sign = out.labels[i] == out.labels[j] ? 1.0 : -1.0;
        double* row = out.edge_features.data() + e * out.h;
        for (int k = 0; k < out.h; ++k)
            row[k] = sign * params.nu[k] + params.zeta * rng.normal();
    }
}

GraphSample sample_csbm(const CsbmParams& params, std::uint64_t seed) {
    params.validate();
    Rng rng(seed);
    GraphSample sample;
    const auto labels = sample_labels(params, rng);
    sample_graph(labels, params, rng, sample);
    sample_features(params, rng, sample);
    return sample;
}

void dump_graph(const GraphSample& sample, std::ostream& os) {
    os << "labels";
    for (const auto bit : sample.labels) os << ' ' << static_cast<int>(bit);
    os << '\n';
    os.precision(17);
    for (std::size_t e = 0; e < sample.edges.size(); ++e) {
        os << sample.edges[e].first << ' ' << sample.edges[e].second;
        for (const double f : sample.edge_feature(static_cast<int>(e))) os << ' ' << f;
        os << '\n';
    }
}

}  // namespace csbmlab
