#pragma once

// Shared helpers for the test binaries: hand-built graph samples and naive
// reference implementations kept independent of the library code paths they
// check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "csbmlab/attention.hpp"
#include "csbmlab/convolution.hpp"
#include "csbmlab/model.hpp"

namespace testsupport {

using csbmlab::AttentionSpec;
using csbmlab::GammaMatrix;
using csbmlab::GraphSample;

/// Builds a GraphSample from explicit parts. Edge features are given per
/// undirected edge in the same order as `edges` (i <= j pairs); h_hint sets
/// the edge-feature dimension when the edge list is empty.
inline GraphSample make_sample(int n, std::vector<std::uint8_t> labels,
                               std::vector<std::pair<int, int>> edges,
                               std::vector<std::vector<double>> edge_features,
                               std::vector<std::vector<double>> node_features, int h_hint = 1) {
    GraphSample sample;
    sample.n = n;
    sample.labels = std::move(labels);
    sample.d = node_features.empty() ? 1 : static_cast<int>(node_features[0].size());
    sample.h = edge_features.empty() ? h_hint : static_cast<int>(edge_features[0].size());

    // Normalize edge order to lexicographic i <= j, mirroring the sampler.
    std::vector<std::size_t> order(edges.size());
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (edges[k].first > edges[k].second) std::swap(edges[k].first, edges[k].second);
        order[k] = k;
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return edges[a] < edges[b]; });

    std::vector<int> degree(n, 0);
    for (const auto& [i, j] : edges) {
        ++degree[i];
        if (i != j) ++degree[j];
    }
    sample.neighbor_offsets.assign(n + 1, 0);
    for (int i = 0; i < n; ++i)
        sample.neighbor_offsets[i + 1] = sample.neighbor_offsets[i] + degree[i];
    sample.neighbor_nodes.resize(sample.neighbor_offsets[n]);
    sample.neighbor_edge.resize(sample.neighbor_offsets[n]);
    std::vector<int> cursor(sample.neighbor_offsets.begin(), sample.neighbor_offsets.end() - 1);
    sample.edges.reserve(edges.size());
    sample.edge_features.reserve(edges.size() * sample.h);
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const auto& [i, j] = edges[order[rank]];
        sample.edges.emplace_back(i, j);
        const auto& feat = edge_features[order[rank]];
        sample.edge_features.insert(sample.edge_features.end(), feat.begin(), feat.end());
        sample.neighbor_nodes[cursor[i]] = j;
        sample.neighbor_edge[cursor[i]++] = static_cast<int>(rank);
        if (i != j) {
            sample.neighbor_nodes[cursor[j]] = i;
            sample.neighbor_edge[cursor[j]++] = static_cast<int>(rank);
        }
    }
    for (const auto& row : node_features)
        sample.node_features.insert(sample.node_features.end(), row.begin(), row.end());
    return sample;
}

/// Gamma matrix with hand-set coefficients, aligned with the sample CSR.
inline GammaMatrix make_gamma(const GraphSample& sample, std::vector<double> coefficients) {
    GammaMatrix gamma;
    gamma.offsets = sample.neighbor_offsets;
    gamma.coefficients = std::move(coefficients);
    return gamma;
}

/// Unstabilized softmax, the oracle for small graphs.
inline std::vector<double> naive_softmax(const std::vector<double>& values) {
    std::vector<double> out(values.size());
    double total = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        out[k] = std::exp(values[k]);
        total += out[k];
    }
    for (auto& x : out) x /= total;
    return out;
}

/// Naive attention coefficients: per node, exp/sum over the neighborhood.
inline std::vector<std::vector<double>> naive_gamma(const GraphSample& sample,
                                                    const AttentionSpec& spec) {
    std::vector<std::vector<double>> rows(sample.n);
    for (int i = 0; i < sample.n; ++i) {
        const auto edge_rows = sample.neighbor_edge_rows(i);
        std::vector<double> scores;
        scores.reserve(edge_rows.size());
        for (const int e : edge_rows) scores.push_back(csbmlab::psi(spec, sample.edge_feature(e)));
        if (!scores.empty()) rows[i] = naive_softmax(scores);
    }
    return rows;
}

/// Triple-loop convolution oracle: no projection shortcut, no shared code.
inline std::vector<double> naive_convolve(const GraphSample& sample,
                                          const std::vector<std::vector<double>>& gamma_rows,
                                          const std::vector<double>& w) {
    std::vector<double> scores(sample.n, 0.0);
    for (int i = 0; i < sample.n; ++i) {
        const auto nbrs = sample.neighbors(i);
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            double dot = 0.0;
            const auto x = sample.node_feature(nbrs[k]);
            for (int c = 0; c < sample.d; ++c) dot += w[c] * x[c];
            scores[i] += gamma_rows[i][k] * dot;
        }
    }
    return scores;
}

/// Benchmark default parameters: n=400, d=11, sigma=zeta=0.1, exact halves.
inline csbmlab::CsbmParams bench_params(double p, double q, double mu_norm, double nu_norm) {
    csbmlab::CsbmParams params;
    params.n = 400;
    params.p = p;
    params.q = q;
    params.sigma = 0.1;
    params.zeta = 0.1;
    const int d = csbmlab::feature_dim_rule(params.n);
    params.mu.assign(d, 0.0);
    params.mu[0] = mu_norm;
    params.nu.assign(d, 0.0);
    params.nu[0] = nu_norm;
    return params;
}

}  // namespace testsupport
