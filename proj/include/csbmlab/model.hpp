#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "csbmlab/rng.hpp"

namespace csbmlab {

enum class BalanceMode { Bernoulli, ExactHalf };

/// Parameters of the two-class contextual stochastic block model with
/// Gaussian node and edge features.
///
/// Conventions used throughout:
///   node feature   x_i    = (2*eps_i - 1) * mu + sigma * g,   g ~ N(0, I_d)
///   edge feature   E_{ij} = (2*eps_i - 1)(2*eps_j - 1) * nu + zeta * f
/// so class-0 nodes have mean -mu, intra-edges mean +nu, inter-edges mean -nu.
struct CsbmParams {
    int n = 0;                    // node count
    double p = 0.0;               // intra-class edge probability
    double q = 0.0;               // inter-class edge probability
    std::vector<double> mu;       // node-feature mean, length d
    std::vector<double> nu;       // edge-feature mean, length h
    double sigma = 0.0;           // node-feature noise scale
    double zeta = 0.0;            // edge-feature noise scale
    BalanceMode balance_mode = BalanceMode::ExactHalf;
    bool self_loops = false;      // opt-in A + I variant

    int d() const { return static_cast<int>(mu.size()); }
    int h() const { return static_cast<int>(nu.size()); }

    /// Throws std::invalid_argument on any violated invariant.
    void validate() const;
};

/// d = n / log^2(n) (natural log), rounded to nearest, at least 1.
int feature_dim_rule(int n);

/// One draw of the model. Neighborhoods are stored in CSR form; every
/// directed slot also carries the row of the (undirected) edge feature it
/// shares with its reverse direction.
struct GraphSample {
    int n = 0;
    int d = 0;
    int h = 0;
    std::vector<std::uint8_t> labels;          // eps_i in {0,1}
    std::vector<std::pair<int, int>> edges;    // undirected, i <= j, lexicographic
    std::vector<int> neighbor_offsets;         // size n+1
    std::vector<int> neighbor_nodes;           // CSR targets, sorted per node
    std::vector<int> neighbor_edge;            // CSR slot -> row in `edges`
    std::vector<double> node_features;         // n x d, row-major
    std::vector<double> edge_features;         // |edges| x h, row-major

    std::size_t edge_count() const { return edges.size(); }
    int degree(int i) const { return neighbor_offsets[i + 1] - neighbor_offsets[i]; }

    std::span<const int> neighbors(int i) const {
        return {neighbor_nodes.data() + neighbor_offsets[i],
                neighbor_nodes.data() + neighbor_offsets[i + 1]};
    }
    std::span<const int> neighbor_edge_rows(int i) const {
        return {neighbor_edge.data() + neighbor_offsets[i],
                neighbor_edge.data() + neighbor_offsets[i + 1]};
    }
    std::span<const double> node_feature(int i) const {
        return {node_features.data() + static_cast<std::size_t>(i) * d,
                static_cast<std::size_t>(d)};
    }
    std::span<const double> edge_feature(int edge_row) const {
        return {edge_features.data() + static_cast<std::size_t>(edge_row) * h,
                static_cast<std::size_t>(h)};
    }

    /// Row in `edges` for the undirected pair {i, j}, or -1 if absent.
    int find_edge_row(int i, int j) const;

    /// True when both endpoints share a class.
    bool edge_is_intra(int edge_row) const {
        const auto& [i, j] = edges[edge_row];
        return labels[i] == labels[j];
    }

    bool operator==(const GraphSample&) const = default;
};

/// Class bits; Bernoulli(1/2) per node, or a uniformly random subset of
/// exactly n/2 nodes in ExactHalf mode (requires n even).
std::vector<std::uint8_t> sample_labels(const CsbmParams& params, Rng& rng);

/// Undirected adjacency: each pair {i,j} present independently with
/// probability p (same class) or q (otherwise). Fills edges + CSR arrays.
void sample_graph(const std::vector<std::uint8_t>& labels, const CsbmParams& params,
                  Rng& rng, GraphSample& out);

/// Node and edge features for an already-sampled graph.
void sample_features(const CsbmParams& params, Rng& rng, GraphSample& out);

/// Full draw; a pure function of (params, seed).
GraphSample sample_csbm(const CsbmParams& params, std::uint64_t seed);

/// Debug dump: "labels" block then one "i j f_1 ... f_h" line per edge.
void dump_graph(const GraphSample& sample, std::ostream& os);

}  // namespace csbmlab
