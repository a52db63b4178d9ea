#pragma once

#include <span>
#include <vector>

#include "csbmlab/model.hpp"

namespace csbmlab {

enum class AttentionKind { ConstructedClean, LipschitzLinear, Uniform };

/// Scalar map applied on top of the linear score in the LipschitzLinear kind.
/// Every entry declares its Lipschitz constant L and a bound R on |phi(0)| so
/// preconditions of the near-uniform-coefficient checks are verifiable.
struct Phi {
    enum class Type { Identity, LeakyRelu, TanhScaled };
    Type type = Type::Identity;
    double slope = 0.2;   // LeakyRelu, in (0, 1]
    double scale = 1.0;   // TanhScaled L
    double offset = 0.0;  // TanhScaled R

    double operator()(double x) const;
    double lipschitz() const;
    double bound_at_zero() const;
};

struct AttentionSpec {
    AttentionKind kind = AttentionKind::Uniform;
    std::vector<double> s;  // unit direction, length h; unused for Uniform
    double alpha = 1.0;     // ConstructedClean scaling, > 0
    Phi phi;                // LipschitzLinear only

    void validate(int h) const;
};

/// s = sign(p - q) * nu / ||nu||, alpha as given (1 reproduces the plain
/// dot-product attention). Throws on p == q or nu == 0.
AttentionSpec build_clean_spec(const CsbmParams& params, double alpha = 1.0);

/// Same direction construction with a Lipschitz scalar map on top.
AttentionSpec build_lipschitz_spec(const CsbmParams& params, Phi phi);

/// Geometric-mean alpha: ((||nu||/zeta) * sqrt(log E))^(-1/2) with
/// E = n^2 (p+q) / 2 the expected directed edge count. Small enough that
/// alpha*sqrt(log E) stays small while alpha*||nu||/zeta stays large.
double auto_alpha(const CsbmParams& params);

/// Attention score of one edge feature vector.
double psi(const AttentionSpec& spec, std::span<const double> edge_feature);

/// Per-directed-edge softmax weights, aligned with the sample's CSR arrays.
struct GammaMatrix {
    std::vector<int> offsets;            // size n+1, mirrors sample CSR
    std::vector<double> coefficients;    // one per directed slot

    int nodes() const { return static_cast<int>(offsets.size()) - 1; }
    std::span<const double> row(int i) const {
        return {coefficients.data() + offsets[i], coefficients.data() + offsets[i + 1]};
    }
};

/// Numerically stable softmax (max subtraction); empty input -> empty output.
std::vector<double> softmax_stable(std::span<const double> values);

/// Softmax of psi over each node's neighborhood. Isolated nodes keep an
/// empty row.
GammaMatrix attention_coefficients(const GraphSample& sample, const AttentionSpec& spec);

/// Summary of coefficients split by edge type, plus a near-uniformity
/// measure: the per-node fraction of coefficients inside
/// [1/(c*|N_i|), c/|N_i|] and the fraction of nodes where that is >= 0.9.
struct GammaStats {
    double intra_mean = 0.0, intra_std = 0.0, intra_min = 0.0, intra_max = 0.0;
    double inter_mean = 0.0, inter_std = 0.0, inter_min = 0.0, inter_max = 0.0;
    std::size_t intra_count = 0, inter_count = 0;
    double mean_uniform_fraction = 0.0;   // average per-node in-band fraction
    double frac_nodes_uniform = 0.0;      // nodes with in-band fraction >= 0.9
};

GammaStats gamma_stats(const GraphSample& sample, const GammaMatrix& gamma,
                       double band_constant = 3.0);

/// Sum of squared coefficients per node; equals 1/|N_i| for uniform rows.
std::vector<double> sum_sq_gamma(const GammaMatrix& gamma);

}  // namespace csbmlab
