#pragma once

#include <utility>
#include <vector>

#include "csbmlab/attention.hpp"
#include "csbmlab/model.hpp"

namespace csbmlab {

/// Linear readout applied after the attention convolution.
struct ClassifierSpec {
    std::vector<double> w;    // unit norm, length d
    double threshold = 0.0;
    int orientation = 1;      // sign(p - q) baked into w

    void validate(int d) const;
};

struct PredictionResult {
    std::vector<double> scores;
    std::vector<std::uint8_t> predicted;
    double accuracy = 0.0;
    bool perfect = false;
    std::pair<double, double> per_class_accuracy{0.0, 0.0};
};

/// w = sign(p - q) * mu / ||mu||, threshold 0. Throws on p == q or mu == 0.
ClassifierSpec build_classifier(const CsbmParams& params);

/// score_i = sum_{j in N_i} gamma_ij * (w^T x_j), computed in projected form.
/// Isolated nodes score 0. Throws if gamma does not mirror the adjacency.
std::vector<double> attention_convolve(const GraphSample& sample, const GammaMatrix& gamma,
                                       const ClassifierSpec& classifier);

/// Threshold rule: predict class 1 on score > threshold, ties go to class 0.
PredictionResult classify(std::vector<double> scores,
                          const std::vector<std::uint8_t>& labels, double threshold = 0.0);

/// Uniform-coefficient special case, the graph-convolution baseline. Defined
/// as the attention pipeline run with the Uniform spec, so the two agree
/// bit for bit.
PredictionResult graph_convolution_baseline(const GraphSample& sample,
                                            const ClassifierSpec& classifier);

/// Percentage of total coefficient mass on intra- vs inter-edges, summed over
/// directed edges. The two components add to 100 (0/0 -> {0, 0}).
std::pair<double, double> mass_allocation(const GraphSample& sample, const GammaMatrix& gamma);

}  // namespace csbmlab
