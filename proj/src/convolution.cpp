#include "csbmlab/convolution.hpp"

#include <cmath>
#include <stdexcept>

namespace csbmlab {

void ClassifierSpec::validate(int d) const {
    if (static_cast<int>(w.size()) != d)
        throw std::invalid_argument("classifier: w has wrong dimension");
    double s = 0.0;
    for (const double x : w) s += x * x;
    if (std::abs(std::sqrt(s) - 1.0) > 1e-12)
        throw std::invalid_argument("classifier: w must be unit norm");
}

ClassifierSpec build_classifier(const CsbmParams& params) {
    if (params.p == params.q)
        throw std::invalid_argument("classifier: p == q leaves the orientation undefined");
    double mu_norm = 0.0;
    for (const double x : params.mu) mu_norm += x * x;
    mu_norm = std::sqrt(mu_norm);
    if (mu_norm == 0.0)
        throw std::invalid_argument("classifier: mu must be nonzero");
    ClassifierSpec spec;
    spec.orientation = params.p > params.q ? 1 : -1;
    spec.w = params.mu;
    for (auto& x : spec.w) x *= spec.orientation / mu_norm;
    spec.threshold = 0.0;
    return spec;
}

std::vector<double> attention_convolve(const GraphSample& sample, const GammaMatrix& gamma,
                                       const ClassifierSpec& classifier) {
    classifier.validate(sample.d);
    if (gamma.offsets != sample.neighbor_offsets)
        throw std::invalid_argument("attention_convolve: gamma does not match the adjacency");

    // Project once per node, then one multiply-add per directed edge.
    std::vector<double> projected(sample.n, 0.0);
    for (int j = 0; j < sample.n; ++j) {
        const auto x = sample.node_feature(j);
        double dot = 0.0;
        for (int k = 0; k < sample.d; ++k) dot += classifier.w[k] * x[k];
        projected[j] = dot;
    }
    std::vector<double> scores(sample.n, 0.0);
    for (int i = 0; i < sample.n; ++i) {
        const auto nbrs = sample.neighbors(i);
        const auto row = gamma.row(i);
        double s = 0.0;
        for (std::size_t k = 0; k < nbrs.size(); ++k) s += row[k] * projected[nbrs[k]];
        scores[i] = s;
    }
    return scores;
}

PredictionResult classify(std::vector<double> scores,
                          const std::vector<std::uint8_t>& labels, double threshold) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("classify: scores/labels length mismatch");
    PredictionResult result;
    result.predicted.resize(scores.size());
    std::size_t correct = 0;
    std::size_t class_count[2] = {0, 0};
    std::size_t class_correct[2] = {0, 0};
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const std::uint8_t pred = scores[i] > threshold ? 1 : 0;
        result.predicted[i] = pred;
        ++class_count[labels[i]];
        if (pred == labels[i]) {
            ++correct;
            ++class_correct[labels[i]];
        }
    }
    result.accuracy = scores.empty() ? 0.0
                                     : static_cast<double>(correct) / static_cast<double>(scores.size());
    result.perfect = correct == scores.size() && !scores.empty();
    auto class_acc = [&](int c) {
        return class_count[c] == 0 ? 1.0
                                   : static_cast<double>(class_correct[c]) /
                                         static_cast<double>(class_count[c]);
    };
    result.per_class_accuracy = {class_acc(0), class_acc(1)};
    result.scores = std::move(scores);
    return result;
}

PredictionResult graph_convolution_baseline(const GraphSample& sample,
                                            const ClassifierSpec& classifier) {
    AttentionSpec uniform;
    uniform.kind = AttentionKind::Uniform;
    const auto gamma = attention_coefficients(sample, uniform);
    return classify(attention_convolve(sample, gamma, classifier), sample.labels,
                    classifier.threshold);
}

std::pair<double, double> mass_allocation(const GraphSample& sample, const GammaMatrix& gamma) {
    double intra = 0.0, total = 0.0;
    for (int i = 0; i < sample.n; ++i) {
        const auto row = gamma.row(i);
        const auto edge_rows = sample.neighbor_edge_rows(i);
        for (std::size_t k = 0; k < row.size(); ++k) {
            total += row[k];
            if (sample.edge_is_intra(edge_rows[k])) intra += row[k];
        }
    }
    if (total == 0.0) return {0.0, 0.0};
    const double intra_pct = 100.0 * intra / total;
    return {intra_pct, 100.0 - intra_pct};
}

}  // namespace csbmlab
