#pragma once

#include <cstdint>
#include <string>

#include "csbmlab/attention.hpp"
#include "csbmlab/model.hpp"

namespace csbmlab {

/// Outcome of one empirical concentration check on one sample.
///
/// The underlying statements are asymptotic, so every check carries an
/// explicit envelope constant and a quantile-style pass rule; the report
/// keeps enough observables to recalibrate those constants.
struct ConcentrationReport {
    std::string statistic;
    double center = 0.0;        // theoretical center (primary one when several)
    double envelope = 0.0;      // envelope constant used
    double max_rel_dev = 0.0;   // worst observed deviation measure
    double q50 = 0.0, q90 = 0.0, q99 = 0.0;
    long violations = 0;
    long checked = 0;
    bool degenerate = false;    // zero/negative center, vacuous bound
    bool warned = false;        // a precondition was out of range
    bool pass = false;

    // Check-specific observables.
    double observed_lo = 0.0;   // sum-exp: tightest lower constant seen
    double observed_hi = 0.0;   // sum-exp: loosest upper constant seen
    double mean_signed = 0.0;   // gamma-ratio: mean signed mass difference
};

/// |N_i| vs n(p+q)/2; passes when the worst relative deviation stays within
/// C * sqrt(log n / (n(p+q))).
ConcentrationReport check_degree_concentration(const GraphSample& sample,
                                               const CsbmParams& params, double C = 4.0);

/// Same test per class: centers np/2 (own class) and nq/2 (other class) with
/// rate-matched envelopes C * sqrt(log n / (n p)) and C * sqrt(log n / (n q)).
ConcentrationReport check_class_degree_concentration(const GraphSample& sample,
                                                     const CsbmParams& params, double C = 4.0);

/// Size of (N_i u N_j) \ (N_i n N_j) for sampled pairs against
/// (n/2) * rate * (1 - delta), rate = p+q-p^2-q^2 (same class) or p+q-2pq
/// (cross class), delta = 3 sqrt(log n / (n * rate)). pair_sample_size <= 0
/// selects the exact all-pairs mode (n <= 500 only). Passes when at most 5%
/// of the checked pairs violate the bound.
ConcentrationReport check_uncommon_neighbors(const GraphSample& sample,
                                             const CsbmParams& params,
                                             int pair_sample_size = 200,
                                             std::uint64_t pair_seed = 0);

/// Per node and class side: c_lo * (class-degree center) <= sum exp(psi)
/// <= c_hi * n(p+q). Records the tightest constants observed; passes when at
/// least 95% of nodes satisfy both sides.
ConcentrationReport check_sum_exp_bounds(const GraphSample& sample, const AttentionSpec& spec,
                                         const CsbmParams& params, double c_lo = 0.2,
                                         double c_hi = 5.0);

/// Signed intra/inter coefficient-mass difference against the band of width
/// c * |p-q|/(p+q); a node passes when |inter - intra| <= c * |p-q|/(p+q).
/// Passes when at least 95% of nodes do. p == q is degenerate: the band
/// collapses to zero and only the mean difference is required to be small.
ConcentrationReport check_gamma_ratio_bounds(const GraphSample& sample,
                                             const GammaMatrix& gamma,
                                             const CsbmParams& params, double c = 3.0);

}  // namespace csbmlab
