#pragma once
// Causal attribution scores A(S_i, D_l) for network models, estimated by
// Monte Carlo over the model's mediator noise and averaged over a dataset of
// source points.
//
// Two estimators:
//  * marginal: expected gradient of P(D=l | S=t) along S_i, i.e. the full
//    effect through every path. Uses antithetic draws; per point the rows of
//    the score matrix sum to zero exactly (the softmax is compositional).
//  * conditional: expected gradient with the queried label's mediator value
//    X_l held fixed at its sampled value, so only the explicit source path
//    into u_l plus the reshuffling of the competing labels remains. Plain
//    draws (the per-sample gradients also feed the uncertainty estimate).
//
// decompose splits the marginal score into the direct (c-path) and indirect
// (through-mediator) parts; direct + indirect matches marginal draw by draw.

#include <cstdint>
#include <utility>
#include <vector>

#include "apcalc/dataset.hpp"
#include "apcalc/network_model.hpp"

namespace apcalc {

enum class AttributionEstimator { marginal, conditional };

struct AttributionReport {
  int n = 0;
  int m = 0;
  AttributionEstimator estimator = AttributionEstimator::marginal;
  int samples_per_point = 0;
  std::uint64_t seed = 0;
  std::size_t rows = 0;
  std::vector<double> scores;       // n*m, scores[i*m + l]
  std::vector<double> uncertainty;  // n*m, sample variance of conditional gradients
  std::vector<double> direct;       // n*m, marginal estimator only (else empty)
  std::vector<double> indirect;     // n*m, marginal estimator only (else empty)
  std::vector<std::vector<double>> per_point;  // optional, one n*m block per row

  double at(int i, int l) const;  // 1-based pair lookup into scores
};

// Full matrix over all (feature, label) pairs. The conditional pass always
// runs (it supplies the uncertainty); the marginal pass additionally fills
// direct/indirect. i,l are 1-based in all the single-cell helpers.
AttributionReport attribution_matrix(const NetworkModel& model, const Dataset& data,
                                     const EstimatorConfig& cfg,
                                     AttributionEstimator estimator = AttributionEstimator::marginal,
                                     bool with_per_point = false);

double attribution_marginal(const NetworkModel& model, const Dataset& data, int i, int l,
                            const EstimatorConfig& cfg);
double attribution_conditional(const NetworkModel& model, const Dataset& data, int i, int l,
                               const EstimatorConfig& cfg);
double attribution_uncertainty(const NetworkModel& model, const Dataset& data, int i, int l,
                               const EstimatorConfig& cfg);

// Single-point marginal score and its direct/indirect split.
double attribution_marginal_point(const NetworkModel& model, const double* t, int i, int l,
                                  const EstimatorConfig& cfg, std::size_t row = 0);
std::pair<double, double> decompose(const NetworkModel& model, const double* t, int i, int l,
                                    const EstimatorConfig& cfg, std::size_t row = 0);

// Central finite difference of label_marginals along S_i at t, on the same
// noise streams (common random numbers), for cross-checking the analytic
// marginal gradient. Step cfg.fd_step.
double fd_marginal_gradient(const NetworkModel& model, const double* t, int i, int l,
                            const EstimatorConfig& cfg, std::size_t row = 0);

}  // namespace apcalc
