#pragma once
// Continuous source -> mediators -> destination model.
//
// Source S is an n-vector. Mediator j is X_j = W_j S + eps_j with diagonal
// gaussian noise (scales all positive). The destination is a softmax over
// per-label scores u_l = a_l . x_l + c_l . s + b_l; c_l is an explicit
// source path and defaults to zero. Labels are 1-based.
//
// Monte Carlo conventions (shared by every estimator in the library):
//  * mediator noise comes from streams keyed (seed, row, pair, mediator),
//    drawn in antithetic pairs (draw 2r+1 negates draw 2r), except for the
//    conditional-gradient sampler which uses plain draws keyed
//    (seed, row, k, mediator);
//  * draws never depend on the point value itself, so estimates are smooth
//    functions of the input and common-random-number finite differences
//    line up with analytic gradients;
//  * everything is bit-identical for a fixed seed under any thread count.

#include <cstdint>
#include <string>
#include <vector>

#include "apcalc/dataset.hpp"
#include "apcalc/graph.hpp"

namespace apcalc {

struct MediatorSpec {
  int p = 1;
  std::vector<double> weight;       // p * n, row-major
  std::vector<double> noise_scale;  // p entries, all > 0
};

struct Readout {
  std::vector<double> a;  // p_l coefficients on mediator l
  std::vector<double> c;  // n coefficients on the source (empty = zeros)
  double b = 0.0;
};

struct DestinationSpec {
  std::vector<Readout> readout;  // one per label
};

struct SourceSpec {
  enum class Kind { std_normal, gaussian };
  Kind kind = Kind::std_normal;
  std::vector<double> mean;   // gaussian only, n entries
  std::vector<double> scale;  // gaussian only, n entries, all > 0
};

struct NetworkModel {
  int n = 0;
  int m = 0;
  std::vector<MediatorSpec> mediators;  // m entries
  DestinationSpec destination;
  SourceSpec source;
  std::uint64_t seed = 1;
};

void validate_model(const NetworkModel& model);

struct EstimatorConfig {
  int samples_per_point = 1000;  // K
  std::uint64_t seed = 0;        // 0 -> model.seed
  int threads = 0;               // 0 -> APCALC_THREADS env, else 1
  double fd_step = 1e-4;
};

int resolve_threads(const EstimatorConfig& cfg);
std::uint64_t resolve_seed(const NetworkModel& model, const EstimatorConfig& cfg);

// E[softmax | S=t] by K-sample MC over mediator noise. `row` keys the noise
// streams so dataset-level operations can give every row its own draws.
std::vector<double> label_marginals(const NetworkModel& model, const double* t,
                                    const EstimatorConfig& cfg, std::size_t row = 0);

// argmax with near-tie (rel 1e-9) broken toward the lowest index; 1-based.
int argmax_label(const std::vector<double>& marginals);

// argmax of label_marginals, 1-based; near-ties (rel 1e-9) -> lowest label.
int predict_label(const NetworkModel& model, const double* t, const EstimatorConfig& cfg);

// E[softmax | S=t, X_j = x]; the pinned mediator contributes a_j . x while
// the others are integrated by MC on the same streams label_marginals uses.
std::vector<double> conditional_label_prob(const NetworkModel& model, const double* t,
                                           int j, const double* x,
                                           const EstimatorConfig& cfg, std::size_t row = 0);

struct DominanceResult {
  std::vector<double> scores;  // variance of P(D_l | X_j, S=t) over X_j draws
  int argmax = 0;              // 1-based node index; near-ties -> lowest
  bool degenerate = false;     // all scores indistinguishable from zero
};

// Scores use a symmetric stratified grid over the mediator noise when every
// mediator is one-dimensional and m <= 4 (deterministic; exchangeable models
// tie to rounding error, far inside the argmax tie band); otherwise seeded MC
// with outer draws shared across mediators. l is 1-based.
DominanceResult dominance_scores(const NetworkModel& model, const double* t, int l,
                                 const EstimatorConfig& cfg);

struct SufficiencyResult {
  int rank = 0;            // singular values of W above tol * largest
  bool sufficient = true;  // p >= rank
};

// Numerical rank via singular values of the mediator weight; relative
// tolerance against the largest singular value. Zero matrices rank 0.
SufficiencyResult check_dimensional_sufficiency(const MediatorSpec& mediator,
                                                double rank_tol = 1e-8);
std::vector<SufficiencyResult> check_dimensional_sufficiency(const NetworkModel& model,
                                                             double rank_tol = 1e-8);

// Ancestral sampling of (S, X, label); mediator values land in the trace.
TracedDataset sample_joint(const NetworkModel& model, std::size_t count,
                           std::uint64_t seed);

// Labels (and mediator values) for externally supplied feature rows.
TracedDataset sample_labels_given(const NetworkModel& model, const Dataset& features,
                                  std::uint64_t seed);

// Feature-level graph over S1..Sn, X1..Xm, D1..Dm. Edges follow nonzero
// coefficients; every mediator with a nonzero readout feeds every label
// because the softmax couples scores.
Dag to_dag(const NetworkModel& model);

namespace detail {

// Precomputed per-model readout terms shared by the estimators.
struct Evaluator {
  explicit Evaluator(const NetworkModel& model);

  const NetworkModel* model;
  int n, m;
  std::vector<double> aw;      // m*n: (W_j^T a_j)_i
  std::vector<double> g;       // m*n: aw + c, total source-to-score weight
  std::vector<double> c;       // m*n: explicit path only
  std::vector<double> bias;    // m

  // mu[j] = aw_j . t + c_j . t + b_j (score at zero noise)
  void score_means(const double* t, std::vector<double>& mu) const;
  // noise contribution a_j . (sigma_j * z) for draw k of `row`; antithetic
  // pairs when `antithetic`, plain draws otherwise.
  double noise_term(std::uint64_t seed, std::size_t row, std::uint64_t k, int j,
                    bool antithetic) const;
  static void softmax(const std::vector<double>& u, std::vector<double>& p);
};

// Symmetric equal-weight grid: probit((q+0.5)/Q) with the upper half an
// exact mirror of the lower half.
std::vector<double> stratified_normal_grid(int q_count);

}  // namespace detail
}  // namespace apcalc
