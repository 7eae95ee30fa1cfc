#pragma once
// Observational metrics over a model and a dataset: Pearson correlation
// between a feature and a label indicator, information gain of a feature
// about a label beyond its mediator, fairness disparity between labels,
// the spurious-correlation score R, and the suppression loop that drives
// R below a threshold by adjusting one feature's weight entries.

#include <string>
#include <vector>

#include "apcalc/attribution.hpp"
#include "apcalc/dataset.hpp"
#include "apcalc/discrete_network.hpp"
#include "apcalc/network_model.hpp"

namespace apcalc {

struct CorrResult {
  double value = 0.0;
  bool degenerate = false;  // a column had zero variance; value forced to 0
};

// Standard Pearson coefficient. Requires >= 2 rows.
CorrResult pearson_correlation(const std::vector<double>& a, const std::vector<double>& b);

// 0/1 indicator column for label l (1-based). Requires labels.
std::vector<double> label_indicator(const Dataset& data, int l);

// IG(S_i, l) = I(S_i; D_l) - I(S_i; D_l | X_l) in nats, where D_l is the
// indicator of label l. May be negative; never clamped.
//
// Estimator path: plug-in MI over equal-frequency bins; multi-dimensional
// mediator traces are binned per dimension and conditioned on the product
// cell. Requires the mediator trace for X_l.
double information_gain(const TracedDataset& data, int i, int l, int bins = 8);

// Exact path: same quantity from the enumerated joint table.
double information_gain(const DiscreteNetwork& net, int i, int l);

// |A(S_i, l1) - A(S_i, l2)| from an attribution report. Indices 1-based.
double fairness_disparity(const AttributionReport& report, int i, int l1, int l2);

// R(S_i, l) = |Corr(S_i, D_l)| * (1 - |clip(A(S_i, l), -1, 1)|). The raw
// attribution enters clipped; the report keeps the unclipped value.
double spurious_score(const Dataset& data, const AttributionReport& report, int i, int l);

struct MetricsReport {
  int n = 0;
  int m = 0;
  AttributionEstimator estimator = AttributionEstimator::marginal;
  int bins = 8;
  // n*m matrices, laid out [i*m + l] like AttributionReport::scores.
  std::vector<double> correlations;
  std::vector<char> corr_degenerate;
  std::vector<double> attributions;  // raw scores the spurious column used
  std::vector<double> spurious;
  std::vector<double> info_gain;  // empty when the dataset carries no trace
  struct FairnessEntry {
    int feature = 0;  // 1-based
    int label_a = 0;
    int label_b = 0;
    double value = 0.0;
  };
  std::vector<FairnessEntry> fairness;  // all i, label pairs a < b
};

// Full report over a labeled dataset. info_gain is filled only when the
// trace holds all m mediators.
MetricsReport compute_metrics(const NetworkModel& model, const TracedDataset& data,
                              const EstimatorConfig& cfg,
                              AttributionEstimator estimator = AttributionEstimator::marginal,
                              int bins = 8);

struct SuppressionConfig {
  double epsilon = 0.05;
  double step = 0.5;
  int max_iters = 200;
  double fd_step = 1e-3;
  AttributionEstimator estimator = AttributionEstimator::marginal;
};

enum class SuppressionStatus {
  already_converged,  // R <= epsilon on entry; model returned unchanged
  converged,          // R driven to <= epsilon
  stalled,            // no strict decrease found; best iterate returned
  iteration_limit     // max_iters spent with R still above epsilon
};

struct SuppressionOutcome {
  NetworkModel model;
  SuppressionStatus status = SuppressionStatus::already_converged;
  CorrResult corr;  // data-only factor of R, fixed across iterations
  struct TraceRow {
    int iter = 0;
    double r = 0.0;
    double accuracy = 0.0;
  };
  std::vector<TraceRow> trace;  // row 0 is the pre-update state
};

// Finite-difference descent on R(S_i, l) over feature i's entries in every
// mediator weight and readout source path, with backtracking halving on the
// step. The trace of R is non-increasing; accuracy is argmax agreement with
// the dataset labels. Requires labels.
SuppressionOutcome suppress_spurious(const NetworkModel& model, const Dataset& data, int i, int l,
                                     const SuppressionConfig& scfg, const EstimatorConfig& cfg);

const char* to_string(SuppressionStatus s);

// CSV trace: header "iter,r,accuracy", '.' decimal separator.
std::string format_suppression_trace(const SuppressionOutcome& outcome);

}  // namespace apcalc
