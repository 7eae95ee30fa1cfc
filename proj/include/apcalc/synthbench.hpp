#pragma once
// Synthetic benchmark scenarios and studies:
//  * three generator architectures (the per-label mediator layout, Pearl's
//    junction, and a common-cause fan-out), sampled with exact interventional
//    ground truth recorded at generation time;
//  * an architecture benchmark scoring naive conditioning against adjusted
//    estimates on refitted parameters, paired by seed;
//  * estimator convergence and wall-time scaling studies.

#include <cstdint>
#include <string>
#include <vector>

#include "apcalc/dataset.hpp"
#include "apcalc/discrete_network.hpp"
#include "apcalc/network_model.hpp"

namespace apcalc {

enum class Architecture { proposed, junction, common_cause };

const char* to_string(Architecture a);
Architecture architecture_from_string(const std::string& s);

struct ScenarioSpec {
  Architecture architecture = Architecture::proposed;
  int n = 2;  // features (proposed only; the graph fixtures have one)
  int m = 2;  // mediators / label states (proposed only)
  std::size_t sample_count = 1000;
  std::uint64_t seed = 1;
};

// One generated trial: the generator network, a sampled dataset whose trace
// holds the non-feature, non-label variables, and the exact do() table of
// the generator. true_do is laid out [((i-1)*2 + s)*labels + (l-1)] for
// feature i, state s in {0,1}, label l.
struct Scenario {
  ScenarioSpec spec;
  DiscreteNetwork net;
  TracedDataset data;
  int labels = 2;
  std::vector<double> true_do;
};

Scenario generate_scenario(const ScenarioSpec& spec);

// Same node list and parent sets as `like`, CPTs refitted from the rows by
// add-one smoothed counts. Features come from the dataset columns, mediators
// from the trace, the label from the label column.
DiscreteNetwork fit_network(const DiscreteNetwork& like, const TracedDataset& data);

// Naive observational estimate P(label = l | S_i = s) read off a network's
// joint table.
double naive_conditional(const DiscreteNetwork& net, int feature, int state, int label);

struct ArchResult {
  std::string architecture;
  std::size_t trials = 0;
  std::vector<std::uint64_t> seeds;  // one per trial; shared across architectures
  double naive_do_error_mean = 0.0;
  double naive_do_error_std = 0.0;
  double adjusted_do_error_mean = 0.0;
  double adjusted_do_error_std = 0.0;
  double attr_error_mean = 0.0;
  double attr_error_std = 0.0;
  std::size_t naive_worse_count = 0;  // trials with naive error strictly larger
  double runtime_seconds = 0.0;
};

// Runs `trials` paired generate/fit/score rounds per spec. The adjusted
// estimator is architecture-specific: row-averaged interventional scoring for
// the proposed layout, backdoor adjustment over the recorded confounders for
// the junction, and the empty-set adjustment for the common-cause fixture.
std::vector<ArchResult> run_arch_benchmark(const std::vector<ScenarioSpec>& specs,
                                           std::size_t trials);

struct ConvergenceRow {
  int samples = 0;
  double mean_abs_error = 0.0;
  double std_dev = 0.0;
};

// Error of the marginal attribution cell (i, l) against a reference run at
// 16x the largest grid entry, repeated with distinct seeds per grid point.
std::vector<ConvergenceRow> convergence_study(const NetworkModel& model, const Dataset& data,
                                              int i, int l, const std::vector<int>& k_grid,
                                              int repeats, const EstimatorConfig& cfg);

struct ScalingRow {
  std::string axis;
  int m = 0, n = 0, p = 0;
  double seconds = 0.0;
};

struct ScalingStudy {
  std::vector<ScalingRow> rows;
  double slope_m = 0.0, slope_n = 0.0, slope_p = 0.0;
};

struct ScalingConfig {
  std::vector<int> m_grid{4, 8, 16, 32};
  std::vector<int> n_grid{16, 32, 64, 128};
  std::vector<int> p_grid{16, 32, 64, 128};
  int base_m = 4, base_n = 2, base_p = 2;
  int samples_per_point = 2000;
  std::size_t rows = 256;
  int timed_reps = 5;  // median taken; one warm-up discarded
  std::uint64_t seed = 1;
};

// Wall time of attribution_matrix along each dimension axis, single thread,
// with the log-log regression slope per axis.
ScalingStudy scaling_study(const ScalingConfig& cfg);

// Dense random smooth model for gradient checks and timing: gaussian weights
// scaled by 1/sqrt(n), unit-scale readouts, fixed noise.
NetworkModel make_random_model(int n, int m, int p, std::uint64_t seed);

// Standard-normal feature rows keyed off the seed.
Dataset make_gaussian_dataset(int n, std::size_t rows, std::uint64_t seed);

}  // namespace apcalc
