#pragma once
// Separation functions: scalar summaries phi(S) scored by how well they
// separate two labels, plus distances between mediators' conditional laws.
//
// Mutual information terms are plug-in estimates over equal-frequency bins.
// Bin edges are order statistics of the conditioning values and assignment
// compares against edge values, so binning is invariant under strictly
// increasing transforms and collapses cleanly under ties (a constant
// conditioner lands in a single bin).

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "apcalc/dataset.hpp"
#include "apcalc/network_model.hpp"

namespace apcalc {

struct SeparationCandidate {
  enum class Transform { identity, tanh, square };
  std::string id;
  std::vector<double> w;  // projection, length n, non-zero
  Transform transform = Transform::identity;
};

double candidate_value(const SeparationCandidate& cand, const double* t, int n);

// n axis projections plus 32 seeded unit directions; ids zero-padded so
// lexicographic tie-breaks are stable.
std::vector<SeparationCandidate> default_candidates(int n, std::uint64_t seed);

// Equal-frequency bin assignment (see file comment). bins >= 1. Returned
// labels are in [0, bins); some may be unused when values tie.
std::vector<int> equal_frequency_bins(const std::vector<double>& values, int bins);

// Plug-in mutual information (nats) between two integer-labeled columns.
double mutual_information(const std::vector<int>& a, const std::vector<int>& b);

// I(dj; dk | bin(z)) in nats; may dip below zero only by round-off and is
// clamped at -1e-12.
double conditional_mi(const std::vector<int>& dj, const std::vector<int>& dk,
                      const std::vector<double>& z, int bins);

enum class SeparationMetric { sym_kl, hellinger };

// Mean over dataset rows of the distance between the conditional laws of
// X_j and X_k given S = row (diagonal gaussians, closed form). Symmetrized
// KL is the sum of both directed divergences. Requires p_j == p_k, j != k;
// j,k are 1-based.
double separation_distance(const NetworkModel& model, int j, int k, const Dataset& data,
                           SeparationMetric metric = SeparationMetric::sym_kl);

enum class SeparationMode {
  literal_mi,  // maximize I(D_j; D_k | phi(S))  (the stated objective)
  neg_mi,      // minimize the same quantity
  dist         // maximize the Fisher separation of phi between the classes
};

struct SeparationResult {
  SeparationCandidate best;
  double best_score = 0.0;
  SeparationMode mode = SeparationMode::literal_mi;
  std::vector<std::pair<std::string, double>> scores;  // candidate order
};

// Scores every candidate on the rows labeled j or k and picks the optimum
// for the mode; exact ties go to the lexicographically smallest id.
// Default bins is 8 at the CLI surface.
SeparationResult learn_separation(const Dataset& data, int j, int k,
                                  const std::vector<SeparationCandidate>& candidates,
                                  SeparationMode mode, int bins);

}  // namespace apcalc
