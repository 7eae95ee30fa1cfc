#pragma once
// Small discrete Bayesian networks with tabular CPTs, evaluated by exact
// enumeration. These serve as ground-truth oracles for the Monte Carlo
// estimators: every query here sums the full joint, so answers are exact up
// to floating point.
//
// Two construction routes:
//  * structured(): the source -> mediators -> destination family
//    (features S1..Sn, mediators X1..Xm, label node D with m states);
//  * general node lists for arbitrary DAGs (confounder fixtures).
//
// CPT layout: rows indexed by parent states (first parent most significant),
// last axis = child states. Every row must sum to 1 within 1e-12. The joint
// state space is capped at 1e7 states; construction fails beyond that.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "apcalc/dataset.hpp"
#include "apcalc/graph.hpp"

namespace apcalc {

struct DiscreteNode {
  std::string name;
  int card = 2;
  std::vector<int> parents;   // indices into the node list, parents precede child
  std::vector<double> cpt;    // (prod parent cards) * card entries
};

class DiscreteNetwork {
 public:
  static constexpr double kRowSumTol = 1e-12;
  static constexpr std::uint64_t kMaxJointStates = 10000000;

  // mediators default to every node that is neither a feature nor the label.
  DiscreteNetwork(std::vector<DiscreteNode> nodes, std::vector<int> feature_nodes,
                  int label_node);
  DiscreteNetwork(std::vector<DiscreteNode> nodes, std::vector<int> feature_nodes,
                  int label_node, std::vector<int> mediator_nodes);

  // Structured family. A product prior becomes independent root features; a
  // correlated prior is represented exogenously through a latent
  // configuration node U (sources share U but have no edges among
  // themselves), so do() on one source leaves the others at their joint
  // marginal. Parents a CPT does not actually depend on are dropped, so the
  // graph reflects real structure.
  static DiscreteNetwork structured(const std::vector<int>& feature_cards,
                                    const std::vector<int>& mediator_cards,
                                    const std::vector<double>& prior,
                                    const std::vector<std::vector<double>>& cpt_mediators,
                                    const std::vector<double>& cpt_destination);

  const std::vector<DiscreteNode>& nodes() const { return nodes_; }
  const std::vector<int>& feature_nodes() const { return features_; }
  const std::vector<int>& mediator_nodes() const { return mediators_; }
  int label_node() const { return label_; }
  int node_index(const std::string& name) const;  // -1 when absent
  int require_node(const std::string& name) const;
  std::uint64_t joint_state_count() const;
  Dag to_dag() const;

  // Joint distribution of `vars` (in the given order) under optional
  // interventions; flat row-major table, first var most significant.
  std::vector<double> marginal(const std::vector<int>& vars,
                               const std::map<int, int>& do_map = {}) const;

  // P(label | features = s), exact. s holds one state per feature node.
  std::vector<double> label_marginals(const std::vector<int>& s) const;
  int predict_label(const std::vector<int>& s) const;  // 1-based, ties -> lowest

  // P(label | features = s, mediator j = x), exact. j is 1-based.
  std::vector<double> conditional_label_prob(const std::vector<int>& s, int j, int x) const;

  // Variance of conditional_label_prob(...)[l] over x ~ P(X_j | S=s) for each
  // mediator; argmax is 1-based, near-ties (rel 1e-9) resolved to lowest index.
  struct Dominance {
    std::vector<double> scores;
    int argmax = 0;
    bool degenerate = false;  // all scores at zero
  };
  Dominance dominance_scores(const std::vector<int>& s, int l) const;  // l 1-based

  // Ancestral sampling. Features become dataset columns (as doubles), the
  // label column is 1-based; mediator states land in the trace.
  TracedDataset sample_joint(std::size_t count, std::uint64_t seed) const;

  // Exact conditional independence: max_z max_{a,b} |P(a,b|z) - P(a|z)P(b|z)|
  // over z with positive mass, compared against tol.
  bool ci_holds(int a, int b, const std::vector<int>& z, double tol = 1e-10) const;

 private:
  void validate() const;
  std::vector<DiscreteNode> nodes_;
  std::vector<int> features_;
  std::vector<int> mediators_;
  int label_ = -1;
};

}  // namespace apcalc
