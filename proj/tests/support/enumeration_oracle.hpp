#pragma once
// Brute-force re-derivation of discrete-network quantities, independent of
// the library implementation: plain odometer loops over full assignments
// and direct formula sums over the raw prior/CPT arrays. Tests compare
// DiscreteNetwork and the estimators against these.

#include <utility>
#include <vector>

namespace oracle {

struct Node {
  int card = 2;
  std::vector<int> parents;  // indices into the node list
  std::vector<double> cpt;   // parent configs (first parent most significant) x card
};

// Sums the full joint one assignment at a time.
class Enumerator {
 public:
  explicit Enumerator(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  // P(all event pairs hold) under the intervention do_set; intervened nodes
  // have their factor replaced by an indicator.
  double probability(const std::vector<std::pair<int, int>>& event,
                     const std::vector<std::pair<int, int>>& do_set = {}) const;

  double conditional(int target, int state, const std::vector<std::pair<int, int>>& given,
                     const std::vector<std::pair<int, int>>& do_set = {}) const;

 private:
  std::vector<Node> nodes_;
};

// The source -> mediators -> destination family, queried straight off the
// arrays (sources stay exogenously correlated: do() fixes one coordinate and
// keeps the rest at their joint marginal).
struct Structured {
  std::vector<int> fcards;
  std::vector<int> mcards;
  std::vector<double> prior;                 // joint over feature configs
  std::vector<std::vector<double>> med_cpt;  // per mediator: feature configs x card
  std::vector<double> dest_cpt;              // mediator configs x labels
};

int label_count(const Structured& s);

// P(D = l | S = sv) for every l (0-based vector).
std::vector<double> label_given(const Structured& s, const std::vector<int>& sv);

// P(D = l | do(S_i = v)) for every l; i is 0-based.
std::vector<double> label_do(const Structured& s, int i, int v);

// Var over x ~ P(X_j | S = sv) of P(D = l | X_j = x, S = sv); j, l 0-based.
double dominance(const Structured& s, const std::vector<int>& sv, int j, int l);

// I(S_i; B_l) - I(S_i; B_l | X_l) in nats, B_l the indicator of label l;
// i and l 0-based, conditioning mediator is the one indexed l.
double info_gain(const Structured& s, int i, int l);

}  // namespace oracle
