#pragma once
// Interventional (do-) effect estimators.
//
// do_effect_ap realizes the truncated factorization by averaging over data
// rows with the intervened feature overwritten: the dataset stands in for
// the joint law of the remaining sources. do_effect_oracle sums a discrete
// network's joint with the intervened node's factor replaced by a point
// mass. backdoor/frontdoor compute the classical adjustment formulas after
// verifying their graphical preconditions; an invalid adjustment set is an
// error, never a silently wrong number.

#include <string>
#include <vector>

#include "apcalc/dataset.hpp"
#include "apcalc/discrete_network.hpp"
#include "apcalc/network_model.hpp"

namespace apcalc {

struct InterventionQuery {
  int feature = 1;     // 1-based source index
  double value = 0.0;  // intervened value; discrete networks round to a state
  int label = 1;       // 1-based
  double delta = 0.0;  // contrast increment, causal_effect only (must be != 0)
  std::vector<std::string> adjustment_set;  // backdoor Z, node names
  std::string mediator;                     // frontdoor cut node; empty -> "X<label>"
};

struct InterventionResult {
  double estimate = 0.0;
  std::string method;      // "ap" | "backdoor" | "frontdoor" | "oracle"
  int samples = 0;         // MC draws per row (0 when the inner term is exact)
  double std_error = 0.0;  // across-row standard error of the mean ("ap" only)
  bool has_oracle = false;
  double oracle = 0.0;  // filled by callers that also ran the oracle
  double abs_error = 0.0;
  double skipped_weight = 0.0;  // adjustment mass renormalized away
  bool warning = false;         // true when skipped_weight > 0
};

InterventionResult do_effect_ap(const NetworkModel& model, const Dataset& data,
                                const InterventionQuery& q, const EstimatorConfig& cfg);
InterventionResult do_effect_ap(const DiscreteNetwork& net, const Dataset& data,
                                const InterventionQuery& q);

InterventionResult do_effect_oracle(const DiscreteNetwork& net, const InterventionQuery& q);

InterventionResult backdoor_adjust(const DiscreteNetwork& net, const InterventionQuery& q);
InterventionResult frontdoor_adjust(const DiscreteNetwork& net, const InterventionQuery& q);

// tau = mean over rows of P(D_l | do(S_i = s_i + delta)) - P(D_l | do(S_i =
// s_i)) at each row's own s_i, common random numbers per row. The discrete
// overload contrasts the two exact do states value+delta vs value.
double causal_effect(const NetworkModel& model, const Dataset& data, const InterventionQuery& q,
                     const EstimatorConfig& cfg);
double causal_effect(const DiscreteNetwork& net, const InterventionQuery& q);

}  // namespace apcalc
