#pragma once
// JSON (de)serialization for models, queries, and result payloads. Parsers
// are strict: unknown structure, wrong types, or invalid values raise
// std::invalid_argument with the offending field named. Serializers emit
// 2-space-indented documents with alphabetically ordered keys, so equal
// inputs give byte-equal files.

#include <string>
#include <vector>

#include "apcalc/attribution.hpp"
#include "apcalc/discrete_network.hpp"
#include "apcalc/intervention.hpp"
#include "apcalc/metrics.hpp"
#include "apcalc/network_model.hpp"
#include "apcalc/separation.hpp"
#include "apcalc/synthbench.hpp"

namespace apcalc {

NetworkModel parse_model_json(const std::string& text);
std::string format_model_json(const NetworkModel& model);

// Accepts either the structured layout {feature_cards, mediator_cards,
// prior, cpt_mediators, cpt_destination} or an explicit node list {nodes:
// [{name, card, parents, cpt}], features, label, mediators?}.
DiscreteNetwork parse_discrete_json(const std::string& text);
std::string format_discrete_json(const DiscreteNetwork& net);

struct CliQuery {
  InterventionQuery query;
  std::string method;  // ap | backdoor | frontdoor | effect
};
std::vector<CliQuery> parse_queries_json(const std::string& text);

std::vector<SeparationCandidate> parse_candidates_json(const std::string& text);

std::string format_attribution_json(const AttributionReport& report);
std::string format_intervention_json(const std::vector<InterventionResult>& results);
std::string format_separation_json(const SeparationResult& result);
std::string format_metrics_json(const MetricsReport& report);
std::string format_benchmark_json(const std::vector<ArchResult>& archs,
                                  const std::vector<ConvergenceRow>& convergence,
                                  const ScalingStudy& scaling);
std::string format_suppression_json(const SuppressionOutcome& outcome);
std::string format_scenario_truth_json(const Scenario& scenario);

}  // namespace apcalc
