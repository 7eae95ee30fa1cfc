#include "apcalc/json_io.hpp"

#include <stdexcept>

#include "json.hpp"

namespace apcalc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

const json& need(const json& obj, const char* key, const char* where) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(std::string(where) + ": missing field '" + key + "'");
  return *it;
}

std::vector<double> doubles(const json& arr, const std::string& where) {
  if (!arr.is_array()) fail(where + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number()) fail(where + ": expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

json parse_text(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(std::string(what) + ": malformed JSON");
  return j;
}

const char* to_string(AttributionEstimator e) {
  return e == AttributionEstimator::marginal ? "marginal" : "conditional";
}

const char* to_string(SeparationMode m) {
  switch (m) {
    case SeparationMode::literal_mi: return "literal_mi";
    case SeparationMode::neg_mi: return "neg_mi";
    case SeparationMode::dist: return "dist";
  }
  return "unknown";
}

const char* to_string(SeparationCandidate::Transform t) {
  switch (t) {
    case SeparationCandidate::Transform::identity: return "identity";
    case SeparationCandidate::Transform::tanh: return "tanh";
    case SeparationCandidate::Transform::square: return "square";
  }
  return "unknown";
}

SeparationCandidate::Transform transform_from_string(const std::string& s) {
  if (s == "identity") return SeparationCandidate::Transform::identity;
  if (s == "tanh") return SeparationCandidate::Transform::tanh;
  if (s == "square") return SeparationCandidate::Transform::square;
  fail("candidates: unknown transform '" + s + "'");
}

json model_to_json(const NetworkModel& model) {
  json j;
  j["n"] = model.n;
  j["m"] = model.m;
  j["seed"] = model.seed;
  j["mediators"] = json::array();
  for (const auto& med : model.mediators) {
    json mj;
    mj["p"] = med.p;
    mj["weight"] = med.weight;
    mj["noise_scale"] = med.noise_scale;
    j["mediators"].push_back(std::move(mj));
  }
  json readouts = json::array();
  for (const auto& ro : model.destination.readout) {
    json rj;
    rj["a"] = ro.a;
    if (!ro.c.empty()) rj["c"] = ro.c;
    rj["b"] = ro.b;
    readouts.push_back(std::move(rj));
  }
  j["destination"] = json{{"readout", std::move(readouts)}};
  if (model.source.kind == SourceSpec::Kind::std_normal) {
    j["source"] = json{{"kind", "std_normal"}};
  } else {
    j["source"] =
        json{{"kind", "gaussian"}, {"mean", model.source.mean}, {"scale", model.source.scale}};
  }
  return j;
}

}  // namespace

NetworkModel parse_model_json(const std::string& text) {
  const json j = parse_text(text, "model");
  if (!j.is_object()) fail("model: expected a JSON object");
  NetworkModel model;
  model.n = need(j, "n", "model").get<int>();
  model.m = need(j, "m", "model").get<int>();
  if (j.contains("seed")) model.seed = j["seed"].get<std::uint64_t>();

  const json& meds = need(j, "mediators", "model");
  if (!meds.is_array()) fail("model: 'mediators' must be an array");
  for (std::size_t idx = 0; idx < meds.size(); ++idx) {
    const json& mj = meds[idx];
    const std::string where = "model.mediators[" + std::to_string(idx) + "]";
    MediatorSpec med;
    med.p = need(mj, "p", where.c_str()).get<int>();
    med.weight = doubles(need(mj, "weight", where.c_str()), where + ".weight");
    med.noise_scale = doubles(need(mj, "noise_scale", where.c_str()), where + ".noise_scale");
    model.mediators.push_back(std::move(med));
  }

  const json& dest = need(j, "destination", "model");
  const json& readouts = need(dest, "readout", "model.destination");
  if (!readouts.is_array()) fail("model: 'destination.readout' must be an array");
  for (std::size_t idx = 0; idx < readouts.size(); ++idx) {
    const json& rj = readouts[idx];
    const std::string where = "model.destination.readout[" + std::to_string(idx) + "]";
    Readout ro;
    ro.a = doubles(need(rj, "a", where.c_str()), where + ".a");
    if (rj.contains("c")) ro.c = doubles(rj["c"], where + ".c");
    ro.b = need(rj, "b", where.c_str()).get<double>();
    model.destination.readout.push_back(std::move(ro));
  }

  if (j.contains("source")) {
    const json& src = j["source"];
    const std::string kind = need(src, "kind", "model.source").get<std::string>();
    if (kind == "std_normal") {
      model.source.kind = SourceSpec::Kind::std_normal;
    } else if (kind == "gaussian") {
      model.source.kind = SourceSpec::Kind::gaussian;
      model.source.mean = doubles(need(src, "mean", "model.source"), "model.source.mean");
      model.source.scale = doubles(need(src, "scale", "model.source"), "model.source.scale");
    } else {
      fail("model.source: unknown kind '" + kind + "'");
    }
  }
  validate_model(model);
  return model;
}

std::string format_model_json(const NetworkModel& model) {
  return model_to_json(model).dump(2) + "\n";
}

DiscreteNetwork parse_discrete_json(const std::string& text) {
  const json j = parse_text(text, "network");
  if (!j.is_object()) fail("network: expected a JSON object");

  if (j.contains("nodes")) {
    const json& njs = j["nodes"];
    if (!njs.is_array() || njs.empty()) fail("network: 'nodes' must be a non-empty array");
    std::vector<DiscreteNode> nodes;
    std::vector<std::string> names;
    const auto index_of = [&](const std::string& name, const std::string& where) {
      for (std::size_t v = 0; v < names.size(); ++v)
        if (names[v] == name) return static_cast<int>(v);
      fail(where + ": unknown node '" + name + "'");
    };
    for (std::size_t idx = 0; idx < njs.size(); ++idx) {
      const json& nj = njs[idx];
      const std::string where = "network.nodes[" + std::to_string(idx) + "]";
      DiscreteNode node;
      node.name = need(nj, "name", where.c_str()).get<std::string>();
      node.card = need(nj, "card", where.c_str()).get<int>();
      if (nj.contains("parents"))
        for (const auto& p : nj["parents"])
          node.parents.push_back(index_of(p.get<std::string>(), where));
      node.cpt = doubles(need(nj, "cpt", where.c_str()), where + ".cpt");
      names.push_back(node.name);
      nodes.push_back(std::move(node));
    }
    std::vector<int> features;
    for (const auto& f : need(j, "features", "network"))
      features.push_back(index_of(f.get<std::string>(), "network.features"));
    const int label = index_of(need(j, "label", "network").get<std::string>(), "network.label");
    if (j.contains("mediators")) {
      std::vector<int> mediators;
      for (const auto& mname : j["mediators"])
        mediators.push_back(index_of(mname.get<std::string>(), "network.mediators"));
      return DiscreteNetwork(std::move(nodes), std::move(features), label, std::move(mediators));
    }
    return DiscreteNetwork(std::move(nodes), std::move(features), label);
  }

  const auto ints = [](const json& arr, const std::string& where) {
    if (!arr.is_array()) fail(where + ": expected an array of integers");
    std::vector<int> out;
    for (const auto& v : arr) out.push_back(v.get<int>());
    return out;
  };
  const auto fcards = ints(need(j, "feature_cards", "network"), "network.feature_cards");
  const auto mcards = ints(need(j, "mediator_cards", "network"), "network.mediator_cards");
  const auto prior = doubles(need(j, "prior", "network"), "network.prior");
  const json& mcpts = need(j, "cpt_mediators", "network");
  if (!mcpts.is_array()) fail("network: 'cpt_mediators' must be an array of arrays");
  std::vector<std::vector<double>> cpt_meds;
  for (std::size_t idx = 0; idx < mcpts.size(); ++idx)
    cpt_meds.push_back(
        doubles(mcpts[idx], "network.cpt_mediators[" + std::to_string(idx) + "]"));
  const auto cpt_dest =
      doubles(need(j, "cpt_destination", "network"), "network.cpt_destination");
  return DiscreteNetwork::structured(fcards, mcards, prior, cpt_meds, cpt_dest);
}

std::string format_discrete_json(const DiscreteNetwork& net) {
  json j;
  j["nodes"] = json::array();
  for (const auto& node : net.nodes()) {
    json nj;
    nj["name"] = node.name;
    nj["card"] = node.card;
    json parents = json::array();
    for (int p : node.parents) parents.push_back(net.nodes()[static_cast<std::size_t>(p)].name);
    nj["parents"] = std::move(parents);
    nj["cpt"] = node.cpt;
    j["nodes"].push_back(std::move(nj));
  }
  json features = json::array();
  for (int f : net.feature_nodes())
    features.push_back(net.nodes()[static_cast<std::size_t>(f)].name);
  j["features"] = std::move(features);
  j["label"] = net.nodes()[static_cast<std::size_t>(net.label_node())].name;
  json mediators = json::array();
  for (int mnode : net.mediator_nodes())
    mediators.push_back(net.nodes()[static_cast<std::size_t>(mnode)].name);
  j["mediators"] = std::move(mediators);
  return j.dump(2) + "\n";
}

std::vector<CliQuery> parse_queries_json(const std::string& text) {
  const json j = parse_text(text, "queries");
  const json* arr = &j;
  if (j.is_object() && j.contains("queries")) arr = &j["queries"];
  if (!arr->is_array() || arr->empty()) fail("queries: expected a non-empty array");
  std::vector<CliQuery> out;
  for (std::size_t idx = 0; idx < arr->size(); ++idx) {
    const json& qj = (*arr)[idx];
    const std::string where = "queries[" + std::to_string(idx) + "]";
    CliQuery cq;
    cq.query.feature = need(qj, "feature", where.c_str()).get<int>();
    cq.query.value = need(qj, "value", where.c_str()).get<double>();
    cq.query.label = need(qj, "label", where.c_str()).get<int>();
    if (qj.contains("delta")) cq.query.delta = qj["delta"].get<double>();
    if (qj.contains("adjustment_set"))
      for (const auto& z : qj["adjustment_set"])
        cq.query.adjustment_set.push_back(z.get<std::string>());
    if (qj.contains("mediator")) cq.query.mediator = qj["mediator"].get<std::string>();
    cq.method = qj.contains("method") ? qj["method"].get<std::string>() : std::string("ap");
    if (cq.method != "ap" && cq.method != "backdoor" && cq.method != "frontdoor" &&
        cq.method != "effect" && cq.method != "oracle")
      fail(where + ": unknown method '" + cq.method + "'");
    out.push_back(std::move(cq));
  }
  return out;
}

std::vector<SeparationCandidate> parse_candidates_json(const std::string& text) {
  const json j = parse_text(text, "candidates");
  const json* arr = &j;
  if (j.is_object() && j.contains("candidates")) arr = &j["candidates"];
  if (!arr->is_array() || arr->empty()) fail("candidates: expected a non-empty array");
  std::vector<SeparationCandidate> out;
  for (std::size_t idx = 0; idx < arr->size(); ++idx) {
    const json& cj = (*arr)[idx];
    const std::string where = "candidates[" + std::to_string(idx) + "]";
    SeparationCandidate cand;
    cand.id = need(cj, "id", where.c_str()).get<std::string>();
    cand.w = doubles(need(cj, "w", where.c_str()), where + ".w");
    if (cj.contains("transform"))
      cand.transform = transform_from_string(cj["transform"].get<std::string>());
    out.push_back(std::move(cand));
  }
  return out;
}

std::string format_attribution_json(const AttributionReport& report) {
  json j;
  j["n"] = report.n;
  j["m"] = report.m;
  j["estimator"] = to_string(report.estimator);
  j["samples_per_point"] = report.samples_per_point;
  j["seed"] = report.seed;
  j["rows"] = report.rows;
  j["scores"] = report.scores;
  j["uncertainty"] = report.uncertainty;
  if (!report.direct.empty()) {
    j["direct"] = report.direct;
    j["indirect"] = report.indirect;
  }
  if (!report.per_point.empty()) j["per_point"] = report.per_point;
  return j.dump(2) + "\n";
}

std::string format_intervention_json(const std::vector<InterventionResult>& results) {
  json arr = json::array();
  for (const auto& r : results) {
    json rj;
    rj["estimate"] = r.estimate;
    rj["method"] = r.method;
    rj["samples"] = r.samples;
    rj["std_error"] = r.std_error;
    rj["skipped_weight"] = r.skipped_weight;
    rj["warning"] = r.warning;
    if (r.has_oracle) {
      rj["oracle"] = r.oracle;
      rj["abs_error"] = r.abs_error;
    }
    arr.push_back(std::move(rj));
  }
  return json{{"results", std::move(arr)}}.dump(2) + "\n";
}

std::string format_separation_json(const SeparationResult& result) {
  json j;
  j["best"] = json{{"id", result.best.id},
                   {"w", result.best.w},
                   {"transform", to_string(result.best.transform)}};
  j["best_score"] = result.best_score;
  j["mode"] = to_string(result.mode);
  json scores = json::array();
  for (const auto& [id, score] : result.scores)
    scores.push_back(json{{"id", id}, {"score", score}});
  j["scores"] = std::move(scores);
  return j.dump(2) + "\n";
}

std::string format_metrics_json(const MetricsReport& report) {
  json j;
  j["n"] = report.n;
  j["m"] = report.m;
  j["estimator"] = to_string(report.estimator);
  j["bins"] = report.bins;
  j["correlations"] = report.correlations;
  json degenerate = json::array();
  for (char d : report.corr_degenerate) degenerate.push_back(d != 0);
  j["corr_degenerate"] = std::move(degenerate);
  j["attributions"] = report.attributions;
  j["spurious"] = report.spurious;
  if (!report.info_gain.empty()) j["info_gain"] = report.info_gain;
  json fairness = json::array();
  for (const auto& f : report.fairness)
    fairness.push_back(json{{"feature", f.feature},
                            {"label_a", f.label_a},
                            {"label_b", f.label_b},
                            {"value", f.value}});
  j["fairness"] = std::move(fairness);
  return j.dump(2) + "\n";
}

std::string format_benchmark_json(const std::vector<ArchResult>& archs,
                                  const std::vector<ConvergenceRow>& convergence,
                                  const ScalingStudy& scaling) {
  json j;
  if (!archs.empty()) {
    json arr = json::array();
    for (const auto& a : archs) {
      json aj;
      aj["architecture"] = a.architecture;
      aj["trials"] = a.trials;
      aj["seeds"] = a.seeds;
      aj["naive_do_error_mean"] = a.naive_do_error_mean;
      aj["naive_do_error_std"] = a.naive_do_error_std;
      aj["adjusted_do_error_mean"] = a.adjusted_do_error_mean;
      aj["adjusted_do_error_std"] = a.adjusted_do_error_std;
      aj["attr_error_mean"] = a.attr_error_mean;
      aj["attr_error_std"] = a.attr_error_std;
      aj["naive_worse_count"] = a.naive_worse_count;
      aj["runtime_seconds"] = a.runtime_seconds;
      arr.push_back(std::move(aj));
    }
    j["architectures"] = std::move(arr);
  }
  if (!convergence.empty()) {
    json arr = json::array();
    for (const auto& row : convergence)
      arr.push_back(json{{"samples", row.samples},
                         {"mean_abs_error", row.mean_abs_error},
                         {"std_dev", row.std_dev}});
    j["convergence"] = std::move(arr);
  }
  if (!scaling.rows.empty()) {
    json rows = json::array();
    for (const auto& row : scaling.rows)
      rows.push_back(json{{"axis", row.axis},
                          {"m", row.m},
                          {"n", row.n},
                          {"p", row.p},
                          {"seconds", row.seconds}});
    j["scaling"] = json{{"rows", std::move(rows)},
                        {"slope_m", scaling.slope_m},
                        {"slope_n", scaling.slope_n},
                        {"slope_p", scaling.slope_p}};
  }
  if (j.is_null()) j = json::object();
  return j.dump(2) + "\n";
}

std::string format_suppression_json(const SuppressionOutcome& outcome) {
  json j;
  j["status"] = to_string(outcome.status);
  j["corr"] = json{{"value", outcome.corr.value}, {"degenerate", outcome.corr.degenerate}};
  j["iterations"] = outcome.trace.empty() ? 0 : outcome.trace.back().iter;
  j["initial_r"] = outcome.trace.empty() ? 0.0 : outcome.trace.front().r;
  j["final_r"] = outcome.trace.empty() ? 0.0 : outcome.trace.back().r;
  j["final_accuracy"] = outcome.trace.empty() ? 0.0 : outcome.trace.back().accuracy;
  j["model"] = model_to_json(outcome.model);
  return j.dump(2) + "\n";
}

std::string format_scenario_truth_json(const Scenario& scenario) {
  json j;
  j["architecture"] = to_string(scenario.spec.architecture);
  j["seed"] = scenario.spec.seed;
  j["sample_count"] = scenario.spec.sample_count;
  j["features"] = scenario.net.feature_nodes().size();
  j["labels"] = scenario.labels;
  j["true_do"] = scenario.true_do;
  return j.dump(2) + "\n";
}

}  // namespace apcalc
