// Command-line front end. Every command reads files named by flags, runs
// one library routine, and writes its JSON/CSV product through
// atomic_write_file (or stdout when --out is omitted). Exit codes: 0
// success, 2 usage error, 1 runtime failure. Failures end with a one-line
// JSON diagnostic on stderr whose "code" field is machine-readable.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "apcalc/attribution.hpp"
#include "apcalc/dataset.hpp"
#include "apcalc/discrete_network.hpp"
#include "apcalc/graph.hpp"
#include "apcalc/intervention.hpp"
#include "apcalc/io.hpp"
#include "apcalc/json_io.hpp"
#include "apcalc/metrics.hpp"
#include "apcalc/network_model.hpp"
#include "apcalc/separation.hpp"
#include "apcalc/synthbench.hpp"
#include "apcalc_tool/schemas.hpp"

namespace {

using nlohmann::json;

// Thrown for bad flag combinations discovered after CLI11 parsing.
struct UsageError : std::exception {
  std::string message;
  explicit UsageError(std::string msg) : message(std::move(msg)) {}
  const char* what() const noexcept override { return message.c_str(); }
};

void print_diagnostic(const std::string& code, const std::string& message) {
  json j;
  j["error"] = json{{"code", code}, {"message", message}};
  std::fputs((j.dump() + "\n").c_str(), stderr);
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::fputs(content.c_str(), stdout);
  } else {
    apcalc::atomic_write_file(out_path, content);
  }
}

apcalc::AttributionEstimator estimator_from_flag(const std::string& s) {
  return s == "conditional" ? apcalc::AttributionEstimator::conditional
                            : apcalc::AttributionEstimator::marginal;
}

apcalc::SeparationMode mode_from_flag(const std::string& s) {
  if (s == "neg_mi") return apcalc::SeparationMode::neg_mi;
  if (s == "dist") return apcalc::SeparationMode::dist;
  return apcalc::SeparationMode::literal_mi;
}

bool looks_discrete(const std::string& text) {
  const json j = json::parse(text, nullptr, false);
  return j.is_object() && (j.contains("nodes") || j.contains("feature_cards"));
}

// Options shared by the estimator-driven commands.
struct EstimatorFlags {
  int k = 1000;
  std::uint64_t seed = 0;  // 0 -> model seed
  int threads = 0;         // 0 -> APCALC_THREADS, else 1

  apcalc::EstimatorConfig config() const {
    apcalc::EstimatorConfig cfg;
    cfg.samples_per_point = k;
    cfg.seed = seed;
    cfg.threads = threads;
    return cfg;
  }
};

void add_estimator_flags(CLI::App* sub, EstimatorFlags* f) {
  sub->add_option("--k", f->k, "Monte Carlo draws per point")->check(CLI::PositiveNumber);
  sub->add_option("--seed", f->seed, "stream seed (0 = model seed)");
  sub->add_option("--threads", f->threads, "worker threads (0 = APCALC_THREADS env, else 1)")
      ->check(CLI::NonNegativeNumber);
}

// ---------------------------------------------------------------- attribute

struct AttributeOpts {
  std::string model_path, data_path, out_path, estimator = "marginal";
  EstimatorFlags est;
  bool per_point = false;
};

int run_attribute(const AttributeOpts& o) {
  const apcalc::NetworkModel model = apcalc::parse_model_json(apcalc::read_file(o.model_path));
  const apcalc::Dataset data = apcalc::read_dataset_csv(o.data_path);
  const apcalc::AttributionReport report = apcalc::attribution_matrix(
      model, data, o.est.config(), estimator_from_flag(o.estimator), o.per_point);
  emit(o.out_path, apcalc::format_attribution_json(report));
  return 0;
}

// ---------------------------------------------------------------- intervene

struct InterveneOpts {
  std::string model_path, data_path, queries_path, out_path;
  EstimatorFlags est;
  bool oracle = false;
};

int run_intervene(const InterveneOpts& o) {
  const std::string model_text = apcalc::read_file(o.model_path);
  const std::vector<apcalc::CliQuery> queries =
      apcalc::parse_queries_json(apcalc::read_file(o.queries_path));
  apcalc::Dataset data;
  bool have_data = false;
  if (!o.data_path.empty()) {
    data = apcalc::read_dataset_csv(o.data_path);
    have_data = true;
  }
  const auto need_data = [&](const std::string& method) {
    if (!have_data)
      throw std::invalid_argument("method '" + method + "' needs --data");
  };

  std::vector<apcalc::InterventionResult> results;
  if (looks_discrete(model_text)) {
    const apcalc::DiscreteNetwork net = apcalc::parse_discrete_json(model_text);
    for (const auto& cq : queries) {
      apcalc::InterventionResult r;
      if (cq.method == "ap") {
        need_data(cq.method);
        r = apcalc::do_effect_ap(net, data, cq.query);
      } else if (cq.method == "backdoor") {
        r = apcalc::backdoor_adjust(net, cq.query);
      } else if (cq.method == "frontdoor") {
        r = apcalc::frontdoor_adjust(net, cq.query);
      } else if (cq.method == "oracle") {
        r = apcalc::do_effect_oracle(net, cq.query);
      } else {  // effect
        r.estimate = apcalc::causal_effect(net, cq.query);
        r.method = "effect";
      }
      if (o.oracle && cq.method != "effect" && cq.method != "oracle") {
        const apcalc::InterventionResult exact = apcalc::do_effect_oracle(net, cq.query);
        r.has_oracle = true;
        r.oracle = exact.estimate;
        r.abs_error = std::abs(r.estimate - exact.estimate);
      }
      results.push_back(std::move(r));
    }
  } else {
    if (o.oracle)
      throw std::invalid_argument("--oracle needs a discrete network as --model");
    const apcalc::NetworkModel model = apcalc::parse_model_json(model_text);
    const apcalc::EstimatorConfig cfg = o.est.config();
    for (const auto& cq : queries) {
      apcalc::InterventionResult r;
      if (cq.method == "ap") {
        need_data(cq.method);
        r = apcalc::do_effect_ap(model, data, cq.query, cfg);
      } else if (cq.method == "effect") {
        need_data(cq.method);
        r.estimate = apcalc::causal_effect(model, data, cq.query, cfg);
        r.method = "effect";
        r.samples = cfg.samples_per_point;
      } else {
        throw std::invalid_argument("method '" + cq.method +
                                    "' needs a discrete network as --model");
      }
      results.push_back(std::move(r));
    }
  }
  emit(o.out_path, apcalc::format_intervention_json(results));
  return 0;
}

// ----------------------------------------------------------------- separate

struct SeparateOpts {
  std::string data_path, candidates_path, out_path, mode = "literal_mi";
  std::vector<int> labels;
  int bins = 8;
  std::uint64_t seed = 1;
};

int run_separate(const SeparateOpts& o) {
  if (o.labels.size() != 2)
    throw UsageError("--labels expects exactly two comma-separated labels, e.g. --labels 1,2");
  const apcalc::Dataset data = apcalc::read_dataset_csv(o.data_path);
  std::vector<apcalc::SeparationCandidate> candidates;
  if (o.candidates_path.empty()) {
    candidates = apcalc::default_candidates(static_cast<int>(data.n), o.seed);
  } else {
    candidates = apcalc::parse_candidates_json(apcalc::read_file(o.candidates_path));
  }
  const apcalc::SeparationResult result = apcalc::learn_separation(
      data, o.labels[0], o.labels[1], candidates, mode_from_flag(o.mode), o.bins);
  emit(o.out_path, apcalc::format_separation_json(result));
  return 0;
}

// ----------------------------------------------------------------- suppress

struct SuppressOpts {
  std::string model_path, data_path, out_path, trace_path, estimator = "marginal";
  int feature = 1, label = 1;
  EstimatorFlags est;
  apcalc::SuppressionConfig cfg;
};

int run_suppress(const SuppressOpts& o) {
  const apcalc::NetworkModel model = apcalc::parse_model_json(apcalc::read_file(o.model_path));
  const apcalc::Dataset data = apcalc::read_dataset_csv(o.data_path);
  apcalc::SuppressionConfig scfg = o.cfg;
  scfg.estimator = estimator_from_flag(o.estimator);
  const apcalc::SuppressionOutcome outcome =
      apcalc::suppress_spurious(model, data, o.feature, o.label, scfg, o.est.config());
  emit(o.out_path, apcalc::format_suppression_json(outcome));
  if (!o.trace_path.empty())
    apcalc::atomic_write_file(o.trace_path, apcalc::format_suppression_trace(outcome));
  return 0;
}

// ------------------------------------------------------------------ metrics

struct MetricsOpts {
  std::string model_path, data_path, trace_path, out_path, estimator = "marginal";
  int bins = 8;
  EstimatorFlags est;
};

int run_metrics(const MetricsOpts& o) {
  const apcalc::NetworkModel model = apcalc::parse_model_json(apcalc::read_file(o.model_path));
  apcalc::TracedDataset td;
  td.data = apcalc::read_dataset_csv(o.data_path);
  if (!o.trace_path.empty()) td.trace = apcalc::parse_trace_csv(apcalc::read_file(o.trace_path));
  const apcalc::MetricsReport report = apcalc::compute_metrics(
      model, td, o.est.config(), estimator_from_flag(o.estimator), o.bins);
  emit(o.out_path, apcalc::format_metrics_json(report));
  return 0;
}

// ---------------------------------------------------------------- benchmark

struct BenchmarkOpts {
  std::string suite, out_path;
  // arch suite
  std::vector<std::string> archs;
  int trials = 20;
  int samples = 1000;
  bool no_timing = false;
  // convergence suite
  std::string model_path, data_path;
  int feature = 1, label = 1, repeats = 5;
  std::vector<int> k_grid;
  // scaling suite
  int rows = 256, reps = 5;
  EstimatorFlags est;  // est.seed 0 -> scenario seed 1
};

int run_benchmark(const BenchmarkOpts& o) {
  const std::uint64_t scenario_seed = o.est.seed != 0 ? o.est.seed : 1;
  if (o.suite == "arch") {
    std::vector<std::string> names = o.archs;
    if (names.empty()) names = {"proposed", "junction", "common-cause"};
    std::vector<apcalc::ScenarioSpec> specs;
    for (const auto& name : names) {
      apcalc::ScenarioSpec spec;
      spec.architecture = apcalc::architecture_from_string(name);
      spec.sample_count = static_cast<std::size_t>(o.samples);
      spec.seed = scenario_seed;
      specs.push_back(spec);
    }
    std::vector<apcalc::ArchResult> results = apcalc::run_arch_benchmark(specs, o.trials);
    if (o.no_timing)
      for (auto& r : results) r.runtime_seconds = 0.0;
    emit(o.out_path, apcalc::format_benchmark_json(results, {}, apcalc::ScalingStudy{}));
    return 0;
  }
  if (o.suite == "convergence") {
    if (o.model_path.empty() || o.data_path.empty())
      throw UsageError("benchmark --suite convergence needs --model and --data");
    const apcalc::NetworkModel model = apcalc::parse_model_json(apcalc::read_file(o.model_path));
    const apcalc::Dataset data = apcalc::read_dataset_csv(o.data_path);
    std::vector<int> grid = o.k_grid;
    if (grid.empty()) grid = {100, 400, 1600, 6400};
    const apcalc::EstimatorConfig cfg = o.est.config();
    const std::vector<apcalc::ConvergenceRow> convergence =
        apcalc::convergence_study(model, data, o.feature, o.label, grid, o.repeats, cfg);
    emit(o.out_path, apcalc::format_benchmark_json({}, convergence, apcalc::ScalingStudy{}));
    return 0;
  }
  // scaling
  apcalc::ScalingConfig cfg;
  cfg.samples_per_point = o.est.k;
  cfg.rows = static_cast<std::size_t>(o.rows);
  cfg.timed_reps = o.reps;
  cfg.seed = scenario_seed;
  const apcalc::ScalingStudy study = apcalc::scaling_study(cfg);
  emit(o.out_path, apcalc::format_benchmark_json({}, {}, study));
  return 0;
}

// ----------------------------------------------------------------- validate

struct ValidateOpts {
  std::string suite, model_path, data_path, out_path;
  EstimatorFlags est;
};

struct CheckRow {
  std::string name;
  std::string status;  // pass | warn | fail
  std::string detail;
};

apcalc::Dataset head_rows(const apcalc::Dataset& data, std::size_t count) {
  apcalc::Dataset sub;
  sub.n = data.n;
  sub.has_labels = data.has_labels;
  const std::size_t take = std::min(count, data.rows());
  sub.features.assign(data.features.begin(),
                      data.features.begin() + static_cast<std::ptrdiff_t>(take * data.n));
  if (data.has_labels)
    sub.labels.assign(data.labels.begin(), data.labels.begin() + static_cast<std::ptrdiff_t>(take));
  return sub;
}

std::vector<CheckRow> axiom_checks(const apcalc::NetworkModel& model, const apcalc::Dataset& data,
                                   const apcalc::EstimatorConfig& cfg) {
  std::vector<CheckRow> checks;
  const apcalc::Dataset sub = head_rows(data, 8);
  const int m = model.m;
  const int n = model.n;

  {  // Exactly one deconfounder per label: argmax well defined, ties flagged.
    std::size_t ties = 0, degenerate = 0;
    bool ok = true;
    for (std::size_t r = 0; r < sub.rows(); ++r) {
      for (int l = 1; l <= m; ++l) {
        const apcalc::DominanceResult dom = apcalc::dominance_scores(model, sub.row(r), l, cfg);
        if (dom.degenerate) {
          ++degenerate;
          continue;
        }
        if (dom.argmax < 1 || dom.argmax > m) ok = false;
        double best = -1.0, second = -1.0;
        for (double s : dom.scores) {
          if (!std::isfinite(s) || s < 0.0) ok = false;
          if (s > best) {
            second = best;
            best = s;
          } else if (s > second) {
            second = s;
          }
        }
        if (m > 1 && best > 0.0 && best - second <= 1e-9 * best) ++ties;
      }
    }
    CheckRow row;
    row.name = "dominance_argmax";
    row.status = !ok ? "fail" : (ties + degenerate > 0 ? "warn" : "pass");
    row.detail = std::to_string(sub.rows()) + " rows x " + std::to_string(m) + " labels, " +
                 std::to_string(ties) + " near-ties, " + std::to_string(degenerate) +
                 " degenerate";
    checks.push_back(std::move(row));
  }

  {  // Pairwise mediator distances: finite, non-negative, symmetric.
    std::size_t pairs = 0;
    double worst_gap = 0.0;
    bool ok = true;
    for (int j = 1; j <= m; ++j) {
      for (int k = j + 1; k <= m; ++k) {
        if (model.mediators[static_cast<std::size_t>(j - 1)].p !=
            model.mediators[static_cast<std::size_t>(k - 1)].p)
          continue;
        ++pairs;
        const double jk = apcalc::separation_distance(model, j, k, sub);
        const double kj = apcalc::separation_distance(model, k, j, sub);
        if (!std::isfinite(jk) || jk < 0.0) ok = false;
        worst_gap = std::max(worst_gap, std::abs(jk - kj));
      }
    }
    if (worst_gap > 1e-9) ok = false;
    CheckRow row;
    row.name = "separation_audit";
    row.status = ok ? "pass" : "fail";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu pairs, max asymmetry %.3e", pairs, worst_gap);
    row.detail = buf;
    checks.push_back(std::move(row));
  }

  apcalc::AttributionReport report;
  {  // Marginal scores sum to zero across labels at every point.
    report = apcalc::attribution_matrix(model, sub, cfg, apcalc::AttributionEstimator::marginal,
                                        true);
    double worst = 0.0;
    for (const auto& block : report.per_point) {
      for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int l = 0; l < m; ++l) sum += block[static_cast<std::size_t>(i) * m + l];
        worst = std::max(worst, std::abs(sum));
      }
    }
    CheckRow row;
    row.name = "marginal_zero_sum";
    row.status = worst <= 1e-6 ? "pass" : "fail";
    char buf[48];
    std::snprintf(buf, sizeof buf, "max |row sum| %.3e", worst);
    row.detail = buf;
    checks.push_back(std::move(row));
  }

  {  // Disconnected features score zero and are d-separated; connected ones
     // are not d-separated.
    const apcalc::Dag g = apcalc::to_dag(model);
    apcalc::detail::Evaluator ev(model);
    bool ok = true;
    std::size_t disconnected = 0;
    double worst_score = 0.0;
    for (int i = 1; i <= n; ++i) {
      bool connected = false;
      for (int j = 0; j < m && !connected; ++j)
        connected = ev.g[static_cast<std::size_t>(j) * n + (i - 1)] != 0.0;
      const std::string src = "S" + std::to_string(i);
      for (int l = 1; l <= m; ++l) {
        const bool sep = apcalc::d_separated(g, src, "D" + std::to_string(l), {});
        if (connected) {
          if (sep) ok = false;
        } else {
          if (!sep) ok = false;
          worst_score = std::max(worst_score, std::abs(report.at(i, l)));
          if (worst_score > 1e-8) ok = false;
        }
      }
      if (!connected) ++disconnected;
    }
    CheckRow row;
    row.name = "disconnected_zero";
    row.status = ok ? "pass" : "fail";
    char buf[80];
    std::snprintf(buf, sizeof buf, "%zu disconnected features, max |score| %.3e", disconnected,
                  worst_score);
    row.detail = buf;
    checks.push_back(std::move(row));
  }
  return checks;
}

std::vector<CheckRow> gradient_checks(const apcalc::NetworkModel& model,
                                      const apcalc::Dataset& data,
                                      const apcalc::EstimatorConfig& cfg) {
  const apcalc::Dataset sub = head_rows(data, 4);
  double worst = 0.0;
  for (std::size_t r = 0; r < sub.rows(); ++r) {
    for (int i = 1; i <= model.n; ++i) {
      for (int l = 1; l <= model.m; ++l) {
        const double an = apcalc::attribution_marginal_point(model, sub.row(r), i, l, cfg, r);
        const double fd = apcalc::fd_marginal_gradient(model, sub.row(r), i, l, cfg, r);
        const double rel = std::abs(an - fd) / std::max({1e-6, std::abs(an), std::abs(fd)});
        worst = std::max(worst, rel);
      }
    }
  }
  CheckRow row;
  row.name = "analytic_vs_fd";
  row.status = worst <= 1e-5 ? "pass" : "fail";
  char buf[48];
  std::snprintf(buf, sizeof buf, "max relative error %.3e", worst);
  row.detail = buf;
  return {row};
}

std::vector<CheckRow> oracle_checks(const apcalc::DiscreteNetwork& net,
                                    const apcalc::Dataset& data) {
  const int labels = net.nodes()[static_cast<std::size_t>(net.label_node())].card;
  std::size_t cells = 0, failed = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < net.feature_nodes().size(); ++i) {
    const int card = net.nodes()[static_cast<std::size_t>(net.feature_nodes()[i])].card;
    for (int state = 0; state < card; ++state) {
      for (int l = 1; l <= labels; ++l) {
        apcalc::InterventionQuery q;
        q.feature = static_cast<int>(i) + 1;
        q.value = state;
        q.label = l;
        const apcalc::InterventionResult ap = apcalc::do_effect_ap(net, data, q);
        const apcalc::InterventionResult exact = apcalc::do_effect_oracle(net, q);
        const double gap = std::abs(ap.estimate - exact.estimate);
        const double tol = 3.0 * ap.std_error + 1e-9;
        ++cells;
        if (gap > tol) ++failed;
        worst = std::max(worst, gap - tol);
      }
    }
  }
  CheckRow row;
  row.name = "ap_vs_oracle";
  row.status = failed == 0 ? "pass" : "fail";
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu cells, %zu beyond 3 std errors, worst excess %.3e", cells,
                failed, std::max(0.0, worst));
  row.detail = buf;
  return {row};
}

int run_validate(const ValidateOpts& o) {
  const std::string model_text = apcalc::read_file(o.model_path);
  const apcalc::Dataset data = apcalc::read_dataset_csv(o.data_path);

  std::vector<CheckRow> checks;
  if (o.suite == "oracle") {
    if (!looks_discrete(model_text))
      throw std::invalid_argument("suite 'oracle' needs a discrete network as --model");
    checks = oracle_checks(apcalc::parse_discrete_json(model_text), data);
  } else {
    if (looks_discrete(model_text))
      throw std::invalid_argument("suite '" + o.suite + "' needs a continuous model as --model");
    const apcalc::NetworkModel model = apcalc::parse_model_json(model_text);
    checks = o.suite == "axioms" ? axiom_checks(model, data, o.est.config())
                                 : gradient_checks(model, data, o.est.config());
  }

  bool passed = true;
  json rows = json::array();
  for (const auto& c : checks) {
    if (c.status == "fail") passed = false;
    rows.push_back(json{{"name", c.name}, {"status", c.status}, {"detail", c.detail}});
  }
  json report;
  report["suite"] = o.suite;
  report["passed"] = passed;
  report["checks"] = std::move(rows);
  const std::string text = report.dump(2) + "\n";
  if (o.out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    apcalc::atomic_write_file(o.out_path, text);
    for (const auto& c : checks)
      std::printf("%s %s (%s)\n", c.status.c_str(), c.name.c_str(), c.detail.c_str());
  }
  return passed ? 0 : 1;
}

// ----------------------------------------------------------------- generate

struct GenerateOpts {
  std::string arch, model_path;
  std::string out_model, out_data, out_trace, out_truth;
  int n = 2, m = 2;
  int count = 1000;
  std::uint64_t seed = 1;
};

int run_generate(const GenerateOpts& o) {
  if (o.arch.empty() == o.model_path.empty())
    throw UsageError("generate needs exactly one of --arch or --model");
  if (o.out_data.empty()) throw UsageError("generate needs --out-data");

  if (!o.arch.empty()) {
    apcalc::ScenarioSpec spec;
    spec.architecture = apcalc::architecture_from_string(o.arch);
    spec.n = o.n;
    spec.m = o.m;
    spec.sample_count = static_cast<std::size_t>(o.count);
    spec.seed = o.seed;
    const apcalc::Scenario sc = apcalc::generate_scenario(spec);
    emit(o.out_data, apcalc::format_dataset_csv(sc.data.data));
    if (!o.out_model.empty())
      apcalc::atomic_write_file(o.out_model, apcalc::format_discrete_json(sc.net));
    if (!o.out_trace.empty())
      apcalc::atomic_write_file(o.out_trace, apcalc::format_trace_csv(sc.data.trace));
    if (!o.out_truth.empty())
      apcalc::atomic_write_file(o.out_truth, apcalc::format_scenario_truth_json(sc));
    return 0;
  }

  if (!o.out_truth.empty()) throw UsageError("--out-truth applies only to --arch scenarios");
  const std::string model_text = apcalc::read_file(o.model_path);
  apcalc::TracedDataset td;
  std::string model_copy;
  if (looks_discrete(model_text)) {
    const apcalc::DiscreteNetwork net = apcalc::parse_discrete_json(model_text);
    td = net.sample_joint(static_cast<std::size_t>(o.count), o.seed);
    model_copy = apcalc::format_discrete_json(net);
  } else {
    const apcalc::NetworkModel model = apcalc::parse_model_json(model_text);
    td = apcalc::sample_joint(model, static_cast<std::size_t>(o.count),
                              o.seed != 0 ? o.seed : model.seed);
    model_copy = apcalc::format_model_json(model);
  }
  emit(o.out_data, apcalc::format_dataset_csv(td.data));
  if (!o.out_model.empty()) apcalc::atomic_write_file(o.out_model, model_copy);
  if (!o.out_trace.empty())
    apcalc::atomic_write_file(o.out_trace, apcalc::format_trace_csv(td.trace));
  return 0;
}

// ------------------------------------------------------------------- main

int print_schema(const std::string& name) {
  if (name == "list") {
    json names = json::array();
    for (const auto& [key, value] : apcalc::schemas::kAll) names.push_back(std::string(key));
    std::fputs((names.dump() + "\n").c_str(), stdout);
    return 0;
  }
  for (const auto& [key, value] : apcalc::schemas::kAll) {
    if (key == name) {
      std::fwrite(value.data(), 1, value.size(), stdout);
      return 0;
    }
  }
  std::fprintf(stderr, "unknown schema '%s' (try --schema list)\n", name.c_str());
  print_diagnostic("unknown_schema", "unknown schema '" + name + "'");
  return 2;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"attribution projection calculus toolkit"};
  app.require_subcommand(0, 1);

  bool version = false;
  std::string schema_name;
  app.add_flag("--version", version, "print version metadata and exit");
  app.add_option("--schema", schema_name,
                 "print a bundled JSON schema and exit ('list' enumerates names)");

  AttributeOpts at;
  CLI::App* attribute = app.add_subcommand("attribute", "source-to-label attribution matrix");
  attribute->add_option("--model", at.model_path, "model JSON")->required();
  attribute->add_option("--data", at.data_path, "feature rows CSV")->required();
  attribute->add_option("--estimator", at.estimator, "marginal | conditional")
      ->check(CLI::IsMember({"marginal", "conditional"}));
  attribute->add_flag("--per-point", at.per_point, "include one score block per data row");
  attribute->add_option("--out", at.out_path, "output path (default stdout)");
  add_estimator_flags(attribute, &at.est);

  InterveneOpts iv;
  CLI::App* intervene = app.add_subcommand("intervene", "do-effects and adjustment estimates");
  intervene->add_option("--model", iv.model_path, "model or discrete network JSON")->required();
  intervene->add_option("--queries", iv.queries_path, "query list JSON")->required();
  intervene->add_option("--data", iv.data_path, "feature rows CSV (method 'ap')");
  intervene->add_flag("--oracle", iv.oracle, "attach exact values (discrete networks)");
  intervene->add_option("--out", iv.out_path, "output path (default stdout)");
  add_estimator_flags(intervene, &iv.est);

  SeparateOpts sp;
  CLI::App* separate = app.add_subcommand("separate", "pick a separation function");
  separate->add_option("--data", sp.data_path, "labeled rows CSV")->required();
  separate->add_option("--labels", sp.labels, "label pair, e.g. 1,2")
      ->required()
      ->delimiter(',');
  separate->add_option("--mode", sp.mode, "literal_mi | neg_mi | dist")
      ->check(CLI::IsMember({"literal_mi", "neg_mi", "dist"}));
  separate->add_option("--bins", sp.bins, "conditioning bins")->check(CLI::PositiveNumber);
  separate->add_option("--candidates", sp.candidates_path, "candidate list JSON");
  separate->add_option("--seed", sp.seed, "seed for the default candidate sweep");
  separate->add_option("--out", sp.out_path, "output path (default stdout)");

  SuppressOpts su;
  CLI::App* suppress = app.add_subcommand("suppress", "descend spurious correlation");
  suppress->add_option("--model", su.model_path, "model JSON")->required();
  suppress->add_option("--data", su.data_path, "labeled rows CSV")->required();
  suppress->add_option("--feature", su.feature, "source index")->check(CLI::PositiveNumber);
  suppress->add_option("--label", su.label, "label index")->check(CLI::PositiveNumber);
  suppress->add_option("--epsilon", su.cfg.epsilon, "target score");
  suppress->add_option("--step", su.cfg.step, "initial step size");
  suppress->add_option("--max-iters", su.cfg.max_iters, "iteration cap")
      ->check(CLI::PositiveNumber);
  suppress->add_option("--fd-step", su.cfg.fd_step, "finite-difference step");
  suppress->add_option("--estimator", su.estimator, "marginal | conditional")
      ->check(CLI::IsMember({"marginal", "conditional"}));
  suppress->add_option("--out", su.out_path, "outcome JSON path (default stdout)");
  suppress->add_option("--trace", su.trace_path, "per-iteration CSV path");
  add_estimator_flags(suppress, &su.est);

  MetricsOpts me;
  CLI::App* metrics = app.add_subcommand("metrics", "correlation, info-gain, fairness table");
  metrics->add_option("--model", me.model_path, "model JSON")->required();
  metrics->add_option("--data", me.data_path, "labeled rows CSV")->required();
  metrics->add_option("--trace", me.trace_path, "mediator trace CSV (enables info gain)");
  metrics->add_option("--estimator", me.estimator, "marginal | conditional")
      ->check(CLI::IsMember({"marginal", "conditional"}));
  metrics->add_option("--bins", me.bins, "histogram bins")->check(CLI::PositiveNumber);
  metrics->add_option("--out", me.out_path, "output path (default stdout)");
  add_estimator_flags(metrics, &me.est);

  BenchmarkOpts be;
  CLI::App* benchmark = app.add_subcommand("benchmark", "synthetic studies");
  benchmark->add_option("--suite", be.suite, "arch | convergence | scaling")
      ->required()
      ->check(CLI::IsMember({"arch", "convergence", "scaling"}));
  benchmark->add_option("--arch", be.archs, "architectures for --suite arch (repeatable)")
      ->check(CLI::IsMember({"proposed", "junction", "common-cause"}));
  benchmark->add_option("--trials", be.trials, "paired trials per architecture")
      ->check(CLI::PositiveNumber);
  benchmark->add_option("--samples", be.samples, "rows per generated scenario")
      ->check(CLI::PositiveNumber);
  benchmark->add_flag("--no-timing", be.no_timing,
                      "zero wall-clock fields so output bytes are reproducible");
  benchmark->add_option("--model", be.model_path, "model JSON (--suite convergence)");
  benchmark->add_option("--data", be.data_path, "feature rows CSV (--suite convergence)");
  benchmark->add_option("--feature", be.feature, "source index")->check(CLI::PositiveNumber);
  benchmark->add_option("--label", be.label, "label index")->check(CLI::PositiveNumber);
  benchmark->add_option("--k-grid", be.k_grid, "sample counts, e.g. 100,400,1600")
      ->delimiter(',');
  benchmark->add_option("--repeats", be.repeats, "independent repeats per grid point")
      ->check(CLI::PositiveNumber);
  benchmark->add_option("--rows", be.rows, "dataset rows (--suite scaling)")
      ->check(CLI::PositiveNumber);
  benchmark->add_option("--reps", be.reps, "timed repetitions (--suite scaling)")
      ->check(CLI::PositiveNumber);
  benchmark->add_option("--out", be.out_path, "output path (default stdout)");
  add_estimator_flags(benchmark, &be.est);

  ValidateOpts va;
  CLI::App* validate = app.add_subcommand("validate", "self-check suites");
  validate->add_option("--suite", va.suite, "axioms | gradients | oracle")
      ->required()
      ->check(CLI::IsMember({"axioms", "gradients", "oracle"}));
  validate->add_option("--model", va.model_path, "model or discrete network JSON")->required();
  validate->add_option("--data", va.data_path, "feature rows CSV")->required();
  validate->add_option("--out", va.out_path, "report JSON path (default stdout)");
  add_estimator_flags(validate, &va.est);

  GenerateOpts ge;
  CLI::App* generate = app.add_subcommand("generate", "sample synthetic data");
  generate->add_option("--arch", ge.arch, "proposed | junction | common-cause")
      ->check(CLI::IsMember({"proposed", "junction", "common-cause"}));
  generate->add_option("--model", ge.model_path, "continuous model JSON to sample instead");
  generate->add_option("--n", ge.n, "features (--arch proposed)")->check(CLI::PositiveNumber);
  generate->add_option("--m", ge.m, "mediators (--arch proposed)")->check(CLI::PositiveNumber);
  generate->add_option("--count", ge.count, "rows to sample")->check(CLI::PositiveNumber);
  generate->add_option("--seed", ge.seed, "sampling seed");
  generate->add_option("--out-model", ge.out_model, "generator JSON path");
  generate->add_option("--out-data", ge.out_data, "sampled rows CSV path");
  generate->add_option("--out-trace", ge.out_trace, "mediator trace CSV path");
  generate->add_option("--out-truth", ge.out_truth, "exact do-table JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    print_diagnostic("usage", e.what());
    return 2;
  }

  if (version) {
    json j{{"name", "apcalc"}, {"version", APCALC_VERSION}};
    std::fputs((j.dump() + "\n").c_str(), stdout);
    return 0;
  }
  if (!schema_name.empty()) return print_schema(schema_name);

  if (app.got_subcommand(attribute)) return run_attribute(at);
  if (app.got_subcommand(intervene)) return run_intervene(iv);
  if (app.got_subcommand(separate)) return run_separate(sp);
  if (app.got_subcommand(suppress)) return run_suppress(su);
  if (app.got_subcommand(metrics)) return run_metrics(me);
  if (app.got_subcommand(benchmark)) return run_benchmark(be);
  if (app.got_subcommand(validate)) return run_validate(va);
  if (app.got_subcommand(generate)) return run_generate(ge);

  std::fputs(app.help().c_str(), stderr);
  print_diagnostic("usage", "a command is required");
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  // Unknown command, distinct from unknown flags: CLI11 would fold both
  // into one extras error.
  if (argc > 1 && argv[1][0] != '-') {
    static const std::vector<std::string> known = {"attribute", "intervene", "separate",
                                                   "suppress",  "metrics",   "benchmark",
                                                   "validate",  "generate"};
    if (std::find(known.begin(), known.end(), std::string(argv[1])) == known.end()) {
      std::fprintf(stderr, "unknown command '%s'\n", argv[1]);
      print_diagnostic("unknown_command", std::string("unknown command '") + argv[1] + "'");
      return 2;
    }
  }
  try {
    return dispatch(argc, argv);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    print_diagnostic("usage", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "%s\n", e.what());
    print_diagnostic("invalid_input", e.what());
    return 1;
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    std::string code = "runtime_error";
    if (msg.rfind("cannot open file for writing", 0) == 0 || msg.rfind("short write", 0) == 0 ||
        msg.rfind("rename failed", 0) == 0) {
      code = "write_failed";
    } else if (msg.rfind("cannot open file", 0) == 0) {
      code = "missing_file";
    }
    std::fprintf(stderr, "%s\n", msg.c_str());
    print_diagnostic(code, msg);
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    print_diagnostic("internal_error", e.what());
    return 1;
  }
}
