#include "apcalc/synthbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "apcalc/attribution.hpp"
#include "apcalc/intervention.hpp"
#include "apcalc/rng.hpp"

namespace apcalc {

const char* to_string(Architecture a) {
  switch (a) {
    case Architecture::proposed: return "proposed";
    case Architecture::junction: return "junction";
    case Architecture::common_cause: return "common-cause";
  }
  return "unknown";
}

Architecture architecture_from_string(const std::string& s) {
  if (s == "proposed") return Architecture::proposed;
  if (s == "junction") return Architecture::junction;
  if (s == "common-cause" || s == "common_cause") return Architecture::common_cause;
  throw std::invalid_argument("unknown architecture: " + s);
}

namespace {

// CPT entries stay in [0.05, 0.95] so no conditioning cell degenerates.
double bounded_prob(Stream& st) { return 0.05 + 0.9 * st.uniform(); }

std::vector<double> bounded_distribution(Stream& st, int card) {
  std::vector<double> row(static_cast<std::size_t>(card));
  double total = 0.0;
  for (double& v : row) {
    v = bounded_prob(st);
    total += v;
  }
  for (double& v : row) v /= total;
  return row;
}

DiscreteNetwork build_proposed(const ScenarioSpec& spec) {
  const int n = spec.n, m = spec.m;
  std::vector<int> fcards(static_cast<std::size_t>(n), 2);
  std::vector<int> mcards(static_cast<std::size_t>(m), 2);

  std::vector<double> ones(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    Stream st(derive_key(spec.seed, StreamTag::scenario, 0, static_cast<std::uint64_t>(i)));
    ones[static_cast<std::size_t>(i)] = bounded_prob(st);
  }
  const std::size_t s_states = std::size_t{1} << n;
  std::vector<double> prior(s_states, 1.0);
  for (std::size_t cfg = 0; cfg < s_states; ++cfg)
    for (int i = 0; i < n; ++i) {
      const int bit = static_cast<int>(cfg >> (n - 1 - i)) & 1;  // first feature leads
      prior[cfg] *= bit ? ones[static_cast<std::size_t>(i)]
                        : 1.0 - ones[static_cast<std::size_t>(i)];
    }

  std::vector<std::vector<double>> med_cpts;
  for (int j = 0; j < m; ++j) {
    Stream st(derive_key(spec.seed, StreamTag::scenario, 1, static_cast<std::uint64_t>(j)));
    std::vector<double> cpt(s_states * 2);
    for (std::size_t row = 0; row < s_states; ++row) {
      const double q = bounded_prob(st);
      cpt[row * 2] = 1.0 - q;
      cpt[row * 2 + 1] = q;
    }
    med_cpts.push_back(std::move(cpt));
  }

  const std::size_t x_states = std::size_t{1} << m;
  std::vector<double> dest(x_states * static_cast<std::size_t>(m));
  Stream st(derive_key(spec.seed, StreamTag::scenario, 2));
  for (std::size_t row = 0; row < x_states; ++row) {
    const auto dist = bounded_distribution(st, m);
    for (int l = 0; l < m; ++l) dest[row * static_cast<std::size_t>(m) +
                                     static_cast<std::size_t>(l)] = dist[static_cast<std::size_t>(l)];
  }
  return DiscreteNetwork::structured(fcards, mcards, prior, med_cpts, dest);
}

DiscreteNetwork build_junction(const ScenarioSpec& spec) {
  Stream st(derive_key(spec.seed, StreamTag::scenario, 3));
  DiscreteNode a{"A", 2, {}, {}};
  {
    const double p = bounded_prob(st);
    a.cpt = {1.0 - p, p};
  }
  DiscreteNode b{"B", 2, {}, {}};
  {
    const double p = bounded_prob(st);
    b.cpt = {1.0 - p, p};
  }
  DiscreteNode s{"S", 2, {0, 1}, {}};
  s.cpt.resize(8);
  for (std::size_t row = 0; row < 4; ++row) {
    const double p = bounded_prob(st);
    s.cpt[row * 2] = 1.0 - p;
    s.cpt[row * 2 + 1] = p;
  }
  DiscreteNode d{"D", 2, {0, 1, 2}, {}};
  d.cpt.resize(16);
  for (std::size_t row = 0; row < 8; ++row) {
    const double p = bounded_prob(st);
    d.cpt[row * 2] = 1.0 - p;
    d.cpt[row * 2 + 1] = p;
  }
  return DiscreteNetwork({a, b, s, d}, {2}, 3, {0, 1});
}

DiscreteNetwork build_common_cause(const ScenarioSpec& spec) {
  Stream st(derive_key(spec.seed, StreamTag::scenario, 4));
  DiscreteNode s{"S", 2, {}, {}};
  {
    const double p = bounded_prob(st);
    s.cpt = {1.0 - p, p};
  }
  DiscreteNode a{"A", 2, {0}, {}};
  a.cpt.resize(4);
  for (std::size_t row = 0; row < 2; ++row) {
    const double p = bounded_prob(st);
    a.cpt[row * 2] = 1.0 - p;
    a.cpt[row * 2 + 1] = p;
  }
  DiscreteNode b{"B", 2, {0}, {}};
  b.cpt.resize(4);
  for (std::size_t row = 0; row < 2; ++row) {
    const double p = bounded_prob(st);
    b.cpt[row * 2] = 1.0 - p;
    b.cpt[row * 2 + 1] = p;
  }
  DiscreteNode d{"D", 2, {1, 2}, {}};
  d.cpt.resize(8);
  for (std::size_t row = 0; row < 4; ++row) {
    const double p = bounded_prob(st);
    d.cpt[row * 2] = 1.0 - p;
    d.cpt[row * 2 + 1] = p;
  }
  return DiscreteNetwork({s, a, b, d}, {0}, 3, {1, 2});
}

}  // namespace

Scenario generate_scenario(const ScenarioSpec& spec) {
  if (spec.n < 1 || spec.m < 1) throw std::invalid_argument("generate_scenario: dimensions must be >= 1");
  if (spec.sample_count < 1) throw std::invalid_argument("generate_scenario: sample_count must be >= 1");

  DiscreteNetwork net = [&] {
    switch (spec.architecture) {
      case Architecture::proposed: return build_proposed(spec);
      case Architecture::junction: return build_junction(spec);
      case Architecture::common_cause: return build_common_cause(spec);
    }
    throw std::invalid_argument("generate_scenario: unknown architecture");
  }();

  Scenario sc{spec, net, net.sample_joint(spec.sample_count, spec.seed), 0, {}};
  sc.labels = net.nodes()[static_cast<std::size_t>(net.label_node())].card;
  const int nf = static_cast<int>(net.feature_nodes().size());
  sc.true_do.resize(static_cast<std::size_t>(nf) * 2 * static_cast<std::size_t>(sc.labels));
  for (int i = 1; i <= nf; ++i)
    for (int s = 0; s < 2; ++s)
      for (int l = 1; l <= sc.labels; ++l) {
        InterventionQuery q;
        q.feature = i;
        q.value = s;
        q.label = l;
        sc.true_do[(static_cast<std::size_t>(i - 1) * 2 + static_cast<std::size_t>(s)) *
                       static_cast<std::size_t>(sc.labels) +
                   static_cast<std::size_t>(l - 1)] = do_effect_oracle(net, q).estimate;
      }
  return sc;
}

DiscreteNetwork fit_network(const DiscreteNetwork& like, const TracedDataset& td) {
  const auto& nodes = like.nodes();
  const std::size_t rows = td.data.rows();
  if (rows == 0) throw std::invalid_argument("fit_network: dataset is empty");
  if (td.data.n != like.feature_nodes().size())
    throw std::invalid_argument("fit_network: feature dimension mismatch");
  if (td.trace.dims.size() != like.mediator_nodes().size())
    throw std::invalid_argument("fit_network: trace does not cover the mediators");
  if (!td.data.has_labels) throw std::invalid_argument("fit_network: labels required");

  // node index -> how to read its value from a row
  enum class Role { feature, mediator, label };
  struct Source {
    Role role;
    std::size_t pos;
  };
  std::vector<Source> source(nodes.size(), {Role::label, 0});
  std::vector<char> covered(nodes.size(), 0);
  for (std::size_t i = 0; i < like.feature_nodes().size(); ++i) {
    source[static_cast<std::size_t>(like.feature_nodes()[i])] = {Role::feature, i};
    covered[static_cast<std::size_t>(like.feature_nodes()[i])] = 1;
  }
  for (std::size_t j = 0; j < like.mediator_nodes().size(); ++j) {
    source[static_cast<std::size_t>(like.mediator_nodes()[j])] = {Role::mediator, j};
    covered[static_cast<std::size_t>(like.mediator_nodes()[j])] = 1;
  }
  source[static_cast<std::size_t>(like.label_node())] = {Role::label, 0};
  covered[static_cast<std::size_t>(like.label_node())] = 1;
  for (std::size_t v = 0; v < nodes.size(); ++v)
    if (!covered[v])
      throw std::invalid_argument("fit_network: node " + nodes[v].name +
                                  " is not observed in the dataset");

  const auto value_of = [&](std::size_t r, std::size_t v) {
    const auto& src = source[v];
    double raw = 0.0;
    switch (src.role) {
      case Role::feature: raw = td.data.at(r, src.pos); break;
      case Role::mediator: raw = td.trace.at(r, static_cast<int>(src.pos), 0); break;
      case Role::label: raw = static_cast<double>(td.data.labels[r] - 1); break;
    }
    const int st = static_cast<int>(std::lround(raw));
    if (std::abs(raw - st) > 1e-9 || st < 0 || st >= nodes[v].card)
      throw std::invalid_argument("fit_network: value outside node " + nodes[v].name +
                                  "'s state space");
    return st;
  };

  std::vector<DiscreteNode> fitted = nodes;
  std::vector<int> state(nodes.size(), 0);
  std::vector<std::vector<double>> counts(nodes.size());
  for (std::size_t v = 0; v < nodes.size(); ++v)
    counts[v].assign(nodes[v].cpt.size(), 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t v = 0; v < nodes.size(); ++v) state[v] = value_of(r, v);
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      std::uint64_t row = 0;
      for (int p : nodes[v].parents)
        row = row * static_cast<std::uint64_t>(nodes[static_cast<std::size_t>(p)].card) +
              static_cast<std::uint64_t>(state[static_cast<std::size_t>(p)]);
      counts[v][row * static_cast<std::uint64_t>(nodes[v].card) +
                static_cast<std::uint64_t>(state[v])] += 1.0;
    }
  }
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    const std::size_t card = static_cast<std::size_t>(nodes[v].card);
    const std::size_t cpt_rows = counts[v].size() / card;
    for (std::size_t row = 0; row < cpt_rows; ++row) {
      double total = 0.0;
      for (std::size_t s = 0; s < card; ++s) total += counts[v][row * card + s];
      for (std::size_t s = 0; s < card; ++s)
        fitted[v].cpt[row * card + s] =
            (counts[v][row * card + s] + 1.0) / (total + static_cast<double>(card));
    }
  }
  return DiscreteNetwork(std::move(fitted), like.feature_nodes(), like.label_node(),
                         like.mediator_nodes());
}

double naive_conditional(const DiscreteNetwork& net, int feature, int state, int label) {
  if (feature < 1 || feature > static_cast<int>(net.feature_nodes().size()))
    throw std::invalid_argument("naive_conditional: feature index out of range");
  const int node = net.feature_nodes()[static_cast<std::size_t>(feature - 1)];
  const int cs = net.nodes()[static_cast<std::size_t>(node)].card;
  const int m = net.nodes()[static_cast<std::size_t>(net.label_node())].card;
  if (state < 0 || state >= cs) throw std::invalid_argument("naive_conditional: state out of range");
  if (label < 1 || label > m) throw std::invalid_argument("naive_conditional: label out of range");
  const auto table = net.marginal({net.label_node(), node});
  double p_s = 0.0, cell = 0.0;
  for (int d = 0; d < m; ++d) {
    const double p = table[static_cast<std::size_t>(d) * static_cast<std::size_t>(cs) +
                           static_cast<std::size_t>(state)];
    p_s += p;
    if (d == label - 1) cell = p;
  }
  if (p_s <= 0.0) throw std::runtime_error("naive_conditional: conditioning state has zero mass");
  return cell / p_s;
}

namespace {

std::pair<double, double> mean_std(const std::vector<double>& v) {
  const double count = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / count;
  if (v.size() < 2) return {mean, 0.0};
  double sq = 0.0;
  for (double x : v) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / (count - 1.0))};
}

}  // namespace

std::vector<ArchResult> run_arch_benchmark(const std::vector<ScenarioSpec>& specs,
                                           std::size_t trials) {
  if (trials < 1) throw std::invalid_argument("run_arch_benchmark: need at least one trial");
  std::vector<ArchResult> out;
  for (const auto& spec : specs) {
    ArchResult ar;
    ar.architecture = to_string(spec.architecture);
    ar.trials = trials;
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<double> naive_errs, adj_errs, attr_errs;
    for (std::size_t t = 0; t < trials; ++t) {
      ScenarioSpec s = spec;
      s.seed = spec.seed + t;
      ar.seeds.push_back(s.seed);
      const Scenario sc = generate_scenario(s);
      const DiscreteNetwork fitted = fit_network(sc.net, sc.data);
      const int nf = static_cast<int>(sc.net.feature_nodes().size());
      const int labels = sc.labels;

      std::vector<double> adj(static_cast<std::size_t>(nf) * 2 *
                              static_cast<std::size_t>(labels));
      double naive_err = 0.0, adj_err = 0.0;
      for (int i = 1; i <= nf; ++i)
        for (int st = 0; st < 2; ++st)
          for (int l = 1; l <= labels; ++l) {
            InterventionQuery q;
            q.feature = i;
            q.value = st;
            q.label = l;
            double est = 0.0;
            switch (spec.architecture) {
              case Architecture::proposed:
                est = do_effect_ap(fitted, sc.data.data, q).estimate;
                break;
              case Architecture::junction:
                q.adjustment_set = {"A", "B"};
                est = backdoor_adjust(fitted, q).estimate;
                break;
              case Architecture::common_cause:
                est = backdoor_adjust(fitted, q).estimate;
                break;
            }
            const std::size_t idx =
                (static_cast<std::size_t>(i - 1) * 2 + static_cast<std::size_t>(st)) *
                    static_cast<std::size_t>(labels) +
                static_cast<std::size_t>(l - 1);
            adj[idx] = est;
            const double truth = sc.true_do[idx];
            naive_err += std::abs(naive_conditional(fitted, i, st, l) - truth);
            adj_err += std::abs(est - truth);
          }
      const double cells = static_cast<double>(nf) * 2.0 * static_cast<double>(labels);
      naive_err /= cells;
      adj_err /= cells;

      double attr_err = 0.0;
      for (int i = 1; i <= nf; ++i)
        for (int l = 1; l <= labels; ++l) {
          const std::size_t hi =
              (static_cast<std::size_t>(i - 1) * 2 + 1) * static_cast<std::size_t>(labels) +
              static_cast<std::size_t>(l - 1);
          const std::size_t lo =
              (static_cast<std::size_t>(i - 1) * 2) * static_cast<std::size_t>(labels) +
              static_cast<std::size_t>(l - 1);
          attr_err += std::abs((adj[hi] - adj[lo]) - (sc.true_do[hi] - sc.true_do[lo]));
        }
      attr_err /= static_cast<double>(nf) * static_cast<double>(labels);

      naive_errs.push_back(naive_err);
      adj_errs.push_back(adj_err);
      attr_errs.push_back(attr_err);
      if (naive_err > adj_err) ++ar.naive_worse_count;
    }

    std::tie(ar.naive_do_error_mean, ar.naive_do_error_std) = mean_std(naive_errs);
    std::tie(ar.adjusted_do_error_mean, ar.adjusted_do_error_std) = mean_std(adj_errs);
    std::tie(ar.attr_error_mean, ar.attr_error_std) = mean_std(attr_errs);
    ar.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(ar));
  }
  return out;
}

std::vector<ConvergenceRow> convergence_study(const NetworkModel& model, const Dataset& data,
                                              int i, int l, const std::vector<int>& k_grid,
                                              int repeats, const EstimatorConfig& cfg) {
  if (k_grid.empty()) throw std::invalid_argument("convergence_study: empty grid");
  if (!std::is_sorted(k_grid.begin(), k_grid.end()))
    throw std::invalid_argument("convergence_study: grid must ascend");
  if (repeats < 1) throw std::invalid_argument("convergence_study: repeats must be >= 1");

  EstimatorConfig ref_cfg = cfg;
  ref_cfg.samples_per_point = 16 * k_grid.back();
  const double reference = attribution_marginal(model, data, i, l, ref_cfg);
  const std::uint64_t base = resolve_seed(model, cfg);

  std::vector<ConvergenceRow> rows;
  for (int k : k_grid) {
    std::vector<double> errs;
    for (int rep = 0; rep < repeats; ++rep) {
      EstimatorConfig run = cfg;
      run.samples_per_point = k;
      run.seed = derive_key(base, StreamTag::generic, static_cast<std::uint64_t>(k),
                            static_cast<std::uint64_t>(rep));
      errs.push_back(std::abs(attribution_marginal(model, data, i, l, run) - reference));
    }
    const auto [mean, sd] = mean_std(errs);
    rows.push_back({k, mean, sd});
  }
  return rows;
}

NetworkModel make_random_model(int n, int m, int p, std::uint64_t seed) {
  if (n < 1 || m < 1 || p < 1) throw std::invalid_argument("make_random_model: dimensions must be >= 1");
  NetworkModel model;
  model.n = n;
  model.m = m;
  model.seed = seed;
  const double wscale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < m; ++j) {
    MediatorSpec med;
    med.p = p;
    med.weight.resize(static_cast<std::size_t>(p) * static_cast<std::size_t>(n));
    Stream st(derive_key(seed, StreamTag::scenario, 10, static_cast<std::uint64_t>(j)));
    for (double& w : med.weight) w = wscale * st.gaussian();
    med.noise_scale.assign(static_cast<std::size_t>(p), 0.1);
    model.mediators.push_back(std::move(med));

    Readout ro;
    ro.a.resize(static_cast<std::size_t>(p));
    Stream rs(derive_key(seed, StreamTag::scenario, 11, static_cast<std::uint64_t>(j)));
    for (double& a : ro.a) a = rs.gaussian() / std::sqrt(static_cast<double>(p));
    ro.b = 0.2 * rs.gaussian();
    model.destination.readout.push_back(std::move(ro));
  }
  validate_model(model);
  return model;
}

Dataset make_gaussian_dataset(int n, std::size_t rows, std::uint64_t seed) {
  Dataset d;
  d.n = static_cast<std::size_t>(n);
  d.features.resize(rows * d.n);
  for (std::size_t r = 0; r < rows; ++r) {
    Stream st(derive_key(seed, StreamTag::generic, r));
    for (std::size_t i = 0; i < d.n; ++i) d.features[r * d.n + i] = st.gaussian();
  }
  return d;
}

ScalingStudy scaling_study(const ScalingConfig& cfg) {
  const auto time_point = [&](int n, int m, int p) {
    const NetworkModel model = make_random_model(n, m, p, cfg.seed);
    const Dataset data = make_gaussian_dataset(n, cfg.rows, cfg.seed + 1);
    EstimatorConfig ecfg;
    ecfg.samples_per_point = cfg.samples_per_point;
    ecfg.threads = 1;
    ecfg.seed = 7;
    attribution_matrix(model, data, ecfg);  // warm-up discarded
    std::vector<double> times;
    for (int rep = 0; rep < cfg.timed_reps; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      attribution_matrix(model, data, ecfg);
      times.push_back(
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
  };
  const auto slope = [](const std::vector<std::pair<double, double>>& pts) {
    const double count = static_cast<double>(pts.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (count * sxy - sx * sy) / (count * sxx - sx * sx);
  };

  ScalingStudy study;
  std::vector<std::pair<double, double>> pts;
  for (int m : cfg.m_grid) {
    const double sec = time_point(cfg.base_n, m, cfg.base_p);
    study.rows.push_back({"m", m, cfg.base_n, cfg.base_p, sec});
    pts.emplace_back(std::log(static_cast<double>(m)), std::log(sec));
  }
  study.slope_m = slope(pts);
  pts.clear();
  for (int n : cfg.n_grid) {
    const double sec = time_point(n, cfg.base_m, cfg.base_p);
    study.rows.push_back({"n", cfg.base_m, n, cfg.base_p, sec});
    pts.emplace_back(std::log(static_cast<double>(n)), std::log(sec));
  }
  study.slope_n = slope(pts);
  pts.clear();
  for (int p : cfg.p_grid) {
    const double sec = time_point(cfg.base_n, cfg.base_m, p);
    study.rows.push_back({"p", cfg.base_m, cfg.base_n, p, sec});
    pts.emplace_back(std::log(static_cast<double>(p)), std::log(sec));
  }
  study.slope_p = slope(pts);
  return study;
}

}  // namespace apcalc
