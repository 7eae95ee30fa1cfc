#include "apcalc/intervention.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "apcalc/parallel.hpp"

namespace apcalc {

namespace {

int rounded_state(const DiscreteNetwork& net, int node, double value, const char* what) {
  const double r = std::nearbyint(value);
  if (std::abs(r - value) > 1e-9)
    throw std::invalid_argument(std::string(what) + ": value is not a discrete state");
  const int s = static_cast<int>(r);
  if (s < 0 || s >= net.nodes()[static_cast<std::size_t>(node)].card)
    throw std::invalid_argument(std::string(what) + ": state out of range");
  return s;
}

int feature_node(const DiscreteNetwork& net, const InterventionQuery& q, const char* what) {
  if (q.feature < 1 || q.feature > static_cast<int>(net.feature_nodes().size()))
    throw std::invalid_argument(std::string(what) + ": feature index out of range");
  return net.feature_nodes()[static_cast<std::size_t>(q.feature - 1)];
}

void check_label(int label, int m, const char* what) {
  if (label < 1 || label > m)
    throw std::invalid_argument(std::string(what) + ": label index out of range");
}

// Mean and across-row standard error of the mean, combined in row order.
std::pair<double, double> mean_and_se(const std::vector<double>& v) {
  const double count = static_cast<double>(v.size());
  double sum = 0.0, sq = 0.0;
  for (double x : v) {
    sum += x;
    sq += x * x;
  }
  const double mean = sum / count;
  if (v.size() < 2) return {mean, 0.0};
  const double var = std::max(0.0, (sq - count * mean * mean) / (count - 1.0));
  return {mean, std::sqrt(var / count)};
}

EdgeList outgoing_edges(const Dag& g, const std::string& node) {
  EdgeList out;
  const int v = g.require(node);
  const auto kids = g.children();
  for (int c : kids[static_cast<std::size_t>(v)])
    out.emplace_back(node, g.names[static_cast<std::size_t>(c)]);
  return out;
}

}  // namespace

InterventionResult do_effect_ap(const NetworkModel& model, const Dataset& data,
                                const InterventionQuery& q, const EstimatorConfig& cfg) {
  if (data.rows() == 0) throw std::invalid_argument("do_effect_ap: dataset is empty");
  if (data.n != static_cast<std::size_t>(model.n))
    throw std::invalid_argument("do_effect_ap: feature dimension mismatch");
  if (q.feature < 1 || q.feature > model.n)
    throw std::invalid_argument("do_effect_ap: feature index out of range");
  check_label(q.label, model.m, "do_effect_ap");

  const std::size_t rows = data.rows();
  std::vector<double> per_row(rows, 0.0);
  parallel_for(rows, resolve_threads(cfg), [&](std::size_t r) {
    std::vector<double> t(data.row(r), data.row(r) + data.n);
    t[static_cast<std::size_t>(q.feature - 1)] = q.value;
    per_row[r] = label_marginals(model, t.data(), cfg, r)[static_cast<std::size_t>(q.label - 1)];
  });
  const auto [mean, se] = mean_and_se(per_row);
  InterventionResult res;
  res.estimate = mean;
  res.std_error = se;
  res.method = "ap";
  res.samples = cfg.samples_per_point;
  return res;
}

InterventionResult do_effect_ap(const DiscreteNetwork& net, const Dataset& data,
                                const InterventionQuery& q) {
  if (data.rows() == 0) throw std::invalid_argument("do_effect_ap: dataset is empty");
  if (data.n != net.feature_nodes().size())
    throw std::invalid_argument("do_effect_ap: feature dimension mismatch");
  const int node = feature_node(net, q, "do_effect_ap");
  const int m = net.nodes()[static_cast<std::size_t>(net.label_node())].card;
  check_label(q.label, m, "do_effect_ap");
  const int state = rounded_state(net, node, q.value, "do_effect_ap");

  std::vector<double> per_row(data.rows(), 0.0);
  std::vector<int> s(data.n, 0);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t i = 0; i < data.n; ++i) {
      int fs = rounded_state(net, net.feature_nodes()[i], data.at(r, i), "do_effect_ap");
      s[i] = fs;
    }
    s[static_cast<std::size_t>(q.feature - 1)] = state;
    per_row[r] = net.label_marginals(s)[static_cast<std::size_t>(q.label - 1)];
  }
  const auto [mean, se] = mean_and_se(per_row);
  InterventionResult res;
  res.estimate = mean;
  res.std_error = se;
  res.method = "ap";
  return res;
}

InterventionResult do_effect_oracle(const DiscreteNetwork& net, const InterventionQuery& q) {
  const int node = feature_node(net, q, "do_effect_oracle");
  const int m = net.nodes()[static_cast<std::size_t>(net.label_node())].card;
  check_label(q.label, m, "do_effect_oracle");
  const int state = rounded_state(net, node, q.value, "do_effect_oracle");
  const auto table = net.marginal({net.label_node()}, {{node, state}});
  InterventionResult res;
  res.estimate = table[static_cast<std::size_t>(q.label - 1)];
  res.method = "oracle";
  return res;
}

InterventionResult backdoor_adjust(const DiscreteNetwork& net, const InterventionQuery& q) {
  const int node = feature_node(net, q, "backdoor_adjust");
  const int m = net.nodes()[static_cast<std::size_t>(net.label_node())].card;
  check_label(q.label, m, "backdoor_adjust");
  const int state = rounded_state(net, node, q.value, "backdoor_adjust");
  const std::string src = net.nodes()[static_cast<std::size_t>(node)].name;
  const std::string dst = net.nodes()[static_cast<std::size_t>(net.label_node())].name;

  const Dag g = net.to_dag();
  std::vector<int> z_nodes;
  for (const auto& name : q.adjustment_set) z_nodes.push_back(net.require_node(name));

  // Validity: no Z node may descend from the source, and Z must block every
  // backdoor path (d-separation once the source's outgoing edges are gone).
  const auto desc = g.descendants({g.require(src)});
  for (int z : z_nodes) {
    const int zi = g.require(net.nodes()[static_cast<std::size_t>(z)].name);
    if (std::find(desc.begin(), desc.end(), zi) != desc.end() && zi != g.require(src))
      throw std::invalid_argument("backdoor_adjust: adjustment node " +
                                  net.nodes()[static_cast<std::size_t>(z)].name +
                                  " is a descendant of the intervened feature");
  }
  if (!d_separated(g, src, dst, q.adjustment_set, outgoing_edges(g, src)))
    throw std::invalid_argument(
        "backdoor_adjust: adjustment set leaves a backdoor path open between " + src + " and " +
        dst);

  // Sum_z P(z) P(D = l | s, z), conditioning cells of zero mass skipped and
  // the z-weights renormalized.
  std::vector<int> vars{net.label_node(), node};
  vars.insert(vars.end(), z_nodes.begin(), z_nodes.end());
  const auto table = net.marginal(vars);
  std::uint64_t zsize = 1;
  for (int z : z_nodes) zsize *= static_cast<std::uint64_t>(net.nodes()[static_cast<std::size_t>(z)].card);
  const std::uint64_t card_s =
      static_cast<std::uint64_t>(net.nodes()[static_cast<std::size_t>(node)].card);

  double acc = 0.0, used = 0.0, skipped = 0.0;
  for (std::uint64_t zi = 0; zi < zsize; ++zi) {
    double pz = 0.0, cell = 0.0, cell_l = 0.0;
    for (int d = 0; d < m; ++d) {
      for (std::uint64_t sv = 0; sv < card_s; ++sv) {
        const double p = table[(static_cast<std::uint64_t>(d) * card_s + sv) * zsize + zi];
        pz += p;
        if (sv == static_cast<std::uint64_t>(state)) {
          cell += p;
          if (d == q.label - 1) cell_l = p;
        }
      }
    }
    if (pz == 0.0) continue;
    if (cell == 0.0) {
      skipped += pz;
      continue;
    }
    acc += pz * (cell_l / cell);
    used += pz;
  }
  if (used == 0.0)
    throw std::runtime_error("backdoor_adjust: every adjustment cell has zero mass");

  InterventionResult res;
  res.estimate = acc / used;
  res.method = "backdoor";
  res.skipped_weight = skipped;
  res.warning = skipped > 0.0;
  return res;
}

InterventionResult frontdoor_adjust(const DiscreteNetwork& net, const InterventionQuery& q) {
  const int node = feature_node(net, q, "frontdoor_adjust");
  const int m = net.nodes()[static_cast<std::size_t>(net.label_node())].card;
  check_label(q.label, m, "frontdoor_adjust");
  const int state = rounded_state(net, node, q.value, "frontdoor_adjust");
  const std::string med_name = q.mediator.empty() ? "X" + std::to_string(q.label) : q.mediator;
  const int med = net.require_node(med_name);
  if (med == node || med == net.label_node())
    throw std::invalid_argument("frontdoor_adjust: mediator must be distinct from source and label");
  const std::string src = net.nodes()[static_cast<std::size_t>(node)].name;
  const std::string dst = net.nodes()[static_cast<std::size_t>(net.label_node())].name;

  const Dag g = net.to_dag();
  // (i) the mediator intercepts every directed source -> destination path;
  const auto med_out = outgoing_edges(g, med_name);
  {
    Dag cut = g;
    const int mv = cut.require(med_name);
    for (auto& pl : cut.parents)
      pl.erase(std::remove(pl.begin(), pl.end(), mv), pl.end());
    const auto reach = cut.descendants({cut.require(src)});
    if (std::find(reach.begin(), reach.end(), cut.require(dst)) != reach.end())
      throw std::invalid_argument("frontdoor_adjust: a directed path from " + src + " to " + dst +
                                  " bypasses mediator " + med_name);
  }
  // (ii) no unblocked backdoor path from source to mediator;
  if (!d_separated(g, src, med_name, {}, outgoing_edges(g, src)))
    throw std::invalid_argument("frontdoor_adjust: open backdoor path between " + src + " and " +
                                med_name);
  // (iii) the source blocks every backdoor path from mediator to destination.
  if (!d_separated(g, med_name, dst, {src}, med_out))
    throw std::invalid_argument("frontdoor_adjust: source does not block the backdoor paths from " +
                                med_name + " to " + dst);

  // Sum_x P(x | s) Sum_{s'} P(D = l | x, s') P(s').
  const auto t_sm = net.marginal({node, med});
  const auto t_dms = net.marginal({net.label_node(), med, node});
  const std::uint64_t card_s =
      static_cast<std::uint64_t>(net.nodes()[static_cast<std::size_t>(node)].card);
  const std::uint64_t card_x =
      static_cast<std::uint64_t>(net.nodes()[static_cast<std::size_t>(med)].card);

  std::vector<double> p_s(card_s, 0.0);
  for (std::uint64_t sv = 0; sv < card_s; ++sv)
    for (std::uint64_t x = 0; x < card_x; ++x) p_s[sv] += t_sm[sv * card_x + x];
  const double p_src = p_s[static_cast<std::uint64_t>(state)];
  if (p_src == 0.0)
    throw std::runtime_error("frontdoor_adjust: intervened state has zero probability");

  InterventionResult res;
  double skipped = 0.0;
  double est = 0.0;
  for (std::uint64_t x = 0; x < card_x; ++x) {
    const double p_x_given_s = t_sm[static_cast<std::uint64_t>(state) * card_x + x] / p_src;
    if (p_x_given_s == 0.0) continue;
    double inner = 0.0, used = 0.0;
    for (std::uint64_t sv = 0; sv < card_s; ++sv) {
      double cell = 0.0, cell_l = 0.0;
      for (int d = 0; d < m; ++d) {
        const double p = t_dms[(static_cast<std::uint64_t>(d) * card_x + x) * card_s + sv];
        cell += p;
        if (d == q.label - 1) cell_l = p;
      }
      if (cell == 0.0) {
        skipped += p_x_given_s * p_s[sv];
        continue;
      }
      inner += p_s[sv] * (cell_l / cell);
      used += p_s[sv];
    }
    if (used == 0.0)
      throw std::runtime_error("frontdoor_adjust: every inner cell has zero mass");
    est += p_x_given_s * (inner / used);
  }
  res.estimate = est;
  res.method = "frontdoor";
  res.skipped_weight = skipped;
  res.warning = skipped > 0.0;
  return res;
}

double causal_effect(const NetworkModel& model, const Dataset& data, const InterventionQuery& q,
                     const EstimatorConfig& cfg) {
  if (q.delta == 0.0) throw std::invalid_argument("causal_effect: delta must be nonzero");
  if (data.rows() == 0) throw std::invalid_argument("causal_effect: dataset is empty");
  if (data.n != static_cast<std::size_t>(model.n))
    throw std::invalid_argument("causal_effect: feature dimension mismatch");
  if (q.feature < 1 || q.feature > model.n)
    throw std::invalid_argument("causal_effect: feature index out of range");
  check_label(q.label, model.m, "causal_effect");

  const std::size_t rows = data.rows();
  std::vector<double> per_row(rows, 0.0);
  parallel_for(rows, resolve_threads(cfg), [&](std::size_t r) {
    std::vector<double> t(data.row(r), data.row(r) + data.n);
    const double base =
        label_marginals(model, t.data(), cfg, r)[static_cast<std::size_t>(q.label - 1)];
    t[static_cast<std::size_t>(q.feature - 1)] += q.delta;
    const double moved =
        label_marginals(model, t.data(), cfg, r)[static_cast<std::size_t>(q.label - 1)];
    per_row[r] = moved - base;
  });
  double acc = 0.0;
  for (double v : per_row) acc += v;
  return acc / static_cast<double>(rows);
}

double causal_effect(const DiscreteNetwork& net, const InterventionQuery& q) {
  if (q.delta == 0.0) throw std::invalid_argument("causal_effect: delta must be nonzero");
  InterventionQuery base = q;
  InterventionQuery moved = q;
  moved.value = q.value + q.delta;
  return do_effect_oracle(net, moved).estimate - do_effect_oracle(net, base).estimate;
}

}  // namespace apcalc
