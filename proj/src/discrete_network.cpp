#include "apcalc/discrete_network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "apcalc/rng.hpp"

namespace apcalc {
namespace {

std::uint64_t checked_product(const std::vector<int>& cards) {
  std::uint64_t p = 1;
  for (int c : cards) {
    if (c < 1) throw std::invalid_argument("cardinality must be >= 1");
    p *= static_cast<std::uint64_t>(c);
    if (p > DiscreteNetwork::kMaxJointStates)
      throw std::invalid_argument("joint state space exceeds enumeration cap");
  }
  return p;
}

}  // namespace

DiscreteNetwork::DiscreteNetwork(std::vector<DiscreteNode> nodes,
                                 std::vector<int> feature_nodes, int label_node)
    : nodes_(std::move(nodes)), features_(std::move(feature_nodes)), label_(label_node) {
  std::vector<char> special(nodes_.size(), 0);
  for (int f : features_) {
    if (f < 0 || f >= static_cast<int>(nodes_.size()))
      throw std::invalid_argument("feature node index out of range");
    special[f] = 1;
  }
  if (label_ < 0 || label_ >= static_cast<int>(nodes_.size()))
    throw std::invalid_argument("label node index out of range");
  special[label_] = 1;
  for (std::size_t v = 0; v < nodes_.size(); ++v)
    if (!special[v]) mediators_.push_back(static_cast<int>(v));
  validate();
}

DiscreteNetwork::DiscreteNetwork(std::vector<DiscreteNode> nodes,
                                 std::vector<int> feature_nodes, int label_node,
                                 std::vector<int> mediator_nodes)
    : nodes_(std::move(nodes)),
      features_(std::move(feature_nodes)),
      mediators_(std::move(mediator_nodes)),
      label_(label_node) {
  for (int f : features_)
    if (f < 0 || f >= static_cast<int>(nodes_.size()))
      throw std::invalid_argument("feature node index out of range");
  for (int mnode : mediators_)
    if (mnode < 0 || mnode >= static_cast<int>(nodes_.size()))
      throw std::invalid_argument("mediator node index out of range");
  if (label_ < 0 || label_ >= static_cast<int>(nodes_.size()))
    throw std::invalid_argument("label node index out of range");
  validate();
}

void DiscreteNetwork::validate() const {
  std::vector<int> cards;
  for (const auto& nd : nodes_) cards.push_back(nd.card);
  checked_product(cards);

  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    const auto& nd = nodes_[v];
    std::uint64_t rows = 1;
    for (int p : nd.parents) {
      if (p < 0 || p >= static_cast<int>(v))
        throw std::invalid_argument("node '" + nd.name + "': parents must precede the node");
      rows *= static_cast<std::uint64_t>(nodes_[p].card);
    }
    if (nd.cpt.size() != rows * static_cast<std::uint64_t>(nd.card))
      throw std::invalid_argument("node '" + nd.name + "': CPT size mismatch");
    for (std::uint64_t r = 0; r < rows; ++r) {
      double s = 0.0;
      for (int k = 0; k < nd.card; ++k) {
        const double e = nd.cpt[r * nd.card + k];
        if (e < 0.0 || !std::isfinite(e))
          throw std::invalid_argument("node '" + nd.name + "': bad CPT entry");
        s += e;
      }
      if (std::abs(s - 1.0) > kRowSumTol)
        throw std::invalid_argument("node '" + nd.name + "': CPT row does not sum to 1");
    }
  }
}

int DiscreteNetwork::node_index(const std::string& name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].name == name) return static_cast<int>(i);
  return -1;
}

int DiscreteNetwork::require_node(const std::string& name) const {
  const int i = node_index(name);
  if (i < 0) throw std::invalid_argument("unknown node: " + name);
  return i;
}

std::uint64_t DiscreteNetwork::joint_state_count() const {
  std::uint64_t p = 1;
  for (const auto& nd : nodes_) p *= static_cast<std::uint64_t>(nd.card);
  return p;
}

Dag DiscreteNetwork::to_dag() const {
  Dag g;
  for (const auto& nd : nodes_) g.add_node(nd.name);
  for (std::size_t v = 0; v < nodes_.size(); ++v)
    for (int p : nodes_[v].parents) g.add_edge(p, static_cast<int>(v));
  return g;
}

namespace {

// Depth-first enumeration of the joint. fixed: states forced by evidence or
// intervention; is_do marks nodes whose CPT factor is dropped (truncated
// factorization). The callback receives every consistent joint state with
// its probability factor.
template <typename F>
void enumerate_joint(const std::vector<DiscreteNode>& nodes,
                     const std::vector<int>& fixed, const std::vector<char>& is_do,
                     F&& fn) {
  const std::size_t count = nodes.size();
  std::vector<int> state(count, 0);
  std::function<void(std::size_t, double)> walk = [&](std::size_t d, double prob) {
    if (prob == 0.0) return;
    if (d == count) {
      fn(state, prob);
      return;
    }
    const auto& nd = nodes[d];
    std::uint64_t row = 0;
    for (int p : nd.parents)
      row = row * static_cast<std::uint64_t>(nodes[p].card) +
            static_cast<std::uint64_t>(state[p]);
    const double* cpt_row = nd.cpt.data() + row * static_cast<std::uint64_t>(nd.card);
    const int lo = fixed[d] >= 0 ? fixed[d] : 0;
    const int hi = fixed[d] >= 0 ? fixed[d] + 1 : nd.card;
    for (int k = lo; k < hi; ++k) {
      state[d] = k;
      walk(d + 1, is_do[d] ? prob : prob * cpt_row[k]);
    }
    state[d] = 0;
  };
  walk(0, 1.0);
}

}  // namespace

std::vector<double> DiscreteNetwork::marginal(const std::vector<int>& vars,
                                              const std::map<int, int>& do_map) const {
  std::vector<int> fixed(nodes_.size(), -1);
  std::vector<char> is_do(nodes_.size(), 0);
  for (const auto& [v, s] : do_map) {
    if (v < 0 || v >= static_cast<int>(nodes_.size()))
      throw std::invalid_argument("do: node index out of range");
    if (s < 0 || s >= nodes_[v].card)
      throw std::invalid_argument("do: state out of range for node " + nodes_[v].name);
    fixed[v] = s;
    is_do[v] = 1;
  }
  std::uint64_t size = 1;
  for (int v : vars) size *= static_cast<std::uint64_t>(nodes_[v].card);
  std::vector<double> out(size, 0.0);
  enumerate_joint(nodes_, fixed, is_do, [&](const std::vector<int>& st, double p) {
    std::uint64_t idx = 0;
    for (int v : vars)
      idx = idx * static_cast<std::uint64_t>(nodes_[v].card) +
            static_cast<std::uint64_t>(st[v]);
    out[idx] += p;
  });
  return out;
}

std::vector<double> DiscreteNetwork::label_marginals(const std::vector<int>& s) const {
  if (s.size() != features_.size())
    throw std::invalid_argument("feature state vector has wrong length");
  std::vector<int> fixed(nodes_.size(), -1);
  std::vector<char> is_do(nodes_.size(), 0);
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const int v = features_[i];
    if (s[i] < 0 || s[i] >= nodes_[v].card)
      throw std::invalid_argument("feature state out of range");
    fixed[v] = s[i];
  }
  const int lbl = label_;
  std::vector<double> mass(nodes_[lbl].card, 0.0);
  enumerate_joint(nodes_, fixed, is_do,
                  [&](const std::vector<int>& st, double p) { mass[st[lbl]] += p; });
  double total = 0.0;
  for (double v : mass) total += v;
  if (total <= 0.0) throw std::runtime_error("conditioning on zero-probability features");
  for (double& v : mass) v /= total;
  return mass;
}

int DiscreteNetwork::predict_label(const std::vector<int>& s) const {
  const auto m = label_marginals(s);
  int best = 0;
  for (std::size_t l = 1; l < m.size(); ++l)
    if (m[l] > m[best] * (1.0 + 1e-9) + 1e-15) best = static_cast<int>(l);
  return best + 1;
}

std::vector<double> DiscreteNetwork::conditional_label_prob(const std::vector<int>& s,
                                                            int j, int x) const {
  if (j < 1 || j > static_cast<int>(mediators_.size()))
    throw std::invalid_argument("mediator index out of range");
  const int med = mediators_[static_cast<std::size_t>(j - 1)];
  if (x < 0 || x >= nodes_[med].card)
    throw std::invalid_argument("mediator state out of range");
  std::vector<int> fixed(nodes_.size(), -1);
  std::vector<char> is_do(nodes_.size(), 0);
  for (std::size_t i = 0; i < features_.size(); ++i) fixed[features_[i]] = s[i];
  fixed[med] = x;
  std::vector<double> mass(nodes_[label_].card, 0.0);
  enumerate_joint(nodes_, fixed, is_do,
                  [&](const std::vector<int>& st, double p) { mass[st[label_]] += p; });
  double total = 0.0;
  for (double v : mass) total += v;
  if (total <= 0.0) throw std::runtime_error("conditioning on zero-probability state");
  for (double& v : mass) v /= total;
  return mass;
}

DiscreteNetwork::Dominance DiscreteNetwork::dominance_scores(const std::vector<int>& s,
                                                             int l) const {
  if (l < 1 || l > nodes_[label_].card) throw std::invalid_argument("label out of range");
  Dominance out;
  for (std::size_t j = 0; j < mediators_.size(); ++j) {
    const int med = mediators_[j];
    // P(X_j = x | S = s)
    std::vector<int> fixed(nodes_.size(), -1);
    std::vector<char> is_do(nodes_.size(), 0);
    for (std::size_t i = 0; i < features_.size(); ++i) fixed[features_[i]] = s[i];
    std::vector<double> med_mass(nodes_[med].card, 0.0);
    enumerate_joint(nodes_, fixed, is_do,
                    [&](const std::vector<int>& st, double p) { med_mass[st[med]] += p; });
    double total = 0.0;
    for (double v : med_mass) total += v;
    if (total <= 0.0) throw std::runtime_error("zero-probability feature state");

    double mean = 0.0, m2 = 0.0;
    std::vector<double> vals(nodes_[med].card, 0.0);
    for (int x = 0; x < nodes_[med].card; ++x) {
      const double w = med_mass[x] / total;
      if (w == 0.0) continue;
      vals[x] = conditional_label_prob(s, static_cast<int>(j) + 1, x)[l - 1];
      mean += w * vals[x];
    }
    for (int x = 0; x < nodes_[med].card; ++x) {
      const double w = med_mass[x] / total;
      if (w == 0.0) continue;
      const double d = vals[x] - mean;
      m2 += w * d * d;
    }
    out.scores.push_back(m2);
  }
  std::size_t best = 0;
  for (std::size_t j = 1; j < out.scores.size(); ++j)
    if (out.scores[j] > out.scores[best] * (1.0 + 1e-9) + 1e-15) best = j;
  out.argmax = static_cast<int>(best) + 1;
  out.degenerate = out.scores[best] <= 1e-15;
  return out;
}

TracedDataset DiscreteNetwork::sample_joint(std::size_t count, std::uint64_t seed) const {
  TracedDataset out;
  out.data.n = features_.size();
  out.data.has_labels = true;
  out.trace.dims.assign(mediators_.size(), 1);
  out.trace.offsets.resize(mediators_.size());
  for (std::size_t j = 0; j < mediators_.size(); ++j) out.trace.offsets[j] = j;
  out.trace.total_dims = mediators_.size();

  std::vector<int> state(nodes_.size(), 0);
  for (std::size_t r = 0; r < count; ++r) {
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
      const auto& nd = nodes_[v];
      std::uint64_t row = 0;
      for (int p : nd.parents)
        row = row * static_cast<std::uint64_t>(nodes_[p].card) +
              static_cast<std::uint64_t>(state[p]);
      Stream st(derive_key(seed, StreamTag::source_sample, r, v));
      state[v] = st.categorical(nd.cpt.data() + row * static_cast<std::uint64_t>(nd.card),
                                nd.card);
    }
    for (int f : features_) out.data.features.push_back(static_cast<double>(state[f]));
    out.data.labels.push_back(state[label_] + 1);
    for (int mnode : mediators_)
      out.trace.values.push_back(static_cast<double>(state[mnode]));
  }
  return out;
}

bool DiscreteNetwork::ci_holds(int a, int b, const std::vector<int>& z, double tol) const {
  std::vector<int> vars{a, b};
  vars.insert(vars.end(), z.begin(), z.end());
  const auto table = marginal(vars);
  const int ca = nodes_[a].card, cb = nodes_[b].card;
  std::uint64_t zsize = 1;
  for (int v : z) zsize *= static_cast<std::uint64_t>(nodes_[v].card);

  for (std::uint64_t zi = 0; zi < zsize; ++zi) {
    double pz = 0.0;
    std::vector<double> pa(ca, 0.0), pb(cb, 0.0);
    for (int ai = 0; ai < ca; ++ai)
      for (int bi = 0; bi < cb; ++bi) {
        const double p = table[(static_cast<std::uint64_t>(ai) * cb + bi) * zsize + zi];
        pz += p;
        pa[ai] += p;
        pb[bi] += p;
      }
    if (pz <= 0.0) continue;
    for (int ai = 0; ai < ca; ++ai)
      for (int bi = 0; bi < cb; ++bi) {
        const double joint =
            table[(static_cast<std::uint64_t>(ai) * cb + bi) * zsize + zi] / pz;
        const double prod = (pa[ai] / pz) * (pb[bi] / pz);
        if (std::abs(joint - prod) > tol) return false;
      }
  }
  return true;
}

namespace {

// Drops parents a CPT does not depend on (rows exactly equal across that
// parent's states), shrinking the table accordingly.
DiscreteNode reduce_parents(DiscreteNode nd, const std::vector<DiscreteNode>& all) {
  bool changed = true;
  while (changed && !nd.parents.empty()) {
    changed = false;
    for (std::size_t pi = 0; pi < nd.parents.size(); ++pi) {
      std::vector<int> cards;
      for (int p : nd.parents) cards.push_back(all[p].card);
      std::uint64_t stride = static_cast<std::uint64_t>(nd.card);
      for (std::size_t q = pi + 1; q < nd.parents.size(); ++q)
        stride *= static_cast<std::uint64_t>(cards[q]);
      std::uint64_t outer = 1;
      for (std::size_t q = 0; q < pi; ++q) outer *= static_cast<std::uint64_t>(cards[q]);
      const int pc = cards[pi];

      bool invariant = true;
      for (std::uint64_t o = 0; o < outer && invariant; ++o)
        for (int k = 1; k < pc && invariant; ++k)
          for (std::uint64_t inner = 0; inner < stride && invariant; ++inner) {
            const std::uint64_t base = o * pc * stride;
            if (nd.cpt[base + inner] != nd.cpt[base + k * stride + inner])
              invariant = false;
          }
      if (!invariant) continue;

      std::vector<double> shrunk;
      shrunk.reserve(nd.cpt.size() / pc);
      for (std::uint64_t o = 0; o < outer; ++o)
        for (std::uint64_t inner = 0; inner < stride; ++inner)
          shrunk.push_back(nd.cpt[o * pc * stride + inner]);
      nd.cpt = std::move(shrunk);
      nd.parents.erase(nd.parents.begin() + static_cast<long>(pi));
      changed = true;
      break;
    }
  }
  return nd;
}

}  // namespace

DiscreteNetwork DiscreteNetwork::structured(
    const std::vector<int>& feature_cards, const std::vector<int>& mediator_cards,
    const std::vector<double>& prior, const std::vector<std::vector<double>>& cpt_mediators,
    const std::vector<double>& cpt_destination) {
  const int n = static_cast<int>(feature_cards.size());
  const int m = static_cast<int>(mediator_cards.size());
  if (n < 1 || m < 1) throw std::invalid_argument("need at least one feature and mediator");
  if (cpt_mediators.size() != static_cast<std::size_t>(m))
    throw std::invalid_argument("one mediator CPT per mediator required");

  const std::uint64_t s_states = checked_product(feature_cards);
  if (prior.size() != s_states) throw std::invalid_argument("prior size mismatch");
  double prior_sum = 0.0;
  for (double p : prior) {
    if (p < 0.0) throw std::invalid_argument("negative prior entry");
    prior_sum += p;
  }
  if (std::abs(prior_sum - 1.0) > 1e-9)
    throw std::invalid_argument("prior does not sum to 1");

  std::vector<double> norm_prior(prior);
  for (double& p : norm_prior) p /= prior_sum;

  // Per-feature marginals; the prior is a product iff it matches their
  // product everywhere.
  std::vector<std::vector<double>> marg(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    marg[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(feature_cards[i]), 0.0);
  for (std::uint64_t idx = 0; idx < s_states; ++idx) {
    std::uint64_t rest = idx;
    for (int i = n - 1; i >= 0; --i) {
      const int k = static_cast<int>(rest % static_cast<std::uint64_t>(feature_cards[i]));
      rest /= static_cast<std::uint64_t>(feature_cards[i]);
      marg[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] += norm_prior[idx];
    }
  }
  bool product = true;
  for (std::uint64_t idx = 0; idx < s_states && product; ++idx) {
    double expect = 1.0;
    std::uint64_t rest = idx;
    for (int i = n - 1; i >= 0; --i) {
      const int k = static_cast<int>(rest % static_cast<std::uint64_t>(feature_cards[i]));
      rest /= static_cast<std::uint64_t>(feature_cards[i]);
      expect *= marg[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    if (std::abs(expect - norm_prior[idx]) > 1e-12) product = false;
  }

  std::vector<DiscreteNode> nodes;
  int feature_base = 0;
  if (!product) {
    // Latent configuration node: sources share it but have no edges among
    // themselves, so intervening on one leaves the rest at their marginal.
    DiscreteNode u;
    u.name = "U";
    u.card = static_cast<int>(s_states);
    u.cpt = norm_prior;
    nodes.push_back(std::move(u));
    feature_base = 1;
  }
  for (int i = 0; i < n; ++i) {
    DiscreteNode nd;
    nd.name = "S" + std::to_string(i + 1);
    nd.card = feature_cards[i];
    if (product) {
      nd.cpt = marg[static_cast<std::size_t>(i)];
    } else {
      nd.parents.push_back(0);
      std::uint64_t suffix = 1;
      for (int q = i + 1; q < n; ++q) suffix *= static_cast<std::uint64_t>(feature_cards[q]);
      nd.cpt.assign(s_states * static_cast<std::uint64_t>(nd.card), 0.0);
      for (std::uint64_t u = 0; u < s_states; ++u) {
        const int k = static_cast<int>((u / suffix) % static_cast<std::uint64_t>(nd.card));
        nd.cpt[u * static_cast<std::uint64_t>(nd.card) + static_cast<std::uint64_t>(k)] = 1.0;
      }
    }
    nodes.push_back(std::move(nd));
  }

  for (int j = 0; j < m; ++j) {
    DiscreteNode nd;
    nd.name = "X" + std::to_string(j + 1);
    nd.card = mediator_cards[j];
    for (int i = 0; i < n; ++i) nd.parents.push_back(feature_base + i);
    nd.cpt = cpt_mediators[j];
    if (nd.cpt.size() != s_states * static_cast<std::uint64_t>(nd.card))
      throw std::invalid_argument("mediator CPT size mismatch");
    nodes.push_back(reduce_parents(std::move(nd), nodes));
  }

  {
    DiscreteNode nd;
    nd.name = "D";
    nd.card = m;
    std::uint64_t x_states = 1;
    for (int j = 0; j < m; ++j) {
      nd.parents.push_back(feature_base + n + j);
      x_states *= static_cast<std::uint64_t>(mediator_cards[j]);
    }
    nd.cpt = cpt_destination;
    if (nd.cpt.size() != x_states * static_cast<std::uint64_t>(m))
      throw std::invalid_argument("destination CPT size mismatch");
    nodes.push_back(reduce_parents(std::move(nd), nodes));
  }

  std::vector<int> feats(n), meds(m);
  for (int i = 0; i < n; ++i) feats[static_cast<std::size_t>(i)] = feature_base + i;
  for (int j = 0; j < m; ++j) meds[static_cast<std::size_t>(j)] = feature_base + n + j;
  return DiscreteNetwork(std::move(nodes), std::move(feats), feature_base + n + m,
                         std::move(meds));
}

}  // namespace apcalc
