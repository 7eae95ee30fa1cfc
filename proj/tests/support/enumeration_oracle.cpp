#include "support/enumeration_oracle.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace oracle {
namespace {

// Odometer over per-node states; returns false once exhausted.
bool advance(std::vector<int>& a, const std::vector<int>& cards) {
  for (std::size_t i = a.size(); i-- > 0;) {
    if (++a[i] < cards[i]) return true;
    a[i] = 0;
  }
  return false;
}

int cpt_row(const Node& node, const std::vector<Node>& nodes, const std::vector<int>& a) {
  int row = 0;
  for (int p : node.parents) row = row * nodes[static_cast<std::size_t>(p)].card + a[static_cast<std::size_t>(p)];
  return row;
}

std::size_t config_count(const std::vector<int>& cards) {
  std::size_t total = 1;
  for (int c : cards) total *= static_cast<std::size_t>(c);
  return total;
}

// Index of a feature/mediator configuration, first coordinate most significant.
std::size_t config_index(const std::vector<int>& values, const std::vector<int>& cards) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    idx = idx * static_cast<std::size_t>(cards[i]) + static_cast<std::size_t>(values[i]);
  return idx;
}

double xlogy(double x, double y) { return x > 0.0 ? x * std::log(y) : 0.0; }

}  // namespace

double Enumerator::probability(const std::vector<std::pair<int, int>>& event,
                               const std::vector<std::pair<int, int>>& do_set) const {
  std::vector<int> cards;
  for (const Node& node : nodes_) cards.push_back(node.card);
  std::vector<int> a(nodes_.size(), 0);
  double total = 0.0;
  do {
    bool matches = true;
    for (const auto& [node, state] : event)
      if (a[static_cast<std::size_t>(node)] != state) matches = false;
    if (!matches) continue;
    double mass = 1.0;
    for (std::size_t v = 0; v < nodes_.size() && mass > 0.0; ++v) {
      bool intervened = false;
      for (const auto& [node, state] : do_set) {
        if (node == static_cast<int>(v)) {
          intervened = true;
          if (a[v] != state) mass = 0.0;
        }
      }
      if (intervened) continue;
      const Node& node = nodes_[v];
      const int row = cpt_row(node, nodes_, a);
      mass *= node.cpt[static_cast<std::size_t>(row) * node.card + a[v]];
    }
    total += mass;
  } while (advance(a, cards));
  return total;
}

double Enumerator::conditional(int target, int state,
                               const std::vector<std::pair<int, int>>& given,
                               const std::vector<std::pair<int, int>>& do_set) const {
  std::vector<std::pair<int, int>> both = given;
  both.emplace_back(target, state);
  const double denom = probability(given, do_set);
  if (denom <= 0.0) throw std::runtime_error("conditioning event has zero mass");
  return probability(both, do_set) / denom;
}

int label_count(const Structured& s) {
  return static_cast<int>(s.dest_cpt.size() / config_count(s.mcards));
}

std::vector<double> label_given(const Structured& s, const std::vector<int>& sv) {
  const int labels = label_count(s);
  const std::size_t srow = config_index(sv, s.fcards);
  std::vector<double> out(static_cast<std::size_t>(labels), 0.0);
  std::vector<int> x(s.mcards.size(), 0);
  do {
    double w = 1.0;
    for (std::size_t j = 0; j < s.mcards.size(); ++j)
      w *= s.med_cpt[j][srow * static_cast<std::size_t>(s.mcards[j]) +
                        static_cast<std::size_t>(x[j])];
    const std::size_t xrow = config_index(x, s.mcards);
    for (int l = 0; l < labels; ++l)
      out[static_cast<std::size_t>(l)] +=
          w * s.dest_cpt[xrow * static_cast<std::size_t>(labels) + static_cast<std::size_t>(l)];
  } while (advance(x, s.mcards));
  return out;
}

std::vector<double> label_do(const Structured& s, int i, int v) {
  const int labels = label_count(s);
  std::vector<double> out(static_cast<std::size_t>(labels), 0.0);
  std::vector<int> sv(s.fcards.size(), 0);
  double mass = 0.0;
  do {
    if (sv[static_cast<std::size_t>(i)] != v) continue;
    // weight of the non-intervened coordinates at their joint marginal
    double w = 0.0;
    std::vector<int> other = sv;
    for (int alt = 0; alt < s.fcards[static_cast<std::size_t>(i)]; ++alt) {
      other[static_cast<std::size_t>(i)] = alt;
      w += s.prior[config_index(other, s.fcards)];
    }
    mass += w;
    const std::vector<double> cond = label_given(s, sv);
    for (int l = 0; l < labels; ++l) out[static_cast<std::size_t>(l)] += w * cond[static_cast<std::size_t>(l)];
  } while (advance(sv, s.fcards));
  for (double& p : out) p /= mass;
  return out;
}

double dominance(const Structured& s, const std::vector<int>& sv, int j, int l) {
  const int labels = label_count(s);
  const std::size_t srow = config_index(sv, s.fcards);
  const std::size_t uj = static_cast<std::size_t>(j);
  double mean = 0.0, second = 0.0;
  for (int xv = 0; xv < s.mcards[uj]; ++xv) {
    const double wx =
        s.med_cpt[uj][srow * static_cast<std::size_t>(s.mcards[uj]) + static_cast<std::size_t>(xv)];
    // P(D = l | X_j = xv, S = sv): integrate the other mediators.
    double p = 0.0;
    std::vector<int> x(s.mcards.size(), 0);
    do {
      if (x[uj] != xv) continue;
      double w = 1.0;
      for (std::size_t k = 0; k < s.mcards.size(); ++k) {
        if (k == uj) continue;
        w *= s.med_cpt[k][srow * static_cast<std::size_t>(s.mcards[k]) +
                          static_cast<std::size_t>(x[k])];
      }
      p += w * s.dest_cpt[config_index(x, s.mcards) * static_cast<std::size_t>(labels) +
                          static_cast<std::size_t>(l)];
    } while (advance(x, s.mcards));
    mean += wx * p;
    second += wx * p * p;
  }
  return second - mean * mean;
}

double info_gain(const Structured& s, int i, int l) {
  const int labels = label_count(s);
  const std::size_t ui = static_cast<std::size_t>(i);
  const std::size_t ul = static_cast<std::size_t>(l);
  const int si_card = s.fcards[ui];
  const int xl_card = s.mcards[ul];

  // Joint P(s_i, b, x_l), b the indicator of label l.
  std::vector<double> table(static_cast<std::size_t>(si_card * 2 * xl_card), 0.0);
  std::vector<int> sv(s.fcards.size(), 0);
  do {
    const double ps = s.prior[config_index(sv, s.fcards)];
    if (ps == 0.0) continue;
    const std::size_t srow = config_index(sv, s.fcards);
    std::vector<int> x(s.mcards.size(), 0);
    do {
      double w = ps;
      for (std::size_t k = 0; k < s.mcards.size(); ++k)
        w *= s.med_cpt[k][srow * static_cast<std::size_t>(s.mcards[k]) +
                          static_cast<std::size_t>(x[k])];
      const std::size_t xrow = config_index(x, s.mcards);
      for (int lab = 0; lab < labels; ++lab) {
        const double wl =
            w * s.dest_cpt[xrow * static_cast<std::size_t>(labels) + static_cast<std::size_t>(lab)];
        const int b = lab == l ? 1 : 0;
        table[(static_cast<std::size_t>(sv[ui]) * 2 + static_cast<std::size_t>(b)) *
                  static_cast<std::size_t>(xl_card) +
              static_cast<std::size_t>(x[ul])] += wl;
      }
    } while (advance(x, s.mcards));
  } while (advance(sv, s.fcards));

  // I(S_i; B) from the (s_i, b) margin.
  double mi = 0.0;
  {
    std::vector<double> ps(static_cast<std::size_t>(si_card), 0.0), pb(2, 0.0);
    std::vector<double> sb(static_cast<std::size_t>(si_card * 2), 0.0);
    for (int a = 0; a < si_card; ++a)
      for (int b = 0; b < 2; ++b)
        for (int xv = 0; xv < xl_card; ++xv)
          sb[static_cast<std::size_t>(a * 2 + b)] +=
              table[static_cast<std::size_t>((a * 2 + b) * xl_card + xv)];
    for (int a = 0; a < si_card; ++a)
      for (int b = 0; b < 2; ++b) {
        ps[static_cast<std::size_t>(a)] += sb[static_cast<std::size_t>(a * 2 + b)];
        pb[static_cast<std::size_t>(b)] += sb[static_cast<std::size_t>(a * 2 + b)];
      }
    for (int a = 0; a < si_card; ++a)
      for (int b = 0; b < 2; ++b) {
        const double pab = sb[static_cast<std::size_t>(a * 2 + b)];
        mi += xlogy(pab, pab / (ps[static_cast<std::size_t>(a)] * pb[static_cast<std::size_t>(b)]));
      }
  }

  // I(S_i; B | X_l) = sum_x P(x) * MI inside the slice.
  double cmi = 0.0;
  for (int xv = 0; xv < xl_card; ++xv) {
    double px = 0.0;
    std::vector<double> ps(static_cast<std::size_t>(si_card), 0.0), pb(2, 0.0);
    for (int a = 0; a < si_card; ++a)
      for (int b = 0; b < 2; ++b) {
        const double w = table[static_cast<std::size_t>((a * 2 + b) * xl_card + xv)];
        px += w;
        ps[static_cast<std::size_t>(a)] += w;
        pb[static_cast<std::size_t>(b)] += w;
      }
    if (px == 0.0) continue;
    for (int a = 0; a < si_card; ++a)
      for (int b = 0; b < 2; ++b) {
        const double pab = table[static_cast<std::size_t>((a * 2 + b) * xl_card + xv)] / px;
        cmi += px * xlogy(pab, pab / ((ps[static_cast<std::size_t>(a)] / px) *
                                      (pb[static_cast<std::size_t>(b)] / px)));
      }
  }
  return mi - cmi;
}

}  // namespace oracle
