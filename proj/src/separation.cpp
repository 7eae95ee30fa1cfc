#include "apcalc/separation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "apcalc/rng.hpp"

namespace apcalc {

double candidate_value(const SeparationCandidate& cand, const double* t, int n) {
  if (cand.w.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("candidate " + cand.id + ": projection length mismatch");
  double v = 0.0;
  for (int i = 0; i < n; ++i) v += cand.w[static_cast<std::size_t>(i)] * t[i];
  switch (cand.transform) {
    case SeparationCandidate::Transform::identity: return v;
    case SeparationCandidate::Transform::tanh: return std::tanh(v);
    case SeparationCandidate::Transform::square: return v * v;
  }
  return v;
}

std::vector<SeparationCandidate> default_candidates(int n, std::uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("default_candidates: dimension must be positive");
  std::vector<SeparationCandidate> out;
  auto pad2 = [](int v) {
    std::string s = std::to_string(v);
    return s.size() < 2 ? "0" + s : s;
  };
  for (int i = 0; i < n; ++i) {
    SeparationCandidate c;
    c.id = "axis" + pad2(i + 1);
    c.w.assign(static_cast<std::size_t>(n), 0.0);
    c.w[static_cast<std::size_t>(i)] = 1.0;
    out.push_back(std::move(c));
  }
  for (int s = 0; s < 32; ++s) {
    SeparationCandidate c;
    c.id = "sweep" + pad2(s);
    c.w.assign(static_cast<std::size_t>(n), 0.0);
    const std::uint64_t key =
        derive_key(seed, StreamTag::candidate_sweep, static_cast<std::uint64_t>(s));
    double norm_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = gaussian_at(key, static_cast<std::uint64_t>(i));
      c.w[static_cast<std::size_t>(i)] = z;
      norm_sq += z * z;
    }
    const double norm = std::sqrt(norm_sq);
    for (double& v : c.w) v /= norm;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<int> equal_frequency_bins(const std::vector<double>& values, int bins) {
  if (bins < 1) throw std::invalid_argument("equal_frequency_bins: bins must be >= 1");
  const std::size_t count = values.size();
  if (count == 0) return {};
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  // Edges at the order statistics closest to equal mass; assignment counts
  // edges <= v so tied values always share a bin.
  std::vector<double> edges;
  edges.reserve(static_cast<std::size_t>(bins - 1));
  for (int q = 1; q < bins; ++q)
    edges.push_back(sorted[static_cast<std::size_t>(q) * count / static_cast<std::size_t>(bins)]);
  std::vector<int> out(count, 0);
  for (std::size_t r = 0; r < count; ++r) {
    int b = 0;
    for (double e : edges)
      if (e <= values[r]) ++b;
    out[r] = b;
  }
  return out;
}

double mutual_information(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("mutual_information: length mismatch");
  const double total = static_cast<double>(a.size());
  if (a.empty()) return 0.0;
  std::map<int, double> pa, pb;
  std::map<std::pair<int, int>, double> pab;
  for (std::size_t r = 0; r < a.size(); ++r) {
    pa[a[r]] += 1.0;
    pb[b[r]] += 1.0;
    pab[{a[r], b[r]}] += 1.0;
  }
  double mi = 0.0;
  for (const auto& [key, cnt] : pab) {
    const double pj = cnt / total;
    mi += pj * std::log(pj * total * total / (pa[key.first] * pb[key.second]));
  }
  return mi;
}

double conditional_mi(const std::vector<int>& dj, const std::vector<int>& dk,
                      const std::vector<double>& z, int bins) {
  if (dj.size() != dk.size() || dj.size() != z.size())
    throw std::invalid_argument("conditional_mi: length mismatch");
  if (bins < 1) throw std::invalid_argument("conditional_mi: bins must be >= 1");
  if (dj.size() < static_cast<std::size_t>(bins))
    throw std::invalid_argument("conditional_mi: fewer rows than bins");
  const auto assign = equal_frequency_bins(z, bins);
  const double total = static_cast<double>(dj.size());
  double cmi = 0.0;
  for (int b = 0; b < bins; ++b) {
    std::vector<int> ja, ka;
    for (std::size_t r = 0; r < dj.size(); ++r) {
      if (assign[r] == b) {
        ja.push_back(dj[r]);
        ka.push_back(dk[r]);
      }
    }
    if (ja.empty()) continue;
    cmi += (static_cast<double>(ja.size()) / total) * mutual_information(ja, ka);
  }
  return std::max(cmi, -1e-12);
}

double separation_distance(const NetworkModel& model, int j, int k, const Dataset& data,
                           SeparationMetric metric) {
  validate_model(model);
  if (j < 1 || j > model.m || k < 1 || k > model.m)
    throw std::invalid_argument("separation_distance: mediator index out of range");
  if (j == k) throw std::invalid_argument("separation_distance: mediators must differ");
  if (data.rows() == 0) throw std::invalid_argument("separation_distance: dataset is empty");
  if (data.n != static_cast<std::size_t>(model.n))
    throw std::invalid_argument("separation_distance: feature dimension mismatch");
  const auto& mj = model.mediators[static_cast<std::size_t>(j - 1)];
  const auto& mk = model.mediators[static_cast<std::size_t>(k - 1)];
  if (mj.p != mk.p)
    throw std::invalid_argument("separation_distance: mediator dimensions differ");

  double acc = 0.0;
  std::vector<double> mu_j(static_cast<std::size_t>(mj.p)), mu_k(static_cast<std::size_t>(mk.p));
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const double* t = data.row(r);
    for (int d = 0; d < mj.p; ++d) {
      double aj = 0.0, ak = 0.0;
      for (int i = 0; i < model.n; ++i) {
        aj += mj.weight[static_cast<std::size_t>(d) * model.n + i] * t[i];
        ak += mk.weight[static_cast<std::size_t>(d) * model.n + i] * t[i];
      }
      mu_j[static_cast<std::size_t>(d)] = aj;
      mu_k[static_cast<std::size_t>(d)] = ak;
    }
    if (metric == SeparationMetric::sym_kl) {
      double v = 0.0;
      for (int d = 0; d < mj.p; ++d) {
        const double vj = mj.noise_scale[static_cast<std::size_t>(d)] *
                          mj.noise_scale[static_cast<std::size_t>(d)];
        const double vk = mk.noise_scale[static_cast<std::size_t>(d)] *
                          mk.noise_scale[static_cast<std::size_t>(d)];
        const double dm = mu_j[static_cast<std::size_t>(d)] - mu_k[static_cast<std::size_t>(d)];
        // KL(P||Q) + KL(Q||P) for scalar gaussians.
        v += 0.5 * (vj / vk + vk / vj - 2.0) + 0.5 * dm * dm * (1.0 / vj + 1.0 / vk);
      }
      acc += v;
    } else {
      double bc = 1.0;  // Bhattacharyya coefficient, product over dimensions
      for (int d = 0; d < mj.p; ++d) {
        const double sj = mj.noise_scale[static_cast<std::size_t>(d)];
        const double sk = mk.noise_scale[static_cast<std::size_t>(d)];
        const double vsum = sj * sj + sk * sk;
        const double dm = mu_j[static_cast<std::size_t>(d)] - mu_k[static_cast<std::size_t>(d)];
        bc *= std::sqrt(2.0 * sj * sk / vsum) * std::exp(-dm * dm / (4.0 * vsum));
      }
      acc += std::sqrt(std::max(0.0, 1.0 - bc));
    }
  }
  return acc / static_cast<double>(data.rows());
}

SeparationResult learn_separation(const Dataset& data, int j, int k,
                                  const std::vector<SeparationCandidate>& candidates,
                                  SeparationMode mode, int bins) {
  if (candidates.empty()) throw std::invalid_argument("learn_separation: empty candidate set");
  if (!data.has_labels) throw std::invalid_argument("learn_separation: dataset has no labels");
  if (j == k) throw std::invalid_argument("learn_separation: labels must differ");

  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < data.rows(); ++r)
    if (data.labels[r] == j || data.labels[r] == k) rows.push_back(r);
  bool has_j = false, has_k = false;
  for (std::size_t r : rows) {
    has_j = has_j || data.labels[r] == j;
    has_k = has_k || data.labels[r] == k;
  }
  if (!has_j || !has_k)
    throw std::invalid_argument("learn_separation: a queried class is missing from the data");

  std::vector<int> dj(rows.size()), dk(rows.size());
  for (std::size_t idx = 0; idx < rows.size(); ++idx) {
    dj[idx] = data.labels[rows[idx]] == j ? 1 : 0;
    dk[idx] = data.labels[rows[idx]] == k ? 1 : 0;
  }

  SeparationResult res;
  res.mode = mode;
  res.scores.reserve(candidates.size());
  bool first = true;
  std::vector<double> z(rows.size());
  for (const auto& cand : candidates) {
    for (std::size_t idx = 0; idx < rows.size(); ++idx)
      z[idx] = candidate_value(cand, data.row(rows[idx]), data.n);
    double score = 0.0;
    if (mode == SeparationMode::dist) {
      // Fisher criterion between the two classes' projected values.
      double s1 = 0.0, s2 = 0.0, q1 = 0.0, q2 = 0.0;
      std::size_t c1 = 0, c2 = 0;
      for (std::size_t idx = 0; idx < rows.size(); ++idx) {
        if (dj[idx]) {
          s1 += z[idx];
          q1 += z[idx] * z[idx];
          ++c1;
        } else {
          s2 += z[idx];
          q2 += z[idx] * z[idx];
          ++c2;
        }
      }
      const double m1 = s1 / static_cast<double>(c1), m2 = s2 / static_cast<double>(c2);
      const double v1 = q1 / static_cast<double>(c1) - m1 * m1;
      const double v2 = q2 / static_cast<double>(c2) - m2 * m2;
      score = (m1 - m2) * (m1 - m2) / (std::max(v1, 0.0) + std::max(v2, 0.0) + 1e-30);
    } else {
      score = conditional_mi(dj, dk, z, bins);
    }
    res.scores.emplace_back(cand.id, score);
    const bool better = mode == SeparationMode::neg_mi ? score < res.best_score
                                                       : score > res.best_score;
    const bool tie_break = score == res.best_score && cand.id < res.best.id;
    if (first || better || tie_break) {
      res.best = cand;
      res.best_score = score;
      first = false;
    }
  }
  return res;
}

}  // namespace apcalc
