#include "apcalc/network_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "apcalc/rng.hpp"

namespace apcalc {

void validate_model(const NetworkModel& model) {
  if (model.n <= 0) throw std::invalid_argument("model: source dimension must be positive");
  if (model.m <= 0) throw std::invalid_argument("model: mediator count must be positive");
  if (static_cast<int>(model.mediators.size()) != model.m)
    throw std::invalid_argument("model: mediator count does not match mediator list");
  for (int j = 0; j < model.m; ++j) {
    const auto& med = model.mediators[static_cast<std::size_t>(j)];
    const std::string where = "mediator " + std::to_string(j + 1);
    if (med.p <= 0) throw std::invalid_argument("model: " + where + " has non-positive dimension");
    if (med.weight.size() != static_cast<std::size_t>(med.p) * static_cast<std::size_t>(model.n))
      throw std::invalid_argument("model: " + where + " weight shape mismatch");
    if (med.noise_scale.size() != static_cast<std::size_t>(med.p))
      throw std::invalid_argument("model: " + where + " noise scale shape mismatch");
    for (double s : med.noise_scale)
      if (!(s > 0.0)) throw std::invalid_argument("model: " + where + " noise scales must be positive");
    for (double w : med.weight)
      if (!std::isfinite(w)) throw std::invalid_argument("model: " + where + " weight must be finite");
  }
  if (static_cast<int>(model.destination.readout.size()) != model.m)
    throw std::invalid_argument("model: destination readout count must equal mediator count");
  for (int l = 0; l < model.m; ++l) {
    const auto& r = model.destination.readout[static_cast<std::size_t>(l)];
    const std::string where = "readout " + std::to_string(l + 1);
    const auto p = static_cast<std::size_t>(model.mediators[static_cast<std::size_t>(l)].p);
    if (r.a.size() != p) throw std::invalid_argument("model: " + where + " weight shape mismatch");
    if (!r.c.empty() && r.c.size() != static_cast<std::size_t>(model.n))
      throw std::invalid_argument("model: " + where + " source term shape mismatch");
    for (double v : r.a)
      if (!std::isfinite(v)) throw std::invalid_argument("model: " + where + " weight must be finite");
    for (double v : r.c)
      if (!std::isfinite(v)) throw std::invalid_argument("model: " + where + " source term must be finite");
    if (!std::isfinite(r.b)) throw std::invalid_argument("model: " + where + " bias must be finite");
  }
  if (model.source.kind == SourceSpec::Kind::gaussian) {
    if (model.source.mean.size() != static_cast<std::size_t>(model.n) ||
        model.source.scale.size() != static_cast<std::size_t>(model.n))
      throw std::invalid_argument("model: source distribution shape mismatch");
    for (double s : model.source.scale)
      if (!(s > 0.0)) throw std::invalid_argument("model: source scales must be positive");
  }
}

int resolve_threads(const EstimatorConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  if (const char* env = std::getenv("APCALC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
  }
  return 1;
}

std::uint64_t resolve_seed(const NetworkModel& model, const EstimatorConfig& cfg) {
  return cfg.seed != 0 ? cfg.seed : model.seed;
}

namespace detail {

Evaluator::Evaluator(const NetworkModel& mdl) : model(&mdl), n(mdl.n), m(mdl.m) {
  validate_model(mdl);
  aw.assign(static_cast<std::size_t>(m) * n, 0.0);
  c.assign(static_cast<std::size_t>(m) * n, 0.0);
  g.assign(static_cast<std::size_t>(m) * n, 0.0);
  bias.assign(static_cast<std::size_t>(m), 0.0);
  for (int j = 0; j < m; ++j) {
    const auto& med = mdl.mediators[static_cast<std::size_t>(j)];
    const auto& ro = mdl.destination.readout[static_cast<std::size_t>(j)];
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int d = 0; d < med.p; ++d)
        acc += ro.a[static_cast<std::size_t>(d)] * med.weight[static_cast<std::size_t>(d) * n + i];
      aw[static_cast<std::size_t>(j) * n + i] = acc;
      const double ci = ro.c.empty() ? 0.0 : ro.c[static_cast<std::size_t>(i)];
      c[static_cast<std::size_t>(j) * n + i] = ci;
      g[static_cast<std::size_t>(j) * n + i] = acc + ci;
    }
    bias[static_cast<std::size_t>(j)] = ro.b;
  }
}

void Evaluator::score_means(const double* t, std::vector<double>& mu) const {
  mu.resize(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double* gj = g.data() + static_cast<std::size_t>(j) * n;
    double acc = bias[static_cast<std::size_t>(j)];
    for (int i = 0; i < n; ++i) acc += gj[i] * t[i];
    mu[static_cast<std::size_t>(j)] = acc;
  }
}

double Evaluator::noise_term(std::uint64_t seed, std::size_t row, std::uint64_t k, int j,
                             bool antithetic) const {
  const auto& med = model->mediators[static_cast<std::size_t>(j)];
  const auto& ro = model->destination.readout[static_cast<std::size_t>(j)];
  std::uint64_t key;
  double sign = 1.0;
  if (antithetic) {
    key = derive_key(seed, StreamTag::mediator_noise, row, k >> 1, static_cast<std::uint64_t>(j));
    if (k & 1u) sign = -1.0;
  } else {
    key = derive_key(seed, StreamTag::mediator_sample, row, k, static_cast<std::uint64_t>(j));
  }
  double acc = 0.0;
  for (int d = 0; d < med.p; ++d)
    acc += ro.a[static_cast<std::size_t>(d)] * med.noise_scale[static_cast<std::size_t>(d)] *
           gaussian_at(key, static_cast<std::uint64_t>(d));
  return sign * acc;
}

void Evaluator::softmax(const std::vector<double>& u, std::vector<double>& p) {
  const std::size_t m = u.size();
  p.resize(m);
  double hi = u[0];
  for (std::size_t j = 1; j < m; ++j) hi = std::max(hi, u[j]);
  double z = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    p[j] = std::exp(u[j] - hi);
    z += p[j];
  }
  for (std::size_t j = 0; j < m; ++j) p[j] /= z;
}

std::vector<double> stratified_normal_grid(int q_count) {
  std::vector<double> grid(static_cast<std::size_t>(q_count));
  // Mirrored quantile midpoints: the grid is exactly antisymmetric, so
  // symmetric integrands tie bitwise across sign flips.
  const int half = q_count / 2;
  for (int q = 0; q < half; ++q) {
    const double z = probit((q + 0.5) / q_count);
    grid[static_cast<std::size_t>(q)] = z;
    grid[static_cast<std::size_t>(q_count - 1 - q)] = -z;
  }
  if (q_count & 1) grid[static_cast<std::size_t>(half)] = 0.0;
  return grid;
}

}  // namespace detail

static void require_even_samples(int K, const char* op) {
  if (K < 2 || (K & 1))
    throw std::invalid_argument(std::string(op) + ": samples_per_point must be even and >= 2");
}

std::vector<double> label_marginals(const NetworkModel& model, const double* t,
                                    const EstimatorConfig& cfg, std::size_t row) {
  detail::Evaluator ev(model);
  const int K = cfg.samples_per_point;
  require_even_samples(K, "label_marginals");
  const std::uint64_t seed = resolve_seed(model, cfg);
  std::vector<double> mu;
  ev.score_means(t, mu);
  std::vector<double> u(mu.size()), p, acc(mu.size(), 0.0);
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < model.m; ++j)
      u[static_cast<std::size_t>(j)] =
          mu[static_cast<std::size_t>(j)] +
          ev.noise_term(seed, row, static_cast<std::uint64_t>(k), j, true);
    detail::Evaluator::softmax(u, p);
    for (std::size_t j = 0; j < p.size(); ++j) acc[j] += p[j];
  }
  for (double& v : acc) v /= K;
  return acc;
}

int argmax_label(const std::vector<double>& marginals) {
  if (marginals.empty()) throw std::invalid_argument("argmax_label: empty input");
  std::size_t best = 0;
  for (std::size_t l = 1; l < marginals.size(); ++l)
    if (marginals[l] > marginals[best] * (1.0 + 1e-9) + 1e-15) best = l;
  return static_cast<int>(best) + 1;
}

int predict_label(const NetworkModel& model, const double* t, const EstimatorConfig& cfg) {
  return argmax_label(label_marginals(model, t, cfg, 0));
}

std::vector<double> conditional_label_prob(const NetworkModel& model, const double* t,
                                           int j, const double* x,
                                           const EstimatorConfig& cfg, std::size_t row) {
  detail::Evaluator ev(model);
  if (j < 1 || j > model.m)
    throw std::invalid_argument("conditional_label_prob: mediator index out of range");
  const auto& med = model.mediators[static_cast<std::size_t>(j - 1)];
  const auto& ro = model.destination.readout[static_cast<std::size_t>(j - 1)];
  const int K = cfg.samples_per_point;
  require_even_samples(K, "conditional_label_prob");
  const std::uint64_t seed = resolve_seed(model, cfg);

  std::vector<double> mu;
  ev.score_means(t, mu);
  // Pinned score u_j = a_j . x + c_j . t + b_j, constant across draws.
  double pinned = ro.b;
  for (int d = 0; d < med.p; ++d) pinned += ro.a[static_cast<std::size_t>(d)] * x[d];
  for (int i = 0; i < model.n; ++i)
    pinned += ev.c[static_cast<std::size_t>(j - 1) * model.n + i] * t[i];

  std::vector<double> u(mu.size()), p, acc(mu.size(), 0.0);
  for (int k = 0; k < K; ++k) {
    for (int jj = 0; jj < model.m; ++jj) {
      u[static_cast<std::size_t>(jj)] =
          jj == j - 1 ? pinned
                      : mu[static_cast<std::size_t>(jj)] +
                            ev.noise_term(seed, row, static_cast<std::uint64_t>(k), jj, true);
    }
    detail::Evaluator::softmax(u, p);
    for (std::size_t l = 0; l < p.size(); ++l) acc[l] += p[l];
  }
  for (double& v : acc) v /= K;
  return acc;
}

namespace {

// Deterministic nested quadrature for the dominance variance; applies when
// every mediator is scalar and the label count is small. Exchangeable models
// then tie to rounding error (the mediators see complementary softmax values
// in different summation orders), which the argmax tie band absorbs; MC would
// tie only to sampling error.
bool quadrature_eligible(const NetworkModel& model) {
  if (model.m > 4) return false;
  for (const auto& med : model.mediators)
    if (med.p != 1) return false;
  return true;
}

DominanceResult dominance_by_quadrature(const NetworkModel& model, const detail::Evaluator& ev,
                                        const double* t, int l, const EstimatorConfig& cfg) {
  const int m = model.m;
  const int outer_q = std::clamp(cfg.samples_per_point, 16, 128);
  const int inner_q = m == 2 ? 64 : (m == 3 ? 24 : 12);
  const auto outer_grid = detail::stratified_normal_grid(outer_q);
  const auto inner_grid = detail::stratified_normal_grid(inner_q);

  std::vector<double> mu;
  ev.score_means(t, mu);
  std::vector<double> scale(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j)
    scale[static_cast<std::size_t>(j)] =
        model.destination.readout[static_cast<std::size_t>(j)].a[0] *
        model.mediators[static_cast<std::size_t>(j)].noise_scale[0];

  long cells = 1;
  for (int d = 0; d < m - 1; ++d) cells *= inner_q;

  DominanceResult out;
  out.scores.assign(static_cast<std::size_t>(m), 0.0);
  std::vector<double> u(static_cast<std::size_t>(m)), p;
  std::vector<int> idx(static_cast<std::size_t>(std::max(m - 1, 1)), 0);
  for (int j = 0; j < m; ++j) {
    double sum = 0.0, sum_sq = 0.0;
    for (int q = 0; q < outer_q; ++q) {
      const double pinned =
          mu[static_cast<std::size_t>(j)] +
          scale[static_cast<std::size_t>(j)] * outer_grid[static_cast<std::size_t>(q)];
      std::fill(idx.begin(), idx.end(), 0);
      double inner = 0.0;
      for (long cell = 0; cell < cells; ++cell) {
        int pos = 0;
        for (int jj = 0; jj < m; ++jj) {
          if (jj == j) {
            u[static_cast<std::size_t>(jj)] = pinned;
          } else {
            u[static_cast<std::size_t>(jj)] =
                mu[static_cast<std::size_t>(jj)] +
                scale[static_cast<std::size_t>(jj)] *
                    inner_grid[static_cast<std::size_t>(idx[static_cast<std::size_t>(pos)])];
            ++pos;
          }
        }
        detail::Evaluator::softmax(u, p);
        inner += p[static_cast<std::size_t>(l - 1)];
        for (int d = m - 2; d >= 0; --d) {
          if (++idx[static_cast<std::size_t>(d)] < inner_q) break;
          idx[static_cast<std::size_t>(d)] = 0;
        }
      }
      inner /= static_cast<double>(cells);
      sum += inner;
      sum_sq += inner * inner;
    }
    const double mean = sum / outer_q;
    out.scores[static_cast<std::size_t>(j)] = std::max(0.0, sum_sq / outer_q - mean * mean);
  }
  return out;
}

}  // namespace

DominanceResult dominance_scores(const NetworkModel& model, const double* t, int l,
                                 const EstimatorConfig& cfg) {
  detail::Evaluator ev(model);
  if (l < 1 || l > model.m) throw std::invalid_argument("dominance_scores: label out of range");

  DominanceResult out;
  if (quadrature_eligible(model)) {
    out = dominance_by_quadrature(model, ev, t, l, cfg);
  } else {
    const int R = cfg.samples_per_point;
    if (R < 2) throw std::invalid_argument("dominance_scores: samples_per_point must be >= 2");
    const std::uint64_t seed = resolve_seed(model, cfg);
    out.scores.assign(static_cast<std::size_t>(model.m), 0.0);
    EstimatorConfig inner = cfg;
    inner.samples_per_point = cfg.samples_per_point + (cfg.samples_per_point & 1);
    std::vector<double> x;
    for (int j = 1; j <= model.m; ++j) {
      const auto& med = model.mediators[static_cast<std::size_t>(j - 1)];
      double sum = 0.0, sum_sq = 0.0;
      for (int r = 0; r < R; ++r) {
        // Outer draw of the pinned mediator; the standard normals are keyed
        // by r only, shared across mediators.
        const std::uint64_t key =
            derive_key(seed, StreamTag::dominance_outer, 0, static_cast<std::uint64_t>(r));
        x.assign(static_cast<std::size_t>(med.p), 0.0);
        for (int d = 0; d < med.p; ++d) {
          double mean_d = 0.0;
          for (int i = 0; i < model.n; ++i)
            mean_d += med.weight[static_cast<std::size_t>(d) * model.n + i] * t[i];
          x[static_cast<std::size_t>(d)] =
              mean_d + med.noise_scale[static_cast<std::size_t>(d)] *
                           gaussian_at(key, static_cast<std::uint64_t>(d));
        }
        const double v =
            conditional_label_prob(model, t, j, x.data(), inner, 0)[static_cast<std::size_t>(l - 1)];
        sum += v;
        sum_sq += v * v;
      }
      const double mean = sum / R;
      out.scores[static_cast<std::size_t>(j - 1)] = std::max(0.0, sum_sq / R - mean * mean);
    }
  }

  std::size_t best = 0;
  for (std::size_t j = 1; j < out.scores.size(); ++j)
    if (out.scores[j] > out.scores[best] * (1.0 + 1e-9) + 1e-15) best = j;
  out.argmax = static_cast<int>(best) + 1;
  out.degenerate = out.scores[best] <= 1e-15;
  return out;
}

namespace {

// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, int dim) {
  auto at = [&](int r, int col) -> double& {
    return a[static_cast<std::size_t>(r) * dim + col];
  };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int r = 0; r < dim; ++r)
      for (int col = r + 1; col < dim; ++col) off += at(r, col) * at(r, col);
    if (off < 1e-30) break;
    for (int r = 0; r < dim; ++r) {
      for (int col = r + 1; col < dim; ++col) {
        const double apq = at(r, col);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = 0.5 * (at(col, col) - at(r, r)) / apq;
        const double sign = theta >= 0.0 ? 1.0 : -1.0;
        const double tt = sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cc = 1.0 / std::sqrt(tt * tt + 1.0);
        const double ss = tt * cc;
        for (int i = 0; i < dim; ++i) {
          const double air = at(i, r), aic = at(i, col);
          at(i, r) = cc * air - ss * aic;
          at(i, col) = ss * air + cc * aic;
        }
        for (int i = 0; i < dim; ++i) {
          const double ari = at(r, i), aci = at(col, i);
          at(r, i) = cc * ari - ss * aci;
          at(col, i) = ss * ari + cc * aci;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(dim));
  for (int r = 0; r < dim; ++r) ev[static_cast<std::size_t>(r)] = at(r, r);
  return ev;
}

}  // namespace

SufficiencyResult check_dimensional_sufficiency(const MediatorSpec& mediator, double rank_tol) {
  if (mediator.p <= 0 || mediator.weight.size() % static_cast<std::size_t>(mediator.p) != 0)
    throw std::invalid_argument("check_dimensional_sufficiency: malformed weight");
  const int rows = mediator.p;
  const int cols = static_cast<int>(mediator.weight.size()) / mediator.p;
  if (cols == 0) throw std::invalid_argument("check_dimensional_sufficiency: empty weight");
  const auto& w = mediator.weight;
  // Gram matrix on the smaller side; eigenvalues are squared singular values.
  const int dim = std::min(rows, cols);
  std::vector<double> gram(static_cast<std::size_t>(dim) * dim, 0.0);
  if (rows <= cols) {
    for (int r = 0; r < rows; ++r)
      for (int s = 0; s < rows; ++s) {
        double acc = 0.0;
        for (int k = 0; k < cols; ++k)
          acc += w[static_cast<std::size_t>(r) * cols + k] * w[static_cast<std::size_t>(s) * cols + k];
        gram[static_cast<std::size_t>(r) * dim + s] = acc;
      }
  } else {
    for (int r = 0; r < cols; ++r)
      for (int s = 0; s < cols; ++s) {
        double acc = 0.0;
        for (int k = 0; k < rows; ++k)
          acc += w[static_cast<std::size_t>(k) * cols + r] * w[static_cast<std::size_t>(k) * cols + s];
        gram[static_cast<std::size_t>(r) * dim + s] = acc;
      }
  }
  auto ev = symmetric_eigenvalues(std::move(gram), dim);
  double top = 0.0;
  for (double v : ev) top = std::max(top, v);
  SufficiencyResult res;
  if (top > 0.0) {
    for (double v : ev)
      if (v > top * rank_tol * rank_tol) ++res.rank;
  }
  res.sufficient = mediator.p >= res.rank;
  return res;
}

std::vector<SufficiencyResult> check_dimensional_sufficiency(const NetworkModel& model,
                                                             double rank_tol) {
  validate_model(model);
  std::vector<SufficiencyResult> out;
  out.reserve(model.mediators.size());
  for (const auto& med : model.mediators) out.push_back(check_dimensional_sufficiency(med, rank_tol));
  return out;
}

namespace {

void sample_row(const NetworkModel& model, const detail::Evaluator& ev, std::uint64_t seed,
                std::size_t row, const double* t, MediatorTrace& trace, int* label_out) {
  std::vector<double> u(static_cast<std::size_t>(model.m)), p;
  for (int j = 0; j < model.m; ++j) {
    const auto& med = model.mediators[static_cast<std::size_t>(j)];
    const auto& ro = model.destination.readout[static_cast<std::size_t>(j)];
    const std::uint64_t mkey =
        derive_key(seed, StreamTag::mediator_sample, row, static_cast<std::uint64_t>(j));
    double score = ro.b;
    for (int d = 0; d < med.p; ++d) {
      double mean_d = 0.0;
      for (int i = 0; i < model.n; ++i)
        mean_d += med.weight[static_cast<std::size_t>(d) * model.n + i] * t[i];
      const double x = mean_d + med.noise_scale[static_cast<std::size_t>(d)] *
                                    gaussian_at(mkey, static_cast<std::uint64_t>(d));
      trace.values[row * trace.total_dims + trace.offsets[static_cast<std::size_t>(j)] +
                   static_cast<std::size_t>(d)] = x;
      score += ro.a[static_cast<std::size_t>(d)] * x;
    }
    for (int i = 0; i < model.n; ++i)
      score += ev.c[static_cast<std::size_t>(j) * model.n + i] * t[i];
    u[static_cast<std::size_t>(j)] = score;
  }
  detail::Evaluator::softmax(u, p);
  const double draw = uniform_at(derive_key(seed, StreamTag::label_sample, row), 0);
  double cum = 0.0;
  int label = model.m;
  for (int l = 0; l < model.m; ++l) {
    cum += p[static_cast<std::size_t>(l)];
    if (draw <= cum) {
      label = l + 1;
      break;
    }
  }
  *label_out = label;
}

void init_trace(const NetworkModel& model, std::size_t count, MediatorTrace& trace) {
  trace.dims.assign(static_cast<std::size_t>(model.m), 0);
  trace.offsets.assign(static_cast<std::size_t>(model.m), 0);
  std::size_t total = 0;
  for (int j = 0; j < model.m; ++j) {
    trace.dims[static_cast<std::size_t>(j)] = model.mediators[static_cast<std::size_t>(j)].p;
    trace.offsets[static_cast<std::size_t>(j)] = total;
    total += static_cast<std::size_t>(model.mediators[static_cast<std::size_t>(j)].p);
  }
  trace.total_dims = total;
  trace.values.assign(count * total, 0.0);
}

}  // namespace

TracedDataset sample_joint(const NetworkModel& model, std::size_t count, std::uint64_t seed) {
  detail::Evaluator ev(model);
  TracedDataset out;
  out.data.n = model.n;
  out.data.has_labels = true;
  out.data.features.assign(count * static_cast<std::size_t>(model.n), 0.0);
  out.data.labels.assign(count, 0);
  init_trace(model, count, out.trace);

  std::vector<double> t(static_cast<std::size_t>(model.n));
  for (std::size_t row = 0; row < count; ++row) {
    const std::uint64_t skey = derive_key(seed, StreamTag::source_sample, row);
    for (int i = 0; i < model.n; ++i) {
      const double z = gaussian_at(skey, static_cast<std::uint64_t>(i));
      t[static_cast<std::size_t>(i)] =
          model.source.kind == SourceSpec::Kind::std_normal
              ? z
              : model.source.mean[static_cast<std::size_t>(i)] +
                    model.source.scale[static_cast<std::size_t>(i)] * z;
      out.data.features[row * static_cast<std::size_t>(model.n) + static_cast<std::size_t>(i)] =
          t[static_cast<std::size_t>(i)];
    }
    sample_row(model, ev, seed, row, t.data(), out.trace, &out.data.labels[row]);
  }
  return out;
}

TracedDataset sample_labels_given(const NetworkModel& model, const Dataset& features,
                                  std::uint64_t seed) {
  detail::Evaluator ev(model);
  if (features.n != static_cast<std::size_t>(model.n))
    throw std::invalid_argument("sample_labels_given: feature dimension mismatch");
  TracedDataset out;
  out.data = features;
  out.data.has_labels = true;
  out.data.labels.assign(features.rows(), 0);
  init_trace(model, features.rows(), out.trace);
  for (std::size_t row = 0; row < features.rows(); ++row)
    sample_row(model, ev, seed, row, features.row(row), out.trace, &out.data.labels[row]);
  return out;
}

Dag to_dag(const NetworkModel& model) {
  detail::Evaluator ev(model);
  Dag g;
  for (int i = 1; i <= model.n; ++i) g.add_node("S" + std::to_string(i));
  for (int j = 1; j <= model.m; ++j) g.add_node("X" + std::to_string(j));
  for (int l = 1; l <= model.m; ++l) g.add_node("D" + std::to_string(l));
  for (int j = 0; j < model.m; ++j) {
    const auto& med = model.mediators[static_cast<std::size_t>(j)];
    for (int i = 0; i < model.n; ++i) {
      bool nonzero = false;
      for (int d = 0; d < med.p && !nonzero; ++d)
        nonzero = med.weight[static_cast<std::size_t>(d) * model.n + i] != 0.0;
      if (nonzero) g.add_edge("S" + std::to_string(i + 1), "X" + std::to_string(j + 1));
    }
    bool reads = false;
    for (double v : model.destination.readout[static_cast<std::size_t>(j)].a)
      if (v != 0.0) reads = true;
    // The softmax couples all scores, so a read mediator feeds every label.
    if (reads)
      for (int l = 1; l <= model.m; ++l)
        g.add_edge("X" + std::to_string(j + 1), "D" + std::to_string(l));
  }
  for (int i = 0; i < model.n; ++i) {
    bool direct = false;
    for (int j = 0; j < model.m && !direct; ++j)
      direct = ev.c[static_cast<std::size_t>(j) * model.n + i] != 0.0;
    if (direct)
      for (int l = 1; l <= model.m; ++l)
        g.add_edge("S" + std::to_string(i + 1), "D" + std::to_string(l));
  }
  g.assert_acyclic();
  return g;
}

}  // namespace apcalc
