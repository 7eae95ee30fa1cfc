#include "apcalc/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "apcalc/parallel.hpp"
#include "apcalc/rng.hpp"

namespace apcalc {

namespace {

void check_pair(const NetworkModel& model, int i, int l, const char* op) {
  if (i < 1 || i > model.n) throw std::invalid_argument(std::string(op) + ": feature index out of range");
  if (l < 1 || l > model.m) throw std::invalid_argument(std::string(op) + ": label index out of range");
}

void check_data(const NetworkModel& model, const Dataset& data, const char* op) {
  if (data.rows() == 0) throw std::invalid_argument(std::string(op) + ": dataset is empty");
  if (data.n != static_cast<std::size_t>(model.n))
    throw std::invalid_argument(std::string(op) + ": feature dimension mismatch");
}

// One row's noise-score vector for draw k; u[j] = mu[j] + noise_j.
void draw_scores(const detail::Evaluator& ev, std::uint64_t seed, std::size_t row,
                 std::uint64_t k, bool antithetic, const std::vector<double>& mu,
                 std::vector<double>& u) {
  for (int j = 0; j < ev.m; ++j)
    u[static_cast<std::size_t>(j)] =
        mu[static_cast<std::size_t>(j)] + ev.noise_term(seed, row, k, j, antithetic);
}

}  // namespace

double AttributionReport::at(int i, int l) const {
  if (i < 1 || i > n || l < 1 || l > m) throw std::invalid_argument("attribution report: pair out of range");
  return scores[static_cast<std::size_t>(i - 1) * m + (l - 1)];
}

AttributionReport attribution_matrix(const NetworkModel& model, const Dataset& data,
                                     const EstimatorConfig& cfg, AttributionEstimator estimator,
                                     bool with_per_point) {
  detail::Evaluator ev(model);
  check_data(model, data, "attribution_matrix");
  const int K = cfg.samples_per_point;
  if (K < 2 || (K & 1))
    throw std::invalid_argument("attribution_matrix: samples_per_point must be even and >= 2");
  const std::uint64_t seed = resolve_seed(model, cfg);
  const int threads = resolve_threads(cfg);
  const std::size_t rows = data.rows();
  const std::size_t nm = static_cast<std::size_t>(model.n) * static_cast<std::size_t>(model.m);
  const bool marginal = estimator == AttributionEstimator::marginal;

  // Per-row partial sums; combined in row order afterwards so the result does
  // not depend on the thread schedule.
  std::vector<double> cond_sum(rows * nm, 0.0), cond_sq(rows * nm, 0.0);
  std::vector<double> marg_sum, dir_sum, ind_sum;
  if (marginal) {
    marg_sum.assign(rows * nm, 0.0);
    dir_sum.assign(rows * nm, 0.0);
    ind_sum.assign(rows * nm, 0.0);
  }

  const int n = model.n, m = model.m;
  parallel_for(rows, threads, [&](std::size_t r) {
    const double* t = data.row(r);
    std::vector<double> mu, u(static_cast<std::size_t>(m)), p;
    ev.score_means(t, mu);
    std::vector<double> q(static_cast<std::size_t>(n));
    double* csum = cond_sum.data() + r * nm;
    double* csq = cond_sq.data() + r * nm;

    for (int k = 0; k < K; ++k) {
      draw_scores(ev, seed, r, static_cast<std::uint64_t>(k), false, mu, u);
      detail::Evaluator::softmax(u, p);
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < m; ++j) acc += p[static_cast<std::size_t>(j)] * ev.g[static_cast<std::size_t>(j) * n + i];
        q[static_cast<std::size_t>(i)] = acc;
      }
      for (int i = 0; i < n; ++i) {
        for (int l = 0; l < m; ++l) {
          const double pl = p[static_cast<std::size_t>(l)];
          const double delta =
              pl * (ev.g[static_cast<std::size_t>(l) * n + i] - q[static_cast<std::size_t>(i)] -
                    (1.0 - pl) * ev.aw[static_cast<std::size_t>(l) * n + i]);
          csum[static_cast<std::size_t>(i) * m + l] += delta;
          csq[static_cast<std::size_t>(i) * m + l] += delta * delta;
        }
      }
    }

    if (marginal) {
      double* msum = marg_sum.data() + r * nm;
      double* dsum = dir_sum.data() + r * nm;
      double* isum = ind_sum.data() + r * nm;
      std::vector<double> qc(static_cast<std::size_t>(n)), qw(static_cast<std::size_t>(n));
      for (int k = 0; k < K; ++k) {
        draw_scores(ev, seed, r, static_cast<std::uint64_t>(k), true, mu, u);
        detail::Evaluator::softmax(u, p);
        for (int i = 0; i < n; ++i) {
          double accg = 0.0, accc = 0.0, accw = 0.0;
          for (int j = 0; j < m; ++j) {
            const double pj = p[static_cast<std::size_t>(j)];
            accg += pj * ev.g[static_cast<std::size_t>(j) * n + i];
            accc += pj * ev.c[static_cast<std::size_t>(j) * n + i];
            accw += pj * ev.aw[static_cast<std::size_t>(j) * n + i];
          }
          q[static_cast<std::size_t>(i)] = accg;
          qc[static_cast<std::size_t>(i)] = accc;
          qw[static_cast<std::size_t>(i)] = accw;
        }
        for (int i = 0; i < n; ++i) {
          for (int l = 0; l < m; ++l) {
            const double pl = p[static_cast<std::size_t>(l)];
            msum[static_cast<std::size_t>(i) * m + l] +=
                pl * (ev.g[static_cast<std::size_t>(l) * n + i] - q[static_cast<std::size_t>(i)]);
            dsum[static_cast<std::size_t>(i) * m + l] +=
                pl * (ev.c[static_cast<std::size_t>(l) * n + i] - qc[static_cast<std::size_t>(i)]);
            isum[static_cast<std::size_t>(i) * m + l] +=
                pl * (ev.aw[static_cast<std::size_t>(l) * n + i] - qw[static_cast<std::size_t>(i)]);
          }
        }
      }
    }
  });

  AttributionReport rep;
  rep.n = n;
  rep.m = m;
  rep.estimator = estimator;
  rep.samples_per_point = K;
  rep.seed = seed;
  rep.rows = rows;
  rep.scores.assign(nm, 0.0);
  rep.uncertainty.assign(nm, 0.0);
  if (marginal) {
    rep.direct.assign(nm, 0.0);
    rep.indirect.assign(nm, 0.0);
  }
  if (with_per_point) rep.per_point.assign(rows, std::vector<double>(nm, 0.0));

  const double denom = static_cast<double>(rows) * K;
  std::vector<double> total_cond(nm, 0.0), total_sq(nm, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < nm; ++c) {
      total_cond[c] += cond_sum[r * nm + c];
      total_sq[c] += cond_sq[r * nm + c];
    }
    if (marginal) {
      for (std::size_t c = 0; c < nm; ++c) {
        rep.scores[c] += marg_sum[r * nm + c];
        rep.direct[c] += dir_sum[r * nm + c];
        rep.indirect[c] += ind_sum[r * nm + c];
      }
    }
    if (with_per_point) {
      const double* src = marginal ? marg_sum.data() + r * nm : cond_sum.data() + r * nm;
      for (std::size_t c = 0; c < nm; ++c) rep.per_point[r][c] = src[c] / K;
    }
  }
  if (marginal) {
    for (std::size_t c = 0; c < nm; ++c) {
      rep.scores[c] /= denom;
      rep.direct[c] /= denom;
      rep.indirect[c] /= denom;
    }
  } else {
    for (std::size_t c = 0; c < nm; ++c) rep.scores[c] = total_cond[c] / denom;
  }
  // Pooled sample variance of the per-draw conditional gradients.
  if (denom >= 2.0) {
    for (std::size_t c = 0; c < nm; ++c) {
      const double mean = total_cond[c] / denom;
      rep.uncertainty[c] = std::max(0.0, (total_sq[c] - denom * mean * mean) / (denom - 1.0));
    }
  }
  return rep;
}

namespace {

enum class CellKind { marginal, direct, indirect, conditional };

// Single-cell estimate: per-row means combined in row order.
double cell_over_dataset(const NetworkModel& model, const Dataset& data, int i, int l,
                         const EstimatorConfig& cfg, CellKind kind, const char* op,
                         double* variance_out = nullptr) {
  detail::Evaluator ev(model);
  check_pair(model, i, l, op);
  check_data(model, data, op);
  const int K = cfg.samples_per_point;
  if (K < 2 || (K & 1))
    throw std::invalid_argument(std::string(op) + ": samples_per_point must be even and >= 2");
  const std::uint64_t seed = resolve_seed(model, cfg);
  const int threads = resolve_threads(cfg);
  const std::size_t rows = data.rows();
  const int n = model.n, m = model.m;
  const int ii = i - 1, ll = l - 1;
  const bool antithetic = kind != CellKind::conditional;

  std::vector<double> row_sum(rows, 0.0), row_sq(rows, 0.0);
  parallel_for(rows, threads, [&](std::size_t r) {
    const double* t = data.row(r);
    std::vector<double> mu, u(static_cast<std::size_t>(m)), p;
    ev.score_means(t, mu);
    double sum = 0.0, sq = 0.0;
    for (int k = 0; k < K; ++k) {
      draw_scores(ev, seed, r, static_cast<std::uint64_t>(k), antithetic, mu, u);
      detail::Evaluator::softmax(u, p);
      const double pl = p[static_cast<std::size_t>(ll)];
      double delta = 0.0;
      switch (kind) {
        case CellKind::marginal: {
          double q = 0.0;
          for (int j = 0; j < m; ++j)
            q += p[static_cast<std::size_t>(j)] * ev.g[static_cast<std::size_t>(j) * n + ii];
          delta = pl * (ev.g[static_cast<std::size_t>(ll) * n + ii] - q);
          break;
        }
        case CellKind::direct: {
          double q = 0.0;
          for (int j = 0; j < m; ++j)
            q += p[static_cast<std::size_t>(j)] * ev.c[static_cast<std::size_t>(j) * n + ii];
          delta = pl * (ev.c[static_cast<std::size_t>(ll) * n + ii] - q);
          break;
        }
        case CellKind::indirect: {
          double q = 0.0;
          for (int j = 0; j < m; ++j)
            q += p[static_cast<std::size_t>(j)] * ev.aw[static_cast<std::size_t>(j) * n + ii];
          delta = pl * (ev.aw[static_cast<std::size_t>(ll) * n + ii] - q);
          break;
        }
        case CellKind::conditional: {
          double q = 0.0;
          for (int j = 0; j < m; ++j)
            q += p[static_cast<std::size_t>(j)] * ev.g[static_cast<std::size_t>(j) * n + ii];
          delta = pl * (ev.g[static_cast<std::size_t>(ll) * n + ii] - q -
                        (1.0 - pl) * ev.aw[static_cast<std::size_t>(ll) * n + ii]);
          break;
        }
      }
      sum += delta;
      sq += delta * delta;
    }
    row_sum[r] = sum;
    row_sq[r] = sq;
  });

  double total = 0.0, total_sq = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    total += row_sum[r];
    total_sq += row_sq[r];
  }
  const double denom = static_cast<double>(rows) * K;
  const double mean = total / denom;
  if (variance_out) {
    *variance_out =
        denom >= 2.0 ? std::max(0.0, (total_sq - denom * mean * mean) / (denom - 1.0)) : 0.0;
  }
  return mean;
}

}  // namespace

double attribution_marginal(const NetworkModel& model, const Dataset& data, int i, int l,
                            const EstimatorConfig& cfg) {
  return cell_over_dataset(model, data, i, l, cfg, CellKind::marginal, "attribution_marginal");
}

double attribution_conditional(const NetworkModel& model, const Dataset& data, int i, int l,
                               const EstimatorConfig& cfg) {
  return cell_over_dataset(model, data, i, l, cfg, CellKind::conditional, "attribution_conditional");
}

double attribution_uncertainty(const NetworkModel& model, const Dataset& data, int i, int l,
                               const EstimatorConfig& cfg) {
  double variance = 0.0;
  cell_over_dataset(model, data, i, l, cfg, CellKind::conditional, "attribution_uncertainty",
                    &variance);
  return variance;
}

double attribution_marginal_point(const NetworkModel& model, const double* t, int i, int l,
                                  const EstimatorConfig& cfg, std::size_t row) {
  detail::Evaluator ev(model);
  check_pair(model, i, l, "attribution_marginal_point");
  const int K = cfg.samples_per_point;
  if (K < 2 || (K & 1))
    throw std::invalid_argument("attribution_marginal_point: samples_per_point must be even and >= 2");
  const std::uint64_t seed = resolve_seed(model, cfg);
  const int n = model.n, m = model.m;
  std::vector<double> mu, u(static_cast<std::size_t>(m)), p;
  ev.score_means(t, mu);
  double sum = 0.0;
  for (int k = 0; k < K; ++k) {
    draw_scores(ev, seed, row, static_cast<std::uint64_t>(k), true, mu, u);
    detail::Evaluator::softmax(u, p);
    double q = 0.0;
    for (int j = 0; j < m; ++j)
      q += p[static_cast<std::size_t>(j)] * ev.g[static_cast<std::size_t>(j) * n + (i - 1)];
    sum += p[static_cast<std::size_t>(l - 1)] * (ev.g[static_cast<std::size_t>(l - 1) * n + (i - 1)] - q);
  }
  return sum / K;
}

std::pair<double, double> decompose(const NetworkModel& model, const double* t, int i, int l,
                                    const EstimatorConfig& cfg, std::size_t row) {
  detail::Evaluator ev(model);
  check_pair(model, i, l, "decompose");
  const int K = cfg.samples_per_point;
  if (K < 2 || (K & 1))
    throw std::invalid_argument("decompose: samples_per_point must be even and >= 2");
  const std::uint64_t seed = resolve_seed(model, cfg);
  const int n = model.n, m = model.m;
  std::vector<double> mu, u(static_cast<std::size_t>(m)), p;
  ev.score_means(t, mu);
  double dsum = 0.0, isum = 0.0;
  for (int k = 0; k < K; ++k) {
    draw_scores(ev, seed, row, static_cast<std::uint64_t>(k), true, mu, u);
    detail::Evaluator::softmax(u, p);
    double qc = 0.0, qw = 0.0;
    for (int j = 0; j < m; ++j) {
      qc += p[static_cast<std::size_t>(j)] * ev.c[static_cast<std::size_t>(j) * n + (i - 1)];
      qw += p[static_cast<std::size_t>(j)] * ev.aw[static_cast<std::size_t>(j) * n + (i - 1)];
    }
    const double pl = p[static_cast<std::size_t>(l - 1)];
    dsum += pl * (ev.c[static_cast<std::size_t>(l - 1) * n + (i - 1)] - qc);
    isum += pl * (ev.aw[static_cast<std::size_t>(l - 1) * n + (i - 1)] - qw);
  }
  return {dsum / K, isum / K};
}

double fd_marginal_gradient(const NetworkModel& model, const double* t, int i, int l,
                            const EstimatorConfig& cfg, std::size_t row) {
  detail::Evaluator ev(model);
  check_pair(model, i, l, "fd_marginal_gradient");
  const double h = cfg.fd_step;
  if (!(h > 0.0)) throw std::invalid_argument("fd_marginal_gradient: fd_step must be positive");
  std::vector<double> hi(t, t + model.n), lo(t, t + model.n);
  hi[static_cast<std::size_t>(i - 1)] += h;
  lo[static_cast<std::size_t>(i - 1)] -= h;
  const double up = label_marginals(model, hi.data(), cfg, row)[static_cast<std::size_t>(l - 1)];
  const double dn = label_marginals(model, lo.data(), cfg, row)[static_cast<std::size_t>(l - 1)];
  return (up - dn) / (2.0 * h);
}

}  // namespace apcalc
