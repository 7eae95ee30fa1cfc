#include "apcalc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "apcalc/separation.hpp"

namespace apcalc {

namespace {

double column_min(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }
double column_max(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

// Plug-in MI (nats) of a joint probability table, row-major ca x cb. The
// table may carry mass != 1 (a conditional slice); it is normalized first.
double table_mi(const std::vector<double>& p, std::size_t ca, std::size_t cb) {
  double mass = 0.0;
  for (double v : p) mass += v;
  if (mass <= 0.0) return 0.0;
  std::vector<double> pa(ca, 0.0), pb(cb, 0.0);
  for (std::size_t a = 0; a < ca; ++a)
    for (std::size_t b = 0; b < cb; ++b) {
      pa[a] += p[a * cb + b];
      pb[b] += p[a * cb + b];
    }
  double mi = 0.0;
  for (std::size_t a = 0; a < ca; ++a)
    for (std::size_t b = 0; b < cb; ++b) {
      const double pj = p[a * cb + b];
      if (pj <= 0.0) continue;
      mi += (pj / mass) * std::log(pj * mass / (pa[a] * pb[b]));
    }
  return mi;
}

std::vector<double> feature_column(const Dataset& data, int i) {
  if (i < 1 || static_cast<std::size_t>(i) > data.n)
    throw std::invalid_argument("feature index out of range");
  std::vector<double> col(data.rows());
  for (std::size_t r = 0; r < col.size(); ++r)
    col[r] = data.at(r, static_cast<std::size_t>(i - 1));
  return col;
}

}  // namespace

CorrResult pearson_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("pearson_correlation: length mismatch");
  if (a.size() < 2)
    throw std::invalid_argument("pearson_correlation: need at least 2 rows");
  CorrResult res;
  if (column_min(a) == column_max(a) || column_min(b) == column_max(b)) {
    res.degenerate = true;
    return res;
  }
  const double count = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    ma += a[r];
    mb += b[r];
  }
  ma /= count;
  mb /= count;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    const double da = a[r] - ma, db = b[r] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) {
    res.degenerate = true;
    return res;
  }
  res.value = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
  return res;
}

std::vector<double> label_indicator(const Dataset& data, int l) {
  if (!data.has_labels) throw std::invalid_argument("label_indicator: dataset has no labels");
  if (l < 1) throw std::invalid_argument("label_indicator: label index out of range");
  std::vector<double> out(data.rows(), 0.0);
  for (std::size_t r = 0; r < out.size(); ++r)
    if (data.labels[r] == l) out[r] = 1.0;
  return out;
}

double information_gain(const TracedDataset& td, int i, int l, int bins) {
  const Dataset& data = td.data;
  if (!data.has_labels)
    throw std::invalid_argument("information_gain: dataset has no labels");
  if (bins < 1) throw std::invalid_argument("information_gain: bins must be >= 1");
  const std::size_t rows = data.rows();
  if (rows < 2) throw std::invalid_argument("information_gain: need at least 2 rows");
  if (i < 1 || static_cast<std::size_t>(i) > data.n)
    throw std::invalid_argument("information_gain: feature index out of range");
  if (l < 1 || static_cast<std::size_t>(l) > td.trace.dims.size())
    throw std::invalid_argument("information_gain: no mediator trace for label " +
                                std::to_string(l));
  if (td.trace.total_dims == 0 || td.trace.values.size() != rows * td.trace.total_dims)
    throw std::invalid_argument("information_gain: trace does not align with the dataset");

  const auto sbin = equal_frequency_bins(feature_column(data, i), bins);
  std::vector<int> ind(rows);
  for (std::size_t r = 0; r < rows; ++r) ind[r] = data.labels[r] == l ? 1 : 0;
  const double mi = mutual_information(sbin, ind);

  // Product cell over the mediator's dimensions, each binned independently.
  const int p = td.trace.dims[static_cast<std::size_t>(l - 1)];
  std::vector<int> zid(rows, 0);
  std::vector<double> col(rows);
  for (int c = 0; c < p; ++c) {
    for (std::size_t r = 0; r < rows; ++r) col[r] = td.trace.at(r, l - 1, c);
    const auto cb = equal_frequency_bins(col, bins);
    for (std::size_t r = 0; r < rows; ++r) zid[r] = zid[r] * bins + cb[r];
  }
  std::map<int, std::vector<std::size_t>> cells;
  for (std::size_t r = 0; r < rows; ++r) cells[zid[r]].push_back(r);
  double cmi = 0.0;
  for (const auto& [cell, members] : cells) {
    std::vector<int> sa, da;
    sa.reserve(members.size());
    da.reserve(members.size());
    for (std::size_t r : members) {
      sa.push_back(sbin[r]);
      da.push_back(ind[r]);
    }
    cmi += (static_cast<double>(members.size()) / static_cast<double>(rows)) *
           mutual_information(sa, da);
  }
  return mi - cmi;
}

double information_gain(const DiscreteNetwork& net, int i, int l) {
  const auto& feats = net.feature_nodes();
  const auto& meds = net.mediator_nodes();
  if (i < 1 || i > static_cast<int>(feats.size()))
    throw std::invalid_argument("information_gain: feature index out of range");
  const int label = net.label_node();
  const int m = net.nodes()[static_cast<std::size_t>(label)].card;
  if (l < 1 || l > m) throw std::invalid_argument("information_gain: label index out of range");
  if (l > static_cast<int>(meds.size()))
    throw std::invalid_argument("information_gain: no mediator for label " + std::to_string(l));

  const int fs = feats[static_cast<std::size_t>(i - 1)];
  const int med = meds[static_cast<std::size_t>(l - 1)];
  const auto table = net.marginal({fs, med, label});
  const std::size_t cs = static_cast<std::size_t>(net.nodes()[static_cast<std::size_t>(fs)].card);
  const std::size_t cx = static_cast<std::size_t>(net.nodes()[static_cast<std::size_t>(med)].card);
  const std::size_t cd = static_cast<std::size_t>(m);

  // Collapse the label axis to the indicator of l.
  std::vector<double> sxb(cs * cx * 2, 0.0);
  for (std::size_t s = 0; s < cs; ++s)
    for (std::size_t x = 0; x < cx; ++x)
      for (std::size_t d = 0; d < cd; ++d) {
        const int b = d == static_cast<std::size_t>(l - 1) ? 1 : 0;
        sxb[(s * cx + x) * 2 + static_cast<std::size_t>(b)] += table[(s * cx + x) * cd + d];
      }

  std::vector<double> sb(cs * 2, 0.0);
  for (std::size_t s = 0; s < cs; ++s)
    for (std::size_t x = 0; x < cx; ++x)
      for (std::size_t b = 0; b < 2; ++b) sb[s * 2 + b] += sxb[(s * cx + x) * 2 + b];
  const double mi = table_mi(sb, cs, 2);

  double cmi = 0.0;
  std::vector<double> slice(cs * 2, 0.0);
  for (std::size_t x = 0; x < cx; ++x) {
    double px = 0.0;
    for (std::size_t s = 0; s < cs; ++s)
      for (std::size_t b = 0; b < 2; ++b) {
        slice[s * 2 + b] = sxb[(s * cx + x) * 2 + b];
        px += slice[s * 2 + b];
      }
    if (px <= 0.0) continue;
    cmi += px * table_mi(slice, cs, 2);
  }
  return mi - cmi;
}

double fairness_disparity(const AttributionReport& report, int i, int l1, int l2) {
  return std::abs(report.at(i, l1) - report.at(i, l2));
}

double spurious_score(const Dataset& data, const AttributionReport& report, int i, int l) {
  const auto corr = pearson_correlation(feature_column(data, i), label_indicator(data, l));
  const double a = std::clamp(report.at(i, l), -1.0, 1.0);
  return std::abs(corr.value) * (1.0 - std::abs(a));
}

MetricsReport compute_metrics(const NetworkModel& model, const TracedDataset& td,
                              const EstimatorConfig& cfg, AttributionEstimator estimator,
                              int bins) {
  const Dataset& data = td.data;
  if (!data.has_labels) throw std::invalid_argument("compute_metrics: dataset has no labels");
  const auto report = attribution_matrix(model, data, cfg, estimator);

  MetricsReport rep;
  rep.n = model.n;
  rep.m = model.m;
  rep.estimator = estimator;
  rep.bins = bins;
  const std::size_t nm = static_cast<std::size_t>(model.n) * static_cast<std::size_t>(model.m);
  rep.correlations.assign(nm, 0.0);
  rep.corr_degenerate.assign(nm, 0);
  rep.attributions = report.scores;
  rep.spurious.assign(nm, 0.0);

  for (int i = 1; i <= model.n; ++i) {
    const auto col = feature_column(data, i);
    for (int l = 1; l <= model.m; ++l) {
      const std::size_t idx =
          static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(model.m) +
          static_cast<std::size_t>(l - 1);
      const auto corr = pearson_correlation(col, label_indicator(data, l));
      rep.correlations[idx] = corr.value;
      rep.corr_degenerate[idx] = corr.degenerate ? 1 : 0;
      const double a = std::clamp(report.at(i, l), -1.0, 1.0);
      rep.spurious[idx] = std::abs(corr.value) * (1.0 - std::abs(a));
    }
  }
  for (int i = 1; i <= model.n; ++i)
    for (int l1 = 1; l1 <= model.m; ++l1)
      for (int l2 = l1 + 1; l2 <= model.m; ++l2)
        rep.fairness.push_back({i, l1, l2, fairness_disparity(report, i, l1, l2)});

  const bool traced = td.trace.dims.size() == static_cast<std::size_t>(model.m) &&
                      td.trace.total_dims > 0 &&
                      td.trace.values.size() == data.rows() * td.trace.total_dims;
  if (traced) {
    rep.info_gain.assign(nm, 0.0);
    for (int i = 1; i <= model.n; ++i)
      for (int l = 1; l <= model.m; ++l)
        rep.info_gain[static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(model.m) +
                      static_cast<std::size_t>(l - 1)] = information_gain(td, i, l, bins);
  }
  return rep;
}

namespace {

// Feature-i parameter slots: column i of every mediator weight plus entry i
// of every readout source path.
struct ParamSlot {
  bool in_weight = true;
  int block = 0;  // mediator index or readout index
  int row = 0;    // weight row within the column (unused for c)
};

std::vector<ParamSlot> feature_slots(const NetworkModel& model) {
  std::vector<ParamSlot> slots;
  for (int j = 0; j < model.m; ++j)
    for (int r = 0; r < model.mediators[static_cast<std::size_t>(j)].p; ++r)
      slots.push_back({true, j, r});
  for (int l = 0; l < model.m; ++l) slots.push_back({false, l, 0});
  return slots;
}

double get_slot(const NetworkModel& model, const ParamSlot& s, int i) {
  if (s.in_weight) {
    const auto& med = model.mediators[static_cast<std::size_t>(s.block)];
    return med.weight[static_cast<std::size_t>(s.row) * static_cast<std::size_t>(model.n) +
                      static_cast<std::size_t>(i - 1)];
  }
  return model.destination.readout[static_cast<std::size_t>(s.block)]
      .c[static_cast<std::size_t>(i - 1)];
}

void set_slot(NetworkModel& model, const ParamSlot& s, int i, double v) {
  if (s.in_weight) {
    auto& med = model.mediators[static_cast<std::size_t>(s.block)];
    med.weight[static_cast<std::size_t>(s.row) * static_cast<std::size_t>(model.n) +
               static_cast<std::size_t>(i - 1)] = v;
    return;
  }
  model.destination.readout[static_cast<std::size_t>(s.block)].c[static_cast<std::size_t>(i - 1)] =
      v;
}

}  // namespace

SuppressionOutcome suppress_spurious(const NetworkModel& model, const Dataset& data, int i, int l,
                                     const SuppressionConfig& scfg, const EstimatorConfig& cfg) {
  if (scfg.epsilon <= 0.0) throw std::invalid_argument("suppress_spurious: epsilon must be > 0");
  if (scfg.step <= 0.0) throw std::invalid_argument("suppress_spurious: step must be > 0");
  if (scfg.max_iters < 1) throw std::invalid_argument("suppress_spurious: max_iters must be >= 1");
  if (scfg.fd_step <= 0.0) throw std::invalid_argument("suppress_spurious: fd_step must be > 0");
  if (!data.has_labels) throw std::invalid_argument("suppress_spurious: dataset has no labels");
  if (i < 1 || i > model.n) throw std::invalid_argument("suppress_spurious: feature index out of range");
  if (l < 1 || l > model.m) throw std::invalid_argument("suppress_spurious: label index out of range");

  SuppressionOutcome out{model, SuppressionStatus::already_converged, {}, {}};
  out.corr = pearson_correlation(feature_column(data, i), label_indicator(data, l));
  const double abs_corr = std::abs(out.corr.value);

  const auto eval_r = [&](const NetworkModel& mm) {
    const double a = scfg.estimator == AttributionEstimator::marginal
                         ? attribution_marginal(mm, data, i, l, cfg)
                         : attribution_conditional(mm, data, i, l, cfg);
    return abs_corr * (1.0 - std::abs(std::clamp(a, -1.0, 1.0)));
  };
  const auto eval_acc = [&](const NetworkModel& mm) {
    std::size_t hits = 0;
    for (std::size_t r = 0; r < data.rows(); ++r) {
      const auto marg = label_marginals(mm, data.row(r), cfg, r);
      if (argmax_label(marg) == data.labels[r]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(data.rows());
  };

  double r_cur = eval_r(out.model);
  out.trace.push_back({0, r_cur, eval_acc(out.model)});
  if (r_cur <= scfg.epsilon) return out;  // model bytes untouched

  // The source-path vectors default to empty (= zeros); give the ones the
  // descent edits explicit storage.
  for (auto& ro : out.model.destination.readout)
    if (ro.c.empty()) ro.c.assign(static_cast<std::size_t>(model.n), 0.0);

  const auto slots = feature_slots(out.model);
  out.status = SuppressionStatus::iteration_limit;
  for (int iter = 1; iter <= scfg.max_iters; ++iter) {
    std::vector<double> grad(slots.size(), 0.0);
    double gnorm_sq = 0.0;
    for (std::size_t k = 0; k < slots.size(); ++k) {
      const double saved = get_slot(out.model, slots[k], i);
      set_slot(out.model, slots[k], i, saved + scfg.fd_step);
      const double rp = eval_r(out.model);
      set_slot(out.model, slots[k], i, saved - scfg.fd_step);
      const double rm = eval_r(out.model);
      set_slot(out.model, slots[k], i, saved);
      grad[k] = (rp - rm) / (2.0 * scfg.fd_step);
      gnorm_sq += grad[k] * grad[k];
    }
    if (gnorm_sq == 0.0) {
      out.status = SuppressionStatus::stalled;
      break;
    }

    double eta = scfg.step;
    bool accepted = false;
    for (int halving = 0; halving < 30; ++halving) {
      NetworkModel trial = out.model;
      for (std::size_t k = 0; k < slots.size(); ++k)
        set_slot(trial, slots[k], i, get_slot(out.model, slots[k], i) - eta * grad[k]);
      const double r_new = eval_r(trial);
      if (r_new < r_cur) {
        out.model = std::move(trial);
        r_cur = r_new;
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) {
      out.status = SuppressionStatus::stalled;
      break;
    }
    out.trace.push_back({iter, r_cur, eval_acc(out.model)});
    if (r_cur <= scfg.epsilon) {
      out.status = SuppressionStatus::converged;
      break;
    }
  }
  return out;
}

const char* to_string(SuppressionStatus s) {
  switch (s) {
    case SuppressionStatus::already_converged: return "already_converged";
    case SuppressionStatus::converged: return "converged";
    case SuppressionStatus::stalled: return "stalled";
    case SuppressionStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

std::string format_suppression_trace(const SuppressionOutcome& outcome) {
  std::string out = "iter,r,accuracy\n";
  char buf[96];
  for (const auto& row : outcome.trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", row.iter, row.r, row.accuracy);
    out += buf;
  }
  return out;
}

}  // namespace apcalc
