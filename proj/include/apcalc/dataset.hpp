#pragma once
// Tabular feature data with optional 1-based labels. CSV format:
//   f1,...,fn[,label]
// Decimal separator is '.' regardless of locale; parsing is strict and any
// non-finite value is rejected.

#include <cstddef>
#include <string>
#include <vector>

namespace apcalc {

struct Dataset {
  std::size_t n = 0;                // features per row
  bool has_labels = false;
  std::vector<double> features;    // rows * n, row-major
  std::vector<int> labels;         // 1-based when present

  std::size_t rows() const { return n == 0 ? 0 : features.size() / n; }
  const double* row(std::size_t r) const { return features.data() + r * n; }
  double at(std::size_t r, std::size_t i) const { return features[r * n + i]; }
};

Dataset read_dataset_csv(const std::string& path);
Dataset parse_dataset_csv(const std::string& text);
std::string format_dataset_csv(const Dataset& d);
void write_dataset_csv(const std::string& path, const Dataset& d);

// Mediator values recorded alongside sampled rows; used by the
// information-gain estimator. values is rows * total_dims, row-major, where
// mediator j occupies [offset[j], offset[j] + dims[j]).
struct MediatorTrace {
  std::vector<int> dims;
  std::vector<std::size_t> offsets;
  std::size_t total_dims = 0;
  std::vector<double> values;

  const double* row(std::size_t r) const { return values.data() + r * total_dims; }
  double at(std::size_t r, int j, int coord) const {
    return values[r * total_dims + offsets[j] + static_cast<std::size_t>(coord)];
  }
};

struct TracedDataset {
  Dataset data;
  MediatorTrace trace;
};

std::string format_trace_csv(const MediatorTrace& t);
MediatorTrace parse_trace_csv(const std::string& text);

}  // namespace apcalc
