#include "apcalc/dataset.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "apcalc/io.hpp"

namespace apcalc {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw std::runtime_error("bad numeric value '" + s + "' at line " +
                             std::to_string(line_no));
  return v;
}

int parse_label(const std::string& s, std::size_t line_no) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 1)
    throw std::runtime_error("bad label '" + s + "' at line " + std::to_string(line_no));
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v,
                                 std::chars_format::general, 17);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

Dataset parse_dataset_csv(const std::string& text) {
  std::vector<std::string> lines;
  {
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t pos = text.find('\n', start);
      if (pos == std::string::npos) pos = text.size();
      std::string line = text.substr(start, pos - start);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) lines.push_back(std::move(line));
      start = pos + 1;
    }
  }
  if (lines.empty()) throw std::runtime_error("empty dataset file");

  const auto header = split(lines[0], ',');
  Dataset d;
  std::size_t col = 0;
  while (col < header.size() && header[col] == "f" + std::to_string(col + 1)) ++col;
  d.n = col;
  if (d.n == 0) throw std::runtime_error("dataset header must start with f1");
  if (col < header.size()) {
    if (header[col] != "label" || col + 1 != header.size())
      throw std::runtime_error("unexpected dataset header column '" + header[col] + "'");
    d.has_labels = true;
  }

  const std::size_t expect = d.n + (d.has_labels ? 1 : 0);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split(lines[r], ',');
    if (cells.size() != expect)
      throw std::runtime_error("row " + std::to_string(r + 1) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(expect));
    for (std::size_t i = 0; i < d.n; ++i)
      d.features.push_back(parse_double(cells[i], r + 1));
    if (d.has_labels) d.labels.push_back(parse_label(cells[d.n], r + 1));
  }
  return d;
}

Dataset read_dataset_csv(const std::string& path) {
  return parse_dataset_csv(read_file(path));
}

std::string format_dataset_csv(const Dataset& d) {
  std::string out;
  for (std::size_t i = 0; i < d.n; ++i) {
    if (i) out += ',';
    out += "f" + std::to_string(i + 1);
  }
  if (d.has_labels) out += ",label";
  out += '\n';
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t i = 0; i < d.n; ++i) {
      if (i) out += ',';
      out += format_double(d.at(r, i));
    }
    if (d.has_labels) out += "," + std::to_string(d.labels[r]);
    out += '\n';
  }
  return out;
}

void write_dataset_csv(const std::string& path, const Dataset& d) {
  atomic_write_file(path, format_dataset_csv(d));
}

std::string format_trace_csv(const MediatorTrace& t) {
  std::string out;
  bool first = true;
  for (std::size_t j = 0; j < t.dims.size(); ++j)
    for (int c = 0; c < t.dims[j]; ++c) {
      if (!first) out += ',';
      first = false;
      out += "x" + std::to_string(j + 1) + "_" + std::to_string(c + 1);
    }
  out += '\n';
  const std::size_t rows = t.total_dims == 0 ? 0 : t.values.size() / t.total_dims;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < t.total_dims; ++k) {
      if (k) out += ',';
      out += format_double(t.values[r * t.total_dims + k]);
    }
    out += '\n';
  }
  return out;
}

MediatorTrace parse_trace_csv(const std::string& text) {
  MediatorTrace t;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    std::size_t pos = text.find('\n', start);
    if (pos == std::string::npos) pos = text.size();
    std::string line = text.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    start = pos + 1;
    if (line.empty()) continue;
    ++line_no;
    const auto cells = split(line, ',');
    if (line_no == 1) {
      int current = 0, count = 0;
      for (const auto& h : cells) {
        if (h.size() < 4 || h[0] != 'x')
          throw std::runtime_error("bad trace header column '" + h + "'");
        const std::size_t us = h.find('_');
        const int j = std::stoi(h.substr(1, us - 1));
        if (j != current) {
          if (count) t.dims.push_back(count);
          current = j;
          count = 0;
        }
        ++count;
      }
      if (count) t.dims.push_back(count);
      t.offsets.assign(t.dims.size(), 0);
      for (std::size_t j = 1; j < t.dims.size(); ++j)
        t.offsets[j] = t.offsets[j - 1] + static_cast<std::size_t>(t.dims[j - 1]);
      t.total_dims = cells.size();
      continue;
    }
    if (cells.size() != t.total_dims)
      throw std::runtime_error("trace row width mismatch at line " + std::to_string(line_no));
    for (const auto& c : cells) t.values.push_back(parse_double(c, line_no));
  }
  if (line_no == 0) throw std::runtime_error("empty trace file");
  return t;
}

}  // namespace apcalc
