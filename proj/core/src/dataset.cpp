#include "corenet/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "corenet/error.hpp"
#include "corenet/rng.hpp"

namespace corenet {

void Dataset::validate() const {
  if (features.rows() != labels.size() || splits.size() != labels.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "Dataset: features, labels and splits disagree");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw Error(ErrorKind::kFormat, "Dataset: label " + std::to_string(labels[i]) +
                                          " at row " + std::to_string(i) +
                                          " outside class count " + std::to_string(num_classes));
    }
  }
  for (double x : features.data()) {
    if (!std::isfinite(x)) throw Error(ErrorKind::kFormat, "Dataset: non-finite feature");
  }
}

std::vector<std::size_t> Dataset::indices_of(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    if (splits[i] == split) out.push_back(i);
  }
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.num_classes = num_classes;
  out.features = DenseMatrix(indices.size(), dim());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto src = point(indices[r]);
    std::copy(src.begin(), src.end(), out.features.row(r).begin());
    out.labels.push_back(labels[indices[r]]);
    out.splits.push_back(splits[indices[r]]);
  }
  return out;
}

void assign_splits(Dataset& data, const SplitFractions& fractions, std::uint64_t seed) {
  const std::size_t n = data.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  RngStream rng(seed, StreamId{.purpose = 0x5b1u});
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  const auto n_train = static_cast<std::size_t>(std::llround(fractions.train * n));
  const auto n_val = static_cast<std::size_t>(std::llround(fractions.validation * n));
  data.splits.assign(n, Split::kTest);
  for (std::size_t k = 0; k < n; ++k) {
    if (k < n_train) {
      data.splits[order[k]] = Split::kTrain;
    } else if (k < n_train + n_val) {
      data.splits[order[k]] = Split::kValidation;
    }
  }
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void csv_error(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::kFormat, "csv line " + std::to_string(line) + ": " + what);
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kNotFound, "dataset not found: " + path.string());
  std::string line;
  if (!std::getline(in, line)) csv_error(1, "missing header");
  const std::size_t columns = split_fields(line).size();
  if (columns < 2) csv_error(1, "need a label column and at least one feature");

  std::vector<double> values;
  Dataset data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != columns) {
      csv_error(line_no, "expected " + std::to_string(columns) + " fields, got " +
                             std::to_string(fields.size()));
    }
    const auto label_text = trim(fields[0]);
    int label = 0;
    const auto [lp, lec] =
        std::from_chars(label_text.data(), label_text.data() + label_text.size(), label);
    if (lec != std::errc() || lp != label_text.data() + label_text.size()) {
      csv_error(line_no, "label is not an integer");
    }
    if (label < 0) csv_error(line_no, "negative label");
    data.labels.push_back(label);
    for (std::size_t f = 1; f < fields.size(); ++f) {
      const auto text = trim(fields[f]);
      double v = 0.0;
      const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || p != text.data() + text.size() || !std::isfinite(v)) {
        csv_error(line_no, "bad feature value '" + std::string(text) + "'");
      }
      values.push_back(v);
    }
  }
  data.features = DenseMatrix(data.labels.size(), columns - 1, std::move(values));
  data.num_classes =
      data.labels.empty() ? 0 : *std::max_element(data.labels.begin(), data.labels.end()) + 1;
  data.splits.assign(data.labels.size(), Split::kTest);
  data.validate();
  return data;
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kNotFound, "cannot write dataset: " + path.string());
  out << "label";
  for (std::size_t j = 0; j < data.dim(); ++j) out << ",f" << j;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.labels[i];
    for (double v : data.point(i)) {
      const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out << ',' << std::string_view(buf, static_cast<std::size_t>(p - buf));
    }
    out << '\n';
  }
}

Dataset make_blobs(std::size_t n, int classes, std::size_t dim, double separation,
                   std::uint64_t seed) {
  if (classes < 2 || dim < 1 || n == 0) {
    throw Error(ErrorKind::kInvalidArgument, "make_blobs: need n >= 1, classes >= 2, dim >= 1");
  }
  RngStream rng(seed, StreamId{.purpose = 0xb10b});
  std::vector<Vector> centers(static_cast<std::size_t>(classes), Vector(dim));
  for (auto& c : centers) {
    double norm = 0.0;
    for (double& x : c) {
      x = rng.normal();
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : c) x *= separation / norm;
  }
  Dataset data;
  data.num_classes = classes;
  data.features = DenseMatrix(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % static_cast<std::size_t>(classes));
    data.labels.push_back(label);
    for (std::size_t j = 0; j < dim; ++j) {
      data.features(i, j) = centers[static_cast<std::size_t>(label)][j] + rng.normal();
    }
  }
  data.splits.assign(n, Split::kTrain);
  assign_splits(data, {}, seed);
  return data;
}

namespace {

// clang-format off
constexpr const char* kGlyphs[10][8] = {
  {"..####..", ".##..##.", ".##..##.", ".##..##.", ".##..##.", ".##..##.", "..####..", "........"},
  {"...##...", "..###...", "...##...", "...##...", "...##...", "...##...", "..####..", "........"},
  {"..####..", ".##..##.", ".....##.", "....##..", "...##...", "..##....", ".######.", "........"},
  {"..####..", ".##..##.", ".....##.", "...###..", ".....##.", ".##..##.", "..####..", "........"},
  {"....##..", "...###..", "..####..", ".##.##..", ".######.", "....##..", "....##..", "........"},
  {".######.", ".##.....", ".#####..", ".....##.", ".....##.", ".##..##.", "..####..", "........"},
  {"..####..", ".##.....", ".#####..", ".##..##.", ".##..##.", ".##..##.", "..####..", "........"},
  {".######.", ".....##.", "....##..", "...##...", "..##....", "..##....", "..##....", "........"},
  {"..####..", ".##..##.", ".##..##.", "..####..", ".##..##.", ".##..##.", "..####..", "........"},
  {"..####..", ".##..##.", ".##..##.", "..#####.", ".....##.", "....##..", "..###...", "........"},
};
// clang-format on

}  // namespace

Dataset make_digits(std::size_t n, std::uint64_t seed, double noise) {
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "make_digits: n must be positive");
  RngStream rng(seed, StreamId{.purpose = 0xd191});
  Dataset data;
  data.num_classes = 10;
  data.features = DenseMatrix(n, 64);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 10);
    data.labels.push_back(label);
    const int dx = static_cast<int>(rng.below(3)) - 1;
    const int dy = static_cast<int>(rng.below(3)) - 1;
    const double ink = 0.7 + 0.3 * rng.uniform();
    for (int r = 0; r < 8; ++r) {
      for (int c = 0; c < 8; ++c) {
        const int sr = r - dy;
        const int sc = c - dx;
        double v = 0.0;
        if (sr >= 0 && sr < 8 && sc >= 0 && sc < 8 && kGlyphs[label][sr][sc] == '#') {
          v = ink + noise * rng.normal();
        }
        data.features(i, static_cast<std::size_t>(r * 8 + c)) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  data.splits.assign(n, Split::kTrain);
  assign_splits(data, {}, seed);
  return data;
}

}  // namespace corenet
