#include "bayesbench/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace bayesbench {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, out);
  if (ec != std::errc() || ptr != e) return false;
  return std::isfinite(out);
}

} // namespace

void LabeledDataset::validate() const {
  if (labels.empty() || points.rows() == 0)
    throw ValidationError("dataset is empty");
  if (points.rows() != labels.size())
    throw ValidationError("points/labels size mismatch");
  if (points.cols() == 0) throw ValidationError("dataset has zero features");
  if (num_classes < 1) throw ValidationError("num_classes must be >= 1");
  std::vector<bool> seen(static_cast<std::size_t>(num_classes), false);
  for (int l : labels) {
    if (l < 1 || l > num_classes)
      throw ValidationError("label out of range 1..num_classes");
    seen[static_cast<std::size_t>(l - 1)] = true;
  }
  for (bool s : seen)
    if (!s) throw ValidationError("some class id has no samples");
  for (double v : points.data())
    if (!std::isfinite(v)) throw ValidationError("points contain NaN/Inf");
}

LabeledDataset load_csv(const std::string& path, const std::string& label_selector) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty CSV: " + path);
  const auto header = split_csv_line(line);
  if (header.empty()) throw ValidationError("empty CSV header: " + path);

  int label_col = -1;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == label_selector) label_col = static_cast<int>(j);
  if (label_col < 0) {
    int idx = -1;
    auto [ptr, ec] = std::from_chars(label_selector.data(),
                                     label_selector.data() + label_selector.size(), idx);
    if (ec == std::errc() && ptr == label_selector.data() + label_selector.size() &&
        idx >= 0 && idx < static_cast<int>(header.size()))
      label_col = idx;
  }
  if (label_col < 0)
    throw ValidationError("label column '" + label_selector + "' not found in " + path);

  const std::size_t d = header.size() - 1;
  if (d == 0) throw ValidationError("CSV has no feature columns: " + path);

  std::vector<double> values;
  std::vector<std::string> raw_labels;
  std::size_t row_no = 1; // header is row 1
  while (std::getline(in, line)) {
    ++row_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ValidationError("row " + std::to_string(row_no) + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (static_cast<int>(j) == label_col) {
        raw_labels.push_back(cells[j]);
      } else {
        double v = 0.0;
        if (!parse_double(cells[j], v))
          throw ValidationError("row " + std::to_string(row_no) + ", column '" +
                                header[j] + "': non-numeric or non-finite cell '" +
                                cells[j] + "'");
        values.push_back(v);
      }
    }
  }
  if (raw_labels.empty()) throw ValidationError("CSV has no data rows: " + path);

  // first-appearance label mapping
  std::map<std::string, int> ids;
  std::vector<std::pair<std::string, int>> label_map;
  std::vector<int> labels;
  labels.reserve(raw_labels.size());
  for (const auto& s : raw_labels) {
    auto it = ids.find(s);
    if (it == ids.end()) {
      const int id = static_cast<int>(ids.size()) + 1;
      ids.emplace(s, id);
      label_map.emplace_back(s, id);
      labels.push_back(id);
    } else {
      labels.push_back(it->second);
    }
  }
  if (ids.size() < 2)
    throw ValidationError("fewer than 2 classes in label column of " + path);

  const std::size_t n = raw_labels.size();
  Matrix pts(n, d);
  std::copy(values.begin(), values.end(), pts.row(0).data());

  LabeledDataset ds;
  ds.points = std::move(pts);
  ds.labels = std::move(labels);
  ds.num_classes = static_cast<int>(ids.size());
  ds.label_map = std::move(label_map);
  ds.feature_names.reserve(d);
  for (std::size_t j = 0; j < header.size(); ++j)
    if (static_cast<int>(j) != label_col) ds.feature_names.push_back(header[j]);
  ds.validate();
  return ds;
}

LabeledDataset make_dataset(Matrix points, std::vector<int> labels) {
  LabeledDataset ds;
  ds.points = std::move(points);
  ds.labels = std::move(labels);
  int max_label = 0;
  for (int l : ds.labels) max_label = std::max(max_label, l);
  ds.num_classes = max_label;
  for (int i = 1; i <= max_label; ++i)
    ds.label_map.emplace_back(std::to_string(i), i);
  ds.validate();
  return ds;
}

ClassPartition partition_by_class(const LabeledDataset& ds) {
  ClassPartition part;
  part.dim = ds.dim();
  part.rows.resize(static_cast<std::size_t>(ds.num_classes));
  for (std::size_t i = 0; i < ds.size(); ++i)
    part.rows[static_cast<std::size_t>(ds.labels[i] - 1)].push_back(i);
  part.class_points.reserve(part.rows.size());
  for (const auto& idx : part.rows) {
    Matrix m(idx.size(), ds.dim());
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < ds.dim(); ++c) m(r, c) = ds.points(idx[r], c);
    part.class_points.push_back(std::move(m));
  }
  return part;
}

PriorEstimate estimate_priors(const ClassPartition& part) {
  PriorEstimate pr;
  const double n = static_cast<double>(part.total());
  for (const auto& m : part.class_points)
    pr.p.push_back(static_cast<double>(m.rows()) / n);
  return pr;
}

std::pair<LabeledDataset, StandardizationParams> standardize(const LabeledDataset& ds) {
  const std::size_t n = ds.size();
  const std::size_t d = ds.dim();
  if (n < 2) throw ValidationError("standardize requires N >= 2");

  StandardizationParams params;
  params.mean.assign(d, 0.0);
  params.scale.assign(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += ds.points(i, j);
    params.mean[j] = s / static_cast<double>(n);
  }
  for (std::size_t j = 0; j < d; ++j) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dev = ds.points(i, j) - params.mean[j];
      ss += dev * dev;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    params.scale[j] = sd > 0.0 ? sd : 1.0;
  }

  LabeledDataset out = ds;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      out.points(i, j) = (ds.points(i, j) - params.mean[j]) / params.scale[j];
  return {std::move(out), std::move(params)};
}

Matrix unstandardize(const Matrix& pts, const StandardizationParams& params) {
  Matrix out(pts.rows(), pts.cols());
  for (std::size_t i = 0; i < pts.rows(); ++i)
    for (std::size_t j = 0; j < pts.cols(); ++j)
      out(i, j) = pts(i, j) * params.scale[j] + params.mean[j];
  return out;
}

LabeledDataset select_features(const LabeledDataset& ds, std::span<const int> features) {
  if (features.empty()) throw ValidationError("select_features: empty feature set");
  Matrix m(ds.size(), features.size());
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (std::size_t j = 0; j < features.size(); ++j) {
      const int f = features[j];
      if (f < 0 || f >= static_cast<int>(ds.dim()))
        throw ValidationError("feature index out of range: " + std::to_string(f));
      m(i, j) = ds.points(i, static_cast<std::size_t>(f));
    }
  LabeledDataset out;
  out.points = std::move(m);
  out.labels = ds.labels;
  out.num_classes = ds.num_classes;
  out.label_map = ds.label_map;
  for (int f : features)
    out.feature_names.push_back(
        ds.feature_names.empty() ? ("f" + std::to_string(f))
                                 : ds.feature_names[static_cast<std::size_t>(f)]);
  return out;
}

} // namespace bayesbench
