#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bayesbench {

// Row-major N x d matrix of doubles.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }

  const std::vector<double>& data() const { return data_; }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Labeled sample set. Labels are contiguous ids 1..num_classes; the original
// label strings (when loaded from CSV) are kept in label_map in id order.
struct LabeledDataset {
  Matrix points;
  std::vector<int> labels; // values in 1..num_classes
  int num_classes = 0;
  std::vector<std::string> feature_names;                 // may be empty
  std::vector<std::pair<std::string, int>> label_map;     // original -> id

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return points.cols(); }

  void validate() const; // throws ValidationError on broken invariants
};

// Per-class views of a dataset; rows keep their original order.
struct ClassPartition {
  std::vector<Matrix> class_points;            // one matrix per class
  std::vector<std::vector<std::size_t>> rows;  // original row indices
  std::size_t dim = 0;

  int num_classes() const { return static_cast<int>(class_points.size()); }
  std::size_t count(int cls) const { return class_points[cls - 1].rows(); }
  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& m : class_points) n += m.rows();
    return n;
  }
};

struct PriorEstimate {
  std::vector<double> p; // p[i] = N_{i+1} / N
};

struct StandardizationParams {
  std::vector<double> mean;
  std::vector<double> scale; // sample std (divisor N-1), 1 for constant features
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// CSV ingestion. The label column is selected by header name; if no header
// matches and the selector parses as an integer, it is taken as a 0-based
// column index. Labels are remapped to 1..num_classes in order of first
// appearance; all remaining columns must be finite numerics.
LabeledDataset load_csv(const std::string& path, const std::string& label_selector);

LabeledDataset make_dataset(Matrix points, std::vector<int> labels);

ClassPartition partition_by_class(const LabeledDataset& ds);

PriorEstimate estimate_priors(const ClassPartition& part);

std::pair<LabeledDataset, StandardizationParams> standardize(const LabeledDataset& ds);

// Inverse of standardize() applied to a point matrix.
Matrix unstandardize(const Matrix& pts, const StandardizationParams& params);

// Column subset (for feature selection); indices are 0-based.
LabeledDataset select_features(const LabeledDataset& ds, std::span<const int> features);

} // namespace bayesbench
