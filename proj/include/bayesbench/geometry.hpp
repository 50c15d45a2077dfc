#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bayesbench/dataset.hpp"

namespace bayesbench {

// Exact fixed-radius counting of points per class, boundary inclusive
// (||x - c|| <= r). Backed by a kd-tree with per-subtree class totals so a
// single traversal can answer several nested radii at once. Queries are
// read-only and safe to issue from many threads.
class SpatialIndex {
public:
  SpatialIndex(const Matrix& points, std::span<const int> labels, int num_classes);

  explicit SpatialIndex(const ClassPartition& part);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }
  int num_classes() const { return num_classes_; }

  // counts[c-1] = #{x in class c : ||x - center|| <= radius}
  std::vector<std::int64_t> count_within(std::span<const double> center,
                                         double radius) const;

  // radii must be ascending; result is radii.size() x num_classes, flattened
  // as out[l * num_classes + (c-1)].
  std::vector<std::int64_t> count_within_multi(std::span<const double> center,
                                               std::span<const double> radii) const;

private:
  struct Node {
    std::vector<double> box_lo, box_hi;
    std::uint32_t begin = 0, end = 0; // leaf range into order_
    std::int32_t left = -1, right = -1;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void query(std::int32_t node_id, std::span<const double> center,
             std::span<const double> radii_sq, std::size_t jmax,
             std::int64_t* out) const;

  std::size_t n_ = 0, d_ = 0;
  int num_classes_ = 0;
  std::vector<double> pts_;      // reordered, row-major
  std::vector<int> cls_;         // class id per reordered row
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::vector<std::int64_t> node_class_counts_; // nodes x num_classes
  static constexpr std::uint32_t kLeafSize = 16;
};

// O(N*d) reference oracle with the identical boundary convention.
std::vector<std::int64_t> brute_force_counts(const Matrix& points,
                                             std::span<const int> labels,
                                             int num_classes,
                                             std::span<const double> center,
                                             double radius);

double squared_distance(std::span<const double> a, std::span<const double> b);

// Median k-th-neighbor distance over up to 256 deterministically strided
// anchor points; the length unit behind the adaptive bandwidth scale.
double knn_distance_scale(const Matrix& points, std::size_t k);

} // namespace bayesbench
