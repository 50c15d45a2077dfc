#include "bayesbench/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bayesbench {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

namespace {
// Relative slack on box bound tests; keeps the conservative box pruning
// conservative under rounding. Leaf points are always tested exactly.
constexpr double kBoxMargin = 1e-12;
} // namespace

SpatialIndex::SpatialIndex(const Matrix& points, std::span<const int> labels,
                           int num_classes)
    : n_(points.rows()), d_(points.cols()), num_classes_(num_classes) {
  if (n_ == 0) throw ValidationError("SpatialIndex: empty point set");
  if (labels.size() != n_) throw ValidationError("SpatialIndex: labels size mismatch");

  order_.resize(n_);
  std::iota(order_.begin(), order_.end(), 0u);

  // temporary copies in original order; build() reorders order_, then we bake
  // the reordered rows into pts_/cls_ for cache-friendly leaf scans.
  pts_.assign(points.data().begin(), points.data().end());
  cls_.assign(labels.begin(), labels.end());

  nodes_.reserve(2 * (n_ / kLeafSize + 1));
  build(0, static_cast<std::uint32_t>(n_));

  std::vector<double> reordered(n_ * d_);
  std::vector<int> recls(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::uint32_t src = order_[i];
    recls[i] = cls_[src];
    for (std::size_t j = 0; j < d_; ++j) reordered[i * d_ + j] = pts_[src * d_ + j];
  }
  pts_ = std::move(reordered);
  cls_ = std::move(recls);

  node_class_counts_.assign(nodes_.size() * static_cast<std::size_t>(num_classes_), 0);
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const Node& nd = nodes_[id];
    if (nd.left < 0) {
      for (std::uint32_t i = nd.begin; i < nd.end; ++i)
        ++node_class_counts_[id * static_cast<std::size_t>(num_classes_) +
                             static_cast<std::size_t>(cls_[i] - 1)];
    }
  }
  // accumulate leaf counts upward; children are created after their parent,
  // so a reverse id pass sees both children before the parent
  for (std::size_t id = nodes_.size(); id-- > 0;) {
    const Node& nd = nodes_[id];
    if (nd.left >= 0) {
      for (int c = 0; c < num_classes_; ++c)
        node_class_counts_[id * static_cast<std::size_t>(num_classes_) + c] =
            node_class_counts_[static_cast<std::size_t>(nd.left) * num_classes_ + c] +
            node_class_counts_[static_cast<std::size_t>(nd.right) * num_classes_ + c];
    }
  }
}

SpatialIndex::SpatialIndex(const ClassPartition& part)
    : SpatialIndex(
          [&part] {
            Matrix m(part.total(), part.dim);
            std::size_t r = 0;
            for (const auto& cp : part.class_points)
              for (std::size_t i = 0; i < cp.rows(); ++i, ++r)
                for (std::size_t j = 0; j < part.dim; ++j) m(r, j) = cp(i, j);
            return m;
          }(),
          [&part] {
            std::vector<int> l;
            l.reserve(part.total());
            for (int c = 1; c <= part.num_classes(); ++c)
              l.insert(l.end(), part.count(c), c);
            return l;
          }(),
          part.num_classes()) {}

std::int32_t SpatialIndex::build(std::uint32_t begin, std::uint32_t end) {
  const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  {
    Node& nd = nodes_.back();
    nd.begin = begin;
    nd.end = end;
    nd.box_lo.assign(d_, std::numeric_limits<double>::infinity());
    nd.box_hi.assign(d_, -std::numeric_limits<double>::infinity());
    for (std::uint32_t i = begin; i < end; ++i) {
      const double* p = pts_.data() + static_cast<std::size_t>(order_[i]) * d_;
      for (std::size_t j = 0; j < d_; ++j) {
        nd.box_lo[j] = std::min(nd.box_lo[j], p[j]);
        nd.box_hi[j] = std::max(nd.box_hi[j], p[j]);
      }
    }
  }
  if (end - begin <= kLeafSize) return id;

  // split widest extent at the median
  std::size_t axis = 0;
  double width = -1.0;
  for (std::size_t j = 0; j < d_; ++j) {
    const double w = nodes_[id].box_hi[j] - nodes_[id].box_lo[j];
    if (w > width) {
      width = w;
      axis = j;
    }
  }
  if (width <= 0.0) return id; // all points identical: keep as leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return pts_[a * d_ + axis] < pts_[b * d_ + axis];
                   });
  const std::int32_t l = build(begin, mid);
  const std::int32_t r = build(mid, end);
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

void SpatialIndex::query(std::int32_t node_id, std::span<const double> center,
                         std::span<const double> radii_sq, std::size_t jmax,
                         std::int64_t* out) const {
  const Node& nd = nodes_[static_cast<std::size_t>(node_id)];

  double min_sq = 0.0, max_sq = 0.0;
  for (std::size_t j = 0; j < d_; ++j) {
    const double c = center[j];
    const double lo = nd.box_lo[j] - c;
    const double hi = nd.box_hi[j] - c;
    const double below = std::max(0.0, nd.box_lo[j] - c);
    const double above = std::max(0.0, c - nd.box_hi[j]);
    const double m = std::max(below, above);
    min_sq += m * m;
    max_sq += std::max(lo * lo, hi * hi);
  }

  if (min_sq > radii_sq[jmax - 1] * (1.0 + kBoxMargin)) return;

  // whole subtree inside the j-th ball onward
  std::size_t j_in = jmax;
  while (j_in > 0 && max_sq < radii_sq[j_in - 1] * (1.0 - kBoxMargin)) --j_in;
  if (j_in < jmax) {
    const std::int64_t* cc =
        node_class_counts_.data() + static_cast<std::size_t>(node_id) * num_classes_;
    for (std::size_t l = j_in; l < jmax; ++l)
      for (int c = 0; c < num_classes_; ++c) out[l * num_classes_ + c] += cc[c];
    jmax = j_in;
    if (jmax == 0) return;
  }

  if (nd.left >= 0) {
    query(nd.left, center, radii_sq, jmax, out);
    query(nd.right, center, radii_sq, jmax, out);
    return;
  }
  for (std::uint32_t i = nd.begin; i < nd.end; ++i) {
    const double dist_sq =
        squared_distance({pts_.data() + static_cast<std::size_t>(i) * d_, d_}, center);
    for (std::size_t l = 0; l < jmax; ++l) {
      if (dist_sq <= radii_sq[l]) {
        const int c = cls_[i] - 1;
        for (std::size_t k = l; k < jmax; ++k) ++out[k * num_classes_ + c];
        break;
      }
    }
  }
}

std::vector<std::int64_t> SpatialIndex::count_within(std::span<const double> center,
                                                     double radius) const {
  const double radii[1] = {radius};
  auto multi = count_within_multi(center, radii);
  return multi;
}

std::vector<std::int64_t> SpatialIndex::count_within_multi(
    std::span<const double> center, std::span<const double> radii) const {
  if (radii.empty()) return {};
  if (center.size() != d_) throw ValidationError("count_within: bad center dimension");
  for (double r : radii)
    if (!(r >= 0.0)) throw ValidationError("count_within: radius must be >= 0");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (radii[i] < radii[i - 1])
      throw ValidationError("count_within_multi: radii must be ascending");
  for (double c : center)
    if (!std::isfinite(c)) throw ValidationError("count_within: center must be finite");

  std::vector<double> radii_sq(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) radii_sq[i] = radii[i] * radii[i];

  std::vector<std::int64_t> out(radii.size() * static_cast<std::size_t>(num_classes_), 0);
  query(0, center, radii_sq, radii.size(), out.data());
  return out;
}

std::vector<std::int64_t> brute_force_counts(const Matrix& points,
                                             std::span<const int> labels,
                                             int num_classes,
                                             std::span<const double> center,
                                             double radius) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(num_classes), 0);
  const double r_sq = radius * radius;
  for (std::size_t i = 0; i < points.rows(); ++i)
    if (squared_distance(points.row(i), center) <= r_sq)
      ++counts[static_cast<std::size_t>(labels[i] - 1)];
  return counts;
}

double knn_distance_scale(const Matrix& points, std::size_t k) {
  const std::size_t n = points.rows();
  if (n < 2) throw ValidationError("knn_distance_scale: need at least 2 points");
  k = std::clamp<std::size_t>(k, 1, n - 1);

  const std::size_t anchors = std::min<std::size_t>(n, 256);
  const std::size_t stride = std::max<std::size_t>(1, n / anchors);

  std::vector<double> kth;
  std::vector<double> dist(n);
  for (std::size_t a = 0; a < n && kth.size() < anchors; a += stride) {
    for (std::size_t i = 0; i < n; ++i)
      dist[i] = squared_distance(points.row(i), points.row(a));
    // k-th neighbor = (k+1)-th smallest including the self distance 0
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                     dist.end());
    kth.push_back(std::sqrt(dist[k]));
  }
  std::sort(kth.begin(), kth.end());
  const double r = kth[kth.size() / 2];
  return r > 0.0 ? r : 1.0;
}

} // namespace bayesbench
