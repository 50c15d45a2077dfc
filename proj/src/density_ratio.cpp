#include "bayesbench/density_ratio.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bayesbench/parallel.hpp"

namespace bayesbench {

ClipBounds ClipBounds::from_lo(double lo) {
  if (!(lo > 0.0) || lo > 1.0)
    throw ValidationError("clip_lo must be in (0, 1]");
  return ClipBounds{lo, 1.0 / lo};
}

std::vector<double> BandwidthSchedule::radii() const {
  std::vector<double> r;
  r.reserve(nodes.nodes.size());
  const double f = std::pow(static_cast<double>(n_basis), -1.0 / (2.0 * dim));
  for (double xi : nodes.nodes) r.push_back(xi * f);
  return r;
}

BandwidthSchedule make_schedule(NodeSet nodes, std::int64_t n_basis, int dim) {
  if (n_basis < 1) throw ValidationError("schedule: n_basis must be >= 1");
  if (dim < 1) throw ValidationError("schedule: dim must be >= 1");
  for (double xi : nodes.nodes)
    if (!(xi > 0.0)) throw ValidationError("schedule: nodes must be > 0");
  BandwidthSchedule s;
  s.nodes = std::move(nodes);
  s.n_basis = n_basis;
  s.dim = dim;
  return s;
}

std::vector<double> ratio_table(const SpatialIndex& idx, const Matrix& queries,
                                int num_class, int den_class,
                                const std::vector<double>& radii, std::int64_t n_num,
                                std::int64_t n_den, int threads) {
  const std::size_t nq = queries.rows();
  const std::size_t L = radii.size();
  const int nc = idx.num_classes();

  // query traversal needs ascending radii; map back to schedule order after
  std::vector<std::size_t> order(L);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return radii[a] < radii[b]; });
  std::vector<double> sorted(L);
  for (std::size_t i = 0; i < L; ++i) sorted[i] = radii[order[i]];

  const double eta = static_cast<double>(n_den) / static_cast<double>(n_num);
  std::vector<double> table(nq * L, 0.0);
  parallel_for(nq, threads, [&](std::size_t q) {
    const auto counts = idx.count_within_multi(queries.row(q), sorted);
    for (std::size_t i = 0; i < L; ++i) {
      const auto ca = counts[i * static_cast<std::size_t>(nc) +
                             static_cast<std::size_t>(num_class - 1)];
      const auto cb = counts[i * static_cast<std::size_t>(nc) +
                             static_cast<std::size_t>(den_class - 1)];
      // self-inclusion guarantees cb >= 1 when queries are class-b members
      table[q * L + order[i]] =
          eta * static_cast<double>(ca) / static_cast<double>(cb);
    }
  });
  return table;
}

DensityRatioEstimate eps_ball_ratio(const SpatialIndex& idx, const Matrix& queries,
                                    int num_class, int den_class, double radius,
                                    std::int64_t n_num, std::int64_t n_den) {
  if (!(radius > 0.0)) throw ValidationError("eps_ball_ratio: radius must be > 0");
  DensityRatioEstimate est;
  est.num_class = num_class;
  est.den_class = den_class;
  est.values = ratio_table(idx, queries, num_class, den_class, {radius}, n_num,
                           n_den, 1);
  return est;
}

std::vector<double> combine_table(const std::vector<double>& table, std::size_t n_rows,
                                  const WeightVector& w) {
  const std::size_t L = w.size();
  if (n_rows * L != table.size())
    throw ValidationError("combine_table: table/weights length mismatch");
  std::vector<double> out(n_rows);
  for (std::size_t q = 0; q < n_rows; ++q) {
    double s = 0.0;
    for (std::size_t l = 0; l < L; ++l) s += w.weights[l] * table[q * L + l];
    out[q] = std::max(s, 0.0);
  }
  return out;
}

DensityRatioEstimate ensemble_ratio(const std::vector<DensityRatioEstimate>& base,
                                    const WeightVector& w) {
  if (base.size() != w.size())
    throw ValidationError("ensemble_ratio: estimates/weights length mismatch");
  if (base.empty()) throw ValidationError("ensemble_ratio: empty ensemble");
  const std::size_t n = base.front().values.size();
  for (const auto& b : base)
    if (b.values.size() != n)
      throw ValidationError("ensemble_ratio: query sets differ in size");

  DensityRatioEstimate out;
  out.num_class = base.front().num_class;
  out.den_class = base.front().den_class;
  out.values.assign(n, 0.0);
  for (std::size_t q = 0; q < n; ++q) {
    double s = 0.0;
    for (std::size_t l = 0; l < base.size(); ++l)
      s += w.weights[l] * base[l].values[q];
    out.values[q] = std::max(s, 0.0);
  }
  return out;
}

DensityRatioEstimate clip_ratio(DensityRatioEstimate est, const ClipBounds& bounds) {
  est.clamped = 0;
  for (double& v : est.values) {
    if (bounds.clips(v)) ++est.clamped;
    v = bounds.clamp(v);
  }
  return est;
}

} // namespace bayesbench
