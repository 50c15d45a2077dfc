#pragma once

#include <cstdint>
#include <vector>

#include "bayesbench/chebyshev.hpp"
#include "bayesbench/dataset.hpp"
#include "bayesbench/geometry.hpp"

namespace bayesbench {

// Density bound ratio interval [C_L/C_U, C_U/C_L]; estimates are clamped into
// it before entering the divergence function.
struct ClipBounds {
  double ratio_lo = 1e-3;
  double ratio_hi = 1e3;

  static ClipBounds from_lo(double lo);
  double clamp(double x) const {
    return x < ratio_lo ? ratio_lo : (x > ratio_hi ? ratio_hi : x);
  }
  bool clips(double x) const { return x < ratio_lo || x > ratio_hi; }
};

// Radii eps_l = xi_l * n_basis^(-1/(2 dim)).
struct BandwidthSchedule {
  NodeSet nodes;
  std::int64_t n_basis = 0;
  int dim = 0;

  std::size_t size() const { return nodes.nodes.size(); }
  std::vector<double> radii() const;
};

BandwidthSchedule make_schedule(NodeSet nodes, std::int64_t n_basis, int dim);

struct DensityRatioEstimate {
  std::vector<double> values; // one per query point, >= 0
  int num_class = 0;
  int den_class = 0;
  std::int64_t clamped = 0; // entries touched by clip_ratio
};

// Ratio estimates at every class-b point: (N_b/N_a) * count_a / count_b with
// the query point included in its own class count, so the denominator is
// always >= 1.
DensityRatioEstimate eps_ball_ratio(const SpatialIndex& idx, const Matrix& queries,
                                    int num_class, int den_class, double radius,
                                    std::int64_t n_num, std::int64_t n_den);

// All schedule radii at once; result is queries.rows() x L, row-major.
// Requires ascending radii internally (handled here), output follows the
// schedule's node order.
std::vector<double> ratio_table(const SpatialIndex& idx, const Matrix& queries,
                                int num_class, int den_class,
                                const std::vector<double>& radii, std::int64_t n_num,
                                std::int64_t n_den, int threads);

// U^w_i = sum_l w_l U_i^(l); negative combinations floored at zero.
DensityRatioEstimate ensemble_ratio(const std::vector<DensityRatioEstimate>& base,
                                    const WeightVector& w);

std::vector<double> combine_table(const std::vector<double>& table, std::size_t n_rows,
                                  const WeightVector& w);

DensityRatioEstimate clip_ratio(DensityRatioEstimate est, const ClipBounds& bounds);

} // namespace bayesbench
