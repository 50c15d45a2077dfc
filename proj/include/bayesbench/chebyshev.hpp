#pragma once

#include <string>
#include <vector>

namespace bayesbench {

enum class NodeKind { chebyshev, arithmetic, custom };

std::string to_string(NodeKind kind);

// Bandwidth multipliers xi_1..xi_L on (0, alpha] plus their generating scale.
struct NodeSet {
  std::vector<double> nodes;
  double alpha = 0.0;
  NodeKind kind = NodeKind::custom;
};

struct WeightVector {
  std::vector<double> weights;
  int d_constraint = 0; // moment constraints sum(w * xi^i) = 0 hold for i = 1..d_constraint

  std::size_t size() const { return weights.size(); }
};

// T_n(2x/alpha - 1) via the three-term recurrence.
double shifted_chebyshev(int n, double alpha, double x);

// Roots s_k = (alpha/2) cos((k + 1/2) pi / L) + alpha/2, k = 0..L-1
// (descending order).
NodeSet chebyshev_roots(int L, double alpha);

// Equally spaced nodes alpha * l / L, l = 1..L.
NodeSet arithmetic_nodes(int L, double alpha);

// Closed-form minimum-norm weights on the Chebyshev roots:
//   w_i = (2/L) sum_{k=0}^{d} T^a_k(0) T^a_k(s_i) - 1/L
// Requires L > d. Weight values are independent of alpha.
WeightVector chebyshev_weights(int L, int d, double alpha);

// Minimum-Euclidean-norm solution of {sum w = 1, sum w xi^i = 0, i=1..d} for
// arbitrary distinct nodes (rank-revealing orthogonal decomposition; reliable
// for d up to roughly 15 given Vandermonde conditioning).
WeightVector least_norm_weights(const NodeSet& nodes, int d);

WeightVector uniform_weights(int L);

// |sum_l w_l xi_l^i| for i = 1..i_max.
std::vector<double> moment_residuals(const NodeSet& nodes, const WeightVector& w,
                                     int i_max);

double l2_norm(const WeightVector& w);

} // namespace bayesbench
