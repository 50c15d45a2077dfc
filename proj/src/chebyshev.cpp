#include "bayesbench/chebyshev.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/QR>

#include "bayesbench/dataset.hpp"

namespace bayesbench {

namespace {
constexpr long double kPi = 3.14159265358979323846264338327950288L;

// T_k(y) for k = 0..kmax at a fixed y, long double recurrence.
std::vector<long double> cheb_values(long double y, int kmax) {
  std::vector<long double> t(static_cast<std::size_t>(kmax) + 1);
  t[0] = 1.0L;
  if (kmax >= 1) t[1] = y;
  for (int k = 2; k <= kmax; ++k) t[k] = 2.0L * y * t[k - 1] - t[k - 2];
  return t;
}
} // namespace

std::string to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::chebyshev: return "chebyshev";
    case NodeKind::arithmetic: return "arithmetic";
    case NodeKind::custom: return "custom";
  }
  return "custom";
}

double shifted_chebyshev(int n, double alpha, double x) {
  if (n < 0) throw ValidationError("shifted_chebyshev: n must be >= 0");
  if (!(alpha > 0.0)) throw ValidationError("shifted_chebyshev: alpha must be > 0");
  const double y = 2.0 * x / alpha - 1.0;
  double t0 = 1.0, t1 = y;
  if (n == 0) return t0;
  if (n == 1) return t1;
  for (int k = 2; k <= n; ++k) {
    const double t2 = 2.0 * y * t1 - t0;
    t0 = t1;
    t1 = t2;
  }
  return t1;
}

NodeSet chebyshev_roots(int L, double alpha) {
  if (L < 1) throw ValidationError("chebyshev_roots: L must be >= 1");
  if (!(alpha > 0.0)) throw ValidationError("chebyshev_roots: alpha must be > 0");
  NodeSet ns;
  ns.alpha = alpha;
  ns.kind = NodeKind::chebyshev;
  ns.nodes.resize(static_cast<std::size_t>(L));
  for (int k = 0; k < L; ++k) {
    const long double theta = (static_cast<long double>(k) + 0.5L) * kPi / L;
    ns.nodes[static_cast<std::size_t>(k)] =
        static_cast<double>(0.5L * alpha * std::cos(theta) + 0.5L * alpha);
  }
  return ns;
}

NodeSet arithmetic_nodes(int L, double alpha) {
  if (L < 1) throw ValidationError("arithmetic_nodes: L must be >= 1");
  if (!(alpha > 0.0)) throw ValidationError("arithmetic_nodes: alpha must be > 0");
  NodeSet ns;
  ns.alpha = alpha;
  ns.kind = NodeKind::arithmetic;
  for (int l = 1; l <= L; ++l)
    ns.nodes.push_back(alpha * static_cast<double>(l) / static_cast<double>(L));
  return ns;
}

WeightVector chebyshev_weights(int L, int d, double alpha) {
  if (L < 1) throw ValidationError("chebyshev_weights: L must be >= 1");
  if (d < 0) throw ValidationError("chebyshev_weights: d must be >= 0");
  if (L <= d) throw ValidationError("chebyshev_weights: requires L > d");
  if (!(alpha > 0.0)) throw ValidationError("chebyshev_weights: alpha must be > 0");

  // T^a_k(0) = T_k(-1) = (-1)^k and T^a_k(s_i) = T_k(cos theta_i), so the
  // weights do not depend on alpha.
  WeightVector w;
  w.d_constraint = d;
  w.weights.resize(static_cast<std::size_t>(L));
  for (int i = 0; i < L; ++i) {
    const long double theta = (static_cast<long double>(i) + 0.5L) * kPi / L;
    const auto t = cheb_values(std::cos(theta), d);
    long double acc = 0.0L;
    long double sign = 1.0L;
    for (int k = 0; k <= d; ++k) {
      acc += sign * t[static_cast<std::size_t>(k)];
      sign = -sign;
    }
    w.weights[static_cast<std::size_t>(i)] =
        static_cast<double>(2.0L / L * acc - 1.0L / L);
  }
  return w;
}

WeightVector least_norm_weights(const NodeSet& nodes, int d) {
  const int L = static_cast<int>(nodes.nodes.size());
  if (d < 0) throw ValidationError("least_norm_weights: d must be >= 0");
  if (L <= d) throw ValidationError("least_norm_weights: requires L > d");
  {
    std::set<double> uniq(nodes.nodes.begin(), nodes.nodes.end());
    if (static_cast<int>(uniq.size()) != L)
      throw ValidationError("least_norm_weights: nodes must be distinct");
  }
  for (double x : nodes.nodes)
    if (!(x > 0.0)) throw ValidationError("least_norm_weights: nodes must be > 0");

  using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

  // Constraint rows are powers of the nodes; solve in nodes/alpha to keep the
  // entries within (0,1]. Row scaling does not change the solution set.
  const long double scale =
      nodes.alpha > 0.0 ? static_cast<long double>(nodes.alpha)
                        : static_cast<long double>(
                              *std::max_element(nodes.nodes.begin(), nodes.nodes.end()));
  Mat a(d + 1, L);
  for (int j = 0; j < L; ++j) {
    const long double x = static_cast<long double>(nodes.nodes[static_cast<std::size_t>(j)]) / scale;
    long double p = 1.0L;
    for (int i = 0; i <= d; ++i) {
      a(i, j) = p;
      p *= x;
    }
  }
  Vec b = Vec::Zero(d + 1);
  b(0) = 1.0L;

  Eigen::CompleteOrthogonalDecomposition<Mat> cod(a);
  if (cod.rank() < d + 1)
    throw ValidationError("least_norm_weights: rank-deficient constraint matrix");
  const Vec w = cod.solve(b);

  WeightVector out;
  out.d_constraint = d;
  out.weights.resize(static_cast<std::size_t>(L));
  for (int j = 0; j < L; ++j)
    out.weights[static_cast<std::size_t>(j)] = static_cast<double>(w(j));
  return out;
}

WeightVector uniform_weights(int L) {
  if (L < 1) throw ValidationError("uniform_weights: L must be >= 1");
  WeightVector w;
  w.d_constraint = 0;
  w.weights.assign(static_cast<std::size_t>(L), 1.0 / static_cast<double>(L));
  return w;
}

std::vector<double> moment_residuals(const NodeSet& nodes, const WeightVector& w,
                                     int i_max) {
  if (nodes.nodes.size() != w.size())
    throw ValidationError("moment_residuals: size mismatch");
  std::vector<double> res;
  std::vector<long double> p(nodes.nodes.size(), 1.0L);
  for (int i = 1; i <= i_max; ++i) {
    long double s = 0.0L;
    for (std::size_t j = 0; j < p.size(); ++j) {
      p[j] *= static_cast<long double>(nodes.nodes[j]);
      s += static_cast<long double>(w.weights[j]) * p[j];
    }
    res.push_back(static_cast<double>(std::fabs(s)));
  }
  return res;
}

double l2_norm(const WeightVector& w) {
  long double s = 0.0L;
  for (double x : w.weights) s += static_cast<long double>(x) * x;
  return static_cast<double>(std::sqrt(s));
}

} // namespace bayesbench
