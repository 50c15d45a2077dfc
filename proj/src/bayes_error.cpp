#include "bayesbench/bayes_error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bayesbench/parallel.hpp"

namespace bayesbench {

namespace {

struct Totals {
  double t_sum = 0.0;
  std::int64_t clamped = 0;
  std::int64_t values = 0;
};

double clamp01(double x, double hi) { return std::clamp(x, 0.0, hi); }

double min_prior(const PriorEstimate& pr) {
  return *std::min_element(pr.p.begin(), pr.p.end());
}
double max_prior(const PriorEstimate& pr) {
  return *std::max_element(pr.p.begin(), pr.p.end());
}

// One query direction: sum of t over the clamped ensemble ratios at the
// denominator-class points.
Totals directional_t_sum(const SpatialIndex& idx, const ClassPartition& part,
                         int num_class, int den_class,
                         const std::vector<double>& radii, const WeightVector& w,
                         const ClipBounds& clip, double p_num, double p_den,
                         int threads) {
  const Matrix& queries = part.class_points[static_cast<std::size_t>(den_class - 1)];
  const auto table =
      ratio_table(idx, queries, num_class, den_class, radii,
                  static_cast<std::int64_t>(part.count(num_class)),
                  static_cast<std::int64_t>(part.count(den_class)), threads);
  auto combined = combine_table(table, queries.rows(), w);

  Totals tot;
  tot.values = static_cast<std::int64_t>(combined.size());
  for (double& u : combined) {
    if (clip.clips(u)) ++tot.clamped;
    u = clip.clamp(u);
    tot.t_sum += divergence_t(u, p_num, p_den);
  }
  return tot;
}

EstimateReport make_report(const char* method, const PriorEstimate& pr,
                           const ClipBounds& clip, const std::vector<double>& radii,
                           int L) {
  EstimateReport rep;
  rep.method = method;
  rep.priors = pr.p;
  rep.clip_lo = clip.ratio_lo;
  rep.radii = radii;
  rep.L = L;
  return rep;
}

void require_binary(const ClassPartition& part, const char* who) {
  if (part.num_classes() != 2)
    throw ValidationError(std::string(who) + ": requires exactly 2 classes");
}

} // namespace

double divergence_t(double x, double p1, double p2) {
  if (!(x >= 0.0)) throw ValidationError("divergence_t: x must be >= 0");
  return std::max(p2 - p1 * x, 0.0) - std::max(p2 - p1, 0.0);
}

double multiclass_t(std::span<const double> xs, std::span<const double> priors,
                    int k) {
  if (k < 2 || k > static_cast<int>(priors.size()))
    throw ValidationError("multiclass_t: class index out of range");
  if (xs.size() != static_cast<std::size_t>(k - 1))
    throw ValidationError("multiclass_t: expected k-1 ratio arguments");
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < k - 1; ++i)
    m = std::max(m, priors[static_cast<std::size_t>(i)] * xs[static_cast<std::size_t>(i)]);
  return std::max(0.0, priors[static_cast<std::size_t>(k - 1)] - m);
}

EstimateReport base_binary_estimate(const ClassPartition& part, double epsilon,
                                    const ClipBounds& clip) {
  require_binary(part, "base_binary_estimate");
  if (!(epsilon > 0.0))
    throw ValidationError("base_binary_estimate: epsilon must be > 0");
  const auto pr = estimate_priors(part);
  const SpatialIndex idx(part);
  const WeightVector one = uniform_weights(1);
  const auto tot = directional_t_sum(idx, part, 1, 2, {epsilon}, one, clip, pr.p[0],
                                     pr.p[1], 1);

  auto rep = make_report("base", pr, clip, {epsilon}, 1);
  const double raw = min_prior(pr) - tot.t_sum / static_cast<double>(part.count(2));
  rep.raw_estimate = raw;
  rep.estimate = clamp01(raw, min_prior(pr));
  rep.clamped_fraction = static_cast<double>(tot.clamped) / tot.values;
  return rep;
}

EstimateReport symmetrized_estimate(const ClassPartition& part, double epsilon,
                                    const ClipBounds& clip) {
  require_binary(part, "symmetrized_estimate");
  if (!(epsilon > 0.0))
    throw ValidationError("symmetrized_estimate: epsilon must be > 0");
  const auto pr = estimate_priors(part);
  const SpatialIndex idx(part);
  const WeightVector one = uniform_weights(1);
  const auto fwd = directional_t_sum(idx, part, 1, 2, {epsilon}, one, clip, pr.p[0],
                                     pr.p[1], 1);
  const auto rev = directional_t_sum(idx, part, 2, 1, {epsilon}, one, clip, pr.p[1],
                                     pr.p[0], 1);

  auto rep = make_report("symmetrized", pr, clip, {epsilon}, 1);
  const double n = static_cast<double>(part.total());
  const double raw = min_prior(pr) - (fwd.t_sum + rev.t_sum) / n;
  rep.raw_estimate = raw;
  rep.estimate = clamp01(raw, min_prior(pr));
  rep.clamped_fraction =
      static_cast<double>(fwd.clamped + rev.clamped) / (fwd.values + rev.values);
  return rep;
}

EstimateReport ensemble_binary_estimate(const ClassPartition& part,
                                        const std::vector<double>& radii,
                                        const WeightVector& w, const ClipBounds& clip,
                                        int threads) {
  require_binary(part, "ensemble_binary_estimate");
  if (radii.size() != w.size())
    throw ValidationError("ensemble_binary_estimate: radii/weights length mismatch");
  const auto pr = estimate_priors(part);
  const SpatialIndex idx(part);
  const auto tot =
      directional_t_sum(idx, part, 1, 2, radii, w, clip, pr.p[0], pr.p[1], threads);

  auto rep = make_report("ensemble", pr, clip, radii, static_cast<int>(w.size()));
  const double raw = min_prior(pr) - tot.t_sum / static_cast<double>(part.count(2));
  rep.raw_estimate = raw;
  rep.estimate = clamp01(raw, min_prior(pr));
  rep.clamped_fraction = static_cast<double>(tot.clamped) / tot.values;
  return rep;
}

EstimateReport ensemble_binary_estimate(const ClassPartition& part,
                                        const BandwidthSchedule& schedule,
                                        const WeightVector& w, const ClipBounds& clip,
                                        int threads) {
  return ensemble_binary_estimate(part, schedule.radii(), w, clip, threads);
}

EstimateReport ensemble_symmetrized_estimate(const ClassPartition& part,
                                             const std::vector<double>& radii_dir12,
                                             const std::vector<double>& radii_dir21,
                                             const WeightVector& w,
                                             const ClipBounds& clip, int threads) {
  require_binary(part, "ensemble_symmetrized_estimate");
  const auto pr = estimate_priors(part);
  const SpatialIndex idx(part);
  const auto fwd = directional_t_sum(idx, part, 1, 2, radii_dir12, w, clip, pr.p[0],
                                     pr.p[1], threads);
  const auto rev = directional_t_sum(idx, part, 2, 1, radii_dir21, w, clip, pr.p[1],
                                     pr.p[0], threads);

  auto rep =
      make_report("ensemble", pr, clip, radii_dir12, static_cast<int>(w.size()));
  const double n1 = static_cast<double>(part.count(1));
  const double n2 = static_cast<double>(part.count(2));
  const double n = n1 + n2;
  const double raw_fwd = min_prior(pr) - fwd.t_sum / n2;
  const double raw_rev = min_prior(pr) - rev.t_sum / n1;
  rep.raw_estimate = (n2 / n) * raw_fwd + (n1 / n) * raw_rev;
  rep.estimate = clamp01(rep.raw_estimate, min_prior(pr));
  rep.clamped_fraction =
      static_cast<double>(fwd.clamped + rev.clamped) / (fwd.values + rev.values);
  return rep;
}

EstimateReport multiclass_estimate(const ClassPartition& part, const NodeSet& nodes,
                                   const WeightVector& w, const ClipBounds& clip,
                                   int threads,
                                   const std::optional<std::vector<double>>& fixed_radii) {
  const int lambda = part.num_classes();
  if (lambda < 2)
    throw ValidationError("multiclass_estimate: requires at least 2 classes");
  if (!fixed_radii && nodes.nodes.size() != w.size())
    throw ValidationError("multiclass_estimate: nodes/weights length mismatch");
  if (fixed_radii && fixed_radii->size() != w.size())
    throw ValidationError("multiclass_estimate: radii/weights length mismatch");

  const auto pr = estimate_priors(part);
  const SpatialIndex idx(part);
  const std::size_t L = w.size();
  const int dim = static_cast<int>(part.dim);

  double outer_sum = 0.0;
  std::int64_t clamped = 0, values = 0;
  std::vector<double> first_radii;

  for (int l = 2; l <= lambda; ++l) {
    const std::int64_t n_l = static_cast<std::int64_t>(part.count(l));
    const std::vector<double> radii =
        fixed_radii ? *fixed_radii : make_schedule(nodes, n_l, dim).radii();
    if (first_radii.empty()) first_radii = radii;

    // ascending copy for the traversal, restored to node order per query
    std::vector<std::size_t> order(L);
    for (std::size_t i = 0; i < L; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return radii[a] < radii[b]; });
    std::vector<double> sorted(L);
    for (std::size_t i = 0; i < L; ++i) sorted[i] = radii[order[i]];

    const Matrix& queries = part.class_points[static_cast<std::size_t>(l - 1)];
    std::vector<double> t_vals(queries.rows(), 0.0);
    std::vector<std::int64_t> clamp_counts(queries.rows(), 0);

    parallel_for(queries.rows(), threads, [&](std::size_t q) {
      const auto counts = idx.count_within_multi(queries.row(q), sorted);
      std::vector<double> xs(static_cast<std::size_t>(l - 1), 0.0);
      for (int j = 1; j < l; ++j) {
        double u = 0.0;
        const double eta = static_cast<double>(n_l) /
                           static_cast<double>(part.count(j));
        for (std::size_t i = 0; i < L; ++i) {
          const auto cj = counts[i * static_cast<std::size_t>(lambda) +
                                 static_cast<std::size_t>(j - 1)];
          const auto cl = counts[i * static_cast<std::size_t>(lambda) +
                                 static_cast<std::size_t>(l - 1)];
          u += w.weights[order[i]] * eta * static_cast<double>(cj) /
               static_cast<double>(cl);
        }
        u = std::max(u, 0.0);
        if (clip.clips(u)) ++clamp_counts[q];
        xs[static_cast<std::size_t>(j - 1)] = clip.clamp(u);
      }
      t_vals[q] = multiclass_t(xs, pr.p, l);
    });

    double t_sum = 0.0;
    for (double v : t_vals) t_sum += v;
    for (auto c : clamp_counts) clamped += c;
    values += static_cast<std::int64_t>(queries.rows()) * (l - 1);
    outer_sum += t_sum / static_cast<double>(n_l);
  }

  auto rep = make_report("multiclass", pr, clip, first_radii, static_cast<int>(L));
  rep.raw_estimate = 1.0 - pr.p[0] - outer_sum;
  rep.estimate = clamp01(rep.raw_estimate, 1.0 - max_prior(pr));
  rep.clamped_fraction =
      values > 0 ? static_cast<double>(clamped) / static_cast<double>(values) : 0.0;
  return rep;
}

double hp_divergence_plugin(const ClassPartition& part,
                            const std::vector<double>& radii_dir12,
                            const std::vector<double>& radii_dir21,
                            const WeightVector& w, const ClipBounds& clip,
                            int threads) {
  require_binary(part, "hp_divergence_plugin");
  const auto pr = estimate_priors(part);
  const double p1 = pr.p[0], p2 = pr.p[1];
  const SpatialIndex idx(part);

  auto direction_mean = [&](int num_class, int den_class,
                            const std::vector<double>& radii, double p_num,
                            double p_den) {
    const Matrix& queries = part.class_points[static_cast<std::size_t>(den_class - 1)];
    const auto table =
        ratio_table(idx, queries, num_class, den_class, radii,
                    static_cast<std::int64_t>(part.count(num_class)),
                    static_cast<std::int64_t>(part.count(den_class)), threads);
    auto combined = combine_table(table, queries.rows(), w);
    double s = 0.0;
    for (double u : combined) {
      const double uc = clip.clamp(u);
      const double num = p_num * uc - p_den;
      const double den = p_num * uc + p_den;
      s += (num * num) / (den * den);
    }
    return s / static_cast<double>(queries.rows());
  };

  const double m2 = direction_mean(1, 2, radii_dir12, p1, p2); // over X2
  const double m1 = direction_mean(2, 1, radii_dir21, p2, p1); // over X1
  const double n1 = static_cast<double>(part.count(1));
  const double n2 = static_cast<double>(part.count(2));
  const double integral = (n2 / (n1 + n2)) * m2 + (n1 / (n1 + n2)) * m1;
  const double d = (integral - (p1 - p2) * (p1 - p2)) / (4.0 * p1 * p2);
  return std::clamp(d, 0.0, 1.0);
}

HpBoundReport hp_bounds(double divergence, double p1, double p2) {
  if (!(divergence >= 0.0 && divergence <= 1.0))
    throw ValidationError("hp_bounds: divergence must be in [0,1]");
  HpBoundReport rep;
  rep.divergence = divergence;
  const double cap = std::min(p1, p2);
  const double disc = 4.0 * p1 * p2 * divergence + (p1 - p2) * (p1 - p2);
  rep.lower = std::clamp(0.5 - std::sqrt(disc), 0.0, cap);
  rep.upper = std::clamp(2.0 * p1 * p2 * (1.0 - divergence), 0.0, cap);
  return rep;
}

// ---- configured pipeline ---------------------------------------------------

Method method_from_string(const std::string& s) {
  if (s == "base") return Method::base;
  if (s == "symmetrized") return Method::symmetrized;
  if (s == "ensemble") return Method::ensemble;
  if (s == "multiclass") return Method::multiclass;
  if (s == "hp") return Method::hp;
  throw ValidationError("unknown method: " + s);
}

WeightScheme scheme_from_string(const std::string& s) {
  if (s == "uniform") return WeightScheme::uniform;
  if (s == "arithmetic") return WeightScheme::arithmetic;
  if (s == "chebyshev") return WeightScheme::chebyshev;
  throw ValidationError("unknown scheme: " + s);
}

std::string to_string(Method m) {
  switch (m) {
    case Method::base: return "base";
    case Method::symmetrized: return "symmetrized";
    case Method::ensemble: return "ensemble";
    case Method::multiclass: return "multiclass";
    case Method::hp: return "hp";
  }
  return "ensemble";
}

std::string to_string(WeightScheme s) {
  switch (s) {
    case WeightScheme::uniform: return "uniform";
    case WeightScheme::arithmetic: return "arithmetic";
    case WeightScheme::chebyshev: return "chebyshev";
  }
  return "chebyshev";
}

double effective_alpha(double alpha, const ClassPartition& part, bool adapt,
                       std::optional<int> knn_k) {
  if (!adapt) return alpha;
  // Pool all classes; the unit is a property of the joint sample.
  Matrix all(part.total(), part.dim);
  std::size_t r = 0;
  for (const auto& cp : part.class_points)
    for (std::size_t i = 0; i < cp.rows(); ++i, ++r)
      for (std::size_t j = 0; j < part.dim; ++j) all(r, j) = cp(i, j);

  const std::size_t n = part.total();
  const std::size_t k =
      knn_k && *knn_k > 0
          ? static_cast<std::size_t>(*knn_k)
          : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  const double unit = knn_distance_scale(all, k);
  // alpha = 0.4 (the default) maps the largest node onto the k-NN radius.
  const double rho = unit *
                     std::pow(static_cast<double>(n), 1.0 / (2.0 * part.dim)) / 0.4;
  return alpha * rho;
}

namespace {

struct ResolvedBandwidths {
  NodeSet nodes;
  WeightVector weights;
  double alpha_eff = 0.0;
  double unit = 1.0;
};

ResolvedBandwidths resolve_bandwidths(const ClassPartition& part,
                                      const EstimatorConfig& cfg) {
  ResolvedBandwidths rb;
  const int dim = static_cast<int>(part.dim);
  const int L = cfg.L > 0 ? cfg.L : dim + 1;
  const int d_constraint = std::min(dim, L - 1);

  rb.alpha_eff = effective_alpha(cfg.alpha, part, cfg.adapt_scale, cfg.knn_k);
  rb.unit = rb.alpha_eff / cfg.alpha;

  switch (cfg.scheme) {
    case WeightScheme::chebyshev:
      rb.nodes = chebyshev_roots(L, rb.alpha_eff);
      rb.weights = chebyshev_weights(L, d_constraint, rb.alpha_eff);
      break;
    case WeightScheme::arithmetic:
      rb.nodes = arithmetic_nodes(L, rb.alpha_eff);
      rb.weights = least_norm_weights(rb.nodes, d_constraint);
      break;
    case WeightScheme::uniform:
      rb.nodes = arithmetic_nodes(L, rb.alpha_eff);
      rb.weights = uniform_weights(L);
      break;
  }
  return rb;
}

} // namespace

EstimateReport run_estimate(const LabeledDataset& ds, const EstimatorConfig& cfg) {
  ds.validate();
  if (!(cfg.alpha > 0.0)) throw ValidationError("alpha must be > 0");
  if (!(cfg.clip_lo > 0.0 && cfg.clip_lo <= 1.0))
    throw ValidationError("clip_lo must be in (0, 1]");
  if (cfg.L < 0) throw ValidationError("L must be >= 1");

  const LabeledDataset* data = &ds;
  LabeledDataset standardized;
  if (cfg.standardize) {
    standardized = standardize(ds).first;
    data = &standardized;
  }
  const auto part = partition_by_class(*data);
  const auto clip = ClipBounds::from_lo(cfg.clip_lo);
  const int threads = cfg.threads;
  const int dim = static_cast<int>(part.dim);

  EstimateReport rep;
  if (cfg.method == Method::base || cfg.method == Method::symmetrized) {
    const double alpha_eff = effective_alpha(cfg.alpha, part, cfg.adapt_scale, cfg.knn_k);
    const double eps =
        cfg.epsilon.value_or(alpha_eff * std::pow(static_cast<double>(part.count(1)),
                                                  -1.0 / (1.0 + dim)));
    rep = cfg.method == Method::base ? base_binary_estimate(part, eps, clip)
                                     : symmetrized_estimate(part, eps, clip);
    rep.alpha_effective = alpha_eff;
    rep.bandwidth_unit = alpha_eff / cfg.alpha;
  } else if (cfg.method == Method::multiclass) {
    if (cfg.epsilon) {
      rep = multiclass_estimate(part, NodeSet{}, uniform_weights(1), clip, threads,
                                std::vector<double>{*cfg.epsilon});
      rep.alpha_effective = cfg.alpha;
    } else {
      const auto rb = resolve_bandwidths(part, cfg);
      rep = multiclass_estimate(part, rb.nodes, rb.weights, clip, threads);
      rep.alpha_effective = rb.alpha_eff;
      rep.bandwidth_unit = rb.unit;
    }
  } else { // ensemble / hp
    if (part.num_classes() != 2)
      throw ValidationError(to_string(cfg.method) +
                            ": requires exactly 2 classes; use method=multiclass");
    std::vector<double> radii12, radii21;
    WeightVector w = uniform_weights(1);
    double alpha_eff = cfg.alpha, unit = 1.0;
    if (cfg.epsilon) {
      radii12 = {*cfg.epsilon};
      radii21 = {*cfg.epsilon};
    } else {
      const auto rb = resolve_bandwidths(part, cfg);
      radii12 = make_schedule(rb.nodes, static_cast<std::int64_t>(part.count(1)), dim)
                    .radii();
      radii21 = make_schedule(rb.nodes, static_cast<std::int64_t>(part.count(2)), dim)
                    .radii();
      w = rb.weights;
      alpha_eff = rb.alpha_eff;
      unit = rb.unit;
    }
    if (cfg.method == Method::hp) {
      rep = cfg.symmetrize
                ? ensemble_symmetrized_estimate(part, radii12, radii21, w, clip, threads)
                : ensemble_binary_estimate(part, radii12, w, clip, threads);
      const double d_hat =
          hp_divergence_plugin(part, radii12, radii21, w, clip, threads);
      const auto pr = estimate_priors(part);
      const auto bounds = hp_bounds(d_hat, pr.p[0], pr.p[1]);
      rep.method = "hp";
      rep.hp_divergence = d_hat;
      rep.hp_lower = bounds.lower;
      rep.hp_upper = bounds.upper;
    } else {
      rep = cfg.symmetrize
                ? ensemble_symmetrized_estimate(part, radii12, radii21, w, clip, threads)
                : ensemble_binary_estimate(part, radii12, w, clip, threads);
    }
    rep.alpha_effective = alpha_eff;
    rep.bandwidth_unit = unit;
  }
  rep.alpha = cfg.alpha;
  return rep;
}

} // namespace bayesbench
