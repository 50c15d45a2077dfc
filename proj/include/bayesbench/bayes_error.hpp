#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bayesbench/chebyshev.hpp"
#include "bayesbench/dataset.hpp"
#include "bayesbench/density_ratio.hpp"

namespace bayesbench {

struct EstimateReport {
  double estimate = 0.0;     // in [0, 1 - max prior]
  double raw_estimate = 0.0; // before the final range clamp
  std::string method;
  std::vector<double> priors;
  int L = 0;
  double alpha = 0.0;          // requested node scale
  double alpha_effective = 0.0; // node scale actually used (see bandwidth_unit)
  double clip_lo = 0.0;
  double clamped_fraction = 0.0;
  double bandwidth_unit = 1.0; // data-driven scale multiplier, 1 when disabled
  std::vector<double> radii;   // radii of the primary query direction
  // HP bounds, filled by the hp method only
  std::optional<double> hp_divergence;
  std::optional<double> hp_lower;
  std::optional<double> hp_upper;
};

struct HpBoundReport {
  double divergence = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// t(x) = max(p2 - p1 x, 0) - max(p2 - p1, 0); convex, non-increasing, t(1)=0.
double divergence_t(double x, double p1, double p2);

// t_k(x_1..x_{k-1}) = max(0, p_k - max_i p_i x_i); xs are the ratios f_i/f_k.
double multiclass_t(std::span<const double> xs, std::span<const double> priors, int k);

// Single-bandwidth estimator over queries X_2 (class 1 as numerator).
EstimateReport base_binary_estimate(const ClassPartition& part, double epsilon,
                                    const ClipBounds& clip);

// (N2/N) E(X1,X2) + (N1/N) E(X2,X1), evaluated in the combined single-sum
// form; the reversed direction swaps class roles and priors.
EstimateReport symmetrized_estimate(const ClassPartition& part, double epsilon,
                                    const ClipBounds& clip);

// Weighted-ensemble estimator; radii follow the node order of the weights.
EstimateReport ensemble_binary_estimate(const ClassPartition& part,
                                        const std::vector<double>& radii,
                                        const WeightVector& w, const ClipBounds& clip,
                                        int threads = 1);

EstimateReport ensemble_binary_estimate(const ClassPartition& part,
                                        const BandwidthSchedule& schedule,
                                        const WeightVector& w, const ClipBounds& clip,
                                        int threads = 1);

// Symmetrized combination of the two directional ensembles; each direction's
// radii are given explicitly (direction 1: queries X2, direction 2: queries X1).
EstimateReport ensemble_symmetrized_estimate(const ClassPartition& part,
                                             const std::vector<double>& radii_dir12,
                                             const std::vector<double>& radii_dir21,
                                             const WeightVector& w,
                                             const ClipBounds& clip, int threads = 1);

// Direct multiclass estimator. Per outer class l the radii are the node set
// scaled by N_l^(-1/(2d)); fixed_radii (paired with w of the same length)
// overrides that schedule for every outer class.
EstimateReport multiclass_estimate(const ClassPartition& part, const NodeSet& nodes,
                                   const WeightVector& w, const ClipBounds& clip,
                                   int threads = 1,
                                   const std::optional<std::vector<double>>& fixed_radii =
                                       std::nullopt);

// Plug-in divergence estimate from clamped ensemble ratios, averaged over both
// query directions weighted by their sample fractions. Result in [0,1].
double hp_divergence_plugin(const ClassPartition& part,
                            const std::vector<double>& radii_dir12,
                            const std::vector<double>& radii_dir21,
                            const WeightVector& w, const ClipBounds& clip,
                            int threads = 1);

// lower = 1/2 - sqrt(4 p1 p2 D + (p1-p2)^2), upper = 2 p1 p2 (1 - D),
// both clamped into [0, min(p1,p2)].
HpBoundReport hp_bounds(double divergence, double p1, double p2);

// ---- configured pipeline -------------------------------------------------

enum class Method { base, symmetrized, ensemble, multiclass, hp };
enum class WeightScheme { uniform, arithmetic, chebyshev };

Method method_from_string(const std::string& s);
WeightScheme scheme_from_string(const std::string& s);
std::string to_string(Method m);
std::string to_string(WeightScheme s);

struct EstimatorConfig {
  Method method = Method::ensemble;
  WeightScheme scheme = WeightScheme::chebyshev;
  int L = 0;            // 0: use dim + 1
  double alpha = 0.4;
  double clip_lo = 1e-3;
  bool standardize = true;
  // Rescale the node range by a k-NN distance unit estimated from the data,
  // so the ball populations match the regime the radii schedule assumes.
  bool adapt_scale = true;
  bool symmetrize = false;            // ensemble direction averaging
  std::optional<double> epsilon;      // fixed-radius override (base/ensemble/multiclass)
  std::optional<int> knn_k;           // neighbor count for the scale unit
  int threads = 0;                    // 0: hardware concurrency
};

// Full pipeline: optional standardization, partition, bandwidth resolution,
// estimator dispatch. The multiclass method accepts any number of classes;
// the binary methods require exactly two.
EstimateReport run_estimate(const LabeledDataset& ds, const EstimatorConfig& cfg);

// The adaptive node scale used by run_estimate: alpha * rho where
// rho = r_k * N_pool^(1/(2 dim)) / 0.4 and r_k is the median k-th neighbor
// distance. Returns alpha unchanged when adapt is off.
double effective_alpha(double alpha, const ClassPartition& part, bool adapt,
                       std::optional<int> knn_k);

} // namespace bayesbench
