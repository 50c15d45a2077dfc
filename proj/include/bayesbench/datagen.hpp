#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bayesbench/dataset.hpp"

namespace bayesbench {

enum class Family { gaussian_shift, rayleigh, beta, concentric };

Family family_from_string(const std::string& s);
std::string to_string(Family f);

// A synthetic distribution with evaluable class densities, so the true Bayes
// error is available as an oracle.
struct DistributionSpec {
  Family family = Family::gaussian_shift;
  int dim = 1;
  int num_classes = 2;
  std::vector<double> priors; // empty: uniform

  // gaussian_shift: class i has mean shift_i along the first axis, sd sigma
  std::vector<double> shifts;
  double sigma = 1.0;
  // rayleigh: coordinate-wise iid Rayleigh with per-class scale
  std::vector<double> rayleigh_scale;
  // beta: coordinate-wise iid Beta with per-class shape pair
  std::vector<std::pair<double, double>> beta_shapes;
  // concentric: standard Gaussian split into equal-probability radial shells
  // (num_classes shells); no extra parameters.

  std::uint64_t seed = 0;

  void validate() const;
  std::vector<double> resolved_priors() const;
};

DistributionSpec gaussian_shift_spec(int dim, double delta, double sigma,
                                     int num_classes, std::uint64_t seed);
DistributionSpec rayleigh_spec(int dim, std::vector<double> scales, std::uint64_t seed);
DistributionSpec beta_spec(int dim, std::vector<std::pair<double, double>> shapes,
                           std::uint64_t seed);
DistributionSpec concentric_spec(int dim, int num_classes, std::uint64_t seed);

struct OracleResult {
  double bayes_error = 0.0;
  std::string method; // "analytic" | "monte_carlo"
  std::int64_t mc_samples = 0;
  double std_error = 0.0;
};

// Deterministic given spec.seed; n_per_class[i] samples with label i+1.
LabeledDataset generate(const DistributionSpec& spec,
                        const std::vector<std::int64_t>& n_per_class);

// Class-conditional log density.
double log_density(const DistributionSpec& spec, int cls, std::span<const double> x);

// Binary Gaussian likelihood-ratio error: equal priors Phi(-delta/(2 sigma)),
// general priors via the 1-D threshold along the mean-difference axis.
OracleResult analytic_gaussian_bayes_error(double delta, double sigma, double p1,
                                           double p2);

// 1 - E[max_i p_i f_i(X) / sum_j p_j f_j(X)] over the mixture, by sampling.
OracleResult mc_bayes_error_oracle(const DistributionSpec& spec, std::int64_t n_mc,
                                   std::uint64_t seed);

// Oracle dispatch used by the experiment harness: analytic for the binary
// Gaussian family, Monte-Carlo otherwise.
OracleResult bayes_error_oracle(const DistributionSpec& spec, std::int64_t n_mc,
                                std::uint64_t seed);

} // namespace bayesbench
