#include "bayesbench/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bayesbench/random.hpp"
#include "bayesbench/stats.hpp"

namespace bayesbench {

namespace {
constexpr double kPi = 3.14159265358979323846;

double log_normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * kPi);
}

double log_rayleigh_pdf(double x, double a) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(x) - 2.0 * std::log(a) - 0.5 * x * x / (a * a);
}

double log_beta_pdf(double x, double a, double b) {
  if (x <= 0.0 || x >= 1.0) return -std::numeric_limits<double>::infinity();
  const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - lbeta;
}

// Equal-probability shell boundaries of the radius of a standard d-Gaussian
// (chi distribution); shell i covers [r_i, r_{i+1}), first closed at 0.
std::vector<double> shell_boundaries(int dim, int num_classes) {
  std::vector<double> bounds;
  bounds.push_back(0.0);
  for (int i = 1; i < num_classes; ++i) {
    const double p = static_cast<double>(i) / num_classes;
    bounds.push_back(std::sqrt(stats::chi2_quantile(p, dim)));
  }
  bounds.push_back(std::numeric_limits<double>::infinity());
  return bounds;
}

int shell_of(std::span<const double> x, const std::vector<double>& bounds) {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  const double r = std::sqrt(r2);
  for (std::size_t i = 1; i < bounds.size(); ++i)
    if (r < bounds[i]) return static_cast<int>(i);
  return static_cast<int>(bounds.size()) - 1;
}
} // namespace

Family family_from_string(const std::string& s) {
  if (s == "gaussian-shift" || s == "gaussian_shift") return Family::gaussian_shift;
  if (s == "rayleigh") return Family::rayleigh;
  if (s == "beta") return Family::beta;
  if (s == "concentric") return Family::concentric;
  throw ValidationError("unknown family: " + s);
}

std::string to_string(Family f) {
  switch (f) {
    case Family::gaussian_shift: return "gaussian-shift";
    case Family::rayleigh: return "rayleigh";
    case Family::beta: return "beta";
    case Family::concentric: return "concentric";
  }
  return "gaussian-shift";
}

void DistributionSpec::validate() const {
  if (dim < 1) throw ValidationError("spec: dim must be >= 1");
  if (num_classes < 2) throw ValidationError("spec: num_classes must be >= 2");
  if (!priors.empty()) {
    if (static_cast<int>(priors.size()) != num_classes)
      throw ValidationError("spec: priors size mismatch");
    double s = 0.0;
    for (double p : priors) {
      if (!(p > 0.0)) throw ValidationError("spec: priors must be > 0");
      s += p;
    }
    if (std::fabs(s - 1.0) > 1e-9)
      throw ValidationError("spec: priors must sum to 1");
  }
  switch (family) {
    case Family::gaussian_shift:
      if (static_cast<int>(shifts.size()) != num_classes)
        throw ValidationError("spec: shifts size mismatch");
      if (!(sigma > 0.0)) throw ValidationError("spec: sigma must be > 0");
      break;
    case Family::rayleigh:
      if (static_cast<int>(rayleigh_scale.size()) != num_classes)
        throw ValidationError("spec: rayleigh scales size mismatch");
      for (double a : rayleigh_scale)
        if (!(a > 0.0)) throw ValidationError("spec: rayleigh scale must be > 0");
      break;
    case Family::beta:
      if (static_cast<int>(beta_shapes.size()) != num_classes)
        throw ValidationError("spec: beta shapes size mismatch");
      for (auto [a, b] : beta_shapes)
        if (!(a > 0.0 && b > 0.0))
          throw ValidationError("spec: beta shape parameters must be > 0");
      break;
    case Family::concentric:
      break;
  }
}

std::vector<double> DistributionSpec::resolved_priors() const {
  if (!priors.empty()) return priors;
  return std::vector<double>(static_cast<std::size_t>(num_classes),
                             1.0 / num_classes);
}

DistributionSpec gaussian_shift_spec(int dim, double delta, double sigma,
                                     int num_classes, std::uint64_t seed) {
  DistributionSpec s;
  s.family = Family::gaussian_shift;
  s.dim = dim;
  s.num_classes = num_classes;
  s.sigma = sigma;
  for (int i = 0; i < num_classes; ++i) s.shifts.push_back(delta * i);
  s.seed = seed;
  s.validate();
  return s;
}

DistributionSpec rayleigh_spec(int dim, std::vector<double> scales, std::uint64_t seed) {
  DistributionSpec s;
  s.family = Family::rayleigh;
  s.dim = dim;
  s.num_classes = static_cast<int>(scales.size());
  s.rayleigh_scale = std::move(scales);
  s.seed = seed;
  s.validate();
  return s;
}

DistributionSpec beta_spec(int dim, std::vector<std::pair<double, double>> shapes,
                           std::uint64_t seed) {
  DistributionSpec s;
  s.family = Family::beta;
  s.dim = dim;
  s.num_classes = static_cast<int>(shapes.size());
  s.beta_shapes = std::move(shapes);
  s.seed = seed;
  s.validate();
  return s;
}

DistributionSpec concentric_spec(int dim, int num_classes, std::uint64_t seed) {
  DistributionSpec s;
  s.family = Family::concentric;
  s.dim = dim;
  s.num_classes = num_classes;
  s.seed = seed;
  s.validate();
  return s;
}

LabeledDataset generate(const DistributionSpec& spec,
                        const std::vector<std::int64_t>& n_per_class) {
  spec.validate();
  if (static_cast<int>(n_per_class.size()) != spec.num_classes)
    throw ValidationError("generate: n_per_class size mismatch");
  for (auto n : n_per_class)
    if (n < 1) throw ValidationError("generate: every class must be nonempty");

  const std::int64_t total = std::accumulate(n_per_class.begin(), n_per_class.end(),
                                             std::int64_t{0});
  Matrix pts(static_cast<std::size_t>(total), static_cast<std::size_t>(spec.dim));
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(total));

  Rng rng = Rng(spec.seed).fork(0x67656e);
  std::size_t row = 0;

  if (spec.family == Family::concentric) {
    // Draw from the base Gaussian and keep until each shell quota is filled.
    const auto bounds = shell_boundaries(spec.dim, spec.num_classes);
    std::vector<std::int64_t> remaining = n_per_class;
    std::int64_t left = total;
    std::vector<double> x(static_cast<std::size_t>(spec.dim));
    while (left > 0) {
      for (auto& v : x) v = rng.normal();
      const int cls = shell_of(x, bounds);
      auto& rem = remaining[static_cast<std::size_t>(cls - 1)];
      if (rem > 0) {
        --rem;
        --left;
        for (std::size_t j = 0; j < x.size(); ++j) pts(row, j) = x[j];
        labels.push_back(cls);
        ++row;
      }
    }
  } else {
    for (int cls = 1; cls <= spec.num_classes; ++cls) {
      const std::size_t ci = static_cast<std::size_t>(cls - 1);
      for (std::int64_t i = 0; i < n_per_class[ci]; ++i, ++row) {
        for (int j = 0; j < spec.dim; ++j) {
          double v = 0.0;
          switch (spec.family) {
            case Family::gaussian_shift:
              v = spec.sigma * rng.normal() + (j == 0 ? spec.shifts[ci] : 0.0);
              break;
            case Family::rayleigh:
              v = rng.rayleigh(spec.rayleigh_scale[ci]);
              break;
            case Family::beta:
              v = rng.beta(spec.beta_shapes[ci].first, spec.beta_shapes[ci].second);
              break;
            case Family::concentric:
              break;
          }
          pts(row, static_cast<std::size_t>(j)) = v;
        }
        labels.push_back(cls);
      }
    }
  }

  return make_dataset(std::move(pts), std::move(labels));
}

double log_density(const DistributionSpec& spec, int cls, std::span<const double> x) {
  if (cls < 1 || cls > spec.num_classes)
    throw ValidationError("log_density: class out of range");
  const std::size_t ci = static_cast<std::size_t>(cls - 1);
  double s = 0.0;
  switch (spec.family) {
    case Family::gaussian_shift:
      for (std::size_t j = 0; j < x.size(); ++j)
        s += log_normal_pdf(x[j], j == 0 ? spec.shifts[ci] : 0.0, spec.sigma);
      return s;
    case Family::rayleigh:
      for (double v : x) s += log_rayleigh_pdf(v, spec.rayleigh_scale[ci]);
      return s;
    case Family::beta:
      for (double v : x)
        s += log_beta_pdf(v, spec.beta_shapes[ci].first, spec.beta_shapes[ci].second);
      return s;
    case Family::concentric: {
      const auto bounds = shell_boundaries(spec.dim, spec.num_classes);
      if (shell_of(x, bounds) != cls)
        return -std::numeric_limits<double>::infinity();
      // standard Gaussian restricted to the shell; shells have mass 1/lambda
      for (double v : x) s += log_normal_pdf(v, 0.0, 1.0);
      return s + std::log(static_cast<double>(spec.num_classes));
    }
  }
  return s;
}

OracleResult analytic_gaussian_bayes_error(double delta, double sigma, double p1,
                                           double p2) {
  if (!(sigma > 0.0)) throw ValidationError("oracle: sigma must be > 0");
  OracleResult res;
  res.method = "analytic";
  delta = std::fabs(delta);
  if (delta == 0.0) {
    res.bayes_error = std::min(p1, p2);
    return res;
  }
  // threshold along the mean-difference axis
  const double x_star = delta / 2.0 + sigma * sigma / delta * std::log(p1 / p2);
  res.bayes_error = p1 * (1.0 - stats::normal_cdf(x_star / sigma)) +
                    p2 * stats::normal_cdf((x_star - delta) / sigma);
  return res;
}

OracleResult mc_bayes_error_oracle(const DistributionSpec& spec, std::int64_t n_mc,
                                   std::uint64_t seed) {
  spec.validate();
  if (n_mc < 1) throw ValidationError("oracle: n_mc must be >= 1");
  const auto pri = spec.resolved_priors();

  DistributionSpec sampler = spec;
  sampler.seed = seed;
  Rng rng = Rng(seed).fork(0x6f7261636c);

  // stratified by class with round-robin remainders keeps the class counts
  // proportional to the priors
  std::vector<std::int64_t> n_class(static_cast<std::size_t>(spec.num_classes), 0);
  for (int c = 0; c < spec.num_classes; ++c)
    n_class[static_cast<std::size_t>(c)] =
        static_cast<std::int64_t>(std::floor(pri[static_cast<std::size_t>(c)] * n_mc));
  std::int64_t assigned = std::accumulate(n_class.begin(), n_class.end(), std::int64_t{0});
  for (int c = 0; assigned < n_mc; c = (c + 1) % spec.num_classes, ++assigned)
    ++n_class[static_cast<std::size_t>(c)];

  // Generate per class and average the posterior of the MAP class. Welford
  // accumulation keeps the variance for the reported standard error.
  double mean = 0.0, m2 = 0.0;
  std::int64_t count = 0;

  std::vector<double> x(static_cast<std::size_t>(spec.dim));
  const auto bounds = spec.family == Family::concentric
                          ? shell_boundaries(spec.dim, spec.num_classes)
                          : std::vector<double>{};

  for (int cls = 1; cls <= spec.num_classes; ++cls) {
    const std::size_t ci = static_cast<std::size_t>(cls - 1);
    for (std::int64_t i = 0; i < n_class[ci]; ++i) {
      switch (spec.family) {
        case Family::gaussian_shift:
          for (int j = 0; j < spec.dim; ++j)
            x[static_cast<std::size_t>(j)] =
                spec.sigma * rng.normal() + (j == 0 ? spec.shifts[ci] : 0.0);
          break;
        case Family::rayleigh:
          for (auto& v : x) v = rng.rayleigh(spec.rayleigh_scale[ci]);
          break;
        case Family::beta:
          for (auto& v : x)
            v = rng.beta(spec.beta_shapes[ci].first, spec.beta_shapes[ci].second);
          break;
        case Family::concentric:
          // conditional sampling: draw Gaussians until inside the class shell
          for (;;) {
            for (auto& v : x) v = rng.normal();
            if (shell_of(x, bounds) == cls) break;
          }
          break;
      }
      double max_lp = -std::numeric_limits<double>::infinity();
      double sum_p = 0.0;
      std::vector<double> lps(static_cast<std::size_t>(spec.num_classes));
      for (int c = 1; c <= spec.num_classes; ++c) {
        const double lp = std::log(pri[static_cast<std::size_t>(c - 1)]) +
                          log_density(spec, c, x);
        lps[static_cast<std::size_t>(c - 1)] = lp;
        max_lp = std::max(max_lp, lp);
      }
      for (double lp : lps) sum_p += std::exp(lp - max_lp);
      const double posterior_max = 1.0 / sum_p; // exp(max - max) / sum
      ++count;
      const double delta1 = posterior_max - mean;
      mean += delta1 / static_cast<double>(count);
      m2 += delta1 * (posterior_max - mean);
    }
  }

  OracleResult res;
  res.method = "monte_carlo";
  res.mc_samples = n_mc;
  res.bayes_error = 1.0 - mean;
  const double var = count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
  res.std_error = std::sqrt(var / static_cast<double>(count));
  return res;
}

OracleResult bayes_error_oracle(const DistributionSpec& spec, std::int64_t n_mc,
                                std::uint64_t seed) {
  if (spec.family == Family::gaussian_shift && spec.num_classes == 2) {
    const auto pri = spec.resolved_priors();
    return analytic_gaussian_bayes_error(spec.shifts[1] - spec.shifts[0], spec.sigma,
                                         pri[0], pri[1]);
  }
  return mc_bayes_error_oracle(spec, n_mc, seed);
}

} // namespace bayesbench
