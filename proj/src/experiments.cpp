#include "bayesbench/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bayesbench/parallel.hpp"
#include "bayesbench/random.hpp"
#include "bayesbench/stats.hpp"

namespace bayesbench {

namespace {

std::uint64_t cell_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                        std::uint64_t c, std::uint64_t d) {
  Rng r(base);
  return r.fork(a).fork(b).fork(c).fork(d).next_u64();
}

double run_on_sample(const DistributionSpec& spec, std::int64_t n_per_class,
                     const EstimatorConfig& cfg, std::uint64_t seed) {
  DistributionSpec s = spec;
  s.seed = seed;
  const std::vector<std::int64_t> n(static_cast<std::size_t>(spec.num_classes),
                                    n_per_class);
  const auto ds = generate(s, n);
  return run_estimate(ds, cfg).estimate;
}

} // namespace

void SweepConfig::validate() const {
  spec.validate();
  if (trials < 1) throw ValidationError("sweep: trials must be >= 1");
  if (sizes.empty()) throw ValidationError("sweep: sizes must be nonempty");
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1])
      throw ValidationError("sweep: sizes must be ascending");
  if (schemes.empty()) throw ValidationError("sweep: schemes must be nonempty");
  if (alphas.empty()) throw ValidationError("sweep: alphas must be nonempty");
}

SweepResult mse_sweep(const SweepConfig& cfg) {
  cfg.validate();
  SweepResult result;
  result.oracle = bayes_error_oracle(cfg.spec, cfg.oracle_mc_samples,
                                     cell_seed(cfg.seed, 0, 0, 0, 0xabc));
  const double truth = result.oracle.bayes_error;

  for (std::size_t si = 0; si < cfg.schemes.size(); ++si) {
    for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
      EstimatorConfig est = cfg.estimator;
      est.scheme = cfg.schemes[si];
      est.alpha = cfg.alphas[ai];
      if (cfg.spec.num_classes > 2) est.method = Method::multiclass;

      for (std::size_t ni = 0; ni < cfg.sizes.size(); ++ni) {
        const std::int64_t n = cfg.sizes[ni];
        std::vector<double> estimates(static_cast<std::size_t>(cfg.trials), 0.0);
        EstimatorConfig trial_cfg = est;
        trial_cfg.threads = 1;
        parallel_for(static_cast<std::size_t>(cfg.trials), cfg.estimator.threads,
                     [&](std::size_t t) {
                       estimates[t] = run_on_sample(
                           cfg.spec, n, trial_cfg,
                           cell_seed(cfg.seed, si, ai, ni, t));
                     });

        CellSummary cell;
        cell.scheme = to_string(cfg.schemes[si]);
        cell.alpha = cfg.alphas[ai];
        cell.n = n;
        cell.oracle = truth;
        double se = 0.0;
        for (int t = 0; t < cfg.trials; ++t) {
          const double e = estimates[static_cast<std::size_t>(t)];
          result.rows.push_back({cell.scheme, cell.alpha, n, t, e, truth});
          cell.mean += e;
          se += (e - truth) * (e - truth);
        }
        cell.mean /= cfg.trials;
        cell.mse = se / cfg.trials;
        std::vector<double> sorted = estimates;
        std::sort(sorted.begin(), sorted.end());
        const auto rank = [&](double q) {
          const std::size_t i = static_cast<std::size_t>(
              std::clamp<double>(std::floor(q * (cfg.trials - 1) + 0.5), 0.0,
                                 cfg.trials - 1.0));
          return sorted[i];
        };
        cell.lo95 = rank(0.025);
        cell.hi95 = rank(0.975);
        result.cells.push_back(cell);
      }
    }
  }
  return result;
}

std::vector<BoundsRow> bounds_comparison(const SweepConfig& cfg) {
  cfg.validate();
  if (cfg.spec.num_classes != 2)
    throw ValidationError("bounds_comparison: requires a binary spec");

  const auto oracle = bayes_error_oracle(cfg.spec, cfg.oracle_mc_samples,
                                         cell_seed(cfg.seed, 1, 0, 0, 0xabc));

  std::vector<BoundsRow> rows;
  for (std::size_t ni = 0; ni < cfg.sizes.size(); ++ni) {
    const std::int64_t n = cfg.sizes[ni];
    struct Trial {
      double est = 0.0, lo = 0.0, hi = 0.0;
    };
    std::vector<Trial> trials(static_cast<std::size_t>(cfg.trials));
    EstimatorConfig est_cfg = cfg.estimator;
    est_cfg.method = Method::hp;
    est_cfg.threads = 1;
    parallel_for(static_cast<std::size_t>(cfg.trials), cfg.estimator.threads,
                 [&](std::size_t t) {
                   DistributionSpec s = cfg.spec;
                   s.seed = cell_seed(cfg.seed, 1, 0, ni, t);
                   const auto ds = generate(
                       s, std::vector<std::int64_t>(2, n));
                   const auto rep = run_estimate(ds, est_cfg);
                   trials[t] = {rep.estimate, rep.hp_lower.value_or(0.0),
                                rep.hp_upper.value_or(0.0)};
                 });

    BoundsRow row;
    row.n = n;
    row.oracle = oracle.bayes_error;
    int inside = 0;
    for (const auto& tr : trials) {
      row.estimate += tr.est;
      row.hp_lower += tr.lo;
      row.hp_upper += tr.hi;
      if (tr.lo <= tr.est && tr.est <= tr.hi) ++inside;
    }
    row.estimate /= cfg.trials;
    row.hp_lower /= cfg.trials;
    row.hp_upper /= cfg.trials;
    row.bracket_fraction = static_cast<double>(inside) / cfg.trials;
    rows.push_back(row);
  }
  return rows;
}

CltResult clt_from_values(std::span<const double> estimates) {
  if (estimates.size() < 100)
    throw ValidationError("clt: need at least 100 trials");
  const double m = stats::mean(estimates);
  const double sd = stats::sample_std(estimates);
  if (!(sd > 1e-14))
    throw ValidationError("clt: degenerate (zero-variance) estimates");

  CltResult res;
  res.standardized.reserve(estimates.size());
  for (double e : estimates) res.standardized.push_back((e - m) / sd);
  res.ks_statistic = stats::ks_statistic_normal(res.standardized);
  res.p_value = stats::ks_pvalue(res.ks_statistic, estimates.size());
  res.pass = res.p_value >= 0.01;
  return res;
}

CltResult clt_diagnostic(const DistributionSpec& spec, std::int64_t n_per_class,
                         int trials, const EstimatorConfig& estimator,
                         std::uint64_t seed) {
  if (trials < 100) throw ValidationError("clt: trials must be >= 100");
  std::vector<double> estimates(static_cast<std::size_t>(trials), 0.0);
  EstimatorConfig trial_cfg = estimator;
  trial_cfg.threads = 1;
  if (spec.num_classes > 2) trial_cfg.method = Method::multiclass;
  parallel_for(static_cast<std::size_t>(trials), estimator.threads,
               [&](std::size_t t) {
                 estimates[t] = run_on_sample(spec, n_per_class, trial_cfg,
                                              cell_seed(seed, 2, 0, 0, t));
               });
  return clt_from_values(estimates);
}

std::string sweep_rows_csv(const std::vector<TrialRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "scheme,alpha,N,trial,estimate,oracle\n";
  for (const auto& r : rows)
    out << r.scheme << ',' << r.alpha << ',' << r.n << ',' << r.trial << ','
        << r.estimate << ',' << r.oracle << '\n';
  return out.str();
}

std::string dataset_csv(const LabeledDataset& ds) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t j = 0; j < ds.dim(); ++j) {
    if (!ds.feature_names.empty())
      out << ds.feature_names[j] << ',';
    else
      out << 'f' << j + 1 << ',';
  }
  out << "label\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < ds.dim(); ++j) out << ds.points(i, j) << ',';
    out << ds.labels[i] << '\n';
  }
  return out.str();
}

} // namespace bayesbench
