#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bayesbench/bayes_error.hpp"
#include "bayesbench/datagen.hpp"

namespace bayesbench {

struct SweepConfig {
  DistributionSpec spec;
  std::vector<std::int64_t> sizes; // per-class sample sizes, ascending
  int trials = 20;
  std::vector<WeightScheme> schemes{WeightScheme::chebyshev};
  std::vector<double> alphas{0.4};
  EstimatorConfig estimator;
  std::int64_t oracle_mc_samples = 2'000'000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrialRow {
  std::string scheme;
  double alpha = 0.0;
  std::int64_t n = 0;
  int trial = 0;
  double estimate = 0.0;
  double oracle = 0.0;
};

struct CellSummary {
  std::string scheme;
  double alpha = 0.0;
  std::int64_t n = 0;
  double mean = 0.0;
  double mse = 0.0;
  double lo95 = 0.0, hi95 = 0.0; // order-statistic interval over trials
  double oracle = 0.0;
};

struct SweepResult {
  std::vector<TrialRow> rows;
  std::vector<CellSummary> cells;
  OracleResult oracle;
};

SweepResult mse_sweep(const SweepConfig& cfg);

struct BoundsRow {
  std::int64_t n = 0;
  double estimate = 0.0;
  double hp_lower = 0.0;
  double hp_upper = 0.0;
  double oracle = 0.0;
  double bracket_fraction = 0.0; // share of trials with lower <= est <= upper
};

std::vector<BoundsRow> bounds_comparison(const SweepConfig& cfg);

struct CltResult {
  std::vector<double> standardized;
  double ks_statistic = 0.0;
  double p_value = 0.0;
  bool pass = false;
};

// KS machinery on already-collected values (also the self-test entry point).
CltResult clt_from_values(std::span<const double> estimates);

CltResult clt_diagnostic(const DistributionSpec& spec, std::int64_t n_per_class,
                         int trials, const EstimatorConfig& estimator,
                         std::uint64_t seed);

std::string sweep_rows_csv(const std::vector<TrialRow>& rows);
std::string dataset_csv(const LabeledDataset& ds);

} // namespace bayesbench
