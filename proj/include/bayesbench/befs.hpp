#pragma once

#include <vector>

#include "bayesbench/bayes_error.hpp"
#include "bayesbench/dataset.hpp"

namespace bayesbench {

struct SelectionTrace {
  std::vector<int> selected;        // 0-based feature indices, in pick order
  std::vector<double> ber_curve;    // estimate after each added feature
  double ber_empty = 0.0;           // 1 - max prior
  // candidate estimates per step (step -> feature index -> estimate),
  // kept for audit; unevaluated candidates hold -1
  std::vector<std::vector<double>> candidate_estimates;
};

// Greedy forward selection: at each of r steps add the feature whose addition
// yields the lowest estimated error (ties to the lowest index). Estimates use
// the multiclass estimator on the current subset, restandardized per step,
// with L = k+1 bandwidths for a k-feature subset.
SelectionTrace befs_select(const LabeledDataset& ds, int r,
                           const EstimatorConfig& cfg);

} // namespace bayesbench
