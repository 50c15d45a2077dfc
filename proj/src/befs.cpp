#include "bayesbench/befs.hpp"

#include <algorithm>
#include <cmath>

#include "bayesbench/parallel.hpp"

namespace bayesbench {

namespace {

double subset_estimate(const LabeledDataset& ds, const std::vector<int>& features,
                       const EstimatorConfig& cfg) {
  EstimatorConfig sub = cfg;
  sub.method = Method::multiclass;
  // bandwidth count follows the subset dimension
  sub.L = cfg.L > 0 ? cfg.L : static_cast<int>(features.size()) + 1;
  sub.threads = 1; // parallelism lives across candidates
  const auto view = select_features(ds, features);
  return run_estimate(view, sub).estimate;
}

} // namespace

SelectionTrace befs_select(const LabeledDataset& ds, int r,
                           const EstimatorConfig& cfg) {
  ds.validate();
  const int d = static_cast<int>(ds.dim());
  if (r < 1 || r > d)
    throw ValidationError("befs_select: r must be in 1..d");

  const auto priors = estimate_priors(partition_by_class(ds));
  SelectionTrace trace;
  trace.ber_empty = 1.0 - *std::max_element(priors.p.begin(), priors.p.end());

  std::vector<int> selected;
  for (int step = 0; step < r; ++step) {
    std::vector<int> candidates;
    for (int j = 0; j < d; ++j)
      if (std::find(selected.begin(), selected.end(), j) == selected.end())
        candidates.push_back(j);

    std::vector<double> per_feature(static_cast<std::size_t>(d), -1.0);
    std::vector<double> est(candidates.size(), 0.0);
    parallel_for(candidates.size(), cfg.threads, [&](std::size_t i) {
      std::vector<int> subset = selected;
      subset.push_back(candidates[i]);
      est[i] = subset_estimate(ds, subset, cfg);
    });
    for (std::size_t i = 0; i < candidates.size(); ++i)
      per_feature[static_cast<std::size_t>(candidates[i])] = est[i];

    // argmin, ties to the lowest feature index (candidates are ascending)
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i)
      if (est[i] < est[best]) best = i;

    selected.push_back(candidates[best]);
    trace.selected = selected;
    trace.ber_curve.push_back(est[best]);
    trace.candidate_estimates.push_back(std::move(per_feature));
  }
  return trace;
}

} // namespace bayesbench
