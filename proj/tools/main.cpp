#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bayesbench/bayes_error.hpp"
#include "bayesbench/befs.hpp"
#include "bayesbench/datagen.hpp"
#include "bayesbench/experiments.hpp"

using nlohmann::json;
using namespace bayesbench;

namespace {

constexpr int kSchemaVersion = 1;

// Partial files are never left behind: write to a sibling temp path, rename.
void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write: " + tmp);
    out << content;
    if (!out.good()) throw IoError("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed: " + path + " (" + ec.message() + ")");
}

void emit(const json& j, const std::string& output_path) {
  const std::string text = j.dump(2) + "\n";
  if (output_path.empty())
    std::cout << text;
  else
    write_file_atomic(output_path, text);
}

struct CommonOpts {
  std::string input;
  std::string output;
  std::string label_col = "label";
  std::string method = "ensemble";
  std::string scheme = "chebyshev";
  double alpha = 0.4;
  int L = 0;
  double clip_lo = 1e-3;
  bool no_standardize = false;
  bool no_adapt_scale = false;
  bool symmetrize = false;
  std::optional<double> epsilon;
  std::optional<int> knn_k;
  int threads = 0;
  std::uint64_t seed = 0;
};

int env_threads() {
  if (const char* env = std::getenv("BAYES_BENCH_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;
}

EstimatorConfig to_estimator_config(const CommonOpts& o) {
  EstimatorConfig cfg;
  cfg.method = method_from_string(o.method);
  cfg.scheme = scheme_from_string(o.scheme);
  cfg.alpha = o.alpha;
  cfg.L = o.L;
  cfg.clip_lo = o.clip_lo;
  cfg.standardize = !o.no_standardize;
  cfg.adapt_scale = !o.no_adapt_scale;
  cfg.symmetrize = o.symmetrize;
  cfg.epsilon = o.epsilon;
  cfg.knn_k = o.knn_k;
  cfg.threads = o.threads > 0 ? o.threads : env_threads();
  return cfg;
}

json config_json(const CommonOpts& o) {
  json j;
  j["method"] = o.method;
  j["scheme"] = o.scheme;
  j["alpha"] = o.alpha;
  j["L"] = o.L;
  j["clip_lo"] = o.clip_lo;
  j["standardize"] = !o.no_standardize;
  j["adapt_scale"] = !o.no_adapt_scale;
  j["symmetrize"] = o.symmetrize;
  if (o.epsilon) j["epsilon"] = *o.epsilon;
  if (o.knn_k) j["knn_k"] = *o.knn_k;
  j["threads"] = o.threads;
  j["seed"] = o.seed;
  return j;
}

json label_map_json(const LabeledDataset& ds) {
  json j = json::object();
  for (const auto& [name, id] : ds.label_map) j[name] = id;
  return j;
}

void add_estimator_flags(CLI::App* cmd, CommonOpts& o) {
  static std::string config_path_sink;
  cmd->add_option("--config", config_path_sink,
                  "JSON config file (applied before flags)");
  cmd->add_option("--method", o.method,
                  "base | symmetrized | ensemble | multiclass | hp");
  cmd->add_option("--scheme", o.scheme, "uniform | arithmetic | chebyshev");
  cmd->add_option("--alpha", o.alpha, "node scale (default 0.4)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--L", o.L, "bandwidth count (default: dim + 1)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--clip-lo", o.clip_lo, "ratio clip lower bound C_L/C_U")
      ->check(CLI::Range(1e-12, 1.0));
  cmd->add_flag("--no-standardize", o.no_standardize,
                "skip per-feature standardization");
  cmd->add_flag("--no-adapt-scale", o.no_adapt_scale,
                "disable the data-driven bandwidth unit");
  cmd->add_flag("--symmetrize", o.symmetrize, "average both query directions");
  cmd->add_option_function<double>(
         "--epsilon", [&o](double v) { o.epsilon = v; },
         "fixed ball radius override")
      ->check(CLI::PositiveNumber);
  cmd->add_option_function<int>(
         "--knn-k", [&o](int v) { o.knn_k = v; },
         "neighbor count for the bandwidth unit")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threads", o.threads, "worker threads (0 = auto)");
}

// --config file: JSON object of flag defaults, applied before parsing so
// explicit flags win.
void apply_config_file(const std::string& path, CommonOpts& o) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  json j;
  in >> j;
  if (j.contains("method")) o.method = j["method"].get<std::string>();
  if (j.contains("scheme")) o.scheme = j["scheme"].get<std::string>();
  if (j.contains("alpha")) o.alpha = j["alpha"].get<double>();
  if (j.contains("L")) o.L = j["L"].get<int>();
  if (j.contains("clip_lo")) o.clip_lo = j["clip_lo"].get<double>();
  if (j.contains("standardize")) o.no_standardize = !j["standardize"].get<bool>();
  if (j.contains("adapt_scale")) o.no_adapt_scale = !j["adapt_scale"].get<bool>();
  if (j.contains("symmetrize")) o.symmetrize = j["symmetrize"].get<bool>();
  if (j.contains("epsilon")) o.epsilon = j["epsilon"].get<double>();
  if (j.contains("knn_k")) o.knn_k = j["knn_k"].get<int>();
  if (j.contains("threads")) o.threads = j["threads"].get<int>();
  if (j.contains("label_col")) o.label_col = j["label_col"].get<std::string>();
}

std::string pre_scan_config(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") return argv[i + 1];
  return {};
}

int cmd_estimate(const CommonOpts& o) {
  const auto ds = load_csv(o.input, o.label_col);
  const auto cfg = to_estimator_config(o);
  const auto rep = run_estimate(ds, cfg);

  json j;
  j["schema_version"] = kSchemaVersion;
  j["estimate"] = rep.estimate;
  j["method"] = rep.method;
  j["priors"] = rep.priors;
  j["L"] = rep.L;
  j["alpha"] = rep.alpha;
  j["alpha_effective"] = rep.alpha_effective;
  j["bandwidth_unit"] = rep.bandwidth_unit;
  j["clip_lo"] = rep.clip_lo;
  j["clamped_fraction"] = rep.clamped_fraction;
  j["radii"] = rep.radii;
  j["n"] = ds.size();
  j["d"] = ds.dim();
  j["lambda"] = ds.num_classes;
  j["label_map"] = label_map_json(ds);
  j["config"] = config_json(o);
  if (rep.hp_divergence) {
    j["hp_divergence"] = *rep.hp_divergence;
    j["hp_lower"] = *rep.hp_lower;
    j["hp_upper"] = *rep.hp_upper;
    j["hp_note"] = "plug-in divergence estimate from clamped ensemble ratios";
  }
  emit(j, o.output);
  return 0;
}

int cmd_weights(const CommonOpts& o, int L, int d) {
  const auto scheme = scheme_from_string(o.scheme);
  NodeSet nodes;
  WeightVector w;
  switch (scheme) {
    case WeightScheme::chebyshev:
      nodes = chebyshev_roots(L, o.alpha);
      w = chebyshev_weights(L, d, o.alpha);
      break;
    case WeightScheme::arithmetic:
      nodes = arithmetic_nodes(L, o.alpha);
      w = least_norm_weights(nodes, d);
      break;
    case WeightScheme::uniform:
      nodes = arithmetic_nodes(L, o.alpha);
      w = uniform_weights(L);
      break;
  }
  json j;
  j["schema_version"] = kSchemaVersion;
  j["scheme"] = o.scheme;
  j["L"] = L;
  j["d"] = d;
  j["alpha"] = o.alpha;
  j["nodes"] = nodes.nodes;
  j["weights"] = w.weights;
  j["norm"] = l2_norm(w);
  j["constraint_residuals"] = moment_residuals(nodes, w, std::min(d, 12));
  j["config"] = {{"scheme", o.scheme}, {"L", L}, {"d", d}, {"alpha", o.alpha}};
  emit(j, o.output);
  return 0;
}

int cmd_befs(const CommonOpts& o, int r) {
  const auto ds = load_csv(o.input, o.label_col);
  EstimatorConfig cfg = to_estimator_config(o);
  const auto trace = befs_select(ds, r, cfg);

  json j;
  j["schema_version"] = kSchemaVersion;
  j["selected"] = trace.selected;
  json names = json::array();
  for (int f : trace.selected)
    names.push_back(ds.feature_names.empty()
                        ? "f" + std::to_string(f)
                        : ds.feature_names[static_cast<std::size_t>(f)]);
  j["selected_names"] = names;
  j["ber_curve"] = trace.ber_curve;
  j["ber_empty"] = trace.ber_empty;
  j["candidate_estimates"] = trace.candidate_estimates; // -1: not evaluated
  j["label_map"] = label_map_json(ds);
  j["config"] = config_json(o);
  emit(j, o.output);
  return 0;
}

struct SimOpts {
  std::string family = "gaussian-shift";
  int dim = 2;
  int classes = 2;
  double delta = 1.0;
  double sigma = 1.0;
  std::vector<double> rayleigh_a;
  std::vector<double> beta_params; // flat pairs a1,b1,a2,b2,...
  std::vector<std::int64_t> n_per_class;
  std::int64_t n = 0; // shorthand: same count per class
};

DistributionSpec to_spec(const SimOpts& s, std::uint64_t seed) {
  switch (family_from_string(s.family)) {
    case Family::gaussian_shift:
      return gaussian_shift_spec(s.dim, s.delta, s.sigma, s.classes, seed);
    case Family::rayleigh:
      return rayleigh_spec(s.dim, s.rayleigh_a, seed);
    case Family::beta: {
      if (s.beta_params.empty() || s.beta_params.size() % 2 != 0)
        throw ValidationError("--beta-params expects pairs a,b per class");
      std::vector<std::pair<double, double>> shapes;
      for (std::size_t i = 0; i + 1 < s.beta_params.size(); i += 2)
        shapes.emplace_back(s.beta_params[i], s.beta_params[i + 1]);
      return beta_spec(s.dim, std::move(shapes), seed);
    }
    case Family::concentric:
      return concentric_spec(s.dim, s.classes, seed);
  }
  throw ValidationError("unknown family");
}

std::vector<std::int64_t> resolve_counts(const SimOpts& s, int classes) {
  if (!s.n_per_class.empty()) {
    if (static_cast<int>(s.n_per_class.size()) != classes)
      throw ValidationError("--n-per-class must list one count per class");
    return s.n_per_class;
  }
  if (s.n < 1) throw ValidationError("--n must be >= 1");
  return std::vector<std::int64_t>(static_cast<std::size_t>(classes), s.n);
}

int cmd_simulate(const CommonOpts& o, const SimOpts& s) {
  auto spec = to_spec(s, o.seed);
  const auto ds = generate(spec, resolve_counts(s, spec.num_classes));
  const std::string csv = dataset_csv(ds);
  if (o.output.empty())
    std::cout << csv;
  else
    write_file_atomic(o.output, csv);
  return 0;
}

int cmd_sweep(const CommonOpts& o, const SimOpts& s,
              const std::vector<std::int64_t>& sizes, int trials,
              const std::vector<std::string>& scheme_names,
              const std::vector<double>& alphas, std::int64_t n_mc,
              const std::string& summary_path) {
  SweepConfig cfg;
  cfg.spec = to_spec(s, o.seed);
  cfg.sizes = sizes;
  cfg.trials = trials;
  if (!sizes.empty() && (sizes.back() > 3200 || trials > 50 || cfg.spec.dim > 10))
    std::cerr << "note: sweep beyond the desk-scale defaults (N <= 3200, trials <= 50,"
                 " d <= 10) may be long-running\n";
  cfg.schemes.clear();
  for (const auto& n : scheme_names) cfg.schemes.push_back(scheme_from_string(n));
  cfg.alphas = alphas.empty() ? std::vector<double>{o.alpha} : alphas;
  cfg.estimator = to_estimator_config(o);
  cfg.oracle_mc_samples = n_mc;
  cfg.seed = o.seed;

  const auto result = mse_sweep(cfg);
  const std::string csv = sweep_rows_csv(result.rows);
  if (o.output.empty())
    std::cout << csv;
  else
    write_file_atomic(o.output, csv);

  json j;
  j["schema_version"] = kSchemaVersion;
  j["oracle"] = {{"bayes_error", result.oracle.bayes_error},
                 {"method", result.oracle.method},
                 {"mc_samples", result.oracle.mc_samples},
                 {"std_error", result.oracle.std_error}};
  json cells = json::array();
  for (const auto& c : result.cells)
    cells.push_back({{"scheme", c.scheme},
                     {"alpha", c.alpha},
                     {"N", c.n},
                     {"mean", c.mean},
                     {"mse", c.mse},
                     {"lo95", c.lo95},
                     {"hi95", c.hi95},
                     {"oracle", c.oracle}});
  j["cells"] = cells;
  j["config"] = config_json(o);
  if (!summary_path.empty()) write_file_atomic(summary_path, j.dump(2) + "\n");
  return 0;
}

int cmd_clt(const CommonOpts& o, const SimOpts& s, std::int64_t n_per_class,
            int trials) {
  const auto spec = to_spec(s, o.seed);
  const auto cfg = to_estimator_config(o);
  const auto res = clt_diagnostic(spec, n_per_class, trials, cfg, o.seed);
  json j;
  j["schema_version"] = kSchemaVersion;
  j["ks_statistic"] = res.ks_statistic;
  j["p_value"] = res.p_value;
  j["pass"] = res.pass;
  j["trials"] = trials;
  j["standardized"] = res.standardized;
  j["note"] = "standardized by sample mean/std over trials";
  j["config"] = config_json(o);
  emit(j, o.output);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayes error rate benchmark: epsilon-ball ensemble estimators"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override)");

  const std::string pre = pre_scan_config(argc, argv);
  if (!pre.empty()) {
    try {
      apply_config_file(pre, opts);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }

  // estimate
  auto* est = app.add_subcommand("estimate", "estimate the Bayes error from a CSV");
  est->add_option("--input", opts.input, "input CSV")->required();
  est->add_option("--output", opts.output, "output JSON path (default stdout)");
  est->add_option("--label-col", opts.label_col, "label column name or 0-based index");
  add_estimator_flags(est, opts);

  // weights
  auto* wts = app.add_subcommand("weights", "emit ensemble nodes and weights");
  int w_L = 2, w_d = 1;
  wts->add_option("--L", w_L, "number of nodes")->required();
  wts->add_option("--d", w_d, "moment constraint order")->required();
  wts->add_option("--alpha", opts.alpha, "node scale");
  wts->add_option("--scheme", opts.scheme, "uniform | arithmetic | chebyshev");
  wts->add_option("--output", opts.output, "output JSON path (default stdout)");
  wts->add_option("--config", config_path, "JSON config file (applied before flags)");

  // befs
  auto* bef = app.add_subcommand("befs", "greedy forward feature selection");
  int befs_r = 1;
  bef->add_option("--input", opts.input, "input CSV")->required();
  bef->add_option("--r", befs_r, "number of features to select")->required();
  bef->add_option("--output", opts.output, "output JSON path (default stdout)");
  bef->add_option("--label-col", opts.label_col, "label column name or 0-based index");
  add_estimator_flags(bef, opts);

  // simulate
  SimOpts sim;
  auto* simc = app.add_subcommand("simulate", "write a synthetic dataset as CSV");
  simc->add_option("--family", sim.family,
                   "gaussian-shift | rayleigh | beta | concentric");
  simc->add_option("--d", sim.dim, "dimension")->check(CLI::PositiveNumber);
  simc->add_option("--classes", sim.classes, "number of classes");
  simc->add_option("--delta", sim.delta, "gaussian mean shift step");
  simc->add_option("--sigma", sim.sigma, "gaussian std");
  simc->add_option("--rayleigh-a", sim.rayleigh_a, "per-class Rayleigh scales");
  simc->add_option("--beta-params", sim.beta_params, "per-class shape pairs a b ...");
  simc->add_option("--n", sim.n, "samples per class");
  simc->add_option("--n-per-class", sim.n_per_class, "explicit per-class counts");
  simc->add_option("--seed", opts.seed, "random seed");
  simc->add_option("--output", opts.output, "output CSV path (default stdout)");
  simc->add_option("--config", config_path, "JSON config file (applied before flags)");

  // sweep
  std::vector<std::int64_t> sweep_sizes{100, 400, 1600};
  int sweep_trials = 20;
  std::vector<std::string> sweep_schemes{"chebyshev"};
  std::vector<double> sweep_alphas;
  std::int64_t sweep_mc = 2'000'000;
  std::string sweep_summary;
  auto* swc = app.add_subcommand("sweep", "MSE-vs-N sweep against the oracle");
  swc->add_option("--family", sim.family, "distribution family");
  swc->add_option("--d", sim.dim, "dimension");
  swc->add_option("--classes", sim.classes, "number of classes");
  swc->add_option("--delta", sim.delta, "gaussian mean shift step");
  swc->add_option("--sigma", sim.sigma, "gaussian std");
  swc->add_option("--rayleigh-a", sim.rayleigh_a, "per-class Rayleigh scales");
  swc->add_option("--beta-params", sim.beta_params, "per-class shape pairs");
  swc->add_option("--sizes", sweep_sizes, "per-class sizes, ascending");
  swc->add_option("--trials", sweep_trials, "trials per cell");
  swc->add_option("--schemes", sweep_schemes, "weight schemes to compare");
  swc->add_option("--alphas", sweep_alphas, "alpha values to compare");
  swc->add_option("--oracle-mc", sweep_mc, "Monte Carlo oracle sample count");
  swc->add_option("--seed", opts.seed, "random seed");
  swc->add_option("--output", opts.output, "rows CSV path (default stdout)");
  swc->add_option("--summary", sweep_summary, "summary JSON path");
  add_estimator_flags(swc, opts);

  // clt
  std::int64_t clt_n = 500;
  int clt_trials = 200;
  auto* cltc = app.add_subcommand("clt", "KS normality diagnostic over trials");
  cltc->add_option("--family", sim.family, "distribution family");
  cltc->add_option("--d", sim.dim, "dimension");
  cltc->add_option("--classes", sim.classes, "number of classes");
  cltc->add_option("--delta", sim.delta, "gaussian mean shift step");
  cltc->add_option("--sigma", sim.sigma, "gaussian std");
  cltc->add_option("--n", clt_n, "samples per class");
  cltc->add_option("--trials", clt_trials, "independent trials (>= 100)");
  cltc->add_option("--seed", opts.seed, "random seed");
  cltc->add_option("--output", opts.output, "output JSON path (default stdout)");
  add_estimator_flags(cltc, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (est->parsed()) return cmd_estimate(opts);
    if (wts->parsed()) return cmd_weights(opts, w_L, w_d);
    if (bef->parsed()) return cmd_befs(opts, befs_r);
    if (simc->parsed()) return cmd_simulate(opts, sim);
    if (swc->parsed())
      return cmd_sweep(opts, sim, sweep_sizes, sweep_trials, sweep_schemes,
                       sweep_alphas, sweep_mc, sweep_summary);
    if (cltc->parsed()) return cmd_clt(opts, sim, clt_n, clt_trials);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
