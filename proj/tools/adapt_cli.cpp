// Command-line front end: simulate, fit, benchmark, evaluate, aging.
//
// Exit codes: 0 success, 2 invalid arguments or configuration, 3 I/O
// failure, 4 solver failure, 5 metric precondition failure. Results go to
// stdout; diagnostics go to stderr.

#include <CLI11.hpp>
#include <fnmatch.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "adapt/adapt.hpp"

namespace fs = std::filesystem;
using namespace adapt;

namespace {

enum Exit { kOk = 0, kInvalid = 2, kIo = 3, kSolver = 4, kMetric = 5 };

struct Globals {
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out;
};

std::uint64_t seed_or(const Globals& g, std::uint64_t fallback) { return g.seed.value_or(fallback); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path require_out(const Globals& g) {
  if (g.out.empty()) throw InvalidArgument("--out is required for this command");
  return g.out;
}

void write_manifest(const fs::path& dir, const std::string& command, const std::string& config,
                    std::uint64_t seed) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const json m = {{"command", command},
                  {"config", config.empty() ? json(nullptr) : json(config)},
                  {"seed", seed},
                  {"out", dir.string()},
                  {"version", kVersion},
                  {"timestamp", utc_timestamp()}};
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

bool has_wildcard(const std::string& s) { return s.find_first_of("*?[") != std::string::npos; }

// Literal paths pass through; patterns match file names in their directory.
std::vector<fs::path> expand_paths(const std::vector<std::string>& patterns) {
  std::vector<fs::path> out;
  for (const auto& pattern : patterns) {
    const fs::path p(pattern);
    if (!has_wildcard(p.filename().string())) {
      out.push_back(p);
      continue;
    }
    const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    std::vector<fs::path> hits;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec))
      if (entry.is_regular_file() &&
          fnmatch(p.filename().c_str(), entry.path().filename().c_str(), 0) == 0)
        hits.push_back(entry.path());
    if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
    if (hits.empty()) throw InvalidArgument("pattern '" + pattern + "' matches no files");
    std::sort(hits.begin(), hits.end());
    out.insert(out.end(), hits.begin(), hits.end());
  }
  return out;
}

// Ascending period label when every file carries one, else argument order.
std::vector<Dataset> read_sources(const std::vector<std::string>& patterns) {
  std::vector<Dataset> sources;
  for (const auto& p : expand_paths(patterns)) sources.push_back(read_dataset(p));
  const bool labeled = std::all_of(sources.begin(), sources.end(), [](const Dataset& d) { return d.period.has_value(); });
  if (labeled)
    std::stable_sort(sources.begin(), sources.end(),
                     [](const Dataset& a, const Dataset& b) { return *a.period < *b.period; });
  return sources;
}

double parse_tau(const std::string& s) {
  if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  const double v = parse_double(s, "--tau");
  if (!(v >= 0.0)) throw InvalidArgument("--tau must be nonnegative or 'inf'");
  return v;
}

json weights_json(const SimplexWeights& w) {
  return std::vector<double>(w.gamma.data(), w.gamma.data() + w.size());
}

// ------------------------------------------------------------- commands

struct SimulateArgs {
  std::string config;
};

int cmd_simulate(const Globals& g, const SimulateArgs& a) {
  DriftConfig cfg;
  if (!a.config.empty()) cfg = drift_config_from_json(parse_json_file(a.config));
  cfg.seed = seed_or(g, cfg.seed);
  cfg.validate();
  const fs::path out = require_out(g);
  write_manifest(out, "simulate", a.config, cfg.seed);
  const CoefficientPath path = generate_coefficient_path(cfg);
  const auto data = generate_period_datasets(cfg, path);
  const int width = std::max(2, static_cast<int>(std::to_string(cfg.periods).size()));
  for (const auto& d : data) {
    std::string label = std::to_string(d.period.value_or(0));
    label.insert(0, static_cast<std::size_t>(std::max(0, width - static_cast<int>(label.size()))), '0');
    write_text(out / ("period_" + label + ".csv"), dataset_to_csv(d, true));
  }
  write_json(out / "coefficient_path.json", coefficient_path_json(path));
  write_json(out / "config.json", to_json(cfg));
  std::cerr << "wrote " << data.size() << " period datasets to " << out.string() << "\n";
  return kOk;
}

struct FitArgs {
  std::string method;
  std::string target;
  std::vector<std::string> sources;
  std::string link = "logistic";
  std::string tau;
  std::string anchor = "target";
  std::string bank = "full";
  double split_fraction = 0.5;
  PenaltyPolicy policy;
  std::optional<double> lambda;
};

int cmd_fit(const Globals& g, FitArgs a) {
  const std::string method = canonical_method(a.method);
  const Link link = parse_link(a.link);
  if (a.lambda) a.policy.fixed_lambda = *a.lambda;
  if (a.policy.folds < 2 || a.policy.grid_size < 1) throw InvalidArgument("--folds must be >= 2 and --grid-size >= 1");
  if (method != "adapt" && (!a.tau.empty() || a.anchor != "target" || a.bank != "full"))
    throw InvalidArgument("--tau, --anchor and --bank apply to 'fit adapt' only");
  const std::uint64_t seed = seed_or(g, 1);
  const fs::path out = require_out(g);

  const Dataset target = read_dataset(a.target);
  target.validate(link);
  const std::vector<Dataset> sources = read_sources(a.sources);
  for (const auto& s : sources) s.validate(link);
  if ((method == "adapt" || method == "maximin") && sources.empty())
    throw InvalidArgument("'" + a.method + "' needs at least one source dataset (>= 1 source required)");

  write_manifest(out, "fit " + method, "", seed);
  json diag = {{"method", method}, {"target_rows", target.rows()}, {"sources", sources.size()}};
  CoefficientVector beta;
  int code = kOk;

  if (method == "target_only") {
    beta = fit_target_only(target, link, a.policy, seed);
  } else if (method == "pooled") {
    beta = fit_pooled(sources, target, link, a.policy, seed);
  } else if (method == "maximin") {
    SimplexWeights w;
    std::tie(beta, w) = fit_maximin(sources, target, link, a.policy, seed);
    diag["weights"] = weights_json(w);
  } else if (method == "adapt") {
    PipelineOptions opt;
    opt.policy = a.policy;
    opt.split_fraction = a.split_fraction;
    opt.anchor = parse_anchor(a.anchor);
    opt.bank = parse_bank_layout(a.bank);
    if (!a.tau.empty()) opt.tau = parse_tau(a.tau);
    try {
      const PipelineResult r = run_adapt_pipeline(sources, target, link, seed, opt);
      beta = r.beta;
      diag.update(to_json(r.diagnostics));
      diag["weights"] = weights_json(r.weights);
      diag["bank_labels"] = r.bank.labels;
      diag["target_loss"] = r.target_loss;
      diag["combination_loss"] = r.combination_loss;
      write_json(out / "bank.json", to_json(r.bank, link));
      if (!r.diagnostics.converged) {
        std::cerr << "solver did not converge: " << r.diagnostics.termination << "\n";
        code = kSolver;
      }
    } catch (const SolverError& e) {
      diag["error"] = e.what();
      write_json(out / "diagnostics.json", diag);
      throw;
    }
  } else {
    throw InvalidArgument("unknown method '" + a.method + "' (adapt, target-only, pooled, maximin)");
  }

  write_json(out / "model.json", to_json(beta, link));
  write_json(out / "diagnostics.json", diag);
  return code;
}

struct BenchmarkArgs {
  std::string config;
  std::string sweep = "rho";
  bool artifacts = false;
};

int cmd_benchmark(const Globals& g, const BenchmarkArgs& a) {
  ExperimentConfig cfg;
  if (!a.config.empty()) cfg = experiment_config_from_json(parse_json_file(a.config));
  cfg.seed = seed_or(g, cfg.seed);
  const SweepKind kind = a.sweep == "rho" ? SweepKind::rho
                         : a.sweep == "perturb"
                             ? SweepKind::perturb
                             : throw InvalidArgument("--sweep must be 'rho' or 'perturb'");
  if (g.threads < 1) throw InvalidArgument("--threads must be at least 1");
  cfg.validate(EstimatorRegistry::builtin());
  const fs::path out = require_out(g);
  write_manifest(out, "benchmark " + a.sweep, a.config, cfg.seed);
  write_json(out / "config.json", to_json(cfg));

  SweepOptions opt;
  opt.threads = g.threads;
  opt.cell_dir = out / "cells";
  if (a.artifacts) opt.artifact_dir = out / "artifacts";
  fs::create_directories(*opt.cell_dir);
  const SweepResult res = run_sweep(cfg, kind, opt);

  write_text(out / "results.csv", rows_to_csv(res.rows));
  write_text(out / "summary.csv", summary_to_csv(summarize(res.rows)));
  write_text(out / "worst_future.csv", worst_future_to_csv(summarize_worst_future(res.rows)));
  write_text(out / "failures.csv", detail::failures_to_csv(res.failures));
  for (const auto& f : res.failures)
    std::cerr << "cell " << f.grid_index << " rep " << f.rep << " " << f.method << ": " << f.message << "\n";
  std::cerr << res.rows.size() << " result rows, " << res.failures.size() << " failed fits\n";
  return kOk;
}

struct EvaluateArgs {
  std::string model;
  std::string data;
};

int cmd_evaluate(const Globals& g, const EvaluateArgs& a) {
  const auto [beta, link] = coefficients_from_json(parse_json_file(a.model));
  const Dataset d = read_dataset(a.data);
  const double value = auc(predict_scores(beta, d, link), d.outcomes);
  if (!g.out.empty()) {
    write_manifest(g.out, "evaluate", "", seed_or(g, 0));
    write_json(fs::path(g.out) / "evaluation.json", {{"auc", value}, {"rows", d.rows()}});
  }
  std::cout << format_double(value) << "\n";
  return kOk;
}

struct AgingArgs {
  std::string results;
  int delta = 1;
  std::string method;
  std::optional<int> last_period;
  bool skip_missing = false;
};

int cmd_aging(const Globals& g, const AgingArgs& a) {
  const auto records = auc_records_from_csv(read_text(a.results), a.results);
  const AucTable table = aggregate_auc_table(records, canonical_method(a.method));
  if (table.entries.empty()) throw InvalidArgument("no AUC rows for method '" + a.method + "'");
  int last = 0;
  for (const auto& [key, _] : table.entries) last = std::max(last, key.second);
  const double value = aging_effect(table, a.delta, a.last_period.value_or(last), {a.skip_missing});
  if (!g.out.empty()) {
    write_manifest(g.out, "aging", "", seed_or(g, 0));
    write_json(fs::path(g.out) / "aging.json", {{"delta", a.delta}, {"aging_effect", value}});
  }
  std::cout << format_double(value) << "\n";
  return kOk;
}

int exit_code_for(const Error& e) {
  switch (e.category()) {
    case Error::Category::invalid_argument: return kInvalid;
    case Error::Category::io: return kIo;
    case Error::Category::solver: return kSolver;
    case Error::Category::metric: return kMetric;
  }
  return kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drift-aware transfer of GLMs: simulation, fitting and benchmarks", "adapt"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Master random seed");
  app.add_option("--threads", g.threads, "Worker threads for benchmark sweeps")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate the drifting coefficient path and period datasets");
  simulate->add_option("--config", sim.config, "Drift configuration JSON");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit one estimator on CSV data");
  fit_cmd->add_option("method", fit.method, "adapt, target-only, pooled or maximin")->required();
  fit_cmd->add_option("--target", fit.target, "Current-period dataset CSV")->required();
  fit_cmd->add_option("--sources", fit.sources, "Source dataset CSVs or file-name patterns");
  fit_cmd->add_option("--link", fit.link, "logistic or identity");
  fit_cmd->add_option("--tau", fit.tau, "Uncertainty-set radius; 'inf' drops the constraint");
  fit_cmd->add_option("--anchor", fit.anchor, "target, best-source or zero");
  fit_cmd->add_option("--bank", fit.bank, "full (target + sources) or sources");
  fit_cmd->add_option("--split-fraction", fit.split_fraction, "Estimation share of the target split");
  fit_cmd->add_option("--folds", fit.policy.folds, "Cross-validation folds");
  fit_cmd->add_option("--grid-size", fit.policy.grid_size, "Lambda grid length");
  fit_cmd->add_option("--mixing", fit.policy.mixing, "Elastic-net mixing in [0, 1]");
  fit_cmd->add_option("--lambda", fit.lambda, "Fixed penalty; skips cross-validation");

  BenchmarkArgs bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "Run a rho or perturbation sweep");
  bench_cmd->add_option("--config", bench.config, "Experiment configuration JSON");
  bench_cmd->add_option("--sweep", bench.sweep, "rho or perturb");
  bench_cmd->add_flag("--artifacts", bench.artifacts, "Write models, diagnostics and score vectors");

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Print the AUC of a model on a dataset");
  eval_cmd->add_option("--model", eval.model, "Coefficient JSON")->required();
  eval_cmd->add_option("--data", eval.data, "Dataset CSV")->required();

  AgingArgs aging;
  std::optional<int> last_period;
  auto* aging_cmd = app.add_subcommand("aging", "Print the aging effect A(delta) of a results table");
  aging_cmd->add_option("--results", aging.results, "CSV with method,train_period,eval_period,rep,auc")->required();
  aging_cmd->add_option("--delta", aging.delta, "Age gap in periods")->required();
  aging_cmd->add_option("--method", aging.method, "Method to read when the table holds several");
  aging_cmd->add_option("--last-period", last_period, "Last period T (default: latest in the table)");
  aging_cmd->add_flag("--skip-missing", aging.skip_missing, "Average over available periods only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }
  if (seed_opt->count() > 0) g.seed = seed;
  aging.last_period = last_period;

  try {
    if (*simulate) return cmd_simulate(g, sim);
    if (*fit_cmd) return cmd_fit(g, fit);
    if (*bench_cmd) return cmd_benchmark(g, bench);
    if (*eval_cmd) return cmd_evaluate(g, eval);
    if (*aging_cmd) return cmd_aging(g, aging);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
