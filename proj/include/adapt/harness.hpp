#pragma once

// Experiment orchestration for the synthetic drift study: baseline
// estimators, an estimator registry, repetition sweeps over the current
// sample ratio (rho) or the perturbation level, and result persistence.
//
// A sweep is a grid of independent cells (grid point x repetition). Every
// cell derives its random streams from the master seed and its own
// coordinates, so results do not depend on the thread schedule:
//   scenario data   <- (seed, rep)           shared across grid points
//   source fits     <- (seed, rep)           cached, shared across grid points
//   other fits      <- (seed, sweep, grid index, rep)
// Sharing the scenario across grid points means a rho or perturbation
// change alters only the quantity being swept.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "adapt/drift.hpp"
#include "adapt/glm.hpp"
#include "adapt/io.hpp"
#include "adapt/metrics.hpp"
#include "adapt/pipeline.hpp"
#include "adapt/random.hpp"
#include "adapt/solver.hpp"

namespace adapt {

// ------------------------------------------------------------- baselines

inline CoefficientVector fit_target_only(const Dataset& target_train, Link link,
                                         const PenaltyPolicy& policy, std::uint64_t seed) {
  return fit_with_policy(target_train, link, policy, derive_seed(seed, {tag("target-only")}));
}

inline CoefficientVector fit_pooled(const std::vector<Dataset>& sources, const Dataset& target_train,
                                    Link link, const PenaltyPolicy& policy, std::uint64_t seed) {
  if (sources.empty()) return fit_target_only(target_train, link, policy, seed);
  std::vector<Dataset> parts = sources;
  parts.push_back(target_train);
  return fit_with_policy(concatenate(parts), link, policy, derive_seed(seed, {tag("pooled")}));
}

// Maximin over the source models with the Hessian of the null model on the
// current-target training rows.
inline std::pair<CoefficientVector, SimplexWeights> fit_maximin(
    const std::vector<Dataset>& sources, const Dataset& target_train, Link link,
    const PenaltyPolicy& policy, std::uint64_t seed,
    const std::vector<CoefficientVector>* source_fits = nullptr) {
  if (sources.empty()) throw InvalidArgument("maximin needs at least one source dataset");
  std::vector<CoefficientVector> fitted;
  if (source_fits == nullptr) {
    fitted = fit_sources(sources, link, policy, seed);
    source_fits = &fitted;
  }
  const Matrix hess = hessian(CoefficientVector(target_train.dim()), target_train, link);
  return maximin_estimate(source_bank(sources, *source_fits), hess);
}

// ------------------------------------------------------ estimator registry

struct FitContext {
  using SourceProvider = std::function<std::vector<CoefficientVector>()>;

  FitContext(const std::vector<Dataset>& sources_, const Dataset& target_, Link link_,
             const PenaltyPolicy& policy_, std::uint64_t seed_, SourceProvider provider = {})
      : sources(sources_), target(target_), link(link_), policy(policy_), seed(seed_),
        provider_(std::move(provider)) {}

  const std::vector<Dataset>& sources;
  const Dataset& target;
  Link link;
  const PenaltyPolicy& policy;
  std::uint64_t seed;

  // Source fits are shared by every estimator in a cell.
  const std::vector<CoefficientVector>& source_fits() {
    if (!source_fits_)
      source_fits_ = provider_ ? provider_() : fit_sources(sources, link, policy, seed);
    return *source_fits_;
  }

 private:
  SourceProvider provider_;
  std::optional<std::vector<CoefficientVector>> source_fits_;
};

// Source fits keyed by their inputs. Cells of one repetition share the
// historical data, so the fits are computed once and reused across grid
// points (and across sweeps that share the cache). Values are pure
// functions of the key, so sharing never changes a result.
class SourceFitCache {
 public:
  using Fits = std::vector<CoefficientVector>;

  Fits get(std::uint64_t key, const std::function<Fits()>& compute) {
    std::shared_future<Fits> fut;
    std::promise<Fits> promise;
    bool owner = false;
    {
      std::lock_guard lock(mutex_);
      auto it = entries_.find(key);
      if (it == entries_.end()) {
        fut = promise.get_future().share();
        entries_.emplace(key, fut);
        owner = true;
      } else {
        fut = it->second;
      }
    }
    if (owner) {
      try {
        promise.set_value(compute());
      } catch (...) {
        promise.set_exception(std::current_exception());
      }
    }
    return fut.get();
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
  }

 private:
  mutable std::mutex mutex_;
  std::map<std::uint64_t, std::shared_future<Fits>> entries_;
};

namespace detail {

inline std::uint64_t fnv_bytes(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t source_key(const std::vector<Dataset>& sources, Link link,
                                const PenaltyPolicy& policy, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv_bytes(h, &seed, sizeof seed);
  const int header[] = {static_cast<int>(link), policy.folds, policy.grid_size, policy.standardize ? 1 : 0};
  h = fnv_bytes(h, header, sizeof header);
  h = fnv_bytes(h, &policy.mixing, sizeof policy.mixing);
  const double fixed = policy.fixed_lambda.value_or(-1.0);
  h = fnv_bytes(h, &fixed, sizeof fixed);
  for (const auto& d : sources) {
    const Index shape[] = {d.rows(), d.dim()};
    h = fnv_bytes(h, shape, sizeof shape);
    h = fnv_bytes(h, d.features.data(), sizeof(double) * static_cast<std::size_t>(d.features.size()));
    h = fnv_bytes(h, d.outcomes.data(), sizeof(double) * static_cast<std::size_t>(d.outcomes.size()));
  }
  return h;
}

}  // namespace detail

struct EstimatorOutput {
  CoefficientVector beta;
  json diagnostics = json::object();
};

using Estimator = std::function<EstimatorOutput(FitContext&)>;

// Name -> estimator. Third-party methods register here and then appear in
// sweeps under the same result schema.
class EstimatorRegistry {
 public:
  void add(const std::string& name, Estimator fn) { table_[name] = std::move(fn); }
  bool contains(const std::string& name) const { return table_.count(name) > 0; }
  const Estimator& at(const std::string& name) const {
    const auto it = table_.find(name);
    if (it == table_.end()) throw InvalidArgument("unknown method '" + name + "'");
    return it->second;
  }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : table_) out.push_back(k);
    return out;
  }

  static EstimatorRegistry builtin() {
    EstimatorRegistry r;
    r.add("adapt", [](FitContext& c) {
      PipelineOptions opt;
      opt.policy = c.policy;
      const PipelineResult res =
          run_adapt_pipeline(c.sources, c.target, c.link, c.seed, opt, &c.source_fits());
      json d = to_json(res.diagnostics);
      d["weights"] = std::vector<double>(res.weights.gamma.data(),
                                         res.weights.gamma.data() + res.weights.size());
      d["bank_labels"] = res.bank.labels;
      d["target_loss"] = res.target_loss;
      d["combination_loss"] = res.combination_loss;
      return EstimatorOutput{res.beta, d};
    });
    r.add("target_only", [](FitContext& c) {
      return EstimatorOutput{fit_target_only(c.target, c.link, c.policy, c.seed)};
    });
    r.add("pooled", [](FitContext& c) {
      return EstimatorOutput{fit_pooled(c.sources, c.target, c.link, c.policy, c.seed)};
    });
    r.add("maximin", [](FitContext& c) {
      auto [beta, w] = fit_maximin(c.sources, c.target, c.link, c.policy, c.seed, &c.source_fits());
      json d = {{"weights", std::vector<double>(w.gamma.data(), w.gamma.data() + w.size())}};
      return EstimatorOutput{beta, d};
    });
    return r;
  }

 private:
  std::map<std::string, Estimator> table_;
};

// Accepts the hyphenated spelling used on the command line.
inline std::string canonical_method(std::string name) {
  std::replace(name.begin(), name.end(), '-', '_');
  return name;
}

// ----------------------------------------------------------- experiments

struct ExperimentConfig {
  DriftConfig drift;
  std::vector<std::string> methods{"adapt", "target_only", "pooled", "maximin"};
  std::vector<double> rho_grid{0.1, 0.2, 0.5, 1.0};
  std::vector<double> perturb_grid{0.0, 0.3, 0.6, 0.9};
  double perturb_sweep_rho = 0.2;
  int repetitions = 20;
  int current_period = 7;
  int eval_sample_size = 2000;
  std::uint64_t seed = 1;
  Link link = Link::logistic;
  PenaltyPolicy policy;

  void validate(const EstimatorRegistry& registry) const {
    drift.validate();
    auto fail = [](const std::string& m) { throw InvalidArgument("experiment config: " + m); };
    if (methods.empty()) fail("no methods");
    for (const auto& m : methods)
      if (!registry.contains(m)) fail("unknown method '" + m + "'");
    if (repetitions < 1) fail("repetitions must be at least 1");
    if (rho_grid.empty() || perturb_grid.empty()) fail("grids must be non-empty");
    for (double r : rho_grid)
      if (!(r > 0.0 && r <= 1.0)) fail("every rho must lie in (0, 1]");
    for (double q : perturb_grid)
      if (!(q >= 0.0 && q < 1.0)) fail("every perturbation level must lie in [0, 1)");
    if (!(perturb_sweep_rho > 0.0 && perturb_sweep_rho <= 1.0)) fail("perturb_sweep_rho must lie in (0, 1]");
    if (current_period < 1 || current_period > drift.periods) fail("current_period outside [1, periods]");
    if (eval_sample_size < 1) fail("eval_sample_size must be positive");
    if (policy.folds < 2 || policy.grid_size < 1) fail("penalty policy needs folds >= 2 and grid_size >= 1");
  }
};

enum class SweepKind { rho, perturb };

inline std::string_view to_string(SweepKind k) { return k == SweepKind::rho ? "rho" : "perturb"; }

struct ResultRow {
  std::string method;
  int train_period = 0;
  int eval_period = 0;
  double rho = 0.0;
  double p_perturb = 0.0;
  int rep = 0;
  double auc = 0.0;
  std::string train_regime;  // "pre" or "post" relative to the perturbation period
  std::string eval_regime;
};

struct CellFailure {
  std::size_t grid_index = 0;
  int rep = 0;
  std::string method;
  std::string message;
};

struct SweepOptions {
  int threads = 1;
  std::optional<std::filesystem::path> cell_dir;      // completed cells, reused on rerun
  std::optional<std::filesystem::path> artifact_dir;  // models, diagnostics, score vectors
  const EstimatorRegistry* registry = nullptr;        // defaults to the built-ins
  SourceFitCache* source_cache = nullptr;             // shared across sweeps when set
};

struct SweepResult {
  std::vector<ResultRow> rows;
  std::vector<CellFailure> failures;
};

inline const char* kResultHeader = "method,train_period,eval_period,rho,p_perturb,rep,auc,train_regime,eval_regime";

inline std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::string s = std::string(kResultHeader) + "\n";
  for (const auto& r : rows) {
    s += r.method + "," + std::to_string(r.train_period) + "," + std::to_string(r.eval_period) + "," +
         format_double(r.rho) + "," + format_double(r.p_perturb) + "," + std::to_string(r.rep) + "," +
         format_double(r.auc) + "," + r.train_regime + "," + r.eval_regime + "\n";
  }
  return s;
}

inline std::vector<ResultRow> rows_from_csv(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kResultHeader)
    throw InvalidArgument(name + ": not a result file");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 9) throw InvalidArgument(name + ": malformed result row");
    ResultRow r;
    r.method = std::string(c[0]);
    r.train_period = static_cast<int>(parse_double(c[1], name));
    r.eval_period = static_cast<int>(parse_double(c[2], name));
    r.rho = parse_double(c[3], name);
    r.p_perturb = parse_double(c[4], name);
    r.rep = static_cast<int>(parse_double(c[5], name));
    r.auc = parse_double(c[6], name);
    r.train_regime = std::string(c[7]);
    r.eval_regime = std::string(c[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<AucRecord> to_auc_records(const std::vector<ResultRow>& rows) {
  std::vector<AucRecord> out;
  for (const auto& r : rows) out.push_back({r.method, r.train_period, r.eval_period, r.rep, r.auc});
  return out;
}

namespace detail {

struct CellSpec {
  SweepKind kind;
  std::size_t grid_index;
  int rep;
  double rho;
  double p_perturb;
};

inline std::string cell_name(const CellSpec& c) {
  return std::string(to_string(c.kind)) + "_g" + std::to_string(c.grid_index) + "_r" +
         std::to_string(c.rep);
}

inline std::size_t row_hash(const Matrix& x, Index i) {
  std::size_t h = 0;
  for (Index j = 0; j < x.cols(); ++j)
    h = h * 1000003u ^ std::hash<double>{}(x(i, j));
  return h;
}

// Debug audit: evaluation rows must never appear among fitting rows.
inline void audit_disjoint(const Scenario& s) {
  std::set<std::size_t> seen;
  for (const auto& d : s.history)
    for (Index i = 0; i < d.rows(); ++i) seen.insert(row_hash(d.features, i));
  for (Index i = 0; i < s.current.rows(); ++i) seen.insert(row_hash(s.current.features, i));
  for (const auto& d : s.evaluation)
    for (Index i = 0; i < d.rows(); ++i)
      if (seen.count(row_hash(d.features, i)))
        throw SolverError("evaluation row shared with fitting data in period " +
                          std::to_string(d.period.value_or(0)));
}

inline std::string regime(int period, int perturb_period) {
  return period < perturb_period ? "pre" : "post";
}

struct CellOutcome {
  std::vector<ResultRow> rows;
  std::vector<CellFailure> failures;
};

inline CellOutcome run_cell(const ExperimentConfig& cfg, const CellSpec& cell,
                            const EstimatorRegistry& registry, const SweepOptions& opt) {
  DriftConfig drift = cfg.drift;
  drift.rho = cell.rho;
  drift.perturb_level = cell.p_perturb;
  drift.seed = derive_seed(cfg.seed, {tag("scenario"), static_cast<std::uint64_t>(cell.rep)});
  const Scenario sc = generate_scenario(drift, cfg.current_period, cfg.eval_sample_size);
#ifndef NDEBUG
  audit_disjoint(sc);
#endif
  const std::uint64_t fit_seed =
      derive_seed(cfg.seed, {tag("fit"), tag(to_string(cell.kind)), cell.grid_index,
                             static_cast<std::uint64_t>(cell.rep)});
  const std::uint64_t source_seed =
      derive_seed(cfg.seed, {tag("sources"), static_cast<std::uint64_t>(cell.rep)});
  auto compute_sources = [&] { return fit_sources(sc.history, cfg.link, cfg.policy, source_seed); };
  FitContext::SourceProvider provider = compute_sources;
  if (opt.source_cache != nullptr) {
    const std::uint64_t key = source_key(sc.history, cfg.link, cfg.policy, source_seed);
    provider = [&, key] { return opt.source_cache->get(key, compute_sources); };
  }
  FitContext ctx(sc.history, sc.current, cfg.link, cfg.policy, fit_seed, provider);

  CellOutcome out;
  for (const auto& method : cfg.methods) {
    try {
      EstimatorOutput fit = registry.at(method)(ctx);
      std::filesystem::path art;
      if (opt.artifact_dir) {
        art = *opt.artifact_dir / cell_name(cell) / method;
        write_text(art / "model.json", to_json(fit.beta, cfg.link).dump(2) + "\n");
        write_text(art / "diagnostics.json", fit.diagnostics.dump(2) + "\n");
      }
      for (const auto& eval : sc.evaluation) {
        const int period = eval.period.value_or(0);
        const Vector scores = predict_scores(fit.beta, eval, cfg.link);
        ResultRow row{method,
                      cfg.current_period,
                      period,
                      cell.rho,
                      cell.p_perturb,
                      cell.rep,
                      auc(scores, eval.outcomes),
                      regime(cfg.current_period, drift.perturb_period),
                      regime(period, drift.perturb_period)};
        if (opt.artifact_dir) {
          std::string s = "score,label\n";
          for (Index i = 0; i < scores.size(); ++i)
            s += format_double(scores[i]) + "," + format_double(eval.outcomes[i]) + "\n";
          write_text(art / ("scores_p" + std::to_string(period) + ".csv"), s);
        }
        out.rows.push_back(std::move(row));
      }
    } catch (const std::exception& e) {
      out.failures.push_back({cell.grid_index, cell.rep, method, e.what()});
    }
  }
  return out;
}

inline std::string failures_to_csv(const std::vector<CellFailure>& failures) {
  std::string s = "grid_index,rep,method,message\n";
  for (const auto& f : failures) {
    std::string msg = f.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    s += std::to_string(f.grid_index) + "," + std::to_string(f.rep) + "," + f.method + "," + msg + "\n";
  }
  return s;
}

inline std::vector<CellFailure> failures_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<CellFailure> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 4) throw InvalidArgument("malformed cell failure record");
    out.push_back({static_cast<std::size_t>(parse_double(c[0], "failures")),
                   static_cast<int>(parse_double(c[1], "failures")), std::string(c[2]),
                   std::string(c[3])});
  }
  return out;
}

}  // namespace detail

inline SweepResult run_sweep(const ExperimentConfig& cfg, SweepKind kind, const SweepOptions& opt = {}) {
  const EstimatorRegistry builtin = EstimatorRegistry::builtin();
  const EstimatorRegistry& registry = opt.registry ? *opt.registry : builtin;
  cfg.validate(registry);

  std::vector<detail::CellSpec> cells;
  const auto& grid = kind == SweepKind::rho ? cfg.rho_grid : cfg.perturb_grid;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      if (kind == SweepKind::rho)
        cells.push_back({kind, g, rep, grid[g], cfg.drift.perturb_level});
      else
        cells.push_back({kind, g, rep, cfg.perturb_sweep_rho, grid[g]});
    }
  }

  SourceFitCache local_cache;
  SweepOptions run_opt = opt;
  if (run_opt.source_cache == nullptr) run_opt.source_cache = &local_cache;

  std::vector<detail::CellOutcome> outcomes(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        const auto& cell = cells[i];
        if (opt.cell_dir) {
          const auto rows_file = *opt.cell_dir / (detail::cell_name(cell) + ".csv");
          const auto fail_file = *opt.cell_dir / (detail::cell_name(cell) + ".failures.csv");
          if (std::filesystem::exists(rows_file) && std::filesystem::exists(fail_file)) {
            outcomes[i].rows = rows_from_csv(read_text(rows_file), rows_file.string());
            outcomes[i].failures = detail::failures_from_csv(read_text(fail_file));
            continue;
          }
          outcomes[i] = detail::run_cell(cfg, cell, registry, run_opt);
          // Failures file last: its presence marks the cell complete.
          write_text(rows_file, rows_to_csv(outcomes[i].rows));
          write_text(fail_file, detail::failures_to_csv(outcomes[i].failures));
        } else {
          outcomes[i] = detail::run_cell(cfg, cell, registry, run_opt);
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };

  const int threads = std::max(1, opt.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  SweepResult result;
  for (auto& o : outcomes) {
    result.rows.insert(result.rows.end(), o.rows.begin(), o.rows.end());
    result.failures.insert(result.failures.end(), o.failures.begin(), o.failures.end());
  }
  return result;
}

inline SweepResult run_rho_sweep(const ExperimentConfig& cfg, const SweepOptions& opt = {}) {
  return run_sweep(cfg, SweepKind::rho, opt);
}

inline SweepResult run_perturb_sweep(const ExperimentConfig& cfg, const SweepOptions& opt = {}) {
  return run_sweep(cfg, SweepKind::perturb, opt);
}

// ------------------------------------------------------------- summaries

struct SummaryRow {
  std::string method;
  int train_period = 0;
  int eval_period = 0;
  double rho = 0.0;
  double p_perturb = 0.0;
  std::string train_regime;
  std::string eval_regime;
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;
};

namespace detail {

inline std::pair<double, double> mean_sd(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
}

// Method order follows first appearance in `rows`.
inline std::vector<std::string> method_order(const std::vector<ResultRow>& rows) {
  std::vector<std::string> order;
  for (const auto& r : rows)
    if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);
  return order;
}

}  // namespace detail

// Mean and standard deviation over repetitions per (method, rho, level, eval period).
inline std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  const auto order = detail::method_order(rows);
  using Key = std::tuple<std::size_t, double, double, int, int>;
  std::map<Key, std::pair<SummaryRow, std::vector<double>>> groups;
  for (const auto& r : rows) {
    const std::size_t m = static_cast<std::size_t>(
        std::find(order.begin(), order.end(), r.method) - order.begin());
    auto& g = groups[{m, r.rho, r.p_perturb, r.train_period, r.eval_period}];
    if (g.second.empty())
      g.first = {r.method, r.train_period, r.eval_period, r.rho, r.p_perturb, r.train_regime, r.eval_regime};
    g.second.push_back(r.auc);
  }
  std::vector<SummaryRow> out;
  for (auto& [_, g] : groups) {
    g.first.n = static_cast<int>(g.second.size());
    std::tie(g.first.mean, g.first.sd) = detail::mean_sd(g.second);
    out.push_back(g.first);
  }
  return out;
}

inline std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
  std::string s = "method,train_period,eval_period,rho,p_perturb,train_regime,eval_regime,n,mean_auc,sd_auc\n";
  for (const auto& r : rows)
    s += r.method + "," + std::to_string(r.train_period) + "," + std::to_string(r.eval_period) + "," +
         format_double(r.rho) + "," + format_double(r.p_perturb) + "," + r.train_regime + "," +
         r.eval_regime + "," + std::to_string(r.n) + "," + format_double(r.mean) + "," +
         format_double(r.sd) + "\n";
  return s;
}

struct WorstFutureRow {
  std::string method;
  double rho = 0.0;
  double p_perturb = 0.0;
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;
};

// Per repetition, the worst AUC over periods after the training period;
// then mean and sd over repetitions.
inline std::vector<WorstFutureRow> summarize_worst_future(const std::vector<ResultRow>& rows) {
  const auto order = detail::method_order(rows);
  using Key = std::tuple<std::size_t, double, double>;
  std::map<Key, std::map<int, AucTable>> per_rep;
  for (const auto& r : rows) {
    const std::size_t m = static_cast<std::size_t>(
        std::find(order.begin(), order.end(), r.method) - order.begin());
    per_rep[{m, r.rho, r.p_perturb}][r.rep].set(r.train_period, r.eval_period, r.auc);
  }
  std::vector<WorstFutureRow> out;
  for (const auto& [key, reps] : per_rep) {
    std::vector<double> worst;
    for (const auto& [rep, table] : reps) {
      const int train = table.entries.begin()->first.first;
      try {
        worst.push_back(worst_future_auc(table, train));
      } catch (const MetricError&) {
      }
    }
    if (worst.empty()) continue;
    WorstFutureRow w{order[std::get<0>(key)], std::get<1>(key), std::get<2>(key),
                     static_cast<int>(worst.size())};
    std::tie(w.mean, w.sd) = detail::mean_sd(worst);
    out.push_back(w);
  }
  return out;
}

inline std::string worst_future_to_csv(const std::vector<WorstFutureRow>& rows) {
  std::string s = "method,rho,p_perturb,n,mean_worst_future_auc,sd_worst_future_auc\n";
  for (const auto& r : rows)
    s += r.method + "," + format_double(r.rho) + "," + format_double(r.p_perturb) + "," +
         std::to_string(r.n) + "," + format_double(r.mean) + "," + format_double(r.sd) + "\n";
  return s;
}

// --------------------------------------------------------- config files

inline json to_json(const ExperimentConfig& c) {
  json policy = {{"mixing", c.policy.mixing},
                 {"folds", c.policy.folds},
                 {"grid_size", c.policy.grid_size},
                 {"standardize", c.policy.standardize}};
  if (c.policy.fixed_lambda) policy["lambda"] = *c.policy.fixed_lambda;
  return {{"drift", to_json(c.drift)},
          {"methods", c.methods},
          {"rho_grid", c.rho_grid},
          {"perturb_grid", c.perturb_grid},
          {"perturb_sweep_rho", c.perturb_sweep_rho},
          {"repetitions", c.repetitions},
          {"current_period", c.current_period},
          {"eval_sample_size", c.eval_sample_size},
          {"seed", c.seed},
          {"link", std::string(to_string(c.link))},
          {"penalty", policy}};
}

inline ExperimentConfig experiment_config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("experiment config must be a JSON object");
  static const std::set<std::string> known{"drift",        "methods",        "rho_grid",
                                           "perturb_grid", "perturb_sweep_rho", "repetitions",
                                           "current_period", "eval_sample_size", "seed",
                                           "link",         "penalty"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw InvalidArgument("experiment config: unknown field '" + key + "'");
  ExperimentConfig c;
  try {
    if (j.contains("drift")) c.drift = drift_config_from_json(j.at("drift"));
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j.at("methods")) c.methods.push_back(canonical_method(m.get<std::string>()));
    }
    c.rho_grid = j.value("rho_grid", c.rho_grid);
    c.perturb_grid = j.value("perturb_grid", c.perturb_grid);
    c.perturb_sweep_rho = j.value("perturb_sweep_rho", c.perturb_sweep_rho);
    c.repetitions = j.value("repetitions", c.repetitions);
    c.current_period = j.value("current_period", c.current_period);
    c.eval_sample_size = j.value("eval_sample_size", c.eval_sample_size);
    c.seed = j.value("seed", c.seed);
    if (j.contains("link")) c.link = parse_link(j.at("link").get<std::string>());
    if (j.contains("penalty")) {
      const json& p = j.at("penalty");
      c.policy.mixing = p.value("mixing", c.policy.mixing);
      c.policy.folds = p.value("folds", c.policy.folds);
      c.policy.grid_size = p.value("grid_size", c.policy.grid_size);
      c.policy.standardize = p.value("standardize", c.policy.standardize);
      if (p.contains("lambda")) c.policy.fixed_lambda = p.at("lambda").get<double>();
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("experiment config: ") + e.what());
  }
  return c;
}

}  // namespace adapt
