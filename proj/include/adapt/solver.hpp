#pragma once

// Drift-robust aggregation of period models.
//
// A model bank stacks the current-target estimate and the source (historical)
// estimates as columns. Candidate future models are convex combinations of
// the columns; the uncertainty set keeps those whose held-out target loss
// stays below tau. The robust estimate is the member of that set closest to
// an anchor model in the Hessian norm:
//
//   min_gamma (b - B gamma)' H (b - B gamma)
//   s.t. gamma in simplex, loss(B gamma; held-out) <= tau.
//
// The maximin baseline is the same problem with a zero anchor and no loss
// constraint.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "adapt/error.hpp"
#include "adapt/glm.hpp"
#include "adapt/random.hpp"
#include "adapt/simplex.hpp"

namespace adapt {

// Column order: current-target estimate first (when present), then sources
// in ascending period order.
struct ModelBank {
  std::vector<CoefficientVector> columns;
  std::vector<int> labels;

  Index width() const { return static_cast<Index>(columns.size()); }
  Index dim() const { return columns.empty() ? 0 : columns.front().dim(); }

  void validate() const {
    if (columns.empty()) throw InvalidArgument("model bank is empty");
    for (const auto& c : columns) {
      if (c.dim() != columns.front().dim())
        throw DimensionError("model bank columns disagree in dimension");
      if (!c.finite()) throw InvalidArgument("model bank column has non-finite entries");
    }
    if (!labels.empty() && labels.size() != columns.size())
      throw DimensionError("model bank labels do not match column count");
  }

  // (p+1) x K matrix of stacked (intercept, slopes) columns.
  Matrix matrix() const {
    validate();
    Matrix b(dim() + 1, width());
    for (Index k = 0; k < width(); ++k) b.col(k) = columns[static_cast<std::size_t>(k)].stacked();
    return b;
  }
};

struct SimplexWeights {
  Vector gamma;

  static SimplexWeights uniform(Index k) { return {Vector::Constant(k, 1.0 / static_cast<double>(k))}; }
  static SimplexWeights vertex(Index k, Index at) {
    Vector g = Vector::Zero(k);
    g[at] = 1.0;
    return {g};
  }

  Index size() const { return gamma.size(); }

  bool valid(double tol = 1e-10) const {
    return gamma.size() > 0 && gamma.allFinite() && gamma.minCoeff() >= 0.0 &&
           std::abs(gamma.sum() - 1.0) <= tol;
  }
};

inline CoefficientVector combine(const ModelBank& bank, const SimplexWeights& weights) {
  bank.validate();
  if (weights.size() != bank.width())
    throw DimensionError("weight length " + std::to_string(weights.size()) +
                         " does not match bank width " + std::to_string(bank.width()));
  CoefficientVector out(bank.dim());
  for (Index k = 0; k < bank.width(); ++k) {
    const auto& c = bank.columns[static_cast<std::size_t>(k)];
    const double g = weights.gamma[k];
    if (g == 0.0) continue;
    out.intercept += g * c.intercept;
    out.slopes += g * c.slopes;
  }
  return out;
}

namespace detail {

// Held-out loss as a function of the weights, with eta = (X~ B) gamma
// precomputed.
class BankLoss {
 public:
  BankLoss(const ModelBank& bank, const Dataset& data, Link link)
      : y_(data.outcomes), link_(link) {
    data.validate(link);
    if (bank.dim() != data.dim())
      throw DimensionError("bank dimension does not match evaluation data");
    const Matrix b = bank.matrix();
    design_ = data.features * b.bottomRows(data.dim());
    design_.rowwise() += b.row(0);
  }

  double operator()(const Vector& gamma) const { return mean_nll(design_ * gamma, y_, link_); }

  double operator()(const Vector& gamma, Vector& grad) const {
    const Vector eta = design_ * gamma;
    const Vector resid = mean_response(eta, link_) - y_;
    grad = design_.transpose() * resid / static_cast<double>(y_.size());
    return mean_nll(eta, y_, link_);
  }

 private:
  Matrix design_;
  const Vector& y_;
  Link link_;
};

// (b - B gamma)' H (b - B gamma) = gamma' G gamma - 2 c' gamma + a.
class BankQuadratic {
 public:
  BankQuadratic(const ModelBank& bank, const CoefficientVector& anchor, const Matrix& hess,
                double ridge) {
    const Index d = bank.dim() + 1;
    if (hess.rows() != d || hess.cols() != d)
      throw DimensionError("Hessian must be " + std::to_string(d) + "x" + std::to_string(d));
    if (anchor.dim() != bank.dim()) throw DimensionError("anchor dimension does not match bank");
    Matrix h = 0.5 * (hess + hess.transpose());
    h.diagonal().array() += ridge;
    const Matrix b = bank.matrix();
    const Vector a = anchor.stacked();
    const Matrix hb = h * b;
    gram_ = b.transpose() * hb;
    cross_ = hb.transpose() * a;
    constant_ = a.dot(h * a);
  }

  double operator()(const Vector& gamma) const {
    return std::max(0.0, gamma.dot(gram_ * gamma) - 2.0 * cross_.dot(gamma) + constant_);
  }

  double operator()(const Vector& gamma, Vector& grad) const {
    const Vector gg = gram_ * gamma;
    grad = 2.0 * (gg - cross_);
    return std::max(0.0, gamma.dot(gg) - 2.0 * cross_.dot(gamma) + constant_);
  }

 private:
  Matrix gram_;
  Vector cross_;
  double constant_ = 0.0;
};

}  // namespace detail

// Convex combinations of `bank` whose loss on `eval_data` is at most tau.
struct UncertaintySet {
  ModelBank bank;
  double tau = std::numeric_limits<double>::infinity();
  Dataset eval_data;
  Link link = Link::logistic;

  double loss(const SimplexWeights& w) const {
    return negative_log_likelihood(combine(bank, w), eval_data, link);
  }

  bool contains(const SimplexWeights& w) const {
    if (w.size() != bank.width() || !w.valid()) return false;
    return !std::isfinite(tau) || loss(w) <= tau + 1e-9;
  }
};

struct SolverOptions {
  double hessian_ridge = 1e-8;
  double constraint_tolerance = 1e-6;  // |loss - tau| at termination
  double slackness_tolerance = 1e-9;   // mu * (tau - loss) at termination
  int max_bisections = 200;
  ProjectedGradientOptions inner;
};

struct AdaptDiagnostics {
  double objective = 0.0;
  double constraint_value = 0.0;  // held-out loss at the solution
  double tau = 0.0;
  double slack = 0.0;             // tau - constraint_value
  double mu = 0.0;                // Lagrange multiplier of the loss constraint
  double kkt_residual = 0.0;
  double complementary_slackness = 0.0;
  int iterations = 0;             // projected-gradient iterations, summed
  int bisections = 0;
  bool constraint_active = false;
  bool converged = true;
  std::vector<Index> support;     // bank columns with positive weight
  std::string termination;
};

struct AdaptResult {
  CoefficientVector beta;
  SimplexWeights weights;
  AdaptDiagnostics diagnostics;
};

namespace detail {

inline std::vector<Index> support_of(const Vector& gamma) {
  std::vector<Index> s;
  for (Index k = 0; k < gamma.size(); ++k)
    if (gamma[k] > 0.0) s.push_back(k);
  return s;
}

}  // namespace detail

// Solves the anchored quadratic over the uncertainty set by bisection on
// the multiplier of the loss constraint. For fixed mu the Lagrangian
// Q(gamma) + mu * loss(gamma) is convex on the simplex and minimized by
// projected gradient; the held-out loss of that minimizer is nonincreasing
// in mu. The returned weights always come from the feasible side of the
// bracket.
inline AdaptResult adapt_estimate(const UncertaintySet& set, const CoefficientVector& anchor,
                                  const Matrix& hess, const SolverOptions& opt = {}) {
  set.bank.validate();
  if (!(set.tau >= 0.0)) throw InvalidArgument("tau must be nonnegative");
  const Index k = set.bank.width();
  const bool constrained = std::isfinite(set.tau);
  const detail::BankQuadratic quad(set.bank, anchor, hess, opt.hessian_ridge);

  AdaptResult out;
  AdaptDiagnostics& diag = out.diagnostics;
  diag.tau = set.tau;

  std::optional<detail::BankLoss> loss;
  if (constrained) loss.emplace(set.bank, set.eval_data, set.link);

  auto finish = [&](Vector gamma, double mu, const std::string& why) {
    out.weights.gamma = std::move(gamma);
    out.beta = combine(set.bank, out.weights);
    Vector gq;
    diag.objective = quad(out.weights.gamma, gq);
    diag.mu = mu;
    diag.support = detail::support_of(out.weights.gamma);
    diag.termination = why;
    if (constrained) {
      Vector gl;
      diag.constraint_value = (*loss)(out.weights.gamma, gl);
      diag.slack = set.tau - diag.constraint_value;
      diag.complementary_slackness = mu * std::abs(diag.slack);
      gq += mu * gl;
    } else {
      diag.constraint_value = std::numeric_limits<double>::quiet_NaN();
      diag.slack = std::numeric_limits<double>::infinity();
    }
    diag.constraint_active = mu > 0.0;
    diag.kkt_residual = simplex_kkt_residual(out.weights.gamma, gq);
    return out;
  };

  // The anchor itself is a bank column inside the set: the objective is
  // zero there, so return that vertex exactly.
  for (Index j = 0; j < k; ++j) {
    if (set.bank.columns[static_cast<std::size_t>(j)] == anchor) {
      const SimplexWeights e = SimplexWeights::vertex(k, j);
      if (!constrained || (*loss)(e.gamma) <= set.tau)
        return finish(e.gamma, 0.0, "anchor column feasible");
    }
  }

  auto solve_at = [&](double mu, const Vector& start) {
    auto f = [&](const Vector& g, Vector& grad) {
      double value = quad(g, grad);
      if (mu > 0.0) {
        Vector gl;
        value += mu * (*loss)(g, gl);
        grad += mu * gl;
      }
      return value;
    };
    ProjectedGradientResult r = minimize_on_simplex(f, start, opt.inner);
    diag.iterations += r.iterations;
    diag.converged = diag.converged && r.converged;
    return r.x;
  };

  const Vector uniform = SimplexWeights::uniform(k).gamma;
  Vector free_solution = solve_at(0.0, uniform);
  if (!constrained) return finish(free_solution, 0.0, "unconstrained");
  if ((*loss)(free_solution) <= set.tau) return finish(free_solution, 0.0, "constraint inactive");

  // The set must be nonempty: check the loss minimizer over the simplex.
  const ProjectedGradientResult best_fit =
      minimize_on_simplex([&](const Vector& g, Vector& grad) { return (*loss)(g, grad); }, uniform,
                          opt.inner);
  if (best_fit.value > set.tau + 1e-9)
    throw SolverError("uncertainty set is empty: smallest attainable held-out loss " +
                      std::to_string(best_fit.value) + " exceeds tau " + std::to_string(set.tau));

  double mu_lo = 0.0;
  double mu_hi = 1.0;
  Vector gamma_hi = solve_at(mu_hi, free_solution);
  double loss_hi = (*loss)(gamma_hi);
  while (loss_hi > set.tau) {
    ++diag.bisections;
    mu_lo = mu_hi;
    mu_hi *= 4.0;
    if (mu_hi > 1e14 || diag.bisections > opt.max_bisections) {
      // tau sits at the bottom of the loss range: only the loss minimizer fits.
      Vector g = best_fit.x;
      if ((*loss)(g) > set.tau) g = project_to_simplex(g);
      diag.converged = false;
      return finish(g, mu_hi, "multiplier bracket exhausted");
    }
    gamma_hi = solve_at(mu_hi, gamma_hi);
    loss_hi = (*loss)(gamma_hi);
  }

  std::string why = "bisection interval collapsed";
  while (diag.bisections < opt.max_bisections) {
    const double slack = set.tau - loss_hi;
    if (slack <= opt.constraint_tolerance && mu_hi * slack <= opt.slackness_tolerance) {
      why = "constraint met";
      break;
    }
    const double mid = 0.5 * (mu_lo + mu_hi);
    if (!(mid > mu_lo && mid < mu_hi)) break;
    ++diag.bisections;
    const Vector gamma_mid = solve_at(mid, gamma_hi);
    const double loss_mid = (*loss)(gamma_mid);
    if (loss_mid <= set.tau) {
      mu_hi = mid;
      gamma_hi = gamma_mid;
      loss_hi = loss_mid;
    } else {
      mu_lo = mid;
    }
  }
  return finish(gamma_hi, mu_hi, why);
}

// Group-robust baseline: the simplex combination of `source_bank` with the
// smallest Hessian norm (zero anchor, no loss constraint).
inline std::pair<CoefficientVector, SimplexWeights> maximin_estimate(const ModelBank& source_bank,
                                                                     const Matrix& hess,
                                                                     const SolverOptions& opt = {}) {
  UncertaintySet unconstrained{source_bank, std::numeric_limits<double>::infinity(), {},
                               Link::logistic};
  AdaptResult r = adapt_estimate(unconstrained, CoefficientVector(source_bank.dim()), hess, opt);
  return {std::move(r.beta), std::move(r.weights)};
}

// The convex combination of source models that best fits `eval_data`.
inline std::pair<SimplexWeights, CoefficientVector> best_source_combination(
    const ModelBank& source_bank, const Dataset& eval_data, Link link,
    const ProjectedGradientOptions& opt = {}) {
  source_bank.validate();
  const detail::BankLoss loss(source_bank, eval_data, link);
  const Index k = source_bank.width();
  const ProjectedGradientResult r = minimize_on_simplex(
      [&](const Vector& g, Vector& grad) { return loss(g, grad); },
      SimplexWeights::uniform(k).gamma, opt);
  SimplexWeights w{r.x};
  CoefficientVector beta = combine(source_bank, w);
  return {std::move(w), std::move(beta)};
}

// Midpoint of the held-out losses of the target-only estimate and of the
// best source combination.
inline double select_tau(const CoefficientVector& target_est, const CoefficientVector& beta_tilde,
                         const Dataset& eval_data, Link link) {
  return 0.5 * (negative_log_likelihood(target_est, eval_data, link) +
                negative_log_likelihood(beta_tilde, eval_data, link));
}

}  // namespace adapt
