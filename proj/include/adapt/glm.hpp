#pragma once

// Generalized linear model primitives: the mean negative log-likelihood,
// its derivatives, and elastic-net penalized estimation by coordinate
// descent. Every loss in the library is a per-sample mean, so losses on
// datasets of different sizes are directly comparable.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adapt/error.hpp"
#include "adapt/random.hpp"

namespace adapt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class Link { logistic, identity };

inline std::string_view to_string(Link link) {
  return link == Link::logistic ? "logistic" : "identity";
}

inline Link parse_link(std::string_view name) {
  if (name == "logistic") return Link::logistic;
  if (name == "identity") return Link::identity;
  throw InvalidArgument("unknown link '" + std::string(name) + "'");
}

// One period's design matrix and outcomes.
struct Dataset {
  Matrix features;
  Vector outcomes;
  std::optional<int> period;

  Index rows() const { return features.rows(); }
  Index dim() const { return features.cols(); }

  void validate(Link link) const {
    if (features.rows() < 1 || features.cols() < 1)
      throw DimensionError("dataset needs at least one row and one feature column");
    if (outcomes.size() != features.rows())
      throw DimensionError("outcome length " + std::to_string(outcomes.size()) +
                           " does not match " + std::to_string(features.rows()) +
                           " feature rows");
    if (link == Link::logistic) {
      for (Index i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i] != 0.0 && outcomes[i] != 1.0)
          throw InvalidArgument("logistic link needs binary outcomes; row " +
                                std::to_string(i) + " holds " + std::to_string(outcomes[i]));
      }
    }
  }

  Dataset subset(std::span<const std::size_t> rows_to_keep) const {
    Dataset out;
    out.features.resize(static_cast<Index>(rows_to_keep.size()), features.cols());
    out.outcomes.resize(static_cast<Index>(rows_to_keep.size()));
    for (std::size_t k = 0; k < rows_to_keep.size(); ++k) {
      const auto i = static_cast<Index>(rows_to_keep[k]);
      out.features.row(static_cast<Index>(k)) = features.row(i);
      out.outcomes[static_cast<Index>(k)] = outcomes[i];
    }
    out.period = period;
    return out;
  }
};

// Row-wise concatenation; the result carries the period label of the last part.
inline Dataset concatenate(std::span<const Dataset> parts) {
  if (parts.empty()) throw InvalidArgument("nothing to concatenate");
  Index rows = 0;
  const Index p = parts.front().dim();
  for (const auto& d : parts) {
    if (d.dim() != p) throw DimensionError("cannot concatenate datasets of different width");
    rows += d.rows();
  }
  Dataset out;
  out.features.resize(rows, p);
  out.outcomes.resize(rows);
  Index at = 0;
  for (const auto& d : parts) {
    out.features.middleRows(at, d.rows()) = d.features;
    out.outcomes.segment(at, d.rows()) = d.outcomes;
    at += d.rows();
  }
  out.period = parts.back().period;
  return out;
}

struct CoefficientVector {
  double intercept = 0.0;
  Vector slopes;

  CoefficientVector() = default;
  explicit CoefficientVector(Index p) : slopes(Vector::Zero(p)) {}
  CoefficientVector(double b0, Vector s) : intercept(b0), slopes(std::move(s)) {}

  Index dim() const { return slopes.size(); }

  // (intercept, slopes) as one length-(p+1) vector.
  Vector stacked() const {
    Vector v(slopes.size() + 1);
    v[0] = intercept;
    v.tail(slopes.size()) = slopes;
    return v;
  }

  static CoefficientVector from_stacked(const Vector& v) {
    if (v.size() < 2) throw DimensionError("stacked coefficients need length >= 2");
    return {v[0], v.tail(v.size() - 1)};
  }

  bool finite() const { return std::isfinite(intercept) && slopes.allFinite(); }

  friend bool operator==(const CoefficientVector& a, const CoefficientVector& b) {
    return a.intercept == b.intercept && a.slopes.size() == b.slopes.size() &&
           a.slopes == b.slopes;
  }
};

// Elastic net: lambda * (mixing * |b|_1 + (1 - mixing) / 2 * |b|_2^2).
struct PenaltyConfig {
  double lambda = 0.0;
  double mixing = 1.0;
  bool standardize = true;

  void validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
      throw InvalidArgument("penalty lambda must be finite and nonnegative");
    if (!(mixing >= 0.0 && mixing <= 1.0))
      throw InvalidArgument("penalty mixing must lie in [0, 1]");
  }
};

namespace detail {

inline void check_compatible(const CoefficientVector& beta, const Dataset& data, Link link) {
  data.validate(link);
  if (beta.dim() != data.dim())
    throw DimensionError("coefficient dimension " + std::to_string(beta.dim()) +
                         " does not match " + std::to_string(data.dim()) + " features");
}

inline double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

// log(1 + exp(eta)) without overflow.
inline double softplus(double eta) {
  return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

inline double mean_nll(const Vector& eta, const Vector& y, Link link) {
  const Index n = y.size();
  double total = 0.0;
  if (link == Link::logistic) {
    for (Index i = 0; i < n; ++i) total += softplus(eta[i]) - y[i] * eta[i];
  } else {
    for (Index i = 0; i < n; ++i) {
      const double r = y[i] - eta[i];
      total += 0.5 * r * r;
    }
  }
  return total / static_cast<double>(n);
}

inline Vector mean_response(const Vector& eta, Link link) {
  if (link == Link::identity) return eta;
  return eta.unaryExpr([](double e) { return sigmoid(e); });
}

inline double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

}  // namespace detail

inline Vector linear_predictor(const CoefficientVector& beta, const Matrix& features) {
  return (features * beta.slopes).array() + beta.intercept;
}

// Mean per-sample negative log-likelihood. The identity link uses the
// Gaussian loss with unit variance, i.e. half the mean squared error.
inline double negative_log_likelihood(const CoefficientVector& beta, const Dataset& data,
                                      Link link) {
  detail::check_compatible(beta, data, link);
  return detail::mean_nll(linear_predictor(beta, data.features), data.outcomes, link);
}

// Gradient of the mean NLL with respect to (intercept, slopes).
inline Vector gradient(const CoefficientVector& beta, const Dataset& data, Link link) {
  detail::check_compatible(beta, data, link);
  const Vector residual =
      detail::mean_response(linear_predictor(beta, data.features), link) - data.outcomes;
  const double n = static_cast<double>(data.rows());
  Vector g(data.dim() + 1);
  g[0] = residual.sum() / n;
  g.tail(data.dim()) = data.features.transpose() * residual / n;
  return g;
}

// Hessian of the mean NLL: X~' W X~ / n over the intercept-augmented design.
inline Matrix hessian(const CoefficientVector& beta, const Dataset& data, Link link) {
  detail::check_compatible(beta, data, link);
  const Index n = data.rows();
  const Index p = data.dim();
  Vector w = Vector::Ones(n);
  if (link == Link::logistic) {
    const Vector mu = detail::mean_response(linear_predictor(beta, data.features), link);
    w = mu.array() * (1.0 - mu.array());
  }
  Matrix augmented(n, p + 1);
  augmented.col(0).setOnes();
  augmented.rightCols(p) = data.features;
  Matrix h = Matrix::Zero(p + 1, p + 1);
  h.selfadjointView<Eigen::Lower>().rankUpdate(
      (augmented.array().colwise() * w.array().sqrt()).matrix().transpose());
  h = h.selfadjointView<Eigen::Lower>();
  return h / static_cast<double>(n);
}

inline Vector predict_scores(const CoefficientVector& beta, const Dataset& data, Link link) {
  if (beta.dim() != data.dim())
    throw DimensionError("coefficient dimension " + std::to_string(beta.dim()) +
                         " does not match " + std::to_string(data.dim()) + " features");
  return detail::mean_response(linear_predictor(beta, data.features), link);
}

// --------------------------------------------------------------------------
// Penalized estimation
// --------------------------------------------------------------------------

struct FitOptions {
  double tolerance = 1e-8;   // max coefficient change between sweeps
  int max_iterations = 10000;
  bool monitor = false;      // record the objective after every outer step
};

struct FitResult {
  CoefficientVector beta;
  double objective = 0.0;  // mean NLL + penalty, in the solver's coordinates
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

// Column centering and (optionally) scaling. Constant columns are flagged
// inactive and always receive a zero slope.
class Standardization {
 public:
  Standardization(const Matrix& x, bool scale) : center_(x.cols()), scale_(x.cols()) {
    const double n = static_cast<double>(x.rows());
    active_.resize(static_cast<std::size_t>(x.cols()));
    for (Index j = 0; j < x.cols(); ++j) {
      center_[j] = x.col(j).sum() / n;
      const double var = (x.col(j).array() - center_[j]).square().sum() / n;
      const double magnitude = std::max(1.0, center_[j] * center_[j]);
      active_[static_cast<std::size_t>(j)] = var > 1e-14 * magnitude;
      scale_[j] = (scale && active_[static_cast<std::size_t>(j)]) ? std::sqrt(var) : 1.0;
    }
  }

  Matrix transform(const Matrix& x) const {
    Matrix z = (x.rowwise() - center_.transpose()).array().rowwise() / scale_.transpose().array();
    for (Index j = 0; j < z.cols(); ++j)
      if (!active(j)) z.col(j).setZero();
    return z;
  }

  // Solver coordinates -> original scale.
  CoefficientVector to_original(double b0, const Vector& theta) const {
    CoefficientVector beta(theta.size());
    beta.slopes = theta.cwiseQuotient(scale_);
    beta.intercept = b0 - center_.dot(beta.slopes);
    return beta;
  }

  void to_solver(const CoefficientVector& beta, double& b0, Vector& theta) const {
    theta = beta.slopes.cwiseProduct(scale_);
    for (Index j = 0; j < theta.size(); ++j)
      if (!active(j)) theta[j] = 0.0;
    b0 = beta.intercept + center_.dot(theta.cwiseQuotient(scale_));
  }

  bool active(Index j) const { return active_[static_cast<std::size_t>(j)]; }
  const Vector& center() const { return center_; }
  const Vector& scale() const { return scale_; }

 private:
  Vector center_;
  Vector scale_;
  std::vector<bool> active_;
};

namespace detail {

inline double penalty_value(const Vector& theta, const PenaltyConfig& pen) {
  return pen.lambda * (pen.mixing * theta.lpNorm<1>() +
                       0.5 * (1.0 - pen.mixing) * theta.squaredNorm());
}

// Intercept of the slope-free model.
inline double null_intercept(const Vector& y, Link link) {
  const double ybar = y.mean();
  if (link == Link::identity) return ybar;
  if (ybar <= 0.0 || ybar >= 1.0)
    throw SolverError("logistic fit on a single-class outcome vector: intercept diverges");
  return std::log(ybar / (1.0 - ybar));
}

// Cyclic coordinate descent on a weighted least-squares problem
//   (1/2n) sum_i w_i (r_i - d0 - z_i' d)^2 + penalty(theta + d),
// where r is the working residual. Updates theta, b0 and r in place.
// Sweeps alternate between all active coordinates and the current nonzero
// set until a full sweep changes nothing beyond the tolerance.
class WeightedLeastSquaresCd {
 public:
  WeightedLeastSquaresCd(const Matrix& z, const Standardization& st, const PenaltyConfig& pen,
                         double tol, int max_sweeps)
      : z_(z), st_(st), pen_(pen), tol_(tol), max_sweeps_(max_sweeps) {}

  // Minimizes (1/2n) sum w_i (r_i - d0 - z_i'dtheta)^2 + penalty over the
  // updates to (b0, theta); `r` is the working residual at the start.
  // Sweeps stop once no coordinate moves by `tol` (default: the
  // constructor tolerance). Returns false if the sweep cap was hit.
  //
  // Inner products are maintained either through the weighted Gram matrix
  // (O(p) per coordinate after an O(n p^2) setup) or through the residual
  // vector (O(n) per coordinate). The choice follows the sweep count of the
  // previous call.
  bool solve(const Vector& w, double& b0, Vector& theta, const Vector& r, double tol = 0.0) {
    if (tol <= 0.0) tol = tol_;
    const Index p = z_.cols();
    const double n = static_cast<double>(z_.rows());
    const double wsum = w.sum();
    const bool unit = (w.array() == 1.0).all();
    Matrix weighted;
    if (!unit) weighted = z_.array().colwise() * w.array();
    const Matrix& wz = unit ? z_ : weighted;
    const double l1 = pen_.lambda * pen_.mixing;
    const double l2 = pen_.lambda * (1.0 - pen_.mixing);
    const bool gram_mode =
        p <= 1000 && static_cast<double>(last_sweeps_) * 4.0 > static_cast<double>(p);

    // q_j = z_j' W r / n and q0 = 1' W r / n track the current residual.
    Vector q = wz.transpose() * r / n;
    double q0 = (unit ? r.sum() : r.dot(w)) / n;
    const Vector s = wz.colwise().sum().transpose() / n;  // z_j' W 1 / n
    Matrix gram;
    Vector curvature(p);
    Vector resid;
    if (gram_mode) {
      gram = Matrix::Zero(p, p);
      if (unit) {
        gram.selfadjointView<Eigen::Lower>().rankUpdate(z_.transpose(), 1.0 / n);
      } else {
        const Matrix root = z_.array().colwise() * w.array().sqrt();
        gram.selfadjointView<Eigen::Lower>().rankUpdate(root.transpose(), 1.0 / n);
      }
      gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
      curvature = gram.diagonal();
    } else {
      resid = r;
      for (Index j = 0; j < p; ++j) curvature[j] = wz.col(j).dot(z_.col(j)) / n;
    }
    for (Index j = 0; j < p; ++j)
      if (!st_.active(j)) curvature[j] = 0.0;

    auto sweep = [&](bool all) {
      double max_change = 0.0;
      if (!gram_mode) q0 = (unit ? resid.sum() : resid.dot(w)) / n;
      const double d0 = q0 * n / wsum;
      if (d0 != 0.0) {
        b0 += d0;
        max_change = std::abs(d0);
        if (gram_mode) {
          q.noalias() -= d0 * s;
          q0 -= d0 * wsum / n;
        } else {
          resid.array() -= d0;
        }
      }
      for (Index j = 0; j < p; ++j) {
        if (curvature[j] <= 0.0) continue;
        if (!all && theta[j] == 0.0) continue;
        const double qj = gram_mode ? q[j] : wz.col(j).dot(resid) / n;
        const double g = qj + curvature[j] * theta[j];
        const double next = soft_threshold(g, l1) / (curvature[j] + l2);
        const double delta = next - theta[j];
        if (delta != 0.0) {
          theta[j] = next;
          max_change = std::max(max_change, std::abs(delta));
          if (gram_mode) {
            q.noalias() -= delta * gram.col(j);
            q0 -= delta * s[j];
          } else {
            resid.noalias() -= delta * z_.col(j);
          }
        }
      }
      return max_change;
    };

    int sweeps = 0;
    bool done = false;
    while (!done && sweeps < max_sweeps_) {
      ++sweeps;
      if (sweep(true) < tol) {
        done = true;
        break;
      }
      while (sweeps < max_sweeps_) {
        ++sweeps;
        if (sweep(false) < tol) break;
      }
    }
    last_sweeps_ = sweeps;
    return done;
  }

 private:
  int last_sweeps_ = 0;
  const Matrix& z_;
  const Standardization& st_;
  const PenaltyConfig& pen_;
  double tol_;
  int max_sweeps_;
};

inline FitResult fit_standardized(const Matrix& z, const Vector& y, const Standardization& st,
                                  Link link, const PenaltyConfig& pen, const FitOptions& opt,
                                  double b0, Vector theta) {
  const Index n = z.rows();
  FitResult result;
  WeightedLeastSquaresCd cd(z, st, pen, opt.tolerance, opt.max_iterations);

  auto objective = [&](double intercept, const Vector& t) {
    const Vector eta = (z * t).array() + intercept;
    return mean_nll(eta, y, link) + penalty_value(t, pen);
  };

  if (link == Link::identity) {
    const Vector r = y - ((z * theta).array() + b0).matrix();
    result.converged = cd.solve(Vector::Ones(n), b0, theta, r);
    result.iterations = 1;
    result.objective = objective(b0, theta);
    if (opt.monitor) result.trace.push_back(result.objective);
    result.beta = st.to_original(b0, theta);
    return result;
  }

  // Logistic: outer IRLS steps, each a penalized weighted least-squares
  // solve, with step halving so the objective never increases.
  double current = objective(b0, theta);
  if (opt.monitor) result.trace.push_back(current);
  double last_change = 1.0;
  for (int outer = 1; outer <= opt.max_iterations; ++outer) {
    result.iterations = outer;
    const Vector eta = (z * theta).array() + b0;
    const Vector mu = mean_response(eta, link);
    Vector w = (mu.array() * (1.0 - mu.array())).max(1e-5);
    const Vector r = (y - mu).cwiseQuotient(w);

    double next_b0 = b0;
    Vector next_theta = theta;
    // Early Newton steps only need a rough inner solve.
    cd.solve(w, next_b0, next_theta, r, std::max(opt.tolerance, 1e-2 * last_change));

    double candidate = objective(next_b0, next_theta);
    for (int halving = 0; halving < 60 && candidate > current; ++halving) {
      next_b0 = b0 + 0.5 * (next_b0 - b0);
      next_theta = theta + 0.5 * (next_theta - theta);
      candidate = objective(next_b0, next_theta);
    }
    if (candidate > current) {
      // No descent direction left at machine precision.
      result.converged = true;
      break;
    }
    const double change = std::max(std::abs(next_b0 - b0), (next_theta - theta).cwiseAbs().maxCoeff());
    last_change = change;
    b0 = next_b0;
    theta = std::move(next_theta);
    current = candidate;
    if (opt.monitor) result.trace.push_back(current);
    if (change < opt.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.objective = current;
  result.beta = st.to_original(b0, theta);
  return result;
}

}  // namespace detail

// Elastic-net fit with an unpenalized intercept. With standardization on,
// the penalty acts on slopes of unit-variance columns and the result is
// mapped back to the original scale.
inline FitResult fit_penalized_detailed(const Dataset& data, Link link, const PenaltyConfig& penalty,
                                        const FitOptions& options = {},
                                        const CoefficientVector* warm_start = nullptr) {
  data.validate(link);
  penalty.validate();
  if (data.rows() < 2) throw InvalidArgument("penalized fit needs at least two rows");
  const Standardization st(data.features, penalty.standardize);
  const Matrix z = st.transform(data.features);
  double b0 = detail::null_intercept(data.outcomes, link);
  Vector theta = Vector::Zero(data.dim());
  if (warm_start != nullptr) {
    if (warm_start->dim() != data.dim()) throw DimensionError("warm start dimension mismatch");
    st.to_solver(*warm_start, b0, theta);
  }
  return detail::fit_standardized(z, data.outcomes, st, link, penalty, options, b0, theta);
}

inline CoefficientVector fit_penalized(const Dataset& data, Link link,
                                       const PenaltyConfig& penalty,
                                       const FitOptions& options = {}) {
  FitResult fit = fit_penalized_detailed(data, link, penalty, options);
  if (!fit.converged)
    throw ConvergenceError("penalized fit did not converge in " +
                               std::to_string(options.max_iterations) + " iterations",
                           fit.objective);
  return std::move(fit.beta);
}

// Smallest lambda at which every slope is zero. A ridge-only penalty has no
// such point; mixing is floored at 1e-3 for the purpose of this bound.
inline double lambda_max(const Dataset& data, Link link, double mixing, bool standardize = true) {
  data.validate(link);
  const Standardization st(data.features, standardize);
  const Matrix z = st.transform(data.features);
  const Vector resid = data.outcomes.array() - data.outcomes.mean();
  detail::null_intercept(data.outcomes, link);
  const double g = (z.transpose() * resid).cwiseAbs().maxCoeff() / static_cast<double>(data.rows());
  const double lmax = g / std::max(mixing, 1e-3);
  return lmax > 0.0 ? lmax : 1e-6;
}

// Log-spaced, descending from lmax to lmax * ratio.
inline std::vector<double> lambda_grid(double lmax, int size, double ratio = 1e-3) {
  if (size < 1) throw InvalidArgument("lambda grid needs at least one point");
  std::vector<double> grid(static_cast<std::size_t>(size));
  for (int k = 0; k < size; ++k) {
    const double frac = size == 1 ? 0.0 : static_cast<double>(k) / (size - 1);
    grid[static_cast<std::size_t>(k)] = lmax * std::pow(ratio, frac);
  }
  return grid;
}

// Shuffled round-robin assignment of n indices to folds.
inline std::vector<std::vector<std::size_t>> fold_partition(std::size_t n, int folds,
                                                            std::uint64_t seed) {
  if (folds < 2) throw InvalidArgument("cross-validation needs at least two folds");
  if (n < static_cast<std::size_t>(folds))
    throw InvalidArgument("fewer rows than folds");
  Rng rng = make_rng(seed, {tag("cv-folds")});
  const auto order = permutation(n, rng);
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(folds));
  for (std::size_t k = 0; k < n; ++k) out[k % out.size()].push_back(order[k]);
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

struct CvResult {
  PenaltyConfig selected;
  std::vector<double> grid;
  std::vector<double> loss;  // held-out mean NLL per grid point
  std::size_t best_index = 0;
};

inline CvResult cross_validate_lambda_detailed(const Dataset& data, Link link, double mixing,
                                               int folds, int grid_size, std::uint64_t seed,
                                               bool standardize = true) {
  data.validate(link);
  if (link == Link::logistic) {
    const double ybar = data.outcomes.mean();
    if (ybar <= 0.0 || ybar >= 1.0)
      throw InvalidArgument("cross-validation on a single-class outcome vector");
  }
  const auto partition = fold_partition(static_cast<std::size_t>(data.rows()), folds, seed);

  CvResult cv;
  cv.grid = lambda_grid(lambda_max(data, link, mixing, standardize), grid_size);
  std::vector<double> total(cv.grid.size(), 0.0);
  const auto n = static_cast<std::size_t>(data.rows());

  for (const auto& held_out : partition) {
    std::vector<std::size_t> train;
    train.reserve(n - held_out.size());
    std::size_t h = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (h < held_out.size() && held_out[h] == i) {
        ++h;
        continue;
      }
      train.push_back(i);
    }
    const Dataset train_set = data.subset(train);
    const Dataset test_set = data.subset(held_out);
    const Standardization st(train_set.features, standardize);
    const Matrix z = st.transform(train_set.features);
    double b0 = detail::null_intercept(train_set.outcomes, link);
    Vector theta = Vector::Zero(data.dim());

    for (std::size_t k = 0; k < cv.grid.size(); ++k) {
      const PenaltyConfig pen{cv.grid[k], mixing, standardize};
      FitResult fit = detail::fit_standardized(z, train_set.outcomes, st, link, pen, {}, b0, theta);
      if (!fit.converged) {
        total[k] = std::numeric_limits<double>::infinity();
        continue;
      }
      st.to_solver(fit.beta, b0, theta);
      const double loss =
          detail::mean_nll(linear_predictor(fit.beta, test_set.features), test_set.outcomes, link);
      total[k] += loss * static_cast<double>(held_out.size());
    }
  }

  cv.loss.resize(cv.grid.size());
  for (std::size_t k = 0; k < cv.grid.size(); ++k) cv.loss[k] = total[k] / static_cast<double>(n);
  // Ties go to the larger lambda, i.e. the earlier grid point.
  cv.best_index = static_cast<std::size_t>(
      std::min_element(cv.loss.begin(), cv.loss.end()) - cv.loss.begin());
  if (!std::isfinite(cv.loss[cv.best_index]))
    throw ConvergenceError("no grid point converged during cross-validation", cv.loss[cv.best_index]);
  cv.selected = PenaltyConfig{cv.grid[cv.best_index], mixing, standardize};
  return cv;
}

inline PenaltyConfig cross_validate_lambda(const Dataset& data, Link link, double mixing, int folds,
                                           int grid_size, std::uint64_t seed) {
  return cross_validate_lambda_detailed(data, link, mixing, folds, grid_size, seed).selected;
}

}  // namespace adapt
