#pragma once

// Optimization over the probability simplex: Euclidean projection and a
// projected-gradient minimizer with Armijo backtracking.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "adapt/error.hpp"

namespace adapt {

// Sort-and-threshold projection onto {x : x >= 0, sum x = 1}.
inline Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index k = v.size();
  if (k == 0) throw DimensionError("cannot project an empty vector onto the simplex");
  std::vector<double> sorted(v.data(), v.data() + k);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    cumulative += sorted[static_cast<std::size_t>(i)];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[static_cast<std::size_t>(i)] - t > 0.0) threshold = t;
  }
  Eigen::VectorXd x = (v.array() - threshold).max(0.0);
  // Renormalize away rounding drift; the support is already fixed.
  const double s = x.sum();
  if (s > 0.0) x /= s;
  return x;
}

struct ProjectedGradientOptions {
  int max_iterations = 5000;
  double tolerance = 1e-10;  // on the unit-step gradient mapping |x - P(x - g)|
  double armijo = 1e-4;
  double shrink = 0.5;
  double stall_tolerance = 1e-7;  // residual accepted when rounding stops progress
  int memory = 10;                // nonmonotone Armijo reference window
};

struct ProjectedGradientResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd grad;
  int iterations = 0;
  bool converged = false;
};

// Stationarity residual |x - P(x - g)|_inf; zero exactly at a KKT point of
// a smooth function over the simplex.
inline double simplex_kkt_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& grad) {
  return (x - project_to_simplex(x - grad)).cwiseAbs().maxCoeff();
}

// Minimizes a smooth convex f over the simplex. `f(x, grad)` returns f(x)
// and writes its gradient. Trial steps start from a Barzilai-Borwein
// estimate and are halved until a nonmonotone Armijo condition holds
// against the largest of the last `memory` accepted values.
template <class Objective>
ProjectedGradientResult minimize_on_simplex(Objective&& f, Eigen::VectorXd x0,
                                            const ProjectedGradientOptions& opt = {}) {
  ProjectedGradientResult res;
  res.x = project_to_simplex(x0);
  res.grad.resize(res.x.size());
  res.value = f(res.x, res.grad);
  if (res.x.size() == 1 || simplex_kkt_residual(res.x, res.grad) < opt.tolerance) {
    res.converged = true;
    return res;
  }

  double step = 1.0;
  int stalls = 0;
  std::vector<double> history{res.value};
  Eigen::VectorXd trial_grad(res.x.size());
  for (int it = 1; it <= opt.max_iterations; ++it) {
    res.iterations = it;
    Eigen::VectorXd trial;
    double trial_value = 0.0;
    bool accepted = false;
    const double reference = *std::max_element(history.begin(), history.end());
    for (int bt = 0; bt < 80; ++bt) {
      trial = project_to_simplex(res.x - step * res.grad);
      trial_value = f(trial, trial_grad);
      const double decrease = res.grad.dot(trial - res.x);
      if (trial_value <= reference + opt.armijo * decrease) {
        accepted = true;
        break;
      }
      step *= opt.shrink;
    }
    const Eigen::VectorXd s = trial - res.x;
    const double moved = s.norm();
    if (!accepted || moved == 0.0 || !(trial_value < reference)) {
      // No representable decrease is left: stationary to working precision,
      // unless a unit step from here still makes progress.
      res.converged = simplex_kkt_residual(res.x, res.grad) < opt.stall_tolerance;
      if (res.converged || ++stalls > 1) break;
      step = 1.0;
      continue;
    }
    stalls = 0;
    const Eigen::VectorXd y = trial_grad - res.grad;
    res.x = std::move(trial);
    res.value = trial_value;
    res.grad = trial_grad;
    history.push_back(res.value);
    if (static_cast<int>(history.size()) > opt.memory) history.erase(history.begin());
    if (simplex_kkt_residual(res.x, res.grad) < opt.tolerance) {
      res.converged = true;
      break;
    }
    const double sy = s.dot(y);
    step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-12, 1e12) : std::min(step * 2.0, 1e12);
  }
  return res;
}

}  // namespace adapt
