// Copyright 2026 The spba Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spba/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace spba {

namespace {

struct LineSample {
  double alpha = 0.0;
  double value = 0.0;
  double deriv = 0.0;  // directional derivative
  bool finite = false;
};

class LineSearch {
 public:
  LineSearch(const Objective& objective, const VecX& x, const VecX& direction,
             double f0, double g0, const LbfgsOptions& opts, int& evals)
      : objective_(objective),
        x_(x),
        direction_(direction),
        f0_(f0),
        g0_(g0),
        opts_(opts),
        evals_(evals) {}

  LineSample eval(double alpha) {
    VecX grad(x_.size());
    const VecX xa = x_ + alpha * direction_;
    const double f = objective_(xa, &grad);
    ++evals_;
    LineSample s;
    s.alpha = alpha;
    s.value = f;
    s.finite = std::isfinite(f);
    s.deriv = s.finite ? grad.dot(direction_) : 0.0;
    if (s.finite && (best_.alpha < 0.0 || f < best_.value)) best_ = s;
    return s;
  }

  bool sufficient_decrease(const LineSample& s) const {
    return s.finite && s.value <= f0_ + opts_.wolfe_c1 * s.alpha * g0_;
  }
  bool curvature_ok(const LineSample& s) const {
    return std::abs(s.deriv) <= -opts_.wolfe_c2 * g0_;
  }

  // Strong-Wolfe search (bracket then zoom). Returns an accepted sample, or
  // alpha < 0 when no acceptable step was found within the budget; best()
  // then holds the lowest finite sample seen.
  LineSample search(double alpha_init) {
    LineSample prev;
    prev.alpha = 0.0;
    prev.value = f0_;
    prev.deriv = g0_;
    prev.finite = true;

    double alpha = alpha_init;
    for (int i = 0; i < opts_.max_line_search_evals; ++i) {
      LineSample cur = eval(alpha);
      if (!cur.finite) {
        // Treat as overshoot: shrink toward the last good point.
        alpha = 0.5 * (prev.alpha + alpha);
        continue;
      }
      if (!sufficient_decrease(cur) || (i > 0 && cur.value >= prev.value)) {
        return zoom(prev, cur);
      }
      if (curvature_ok(cur)) return cur;
      if (cur.deriv >= 0.0) return zoom(cur, prev);
      prev = cur;
      alpha = std::min(2.0 * alpha, 1e12);
    }
    LineSample fail;
    fail.alpha = -1.0;
    return fail;
  }

  const LineSample& best() const { return best_; }

 private:
  // lo satisfies the sufficient-decrease condition, hi does not (or is the
  // far side of the minimum). Quadratic interpolation through
  // (0-deriv at lo, value at lo, value at hi) is exact on parabolas, so
  // quadratic objectives converge in one step.
  LineSample zoom(LineSample lo, LineSample hi) {
    for (int i = 0; i < opts_.max_line_search_evals; ++i) {
      double alpha;
      const double d = hi.alpha - lo.alpha;
      if (std::abs(d) < 1e-16 * (1.0 + std::abs(lo.alpha))) return lo;
      if (hi.finite) {
        const double denom = hi.value - lo.value - lo.deriv * d;
        alpha = denom > 0.0 || denom < 0.0
                    ? lo.alpha - 0.5 * lo.deriv * d * d / denom
                    : lo.alpha + 0.5 * d;
        // Keep the trial safely interior.
        const double a = std::min(lo.alpha, hi.alpha);
        const double b = std::max(lo.alpha, hi.alpha);
        const double margin = 0.1 * (b - a);
        if (!(alpha >= a + margin && alpha <= b - margin)) {
          alpha = 0.5 * (lo.alpha + hi.alpha);
        }
      } else {
        alpha = 0.5 * (lo.alpha + hi.alpha);
      }
      LineSample cur = eval(alpha);
      if (!cur.finite || !sufficient_decrease(cur) || cur.value >= lo.value) {
        hi = cur;
        continue;
      }
      if (curvature_ok(cur)) return cur;
      if (cur.deriv * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
      lo = cur;
    }
    // Budget exhausted: settle for the decrease-only point if it improves.
    if (lo.alpha > 0.0 && lo.value < f0_) return lo;
    LineSample fail;
    fail.alpha = -1.0;
    return fail;
  }

  const Objective& objective_;
  const VecX& x_;
  const VecX& direction_;
  double f0_;
  double g0_;
  const LbfgsOptions& opts_;
  int& evals_;
  LineSample best_{-1.0, std::numeric_limits<double>::infinity(), 0.0, false};
};

}  // namespace

const char* to_string(LbfgsStatus status) {
  switch (status) {
    case LbfgsStatus::kGradientConverged: return "gradient_converged";
    case LbfgsStatus::kSmallDecrease: return "small_decrease";
    case LbfgsStatus::kMaxIterations: return "max_iterations";
    case LbfgsStatus::kLineSearchFailed: return "line_search_failed";
    case LbfgsStatus::kNonFiniteObjective: return "non_finite_objective";
  }
  return "unknown";
}

LbfgsResult lbfgs_minimize(const Objective& objective, const VecX& x0,
                           const LbfgsOptions& options) {
  LbfgsResult result;
  result.x = x0;

  VecX grad(x0.size());
  double f = objective(x0, &grad);
  ++result.evaluations;
  if (!std::isfinite(f) || !grad.allFinite()) {
    result.status = LbfgsStatus::kNonFiniteObjective;
    result.value = f;
    return result;
  }
  result.value = f;
  result.grad_norm = grad.lpNorm<Eigen::Infinity>();
  if (result.grad_norm < options.grad_tol) {
    result.status = LbfgsStatus::kGradientConverged;
    return result;
  }

  std::deque<std::pair<VecX, VecX>> memory;  // (s, y) pairs, newest back
  VecX x = x0;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    // Two-loop recursion.
    VecX q = grad;
    std::vector<double> alpha_coef(memory.size());
    std::vector<double> rho(memory.size());
    for (int k = static_cast<int>(memory.size()) - 1; k >= 0; --k) {
      const auto& [s, y] = memory[k];
      rho[k] = 1.0 / y.dot(s);
      alpha_coef[k] = rho[k] * s.dot(q);
      q -= alpha_coef[k] * y;
    }
    if (!memory.empty()) {
      const auto& [s, y] = memory.back();
      q *= s.dot(y) / y.dot(y);
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const auto& [s, y] = memory[k];
      const double beta = rho[k] * y.dot(q);
      q += (alpha_coef[k] - beta) * s;
    }
    VecX direction = -q;
    double dir_deriv = grad.dot(direction);
    if (!(dir_deriv < 0.0)) {
      // Not a descent direction (numerically degenerate memory): reset.
      memory.clear();
      direction = -grad;
      dir_deriv = grad.dot(direction);
    }

    const double alpha0 =
        memory.empty()
            ? std::min(1.0, options.first_step_length / direction.norm())
            : 1.0;
    LineSearch search(objective, x, direction, f, dir_deriv, options,
                      result.evaluations);
    LineSample accepted = search.search(alpha0);
    if (accepted.alpha <= 0.0) {
      // Fall back to the best point seen if it improves on x.
      if (search.best().alpha > 0.0 && search.best().value < f) {
        x += search.best().alpha * direction;
        VecX g2(x.size());
        const double f2 = objective(x, &g2);
        ++result.evaluations;
        if (std::isfinite(f2) && f2 < result.value) {
          f = f2;
          grad = g2;
          result.x = x;
          result.value = f;
          result.grad_norm = grad.lpNorm<Eigen::Infinity>();
        }
      }
      result.status = LbfgsStatus::kLineSearchFailed;
      return result;
    }

    const VecX step = accepted.alpha * direction;
    VecX new_grad(x.size());
    const VecX new_x = x + step;
    const double new_f = objective(new_x, &new_grad);
    ++result.evaluations;
    if (!std::isfinite(new_f) || !new_grad.allFinite()) {
      result.status = LbfgsStatus::kLineSearchFailed;
      return result;
    }

    const VecX y = new_grad - grad;
    const double sy = step.dot(y);
    if (sy > 1e-12 * step.norm() * y.norm()) {
      memory.emplace_back(step, y);
      if (static_cast<int>(memory.size()) > options.history) {
        memory.pop_front();
      }
    }

    const double decrease = f - new_f;
    x = new_x;
    grad = new_grad;
    f = new_f;
    ++result.iterations;
    if (f <= result.value) {
      result.x = x;
      result.value = f;
      result.grad_norm = grad.lpNorm<Eigen::Infinity>();
    }

    if (grad.lpNorm<Eigen::Infinity>() < options.grad_tol) {
      result.status = LbfgsStatus::kGradientConverged;
      return result;
    }
    if (options.min_rel_decrease > 0.0 &&
        decrease < options.min_rel_decrease * std::max(1.0, std::abs(f))) {
      result.status = LbfgsStatus::kSmallDecrease;
      return result;
    }
  }
  result.status = LbfgsStatus::kMaxIterations;
  return result;
}

}  // namespace spba
