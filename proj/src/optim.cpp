#include "hetero/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

namespace hetero {

RegWeight RegWeight::fixed(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("regularization weight must be finite and >= 0");
  }
  return RegWeight(false, value);
}

double RegWeight::resolve(std::span<const double> initial_params) const {
  if (!auto_) return value_;
  if (initial_params.empty()) return 0.0;
  double sum = 0.0;
  for (double v : initial_params) sum += std::abs(v);
  return kAutoRegMultiplier * sum / static_cast<double>(initial_params.size());
}

void FitConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(grad_tol > 0.0) || !(rel_improve_tol > 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
  if (memory < 1) throw std::invalid_argument("L-BFGS memory must be >= 1");
}

std::string_view to_string(OptimStatus s) {
  switch (s) {
    case OptimStatus::converged_grad: return "converged_grad";
    case OptimStatus::converged_improve: return "converged_improve";
    case OptimStatus::max_iters: return "max_iters";
  }
  return "unknown";
}

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-16;
constexpr double kCurvatureEps = 1e-10;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct CurvaturePair {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

// H * q by the two-loop recursion, H0 = gamma * I.
std::vector<double> two_loop(const std::deque<CurvaturePair>& history, std::vector<double> q) {
  std::vector<double> alpha(history.size());
  for (std::size_t m = history.size(); m-- > 0;) {
    const auto& p = history[m];
    alpha[m] = p.rho * dot(p.s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[m] * p.y[i];
  }
  if (!history.empty()) {
    const auto& last = history.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& v : q) v *= gamma;
  }
  for (std::size_t m = 0; m < history.size(); ++m) {
    const auto& p = history[m];
    const double beta = p.rho * dot(p.y, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[m] - beta) * p.s[i];
  }
  return q;
}

}  // namespace

OptimResult minimize(const Objective& objective, std::vector<double> x0,
                     std::span<const double> lower_bounds, const FitConfig& cfg) {
  cfg.validate();
  const std::size_t n = x0.size();
  const bool bounded = !lower_bounds.empty();
  if (bounded && lower_bounds.size() != n) {
    throw std::invalid_argument("minimize: lower bounds length differs from x0");
  }
  if (bounded) {
    for (std::size_t i = 0; i < n; ++i)
      if (x0[i] < lower_bounds[i]) throw std::invalid_argument("minimize: x0 violates bounds");
  }
  auto is_active = [&](const std::vector<double>& x, std::size_t i) {
    return bounded && x[i] <= lower_bounds[i];
  };

  OptimResult result;
  std::vector<double> x = std::move(x0);
  std::vector<double> g(n);
  double f = objective(x, g);
  if (!std::isfinite(f)) throw std::runtime_error("minimize: objective is not finite at x0");
  result.loss_history.push_back(f);

  std::deque<CurvaturePair> history;
  std::vector<double> pg(n), d(n), trial(n), trial_grad(n), step(n);

  result.status = OptimStatus::max_iters;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    double pg_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pg[i] = (is_active(x, i) && g[i] > 0.0) ? 0.0 : g[i];
      pg_norm = std::max(pg_norm, std::abs(pg[i]));
    }
    if (pg_norm < cfg.grad_tol) {
      result.status = OptimStatus::converged_grad;
      break;
    }

    bool accepted = false;
    bool saw_finite = false;
    double f_new = f;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      const bool steepest = attempt == 1 || history.empty();
      if (steepest) {
        for (std::size_t i = 0; i < n; ++i) d[i] = -pg[i];
      } else {
        d = two_loop(history, pg);
        for (double& v : d) v = -v;
        for (std::size_t i = 0; i < n; ++i)
          if (pg[i] == 0.0) d[i] = 0.0;
        if (dot(d, pg) >= 0.0) {
          for (std::size_t i = 0; i < n; ++i) d[i] = -pg[i];
        }
      }

      double alpha = 1.0;
      if (history.empty()) {
        double norm2 = std::sqrt(dot(pg, pg));
        alpha = std::min(1.0, 1.0 / norm2);
      }
      while (alpha >= kMinStep) {
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i) {
          double v = x[i] + alpha * d[i];
          if (bounded) v = std::max(v, lower_bounds[i]);
          trial[i] = v;
          step[i] = v - x[i];
          moved = moved || step[i] != 0.0;
        }
        if (!moved) break;
        const double ft = objective(trial, trial_grad);
        if (std::isfinite(ft)) {
          saw_finite = true;
          if (ft <= f + kArmijo * dot(g, step)) {
            f_new = ft;
            accepted = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!accepted && history.empty()) break;
      if (!accepted) history.clear();
    }

    if (!accepted) {
      if (!saw_finite) {
        throw std::runtime_error("minimize: no finite objective value along the search direction");
      }
      result.status = OptimStatus::converged_improve;
      break;
    }

    CurvaturePair pair{step, std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) pair.y[i] = trial_grad[i] - g[i];
    const double sy = dot(pair.s, pair.y);
    if (sy > kCurvatureEps) {
      pair.rho = 1.0 / sy;
      history.push_back(std::move(pair));
      if (history.size() > static_cast<std::size_t>(cfg.memory)) history.pop_front();
    }

    const double rel = (f - f_new) / std::max({std::abs(f), std::abs(f_new), 1.0});
    x.swap(trial);
    g.swap(trial_grad);
    f = f_new;
    result.loss_history.push_back(f);
    result.iterations = iter + 1;
    if (rel < cfg.rel_improve_tol) {
      result.status = OptimStatus::converged_improve;
      break;
    }
  }
  result.x = std::move(x);
  return result;
}

}  // namespace hetero
