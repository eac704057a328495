#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace hetero {

// Regularization weight: either a fixed value or "auto", which is resolved
// from the initial factors (10 x mean absolute entry) when a fit starts.
class RegWeight {
 public:
  static RegWeight automatic() { return RegWeight(true, 0.0); }
  static RegWeight fixed(double value);

  bool is_auto() const { return auto_; }
  double value() const { return value_; }
  // Resolve against the pooled entries of the initial factors.
  double resolve(std::span<const double> initial_params) const;

 private:
  RegWeight(bool automatic, double value) : auto_(automatic), value_(value) {}
  bool auto_;
  double value_;
};

inline constexpr double kAutoRegMultiplier = 10.0;

struct FitConfig {
  int max_iters = 200;
  double grad_tol = 1e-6;
  double rel_improve_tol = 1e-9;
  int memory = 10;
  RegWeight reg_weight = RegWeight::automatic();
  std::uint64_t seed = 0;

  void validate() const;
};

enum class OptimStatus { converged_grad, converged_improve, max_iters };
std::string_view to_string(OptimStatus s);

struct OptimResult {
  std::vector<double> x;
  std::vector<double> loss_history;  // value at x0, then after each accepted step
  OptimStatus status = OptimStatus::max_iters;
  int iterations = 0;
};

// Writes the gradient into `grad` (same length as x) and returns the value.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

// Projected limited-memory BFGS with Armijo backtracking. Iterates are
// clamped onto the lower bounds exactly; `lower_bounds` may be empty (no
// bounds) or have one entry per coordinate.
OptimResult minimize(const Objective& objective, std::vector<double> x0,
                     std::span<const double> lower_bounds, const FitConfig& cfg);

}  // namespace hetero
