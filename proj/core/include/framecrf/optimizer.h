#pragma once

#include <functional>
#include <span>
#include <vector>

namespace framecrf {

// Fills `gradient` (same size as `x`) and returns the objective at `x`.
using Objective = std::function<double(std::span<const double> x, std::span<double> gradient)>;

struct LbfgsOptions {
  int max_iter = 200;
  // Converged once the gradient's max-norm drops to this value.
  double gradient_tolerance = 1e-4;
  int history = 10;
  int max_line_search = 40;
  double armijo = 1e-4;
};

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  double gradient_norm = 0.0;  // max-norm at `x`
  int iterations = 0;
  bool converged = false;
  // Objective at the start point and after every accepted step.
  std::vector<double> trace;
};

// Limited-memory BFGS with a backtracking Armijo line search. Fully
// deterministic; accepted steps never increase the objective. Throws
// NumericalError if the objective or gradient becomes non-finite.
LbfgsResult minimize_lbfgs(const Objective& objective, std::vector<double> x0,
                           const LbfgsOptions& options = {});

}  // namespace framecrf
