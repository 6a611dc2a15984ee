#include "framecrf/optimizer.h"

#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "framecrf/error.h"

namespace framecrf {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double max_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

struct Correction {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

void check_finite(double value, std::span<const double> gradient, int iteration) {
  bool ok = std::isfinite(value);
  for (double g : gradient) ok = ok && std::isfinite(g);
  if (!ok) {
    throw NumericalError("non-finite objective or gradient at iteration " +
                         std::to_string(iteration) + " (objective " +
                         std::to_string(value) + ")");
  }
}

// Two-loop recursion: direction = -H * gradient.
std::vector<double> search_direction(const std::deque<Correction>& memory,
                                     std::span<const double> gradient) {
  std::vector<double> q(gradient.begin(), gradient.end());
  std::vector<double> alpha(memory.size());
  for (std::size_t k = memory.size(); k-- > 0;) {
    const auto& c = memory[k];
    alpha[k] = c.rho * dot(c.s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * c.y[i];
  }
  if (!memory.empty()) {
    const auto& last = memory.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& v : q) v *= gamma;
  }
  for (std::size_t k = 0; k < memory.size(); ++k) {
    const auto& c = memory[k];
    const double beta = c.rho * dot(c.y, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[k] - beta) * c.s[i];
  }
  for (double& v : q) v = -v;
  return q;
}

}  // namespace

LbfgsResult minimize_lbfgs(const Objective& objective, std::vector<double> x0,
                           const LbfgsOptions& options) {
  const std::size_t n = x0.size();
  LbfgsResult result;
  result.x = std::move(x0);
  std::vector<double> grad(n);
  result.value = objective(result.x, grad);
  check_finite(result.value, grad, 0);
  result.trace.push_back(result.value);
  result.gradient_norm = max_norm(grad);
  if (result.gradient_norm <= options.gradient_tolerance) {
    result.converged = true;
    return result;
  }

  std::deque<Correction> memory;
  std::vector<double> x_new(n);
  std::vector<double> grad_new(n);

  while (result.iterations < options.max_iter) {
    std::vector<double> dir = search_direction(memory, grad);
    double slope = dot(grad, dir);
    if (!(slope < 0.0)) {
      memory.clear();
      dir.assign(grad.begin(), grad.end());
      for (double& v : dir) v = -v;
      slope = dot(grad, dir);
    }
    double step = 1.0;
    if (memory.empty()) step = std::min(1.0, 1.0 / std::sqrt(dot(grad, grad)));

    bool accepted = false;
    double value_new = 0.0;
    for (int ls = 0; ls < options.max_line_search; ++ls) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = result.x[i] + step * dir[i];
      value_new = objective(x_new, grad_new);
      check_finite(value_new, grad_new, result.iterations + 1);
      if (value_new <= result.value + options.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!memory.empty()) {
        // Curvature pairs led nowhere; retry once from steepest descent.
        memory.clear();
        continue;
      }
      break;
    }

    Correction c;
    c.s.resize(n);
    c.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      c.s[i] = x_new[i] - result.x[i];
      c.y[i] = grad_new[i] - grad[i];
    }
    const double sy = dot(c.s, c.y);
    if (sy > 1e-12 * std::sqrt(dot(c.y, c.y) * dot(c.s, c.s))) {
      c.rho = 1.0 / sy;
      memory.push_back(std::move(c));
      if (static_cast<int>(memory.size()) > options.history) memory.pop_front();
    }

    std::swap(result.x, x_new);
    std::swap(grad, grad_new);
    result.value = value_new;
    result.trace.push_back(value_new);
    ++result.iterations;
    result.gradient_norm = max_norm(grad);
    if (result.gradient_norm <= options.gradient_tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace framecrf
