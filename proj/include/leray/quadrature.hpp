#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "leray/types.hpp"

namespace leray {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// N-point Gauss-Legendre rule on [a, b] (Newton iteration on P_N).
inline QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw InputError("gauss_legendre: n must be positive");
  QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    if (n % 2 == 1 && i == n / 2) x = 0.0;
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Ascending order on [a, b].
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

/// N-point trapezoid rule on the circle [0, 2pi).
inline QuadratureRule trapezoid(int n) {
  if (n < 1) throw InputError("trapezoid: n must be positive");
  QuadratureRule rule{std::vector<double>(n), std::vector<double>(n, 2.0 * pi / n)};
  for (int j = 0; j < n; ++j) rule.nodes[j] = 2.0 * pi * j / n;
  return rule;
}

/// Neumaier-compensated complex accumulator.
class CompensatedSum {
 public:
  void add(cplx v) {
    re_.add(v.real());
    im_.add(v.imag());
  }
  cplx value() const { return {re_.value(), im_.value()}; }

 private:
  struct Real {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
      double t = sum + v;
      if (std::abs(sum) >= std::abs(v)) comp += (sum - t) + v;
      else comp += (v - t) + sum;
      sum = t;
    }
    double value() const { return sum + comp; }
  };
  Real re_, im_;
};

}  // namespace leray
