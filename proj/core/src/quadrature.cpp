#include "qmeas/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "qmeas/error.hpp"

namespace qmeas {

// Roots of the orthonormal Hermite polynomial by Newton iteration from the
// asymptotic initial guesses (Numerical Recipes, gauher), then mirrored.
GaussHermiteRule gauss_hermite(int order) {
  if (order < 1 || order > 400) throw ValidationError("gauss_hermite: order must be in [1, 400]");
  const int n = order;
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  std::vector<double> x(n), w(n);

  double z = 0.0;
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[i - 2];

    double pp = 0.0;
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) {
        converged = true;
        break;
      }
    }
    if (!converged) throw NumericalError("gauss_hermite: Newton iteration did not converge");
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }

  GaussHermiteRule rule;
  rule.nodes.assign(x.rbegin(), x.rend());
  rule.weights.assign(w.rbegin(), w.rend());
  rule.scaled_weights.resize(n);
  for (int k = 0; k < n; ++k)
    rule.scaled_weights[k] = rule.weights[k] * std::exp(rule.nodes[k] * rule.nodes[k]);
  return rule;
}

}  // namespace qmeas
