#include "airyedge/densities.hpp"

#include <cmath>
#include <numbers>

#include "airyedge/errors.hpp"

namespace airyedge::densities {

double rho_hat(const EdgeDensity& d, double x) {
  if (!d.finite) {
    if (x >= 0.0) return 0.0;
    return std::sqrt(-x) / std::numbers::pi;
  }
  const double edge = 4.0 * std::pow(d.n, 2.0 / 3.0);
  if (x >= 0.0 || x <= -edge) return 0.0;
  return std::sqrt(-x * (1.0 + x / edge)) / std::numbers::pi;
}

double compensator(const EdgeDensity& d, double r) {
  if (r <= 0.0) throw precondition_error("compensator: radius must be positive");
  if (!d.finite) {
    if (std::isinf(r)) throw divergence_error("compensator: diverges for the limit density");
    return 2.0 * std::sqrt(r) / std::numbers::pi;
  }
  // x = -u^2 turns the integrand into (2/pi) sqrt(1 - (u/a)^2) with
  // a = 2 n^{1/3}; the antiderivative is elementary and the full range gives
  // exactly n^{1/3}.
  const double a = 2.0 * std::pow(d.n, 1.0 / 3.0);
  const double u = std::isinf(r) ? a : std::min(std::sqrt(r), a);
  const double t = u / a;
  return (a / std::numbers::pi) * (std::asin(t) + t * std::sqrt(std::max(0.0, 1.0 - t * t)));
}

double semicircle(double x) {
  if (std::abs(x) >= 2.0) return 0.0;
  return std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi);
}

}  // namespace airyedge::densities
