#pragma once

#include <limits>

namespace airyedge::densities {

struct EdgeDensity {
  bool finite = false;
  int n = 0;  // meaningful when finite

  static EdgeDensity limit() { return {false, 0}; }
  static EdgeDensity finite_n(int n) { return {true, n}; }
};

// rho_hat: limit sqrt(-x)/pi on (-inf, 0); finite-n
// sqrt(-x (1 + x/(4 n^{2/3})))/pi on (-4 n^{2/3}, 0).
double rho_hat(const EdgeDensity& d, double x);

// int_{|x| < r} rho_hat(x)/(-x) dx. Limit regime: closed form 2 sqrt(r)/pi;
// finite regime admits r = infinity, where the value is exactly n^{1/3}.
double compensator(const EdgeDensity& d, double r);

inline constexpr double kInfiniteRadius = std::numeric_limits<double>::infinity();

// Wigner semicircle density on (-2, 2).
double semicircle(double x);

}  // namespace airyedge::densities
