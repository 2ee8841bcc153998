#pragma once

#include <functional>
#include <span>
#include <vector>

namespace airyedge::quad {

struct Rule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre rule of order n, computed by Newton iteration on P_n and
// cached. Thread-safe for concurrent readers.
const Rule& gauss_legendre(int n);

struct Options {
  double abs_tol = 1e-11;
  double rel_tol = 1e-11;
  int max_depth = 40;
  // Panels are pre-split so no initial panel exceeds this width. Oscillatory
  // integrands pass a wavelength-derived cap; 0 disables pre-splitting.
  double max_panel = 0.0;
};

// Adaptive quadrature on [a, b]. Error estimate is |GL15 - GL7| per panel with
// bisection; both rules come from gauss_legendre so there are no transcribed
// node tables to trust.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opt = {});

// Convenience: integrate with interior breakpoints (singularities, turning
// points, sign-change hints). Points outside (a, b) are ignored.
double integrate_split(const std::function<double(double)>& f, double a, double b,
                       std::span<const double> breakpoints, const Options& opt = {});

// Fixed-order Gauss-Legendre on one panel, no adaptivity.
double fixed_panel(const std::function<double(double)>& f, double a, double b, int order);

}  // namespace airyedge::quad
