#pragma once

#include <array>

namespace airyedge::specfun {

struct AiryValue {
  double ai = 0.0;
  double ai_prime = 0.0;
};

// Ai and Ai' with absolute error <= 1e-12 on [-50, 20]. Maclaurin series for
// |x| <= 4.5; outside, values come from a tabulated high-order Taylor
// integration of y'' = x y anchored to the series region (backward from the
// far right so the decaying solution dominates, forward on the oscillatory
// side). The table extends itself downward on demand.
AiryValue airy(double x);

// int_x^inf Ai(u) du, absolute error <= 1e-10. Computed from antiderivative
// values carried along the same table (total integral over R is 1).
double airy_tail_integral(double x);

// Ai and derivatives up to order `N-1` via the ODE recurrence.
template <int N>
std::array<double, N> airy_derivs(double x) {
  static_assert(N >= 2);
  AiryValue v = airy(x);
  std::array<double, N> d{};
  d[0] = v.ai;
  d[1] = v.ai_prime;
  for (int k = 2; k < N; ++k)
    d[k] = x * d[k - 2] + (k - 2) * (k >= 3 ? d[k - 3] : 0.0);
  return d;
}

struct OscillatorIndex {
  int n = 0;  // Hermite degree, n >= 0
  int m = 0;  // soft-edge scaling parameter, m >= 1; 0 means "use n"

  int scale() const { return m > 0 ? m : n; }
};

inline constexpr int kOscillatorNMax = 2000;

// Normalized Hermite oscillator function phi_n(xi) (weight e^{-xi^2/4}),
// evaluated by the three-term recurrence in log-magnitude + sign form with
// renormalization every 64 steps, so no overflow up to n = kOscillatorNMax.
double oscillator_phi(int n, double xi);

// {phi_{n-3}, phi_{n-2}, phi_{n-1}, phi_n} in one recurrence pass; negative
// degrees give 0. Feeds derivative stencils of neighboring degrees.
std::array<double, 4> oscillator_phi_tail4(int n, double xi);

// psi_n^m(x) = m^{1/12} phi_n(2 sqrt(m) + x m^{-1/6}).
double oscillator_psi(OscillatorIndex idx, double x);

// (psi_n^m)'(x) via the three-term derivative identity
// m^{1/6} (psi_n^m)' = -(sqrt(n+1)/2) psi_{n+1}^m + (sqrt(n)/2) psi_{n-1}^m.
double oscillator_psi_prime(OscillatorIndex idx, double x);

// psi_n^m and psi_{n-1}^m in one recurrence pass.
std::array<double, 2> oscillator_psi_pair(OscillatorIndex idx, double x);

// Value and derivatives 0..4 of psi_n^m at x, using the oscillator ODE
// psi'' = c(x) psi with c(x) = (m-n-1/2) m^{-1/3} + x + x^2/(4 m^{2/3}).
std::array<double, 5> oscillator_psi_derivs(OscillatorIndex idx, double x);

// Total integral of psi_n^m over R: zero for odd n, closed form otherwise.
double oscillator_psi_total_integral(OscillatorIndex idx);

// (eps psi_n^m)(x) = 1/2 int psi - int_x^inf psi, with the tail integral by
// panel quadrature split at the turning points and capped at a quarter
// wavelength in the oscillatory zone.
double epsilon_psi(OscillatorIndex idx, double x);

// int_x^inf psi_n^m (helper shared with epsilon_psi).
double oscillator_psi_upper_integral(OscillatorIndex idx, double x);

// Leading Plancherel-Rotach term in the oscillatory window
// (-2 n^{2/3}, -n^eps): pi^{-1/2} f(x,n)^{-1/4} cos(g - theta/2). Oracle only.
double plancherel_rotach_leading(int n, double x, double window_eps = 1.0 / 9.0);

// f(x, n) = n^{2/3} sin^2 theta from the Plancherel-Rotach parametrization.
double plancherel_rotach_f(int n, double x);

}  // namespace airyedge::specfun
