#pragma once

#include <span>

#include "airyedge/kernels.hpp"

namespace airyedge::drift {

enum class CompensatorMode { semicircle, finite_n, palm };

struct DriftSpec {
  int beta = 2;
  double truncation_radius = 50.0;  // origin-centered ball for the ISDE drift
  double shell = 200.0;             // x-centered shell for the g/w split
  CompensatorMode mode = CompensatorMode::semicircle;
  int n = 0;  // required by finite_n mode
};

enum class Regime { finite, limit };

// beta { sum_j 1/(x - y_j) - n^{1/3} - n^{-1/3} x / 2 }; `others` holds the
// n-1 remaining particles.
double finite_log_derivative(int beta, int n, double x, std::span<const double> others);

// (beta/2) { sum_{|y_j| < r, y_j != x} 1/(x - y_j) - 2 sqrt(r)/pi }; the sum
// runs in increasing |x - y_j| order.
double truncated_isde_drift(const DriftSpec& spec, double x, std::span<const double> config);

// u_beta: limit regime integrates the reduced-Palm intensity over |y| < s
// against 1/(x-y), subtracts 2 sqrt(s)/pi, and applies one Richardson step in
// s^{-1/4}; finite regime is the full-range integral minus n^{1/3} + x n^{-1/3}/2.
double u_beta(int beta, double x, double shell, Regime regime, int n = 0);

// single-shell value without the Richardson step (limit regime)
double u_beta_shell(int beta, double x, double shell);

struct LogDerivativeRoutes {
  double direct;      // ball sum minus rho_hat compensator ("route A")
  double decomposed;  // beta (u_beta + g_{beta,s})      ("route B", canonical)
};

LogDerivativeRoutes log_derivative_routes(const DriftSpec& spec, double x,
                                          std::span<const double> config);
double log_derivative(const DriftSpec& spec, double x, std::span<const double> config);

// g_{beta,s}(x, y) = sum_{|x-y_j|<s} 1/(x-y_j) - int_{|x-y|<s} rho_x(y)/(x-y)
double g_term(int beta, double shell, double x, std::span<const double> config,
              Regime regime, int n = 0);

// w^n_{beta,s}(x, y) = sum_{|x-y_i|>=s} 1/(x-y_i) - int_{|x-y|>=s} rho_x(y)/(x-y)
double w_term(int beta, int n, double shell, double x, std::span<const double> config);

// -beta sum_{|x-s_i|<r} 1/(x-s_i)^2
double drift_gradient(int beta, double x, std::span<const double> config, double r);

// m^n_r = beta int_{|y|<r} rho^{n,1}_0(y)/(-y) dy  (r may be infinite)
double m_n_r(int beta, int n, double r);

// Phi_beta(x) = beta int_x^0 u_beta(y) dy, limit regime
double free_potential(int beta, double x);

}  // namespace airyedge::drift
