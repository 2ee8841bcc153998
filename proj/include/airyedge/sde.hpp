#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "airyedge/drift.hpp"
#include "airyedge/sampler.hpp"

namespace airyedge::sde {

using sampler::PointConfiguration;

struct SDEConfig {
  double dt = 1e-3;
  double t_final = 1.0;
  double collision_guard = 0.02;  // minimal admissible gap after a step
  drift::DriftSpec drift_spec;
  uint64_t seed = 0;
  uint64_t stream = 0;
  double noise_scale = 1.0;  // 0 turns the SDE into the drift ODE (test hook)
  int max_halvings = 20;
};

// One realization: the time grid, per-time particle positions (descending
// order), and the realized Brownian increments per recorded interval.
struct PathEnsemble {
  std::vector<double> times;
  std::vector<std::vector<double>> states;  // times x particles
  std::vector<std::vector<double>> noise;   // (times-1) x particles
  std::vector<double> frozen_tail;          // empty unless a tail was frozen
  long accepted = 0;
  long rejected = 0;
  int beta = 2;
  double dt = 0.0;
  uint64_t seed = 0, stream = 0;
};

// Euler-Maruyama for the n-particle soft-edge SDE with reject-and-halve
// collision guard (a step that breaks the ordering or the minimal gap is
// discarded and replaced by two half steps with fresh noise).
PathEnsemble simulate_finite(int beta, int n, const PointConfiguration& init,
                             const SDEConfig& cfg);

// Frozen-tail approximation: integrates the first m coordinates; the tail
// enters the drift as a fixed coefficient. Compensator mode and truncation
// radius come from cfg.drift_spec.
PathEnsemble simulate_truncated_isde(int beta, int m, const PointConfiguration& init_head,
                                     std::span<const double> tail, const SDEConfig& cfg);

// Driftless paths (Brownian motion from the initial point); the reference
// measure for the Girsanov density.
PathEnsemble simulate_brownian(int m, std::span<const double> init, const SDEConfig& cfg);

// Deterministic-noise integrator used by convergence studies: no guard, the
// caller supplies every increment.
std::vector<double> integrate_prescribed(
    const std::function<void(std::span<const double>, std::span<double>)>& drift,
    std::span<const double> init, double dt, int steps,
    const std::vector<std::vector<double>>& noise);

struct GirsanovAccumulator {
  double stochastic_integral = 0.0;  // int b . dW up to tau_h
  double quadratic_half = 0.0;       // (1/2) int |b|^2 dt up to tau_h
  double tau = 0.0;
  bool tau_reached = false;  // tau_h < t_final

  double log_density() const { return stochastic_integral - quadratic_half; }
};

// Radon-Nikodym log-density of the m-particle frozen-tail dynamics against
// Wiener measure along a recorded path, stopped at tau_h = inf{t : int_0^t
// |b|^2 >= h}. The drift vector is the intra-head interaction plus the
// tail/compensator bracket at radius spec.truncation_radius.
GirsanovAccumulator girsanov_log_density(const PathEnsemble& path, int m,
                                         std::span<const double> tail, double h,
                                         const drift::DriftSpec& spec,
                                         bool zero_drift = false);

}  // namespace airyedge::sde
