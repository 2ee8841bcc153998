#include "airyedge/sde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "airyedge/densities.hpp"
#include "airyedge/errors.hpp"
#include "airyedge/rng.hpp"

namespace airyedge::sde {

namespace {

using DriftFn = std::function<void(std::span<const double>, std::span<double>)>;

void check_config(const SDEConfig& cfg) {
  if (!(cfg.dt > 0.0) || !(cfg.t_final > 0.0))
    throw precondition_error("sde: dt and t_final must be positive");
  if (!(cfg.collision_guard > 0.0))
    throw precondition_error("sde: collision guard must be positive");
  if (cfg.dt > cfg.collision_guard * cfg.collision_guard / 4.0 + 1e-15)
    throw precondition_error("sde: dt must satisfy dt <= guard^2 / 4");
}

bool admissible(std::span<const double> x, double guard, double tail_top) {
  for (size_t i = 0; i + 1 < x.size(); ++i)
    if (!(x[i] - x[i + 1] >= guard)) return false;
  if (!x.empty() && std::isfinite(tail_top) && !(x.back() - tail_top >= guard)) return false;
  return true;
}

struct Integrator {
  const DriftFn& drift;
  const SDEConfig& cfg;
  double tail_top;
  bool guarded = true;
  CounterRng rng;
  PathEnsemble out;
  std::vector<double> b, proposal, accum_noise;

  Integrator(const DriftFn& d, const SDEConfig& c, double tt, size_t m)
      : drift(d), cfg(c), tail_top(tt), rng(c.seed, c.stream), b(m), proposal(m),
        accum_noise(m) {}

  // one guarded substep of width dt at depth `depth`
  void substep(std::vector<double>& x, double dt, int depth) {
    drift(x, b);
    const double sq = std::sqrt(dt) * cfg.noise_scale;
    for (size_t i = 0; i < x.size(); ++i) {
      const double dw = sq * rng.normal();
      proposal[i] = x[i] + b[i] * dt + dw;
      b[i] = dw;  // reuse as increment scratch
    }
    if (!guarded || admissible(proposal, cfg.collision_guard, tail_top)) {
      for (size_t i = 0; i < x.size(); ++i) accum_noise[i] += b[i];
      x = proposal;
      ++out.accepted;
      return;
    }
    ++out.rejected;
    if (depth >= cfg.max_halvings) {
      std::ostringstream os;
      os << "sde: collision guard exhausted " << cfg.max_halvings
         << " halvings; state:";
      for (double v : x) os << ' ' << v;
      throw stiffness_error(os.str());
    }
    substep(x, 0.5 * dt, depth + 1);
    substep(x, 0.5 * dt, depth + 1);
  }

  PathEnsemble run(std::vector<double> x) {
    const int steps = static_cast<int>(std::llround(cfg.t_final / cfg.dt));
    out.times.reserve(steps + 1);
    out.states.reserve(steps + 1);
    out.noise.reserve(steps);
    out.times.push_back(0.0);
    out.states.push_back(x);
    out.dt = cfg.dt;
    out.seed = cfg.seed;
    out.stream = cfg.stream;
    for (int k = 0; k < steps; ++k) {
      std::fill(accum_noise.begin(), accum_noise.end(), 0.0);
      substep(x, cfg.dt, 0);
      out.times.push_back((k + 1) * cfg.dt);
      out.states.push_back(x);
      out.noise.push_back(accum_noise);
    }
    return std::move(out);
  }
};

void check_init(const PointConfiguration& init, double guard) {
  if (init.frame != sampler::Frame::soft_edge)
    throw frame_error("sde: initial configuration must be in the soft-edge frame");
  for (size_t i = 0; i + 1 < init.points.size(); ++i)
    if (!(init.points[i] > init.points[i + 1]))
      throw precondition_error("sde: initial configuration must be strictly ordered");
  (void)guard;
}

}  // namespace

PathEnsemble simulate_finite(int beta, int n, const PointConfiguration& init,
                             const SDEConfig& cfg) {
  check_config(cfg);
  check_init(init, cfg.collision_guard);
  if (static_cast<int>(init.points.size()) != n)
    throw precondition_error("simulate_finite: init size must equal n");
  const double n13 = std::pow(n, 1.0 / 3.0);
  DriftFn drift_fn = [beta, n, n13](std::span<const double> x, std::span<double> out) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) s += 1.0 / (x[i] - x[j]);
      out[i] = 0.5 * beta * (s - n13 - x[i] / (2.0 * n13));
    }
  };
  Integrator integ(drift_fn, cfg, std::numeric_limits<double>::quiet_NaN(), n);
  PathEnsemble p = integ.run(init.points);
  p.beta = beta;
  return p;
}

PathEnsemble simulate_truncated_isde(int beta, int m, const PointConfiguration& init_head,
                                     std::span<const double> tail, const SDEConfig& cfg) {
  check_config(cfg);
  check_init(init_head, cfg.collision_guard);
  if (static_cast<int>(init_head.points.size()) != m)
    throw precondition_error("simulate_truncated_isde: head size must equal m");
  for (size_t i = 0; i + 1 < tail.size(); ++i) {
    if (!(tail[i] > tail[i + 1]))
      throw precondition_error("simulate_truncated_isde: tail must be sorted descending");
    if (tail[i] - tail[i + 1] < 1e-12)
      throw precondition_error("simulate_truncated_isde: tail carries duplicate points");
  }
  const double tail_top =
      tail.empty() ? std::numeric_limits<double>::quiet_NaN()
                   : *std::max_element(tail.begin(), tail.end());
  if (!tail.empty() && !(init_head.points.back() > tail_top))
    throw precondition_error("simulate_truncated_isde: head must start above the tail");

  const auto& spec = cfg.drift_spec;
  std::vector<double> tail_copy(tail.begin(), tail.end());
  double compensator = 0.0;
  bool trim_tail_to_ball = false;
  if (spec.mode == drift::CompensatorMode::semicircle) {
    compensator = 2.0 * std::sqrt(spec.truncation_radius) / std::numbers::pi;
    trim_tail_to_ball = true;
  } else if (spec.mode == drift::CompensatorMode::finite_n) {
    const int n_total = m + static_cast<int>(tail.size());
    const double n13 = std::pow(n_total, 1.0 / 3.0);
    compensator = n13;  // the x-dependent part is added per particle below
    (void)n13;
  } else {
    throw precondition_error("simulate_truncated_isde: palm mode is not a drift mode");
  }

  const int n_total = m + static_cast<int>(tail.size());
  const double n13 = std::pow(n_total, 1.0 / 3.0);
  const double radius = spec.truncation_radius;
  DriftFn drift_fn = [=, &tail_copy](std::span<const double> x, std::span<double> out) {
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int j = 0; j < m; ++j)
        if (j != i) s += 1.0 / (x[i] - x[j]);
      for (double y : tail_copy) {
        if (trim_tail_to_ball && std::abs(y) >= radius) continue;
        s += 1.0 / (x[i] - y);
      }
      double comp = compensator;
      if (spec.mode == drift::CompensatorMode::finite_n) comp = n13 + x[i] / (2.0 * n13);
      out[i] = 0.5 * spec.beta * (s - comp);
    }
  };
  Integrator integ(drift_fn, cfg, tail_top, m);
  PathEnsemble p = integ.run(init_head.points);
  p.beta = beta;
  p.frozen_tail = std::move(tail_copy);
  return p;
}

PathEnsemble simulate_brownian(int m, std::span<const double> init, const SDEConfig& cfg) {
  check_config(cfg);
  if (static_cast<int>(init.size()) != m)
    throw precondition_error("simulate_brownian: init size must equal m");
  DriftFn drift_fn = [](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };
  // Brownian reference paths carry no ordering constraint
  Integrator integ(drift_fn, cfg, std::numeric_limits<double>::quiet_NaN(), m);
  integ.guarded = false;
  std::vector<double> x(init.begin(), init.end());
  PathEnsemble p = integ.run(x);
  p.beta = cfg.drift_spec.beta;
  return p;
}

std::vector<double> integrate_prescribed(
    const std::function<void(std::span<const double>, std::span<double>)>& drift,
    std::span<const double> init, double dt, int steps,
    const std::vector<std::vector<double>>& noise) {
  if (static_cast<int>(noise.size()) < steps)
    throw input_error("integrate_prescribed: not enough noise increments");
  std::vector<double> x(init.begin(), init.end());
  std::vector<double> b(x.size());
  for (int k = 0; k < steps; ++k) {
    drift(x, b);
    for (size_t i = 0; i < x.size(); ++i) x[i] += b[i] * dt + noise[k][i];
  }
  return x;
}

GirsanovAccumulator girsanov_log_density(const PathEnsemble& path, int m,
                                         std::span<const double> tail, double h,
                                         const drift::DriftSpec& spec, bool zero_drift) {
  if (path.noise.empty() || path.noise.size() + 1 != path.states.size())
    throw input_error("girsanov_log_density: path is missing its stored noise");
  if (static_cast<int>(path.states.front().size()) < m)
    throw precondition_error("girsanov_log_density: path has fewer than m coordinates");
  if (!(h > 0.0)) throw precondition_error("girsanov_log_density: h must be positive");

  const double compensator = 2.0 * std::sqrt(spec.truncation_radius) / std::numbers::pi;
  std::vector<double> b(m);
  GirsanovAccumulator acc;
  acc.tau = path.times.back();
  for (size_t k = 0; k + 1 < path.states.size(); ++k) {
    const auto& x = path.states[k];
    const double dt = path.times[k + 1] - path.times[k];
    double quad = 0.0;
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      if (!zero_drift) {
        for (int j = 0; j < m; ++j)
          if (j != i) s += 1.0 / (x[i] - x[j]);
        for (double y : tail)
          if (std::abs(y) < spec.truncation_radius) s += 1.0 / (x[i] - y);
        s = 0.5 * spec.beta * (s - compensator);
      }
      b[i] = s;
      quad += s * s;
    }
    for (int i = 0; i < m; ++i) acc.stochastic_integral += b[i] * path.noise[k][i];
    acc.quadratic_half += 0.5 * quad * dt;
    if (2.0 * acc.quadratic_half >= h) {
      acc.tau = path.times[k + 1];
      acc.tau_reached = true;
      break;
    }
  }
  return acc;
}

}  // namespace airyedge::sde
