#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace airyedge::verify {

struct Verdict {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double bound = 0.0;
};

struct ReportItem {
  std::string key;
  double value = 0.0;
};

struct BoundReport {
  std::string suite;
  nlohmann::json params;
  std::string grid;
  std::vector<ReportItem> values;
  std::vector<Verdict> verdicts;

  bool pass() const;
  nlohmann::json to_json() const;
};

// Numeric ceilings calibrated once from a reference run; stored as golden
// data, overridable from JSON.
struct Ceilings {
  double density_sup = 1.5;
  double density_spread = 2.0;
  double density_limit_sup = 1.0;
  double density_sqrt_growth = 1.0;
  double palm_weighted_sup = 2.0;
  double palm_identity_tol = 1e-10;
  double palm_pure32_floor = 3.0;
  double i_integral_last = 0.5;
  double i1_quarter_factor = 0.25;
  double g_decay_last = 6.0;

  static Ceilings from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Density bound: sup over the grid of
// |rho^{n,1} - rho_hat^n| / (1/|x| + 1(beta != 2)/|x|^{1/4}), uniformity over
// n_list, the sqrt growth constant, and optionally the limit-kernel band.
BoundReport check_density_bound(int beta, std::span<const int> n_list, int grid_points,
                                bool include_limit, const Ceilings& c);

// Palm-difference bound with the (|y|^{-3/2} + 1(beta != 2)|y|^{-1/4}) weight,
// the L/rho identity route, and the beta != 2 weight-weakening observation.
BoundReport check_palm_difference(int beta, int n, double x, int grid_points,
                                  const Ceilings& c);

// I^n_{beta,k}(x, s) along s_list for k in ks (1..6); verdicts: decreasing in
// s, the k = 1 quarter-decay, and the final value below the ceiling.
BoundReport evaluate_I_integrals(int beta, int n, std::span<const int> ks, double x,
                                 std::span<const double> s_list, const Ceilings& c);

// Monte Carlo variance of the w-term over reduced-Palm draws against the
// two-integral formula; beta = 2 only (Palm sampling is projection-based).
BoundReport variance_check(int n, double x, double s, int mc_count, uint64_t seed,
                           const Ceilings& c, int threads = 0);

struct GExponents {
  double a = 0.0, b = 0.0, c = 0.0, nu = 0.0;
};

// Decay of the cut double integral of G_hat_{a,b,c}(|u|,|v|)/|uv| over
// |u|,|v| > s, with the near-diagonal band handled by the polynomial bound.
BoundReport check_G_decay(std::span<const GExponents> sets, std::span<const double> s_list,
                          const Ceilings& c);

}  // namespace airyedge::verify
