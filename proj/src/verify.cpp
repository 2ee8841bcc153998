#include "airyedge/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "airyedge/errors.hpp"
#include "airyedge/rng.hpp"
#include "airyedge/densities.hpp"
#include "airyedge/kernels.hpp"
#include "airyedge/quaternion.hpp"
#include "airyedge/parallel.hpp"
#include "airyedge/quadrature.hpp"
#include "airyedge/sampler.hpp"

namespace airyedge::verify {

namespace {

using kernels::KernelHandle;

double support_lo(int n) { return -4.0 * std::pow(n, 2.0 / 3.0) - 40.0; }
constexpr double kSupportHi = 40.0;

// panel partition with width tied to the local oscillation scale
std::vector<double> oscillation_panels(double a, double b) {
  std::vector<double> cuts{a};
  double u = a;
  while (u < b) {
    u += std::clamp(0.9 / std::sqrt(1.0 + std::abs(u)), 0.05, 0.5);
    cuts.push_back(std::min(u, b));
  }
  if (cuts.back() < b) cuts.push_back(b);
  return cuts;
}

double panel_quad(const std::function<double(double)>& f, double a, double b, int order = 6) {
  if (!(b > a)) return 0.0;
  const auto cuts = oscillation_panels(a, b);
  double total = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    total += quad::fixed_panel(f, cuts[i], cuts[i + 1], order);
  return total;
}

void add_verdict(BoundReport& r, const std::string& name, double value, double bound,
                 bool pass) {
  r.verdicts.push_back({name, pass, value, bound});
}

}  // namespace

bool BoundReport::pass() const {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

nlohmann::json BoundReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["params"] = params;
  j["grid"] = grid;
  auto& vals = j["values"] = nlohmann::json::array();
  for (const auto& it : values) vals.push_back({{"key", it.key}, {"value", it.value}});
  auto& verd = j["verdicts"] = nlohmann::json::array();
  for (const auto& v : verdicts)
    verd.push_back({{"name", v.name}, {"pass", v.pass}, {"value", v.value}, {"bound", v.bound}});
  j["verdict"] = pass() ? "pass" : "fail";
  return j;
}

Ceilings Ceilings::from_json(const nlohmann::json& j) {
  Ceilings c;
  auto get = [&](const char* k, double& slot) {
    if (j.contains(k)) slot = j.at(k).get<double>();
  };
  get("density_sup", c.density_sup);
  get("density_spread", c.density_spread);
  get("density_limit_sup", c.density_limit_sup);
  get("density_sqrt_growth", c.density_sqrt_growth);
  get("palm_weighted_sup", c.palm_weighted_sup);
  get("palm_identity_tol", c.palm_identity_tol);
  get("palm_pure32_floor", c.palm_pure32_floor);
  get("i_integral_last", c.i_integral_last);
  get("i1_quarter_factor", c.i1_quarter_factor);
  get("g_decay_last", c.g_decay_last);
  return c;
}

nlohmann::json Ceilings::to_json() const {
  return {{"density_sup", density_sup},
          {"density_spread", density_spread},
          {"density_limit_sup", density_limit_sup},
          {"density_sqrt_growth", density_sqrt_growth},
          {"palm_weighted_sup", palm_weighted_sup},
          {"palm_identity_tol", palm_identity_tol},
          {"palm_pure32_floor", palm_pure32_floor},
          {"i_integral_last", i_integral_last},
          {"i1_quarter_factor", i1_quarter_factor},
          {"g_decay_last", g_decay_last}};
}

BoundReport check_density_bound(int beta, std::span<const int> n_list, int grid_points,
                                bool include_limit, const Ceilings& c) {
  BoundReport r;
  r.suite = "density-bound";
  r.params = {{"beta", beta}, {"n_list", std::vector<int>(n_list.begin(), n_list.end())},
              {"grid_points", grid_points}};
  r.grid = "[-2 n^{2/3}, 10] per n; limit band on [-100, -2]";
  const bool weight14 = beta != 2;

  double sup_min = 1e300, sup_max = 0.0, growth_max = 0.0;
  for (int n : n_list) {
    const KernelHandle h = KernelHandle::finite_n(beta, n);
    const densities::EdgeDensity d = densities::EdgeDensity::finite_n(n);
    const double lo = -2.0 * std::pow(n, 2.0 / 3.0);
    double sup = 0.0;
    for (int i = 0; i < grid_points; ++i) {
      const double x = lo + (10.0 - lo) * (i + 0.5) / grid_points;
      const double diff = std::abs(kernels::rho1(h, x) - densities::rho_hat(d, x));
      const double ax = std::abs(x);
      const double weight = 1.0 / ax + (weight14 ? 1.0 / std::pow(ax, 0.25) : 0.0);
      sup = std::max(sup, diff / weight);
      growth_max =
          std::max(growth_max, kernels::rho1(h, x) / std::sqrt(ax + 1.0));
    }
    r.values.push_back({"sup_n" + std::to_string(n), sup});
    sup_min = std::min(sup_min, sup);
    sup_max = std::max(sup_max, sup);
  }
  add_verdict(r, "uniform_bound", sup_max, c.density_sup, sup_max <= c.density_sup);
  if (n_list.size() > 1)
    add_verdict(r, "spread", sup_max / sup_min, c.density_spread,
                sup_max / sup_min <= c.density_spread);
  r.values.push_back({"sqrt_growth_constant", growth_max});
  add_verdict(r, "sqrt_growth", growth_max, c.density_sqrt_growth,
              growth_max <= c.density_sqrt_growth);

  if (include_limit) {
    const KernelHandle h = KernelHandle::limit(beta);
    const densities::EdgeDensity d = densities::EdgeDensity::limit();
    double sup = 0.0;
    for (int i = 0; i < grid_points; ++i) {
      const double x = -100.0 + 98.0 * (i + 0.5) / grid_points;
      const double diff = std::abs(kernels::rho1(h, x) - densities::rho_hat(d, x));
      const double ax = std::abs(x);
      const double weight = 1.0 / ax + (beta == 4 ? 1.0 / std::pow(ax, 0.25) : 0.0);
      sup = std::max(sup, diff / weight);
    }
    r.values.push_back({"limit_sup", sup});
    add_verdict(r, "limit_bound", sup, c.density_limit_sup, sup <= c.density_limit_sup);
  }
  return r;
}

BoundReport check_palm_difference(int beta, int n, double x, int grid_points,
                                  const Ceilings& c) {
  BoundReport r;
  r.suite = "palm-difference";
  r.params = {{"beta", beta}, {"n", n}, {"x", x}, {"grid_points", grid_points}};
  r.grid = "y in [-40, -|x|-1] u [|x|+1, 10]";
  const KernelHandle base = KernelHandle::finite_n(beta, n);
  const KernelHandle palmed = base.palm(x);
  const double rho_x = kernels::rho1(base, x);

  double sup = 0.0, sup_pure32 = 0.0, identity_worst = 0.0;
  auto visit = [&](double y) {
    const double diff = std::abs(kernels::rho1(base, y) - kernels::rho1(palmed, y));
    const double ay = std::abs(y);
    const double w = std::pow(ay, -1.5) + (beta != 2 ? std::pow(ay, -0.25) : 0.0);
    sup = std::max(sup, diff / w);
    sup_pure32 = std::max(sup_pure32, diff * std::pow(ay, 1.5));
    const double via_l = std::abs(kernels::l_product(base, x, y)) / rho_x;
    identity_worst = std::max(identity_worst, std::abs(diff - via_l));
  };
  for (int i = 0; i < grid_points; ++i) {
    visit(-40.0 + (-std::abs(x) - 1.0 + 40.0) * (i + 0.5) / grid_points);
    visit(std::abs(x) + 1.0 + (10.0 - std::abs(x) - 1.0) * (i + 0.5) / grid_points);
  }
  r.values.push_back({"weighted_sup", sup});
  r.values.push_back({"pure_three_halves_sup", sup_pure32});
  r.values.push_back({"identity_route_worst", identity_worst});
  add_verdict(r, "weighted_bound", sup, c.palm_weighted_sup, sup <= c.palm_weighted_sup);
  add_verdict(r, "identity_route", identity_worst, c.palm_identity_tol,
              identity_worst <= c.palm_identity_tol);
  if (beta != 2)
    add_verdict(r, "weight_weakening_ratio", sup_pure32 / sup, c.palm_pure32_floor,
                sup_pure32 / sup > c.palm_pure32_floor);
  return r;
}

BoundReport evaluate_I_integrals(int beta, int n, std::span<const int> ks, double x,
                                 std::span<const double> s_list, const Ceilings& c) {
  BoundReport r;
  r.suite = "I-integrals";
  r.params = {{"beta", beta}, {"n", n}, {"x", x},
              {"k_list", std::vector<int>(ks.begin(), ks.end())},
              {"s_list", std::vector<double>(s_list.begin(), s_list.end())}};
  r.grid = "support window with the |x-u| > s ball removed";
  const KernelHandle h = KernelHandle::finite_n(beta, n);
  const double lo = support_lo(n), hi = kSupportHi;
  const double rho_x = kernels::rho1(h, x);

  auto one_d = [&](int k, double s) {
    auto integrand = [&](double u) {
      const double d = std::abs(x - u);
      if (k == 1) return kernels::rho1(h, u) / (d * d);
      const double l = std::abs(kernels::l_product(h, x, u));
      return k == 2 ? l / (d * d) : l / d;
    };
    return panel_quad(integrand, lo, x - s) + panel_quad(integrand, x + s, hi);
  };
  auto two_d = [&](int k, double s) {
    // tensor panels over the region with both |x-u| > s and |x-v| > s
    const auto cuts_left = oscillation_panels(lo, x - s);
    const auto cuts_right = oscillation_panels(x + s, hi);
    std::vector<std::pair<double, double>> panels;
    for (const auto& cuts : {cuts_left, cuts_right})
      for (size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i + 1] > cuts[i]) panels.push_back({cuts[i], cuts[i + 1]});
    auto inner = [&](double u, double v) -> double {
      const double du = std::abs(x - u), dv = std::abs(x - v);
      if (k == 4) return std::abs(kernels::l_product(h, u, v)) / (du * dv);
      if (beta == 2) {
        const double t = kernels::kernel_scalar(h, u, x) * kernels::kernel_scalar(h, x, v) *
                         kernels::kernel_scalar(h, v, u);
        return std::abs(t) / (du * dv);
      }
      const quaternion::Quaternion prod =
          k == 5 ? quaternion::multiply(
                       quaternion::multiply(kernels::kernel_quaternion(h, u, x),
                                            kernels::kernel_quaternion(h, x, v)),
                       kernels::kernel_quaternion(h, v, u))
                 : quaternion::multiply(
                       quaternion::multiply(kernels::kernel_quaternion(h, u, v),
                                            kernels::kernel_quaternion(h, v, x)),
                       kernels::kernel_quaternion(h, x, u));
      return std::abs(prod.scalar_part().real()) / (du * dv);
    };
    const auto& rule = quad::gauss_legendre(4);
    double total = 0.0;
    for (const auto& [ua, ub] : panels) {
      for (const auto& [va, vb] : panels) {
        double acc = 0.0;
        for (size_t i = 0; i < rule.nodes.size(); ++i)
          for (size_t j = 0; j < rule.nodes.size(); ++j) {
            const double u = 0.5 * (ua + ub) + 0.5 * (ub - ua) * rule.nodes[i];
            const double v = 0.5 * (va + vb) + 0.5 * (vb - va) * rule.nodes[j];
            acc += rule.weights[i] * rule.weights[j] * inner(u, v);
          }
        total += acc * 0.25 * (ub - ua) * (vb - va);
      }
    }
    return total;
  };

  bool all_decreasing = true;
  double last_max = 0.0;
  double i1_first = 0.0, i1_last = 0.0;
  for (int k : ks) {
    if (k < 1 || k > 6) throw precondition_error("evaluate_I_integrals: k must lie in 1..6");
    double prev = 1e300;
    bool dec = true;
    double value = 0.0;
    for (double s : s_list) {
      value = (k <= 3) ? one_d(k, s) : two_d(k, s);
      r.values.push_back({"I" + std::to_string(k) + "_s" + std::to_string(s), value});
      if (value > prev + 1e-12) dec = false;
      prev = value;
      if (k == 1 && s == s_list.front()) i1_first = value;
      if (k == 1 && s == s_list.back()) i1_last = value;
      if (k == 2 || k == 3)
        r.values.push_back(
            {"I" + std::to_string(k) + "_over_rho_s" + std::to_string(s), value / rho_x});
    }
    all_decreasing = all_decreasing && dec;
    last_max = std::max(last_max, value);
  }
  add_verdict(r, "decreasing_in_s", all_decreasing ? 1.0 : 0.0, 1.0, all_decreasing);
  add_verdict(r, "final_below_ceiling", last_max, c.i_integral_last,
              last_max <= c.i_integral_last);
  if (std::find(ks.begin(), ks.end(), 1) != ks.end() && s_list.size() >= 2)
    add_verdict(r, "i1_quarter_decay", i1_last, c.i1_quarter_factor * i1_first,
                i1_last < c.i1_quarter_factor * i1_first);
  return r;
}

BoundReport variance_check(int n, double x, double s, int mc_count, uint64_t seed,
                           const Ceilings&, int threads) {
  BoundReport r;
  r.suite = "variance";
  r.params = {{"beta", 2}, {"n", n},  {"x", x},
              {"s", s},    {"mc", mc_count}, {"seed", seed}};
  r.grid = "palm window [support_lo, support_hi]";
  const KernelHandle base = KernelHandle::finite_n(2, n);
  const KernelHandle palmed = base.palm(x);
  const double lo = support_lo(n), hi = kSupportHi;

  // analytic pieces of (:= E w = 0, Var w = A - B)
  auto ratio = [&](double u) { return kernels::rho1(palmed, u) / (x - u); };
  const double integral_w =
      panel_quad(ratio, lo, x - s) + panel_quad(ratio, x + s, hi);
  auto a_term = [&](double u) {
    const double d = x - u;
    return kernels::rho1(palmed, u) / (d * d);
  };
  const double a_val = panel_quad(a_term, lo, x - s) + panel_quad(a_term, x + s, hi);

  const auto cuts_left = oscillation_panels(lo, x - s);
  const auto cuts_right = oscillation_panels(x + s, hi);
  std::vector<std::pair<double, double>> panels;
  for (const auto& cuts : {cuts_left, cuts_right})
    for (size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i + 1] > cuts[i]) panels.push_back({cuts[i], cuts[i + 1]});
  const auto& rule = quad::gauss_legendre(4);
  double b_val = 0.0;
  for (const auto& [ua, ub] : panels)
    for (const auto& [va, vb] : panels) {
      double acc = 0.0;
      for (size_t i = 0; i < rule.nodes.size(); ++i)
        for (size_t j = 0; j < rule.nodes.size(); ++j) {
          const double u = 0.5 * (ua + ub) + 0.5 * (ub - ua) * rule.nodes[i];
          const double v = 0.5 * (va + vb) + 0.5 * (vb - va) * rule.nodes[j];
          const double kk = kernels::kernel_scalar(palmed, u, v);
          acc += rule.weights[i] * rule.weights[j] * kk * kk / ((x - u) * (x - v));
        }
      b_val += acc * 0.25 * (ub - ua) * (vb - va);
    }
  const double analytic_var = a_val - b_val;

  // Monte Carlo over reduced-Palm draws
  const sampler::DppSampler dpp(palmed, lo, hi,
                                static_cast<int>((hi - lo) * 64.0));
  std::vector<double> w(mc_count);
  parallel_for(
      mc_count,
      [&](int64_t i) {
        CounterRng rng(seed, static_cast<uint64_t>(i));
        const auto cfg = dpp.draw(rng);
        double sum = 0.0;
        for (double y : cfg.points)
          if (std::abs(x - y) >= s) sum += 1.0 / (x - y);
        w[i] = sum - integral_w;
      },
      threads);
  double mean = 0.0;
  for (double v : w) mean += v;
  mean /= mc_count;
  double var = 0.0, m4 = 0.0;
  for (double v : w) {
    const double d = v - mean;
    var += d * d;
    m4 += d * d * d * d;
  }
  var /= mc_count;
  m4 /= mc_count;
  const double se_mean = std::sqrt(var / mc_count);
  const double se_var = std::sqrt(std::max(0.0, m4 - var * var) / mc_count);

  r.values.push_back({"mc_mean", mean});
  r.values.push_back({"mc_variance", var});
  r.values.push_back({"analytic_variance", analytic_var});
  r.values.push_back({"a_term", a_val});
  r.values.push_back({"b_term", b_val});
  r.values.push_back({"se_mean", se_mean});
  r.values.push_back({"se_variance", se_var});
  add_verdict(r, "mean_zero", std::abs(mean), 3.0 * se_mean, std::abs(mean) <= 3.0 * se_mean);
  add_verdict(r, "variance_match", std::abs(var - analytic_var), 3.0 * se_var,
              std::abs(var - analytic_var) <= 3.0 * se_var);
  return r;
}

BoundReport check_G_decay(std::span<const GExponents> sets, std::span<const double> s_list,
                          const Ceilings& c) {
  BoundReport r;
  r.suite = "G-decay";
  r.grid = "geometric panels over [s, 2^24 s]^2 with the diagonal band cut";
  auto sets_json = nlohmann::json::array();
  for (const auto& e : sets)
    sets_json.push_back({{"a", e.a}, {"b", e.b}, {"c", e.c}, {"nu", e.nu}});
  r.params = {{"sets", sets_json},
              {"s_list", std::vector<double>(s_list.begin(), s_list.end())}};

  bool all_dec = true;
  double last_max = 0.0;
  for (const auto& e : sets) {
    if (!(e.a + e.b + e.c > 0.0))
      throw precondition_error("check_G_decay: a + b + c must be positive");
    if (e.nu < 0.0) throw precondition_error("check_G_decay: nu must be nonnegative");
    const double gamma = std::max(0.0, e.nu - 1.0) + 0.5;
    double prev = 1e300;
    double value = 0.0;
    for (double s : s_list) {
      // First-quadrant integral in (u, w = v - u) coordinates so the w^{-c}
      // spike above the diagonal cut is resolved; G_hat is symmetric, so the
      // v > u half doubles and the sign quadrants contribute a factor 4.
      const int K = 24, J = 70;
      const auto& rule = quad::gauss_legendre(8);
      double far = 0.0;
      for (int ku = 0; ku < K; ++ku) {
        const double ua = s * std::pow(2.0, ku), ub = 2.0 * ua;
        for (size_t i = 0; i < rule.nodes.size(); ++i) {
          const double u = 0.5 * (ua + ub) + 0.5 * (ub - ua) * rule.nodes[i];
          const double wu = rule.weights[i] * 0.5 * (ub - ua);
          const double cut = std::pow(std::max(1.0, u), -gamma);
          double inner = 0.0;
          for (int j = 0; j < J; ++j) {
            const double wa = cut * std::pow(2.0, j), wb = 2.0 * wa;
            for (size_t q = 0; q < rule.nodes.size(); ++q) {
              const double w = 0.5 * (wa + wb) + 0.5 * (wb - wa) * rule.nodes[q];
              const double v = u + w;
              const double g1 =
                  1.0 / (std::pow(u, e.a) * std::pow(v, e.b) * std::pow(w, e.c));
              const double g2 =
                  1.0 / (std::pow(u, e.b) * std::pow(v, e.a) * std::pow(w, e.c));
              inner += rule.weights[q] * 0.5 * (wb - wa) * (g1 + g2) / (u * v);
            }
          }
          far += wu * inner;
        }
      }
      far *= 8.0;  // 2 for the u > v half, 4 for the sign quadrants
      // near-diagonal band bounded by the polynomial growth (1 + u^nu)
      auto band = [&](double u) {
        const double cut = std::pow(std::max(1.0, u), -gamma);
        return 4.0 * (1.0 + std::pow(u, e.nu)) * 2.0 * cut / (u * u);
      };
      double near = 0.0;
      for (int ku = 0; ku < K; ++ku) {
        const double ua = s * std::pow(2.0, ku), ub = 2.0 * ua;
        near += quad::fixed_panel(band, ua, ub, 8);
      }
      value = far + near;
      char key[64];
      std::snprintf(key, sizeof(key), "G(%g,%g,%g)_s%g", e.a, e.b, e.c, s);
      r.values.push_back({key, value});
      if (value > prev + 1e-14) all_dec = false;
      prev = value;
    }
    last_max = std::max(last_max, value);
  }
  add_verdict(r, "decreasing_in_s", all_dec ? 1.0 : 0.0, 1.0, all_dec);
  add_verdict(r, "final_below_ceiling", last_max, c.g_decay_last,
              last_max <= c.g_decay_last);
  return r;
}

}  // namespace airyedge::verify
