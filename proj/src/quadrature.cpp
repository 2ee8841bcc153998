#include "airyedge/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "airyedge/errors.hpp"

namespace airyedge::quad {

namespace {

Rule compute_gauss_legendre(int n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    r.nodes[i] = -z;
    r.nodes[n - 1 - i] = z;
    r.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    r.weights[n - 1 - i] = r.weights[i];
  }
  return r;
}

std::map<int, Rule> g_rules;
std::mutex g_rules_mu;

double panel_value(const std::function<double(double)>& f, double a, double b, const Rule& r) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(c + h * r.nodes[i]);
  return s * h;
}

struct Adaptive {
  const std::function<double(double)>& f;
  const Rule& lo;
  const Rule& hi;
  Options opt;

  double run(double a, double b, double tol, int depth) const {
    const double v_lo = panel_value(f, a, b, lo);
    const double v_hi = panel_value(f, a, b, hi);
    const double err = std::abs(v_hi - v_lo);
    if (err <= tol || err <= opt.rel_tol * std::abs(v_hi) || depth >= opt.max_depth)
      return v_hi;
    const double m = 0.5 * (a + b);
    return run(a, m, 0.5 * tol, depth + 1) + run(m, b, 0.5 * tol, depth + 1);
  }
};

}  // namespace

const Rule& gauss_legendre(int n) {
  if (n < 1 || n > 1024) throw capability_error("gauss_legendre: order out of range");
  std::lock_guard lk(g_rules_mu);
  auto it = g_rules.find(n);
  if (it == g_rules.end()) it = g_rules.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, const Options& opt) {
  if (a == b) return 0.0;
  double sgn = 1.0;
  if (a > b) {
    std::swap(a, b);
    sgn = -1.0;
  }
  const Rule& lo = gauss_legendre(7);
  const Rule& hi = gauss_legendre(15);
  Adaptive ad{f, lo, hi, opt};
  double total = 0.0;
  if (opt.max_panel > 0.0 && b - a > opt.max_panel) {
    const int k = static_cast<int>(std::ceil((b - a) / opt.max_panel));
    const double tol = opt.abs_tol / k;
    for (int i = 0; i < k; ++i) {
      const double pa = a + (b - a) * i / k;
      const double pb = a + (b - a) * (i + 1) / k;
      total += ad.run(pa, pb, tol, 0);
    }
  } else {
    total = ad.run(a, b, opt.abs_tol, 0);
  }
  return sgn * total;
}

double integrate_split(const std::function<double(double)>& f, double a, double b,
                       std::span<const double> breakpoints, const Options& opt) {
  if (a == b) return 0.0;
  double sgn = 1.0;
  if (a > b) {
    std::swap(a, b);
    sgn = -1.0;
  }
  std::vector<double> pts;
  pts.push_back(a);
  for (double p : breakpoints)
    if (p > a && p < b) pts.push_back(p);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (size_t i = 0; i + 1 < pts.size(); ++i)
    total += integrate(f, pts[i], pts[i + 1], opt);
  return sgn * total;
}

double fixed_panel(const std::function<double(double)>& f, double a, double b, int order) {
  return panel_value(f, a, b, gauss_legendre(order));
}

}  // namespace airyedge::quad
