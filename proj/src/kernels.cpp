#include "airyedge/kernels.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>

#include "airyedge/densities.hpp"
#include "airyedge/errors.hpp"
#include "airyedge/quadrature.hpp"
#include "airyedge/specfun.hpp"

namespace airyedge::kernels {

namespace {

using specfun::airy;
using specfun::airy_derivs;
using specfun::airy_tail_integral;
using specfun::epsilon_psi;
using specfun::OscillatorIndex;

constexpr double kDiagBand = 1e-4;
const double kCbrt4 = std::pow(2.0, 2.0 / 3.0);  // beta = 4 frame factor

using D5 = std::array<double, 5>;

struct PairDerivs {
  D5 f, g;
};

// ---- divided-difference machinery ----------------------------------------
//
// K(x,y) = [f(x) g(y) - g(x) f(y)]/(x - y). Near the diagonal this switches
// to the expansion around the midpoint mu with delta = (y - x)/2:
//   K = A(mu) + B(mu) delta^2 + O(delta^4),
//   A = f' g - f g',  B = (f''' g - f g''' + 3 f' g'' - 3 f'' g')/6,
// and for the y-derivative dK/dy = A'/2 + B delta + B' delta^2 / 2 + O(d^3).

double dd_A(const PairDerivs& p) { return p.f[1] * p.g[0] - p.f[0] * p.g[1]; }
double dd_Ap(const PairDerivs& p) { return p.f[2] * p.g[0] - p.f[0] * p.g[2]; }
double dd_B(const PairDerivs& p) {
  return (p.f[3] * p.g[0] - p.f[0] * p.g[3] + 3.0 * (p.f[1] * p.g[2] - p.f[2] * p.g[1])) / 6.0;
}
double dd_Bp(const PairDerivs& p) {
  return (p.f[4] * p.g[0] - p.f[0] * p.g[4] + 2.0 * (p.f[3] * p.g[1] - p.f[1] * p.g[3])) / 6.0;
}

template <class PairFn>
double dd_value(const PairFn& at, double x, double y) {
  if (std::abs(x - y) >= kDiagBand) {
    const PairDerivs px = at(x), py = at(y);
    return (px.f[0] * py.g[0] - px.g[0] * py.f[0]) / (x - y);
  }
  const double mu = 0.5 * (x + y), delta = 0.5 * (y - x);
  const PairDerivs pm = at(mu);
  return dd_A(pm) + dd_B(pm) * delta * delta;
}

template <class PairFn>
double dd_dy(const PairFn& at, double x, double y) {
  if (std::abs(x - y) >= kDiagBand) {
    const PairDerivs px = at(x), py = at(y);
    const double num = px.f[0] * py.g[0] - px.g[0] * py.f[0];
    const double num_dy = px.f[0] * py.g[1] - px.g[0] * py.f[1];
    return num_dy / (x - y) + num / ((x - y) * (x - y));
  }
  const double mu = 0.5 * (x + y), delta = 0.5 * (y - x);
  const PairDerivs pm = at(mu);
  return 0.5 * dd_Ap(pm) + dd_B(pm) * delta + 0.5 * dd_Bp(pm) * delta * delta;
}

// ---- beta = 2 limit pair: f = Ai, g = Ai' ---------------------------------

PairDerivs airy_pair(double x) {
  const auto d = airy_derivs<6>(x);
  return {{d[0], d[1], d[2], d[3], d[4]}, {d[1], d[2], d[3], d[4], d[5]}};
}

// ---- finite pair: f = psi^k_N, g = psi^k_{N-1} -----------------------------

struct FinitePairFn {
  int n_states;  // N
  int scale;     // k

  PairDerivs operator()(double x) const {
    const int N = n_states, k = scale;
    const double m16 = std::pow(k, 1.0 / 6.0);
    const double m13 = m16 * m16;
    const double m23 = m13 * m13;
    const double xi = 2.0 * std::sqrt(static_cast<double>(k)) + x / m16;
    const auto tail = specfun::oscillator_phi_tail4(N + 1, xi);
    const double s = std::pow(k, 1.0 / 12.0);
    // psi^k at degrees N+1, N, N-1, N-2
    const double p_np1 = s * tail[3];
    const double p_n = s * tail[2];
    const double p_nm1 = s * tail[1];
    const double p_nm2 = s * tail[0];

    auto derivs = [&](int deg, double v, double v_up, double v_dn) {
      // first derivative from the ladder identity, higher ones from the ODE
      const double d1 = (-0.5 * std::sqrt(deg + 1.0) * v_up +
                         0.5 * std::sqrt(static_cast<double>(deg)) * v_dn) /
                        m16;
      const double cc = (k - deg - 0.5) / m13 + x + x * x / (4.0 * m23);
      const double cp = 1.0 + x / (2.0 * m23);
      const double cpp = 0.5 / m23;
      D5 d{};
      d[0] = v;
      d[1] = d1;
      d[2] = cc * v;
      d[3] = cp * v + cc * d1;
      d[4] = cpp * v + 2.0 * cp * d1 + cc * d[2];
      return d;
    };
    PairDerivs out;
    out.f = derivs(N, p_n, p_np1, p_nm1);
    out.g = derivs(N - 1, p_nm1, p_n, p_nm2);
    return out;
  }
};

double two_index_prefactor(int n_states, int scale) {
  return std::sqrt(static_cast<double>(n_states)) / std::pow(scale, 1.0 / 6.0);
}

quad::Options kernel_quad_opts(double span) {
  quad::Options opt;
  opt.abs_tol = 1e-11;
  opt.rel_tol = 1e-11;
  opt.max_panel = std::min(1.0, 2.0 / std::sqrt(1.0 + std::abs(span)));
  return opt;
}

// ---- J functions ------------------------------------------------------------

struct JFinite {
  // J^n(x, y) = K^{N,k}(x,y) + eps_coef * psi_a(x) (eps psi_b)(y)
  //             + odd_coef * psi_a(x)           (beta = 1, n odd)
  int n_states = 0, scale = 0;
  OscillatorIndex deg_a{};  // plain factor, argument x
  OscillatorIndex deg_b{};  // eps-transformed factor, argument y
  double eps_coef = 0.0;
  double odd_coef = 0.0;

  double value(double x, double y) const {
    double v =
        two_index_prefactor(n_states, scale) * dd_value(FinitePairFn{n_states, scale}, x, y);
    const double px = specfun::oscillator_psi(deg_a, x);
    v += eps_coef * px * epsilon_psi(deg_b, y);
    v += odd_coef * px;
    return v;
  }
  double dy(double x, double y) const {
    double v = two_index_prefactor(n_states, scale) * dd_dy(FinitePairFn{n_states, scale}, x, y);
    v += eps_coef * specfun::oscillator_psi(deg_a, x) * specfun::oscillator_psi(deg_b, y);
    return v;
  }
  // int_y^x J(u, y) du; the psi_a antiderivative comes from the eps transform
  double integral(double y, double x) const {
    const double pref = two_index_prefactor(n_states, scale);
    auto f = [&](double u) { return dd_value(FinitePairFn{n_states, scale}, u, y); };
    double v =
        pref * quad::integrate(f, y, x, kernel_quad_opts(std::max(std::abs(x), std::abs(y))));
    const double int_psi_a = epsilon_psi(deg_a, x) - epsilon_psi(deg_a, y);
    v += (eps_coef * epsilon_psi(deg_b, y) + odd_coef) * int_psi_a;
    return v;
  }
};

JFinite j1_finite_spec(int n) {
  JFinite j;
  j.n_states = n;
  j.scale = n;
  j.deg_a = {n - 1, n};
  j.deg_b = {n, n};
  j.eps_coef = 0.5;
  if (n % 2 == 1) j.odd_coef = 1.0 / specfun::oscillator_psi_total_integral({n - 1, n});
  return j;
}

JFinite j4_finite_spec(int n) {
  JFinite j;
  j.n_states = 2 * n + 1;
  j.scale = 2 * n;
  j.deg_a = {2 * n, 2 * n};
  j.deg_b = {2 * n + 1, 2 * n};
  j.eps_coef = std::sqrt(2.0 * n + 1.0) / (2.0 * std::sqrt(2.0 * n));
  return j;
}

struct JLimit {
  int beta;  // 1 or 4

  double value(double x, double y) const {
    const double t = airy_tail_integral(y);
    if (beta == 1) return k_airy2(x, y) + 0.5 * airy(x).ai * (1.0 - t);
    return k_airy2(x, y) - 0.5 * airy(x).ai * t;
  }
  double dy(double x, double y) const {
    return k_airy2_dy(x, y) + 0.5 * airy(x).ai * airy(y).ai;
  }
  double integral(double y, double x) const {
    const double int_k = k_airy2_integral(y, x);
    const double int_ai = airy_tail_integral(y) - airy_tail_integral(x);
    if (beta == 1) return int_k + 0.5 * (1.0 - airy_tail_integral(y)) * int_ai;
    return int_k - 0.5 * airy_tail_integral(y) * int_ai;
  }
};

double sign3(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

template <class J>
Quaternion block_beta1(const J& j, double x, double y) {
  return Quaternion::from_matrix(j.value(x, y), -j.dy(x, y),
                                 j.integral(y, x) - 0.5 * sign3(x - y), j.value(y, x));
}

// beta = 4 block in the GSE n-particle frame: arguments rescaled by 2^{2/3},
// block scaled by the matching Jacobian (a uniform scalar, so qdet picks up
// exactly one frame factor per point).
template <class J>
Quaternion block_beta4(const J& j, double x, double y) {
  const double X = kCbrt4 * x, Y = kCbrt4 * y;
  return Quaternion::from_matrix(0.5 * kCbrt4 * j.value(X, Y), -0.5 * kCbrt4 * j.dy(X, Y),
                                 0.5 * kCbrt4 * j.integral(Y, X), 0.5 * kCbrt4 * j.value(Y, X));
}

void check_beta(int beta) {
  if (beta != 1 && beta != 2 && beta != 4)
    throw precondition_error("kernels: beta must be 1, 2, or 4");
}

double rho1_base(const KernelHandle& h, double x);
Quaternion base_quaternion(const KernelHandle& h, double x, double y);
double base_scalar(const KernelHandle& h, double x, double y);

}  // namespace

KernelHandle KernelHandle::limit(int beta) {
  check_beta(beta);
  return {beta, false, 0, std::nullopt};
}

KernelHandle KernelHandle::finite_n(int beta, int n) {
  check_beta(beta);
  if (n < 1) throw precondition_error("KernelHandle: n must be positive");
  if (beta == 1 && n < 2) throw precondition_error("KernelHandle: beta = 1 requires n >= 2");
  return {beta, true, n, std::nullopt};
}

KernelHandle KernelHandle::palm(double x) const {
  if (rho1(*this, x) <= 1e-12)
    throw singularity_error("KernelHandle: degenerate Palm anchor, rho1 vanishes");
  KernelHandle h = *this;
  h.palm_anchor = x;
  return h;
}

double k_airy2(double x, double y) { return dd_value(airy_pair, x, y); }
double k_airy2_dy(double x, double y) { return dd_dy(airy_pair, x, y); }

double k_airy2_integral(double y, double x) {
  auto f = [&](double u) { return dd_value(airy_pair, u, y); };
  return quad::integrate(f, y, x, kernel_quad_opts(std::max(std::abs(x), std::abs(y))));
}

double k_finite_two_index(int n_states, int scale, double x, double y) {
  return two_index_prefactor(n_states, scale) * dd_value(FinitePairFn{n_states, scale}, x, y);
}

double k_finite_two_index_dy(int n_states, int scale, double x, double y) {
  return two_index_prefactor(n_states, scale) * dd_dy(FinitePairFn{n_states, scale}, x, y);
}

double k_finite_two_index_integral(int n_states, int scale, double y, double x) {
  auto f = [&](double u) { return dd_value(FinitePairFn{n_states, scale}, u, y); };
  return two_index_prefactor(n_states, scale) *
         quad::integrate(f, y, x, kernel_quad_opts(std::max(std::abs(x), std::abs(y))));
}

double k_airy2_finite(int n, double x, double y) { return k_finite_two_index(n, n, x, y); }

double k_airy2_finite_sum(int n, double x, double y) {
  const double k = n;
  const double m16 = std::pow(k, 1.0 / 6.0);
  const double xi = 2.0 * std::sqrt(k) + x / m16;
  const double eta = 2.0 * std::sqrt(k) + y / m16;
  std::vector<double> px(n), py(n);
  for (auto [pt, out] : {std::pair{xi, &px}, std::pair{eta, &py}}) {
    double qm1 = 0.0, q = 1.0;
    const double pref = std::exp(-0.25 * pt * pt) * std::pow(2.0 * std::numbers::pi, -0.25);
    for (int deg = 0; deg < n; ++deg) {
      (*out)[deg] = q * pref;
      const double next = (pt * q - std::sqrt(static_cast<double>(deg)) * qm1) /
                          std::sqrt(static_cast<double>(deg + 1));
      qm1 = q;
      q = next;
    }
  }
  double total = 0.0;
  for (int deg = 0; deg < n; ++deg) total += px[deg] * py[deg];
  // each psi carries k^{1/12}, the sum prefactor is k^{-1/3}
  return total * std::pow(k, 1.0 / 6.0 - 1.0 / 3.0);
}

double j1_limit(double x, double y) { return JLimit{1}.value(x, y); }
double j4_limit(double x, double y) { return JLimit{4}.value(x, y); }
double j1_finite(int n, double x, double y) { return j1_finite_spec(n).value(x, y); }
double j4_finite(int n, double x, double y) { return j4_finite_spec(n).value(x, y); }

Quaternion k_airy_quaternion(int beta, double x, double y) {
  if (beta == 1) return block_beta1(JLimit{1}, x, y);
  if (beta == 4) return block_beta4(JLimit{4}, x, y);
  throw precondition_error("k_airy_quaternion: beta must be 1 or 4");
}

Quaternion k_quaternion_finite(int beta, int n, double x, double y) {
  if (beta == 1) {
    if (n < 2) throw precondition_error("k_quaternion_finite: beta = 1 needs n >= 2");
    return block_beta1(j1_finite_spec(n), x, y);
  }
  if (beta == 4) {
    if (n < 1) throw precondition_error("k_quaternion_finite: n must be positive");
    return block_beta4(j4_finite_spec(n), x, y);
  }
  throw precondition_error("k_quaternion_finite: beta must be 1 or 4");
}

namespace {

double rho1_base(const KernelHandle& h, double x) {
  if (h.beta == 2) {
    if (!h.finite) {
      const auto d = airy(x);
      return d.ai_prime * d.ai_prime - x * d.ai * d.ai;
    }
    return k_airy2_finite(h.n, x, x);
  }
  const Quaternion q =
      h.finite ? k_quaternion_finite(h.beta, h.n, x, x) : k_airy_quaternion(h.beta, x, x);
  return q.scalar_part().real();
}

Quaternion base_quaternion(const KernelHandle& h, double x, double y) {
  return h.finite ? k_quaternion_finite(h.beta, h.n, x, y) : k_airy_quaternion(h.beta, x, y);
}

double base_scalar(const KernelHandle& h, double x, double y) {
  return h.finite ? k_airy2_finite(h.n, x, y) : k_airy2(x, y);
}

}  // namespace

double rho1(const KernelHandle& h, double x) {
  if (!h.palm_anchor) return rho1_base(h, x);
  KernelHandle base = h;
  base.palm_anchor.reset();
  const double a = *h.palm_anchor;
  const double r = rho1_base(base, a);
  if (r <= 1e-12) throw singularity_error("rho1: degenerate Palm anchor");
  if (h.beta == 2) {
    const double kxa = base_scalar(base, x, a);
    return rho1_base(base, x) - kxa * kxa / r;
  }
  const Quaternion prod =
      quaternion::multiply(base_quaternion(base, x, a), base_quaternion(base, a, x));
  return rho1_base(base, x) - prod.scalar_part().real() / r;
}

double kernel_scalar(const KernelHandle& h, double x, double y) {
  if (h.beta != 2) throw precondition_error("kernel_scalar: beta = 2 only");
  const double v = base_scalar(h, x, y);
  if (!h.palm_anchor) return v;
  KernelHandle base = h;
  base.palm_anchor.reset();
  const double a = *h.palm_anchor;
  const double r = rho1_base(base, a);
  if (r <= 1e-12) throw singularity_error("kernel_scalar: degenerate Palm anchor");
  return v - base_scalar(base, x, a) * base_scalar(base, a, y) / r;
}

Quaternion kernel_quaternion(const KernelHandle& h, double x, double y) {
  if (h.beta == 2) throw precondition_error("kernel_quaternion: beta = 1 or 4 only");
  Quaternion v = base_quaternion(h, x, y);
  if (!h.palm_anchor) return v;
  KernelHandle base = h;
  base.palm_anchor.reset();
  const double a = *h.palm_anchor;
  const double r = rho1_base(base, a);
  if (r <= 1e-12) throw singularity_error("kernel_quaternion: degenerate Palm anchor");
  const Quaternion corr =
      quaternion::multiply(base_quaternion(base, x, a), base_quaternion(base, a, y));
  return v - corr * (1.0 / r);
}

double l_product(const KernelHandle& h, double x, double y) {
  if (h.beta == 2) return kernel_scalar(h, x, y) * kernel_scalar(h, y, x);
  const Quaternion prod =
      quaternion::multiply(kernel_quaternion(h, y, x), kernel_quaternion(h, x, y));
  return prod.scalar_part().real();
}

double l_product_jform(const KernelHandle& h, double x, double y) {
  if (h.palm_anchor) throw precondition_error("l_product_jform: non-Palm handles only");
  if (h.beta == 2) {
    const double v = base_scalar(h, x, y);
    return v * v;
  }
  if (h.beta == 1) {
    if (h.finite) {
      const JFinite j = j1_finite_spec(h.n);
      return j.value(x, y) * j.value(y, x) +
             j.dy(x, y) * (j.integral(y, x) - 0.5 * sign3(x - y));
    }
    const JLimit j{1};
    return j.value(x, y) * j.value(y, x) +
           j.dy(x, y) * (j.integral(y, x) - 0.5 * sign3(x - y));
  }
  const double X = kCbrt4 * x, Y = kCbrt4 * y;
  auto combine = [&](const auto& j) {
    return kCbrt4 * kCbrt4 * 0.25 *
           (j.value(X, Y) * j.value(Y, X) + j.dy(X, Y) * j.integral(Y, X));
  };
  if (h.finite) return combine(j4_finite_spec(h.n));
  return combine(JLimit{4});
}

double correlation(const CorrelationRequest& req) {
  const auto& h = req.handle;
  const int k = static_cast<int>(req.points.size());
  if (k < 1) throw precondition_error("correlation: need at least one point");
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (req.points[i] == req.points[j])
        throw precondition_error("correlation: points must be pairwise distinct");

  double value = 0.0;
  if (h.beta == 2) {
    Eigen::MatrixXd m(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        m(i, j) = (i == j) ? rho1(h, req.points[i])
                           : kernel_scalar(h, req.points[i], req.points[j]);
    value = m.determinant();
  } else {
    if (k > quaternion::kQdetOrderCap)
      throw capability_error("correlation: order above the qdet cap for beta = 1, 4");
    quaternion::SelfDualMatrix m = quaternion::SelfDualMatrix::zero(k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        m.at(i, j) = kernel_quaternion(h, req.points[i], req.points[j]);
    // absorb quadrature-level asymmetry before qdet
    for (int i = 0; i < k; ++i)
      for (int j = i; j < k; ++j) {
        const Quaternion avg = (m.at(i, j) + m.at(j, i).conjugate()) * 0.5;
        m.at(i, j) = avg;
        m.at(j, i) = avg.conjugate();
      }
    const auto q = quaternion::qdet(m);
    if (std::abs(q.imag()) > 1e-9)
      throw accuracy_error("correlation: imaginary residue above tolerance");
    value = q.real();
  }
  if (value < 0.0 && value > -1e-9) value = 0.0;
  return value;
}

double extended_airy_kernel(double s, double x, double t, double y) {
  quad::Options opt;
  opt.abs_tol = 1e-10;
  opt.rel_tol = 1e-10;
  if (s <= t) {
    const double tau = t - s;
    const double hi = 40.0 + std::max({0.0, -x, -y});
    auto f = [&](double v) {
      return std::exp(-0.5 * tau * v) * airy(x + v).ai * airy(y + v).ai;
    };
    opt.max_panel = 1.0;
    return quad::integrate(f, 0.0, hi, opt);
  }
  const double tau = s - t;
  const double hi = 90.0 / tau + std::max({0.0, x, y}) + 40.0;
  auto f = [&](double u) {
    return std::exp(-0.5 * tau * u) * airy(x - u).ai * airy(y - u).ai;
  };
  opt.max_panel = 0.5;
  return -quad::integrate(f, 0.0, hi, opt);
}

double fredholm_gap(double s, int quad_order) {
  if (quad_order < 10 || quad_order > 200)
    throw precondition_error("fredholm_gap: quad_order must lie in [10, 200]");
  const auto& rule = quad::gauss_legendre(quad_order);
  std::vector<double> u(quad_order), w(quad_order);
  for (int i = 0; i < quad_order; ++i) {
    const double wi = 0.5 * (rule.nodes[i] + 1.0);  // node on (0, 1)
    const double dwi = 0.5 * rule.weights[i];
    u[i] = s + (1.0 - wi) / wi;
    w[i] = dwi / (wi * wi);
  }
  Eigen::MatrixXd a(quad_order, quad_order);
  for (int i = 0; i < quad_order; ++i)
    for (int j = i; j < quad_order; ++j) {
      const double v = std::sqrt(w[i] * w[j]) * k_airy2(u[i], u[j]);
      a(i, j) = v;
      a(j, i) = v;
    }
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(quad_order, quad_order) - a;
  return m.determinant();
}

}  // namespace airyedge::kernels
