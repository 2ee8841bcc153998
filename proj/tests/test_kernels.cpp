#include "airyedge/kernels.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "airyedge/errors.hpp"
#include "airyedge/quadrature.hpp"
#include "airyedge/specfun.hpp"
#include "doctest.h"

using namespace airyedge;
using namespace airyedge::kernels;

namespace {

double qnorm1(const Quaternion& q) {
  return std::abs(q.q0) + std::abs(q.q1) + std::abs(q.q2) + std::abs(q.q3);
}

}  // namespace

TEST_CASE("limit kernel diagonal and symmetry") {
  const double aip0 = specfun::airy(0.0).ai_prime;
  CHECK(k_airy2(0.0, 0.0) == doctest::Approx(aip0 * aip0).epsilon(1e-12));
  CHECK(k_airy2(0.0, 0.0) == doctest::Approx(0.066987684).epsilon(1e-6));
  std::mt19937 gen(42);
  std::uniform_real_distribution<double> ud(-8.0, 4.0);
  for (int t = 0; t < 50; ++t) {
    const double x = ud(gen), y = ud(gen);
    CHECK(std::abs(k_airy2(x, y) - k_airy2(y, x)) < 1e-12);
  }
}

TEST_CASE("limit kernel off-diagonal decay band") {
  CHECK(std::abs(k_airy2(0.0, 20.0)) <= std::pow(20.0, -0.75));
  CHECK(std::abs(k_airy2(0.0, -20.0)) <= std::pow(20.0, -0.75));
  CHECK(std::abs(k_airy2(0.0, -40.0)) <= std::pow(40.0, -0.75));
}

TEST_CASE("limit kernel near-diagonal branch is consistent") {
  // hold the midpoint fixed and fit K(delta) = A + B delta^2 from two far
  // separations; the Taylor branch inside the band must match the model
  for (double mu : {-3.0, 0.0, 1.5}) {
    const double d1 = 0.6e-4, d2 = 1.2e-4;  // far branch
    const double k1 = k_airy2(mu - d1, mu + d1);
    const double k2 = k_airy2(mu - d2, mu + d2);
    const double b = (k2 - k1) / (d2 * d2 - d1 * d1);
    const double a = k1 - b * d1 * d1;
    const double dn = 0.4e-4;  // near branch
    const double predicted = a + b * dn * dn;
    CHECK(std::abs(k_airy2(mu - dn, mu + dn) - predicted) < 1e-8);
    // derivative branch: dK/dy at the symmetric pair is B delta + O(delta^3)
    // plus the midpoint drift term A'/2
    const double g1 = k_airy2_dy(mu - d1, mu + d1);
    const double gn = k_airy2_dy(mu - dn, mu + dn);
    CHECK(std::abs((g1 - gn) - b * (d1 - dn)) < 1e-8);
  }
}

TEST_CASE("dK/dy matches finite differences") {
  const double h = 1e-6;
  for (double x : {-2.0, 0.5}) {
    for (double y : {-1.0, 1.7}) {
      const double fd = (k_airy2(x, y + h) - k_airy2(x, y - h)) / (2 * h);
      CHECK(std::abs(k_airy2_dy(x, y) - fd) < 1e-7);
    }
  }
}

TEST_CASE("finite-n kernel: sum route equals ratio route") {
  CHECK(k_airy2_finite_sum(8, 0.3, -1.2) ==
        doctest::Approx(k_airy2_finite(8, 0.3, -1.2)).epsilon(1e-10));
  for (double x : {-4.0, -0.5, 1.0}) {
    for (double y : {-2.7, 0.9}) {
      CHECK(std::abs(k_airy2_finite_sum(12, x, y) - k_airy2_finite(12, x, y)) < 1e-8);
    }
  }
}

TEST_CASE("finite-n kernel trace equals n") {
  const int n = 6;
  const double lo = -4.0 * std::pow(n, 2.0 / 3.0) - 25.0;
  quad::Options opt{1e-9, 1e-9, 40, 0.5};
  const double tr =
      quad::integrate([&](double x) { return k_airy2_finite(n, x, x); }, lo, 25.0, opt);
  CHECK(tr == doctest::Approx(6.0).epsilon(1e-7));
}

TEST_CASE("finite-n kernel converges toward the limit") {
  const double at50 = std::abs(k_airy2_finite(50, 0.0, 1.0) - k_airy2(0.0, 1.0));
  const double at200 = std::abs(k_airy2_finite(200, 0.0, 1.0) - k_airy2(0.0, 1.0));
  CHECK(at200 < at50);
  double prev = 1e9;
  for (int n : {25, 50, 100, 200}) {
    double worst = 0.0;
    for (int i = 0; i <= 9; ++i)
      for (int j = 0; j <= 9; ++j) {
        const double x = -6.0 + 9.0 * i / 9.0;
        const double y = -6.0 + 9.0 * j / 9.0;
        worst = std::max(worst, std::abs(k_airy2_finite(n, x, y) - k_airy2(x, y)));
      }
    CHECK(worst < prev);
    prev = worst;
  }
}

TEST_CASE("finite-n symmetry") {
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> ud(-10.0, 3.0);
  for (int t = 0; t < 20; ++t) {
    const double x = ud(gen), y = ud(gen);
    CHECK(std::abs(k_airy2_finite(20, x, y) - k_airy2_finite(20, y, x)) < 1e-12);
  }
}

TEST_CASE("limit quaternion kernel diagonals reproduce the scalar identities") {
  // beta = 1: rho1 = rho1_{beta=2} + Ai(x)(1 - tail)/2
  for (double x : {0.0, -1.3, 0.8}) {
    const double lhs = k_airy_quaternion(1, x, x).scalar_part().real();
    const double rhs =
        k_airy2(x, x) + 0.5 * specfun::airy(x).ai * (1.0 - specfun::airy_tail_integral(x));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
  // beta = 4: 2^{-1/3} rho1_{beta=2}(2^{2/3}x) - 2^{-2/3} Ai(2^{2/3}x)
  //           int_x^inf Ai(2^{2/3}u) du
  const double c = std::pow(2.0, 2.0 / 3.0);
  for (double x : {0.0, 0.3, -0.9}) {
    const double lhs = k_airy_quaternion(4, x, x).scalar_part().real();
    const double tail = quad::integrate([&](double u) { return specfun::airy(c * u).ai; }, x,
                                        50.0, {1e-12, 1e-12});
    const double rhs = std::pow(2.0, -1.0 / 3.0) * k_airy2(c * x, c * x) -
                       std::pow(2.0, -2.0 / 3.0) * specfun::airy(c * x).ai * tail;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("quaternion kernels are self-dual across the argument swap") {
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> ud(-4.0, 2.0);
  for (int beta : {1, 4}) {
    for (int t = 0; t < 20; ++t) {
      const double x = ud(gen), y = ud(gen);
      const Quaternion a = k_airy_quaternion(beta, x, y);
      const Quaternion b = k_airy_quaternion(beta, y, x).conjugate();
      CHECK(qnorm1(a - b) < 1e-7);
    }
  }
}

TEST_CASE("finite quaternion kernel: beta = 1 even-n diagonal identity") {
  const int n = 6;
  for (double x : {-1.0, -2.5, 0.4}) {
    const double lhs = k_quaternion_finite(1, n, x, x).scalar_part().real();
    const double rhs =
        k_airy2_finite(n, x, x) +
        0.5 * specfun::oscillator_psi({n - 1, n}, x) * specfun::epsilon_psi({n, n}, x);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("finite quaternion kernel: beta = 4 diagonal identity") {
  // Rescaled-density identity; the epsilon-term coefficient forced by the
  // trace normalization is sqrt(2n+1)/(2^{11/6} sqrt(n)).
  const int n = 4;
  const double c = std::pow(2.0, 2.0 / 3.0);
  for (double x : {0.0, -0.7}) {
    const double lhs = k_quaternion_finite(4, n, x, x).scalar_part().real();
    const double rhs =
        std::pow(2.0, -1.0 / 3.0) * k_finite_two_index(2 * n + 1, 2 * n, c * x, c * x) +
        std::sqrt(2.0 * n + 1.0) / (std::pow(2.0, 11.0 / 6.0) * std::sqrt(double(n))) *
            specfun::oscillator_psi({2 * n, 2 * n}, c * x) *
            specfun::epsilon_psi({2 * n + 1, 2 * n}, c * x);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("finite quaternion kernels have total mass n") {
  quad::Options opt{1e-7, 1e-7, 40, 0.5};
  {
    const int n = 4;
    const double lo = -4.0 * std::pow(n, 2.0 / 3.0) - 25.0;
    const double tr = quad::integrate(
        [&](double x) { return k_quaternion_finite(1, n, x, x).scalar_part().real(); }, lo,
        25.0, opt);
    CHECK(tr == doctest::Approx(4.0).epsilon(1e-4));
  }
  {
    const int n = 5;  // odd-n correction term included
    const double lo = -4.0 * std::pow(n, 2.0 / 3.0) - 25.0;
    const double tr = quad::integrate(
        [&](double x) { return k_quaternion_finite(1, n, x, x).scalar_part().real(); }, lo,
        25.0, opt);
    CHECK(tr == doctest::Approx(5.0).epsilon(1e-4));
  }
  {
    const int n = 2;
    const double lo = -4.0 * std::pow(n, 2.0 / 3.0) - 22.0;
    const double tr = quad::integrate(
        [&](double x) { return k_quaternion_finite(4, n, x, x).scalar_part().real(); }, lo,
        22.0, opt);
    CHECK(tr == doctest::Approx(2.0).epsilon(1e-4));
  }
}

TEST_CASE("extended kernel reduces to the Airy kernel at equal times") {
  CHECK(extended_airy_kernel(1.0, 0.5, 1.0, -0.5) ==
        doctest::Approx(k_airy2(0.5, -0.5)).epsilon(1e-7));
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const double x = -2.0 + i, y = -2.0 + j;
      CHECK(std::abs(extended_airy_kernel(0.0, x, 0.0, y) - k_airy2(x, y)) < 1e-7);
    }
}

TEST_CASE("extended kernel case split") {
  const double forward = extended_airy_kernel(0.0, 0.3, 1.0, 0.6);
  const double backward = extended_airy_kernel(1.0, 0.3, 0.0, 0.6);
  CHECK(forward > 0.0);
  CHECK(backward < 0.0);
  const double near = extended_airy_kernel(0.0, 0.0, 0.0, 0.0);
  const double far = extended_airy_kernel(0.0, 0.0, 2.0, 0.0);
  CHECK(far > 0.0);
  CHECK(far < near);
}

TEST_CASE("palm kernel annihilates at the anchor and matches rho2") {
  const KernelHandle base = KernelHandle::limit(2);
  const KernelHandle palmed = base.palm(0.0);
  for (double z : {-2.0, 0.7, 3.0}) {
    CHECK(std::abs(kernel_scalar(palmed, 0.0, z)) < 1e-12);
  }
  const double x = 0.0, y = 1.0;
  const double rho2 = correlation({base, {x, y}});
  CHECK(rho1(palmed, y) == doctest::Approx(rho2 / rho1(base, x)).epsilon(1e-10));
}

TEST_CASE("palm identity for the finite kernel") {
  const int n = 10;
  const KernelHandle base = KernelHandle::finite_n(2, n);
  const double x = 0.0;
  const KernelHandle palmed = base.palm(x);
  for (double u : {-3.0, -1.0, 1.5}) {
    const double direct = rho1(palmed, u);
    const double via_l = rho1(base, u) - l_product(base, x, u) / rho1(base, x);
    CHECK(direct == doctest::Approx(via_l).epsilon(1e-10));
  }
}

TEST_CASE("palm mass drops by exactly one particle") {
  const int n = 20;
  const KernelHandle base = KernelHandle::finite_n(2, n);
  const KernelHandle palmed = base.palm(0.0);
  const double lo = -4.0 * std::pow(n, 2.0 / 3.0) - 25.0;
  quad::Options opt{1e-8, 1e-8, 40, 0.5};
  const double diff =
      quad::integrate([&](double y) { return rho1(base, y) - rho1(palmed, y); }, lo, 25.0, opt);
  CHECK(diff == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("l_product routes agree") {
  const KernelHandle h2 = KernelHandle::finite_n(2, 20);
  const double k = kernel_scalar(h2, 0.0, 1.0);
  CHECK(l_product(h2, 0.0, 1.0) == doctest::Approx(k * k).epsilon(1e-12));

  const KernelHandle h1 = KernelHandle::finite_n(1, 6);
  for (auto [x, y] : {std::pair{0.0, 1.0}, std::pair{-2.0, 0.5}, std::pair{-1.0, -3.2}}) {
    CHECK(l_product(h1, x, y) == doctest::Approx(l_product_jform(h1, x, y)).epsilon(1e-9));
  }
  const KernelHandle h4 = KernelHandle::finite_n(4, 3);
  for (auto [x, y] : {std::pair{0.0, 0.8}, std::pair{-1.1, 0.2}}) {
    CHECK(l_product(h4, x, y) == doctest::Approx(l_product_jform(h4, x, y)).epsilon(1e-8));
  }
  const Quaternion prod = quaternion::multiply(kernel_quaternion(h1, 1.0, -2.0),
                                               kernel_quaternion(h1, -2.0, 1.0));
  CHECK(std::abs(prod.scalar_part().imag()) < 1e-10);
}

TEST_CASE("correlation basics") {
  const KernelHandle h = KernelHandle::limit(2);
  CHECK(correlation({h, {0.5}}) == doctest::Approx(rho1(h, 0.5)).epsilon(1e-12));
  const double r2 = correlation({h, {0.1, -1.4}});
  CHECK(r2 >= 0.0);
  CHECK(r2 == doctest::Approx(rho1(h, 0.1) * rho1(h, -1.4) -
                              k_airy2(0.1, -1.4) * k_airy2(0.1, -1.4))
                  .epsilon(1e-10));
  CHECK_THROWS_AS(correlation({h, {1.0, 1.0}}), precondition_error);
  std::vector<double> many(10);
  for (int i = 0; i < 10; ++i) many[i] = -0.3 * i;
  CHECK_THROWS_AS(correlation({KernelHandle::limit(1), many}), capability_error);
}

TEST_CASE("density band: finite-n one-point correlation tracks rho_hat") {
  const int n = 50;
  const KernelHandle h = KernelHandle::finite_n(2, n);
  double worst = 0.0;
  for (int i = 0; i <= 30; ++i) {
    const double x = -std::pow(n, 2.0 / 3.0) + (std::pow(n, 2.0 / 3.0) - 2.0) * i / 30.0;
    const double edge = 4.0 * std::pow(n, 2.0 / 3.0);
    const double rh = std::sqrt(std::max(0.0, -x * (1.0 + x / edge))) / std::numbers::pi;
    worst = std::max(worst, std::abs(rho1(h, x) - rh) * std::abs(x));
  }
  CHECK(worst < 1.0);  // order-1 constant, estimated numerically
}

TEST_CASE("correlation positivity at random point sets") {
  std::mt19937 gen(23);
  std::uniform_real_distribution<double> ud(-9.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + trial % 3;
    std::vector<double> pts;
    while (static_cast<int>(pts.size()) < k) {
      const double c = ud(gen);
      bool ok = true;
      for (double p : pts) ok = ok && std::abs(p - c) > 1e-3;
      if (ok) pts.push_back(c);
    }
    const int beta = (trial % 3 == 0) ? 1 : (trial % 3 == 1 ? 2 : 4);
    CHECK(correlation({KernelHandle::limit(beta), pts}) >= -1e-9);
  }
}

TEST_CASE("fredholm gap probability") {
  CHECK(1.0 - fredholm_gap(8.0, 40) < 1e-8);
  const double fm1 = fredholm_gap(-1.0, 60);
  const double f0 = fredholm_gap(0.0, 60);
  const double f1 = fredholm_gap(1.0, 60);
  CHECK(fm1 < f0);
  CHECK(f0 < f1);
  CHECK(fm1 > 0.0);
  CHECK(f1 < 1.0);
  CHECK(std::abs(fredholm_gap(-2.0, 40) - fredholm_gap(-2.0, 80)) < 1e-6);
  CHECK_THROWS_AS(fredholm_gap(0.0, 5), precondition_error);
}

TEST_CASE("kernel handle guards") {
  CHECK_THROWS_AS(KernelHandle::limit(3), precondition_error);
  CHECK_THROWS_AS(KernelHandle::finite_n(1, 1), precondition_error);
  CHECK_THROWS_AS(KernelHandle::finite_n(2, 0), precondition_error);
  CHECK_THROWS_AS(KernelHandle::limit(2).palm(40.0), singularity_error);
}
