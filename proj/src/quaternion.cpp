#include "airyedge/quaternion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "airyedge/errors.hpp"

namespace airyedge::quaternion {

namespace {
const cplx kI{0.0, 1.0};
}

Quaternion Quaternion::from_matrix(cplx a, cplx b, cplx c, cplx d) {
  return {0.5 * (a + d), -0.5 * kI * (a - d), 0.5 * (b - c), -0.5 * kI * (b + c)};
}

std::array<cplx, 4> Quaternion::to_matrix() const {
  return {q0 + kI * q1, q2 + kI * q3, -q2 + kI * q3, q0 - kI * q1};
}

Quaternion multiply(const Quaternion& a, const Quaternion& b) {
  // algebra induced by the matrix identification: e_i^2 = -1, e1 e2 = e3,
  // e2 e3 = e1, e3 e1 = e2, anti-commuting
  return {
      a.q0 * b.q0 - a.q1 * b.q1 - a.q2 * b.q2 - a.q3 * b.q3,
      a.q0 * b.q1 + a.q1 * b.q0 + a.q2 * b.q3 - a.q3 * b.q2,
      a.q0 * b.q2 + a.q2 * b.q0 + a.q3 * b.q1 - a.q1 * b.q3,
      a.q0 * b.q3 + a.q3 * b.q0 + a.q1 * b.q2 - a.q2 * b.q1,
  };
}

namespace {

double norm1(const Quaternion& q) {
  return std::abs(q.q0) + std::abs(q.q1) + std::abs(q.q2) + std::abs(q.q3);
}

void check_self_dual(const SelfDualMatrix& m) {
  double scale = 1e-30;
  for (const auto& e : m.entries) scale = std::max(scale, norm1(e));
  for (int i = 0; i < m.order; ++i)
    for (int j = 0; j < m.order; ++j) {
      const Quaternion d = m.at(i, j) - m.at(j, i).conjugate();
      if (norm1(d) > 1e-12 * std::max(1.0, scale))
        throw precondition_error("qdet: matrix is not self-dual");
    }
}

}  // namespace

cplx qdet(const SelfDualMatrix& m) {
  const int k = m.order;
  if (k < 1) throw precondition_error("qdet: empty matrix");
  if (k > kQdetOrderCap) throw capability_error("qdet: order above the factorial cap");
  check_self_dual(m);

  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  cplx total = 0.0;
  do {
    // cycle decomposition, each cycle canonicalized to start at its minimum
    std::vector<bool> seen(k, false);
    cplx prod = 1.0;
    int n_cycles = 0;
    for (int s = 0; s < k; ++s) {
      if (seen[s]) continue;
      ++n_cycles;
      Quaternion q = Quaternion::one();
      int i = s;
      do {
        const int j = perm[i];
        q = multiply(q, m.at(i, j));
        seen[i] = true;
        i = j;
      } while (i != s);
      prod *= q.scalar_part();
    }
    const int sign = ((k - n_cycles) % 2 == 0) ? 1 : -1;
    total += static_cast<double>(sign) * prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

}  // namespace airyedge::quaternion
