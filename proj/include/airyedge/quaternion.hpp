#pragma once

#include <array>
#include <complex>
#include <vector>

namespace airyedge::quaternion {

using cplx = std::complex<double>;

// Quaternion in the 2x2 complex representation: q = q0*1 + q1*e1 + q2*e2 +
// q3*e3 with e1 = [[i,0],[0,-i]], e2 = [[0,1],[-1,0]], e3 = [[0,i],[i,0]].
struct Quaternion {
  cplx q0{}, q1{}, q2{}, q3{};

  static Quaternion one() { return {1.0, 0.0, 0.0, 0.0}; }
  static Quaternion scalar(cplx v) { return {v, 0.0, 0.0, 0.0}; }
  // From matrix [[a,b],[c,d]].
  static Quaternion from_matrix(cplx a, cplx b, cplx c, cplx d);
  // Back to [[a,b],[c,d]] as {a, b, c, d}.
  std::array<cplx, 4> to_matrix() const;

  Quaternion conjugate() const { return {q0, -q1, -q2, -q3}; }
  cplx scalar_part() const { return q0; }

  Quaternion operator+(const Quaternion& o) const {
    return {q0 + o.q0, q1 + o.q1, q2 + o.q2, q3 + o.q3};
  }
  Quaternion operator-(const Quaternion& o) const {
    return {q0 - o.q0, q1 - o.q1, q2 - o.q2, q3 - o.q3};
  }
  Quaternion operator*(double s) const { return {q0 * s, q1 * s, q2 * s, q3 * s}; }
};

Quaternion multiply(const Quaternion& a, const Quaternion& b);

// Self-dual quaternion matrix: a_ij = conjugate(a_ji).
struct SelfDualMatrix {
  int order = 0;
  std::vector<Quaternion> entries;  // row-major, order x order

  Quaternion& at(int i, int j) { return entries[i * order + j]; }
  const Quaternion& at(int i, int j) const { return entries[i * order + j]; }

  static SelfDualMatrix zero(int k) { return {k, std::vector<Quaternion>(k * k)}; }
};

inline constexpr int kQdetOrderCap = 9;

// Quaternion determinant over cycle decompositions: sum over permutations of
// sign(sigma) * prod over cycles of the scalar part of the entry product.
// Cycles start at their minimal index; permutations are enumerated in
// lexicographic order so floating-point summation is deterministic.
cplx qdet(const SelfDualMatrix& m);

}  // namespace airyedge::quaternion
