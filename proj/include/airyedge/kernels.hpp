#pragma once

#include <optional>
#include <vector>

#include "airyedge/quaternion.hpp"

namespace airyedge::kernels {

using quaternion::Quaternion;

// Selector resolving to an evaluatable correlation kernel: beta in {1,2,4},
// finite(n) or limit regime, optional reduced-Palm anchor.
struct KernelHandle {
  int beta = 2;
  bool finite = false;
  int n = 0;
  std::optional<double> palm_anchor;

  static KernelHandle limit(int beta);
  static KernelHandle finite_n(int beta, int n);
  KernelHandle palm(double x) const;
};

// ---- beta = 2 scalar kernels ----

// Limit Airy kernel [Ai(x)Ai'(y) - Ai'(x)Ai(y)]/(x-y), Taylor branch near the
// diagonal, diagonal value Ai'(x)^2 - x Ai(x)^2.
double k_airy2(double x, double y);
double k_airy2_dy(double x, double y);            // d/dy of the above
double k_airy2_integral(double y, double x);      // int_y^x K(u, y) du

// Finite-n soft-edge kernel, Christoffel-Darboux ratio form with the same
// near-diagonal handling. The generalized two-index kernel K^{N,k} covers the
// beta = 4 block (N = 2n+1 states at scale k = 2n).
double k_airy2_finite(int n, double x, double y);
double k_finite_two_index(int n_states, int scale, double x, double y);
double k_finite_two_index_dy(int n_states, int scale, double x, double y);
double k_finite_two_index_integral(int n_states, int scale, double y, double x);

// Eigenfunction-sum route (oracle for the ratio form).
double k_airy2_finite_sum(int n, double x, double y);

// ---- beta = 1, 4 quaternion kernels ----

// Limit quaternion kernel blocks. For beta = 4 the returned kernel is
// expressed in the n-particle soft-edge frame of the GSE ensemble, which
// rescales the block arguments by 2^{2/3} and the block by the matching
// Jacobian so that qdet correlations come out in that frame.
Quaternion k_airy_quaternion(int beta, double x, double y);
Quaternion k_quaternion_finite(int beta, int n, double x, double y);

// J-functions behind the blocks (exposed for the two-route checks).
double j1_limit(double x, double y);
double j4_limit(double x, double y);
double j1_finite(int n, double x, double y);
double j4_finite(int n, double x, double y);

// ---- handle-level evaluation ----

// One-point correlation rho^1 at x for any handle (Palm handles give the
// reduced-Palm intensity).
double rho1(const KernelHandle& h, double x);

// Scalar kernel value for beta = 2 handles (finite or limit, Palm included).
double kernel_scalar(const KernelHandle& h, double x, double y);

// Quaternion kernel value for beta = 1, 4 handles (Palm included).
Quaternion kernel_quaternion(const KernelHandle& h, double x, double y);

// Scalar part of K(y,x) K(x,y); real for self-dual kernels. Quaternion route.
double l_product(const KernelHandle& h, double x, double y);

// Explicit J-form of the same quantity for beta = 1, 4 (finite or limit,
// non-Palm): the independent route for cross-checking l_product.
double l_product_jform(const KernelHandle& h, double x, double y);

// ---- correlation functions ----

struct CorrelationRequest {
  KernelHandle handle;
  std::vector<double> points;
};

// det (beta = 2) or qdet (beta = 1, 4) of the kernel Gram matrix; quaternion
// Gram matrices are self-dualized by averaging a_ij with conj(a_ji) before
// qdet. Values within -1e-9 of zero clip to 0.
double correlation(const CorrelationRequest& req);

// ---- extended kernel and gap probability ----

// Extended Airy kernel: int_0^inf e^{-(t-s)v/2} Ai(x+v) Ai(y+v) dv for
// s <= t, minus the complementary branch for s > t.
double extended_airy_kernel(double s, double x, double t, double y);

// F2(s) = det(I - K_Ai,2 on (s, inf)) by Nystrom quadrature with the decaying
// change of variables u = s + (1-w)/w on Gauss-Legendre nodes.
double fredholm_gap(double s, int quad_order);

}  // namespace airyedge::kernels
