#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "airyedge/densities.hpp"
#include "airyedge/drift.hpp"
#include "airyedge/kernels.hpp"
#include "airyedge/sampler.hpp"
#include "airyedge/sde.hpp"
#include "airyedge/specfun.hpp"

namespace py = pybind11;
using namespace airyedge;

namespace {

kernels::KernelHandle make_handle(int beta, int n, std::optional<double> palm) {
  kernels::KernelHandle h =
      n > 0 ? kernels::KernelHandle::finite_n(beta, n) : kernels::KernelHandle::limit(beta);
  if (palm) h = h.palm(*palm);
  return h;
}

}  // namespace

PYBIND11_MODULE(_airyedge, m) {
  m.doc() = "soft-edge random-matrix toolkit";

  m.def("airy", [](double x) {
    const auto v = specfun::airy(x);
    return py::make_tuple(v.ai, v.ai_prime);
  }, py::arg("x"), "Ai(x) and Ai'(x)");
  m.def("airy_tail_integral", &specfun::airy_tail_integral, py::arg("x"));
  m.def("oscillator_psi", [](int n, int scale, double x) {
    return specfun::oscillator_psi({n, scale}, x);
  }, py::arg("n"), py::arg("m"), py::arg("x"));
  m.def("epsilon_psi", [](int n, int scale, double x) {
    return specfun::epsilon_psi({n, scale}, x);
  }, py::arg("n"), py::arg("m"), py::arg("x"));

  m.def("k_airy2", &kernels::k_airy2, py::arg("x"), py::arg("y"));
  m.def("k_airy2_finite", &kernels::k_airy2_finite, py::arg("n"), py::arg("x"), py::arg("y"));
  m.def("extended_airy_kernel", &kernels::extended_airy_kernel, py::arg("s"), py::arg("x"),
        py::arg("t"), py::arg("y"));
  m.def("rho1", [](int beta, int n, double x, std::optional<double> palm) {
    return kernels::rho1(make_handle(beta, n, palm), x);
  }, py::arg("beta"), py::arg("n"), py::arg("x"), py::arg("palm") = std::nullopt,
     "one-point correlation; n = 0 selects the limit kernel");
  m.def("correlation", [](int beta, int n, const std::vector<double>& pts,
                          std::optional<double> palm) {
    return kernels::correlation({make_handle(beta, n, palm), pts});
  }, py::arg("beta"), py::arg("n"), py::arg("points"), py::arg("palm") = std::nullopt);
  m.def("fredholm_gap", &kernels::fredholm_gap, py::arg("s"), py::arg("order") = 60,
        "Tracy-Widom F2(s) by Nystrom quadrature");

  m.def("rho_hat", [](int n, double x) {
    return densities::rho_hat(
        n > 0 ? densities::EdgeDensity::finite_n(n) : densities::EdgeDensity::limit(), x);
  }, py::arg("n"), py::arg("x"));
  m.def("semicircle", &densities::semicircle, py::arg("x"));
  m.def("compensator", [](int n, double r) {
    return densities::compensator(
        n > 0 ? densities::EdgeDensity::finite_n(n) : densities::EdgeDensity::limit(), r);
  }, py::arg("n"), py::arg("r"));

  m.def("u_beta", [](int beta, double x, double shell, int n) {
    return n > 0 ? drift::u_beta(beta, x, 0.0, drift::Regime::finite, n)
                 : drift::u_beta(beta, x, shell, drift::Regime::limit);
  }, py::arg("beta"), py::arg("x"), py::arg("shell") = 200.0, py::arg("n") = 0);
  m.def("free_potential", &drift::free_potential, py::arg("beta"), py::arg("x"));
  m.def("finite_log_derivative", [](int beta, int n, double x, const std::vector<double>& y) {
    return drift::finite_log_derivative(beta, n, x, y);
  }, py::arg("beta"), py::arg("n"), py::arg("x"), py::arg("others"));

  m.def("sample_beta_ensemble", [](int beta, int n, uint64_t seed, uint64_t stream,
                                   bool soft_edge) {
    auto cfg = sampler::sample_beta_ensemble(beta, n, seed, stream);
    if (soft_edge) cfg = sampler::to_soft_edge(cfg);
    return cfg.points;
  }, py::arg("beta"), py::arg("n"), py::arg("seed"), py::arg("stream") = 0,
     py::arg("soft_edge") = false);
  m.def("dpp_sample", [](int n, double lo, double hi, int grid, uint64_t seed,
                         uint64_t stream, std::optional<double> palm) {
    return sampler::dpp_sample(make_handle(2, n, palm), lo, hi, grid, seed, stream).points;
  }, py::arg("n"), py::arg("window_lo"), py::arg("window_hi"), py::arg("grid"),
     py::arg("seed"), py::arg("stream") = 0, py::arg("palm") = std::nullopt);

  m.def("simulate_finite", [](int beta, int n, const std::vector<double>& init, double dt,
                              double t_final, double guard, uint64_t seed) {
    sampler::PointConfiguration cfg;
    cfg.points = init;
    cfg.beta = beta;
    cfg.n = n;
    cfg.frame = sampler::Frame::soft_edge;
    sde::SDEConfig sc;
    sc.dt = dt;
    sc.t_final = t_final;
    sc.collision_guard = guard;
    sc.seed = seed;
    const auto path = sde::simulate_finite(beta, n, cfg, sc);
    return py::make_tuple(path.times, path.states, path.accepted, path.rejected);
  }, py::arg("beta"), py::arg("n"), py::arg("init"), py::arg("dt") = 1e-4,
     py::arg("t_final") = 0.1, py::arg("guard") = 0.02, py::arg("seed") = 0,
     "Euler-Maruyama soft-edge paths; init in soft-edge coordinates, descending");
}
