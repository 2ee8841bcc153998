#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "airyedge/kernels.hpp"
#include "airyedge/rng.hpp"

namespace airyedge::sampler {

enum class Frame { raw, soft_edge };

struct PointConfiguration {
  std::vector<double> points;  // strictly decreasing
  int beta = 2;
  int n = 0;
  Frame frame = Frame::raw;
};

// Eigenvalues of the tridiagonal beta-ensemble model, distributed with
// density prop. to prod |x_i - x_j|^beta exp(-(beta/4) sum x^2). The model
// (diagonal N(0,2), off-diagonal chi_{beta(n-k)}, all scaled by 1/sqrt(2))
// produces the e^{-x^2/2} weight; a final sqrt(2/beta) rescale moves it to
// the target weight.
PointConfiguration sample_beta_ensemble(int beta, int n, uint64_t seed, uint64_t stream = 0);

// x = n^{1/6} (lambda - 2 sqrt(n)) and its inverse; order preserved.
PointConfiguration to_soft_edge(const PointConfiguration& cfg);
PointConfiguration to_raw(const PointConfiguration& cfg);

// Determinantal sampler for beta = 2 finite-n handles (Palm included). The
// kernel is rank-n in the oscillator basis, so the windowed operator reduces
// to an n x n Gram eigenproblem; positions are drawn on a uniform grid by
// sequential conditioning (eigenvector Bernoulli thinning + Householder
// elimination of each chosen site).
class DppSampler {
 public:
  DppSampler(const kernels::KernelHandle& handle, double window_lo, double window_hi,
             int grid);

  PointConfiguration draw(CounterRng& rng) const;
  PointConfiguration draw(uint64_t seed, uint64_t stream) const;

  // moment oracles of the windowed process (quadrature-level, no sampling)
  double expected_count() const;
  double count_variance() const;

 private:
  kernels::KernelHandle handle_;
  double lo_, hi_, h_;
  int grid_;
  Eigen::MatrixXd site_vectors_;   // grid x rank, orthonormal columns
  std::vector<double> bernoulli_;  // eigenvalues in [0, 1]
};

PointConfiguration dpp_sample(const kernels::KernelHandle& handle, double window_lo,
                              double window_hi, int grid, uint64_t seed,
                              uint64_t stream = 0);

struct Histogram {
  std::vector<double> edges;      // bins + 1
  std::vector<double> intensity;  // per-bin mean intensity
  std::vector<double> std_error;  // Monte Carlo standard error of the intensity
  double total_mass = 0.0;        // mean number of points per configuration
};

Histogram empirical_density(std::span<const PointConfiguration> samples, int bins,
                            double lo, double hi);

// CSV: `sample_id, rank, position` with one metadata header line.
void write_samples_csv(std::ostream& os, std::span<const PointConfiguration> samples,
                       uint64_t seed);

}  // namespace airyedge::sampler
