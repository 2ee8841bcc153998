#include "airyedge/sampler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>

#include "airyedge/errors.hpp"
#include "airyedge/specfun.hpp"

namespace airyedge::sampler {

namespace {

void check_frame(const PointConfiguration& cfg, Frame want, const char* op) {
  if (cfg.frame != want) throw frame_error(std::string(op) + ": configuration in wrong frame");
}

void append_shortest(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void append_int(std::string& out, long long v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

// column of n^{-1/6} psi^n_m(x) values, m = 0..n-1, one recurrence pass
void basis_column(int n, double x, double scale, double* out) {
  const double n16 = std::pow(n, 1.0 / 6.0);
  const double xi = 2.0 * std::sqrt(static_cast<double>(n)) + x / n16;
  double qm1 = 0.0, q = 1.0;
  const double pref = std::exp(-0.25 * xi * xi) * std::pow(2.0 * std::numbers::pi, -0.25) *
                      std::pow(n, 1.0 / 12.0 - 1.0 / 6.0) * scale;
  for (int m = 0; m < n; ++m) {
    out[m] = q * pref;
    const double next = (xi * q - std::sqrt(static_cast<double>(m)) * qm1) / std::sqrt(m + 1.0);
    qm1 = q;
    q = next;
  }
}

}  // namespace

PointConfiguration sample_beta_ensemble(int beta, int n, uint64_t seed, uint64_t stream) {
  if (beta != 1 && beta != 2 && beta != 4)
    throw precondition_error("sample_beta_ensemble: beta must be 1, 2, or 4");
  if (n < 1) throw precondition_error("sample_beta_ensemble: n must be positive");
  CounterRng rng(seed, stream);
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(1, n - 1));
  for (int i = 0; i < n; ++i) diag[i] = rng.normal();  // N(0,2)/sqrt(2)
  for (int k = 1; k < n; ++k)
    sub[k - 1] = rng.chi(static_cast<double>(beta) * (n - k)) / std::numbers::sqrt2;

  PointConfiguration cfg;
  cfg.beta = beta;
  cfg.n = n;
  cfg.frame = Frame::raw;
  cfg.points.resize(n);
  const double scale = std::sqrt(2.0 / beta);
  if (n == 1) {
    cfg.points[0] = diag[0] * scale;
    return cfg;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::EigenvaluesOnly);
  for (int i = 0; i < n; ++i) cfg.points[i] = es.eigenvalues()[n - 1 - i] * scale;
  return cfg;
}

PointConfiguration to_soft_edge(const PointConfiguration& cfg) {
  check_frame(cfg, Frame::raw, "to_soft_edge");
  PointConfiguration out = cfg;
  out.frame = Frame::soft_edge;
  const double n16 = std::pow(cfg.n, 1.0 / 6.0);
  const double center = 2.0 * std::sqrt(static_cast<double>(cfg.n));
  for (double& p : out.points) p = n16 * (p - center);
  return out;
}

PointConfiguration to_raw(const PointConfiguration& cfg) {
  check_frame(cfg, Frame::soft_edge, "to_raw");
  PointConfiguration out = cfg;
  out.frame = Frame::raw;
  const double n16 = std::pow(cfg.n, 1.0 / 6.0);
  const double center = 2.0 * std::sqrt(static_cast<double>(cfg.n));
  for (double& p : out.points) p = p / n16 + center;
  return out;
}

DppSampler::DppSampler(const kernels::KernelHandle& handle, double window_lo,
                       double window_hi, int grid)
    : handle_(handle), lo_(window_lo), hi_(window_hi), grid_(grid) {
  if (handle.beta != 2 || !handle.finite)
    throw precondition_error("DppSampler: beta = 2 finite-n handles only");
  if (!(window_hi > window_lo)) throw precondition_error("DppSampler: empty window");
  if (grid < 8) throw precondition_error("DppSampler: grid too small");
  const int n = handle.n;
  h_ = (hi_ - lo_) / grid;

  // basis f_m = n^{-1/6} psi^n_m so that K = sum_m f_m f_m; columns carry
  // sqrt(h) so the Gram is the Riemann approximation of the window integral
  Eigen::MatrixXd f(grid, n);
  const double sqh = std::sqrt(h_);
  std::vector<double> col(n);
  for (int i = 0; i < grid; ++i) {
    basis_column(n, lo_ + (i + 0.5) * h_, sqh, col.data());
    for (int m = 0; m < n; ++m) f(i, m) = col[m];
  }

  // coefficient matrix: identity, or the Palm projection I - g g^T / |g|^2
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(n, n);
  if (handle.palm_anchor) {
    Eigen::VectorXd g(n);
    basis_column(n, *handle.palm_anchor, 1.0, g.data());
    const double norm2 = g.squaredNorm();
    if (norm2 <= 1e-12) throw singularity_error("DppSampler: degenerate Palm anchor");
    c -= g * g.transpose() / norm2;
  }

  const Eigen::MatrixXd gram = f.transpose() * f;
  const Eigen::MatrixXd b = c * gram * c;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  if (es.eigenvalues().maxCoeff() > 1.0 + 1e-6)
    throw discretization_error("DppSampler: grid too coarse, eigenvalue above 1");

  std::vector<int> keep;
  for (int k = 0; k < n; ++k)
    if (es.eigenvalues()[k] > 1e-12) keep.push_back(k);
  site_vectors_.resize(grid, static_cast<int>(keep.size()));
  bernoulli_.resize(keep.size());
  for (size_t idx = 0; idx < keep.size(); ++idx) {
    const int k = keep[idx];
    const double lambda = std::clamp(es.eigenvalues()[k], 0.0, 1.0);
    bernoulli_[idx] = lambda;
    site_vectors_.col(static_cast<int>(idx)) =
        f * (c * es.eigenvectors().col(k)) / std::sqrt(lambda);
  }
}

double DppSampler::expected_count() const {
  double s = 0.0;
  for (double l : bernoulli_) s += l;
  return s;
}

double DppSampler::count_variance() const {
  double s = 0.0;
  for (double l : bernoulli_) s += l * (1.0 - l);
  return s;
}

PointConfiguration DppSampler::draw(CounterRng& rng) const {
  const int rank = static_cast<int>(bernoulli_.size());
  std::vector<int> selected;
  for (int k = 0; k < rank; ++k)
    if (rng.uniform() < bernoulli_[k]) selected.push_back(k);
  const int m = static_cast<int>(selected.size());

  Eigen::MatrixXd v(grid_, std::max(1, m));
  for (int j = 0; j < m; ++j) v.col(j) = site_vectors_.col(selected[j]);

  std::vector<double> points;
  points.reserve(m);
  for (int t = m; t >= 1; --t) {
    double total = 0.0;
    for (int i = 0; i < grid_; ++i) total += v.row(i).head(t).squaredNorm();
    const double want = rng.uniform() * total;
    int chosen = grid_ - 1;
    double acc = 0.0;
    for (int i = 0; i < grid_; ++i) {
      acc += v.row(i).head(t).squaredNorm();
      if (acc >= want) {
        chosen = i;
        break;
      }
    }
    points.push_back(lo_ + (chosen + 0.5) * h_);
    if (t == 1) break;
    // Householder on column space: rotate the chosen site's row onto e_1,
    // then drop the first column; the rest vanish at the chosen site
    Eigen::VectorXd r = v.row(chosen).head(t);
    const double rn = r.norm();
    if (rn <= 0.0) continue;
    Eigen::VectorXd u = r / rn;
    u[0] -= 1.0;
    const double un = u.squaredNorm();
    if (un > 1e-24) {
      const Eigen::VectorXd tmp = (v.leftCols(t) * u) * (2.0 / un);
      v.leftCols(t).noalias() -= tmp * u.transpose();
    }
    for (int j = 1; j < t; ++j) v.col(j - 1) = v.col(j);
  }

  PointConfiguration out;
  out.beta = 2;
  out.n = handle_.n;
  out.frame = Frame::soft_edge;
  out.points = std::move(points);
  std::sort(out.points.begin(), out.points.end(), std::greater<>());
  return out;
}

PointConfiguration DppSampler::draw(uint64_t seed, uint64_t stream) const {
  CounterRng rng(seed, stream);
  return draw(rng);
}

PointConfiguration dpp_sample(const kernels::KernelHandle& handle, double window_lo,
                              double window_hi, int grid, uint64_t seed, uint64_t stream) {
  DppSampler s(handle, window_lo, window_hi, grid);
  return s.draw(seed, stream);
}

Histogram empirical_density(std::span<const PointConfiguration> samples, int bins,
                            double lo, double hi) {
  if (samples.empty()) throw input_error("empirical_density: no samples");
  if (bins < 1 || !(hi > lo)) throw precondition_error("empirical_density: bad binning");
  Histogram hist;
  hist.edges.resize(bins + 1);
  const double w = (hi - lo) / bins;
  for (int b = 0; b <= bins; ++b) hist.edges[b] = lo + b * w;
  std::vector<double> sum(bins, 0.0), sum2(bins, 0.0);
  double mass = 0.0;
  std::vector<int> count(bins);
  for (const auto& cfg : samples) {
    std::fill(count.begin(), count.end(), 0);
    for (double p : cfg.points) {
      if (p < lo || p >= hi) continue;
      ++count[static_cast<int>((p - lo) / w)];
    }
    for (int b = 0; b < bins; ++b) {
      sum[b] += count[b];
      sum2[b] += static_cast<double>(count[b]) * count[b];
    }
    mass += static_cast<double>(cfg.points.size());
  }
  const double s = static_cast<double>(samples.size());
  hist.intensity.resize(bins);
  hist.std_error.resize(bins);
  for (int b = 0; b < bins; ++b) {
    const double mean = sum[b] / s;
    const double var = std::max(0.0, sum2[b] / s - mean * mean);
    hist.intensity[b] = mean / w;
    hist.std_error[b] = std::sqrt(var / s) / w;
  }
  hist.total_mass = mass / s;
  return hist;
}

void write_samples_csv(std::ostream& os, std::span<const PointConfiguration> samples,
                       uint64_t seed) {
  if (samples.empty()) throw input_error("write_samples_csv: no samples");
  std::string line = "# beta=";
  append_int(line, samples[0].beta);
  line += " n=";
  append_int(line, samples[0].n);
  line += samples[0].frame == Frame::soft_edge ? " frame=soft_edge" : " frame=raw";
  line += " seed=";
  append_int(line, static_cast<long long>(seed));
  os << line << "\nsample_id,rank,position\n";
  for (size_t sidx = 0; sidx < samples.size(); ++sidx) {
    for (size_t r = 0; r < samples[sidx].points.size(); ++r) {
      line.clear();
      append_int(line, static_cast<long long>(sidx));
      line += ',';
      append_int(line, static_cast<long long>(r + 1));
      line += ',';
      append_shortest(line, samples[sidx].points[r]);
      os << line << '\n';
    }
  }
}

}  // namespace airyedge::sampler
