#include "airyedge/sampler.hpp"

#include <cmath>
#include <sstream>

#include "airyedge/errors.hpp"
#include "airyedge/kernels.hpp"
#include "airyedge/quadrature.hpp"
#include "doctest.h"

using namespace airyedge;
using namespace airyedge::sampler;

TEST_CASE("single-particle ensemble is the right gaussian") {
  for (int beta : {1, 2, 4}) {
    double sum = 0.0, sum2 = 0.0;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
      const auto cfg = sample_beta_ensemble(beta, 1, 2024, t);
      sum += cfg.points[0];
      sum2 += cfg.points[0] * cfg.points[0];
    }
    const double mean = sum / trials;
    const double var = sum2 / trials - mean * mean;
    const double target_var = 2.0 / beta;
    CHECK(std::abs(mean) < 3.0 * std::sqrt(target_var / trials));
    CHECK(std::abs(var - target_var) < 3.0 * target_var * std::sqrt(2.0 / (trials - 1.0)));
  }
}

TEST_CASE("ensemble samples are strictly ordered and deterministic") {
  const auto a = sample_beta_ensemble(2, 50, 7, 3);
  const auto b = sample_beta_ensemble(2, 50, 7, 3);
  CHECK(a.points == b.points);
  for (size_t i = 0; i + 1 < a.points.size(); ++i) CHECK(a.points[i] > a.points[i + 1]);
  const auto c = sample_beta_ensemble(2, 50, 7, 4);
  CHECK(a.points != c.points);
}

TEST_CASE("bulk second moment matches the semicircle") {
  const int n = 200;
  double acc = 0.0;
  int cnt = 0;
  for (uint64_t s = 0; s < 20; ++s) {
    const auto cfg = sample_beta_ensemble(2, n, 11, s);
    for (double p : cfg.points) {
      const double z = p / std::sqrt(static_cast<double>(n));
      acc += z * z;
      ++cnt;
    }
  }
  CHECK(acc / cnt == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("soft edge transform and round trip") {
  const auto raw = sample_beta_ensemble(2, 30, 5);
  const auto soft = to_soft_edge(raw);
  CHECK(soft.frame == Frame::soft_edge);
  const double n16 = std::pow(30.0, 1.0 / 6.0);
  CHECK(soft.points[0] ==
        doctest::Approx(n16 * (raw.points[0] - 2.0 * std::sqrt(30.0))).epsilon(1e-13));
  const auto back = to_raw(soft);
  for (size_t i = 0; i < raw.points.size(); ++i)
    CHECK(back.points[i] == doctest::Approx(raw.points[i]).epsilon(1e-12));
  CHECK_THROWS_AS(to_soft_edge(soft), frame_error);
  CHECK_THROWS_AS(to_raw(raw), frame_error);
}

TEST_CASE("dpp sampler matches its count moments") {
  const auto handle = kernels::KernelHandle::finite_n(2, 20);
  DppSampler sampler(handle, -8.0, 3.0, 11 * 400);
  quad::Options opt{1e-9, 1e-9, 40, 0.5};
  const double expect =
      quad::integrate([&](double x) { return kernels::rho1(handle, x); }, -8.0, 3.0, opt);
  CHECK(sampler.expected_count() == doctest::Approx(expect).epsilon(1e-4));

  const int trials = 3000;
  double sum = 0.0, sum2 = 0.0;
  CounterRng rng(99, 0);
  for (int t = 0; t < trials; ++t) {
    const auto cfg = sampler.draw(rng);
    sum += static_cast<double>(cfg.points.size());
    sum2 += static_cast<double>(cfg.points.size()) * cfg.points.size();
  }
  const double mean = sum / trials;
  const double var = sum2 / trials - mean * mean;
  const double se_mean = std::sqrt(sampler.count_variance() / trials);
  CHECK(std::abs(mean - sampler.expected_count()) < 3.0 * se_mean);
  const double se_var = sampler.count_variance() * std::sqrt(2.0 / (trials - 1.0)) + 0.01;
  CHECK(std::abs(var - sampler.count_variance()) < 4.0 * se_var);
}

TEST_CASE("palm dpp avoids the anchor neighborhood") {
  const auto palmed = kernels::KernelHandle::finite_n(2, 20).palm(0.0);
  DppSampler sampler(palmed, -8.0, 3.0, 11 * 400);
  const auto plain = kernels::KernelHandle::finite_n(2, 20);
  DppSampler base(plain, -8.0, 3.0, 11 * 400);
  CHECK(sampler.expected_count() < base.expected_count());

  CounterRng rng(5, 1);
  int near = 0, total = 0;
  for (int t = 0; t < 2000; ++t) {
    const auto cfg = sampler.draw(rng);
    for (double p : cfg.points) {
      ++total;
      if (std::abs(p) < 0.25) ++near;
    }
  }
  quad::Options opt{1e-9, 1e-9, 40, 0.25};
  const double near_band_mass =
      quad::integrate([&](double x) { return kernels::rho1(palmed, x); }, -0.25, 0.25, opt);
  const double expected_near = near_band_mass * 2000;
  CHECK(std::abs(near - expected_near) < 3.0 * std::sqrt(expected_near + 1.0) + 3.0);
  CHECK(near < 0.02 * total);
}

TEST_CASE("dpp guards") {
  CHECK_THROWS_AS(DppSampler(kernels::KernelHandle::limit(2), -1.0, 1.0, 100),
                  precondition_error);
  CHECK_THROWS_AS(DppSampler(kernels::KernelHandle::finite_n(1, 6), -1.0, 1.0, 100),
                  precondition_error);
  CHECK_THROWS_AS(DppSampler(kernels::KernelHandle::finite_n(2, 20), -34.0, 6.0, 32),
                  discretization_error);
}

TEST_CASE("empirical density matches the kernel diagonal") {
  const auto handle = kernels::KernelHandle::finite_n(2, 50);
  std::vector<PointConfiguration> samples;
  const int trials = 2000;
  samples.reserve(trials);
  for (int t = 0; t < trials; ++t)
    samples.push_back(to_soft_edge(sample_beta_ensemble(2, 50, 31, t)));
  const auto hist = empirical_density(samples, 26, -10.0, 3.0);
  CHECK(hist.total_mass == doctest::Approx(50.0).epsilon(1e-12));
  int violations = 0;
  for (size_t b = 0; b < hist.intensity.size(); ++b) {
    const double mid = 0.5 * (hist.edges[b] + hist.edges[b + 1]);
    const double expect = kernels::rho1(handle, mid);
    const double slack = 3.0 * hist.std_error[b] + 0.05 * (std::abs(expect) + 0.1);
    if (std::abs(hist.intensity[b] - expect) > slack) ++violations;
  }
  CHECK(violations <= 2);
}

TEST_CASE("beta = 1 empirical density matches the quaternion diagonal") {
  const int n = 6;
  std::vector<PointConfiguration> samples;
  const int trials = 4000;
  samples.reserve(trials);
  for (int t = 0; t < trials; ++t)
    samples.push_back(to_soft_edge(sample_beta_ensemble(1, n, 131, t)));
  const auto hist = empirical_density(samples, 14, -8.0, 3.0);
  int violations = 0;
  for (size_t b = 0; b < hist.intensity.size(); ++b) {
    const double mid = 0.5 * (hist.edges[b] + hist.edges[b + 1]);
    const double expect = kernels::k_quaternion_finite(1, n, mid, mid).scalar_part().real();
    const double slack = 3.0 * hist.std_error[b] + 0.06 * (std::abs(expect) + 0.1);
    if (std::abs(hist.intensity[b] - expect) > slack) ++violations;
  }
  CHECK(violations <= 2);
}

TEST_CASE("csv output shape") {
  std::vector<PointConfiguration> samples{to_soft_edge(sample_beta_ensemble(2, 3, 1))};
  std::ostringstream os;
  write_samples_csv(os, samples, 1);
  const std::string text = os.str();
  CHECK(text.find("# beta=2 n=3 frame=soft_edge seed=1") == 0);
  CHECK(text.find("sample_id,rank,position") != std::string::npos);
  int newlines = 0;
  for (char c : text) newlines += (c == '\n');
  CHECK(newlines == 2 + 3);
}

TEST_CASE("top particle concentrates near the edge") {
  for (int n : {50, 200}) {
    std::vector<double> tops;
    for (uint64_t s = 0; s < 200; ++s)
      tops.push_back(to_soft_edge(sample_beta_ensemble(2, n, 2718, s)).points[0]);
    std::sort(tops.begin(), tops.end());
    const double median = tops[tops.size() / 2];
    CHECK(median > -3.0);
    CHECK(median < 2.0);
  }
}
