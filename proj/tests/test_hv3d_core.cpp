#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "hv3d/distort.hpp"
#include "hv3d/hv3d_core.hpp"
#include "support/synthetic.hpp"

using namespace hv3d;
using namespace hv3d::testing;

namespace {

StereoSequence noisy_everywhere(const StereoSequence& seq, double sigma, std::uint64_t seed) {
  StereoSequence out = apply_distortion(seq, {DistortionKind::GaussianNoise, sigma, seed});
  return apply_distortion(out, {DistortionKind::DepthNoise, sigma, seed + 1});
}

ScoreParams fast_params() {
  ScoreParams p;
  p.cyclopean.search_range = 16;
  p.workers = 2;
  return p;
}

}  // namespace

TEST_CASE("weight vector validation") {
  CHECK_NOTHROW(WeightVector{}.validate());
  CHECK_THROWS_AS((WeightVector{0, 0, 0, 0}.validate()), Error);
  CHECK_THROWS_AS((WeightVector{-0.1, 1, 1, 1}.validate()), Error);
  WeightVector bad_beta;
  bad_beta.beta = 1.5;
  CHECK_THROWS_AS(bad_beta.validate(), Error);
  bad_beta.beta = 0.0;
  CHECK_THROWS_AS(bad_beta.validate(), Error);
}

TEST_CASE("view_quality") {
  WeightVector w{1.0, 0.0, 0.0, 0.5};
  CHECK(view_quality(0.8, 0.6, 0.4, w) == doctest::Approx(1.3).epsilon(1e-15));
  CHECK(view_quality(0.8, 0.6, 0.4, WeightVector{0, 1, 1, 0}) == 0.0);

  const auto seq = synthetic_sequence(128, 96, 1, 1);
  CHECK(std::abs(view_quality(seq.left[0], seq.left[0], w) - 2.0) < 1e-6);
  const auto noisy = noisy_everywhere(seq, 6.0, 2);
  CHECK(view_quality(seq.left[0], noisy.left[0], WeightVector{0, 1, 1, 0}) == 0.0);
  CHECK(view_quality(seq.left[0], noisy.left[0], w) < 2.0);
}

TEST_CASE("hv3d_max") {
  CHECK(hv3d_max(WeightVector{1, 1, 1, 1}, 1.0) == 8.0);
  CHECK(hv3d_max(WeightVector{1, 1, 1, 1}, 0.625) == 7.625);
  CHECK_THROWS_AS(hv3d_max(WeightVector{0, 0, 0, 0}, 1.0), Error);
}

TEST_CASE("combine_frame hand evaluation") {
  // Q_L = Q_R = 2 (w1 = 1, w4 = 0.5, unit VIFs), Q_RL = 0.9, Q_D = 0.8, unit depth factor:
  // (2 + 2 + 0.9 + 0.8) / (2 + 2 + 1 + 1) = 0.95
  FrameComponents c;
  c.vif_y_l = c.vif_u_l = c.vif_v_l = 1.0;
  c.vif_y_r = c.vif_u_r = c.vif_v_r = 1.0;
  c.depth_factor = 1.0;
  c.depth_fidelity = std::pow(0.8, 1.0 / 0.7);  // fidelity^beta = 0.8
  c.cyclopean_ssim = 0.9 / 0.8;                 // so that Q_RL = 0.9
  const WeightVector w{1.0, 1.0, 1.0, 0.5};
  const FrameScores s = combine_frame(c, w);
  CHECK(s.q_left == 2.0);
  CHECK(s.q_right == 2.0);
  CHECK(s.q_rl == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(s.q_d == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(s.hv3d_max == 6.0);
  CHECK(s.hv3d == doctest::Approx(0.95).epsilon(1e-12));
}

TEST_CASE("hv3d_score identity") {
  const auto seq = synthetic_sequence(320, 192, 2, 3);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    WeightVector w{u(rng), u(rng), u(rng), u(rng), 0.1 + 0.9 * u(rng)};
    const auto report = hv3d_score(seq, seq, w, fast_params());
    CHECK(std::abs(report.pooled.hv3d - 1.0) < 1e-6);
    for (const auto& f : report.frames) {
      CHECK(std::abs(f.hv3d - 1.0) < 1e-6);
      CHECK(std::isinf(f.baselines.psnr_l));
      CHECK(f.baselines.ssim_r == 1.0);
      CHECK(f.baselines.vifp_l == 1.0);
    }
  }
}

TEST_CASE("hv3d_score reduces to mean luma VIF when only w1 is set") {
  const auto seq = synthetic_sequence(320, 192, 1, 5);
  const auto dist = noisy_everywhere(seq, 5.0, 6);
  const auto report = hv3d_score(seq, dist, WeightVector{1.0, 0.0, 0.0, 0.0}, fast_params());
  const double expected = 0.5 * (std::clamp(vif(seq.left[0].y, dist.left[0].y), 0.0, 1.0) +
                                 std::clamp(vif(seq.right[0].y, dist.right[0].y), 0.0, 1.0));
  CHECK(report.pooled.hv3d == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("hv3d_score components and monotonicity") {
  const auto seq = synthetic_sequence(320, 192, 2, 7);
  const WeightVector w;
  double prev = 1.0 + 1e-9;
  for (double sigma : {2.0, 6.0, 18.0}) {
    const auto report = hv3d_score(seq, noisy_everywhere(seq, sigma, 8), w, fast_params());
    for (const auto& f : report.frames) {
      const double recomputed = f.q_left + f.q_right + w.w2 * f.q_rl + w.w3 * f.q_d;
      CHECK(std::abs(f.hv3d * f.hv3d_max - recomputed) < 1e-9);
      CHECK(f.hv3d >= 0.0);
      CHECK(f.hv3d <= 1.0);
    }
    CHECK(report.pooled.hv3d < prev);
    prev = report.pooled.hv3d;
  }
}

TEST_CASE("hv3d_score rejects misaligned inputs") {
  const auto a = synthetic_sequence(128, 96, 2, 9);
  const auto b = synthetic_sequence(128, 64, 2, 9);
  auto c = a;
  c.left.pop_back();
  CHECK_THROWS_AS(hv3d_score(a, b, WeightVector{}, fast_params()), Error);
  CHECK_THROWS_AS(hv3d_score(a, c, WeightVector{}, fast_params()), Error);
  CHECK_THROWS_AS(hv3d_score(a, a, WeightVector{0, 0, 0, 0}, fast_params()), Error);
}

TEST_CASE("report is independent of worker count") {
  const auto seq = synthetic_sequence(192, 192, 4, 10);
  const auto dist = noisy_everywhere(seq, 4.0, 11);
  std::string first;
  for (std::size_t workers : {1u, 3u, 8u}) {
    ScoreParams p = fast_params();
    p.workers = workers;
    std::ostringstream csv;
    write_report_csv(csv, hv3d_score(seq, dist, WeightVector{}, p));
    if (first.empty()) first = csv.str();
    CHECK(csv.str() == first);
  }
}

TEST_CASE("csv formatting") {
  CHECK(format_number(1.0) == "1.000000");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-0.0000001) == "0.000000");

  const auto seq = synthetic_sequence(192, 192, 2, 12);
  std::ostringstream csv;
  write_report_csv(csv, hv3d_score(seq, seq, WeightVector{}, fast_params()));
  std::istringstream lines(csv.str());
  std::string header, row0, row1, pooled, extra;
  std::getline(lines, header);
  std::getline(lines, row0);
  std::getline(lines, row1);
  std::getline(lines, pooled);
  CHECK(header == "frame,q_left,q_right,q_rl,q_d,hv3d_max,hv3d,psnr_l,psnr_r,ssim_l,ssim_r,msssim_l,msssim_r,vifp_l,vifp_r");
  CHECK(row0.rfind("0,", 0) == 0);
  CHECK(pooled.rfind("pooled,", 0) == 0);
  CHECK(pooled.find(",1.000000,inf,inf,1.000000,1.000000,1.000000,1.000000,1.000000,1.000000") != std::string::npos);
  CHECK_FALSE(std::getline(lines, extra));
}
