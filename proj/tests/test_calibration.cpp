#include <cmath>
#include <random>

#include "doctest.h"
#include "hv3d/calibration.hpp"
#include "hv3d/distort.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace hv3d;
using namespace hv3d::testing;

namespace {

std::vector<FeatureRow> generated_rows(std::size_t n, std::uint64_t seed, const WeightVector& w, double noise = 0.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> e(0.0, noise > 0 ? noise : 1.0);
  std::vector<FeatureRow> rows;
  for (std::size_t i = 0; i < n; ++i) {
    FeatureRow r{2.0 * u(rng), 4.0 * u(rng), u(rng), u(rng), 0.0};
    r.mos = w.w1 * r.f_luma + w.w4 * r.f_chroma + w.w2 * r.f_cyclopean + w.w3 * r.f_depth + (noise > 0 ? e(rng) : 0.0);
    rows.push_back(r);
  }
  return rows;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("fit_weights recovers a noiseless generator") {
  const WeightVector truth{0.2, 0.3, 0.1, 0.05};
  const auto rows = generated_rows(24, 1, truth);
  const WeightVector w = fit_weights(rows);
  CHECK(std::abs(w.w1 - 0.2) < 1e-9);
  CHECK(std::abs(w.w4 - 0.05) < 1e-9);
  CHECK(std::abs(w.w2 - 0.3) < 1e-9);
  CHECK(std::abs(w.w3 - 0.1) < 1e-9);
  CHECK(w.calibrated);
  CHECK(w.beta == 0.7);
}

TEST_CASE("fit_weights identity design") {
  std::vector<FeatureRow> rows = {
      {1, 0, 0, 0, 0.4}, {0, 1, 0, 0, 0.3}, {0, 0, 1, 0, 0.2}, {0, 0, 0, 1, 0.1}};
  const WeightVector w = fit_weights(rows);
  CHECK(w.w1 == doctest::Approx(0.4));
  CHECK(w.w4 == doctest::Approx(0.3));
  CHECK(w.w2 == doctest::Approx(0.2));
  CHECK(w.w3 == doctest::Approx(0.1));
}

TEST_CASE("fit_weights preconditions") {
  auto rows = generated_rows(10, 2, WeightVector{});
  CHECK(kind_of([&] { fit_weights(std::span(rows).first(3)); }) == ErrorKind::TooFewRows);
  for (auto& r : rows) r.f_depth = r.f_cyclopean;
  CHECK(kind_of([&] { fit_weights(rows); }) == ErrorKind::RankDeficient);
}

TEST_CASE("fit_weights keeps weights non-negative and is optimal among them") {
  // A generator with a negative chroma weight: the unconstrained fit would go negative.
  WeightVector truth{0.3, 0.2, 0.1, 0.0};
  auto rows = generated_rows(40, 3, truth, 0.02);
  for (auto& r : rows) r.mos -= 0.05 * r.f_chroma;
  const WeightFit fit = fit_weights_detailed(rows);
  for (double v : {fit.weights.w1, fit.weights.w2, fit.weights.w3, fit.weights.w4}) CHECK(v >= 0.0);
  CHECK(fit.weights.w4 == 0.0);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  for (int i = 0; i < 200; ++i) {
    const WeightVector candidate{u(rng), u(rng), u(rng), u(rng)};
    CHECK(fit.residual_rms <= weight_residual_rms(rows, candidate) + 1e-12);
  }
  // Perturbing the optimum in any feasible direction does not help.
  for (int k = 0; k < 4; ++k) {
    WeightVector nudged = fit.weights;
    (k == 0 ? nudged.w1 : k == 1 ? nudged.w2 : k == 2 ? nudged.w3 : nudged.w4) += 1e-4;
    CHECK(fit.residual_rms <= weight_residual_rms(rows, nudged));
  }
}

TEST_CASE("pearson") {
  const std::vector<double> x{1, 2, 3};
  CHECK(pearson(x, std::vector<double>{2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(pearson(x, std::vector<double>{1, 4, 9}) - 0.98974) < 1e-5);
  CHECK(pearson(x, std::vector<double>{1, 4, 9}) == doctest::Approx(8.0 / std::sqrt(2.0 * 294.0 / 9.0)).epsilon(1e-14));
  CHECK(pearson(x, std::vector<double>{-1, -2, -3}) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(kind_of([&] { pearson(x, std::vector<double>{1, 2}); }) == ErrorKind::LengthMismatch);
  CHECK(kind_of([&] { pearson(x, std::vector<double>{5, 5, 5}); }) == ErrorKind::ZeroVariance);
}

TEST_CASE("spearman") {
  const std::vector<double> x{1, 2, 3};
  CHECK(spearman(x, std::vector<double>{1, 4, 9}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spearman(x, std::vector<double>{9, 4, 1}) == doctest::Approx(-1.0).epsilon(1e-15));

  const std::vector<double> tx{1, 1, 2}, ty{3, 5, 9};
  const auto ranks = fractional_ranks(tx);
  CHECK(ranks == std::vector<double>{1.5, 1.5, 3.0});
  CHECK(spearman(tx, ty) == brute_force_pearson(brute_force_ranks(tx), brute_force_ranks(ty)));
  CHECK(spearman(tx, ty) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
  CHECK(kind_of([&] { spearman(std::vector<double>{2, 2, 2}, ty); }) == ErrorKind::ZeroVariance);
}

TEST_CASE("correlation properties on random data with ties") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> small(0, 6);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x, y;
    for (int i = 0; i < 12; ++i) {
      x.push_back(small(rng));
      y.push_back(x.back() + 2.0 * n(rng));
    }
    if (brute_force_ranks(x) == std::vector<double>(12, 6.5)) continue;
    const double rho = spearman(x, y);
    CHECK(rho == doctest::Approx(brute_force_pearson(brute_force_ranks(x), brute_force_ranks(y))).epsilon(1e-12));
    CHECK(rho == doctest::Approx(spearman(y, x)).epsilon(1e-15));
    CHECK(pearson(x, y) == doctest::Approx(pearson(y, x)).epsilon(1e-15));

    std::vector<double> affine, cubed;
    for (double v : y) {
      affine.push_back(3.0 * v + 7.0);
      cubed.push_back(v * v * v + v);
    }
    CHECK(pearson(x, affine) == doctest::Approx(pearson(x, y)).epsilon(1e-12));
    CHECK(spearman(x, cubed) == doctest::Approx(rho).epsilon(1e-12));
  }
}

TEST_CASE("logistic_fit") {
  const LogisticFit truth{1.0, 5.0, 0.5, 0.5};
  std::vector<double> m, y;
  for (int i = 0; i < 20; ++i) {
    m.push_back(i / 19.0);
    y.push_back(truth.predict(m.back()));
  }

  SUBCASE("generative recovery") {
    const LogisticFit fit = logistic_fit(m, y);
    CHECK(fit.residual_rms < 1e-8);
    CHECK(fit.converged);
    CHECK(fit.b2 == doctest::Approx(5.0).epsilon(1e-6));
  }
  SUBCASE("the predict form matches the textbook expression") {
    for (double v : m) CHECK(truth.predict(v) == doctest::Approx(1.0 * (0.5 - 1.0 / (1.0 + std::exp(5.0 * (v - 0.5)))) + 0.5).epsilon(1e-14));
  }
  SUBCASE("linear data is fit at least as well as by a line") {
    std::vector<double> lin;
    for (double v : m) lin.push_back(0.3 + 0.4 * v);
    const LogisticFit fit = logistic_fit(m, lin);
    CHECK(fit.residual_rms <= 0.0 + 1e-9);
  }
  SUBCASE("noisy monotone data: fitted curve is monotone over the range") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n(0.0, 0.03);
    std::vector<double> noisy;
    for (double v : y) noisy.push_back(v + n(rng));
    const LogisticFit fit = logistic_fit(m, noisy);
    for (int i = 1; i < 100; ++i) CHECK(fit.predict(i / 99.0) >= fit.predict((i - 1) / 99.0));
    CHECK(fit.residual_rms < 0.05);
  }
  SUBCASE("constant mos") {
    const LogisticFit fit = logistic_fit(m, std::vector<double>(20, 0.4));
    CHECK(fit.b1 == 0.0);
    CHECK(fit.residual_rms < 1e-15);
    CHECK(fit.predict(0.3) == doctest::Approx(0.4).epsilon(1e-15));
  }
  CHECK(kind_of([&] { logistic_fit(std::vector<double>(20, 1.0), y); }) == ErrorKind::ZeroVariance);
  CHECK(kind_of([&] { logistic_fit(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}); }) ==
        ErrorKind::LengthMismatch);
}

TEST_CASE("features reproduce the scoring numerator") {
  const auto ref = synthetic_sequence(320, 192, 2, 7);
  const auto dist = apply_distortion(ref, {DistortionKind::DctQuantize, 2.0, 0});
  ScoreParams p;
  p.cyclopean.search_range = 16;
  p.workers = 1;

  const FeatureRow identity = extract_features(ref, ref, p);
  CHECK(identity.f_luma == 2.0);
  CHECK(identity.f_chroma == 4.0);
  CHECK(identity.f_cyclopean == doctest::Approx(1.0).epsilon(1e-12));
  const auto components = score_components(ref, ref, p);
  double factor = 0.0;
  for (const auto& c : components) factor += c.depth_factor / components.size();
  CHECK(identity.f_depth == doctest::Approx(factor).epsilon(1e-12));

  const FeatureRow f = extract_features(ref, dist, p);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int i = 0; i < 3; ++i) {
    const WeightVector w{u(rng), u(rng), u(rng), u(rng)};
    const MetricReport report = hv3d_score(ref, dist, w, p);
    const double dotted = w.w1 * f.f_luma + w.w4 * f.f_chroma + w.w2 * f.f_cyclopean + w.w3 * f.f_depth;
    CHECK(std::abs(report.pooled.numerator - dotted) < 1e-9);
  }
  CHECK(normalize_mos_1_to_10(10.0) == 1.0);
  CHECK(normalize_mos_1_to_10(1.0) == 0.0);
}
