#include "hv3d/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

namespace hv3d {

FeatureRow features_from(const std::vector<FrameComponents>& components, double beta) {
  if (components.empty()) throw Error(ErrorKind::InvalidArgument, "no frames");
  FeatureRow r;
  for (const auto& c : components) {
    r.f_luma += c.vif_y_l + c.vif_y_r;
    r.f_chroma += c.vif_u_l + c.vif_v_l + c.vif_u_r + c.vif_v_r;
    r.f_cyclopean += cyclopean_term(c, beta);
    r.f_depth += depth_term(c, beta);
  }
  const auto n = static_cast<double>(components.size());
  r.f_luma /= n;
  r.f_chroma /= n;
  r.f_cyclopean /= n;
  r.f_depth /= n;
  return r;
}

FeatureRow extract_features(const StereoSequence& ref, const StereoSequence& dist, const ScoreParams& params,
                            double beta) {
  ScoreParams p = params;
  p.baselines = false;
  return features_from(score_components(ref, dist, p), beta);
}

double normalize_mos_1_to_10(double mos) { return (mos - 1.0) / 9.0; }

namespace {

Eigen::MatrixXd design_matrix(std::span<const FeatureRow> rows) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    a(r, 0) = rows[i].f_luma;
    a(r, 1) = rows[i].f_chroma;
    a(r, 2) = rows[i].f_cyclopean;
    a(r, 3) = rows[i].f_depth;
  }
  return a;
}

// Lawson-Hanson NNLS.
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index n = a.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double tol = 1e-12 * std::max(1.0, a.lpNorm<Eigen::Infinity>()) * std::max(1.0, b.lpNorm<Eigen::Infinity>()) *
                     static_cast<double>(a.rows());

  auto solve_passive = [&] {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
    const Eigen::VectorXd sol = sub.colPivHouseholderQr().solve(b);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) z(idx[k]) = sol(static_cast<Eigen::Index>(k));
    return z;
  };

  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    const Eigen::VectorXd grad = a.transpose() * (b - a * x);
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[j] && grad(j) > tol && (best < 0 || grad(j) > grad(best))) best = j;
    }
    if (best < 0) break;
    passive[best] = true;

    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      const Eigen::VectorXd z = solve_passive();
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && z(j) <= 0.0) feasible = false;
      if (feasible) {
        x = z;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && z(j) <= 0.0) alpha = std::min(alpha, x(j) / (x(j) - z(j)));
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && x(j) <= 1e-15) {
          passive[j] = false;
          x(j) = 0.0;
        }
      }
    }
  }
  return x;
}

}  // namespace

double weight_residual_rms(std::span<const FeatureRow> rows, const WeightVector& w) {
  if (rows.empty()) throw Error(ErrorKind::TooFewRows, "no rows");
  double ss = 0.0;
  for (const auto& r : rows) {
    const double e = w.w1 * r.f_luma + w.w4 * r.f_chroma + w.w2 * r.f_cyclopean + w.w3 * r.f_depth - r.mos;
    ss += e * e;
  }
  return std::sqrt(ss / static_cast<double>(rows.size()));
}

WeightFit fit_weights_detailed(std::span<const FeatureRow> rows, double beta) {
  if (rows.size() < 4) throw Error(ErrorKind::TooFewRows, "need at least 4 rows, got " + std::to_string(rows.size()));
  const Eigen::MatrixXd a = design_matrix(rows);
  Eigen::VectorXd b(a.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) b(static_cast<Eigen::Index>(i)) = rows[i].mos;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < a.cols()) throw Error(ErrorKind::RankDeficient, "feature columns are linearly dependent");

  const Eigen::VectorXd x = nnls(a, b);
  WeightFit fit;
  fit.weights.w1 = x(0);
  fit.weights.w4 = x(1);
  fit.weights.w2 = x(2);
  fit.weights.w3 = x(3);
  fit.weights.beta = beta;
  fit.weights.calibrated = true;
  fit.residual_rms = weight_residual_rms(rows, fit.weights);
  return fit;
}

WeightVector fit_weights(std::span<const FeatureRow> rows, double beta) { return fit_weights_detailed(rows, beta).weights; }

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::LengthMismatch, "pearson: inputs differ in length");
  if (x.size() < 3) throw Error(ErrorKind::LengthMismatch, "pearson: need at least 3 samples");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::ZeroVariance, "pearson: constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::LengthMismatch, "spearman: inputs differ in length");
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  return pearson(rx, ry);
}

double LogisticFit::predict(double m) const {
  // 0.5 - 1/(1+e^z) == 0.5 tanh(z/2), which stays accurate for small z.
  return b1 * 0.5 * std::tanh(0.5 * b2 * (m - b3)) + b4;
}

namespace {

using Vec4 = Eigen::Vector4d;

double sse(const Vec4& b, std::span<const double> m, std::span<const double> y) {
  LogisticFit f{b(0), b(1), b(2), b(3)};
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double e = y[i] - f.predict(m[i]);
    s += e * e;
  }
  return s;
}

LogisticFit levenberg_marquardt(Vec4 b, std::span<const double> m, std::span<const double> y) {
  constexpr int kMaxIterations = 500;
  constexpr double kStepTolerance = 1e-10;
  const auto n = static_cast<Eigen::Index>(m.size());
  double cost = sse(b, m, y);
  double lambda = 1e-3;
  LogisticFit out;

  int it = 0;
  for (; it < kMaxIterations; ++it) {
    Eigen::MatrixXd jac(n, 4);
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = m[static_cast<std::size_t>(i)] - b(2);
      const double t = std::tanh(0.5 * b(1) * d);
      const double sech2 = 1.0 - t * t;
      jac(i, 0) = 0.5 * t;
      jac(i, 1) = 0.25 * b(0) * sech2 * d;
      jac(i, 2) = -0.25 * b(0) * sech2 * b(1);
      jac(i, 3) = 1.0;
      r(i) = y[static_cast<std::size_t>(i)] - (b(0) * 0.5 * t + b(3));
    }
    const Eigen::Matrix4d jtj = jac.transpose() * jac;
    const Vec4 jtr = jac.transpose() * r;

    bool accepted = false;
    Vec4 step = Vec4::Zero();
    while (lambda < 1e16) {
      Eigen::Matrix4d a = jtj;
      for (int k = 0; k < 4; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-300);
      step = a.ldlt().solve(jtr);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const double trial = sse(b + step, m, y);
      if (trial <= cost) {
        b += step;
        cost = trial;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted || step.norm() < kStepTolerance || cost == 0.0) {
      out.converged = true;
      ++it;
      break;
    }
  }
  out.b1 = b(0);
  out.b2 = b(1);
  out.b3 = b(2);
  out.b4 = b(3);
  out.iterations = it;
  out.residual_rms = std::sqrt(cost / static_cast<double>(m.size()));
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 == 1 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

}  // namespace

LogisticFit logistic_fit(std::span<const double> metric, std::span<const double> mos) {
  if (metric.size() != mos.size()) throw Error(ErrorKind::LengthMismatch, "logistic_fit: inputs differ in length");
  if (metric.size() < 5) throw Error(ErrorKind::LengthMismatch, "logistic_fit: need at least 5 points");
  for (double v : metric)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "logistic_fit: non-finite metric value");

  const auto [mmin, mmax] = std::minmax_element(metric.begin(), metric.end());
  const double range = *mmax - *mmin;
  if (range == 0.0) throw Error(ErrorKind::ZeroVariance, "logistic_fit: metric is constant");
  const auto [ymin, ymax] = std::minmax_element(mos.begin(), mos.end());
  const double n = static_cast<double>(mos.size());
  const double ymean = std::accumulate(mos.begin(), mos.end(), 0.0) / n;
  const double mmed = median({metric.begin(), metric.end()});

  if (*ymax == *ymin) {
    LogisticFit flat;
    flat.b1 = 0.0;
    flat.b2 = 4.0 / range;
    flat.b3 = mmed;
    flat.b4 = ymean;
    flat.converged = true;
    return flat;
  }

  LogisticFit best = levenberg_marquardt(Vec4(*ymax - *ymin, 4.0 / range, mmed, ymean), metric, mos);

  // Near-linear start: a shallow curve centred on the metric mean that reproduces the OLS line.
  const double mmean = std::accumulate(metric.begin(), metric.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < metric.size(); ++i) {
    sxy += (metric[i] - mmean) * (mos[i] - ymean);
    sxx += (metric[i] - mmean) * (metric[i] - mmean);
  }
  const double slope = sxy / sxx;
  if (slope != 0.0) {
    const double b2 = 1e-4 / range;
    const LogisticFit linear = levenberg_marquardt(Vec4(4.0 * slope / b2, b2, mmean, ymean), metric, mos);
    if (linear.residual_rms < best.residual_rms) best = linear;
  }
  return best;
}

}  // namespace hv3d
