#pragma once

#include <span>
#include <vector>

#include "hv3d/hv3d_core.hpp"

namespace hv3d {

/// Regrouped per-sequence terms of the HV3D numerator, so that
/// numerator = w1 f_luma + w4 f_chroma + w2 f_cyclopean + w3 f_depth.
struct FeatureRow {
  double f_luma = 0.0;       // VIF(Y_L) + VIF(Y_R)
  double f_chroma = 0.0;     // VIF(U_L) + VIF(V_L) + VIF(U_R) + VIF(V_R)
  double f_cyclopean = 0.0;  // Q_RL
  double f_depth = 0.0;      // Q_D
  double mos = 0.0;          // normalized to [0, 1]
};

/// Pools per-frame components by arithmetic mean. mos is left at 0.
FeatureRow features_from(const std::vector<FrameComponents>& components, double beta);
FeatureRow extract_features(const StereoSequence& ref, const StereoSequence& dist, const ScoreParams& params = {},
                            double beta = kDefaultBeta);

/// Maps a 1..10 opinion score onto [0, 1].
double normalize_mos_1_to_10(double mos);

struct WeightFit {
  WeightVector weights;
  double residual_rms = 0.0;
};

/// Non-negative least squares of mos on the four features (Lawson-Hanson active set).
/// Throws TooFewRows below four rows and RankDeficient when the design matrix lacks full column rank.
WeightFit fit_weights_detailed(std::span<const FeatureRow> rows, double beta = kDefaultBeta);
WeightVector fit_weights(std::span<const FeatureRow> rows, double beta = kDefaultBeta);

/// Root-mean-square of (w . features - mos) over the rows.
double weight_residual_rms(std::span<const FeatureRow> rows, const WeightVector& w);

double pearson(std::span<const double> x, std::span<const double> y);

/// Ranks starting at 1; tied values share the average of their positions.
std::vector<double> fractional_ranks(std::span<const double> values);

double spearman(std::span<const double> x, std::span<const double> y);

/// mos ~ b1 (0.5 - 1 / (1 + exp(b2 (m - b3)))) + b4
struct LogisticFit {
  double b1 = 0.0, b2 = 0.0, b3 = 0.0, b4 = 0.0;
  double residual_rms = 0.0;
  int iterations = 0;
  bool converged = false;

  double predict(double metric) const;
};

/// Levenberg-Marquardt fit from the data-driven start (b3 = median, b2 = 4 / range, b1 = mos range,
/// b4 = mos mean), plus a second start at the near-linear limit of the curve; the lower residual wins.
/// Constant mos yields a flat fit with b1 = 0.
LogisticFit logistic_fit(std::span<const double> metric, std::span<const double> mos);

}  // namespace hv3d
