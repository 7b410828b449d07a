#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "hv3d/cyclopean.hpp"
#include "hv3d/depth_quality.hpp"
#include "hv3d/metrics_2d.hpp"
#include "hv3d/video_io.hpp"

namespace hv3d {

/// w1: luma VIF per view, w4: chroma VIF per plane, w2: cyclopean term, w3: depth term.
struct WeightVector {
  double w1 = 0.25;
  double w2 = 0.30;
  double w3 = 0.10;
  double w4 = 0.05;
  double beta = kDefaultBeta;
  // False for the shipped placeholder constants; true once fitted or loaded from a weights file.
  bool calibrated = false;

  /// Throws DegenerateWeights for negative or all-zero weights, InvalidArgument for beta outside (0, 1].
  void validate() const;
};

WeightVector read_weights(const std::filesystem::path& path);
std::string weights_json(const WeightVector& w);

struct ScoreParams {
  CyclopeanParams cyclopean{};
  VifParams vif{};
  SsimParams ssim{};
  bool baselines = true;
  std::size_t workers = 0;  // 0: worker_count()
};

/// Baseline 2D metrics on the luma planes of each view.
struct Baselines {
  double psnr_l = 0.0, psnr_r = 0.0;
  double ssim_l = 0.0, ssim_r = 0.0;
  double msssim_l = 0.0, msssim_r = 0.0;
  double vifp_l = 0.0, vifp_r = 0.0;
};

/// Weight-independent measurements of one frame. VIF values are clamped to [0, 1].
struct FrameComponents {
  double vif_y_l = 0.0, vif_u_l = 0.0, vif_v_l = 0.0;
  double vif_y_r = 0.0, vif_u_r = 0.0, vif_v_r = 0.0;
  double depth_fidelity = 0.0;  // mean clamped VIF over the two depth maps
  double cyclopean_ssim = 0.0;  // mean block SSIM of the cyclopean models, floored at 0
  double depth_factor = 0.0;    // mean variance weighting factor of the two reference depth maps
  Baselines baselines{};
};

struct FrameScores {
  double q_left = 0.0;
  double q_right = 0.0;
  double q_rl = 0.0;
  double q_d = 0.0;
  double hv3d_max = 0.0;
  double numerator = 0.0;
  double hv3d = 0.0;
  Baselines baselines{};
};

struct MetricReport {
  std::vector<FrameScores> frames;
  FrameScores pooled;  // arithmetic mean of every per-frame field
  WeightVector weights;
  bool has_baselines = true;
};

/// w1 VIF(Y) + w4 VIF(U) + w4 VIF(V), VIF clamped to [0, 1].
double view_quality(double vif_y, double vif_u, double vif_v, const WeightVector& w);
double view_quality(const Frame& ref, const Frame& dist, const WeightVector& w, const VifParams& params = {});

/// 2 w1 + 4 w4 + w2 + w3 * depth_weight_factor.
double hv3d_max(const WeightVector& w, double depth_weight_factor);

double cyclopean_term(const FrameComponents& c, double beta);
double depth_term(const FrameComponents& c, double beta);

FrameComponents frame_components(const StereoSequence& ref, const StereoSequence& dist, std::size_t frame,
                                 const ScoreParams& params = {});

/// Components of every frame, computed in parallel and returned in frame order.
std::vector<FrameComponents> score_components(const StereoSequence& ref, const StereoSequence& dist,
                                              const ScoreParams& params = {});

FrameScores combine_frame(const FrameComponents& c, const WeightVector& w);
MetricReport assemble_report(const std::vector<FrameComponents>& components, const WeightVector& w,
                             bool has_baselines = true);

MetricReport hv3d_score(const StereoSequence& ref, const StereoSequence& dist, const WeightVector& w,
                        const ScoreParams& params = {});

/// One row per frame plus a trailing "pooled" row; fixed six-decimal formatting, "inf" for lossless PSNR.
void write_report_csv(std::ostream& out, const MetricReport& report);

/// Fixed-point six-decimal text with "inf" for infinity.
std::string format_number(double value);

}  // namespace hv3d
