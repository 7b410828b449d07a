#pragma once

#include <vector>

#include "hv3d/metrics_2d.hpp"
#include "hv3d/video_io.hpp"

namespace hv3d {

/// Side of the depth-variance tiles (roughly the area one fixation covers on an HD display).
inline constexpr int kDepthBlockSize = 64;

struct VarianceWeights {
  std::vector<double> sigma2;  // population variance per 64x64 tile, row-major

  std::size_t n_blocks() const noexcept { return sigma2.size(); }
};

VarianceWeights local_variance_weights(const DepthMap& depth_ref);

/// sum(sigma2) / (N * max sigma2), or 1 when the reference depth is flat everywhere.
double depth_weight_factor(const VarianceWeights& weights);

/// VIF(D, D') clamped to [0, 1].
double depth_fidelity(const DepthMap& ref, const DepthMap& dist, const VifParams& params = {});

/// fidelity^beta * weighting factor, with the fidelity clamped to [0, 1].
double combine_depth(double depth_fidelity, double weight_factor, double beta);

/// Depth quality of one depth map pair.
double q_depth(const DepthMap& depth_ref, const DepthMap& depth_dist, double beta, const VifParams& params = {});

}  // namespace hv3d
