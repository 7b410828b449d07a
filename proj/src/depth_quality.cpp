#include "hv3d/depth_quality.hpp"

#include <algorithm>
#include <cmath>

namespace hv3d {

VarianceWeights local_variance_weights(const DepthMap& depth_ref) {
  const auto grid = tile_plane(depth_ref.d, kDepthBlockSize);
  VarianceWeights out;
  out.sigma2.reserve(grid.count());
  for (const auto& tile : grid.blocks) {
    double sum = 0.0;
    for (auto v : tile.data()) sum += v;
    const double mean = sum / static_cast<double>(tile.size());
    double ss = 0.0;
    for (auto v : tile.data()) ss += (v - mean) * (v - mean);
    out.sigma2.push_back(ss / static_cast<double>(tile.size()));
  }
  return out;
}

double depth_weight_factor(const VarianceWeights& weights) {
  if (weights.sigma2.empty()) throw Error(ErrorKind::BadGeometry, "no depth tiles");
  const double max_var = *std::max_element(weights.sigma2.begin(), weights.sigma2.end());
  if (max_var <= 0.0) return 1.0;
  double sum = 0.0;
  for (double s : weights.sigma2) sum += s;
  return sum / (static_cast<double>(weights.n_blocks()) * max_var);
}

double depth_fidelity(const DepthMap& ref, const DepthMap& dist, const VifParams& params) {
  if (!ref.d.same_shape(dist.d)) throw Error(ErrorKind::DimensionMismatch, "depth maps differ in size");
  return std::clamp(vif(ref.d, dist.d, params), 0.0, 1.0);
}

double combine_depth(double fidelity, double weight_factor, double beta) {
  return std::pow(std::clamp(fidelity, 0.0, 1.0), beta) * weight_factor;
}

double q_depth(const DepthMap& depth_ref, const DepthMap& depth_dist, double beta, const VifParams& params) {
  if (!depth_ref.d.same_shape(depth_dist.d)) throw Error(ErrorKind::DimensionMismatch, "depth maps differ in size");
  const double factor = depth_weight_factor(local_variance_weights(depth_ref));
  return combine_depth(depth_fidelity(depth_ref, depth_dist, params), factor, beta);
}

}  // namespace hv3d
