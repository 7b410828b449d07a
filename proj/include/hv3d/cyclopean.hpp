#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "hv3d/metrics_2d.hpp"
#include "hv3d/video_io.hpp"

namespace hv3d {

inline constexpr int kCyclopeanBlockSize = 16;
inline constexpr int kDefaultSearchRange = 64;
inline constexpr double kDefaultBeta = 0.7;

/// Horizontal block disparities with the left view as anchor. The block at left x matches the right-view
/// block at x + disparity.
struct DisparityField {
  int block_size = kCyclopeanBlockSize;
  int cols = 0;
  int rows = 0;
  int search_range = 0;
  std::vector<int> disparity;       // row-major, one per block
  std::vector<std::uint32_t> cost;  // SAD at the chosen disparity

  int at(int col, int row) const { return disparity[static_cast<std::size_t>(row) * cols + col]; }
};

/// Exhaustive SAD search over d in [-search_range, search_range]. Candidates that leave the right plane are
/// skipped; ties go to the smallest |d|, then to the negative shift.
DisparityField match_blocks(const Plane8& left_y, const Plane8& right_y, int search_range = kDefaultSearchRange);

/// Both planes of the orthonormal 3D-DCT over a 16x16x2 stack.
struct FusedPlanes {
  PlaneD low;   // third-axis frequency 0, (DCT2(l) + DCT2(r)) / sqrt(2)
  PlaneD high;  // third-axis frequency 1, (DCT2(l) - DCT2(r)) / sqrt(2)
};

FusedPlanes fuse_blocks_3d_dct_planes(const PlaneD& block_l, const PlaneD& block_r);

/// The kept low-frequency plane of the fused pair.
PlaneD fuse_blocks_3d_dct(const PlaneD& block_l, const PlaneD& block_r);

struct CsfMask {
  PlaneD c;  // 16x16, entries in (0, 1], max exactly 1
};

/// ITU-T T.81 Annex K luminance quantization table, row-major (row = vertical frequency).
const std::array<int, 64>& jpeg_luma_quant_table();
const std::array<int, 64>& jpeg_chroma_quant_table();

/// Contrast-sensitivity weights: the luminance table bilinearly upsampled to 16x16 (half-pixel centres,
/// edge clamped), inverted, and normalized so the smallest step gets weight 1.
CsfMask build_csf_mask();

struct CyclopeanBlock {
  PlaneD xc;
};

/// Element-wise weighting of a coefficient block by the mask.
CyclopeanBlock apply_csf(const PlaneD& coeffs, const CsfMask& mask);

/// Cyclopean model of one matched block pair: fuse, keep the low plane, weight by the mask.
CyclopeanBlock cyclopean_block(const PlaneD& block_l, const PlaneD& block_r, const CsfMask& mask);

struct CyclopeanParams {
  int search_range = kDefaultSearchRange;
  SsimParams ssim{};
};

/// Per-block SSIM between the inverse-transformed cyclopean models of the reference and distorted pairs.
/// Both pairs use the reference disparity field so block correspondence is identical.
std::vector<double> cyclopean_block_ssims(const Plane8& ref_left, const Plane8& ref_right, const Plane8& dist_left,
                                          const Plane8& dist_right, const DisparityField& ref_disparity,
                                          const CsfMask& mask, const SsimParams& ssim_params = {});

/// depth_fidelity^beta * mean(block_ssims). The fidelity is clamped to [0, 1] and the mean floored at 0.
double combine_cyclopean(double depth_fidelity, std::span<const double> block_ssims, double beta);

/// Cyclopean quality of one frame pair. depth_fidelity is the (clamped) depth VIF term shared with the depth
/// quality stage.
double q_cyclopean(const Frame& ref_left, const Frame& ref_right, const Frame& dist_left, const Frame& dist_right,
                   double depth_fidelity, double beta, const CyclopeanParams& params = {});

/// Same, computing the depth fidelity as the mean clamped VIF over the two views' depth maps.
double q_cyclopean(const Frame& ref_left, const Frame& ref_right, const DepthMap& ref_depth_left,
                   const DepthMap& ref_depth_right, const Frame& dist_left, const Frame& dist_right,
                   const DepthMap& dist_depth_left, const DepthMap& dist_depth_right, double beta,
                   const CyclopeanParams& params = {}, const VifParams& vif_params = {});

}  // namespace hv3d
