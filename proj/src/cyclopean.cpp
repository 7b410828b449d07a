#include "hv3d/cyclopean.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>

#include "hv3d/dct.hpp"
#include "hv3d/depth_quality.hpp"

namespace hv3d {

DisparityField match_blocks(const Plane8& left_y, const Plane8& right_y, int search_range) {
  if (!left_y.same_shape(right_y)) throw Error(ErrorKind::DimensionMismatch, "match_blocks: views differ in size");
  if (search_range < 0) throw Error(ErrorKind::InvalidArgument, "search_range must be non-negative");
  constexpr int b = kCyclopeanBlockSize;
  if (left_y.width() < b || left_y.height() < b) throw Error(ErrorKind::BadGeometry, "view smaller than one block");

  DisparityField field;
  field.cols = left_y.width() / b;
  field.rows = left_y.height() / b;
  field.search_range = search_range;
  field.disparity.resize(static_cast<std::size_t>(field.cols) * field.rows);
  field.cost.resize(field.disparity.size());

  const int width = right_y.width();
  for (int by = 0; by < field.rows; ++by) {
    for (int bx = 0; bx < field.cols; ++bx) {
      const int x0 = bx * b;
      auto best_cost = std::numeric_limits<std::uint32_t>::max();
      int best_d = 0;
      // Visiting order 0, -1, +1, -2, +2, ... with strict improvement implements the tie-break.
      for (int k = 0; k <= 2 * search_range; ++k) {
        const int d = (k % 2 == 1) ? -(k + 1) / 2 : k / 2;
        const int xr = x0 + d;
        if (xr < 0 || xr + b > width) continue;
        std::uint32_t sad = 0;
        for (int y = 0; y < b; ++y) {
          const auto l = left_y.row(by * b + y).subspan(x0, b);
          const auto r = right_y.row(by * b + y).subspan(xr, b);
          for (int x = 0; x < b; ++x) sad += static_cast<std::uint32_t>(std::abs(int(l[x]) - int(r[x])));
        }
        if (sad < best_cost) {
          best_cost = sad;
          best_d = d;
        }
      }
      const auto i = static_cast<std::size_t>(by) * field.cols + bx;
      field.disparity[i] = best_d;
      field.cost[i] = best_cost;
    }
  }
  return field;
}

FusedPlanes fuse_blocks_3d_dct_planes(const PlaneD& block_l, const PlaneD& block_r) {
  constexpr int b = kCyclopeanBlockSize;
  if (block_l.width() != b || block_l.height() != b || !block_l.same_shape(block_r)) {
    throw Error(ErrorKind::DimensionMismatch, "3D-DCT fusion expects two 16x16 blocks");
  }
  const PlaneD l = dct2(block_l);
  const PlaneD r = dct2(block_r);
  // Orthonormal 2-point DCT along the view axis.
  const double s = 1.0 / std::numbers::sqrt2;
  FusedPlanes out{PlaneD(b, b), PlaneD(b, b)};
  for (std::size_t i = 0; i < l.size(); ++i) {
    out.low.data()[i] = s * (l.data()[i] + r.data()[i]);
    out.high.data()[i] = s * (l.data()[i] - r.data()[i]);
  }
  return out;
}

PlaneD fuse_blocks_3d_dct(const PlaneD& block_l, const PlaneD& block_r) {
  return fuse_blocks_3d_dct_planes(block_l, block_r).low;
}

const std::array<int, 64>& jpeg_luma_quant_table() {
  static const std::array<int, 64> table = {
      16, 11, 10, 16, 24,  40,  51,  61,   //
      12, 12, 14, 19, 26,  58,  60,  55,   //
      14, 13, 16, 24, 40,  57,  69,  56,   //
      14, 17, 22, 29, 51,  87,  80,  62,   //
      18, 22, 37, 56, 68,  109, 103, 77,   //
      24, 35, 55, 64, 81,  104, 113, 92,   //
      49, 64, 78, 87, 103, 121, 120, 101,  //
      72, 92, 95, 98, 112, 100, 103, 99,
  };
  return table;
}

const std::array<int, 64>& jpeg_chroma_quant_table() {
  static const std::array<int, 64> table = {
      17, 18, 24, 47, 99, 99, 99, 99,  //
      18, 21, 26, 66, 99, 99, 99, 99,  //
      24, 26, 56, 99, 99, 99, 99, 99,  //
      47, 66, 99, 99, 99, 99, 99, 99,  //
      99, 99, 99, 99, 99, 99, 99, 99,  //
      99, 99, 99, 99, 99, 99, 99, 99,  //
      99, 99, 99, 99, 99, 99, 99, 99,  //
      99, 99, 99, 99, 99, 99, 99, 99,
  };
  return table;
}

CsfMask build_csf_mask() {
  constexpr int n = kCyclopeanBlockSize;
  constexpr int src = 8;
  const auto& q = jpeg_luma_quant_table();

  auto coord = [](int i, int& i0, int& i1, double& t) {
    const double s = std::clamp((i + 0.5) * src / n - 0.5, 0.0, double(src - 1));
    i0 = static_cast<int>(std::floor(s));
    i1 = std::min(i0 + 1, src - 1);
    t = s - i0;
  };

  PlaneD up(n, n);
  for (int y = 0; y < n; ++y) {
    int y0, y1;
    double ty;
    coord(y, y0, y1, ty);
    for (int x = 0; x < n; ++x) {
      int x0, x1;
      double tx;
      coord(x, x0, x1, tx);
      const double top = (1 - tx) * q[y0 * src + x0] + tx * q[y0 * src + x1];
      const double bottom = (1 - tx) * q[y1 * src + x0] + tx * q[y1 * src + x1];
      up(x, y) = (1 - ty) * top + ty * bottom;
    }
  }
  const double min_step = *std::min_element(up.data().begin(), up.data().end());
  CsfMask mask{PlaneD(n, n)};
  for (std::size_t i = 0; i < up.size(); ++i) mask.c.data()[i] = min_step / up.data()[i];
  return mask;
}

CyclopeanBlock apply_csf(const PlaneD& coeffs, const CsfMask& mask) {
  if (!coeffs.same_shape(mask.c)) throw Error(ErrorKind::DimensionMismatch, "apply_csf: coefficient block must be 16x16");
  CyclopeanBlock out{PlaneD(coeffs.width(), coeffs.height())};
  for (std::size_t i = 0; i < coeffs.size(); ++i) out.xc.data()[i] = mask.c.data()[i] * coeffs.data()[i];
  return out;
}

CyclopeanBlock cyclopean_block(const PlaneD& block_l, const PlaneD& block_r, const CsfMask& mask) {
  return apply_csf(fuse_blocks_3d_dct(block_l, block_r), mask);
}

namespace {

PlaneD extract_block(const Plane8& plane, int x0, int y0) {
  constexpr int b = kCyclopeanBlockSize;
  PlaneD out(b, b);
  for (int y = 0; y < b; ++y) {
    const auto src = plane.row(y0 + y).subspan(x0, b);
    std::copy(src.begin(), src.end(), out.row(y).begin());
  }
  return out;
}

}  // namespace

std::vector<double> cyclopean_block_ssims(const Plane8& ref_left, const Plane8& ref_right, const Plane8& dist_left,
                                          const Plane8& dist_right, const DisparityField& field, const CsfMask& mask,
                                          const SsimParams& ssim_params) {
  for (const Plane8* p : {&ref_right, &dist_left, &dist_right}) {
    if (!p->same_shape(ref_left)) throw Error(ErrorKind::DimensionMismatch, "cyclopean: view planes differ in size");
  }
  constexpr int b = kCyclopeanBlockSize;
  if (field.cols != ref_left.width() / b || field.rows != ref_left.height() / b) {
    throw Error(ErrorKind::DimensionMismatch, "cyclopean: disparity field does not match view geometry");
  }

  std::vector<double> scores;
  scores.reserve(field.disparity.size());
  for (int by = 0; by < field.rows; ++by) {
    for (int bx = 0; bx < field.cols; ++bx) {
      const int xl = bx * b;
      const int xr = xl + field.at(bx, by);
      const int y0 = by * b;
      const PlaneD ref_model =
          idct2(cyclopean_block(extract_block(ref_left, xl, y0), extract_block(ref_right, xr, y0), mask).xc);
      const PlaneD dist_model =
          idct2(cyclopean_block(extract_block(dist_left, xl, y0), extract_block(dist_right, xr, y0), mask).xc);
      scores.push_back(ssim(ref_model, dist_model, ssim_params));
    }
  }
  return scores;
}

double combine_cyclopean(double depth_fidelity, std::span<const double> block_ssims, double beta) {
  if (block_ssims.empty()) throw Error(ErrorKind::InvalidArgument, "cyclopean: no blocks");
  double sum = 0.0;
  for (double s : block_ssims) sum += s;
  const double mean = std::max(sum / static_cast<double>(block_ssims.size()), 0.0);
  return std::pow(std::clamp(depth_fidelity, 0.0, 1.0), beta) * mean;
}

double q_cyclopean(const Frame& ref_left, const Frame& ref_right, const Frame& dist_left, const Frame& dist_right,
                   double depth_fidelity, double beta, const CyclopeanParams& params) {
  static const CsfMask mask = build_csf_mask();
  const DisparityField field = match_blocks(ref_left.y, ref_right.y, params.search_range);
  const auto ssims = cyclopean_block_ssims(ref_left.y, ref_right.y, dist_left.y, dist_right.y, field, mask, params.ssim);
  return combine_cyclopean(depth_fidelity, ssims, beta);
}

double q_cyclopean(const Frame& ref_left, const Frame& ref_right, const DepthMap& ref_depth_left,
                   const DepthMap& ref_depth_right, const Frame& dist_left, const Frame& dist_right,
                   const DepthMap& dist_depth_left, const DepthMap& dist_depth_right, double beta,
                   const CyclopeanParams& params, const VifParams& vif_params) {
  const double fidelity = 0.5 * (depth_fidelity(ref_depth_left, dist_depth_left, vif_params) +
                                 depth_fidelity(ref_depth_right, dist_depth_right, vif_params));
  return q_cyclopean(ref_left, ref_right, dist_left, dist_right, fidelity, beta, params);
}

}  // namespace hv3d
