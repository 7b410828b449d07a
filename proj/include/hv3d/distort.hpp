#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "hv3d/video_io.hpp"

namespace hv3d {

enum class DistortionKind { GaussianNoise, GaussianBlur, DctQuantize, DepthNoise };

DistortionKind parse_distortion_kind(std::string_view name);
std::string_view to_string(DistortionKind kind);

/// level: noise sigma, blur sigma, or quantization-table scale depending on kind.
struct DistortionSpec {
  DistortionKind kind = DistortionKind::DctQuantize;
  double level = 1.0;
  std::uint64_t seed = 0;
};

/// gaussian_noise and gaussian_blur touch the views only, depth_noise only the depth maps, and dct_quantize
/// compresses views and depth maps alike (both are coded in a multiview-plus-depth stream).
StereoSequence apply_distortion(const StereoSequence& seq, const DistortionSpec& spec);

Plane8 add_gaussian_noise(const Plane8& plane, double sigma, std::uint64_t seed);
Plane8 gaussian_blur(const Plane8& plane, double sigma);

/// 8x8 block DCT, uniform quantization by table * scale, reconstruction. Partial border blocks are
/// processed with edge replication.
Plane8 dct_quantize(const Plane8& plane, const std::array<int, 64>& table, double scale);

/// Seed for one plane of one frame, derived from the run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t frame, std::uint64_t stream);

}  // namespace hv3d
