#pragma once

#include <array>

#include "hv3d/plane.hpp"

namespace hv3d {

struct SsimParams {
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
  int window_size = 11;       // odd side of the Gaussian window
  double window_sigma = 1.5;

  void validate() const;
};

struct VifParams {
  int scales = 4;
  double noise_variance = 2.0;
  double epsilon = 1e-10;

  void validate() const;
};

inline constexpr std::array<double, 5> kMsSsimExponents = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

/// Peak signal-to-noise ratio in dB for 8-bit range; +infinity when the planes are identical.
double psnr(const PlaneD& ref, const PlaneD& dist);

struct SsimStats {
  double ssim = 0.0;  // mean of l*c*s over window positions
  double cs = 0.0;    // mean of c*s over window positions
};

/// Mean SSIM and contrast-structure terms over every valid window position.
SsimStats ssim_stats(const PlaneD& ref, const PlaneD& dist, const SsimParams& params = {});

double ssim(const PlaneD& ref, const PlaneD& dist, const SsimParams& params = {});

/// Five-scale MS-SSIM with 2x2 averaging between scales. Negative per-scale terms are floored at zero
/// before exponentiation.
double ms_ssim(const PlaneD& ref, const PlaneD& dist, const SsimParams& params = {});

struct VifInformation {
  double distorted = 0.0;  // information the distorted plane preserves, summed over scales (log10 units)
  double reference = 0.0;  // information in the reference plane
};

/// Both information sums of pixel-domain VIF. When the plane is too small for the requested number of scales,
/// the coarsest scales that do not fit are skipped.
VifInformation vif_information(const PlaneD& ref, const PlaneD& dist, const VifParams& params = {});

/// Pixel-domain visual information fidelity (VIFp): distorted / reference information. Exactly 1 for identical
/// planes; 0 for a flat reference with a different distorted plane. Not clamped: values slightly above one are
/// possible for contrast-enhanced inputs.
double vif(const PlaneD& ref, const PlaneD& dist, const VifParams& params = {});

/// Number of VIF scales that fit a plane of the given size (0 when not even the first one does).
int vif_usable_scales(int width, int height, const VifParams& params = {});

// 8-bit conveniences.
inline double psnr(const Plane8& a, const Plane8& b) { return psnr(plane_cast<double>(a), plane_cast<double>(b)); }
inline double ssim(const Plane8& a, const Plane8& b, const SsimParams& p = {}) {
  return ssim(plane_cast<double>(a), plane_cast<double>(b), p);
}
inline double ms_ssim(const Plane8& a, const Plane8& b, const SsimParams& p = {}) {
  return ms_ssim(plane_cast<double>(a), plane_cast<double>(b), p);
}
inline double vif(const Plane8& a, const Plane8& b, const VifParams& p = {}) {
  return vif(plane_cast<double>(a), plane_cast<double>(b), p);
}

/// Normalized 1D Gaussian taps of the given odd length.
std::vector<double> gaussian_taps(int size, double sigma);

/// Separable 'valid' correlation with the outer product of taps with itself.
PlaneD filter_valid(const PlaneD& in, const std::vector<double>& taps);

}  // namespace hv3d
