#include "hv3d/metrics_2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hv3d {

void SsimParams::validate() const {
  if (!(k1 > 0.0) || !(k2 > 0.0) || !(dynamic_range > 0.0) || window_size < 1 || window_size % 2 == 0 ||
      !(window_sigma > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "invalid SSIM parameters");
  }
}

void VifParams::validate() const {
  if (scales < 1 || !(noise_variance > 0.0) || !(epsilon > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "invalid VIF parameters");
  }
}

std::vector<double> gaussian_taps(int size, double sigma) {
  std::vector<double> taps(static_cast<std::size_t>(size));
  const double c = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double x = i - c;
    taps[i] = std::exp(-(x * x) / (2.0 * sigma * sigma));
    sum += taps[i];
  }
  for (auto& t : taps) t /= sum;
  return taps;
}

PlaneD filter_valid(const PlaneD& in, const std::vector<double>& taps) {
  const int k = static_cast<int>(taps.size());
  const int ow = in.width() - k + 1;
  const int oh = in.height() - k + 1;
  if (ow < 1 || oh < 1) throw Error(ErrorKind::PlaneTooSmall, "plane smaller than filter window");

  PlaneD horiz(ow, in.height());
  for (int y = 0; y < in.height(); ++y) {
    const auto src = in.row(y);
    auto dst = horiz.row(y);
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int t = 0; t < k; ++t) acc += taps[t] * src[x + t];
      dst[x] = acc;
    }
  }
  PlaneD out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    auto dst = out.row(y);
    for (int t = 0; t < k; ++t) {
      const auto src = horiz.row(y + t);
      const double w = taps[t];
      for (int x = 0; x < ow; ++x) dst[x] += w * src[x];
    }
  }
  return out;
}

namespace {

PlaneD product(const PlaneD& a, const PlaneD& b) {
  PlaneD out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
  return out;
}

// 2x2 box average followed by decimation; odd trailing rows/columns mirror.
PlaneD downsample2(const PlaneD& in) {
  const int ow = (in.width() + 1) / 2;
  const int oh = (in.height() + 1) / 2;
  PlaneD out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    const int y0 = 2 * y;
    const int y1 = std::min(y0 + 1, in.height() - 1);
    for (int x = 0; x < ow; ++x) {
      const int x0 = 2 * x;
      const int x1 = std::min(x0 + 1, in.width() - 1);
      out(x, y) = 0.25 * (in(x0, y0) + in(x1, y0) + in(x0, y1) + in(x1, y1));
    }
  }
  return out;
}

// Every other sample starting at index 0.
PlaneD decimate(const PlaneD& in) {
  PlaneD out((in.width() + 1) / 2, (in.height() + 1) / 2);
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x) out(x, y) = in(2 * x, 2 * y);
  return out;
}

int vif_window(int scale, int scales) { return (1 << (scales - scale + 1)) + 1; }

}  // namespace

double psnr(const PlaneD& ref, const PlaneD& dist) {
  require_same_shape(ref, dist, "psnr: planes differ in size");
  if (ref.empty()) throw Error(ErrorKind::PlaneTooSmall, "psnr: empty plane");
  double sse = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = ref.data()[i] - dist.data()[i];
    sse += d * d;
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / static_cast<double>(ref.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

SsimStats ssim_stats(const PlaneD& ref, const PlaneD& dist, const SsimParams& params) {
  params.validate();
  require_same_shape(ref, dist, "ssim: planes differ in size");
  if (ref.width() < params.window_size || ref.height() < params.window_size) {
    throw Error(ErrorKind::PlaneTooSmall, "ssim: plane smaller than window");
  }
  const auto taps = gaussian_taps(params.window_size, params.window_sigma);
  const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
  const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);

  const PlaneD mu1 = filter_valid(ref, taps);
  const PlaneD mu2 = filter_valid(dist, taps);
  const PlaneD e11 = filter_valid(product(ref, ref), taps);
  const PlaneD e22 = filter_valid(product(dist, dist), taps);
  const PlaneD e12 = filter_valid(product(ref, dist), taps);

  double sum_ssim = 0.0;
  double sum_cs = 0.0;
  for (std::size_t i = 0; i < mu1.size(); ++i) {
    const double m1 = mu1.data()[i];
    const double m2 = mu2.data()[i];
    const double s11 = e11.data()[i] - m1 * m1;
    const double s22 = e22.data()[i] - m2 * m2;
    const double s12 = e12.data()[i] - m1 * m2;
    const double cs = (2.0 * s12 + c2) / (s11 + s22 + c2);
    const double l = (2.0 * m1 * m2 + c1) / (m1 * m1 + m2 * m2 + c1);
    sum_ssim += l * cs;
    sum_cs += cs;
  }
  const auto n = static_cast<double>(mu1.size());
  return {sum_ssim / n, sum_cs / n};
}

double ssim(const PlaneD& ref, const PlaneD& dist, const SsimParams& params) {
  return ssim_stats(ref, dist, params).ssim;
}

double ms_ssim(const PlaneD& ref, const PlaneD& dist, const SsimParams& params) {
  params.validate();
  require_same_shape(ref, dist, "ms_ssim: planes differ in size");
  constexpr int levels = static_cast<int>(kMsSsimExponents.size());
  {
    int w = ref.width();
    int h = ref.height();
    for (int l = 0; l < levels; ++l) {
      if (w < params.window_size || h < params.window_size) {
        throw Error(ErrorKind::PlaneTooSmall, "ms_ssim: plane too small for five scales");
      }
      w = (w + 1) / 2;
      h = (h + 1) / 2;
    }
  }

  PlaneD a = ref;
  PlaneD b = dist;
  double result = 1.0;
  for (int l = 0; l < levels; ++l) {
    const SsimStats s = ssim_stats(a, b, params);
    const double term = (l == levels - 1) ? s.ssim : s.cs;
    result *= std::pow(std::max(term, 0.0), kMsSsimExponents[l]);
    if (l + 1 < levels) {
      a = downsample2(a);
      b = downsample2(b);
    }
  }
  return result;
}

int vif_usable_scales(int width, int height, const VifParams& params) {
  int w = width;
  int h = height;
  for (int s = 1; s <= params.scales; ++s) {
    const int n = vif_window(s, params.scales);
    if (s > 1) {
      // low-pass (valid) then decimate
      if (w < n || h < n) return s - 1;
      w = (w - n + 2) / 2;
      h = (h - n + 2) / 2;
    }
    if (w < n || h < n) return s - 1;
  }
  return params.scales;
}

VifInformation vif_information(const PlaneD& ref_in, const PlaneD& dist_in, const VifParams& params) {
  params.validate();
  require_same_shape(ref_in, dist_in, "vif: planes differ in size");
  const int usable = vif_usable_scales(ref_in.width(), ref_in.height(), params);
  if (usable < 1) throw Error(ErrorKind::PlaneTooSmall, "vif: plane smaller than the first-scale window");

  const double eps = params.epsilon;
  const double sigma_nsq = params.noise_variance;
  PlaneD ref = ref_in;
  PlaneD dist = dist_in;
  double num = 0.0;
  double den = 0.0;

  for (int s = 1; s <= usable; ++s) {
    const int n = vif_window(s, params.scales);
    const auto taps = gaussian_taps(n, n / 5.0);
    if (s > 1) {
      ref = decimate(filter_valid(ref, taps));
      dist = decimate(filter_valid(dist, taps));
    }
    const PlaneD mu1 = filter_valid(ref, taps);
    const PlaneD mu2 = filter_valid(dist, taps);
    const PlaneD e11 = filter_valid(product(ref, ref), taps);
    const PlaneD e22 = filter_valid(product(dist, dist), taps);
    const PlaneD e12 = filter_valid(product(ref, dist), taps);

    for (std::size_t i = 0; i < mu1.size(); ++i) {
      const double m1 = mu1.data()[i];
      const double m2 = mu2.data()[i];
      double s11 = std::max(e11.data()[i] - m1 * m1, 0.0);
      const double s22 = std::max(e22.data()[i] - m2 * m2, 0.0);
      const double s12 = e12.data()[i] - m1 * m2;

      double g = s12 / (s11 + eps);
      double sv = s22 - g * s12;
      if (s11 < eps) {
        g = 0.0;
        sv = s22;
        s11 = 0.0;
      }
      if (s22 < eps) {
        g = 0.0;
        sv = 0.0;
      }
      if (g < 0.0) {
        sv = s22;
        g = 0.0;
      }
      sv = std::max(sv, eps);

      num += std::log10(1.0 + g * g * s11 / (sv + sigma_nsq));
      den += std::log10(1.0 + s11 / sigma_nsq);
    }
  }

  return {num, den};
}

double vif(const PlaneD& ref, const PlaneD& dist, const VifParams& params) {
  const VifInformation info = vif_information(ref, dist, params);
  if (ref == dist) return 1.0;
  if (info.reference < params.epsilon) return 0.0;
  return info.distorted / info.reference;
}

}  // namespace hv3d
