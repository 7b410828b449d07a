#include "hv3d/distort.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hv3d/cyclopean.hpp"
#include "hv3d/dct.hpp"

namespace hv3d {

DistortionKind parse_distortion_kind(std::string_view name) {
  if (name == "gaussian_noise") return DistortionKind::GaussianNoise;
  if (name == "gaussian_blur") return DistortionKind::GaussianBlur;
  if (name == "dct_quantize") return DistortionKind::DctQuantize;
  if (name == "depth_noise") return DistortionKind::DepthNoise;
  throw Error(ErrorKind::UnknownKind, "unknown distortion kind '" + std::string(name) + "'");
}

std::string_view to_string(DistortionKind kind) {
  switch (kind) {
    case DistortionKind::GaussianNoise: return "gaussian_noise";
    case DistortionKind::GaussianBlur: return "gaussian_blur";
    case DistortionKind::DctQuantize: return "dct_quantize";
    case DistortionKind::DepthNoise: return "depth_noise";
  }
  return "unknown";
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t frame, std::uint64_t stream) {
  // splitmix64 finalizer over the combined key
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (frame * 16 + stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

std::uint8_t to_sample(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

Plane8 add_gaussian_noise(const Plane8& plane, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  Plane8 out(plane.width(), plane.height());
  for (std::size_t i = 0; i < plane.size(); ++i) out.data()[i] = to_sample(plane.data()[i] + noise(rng));
  return out;
}

Plane8 gaussian_blur(const Plane8& plane, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += taps[i + radius];
  }
  for (auto& t : taps) t /= sum;

  const int w = plane.width();
  const int h = plane.height();
  PlaneD horiz(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += taps[k + radius] * plane(std::clamp(x + k, 0, w - 1), y);
      horiz(x, y) = acc;
    }
  }
  Plane8 out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += taps[k + radius] * horiz(x, std::clamp(y + k, 0, h - 1));
      out(x, y) = to_sample(acc);
    }
  }
  return out;
}

Plane8 dct_quantize(const Plane8& plane, const std::array<int, 64>& table, double scale) {
  if (!(scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "quantization scale must be positive");
  constexpr int b = 8;
  const int w = plane.width();
  const int h = plane.height();
  Plane8 out(w, h);
  PlaneD block(b, b);
  for (int by = 0; by < h; by += b) {
    for (int bx = 0; bx < w; bx += b) {
      for (int y = 0; y < b; ++y)
        for (int x = 0; x < b; ++x) block(x, y) = plane(std::min(bx + x, w - 1), std::min(by + y, h - 1)) - 128.0;
      PlaneD coeffs = dct2(block);
      for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const double step = table[i] * scale;
        coeffs.data()[i] = std::round(coeffs.data()[i] / step) * step;
      }
      const PlaneD rec = idct2(coeffs);
      for (int y = 0; y < b && by + y < h; ++y)
        for (int x = 0; x < b && bx + x < w; ++x) out(bx + x, by + y) = to_sample(rec(x, y) + 128.0);
    }
  }
  return out;
}

StereoSequence apply_distortion(const StereoSequence& seq, const DistortionSpec& spec) {
  if (!(spec.level > 0.0) || !std::isfinite(spec.level)) {
    throw Error(ErrorKind::InvalidArgument, "distortion level must be positive");
  }
  seq.validate();
  StereoSequence out = seq;

  auto each_view_plane = [&](auto&& fn) {
    for (std::size_t f = 0; f < out.frame_count(); ++f) {
      std::uint64_t stream = 0;
      for (Frame* frame : {&out.left[f], &out.right[f]}) {
        fn(frame->y, f, stream++, jpeg_luma_quant_table());
        fn(frame->u, f, stream++, jpeg_chroma_quant_table());
        fn(frame->v, f, stream++, jpeg_chroma_quant_table());
      }
    }
  };
  auto each_depth = [&](auto&& fn) {
    for (std::size_t f = 0; f < out.frame_count(); ++f) {
      fn(out.depth_left[f].d, f, 6);
      fn(out.depth_right[f].d, f, 7);
    }
  };

  switch (spec.kind) {
    case DistortionKind::GaussianNoise:
      each_view_plane([&](Plane8& p, std::size_t f, std::uint64_t s, const auto&) {
        p = add_gaussian_noise(p, spec.level, derive_seed(spec.seed, f, s));
      });
      break;
    case DistortionKind::GaussianBlur:
      each_view_plane([&](Plane8& p, std::size_t, std::uint64_t, const auto&) { p = gaussian_blur(p, spec.level); });
      break;
    case DistortionKind::DctQuantize:
      each_view_plane([&](Plane8& p, std::size_t, std::uint64_t, const auto& table) {
        p = dct_quantize(p, table, spec.level);
      });
      each_depth([&](Plane8& p, std::size_t, std::uint64_t) { p = dct_quantize(p, jpeg_luma_quant_table(), spec.level); });
      break;
    case DistortionKind::DepthNoise:
      each_depth([&](Plane8& p, std::size_t f, std::uint64_t s) {
        p = add_gaussian_noise(p, spec.level, derive_seed(spec.seed, f, s));
      });
      break;
  }
  return out;
}

}  // namespace hv3d
