#include "hv3d/dct.hpp"

#include <cmath>
#include <numbers>

namespace hv3d {

Dct2d::Dct2d(int n) : n_(n), basis_(static_cast<std::size_t>(n) * n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "DCT size must be positive");
  for (int k = 0; k < n; ++k) {
    const double alpha = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (int i = 0; i < n; ++i) {
      basis_[static_cast<std::size_t>(k) * n + i] = alpha * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
    }
  }
}

PlaneD Dct2d::apply(const PlaneD& in, bool inverse) const {
  if (in.width() != n_ || in.height() != n_) {
    throw Error(ErrorKind::DimensionMismatch, "DCT block must be " + std::to_string(n_) + "x" + std::to_string(n_));
  }
  // forward: M = C, inverse: M = C^T; out = M in M^T
  auto m = [&](int r, int c) { return inverse ? basis_[static_cast<std::size_t>(c) * n_ + r] : basis_[static_cast<std::size_t>(r) * n_ + c]; };

  PlaneD tmp(n_, n_);  // tmp = in * M^T (transform along rows)
  for (int y = 0; y < n_; ++y) {
    for (int u = 0; u < n_; ++u) {
      double acc = 0.0;
      for (int x = 0; x < n_; ++x) acc += in(x, y) * m(u, x);
      tmp(u, y) = acc;
    }
  }
  PlaneD out(n_, n_);
  for (int v = 0; v < n_; ++v) {
    for (int u = 0; u < n_; ++u) {
      double acc = 0.0;
      for (int y = 0; y < n_; ++y) acc += m(v, y) * tmp(u, y);
      out(u, v) = acc;
    }
  }
  return out;
}

PlaneD Dct2d::forward(const PlaneD& block) const { return apply(block, false); }
PlaneD Dct2d::inverse(const PlaneD& coeffs) const { return apply(coeffs, true); }

namespace {

const Dct2d& transform_for(int n) {
  static const Dct2d dct8(8);
  static const Dct2d dct16(16);
  if (n == 8) return dct8;
  if (n == 16) return dct16;
  thread_local Dct2d other(1);
  if (other.size() != n) other = Dct2d(n);
  return other;
}

}  // namespace

PlaneD dct2(const PlaneD& block) {
  if (block.width() != block.height()) throw Error(ErrorKind::DimensionMismatch, "DCT block must be square");
  return transform_for(block.width()).forward(block);
}

PlaneD idct2(const PlaneD& coeffs) {
  if (coeffs.width() != coeffs.height()) throw Error(ErrorKind::DimensionMismatch, "DCT block must be square");
  return transform_for(coeffs.width()).inverse(coeffs);
}

}  // namespace hv3d
