#pragma once

#include <vector>

#include "hv3d/plane.hpp"

namespace hv3d {

/// Orthonormal n-point DCT-II basis applied separably to square blocks.
class Dct2d {
 public:
  explicit Dct2d(int n);

  int size() const noexcept { return n_; }

  /// out(u, v) = sum_x sum_y C[v][y] C[u][x] in(x, y)
  PlaneD forward(const PlaneD& block) const;
  PlaneD inverse(const PlaneD& coeffs) const;

 private:
  PlaneD apply(const PlaneD& in, bool transpose) const;

  int n_;
  std::vector<double> basis_;  // basis_[k * n + i] = alpha(k) cos(pi (2i+1) k / 2n)
};

/// Shared transforms for the two block sizes used in the toolkit; other sizes build a basis per call.
PlaneD dct2(const PlaneD& block);
PlaneD idct2(const PlaneD& coeffs);

}  // namespace hv3d
