#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hv3d/error.hpp"

namespace hv3d {

/// A row-major 2D array of samples.
template <typename T>
class Plane {
 public:
  using value_type = T;

  Plane() = default;
  Plane(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(checked_size(width, height), fill) {}
  Plane(int width, int height, std::vector<T> data) : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != checked_size(width, height)) {
      throw Error(ErrorKind::BadGeometry, "plane buffer length does not match width*height");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(int x, int y) noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const T& operator()(int x, int y) const noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  std::span<T> row(int y) noexcept { return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)}; }
  std::span<const T> row(int y) const noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  bool same_shape(const Plane& other) const noexcept { return width_ == other.width_ && height_ == other.height_; }
  template <typename U>
  bool same_shape(const Plane<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Plane& a, const Plane& b) = default;

 private:
  static std::size_t checked_size(int width, int height) {
    if (width < 0 || height < 0) throw Error(ErrorKind::BadGeometry, "negative plane dimension");
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Plane8 = Plane<std::uint8_t>;
using PlaneD = Plane<double>;

template <typename To, typename From>
Plane<To> plane_cast(const Plane<From>& in) {
  std::vector<To> out(in.data().begin(), in.data().end());
  return Plane<To>(in.width(), in.height(), std::move(out));
}

inline void require_same_shape(const PlaneD& a, const PlaneD& b, const char* what) {
  if (!a.same_shape(b)) throw Error(ErrorKind::DimensionMismatch, what);
}

}  // namespace hv3d
