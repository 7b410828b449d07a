#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hv3d/plane.hpp"

namespace hv3d {

inline constexpr int kMinFrameDimension = 64;

/// One 8-bit YUV 4:2:0 picture. Chroma planes are (width/2)x(height/2).
struct Frame {
  Plane8 y;
  Plane8 u;
  Plane8 v;

  int width() const noexcept { return y.width(); }
  int height() const noexcept { return y.height(); }

  /// Throws BadGeometry unless the frame satisfies the 4:2:0 layout rules.
  void validate() const;

  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Per-view depth raster, same geometry as the view's luma plane.
struct DepthMap {
  Plane8 d;

  int width() const noexcept { return d.width(); }
  int height() const noexcept { return d.height(); }

  friend bool operator==(const DepthMap&, const DepthMap&) = default;
};

struct StereoSequence {
  std::vector<Frame> left;
  std::vector<Frame> right;
  std::vector<DepthMap> depth_left;
  std::vector<DepthMap> depth_right;

  std::size_t frame_count() const noexcept { return left.size(); }
  int width() const noexcept { return left.empty() ? 0 : left.front().width(); }
  int height() const noexcept { return left.empty() ? 0 : left.front().height(); }

  /// Checks stream lengths, per-stream constant geometry, and depth/luma agreement.
  void validate() const;
};

/// Row-major tiling of a plane into square blocks; partial border tiles are dropped.
template <typename T>
struct BlockGrid {
  int block_size = 0;
  int cols = 0;
  int rows = 0;
  std::vector<Plane<T>> blocks;

  std::size_t count() const noexcept { return blocks.size(); }
  const Plane<T>& at(int col, int row) const { return blocks[static_cast<std::size_t>(row) * cols + col]; }
};

/// Throws BadGeometry for odd, non-positive, or too-small dimensions.
void check_frame_geometry(int width, int height);

std::size_t yuv420_frame_bytes(int width, int height);

std::vector<Frame> read_yuv_sequence(const std::filesystem::path& path, int width, int height,
                                     std::optional<std::size_t> max_frames = std::nullopt);
std::vector<DepthMap> read_depth_sequence(const std::filesystem::path& path, int width, int height,
                                          std::optional<std::size_t> max_frames = std::nullopt);

void write_yuv_sequence(const std::filesystem::path& path, const std::vector<Frame>& frames);
void write_depth_sequence(const std::filesystem::path& path, const std::vector<DepthMap>& maps);

template <typename T>
BlockGrid<T> tile_plane(const Plane<T>& plane, int block_size) {
  if (block_size <= 0 || plane.width() < block_size || plane.height() < block_size) {
    throw Error(ErrorKind::BadGeometry, "plane smaller than block size " + std::to_string(block_size));
  }
  BlockGrid<T> grid;
  grid.block_size = block_size;
  grid.cols = plane.width() / block_size;
  grid.rows = plane.height() / block_size;
  grid.blocks.reserve(static_cast<std::size_t>(grid.cols) * grid.rows);
  for (int by = 0; by < grid.rows; ++by) {
    for (int bx = 0; bx < grid.cols; ++bx) {
      Plane<T> tile(block_size, block_size);
      for (int y = 0; y < block_size; ++y) {
        auto src = plane.row(by * block_size + y).subspan(static_cast<std::size_t>(bx) * block_size, block_size);
        std::copy(src.begin(), src.end(), tile.row(y).begin());
      }
      grid.blocks.push_back(std::move(tile));
    }
  }
  return grid;
}

/// Inverse of tile_plane: the cropped plane of size cols*b x rows*b.
template <typename T>
Plane<T> untile(const BlockGrid<T>& grid) {
  const int b = grid.block_size;
  Plane<T> out(grid.cols * b, grid.rows * b);
  for (int by = 0; by < grid.rows; ++by) {
    for (int bx = 0; bx < grid.cols; ++bx) {
      const auto& tile = grid.at(bx, by);
      for (int y = 0; y < b; ++y) {
        std::copy(tile.row(y).begin(), tile.row(y).end(), out.row(by * b + y).begin() + static_cast<std::ptrdiff_t>(bx) * b);
      }
    }
  }
  return out;
}

/// Sequence manifest: plain JSON naming the four raw streams and their geometry.
/// Relative paths resolve against the manifest's directory.
struct Manifest {
  std::filesystem::path left;
  std::filesystem::path right;
  std::filesystem::path depth_left;
  std::filesystem::path depth_right;
  int width = 0;
  int height = 0;
  std::size_t frame_count = 0;
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

/// Loads exactly manifest.frame_count frames from every stream.
StereoSequence load_sequence(const Manifest& manifest);

/// Writes the four streams to dir/<stem>_{left,right,depth_left,depth_right}.yuv plus
/// dir/<stem>.json; returns the manifest path.
std::filesystem::path save_sequence(const std::filesystem::path& dir, const std::string& stem,
                                    const StereoSequence& seq);

}  // namespace hv3d
