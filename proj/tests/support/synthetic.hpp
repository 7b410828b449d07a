#pragma once

#include <cstdint>

#include "hv3d/video_io.hpp"

namespace hv3d::testing {

/// Smooth gradient plus random-phase sinusoids plus fine seeded noise. `detail` scales the high-frequency part.
Plane8 textured_plane(int width, int height, std::uint64_t seed, double detail = 1.0, double phase_shift = 0.0);

/// Layered depth: a horizontal ramp with a few raised rectangles and a disc.
Plane8 layered_depth(int width, int height, std::uint64_t seed, int frame = 0);

/// Left view textured, right view warped by a depth-derived disparity (0..7 px), depth maps likewise.
StereoSequence synthetic_sequence(int width, int height, int frames, std::uint64_t seed, double detail = 1.0);

/// Uniform random plane.
Plane8 random_plane(int width, int height, std::uint64_t seed);

}  // namespace hv3d::testing
