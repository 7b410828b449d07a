#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "hv3d/video_io.hpp"
#include "support/synthetic.hpp"

using namespace hv3d;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hv3d_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::uint8_t> random_bytes(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("read_yuv_sequence parses planar 4:2:0 frames") {
  const auto dir = scratch_dir("yuv");
  const auto bytes = random_bytes(92160, 1);
  write_bytes(dir / "one.yuv", bytes);

  const auto frames = read_yuv_sequence(dir / "one.yuv", 320, 192);
  REQUIRE(frames.size() == 1);
  CHECK(frames[0].y(0, 0) == bytes[0]);
  CHECK(frames[0].y(319, 191) == bytes[320 * 192 - 1]);
  CHECK(frames[0].u(0, 0) == bytes[320 * 192]);
  CHECK(frames[0].v(0, 0) == bytes[320 * 192 + 160 * 96]);
  CHECK(frames[0].v(159, 95) == bytes.back());

  SUBCASE("one stray byte is a truncated frame") {
    auto longer = bytes;
    longer.push_back(0);
    write_bytes(dir / "long.yuv", longer);
    CHECK_THROWS_AS(read_yuv_sequence(dir / "long.yuv", 320, 192), Error);
    try {
      read_yuv_sequence(dir / "long.yuv", 320, 192);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::TruncatedFrame);
    }
  }
  SUBCASE("max_frames truncates") {
    write_bytes(dir / "ten.yuv", random_bytes(92160 * 10, 2));
    CHECK(read_yuv_sequence(dir / "ten.yuv", 320, 192, 4).size() == 4);
    CHECK(read_yuv_sequence(dir / "ten.yuv", 320, 192).size() == 10);
  }
}

TEST_CASE("read errors carry the right kind") {
  const auto dir = scratch_dir("errors");
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::IoError;
  };
  CHECK(kind_of([&] { read_yuv_sequence(dir / "absent.yuv", 320, 192); }) == ErrorKind::MissingFile);
  write_bytes(dir / "empty.yuv", {});
  CHECK(kind_of([&] { read_depth_sequence(dir / "empty.yuv", 320, 192); }) == ErrorKind::TruncatedFrame);
  write_bytes(dir / "ok.yuv", random_bytes(92160, 3));
  CHECK(kind_of([&] { read_yuv_sequence(dir / "ok.yuv", 321, 192); }) == ErrorKind::BadGeometry);
  CHECK(kind_of([&] { read_yuv_sequence(dir / "ok.yuv", 62, 192); }) == ErrorKind::BadGeometry);
}

TEST_CASE("read_depth_sequence reads luma-only rasters") {
  const auto dir = scratch_dir("depth");
  const auto bytes = random_bytes(61440 * 3, 4);
  write_bytes(dir / "d.yuv", std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 61440));
  CHECK(read_depth_sequence(dir / "d.yuv", 320, 192).size() == 1);
  write_bytes(dir / "d3.yuv", bytes);
  const auto maps = read_depth_sequence(dir / "d3.yuv", 320, 192, 2);
  REQUIRE(maps.size() == 2);
  CHECK(maps[1].d(0, 0) == bytes[61440]);
}

TEST_CASE("frame files round-trip byte for byte") {
  const auto dir = scratch_dir("roundtrip");
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    const auto bytes = random_bytes(yuv420_frame_bytes(128, 96) * 3, seed);
    write_bytes(dir / "in.yuv", bytes);
    write_yuv_sequence(dir / "out.yuv", read_yuv_sequence(dir / "in.yuv", 128, 96));
    CHECK(read_bytes(dir / "out.yuv") == bytes);
  }
}

TEST_CASE("tile_plane grid sizes and contents") {
  const Plane8 plane = testing::random_plane(320, 192, 9);
  const auto g16 = tile_plane(plane, 16);
  CHECK(g16.cols == 20);
  CHECK(g16.rows == 12);
  CHECK(g16.count() == 240);
  const auto g64 = tile_plane(plane, 64);
  CHECK(g64.cols == 5);
  CHECK(g64.rows == 3);
  CHECK(g64.count() == 15);
  CHECK(g64.at(2, 1)(5, 7) == plane(2 * 64 + 5, 64 + 7));

  const Plane8 small = testing::random_plane(16, 16, 10);
  const auto one = tile_plane(small, 16);
  REQUIRE(one.count() == 1);
  CHECK(one.blocks[0] == small);

  CHECK_THROWS_AS(tile_plane(testing::random_plane(32, 63, 11), 64), Error);
}

TEST_CASE("tiling then reassembly reproduces the cropped plane") {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 16 + static_cast<int>(rng() % 200);
    const int h = 16 + static_cast<int>(rng() % 200);
    const int b = (trial % 2 == 0) ? 16 : 8;
    const Plane8 plane = testing::random_plane(w, h, rng());
    const auto grid = tile_plane(plane, b);
    CHECK(grid.count() == static_cast<std::size_t>((w / b) * (h / b)));
    const Plane8 back = untile(grid);
    REQUIRE(back.width() == (w / b) * b);
    REQUIRE(back.height() == (h / b) * b);
    bool same = true;
    for (int y = 0; y < back.height(); ++y)
      for (int x = 0; x < back.width(); ++x) same = same && back(x, y) == plane(x, y);
    CHECK(same);
  }
}

TEST_CASE("manifest save and load") {
  const auto dir = scratch_dir("manifest");
  const auto seq = testing::synthetic_sequence(128, 64, 2, 13);
  const auto path = save_sequence(dir, "clip", seq);
  const auto loaded = load_sequence(read_manifest(path));
  CHECK(loaded.left == seq.left);
  CHECK(loaded.right == seq.right);
  CHECK(loaded.depth_left == seq.depth_left);
  CHECK(loaded.depth_right == seq.depth_right);

  Manifest m = read_manifest(path);
  m.frame_count = 3;
  write_manifest(dir / "too_many.json", m);
  try {
    load_sequence(read_manifest(dir / "too_many.json"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TruncatedFrame);
  }
}
