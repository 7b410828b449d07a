#include "hv3d/video_io.hpp"

#include <fstream>
#include <iterator>

#include "json.hpp"

namespace hv3d {

namespace fs = std::filesystem;

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::TruncatedFrame: return "TruncatedFrame";
    case ErrorKind::BadGeometry: return "BadGeometry";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::PlaneTooSmall: return "PlaneTooSmall";
    case ErrorKind::DegenerateWeights: return "DegenerateWeights";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::TooFewRows: return "TooFewRows";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::UnknownKind: return "UnknownKind";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

void check_frame_geometry(int width, int height) {
  if (width < kMinFrameDimension || height < kMinFrameDimension || width % 2 != 0 || height % 2 != 0) {
    throw Error(ErrorKind::BadGeometry, "frame geometry " + std::to_string(width) + "x" + std::to_string(height) +
                                            " must be even and at least 64x64");
  }
}

std::size_t yuv420_frame_bytes(int width, int height) {
  const auto luma = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  return luma + luma / 2;
}

void Frame::validate() const {
  check_frame_geometry(y.width(), y.height());
  const auto luma = static_cast<std::size_t>(y.width()) * y.height();
  if (y.size() != luma || u.width() != y.width() / 2 || u.height() != y.height() / 2 || !u.same_shape(v) ||
      u.size() != luma / 4 || v.size() != luma / 4) {
    throw Error(ErrorKind::BadGeometry, "chroma planes must be quarter resolution");
  }
}

void StereoSequence::validate() const {
  if (left.empty()) throw Error(ErrorKind::BadGeometry, "sequence has no frames");
  if (right.size() != left.size() || depth_left.size() != left.size() || depth_right.size() != left.size()) {
    throw Error(ErrorKind::BadGeometry, "stream frame counts differ");
  }
  const int w = left.front().width();
  const int h = left.front().height();
  for (std::size_t i = 0; i < left.size(); ++i) {
    for (const Frame* f : {&left[i], &right[i]}) {
      f->validate();
      if (f->width() != w || f->height() != h) throw Error(ErrorKind::BadGeometry, "view geometry changes within sequence");
    }
    for (const DepthMap* d : {&depth_left[i], &depth_right[i]}) {
      if (d->width() != w || d->height() != h) throw Error(ErrorKind::BadGeometry, "depth map geometry differs from luma");
    }
  }
}

namespace {

std::vector<std::uint8_t> slurp(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(ErrorKind::MissingFile, path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::IoError, "read failed: " + path.string());
  return bytes;
}

std::size_t chunk_count(const fs::path& path, std::size_t file_size, std::size_t chunk, std::optional<std::size_t> max_frames) {
  if (file_size == 0 || file_size % chunk != 0) {
    throw Error(ErrorKind::TruncatedFrame, path.string() + ": " + std::to_string(file_size) +
                                               " bytes is not a positive multiple of " + std::to_string(chunk));
  }
  const std::size_t available = file_size / chunk;
  return max_frames ? std::min(*max_frames, available) : available;
}

Plane8 plane_from(const std::uint8_t* src, int width, int height) {
  return Plane8(width, height, std::vector<std::uint8_t>(src, src + static_cast<std::size_t>(width) * height));
}

void append(std::ofstream& out, const Plane8& p) {
  out.write(reinterpret_cast<const char*>(p.data().data()), static_cast<std::streamsize>(p.size()));
}

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open for writing: " + path.string());
  return out;
}

}  // namespace

std::vector<Frame> read_yuv_sequence(const fs::path& path, int width, int height, std::optional<std::size_t> max_frames) {
  check_frame_geometry(width, height);
  const auto bytes = slurp(path);
  const std::size_t frame_bytes = yuv420_frame_bytes(width, height);
  const std::size_t n = chunk_count(path, bytes.size(), frame_bytes, max_frames);
  const std::size_t luma = static_cast<std::size_t>(width) * height;

  std::vector<Frame> frames;
  frames.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* base = bytes.data() + i * frame_bytes;
    frames.push_back(Frame{plane_from(base, width, height), plane_from(base + luma, width / 2, height / 2),
                           plane_from(base + luma + luma / 4, width / 2, height / 2)});
  }
  return frames;
}

std::vector<DepthMap> read_depth_sequence(const fs::path& path, int width, int height, std::optional<std::size_t> max_frames) {
  check_frame_geometry(width, height);
  const auto bytes = slurp(path);
  const std::size_t chunk = static_cast<std::size_t>(width) * height;
  const std::size_t n = chunk_count(path, bytes.size(), chunk, max_frames);

  std::vector<DepthMap> maps;
  maps.reserve(n);
  for (std::size_t i = 0; i < n; ++i) maps.push_back(DepthMap{plane_from(bytes.data() + i * chunk, width, height)});
  return maps;
}

void write_yuv_sequence(const fs::path& path, const std::vector<Frame>& frames) {
  auto out = open_for_write(path);
  for (const auto& f : frames) {
    f.validate();
    append(out, f.y);
    append(out, f.u);
    append(out, f.v);
  }
  if (!out.flush()) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

void write_depth_sequence(const fs::path& path, const std::vector<DepthMap>& maps) {
  auto out = open_for_write(path);
  for (const auto& m : maps) append(out, m.d);
  if (!out.flush()) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

Manifest read_manifest(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(ErrorKind::MissingFile, path.string());
  std::ifstream in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, path.string() + ": " + e.what());
  }

  const fs::path base = path.parent_path();
  auto resolve = [&](const char* key) {
    fs::path p = j.at(key).get<std::string>();
    return p.is_absolute() ? p : base / p;
  };
  Manifest m;
  try {
    m.left = resolve("left");
    m.right = resolve("right");
    m.depth_left = resolve("depth_left");
    m.depth_right = resolve("depth_right");
    m.width = j.at("width").get<int>();
    m.height = j.at("height").get<int>();
    m.frame_count = j.at("frame_count").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, path.string() + ": " + e.what());
  }
  if (m.frame_count == 0) throw Error(ErrorKind::ConfigError, path.string() + ": frame_count must be positive");
  check_frame_geometry(m.width, m.height);
  return m;
}

void write_manifest(const fs::path& path, const Manifest& m) {
  nlohmann::ordered_json j;
  j["left"] = m.left.string();
  j["right"] = m.right.string();
  j["depth_left"] = m.depth_left.string();
  j["depth_right"] = m.depth_right.string();
  j["width"] = m.width;
  j["height"] = m.height;
  j["frame_count"] = m.frame_count;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
}

StereoSequence load_sequence(const Manifest& m) {
  StereoSequence seq;
  seq.left = read_yuv_sequence(m.left, m.width, m.height, m.frame_count);
  seq.right = read_yuv_sequence(m.right, m.width, m.height, m.frame_count);
  seq.depth_left = read_depth_sequence(m.depth_left, m.width, m.height, m.frame_count);
  seq.depth_right = read_depth_sequence(m.depth_right, m.width, m.height, m.frame_count);
  for (std::size_t n : {seq.left.size(), seq.right.size(), seq.depth_left.size(), seq.depth_right.size()}) {
    if (n != m.frame_count) {
      throw Error(ErrorKind::TruncatedFrame, "stream holds " + std::to_string(n) + " frames, manifest declares " +
                                                 std::to_string(m.frame_count));
    }
  }
  seq.validate();
  return seq;
}

fs::path save_sequence(const fs::path& dir, const std::string& stem, const StereoSequence& seq) {
  seq.validate();
  fs::create_directories(dir);
  Manifest m;
  m.left = stem + "_left.yuv";
  m.right = stem + "_right.yuv";
  m.depth_left = stem + "_depth_left.yuv";
  m.depth_right = stem + "_depth_right.yuv";
  m.width = seq.width();
  m.height = seq.height();
  m.frame_count = seq.frame_count();
  write_yuv_sequence(dir / m.left, seq.left);
  write_yuv_sequence(dir / m.right, seq.right);
  write_depth_sequence(dir / m.depth_left, seq.depth_left);
  write_depth_sequence(dir / m.depth_right, seq.depth_right);
  const fs::path manifest_path = dir / (stem + ".json");
  write_manifest(manifest_path, m);
  return manifest_path;
}

}  // namespace hv3d
