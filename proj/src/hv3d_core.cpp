#include "hv3d/hv3d_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include "hv3d/parallel.hpp"
#include "json.hpp"

namespace hv3d {

void WeightVector::validate() const {
  for (double v : {w1, w2, w3, w4}) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorKind::DegenerateWeights, "weights must be finite and non-negative");
  }
  if (w1 == 0.0 && w2 == 0.0 && w3 == 0.0 && w4 == 0.0) throw Error(ErrorKind::DegenerateWeights, "all weights are zero");
  if (!(beta > 0.0 && beta <= 1.0)) throw Error(ErrorKind::InvalidArgument, "beta must lie in (0, 1]");
}

WeightVector read_weights(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw Error(ErrorKind::MissingFile, path.string());
  std::ifstream in(path);
  WeightVector w;
  try {
    nlohmann::json j;
    in >> j;
    w.w1 = j.at("w1").get<double>();
    w.w2 = j.at("w2").get<double>();
    w.w3 = j.at("w3").get<double>();
    w.w4 = j.at("w4").get<double>();
    w.beta = j.value("beta", kDefaultBeta);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, path.string() + ": " + e.what());
  }
  w.calibrated = true;
  w.validate();
  return w;
}

std::string weights_json(const WeightVector& w) {
  nlohmann::ordered_json j;
  j["w1"] = w.w1;
  j["w2"] = w.w2;
  j["w3"] = w.w3;
  j["w4"] = w.w4;
  j["beta"] = w.beta;
  return j.dump(2) + "\n";
}

double view_quality(double vif_y, double vif_u, double vif_v, const WeightVector& w) {
  auto c = [](double v) { return std::clamp(v, 0.0, 1.0); };
  return w.w1 * c(vif_y) + w.w4 * c(vif_u) + w.w4 * c(vif_v);
}

double view_quality(const Frame& ref, const Frame& dist, const WeightVector& w, const VifParams& params) {
  if (!ref.y.same_shape(dist.y)) throw Error(ErrorKind::DimensionMismatch, "view_quality: frames differ in size");
  return view_quality(vif(ref.y, dist.y, params), vif(ref.u, dist.u, params), vif(ref.v, dist.v, params), w);
}

double hv3d_max(const WeightVector& w, double depth_weight_factor) {
  const double m = 2.0 * w.w1 + 4.0 * w.w4 + w.w2 + w.w3 * depth_weight_factor;
  if (!(m > 0.0)) throw Error(ErrorKind::DegenerateWeights, "normalizer is not positive");
  return m;
}

double cyclopean_term(const FrameComponents& c, double beta) {
  return std::pow(std::clamp(c.depth_fidelity, 0.0, 1.0), beta) * c.cyclopean_ssim;
}

double depth_term(const FrameComponents& c, double beta) { return combine_depth(c.depth_fidelity, c.depth_factor, beta); }

namespace {

void check_aligned(const StereoSequence& ref, const StereoSequence& dist) {
  ref.validate();
  dist.validate();
  if (ref.width() != dist.width() || ref.height() != dist.height()) {
    throw Error(ErrorKind::DimensionMismatch, "reference and distorted geometry differ");
  }
  if (ref.frame_count() != dist.frame_count()) {
    throw Error(ErrorKind::DimensionMismatch, "reference and distorted frame counts differ");
  }
}

const CsfMask& shared_mask() {
  static const CsfMask mask = build_csf_mask();
  return mask;
}

}  // namespace

FrameComponents frame_components(const StereoSequence& ref, const StereoSequence& dist, std::size_t i,
                                 const ScoreParams& params) {
  const Frame& rl = ref.left.at(i);
  const Frame& rr = ref.right.at(i);
  const Frame& dl = dist.left.at(i);
  const Frame& dr = dist.right.at(i);
  if (!rl.y.same_shape(dl.y) || !rr.y.same_shape(dr.y)) throw Error(ErrorKind::DimensionMismatch, "frame geometry differs");

  auto clamped = [&](const Plane8& a, const Plane8& b) { return std::clamp(vif(a, b, params.vif), 0.0, 1.0); };

  FrameComponents c;
  const double raw_y_l = vif(rl.y, dl.y, params.vif);
  const double raw_y_r = vif(rr.y, dr.y, params.vif);
  c.vif_y_l = std::clamp(raw_y_l, 0.0, 1.0);
  c.vif_u_l = clamped(rl.u, dl.u);
  c.vif_v_l = clamped(rl.v, dl.v);
  c.vif_y_r = std::clamp(raw_y_r, 0.0, 1.0);
  c.vif_u_r = clamped(rr.u, dr.u);
  c.vif_v_r = clamped(rr.v, dr.v);

  c.depth_fidelity = 0.5 * (depth_fidelity(ref.depth_left.at(i), dist.depth_left.at(i), params.vif) +
                            depth_fidelity(ref.depth_right.at(i), dist.depth_right.at(i), params.vif));
  c.depth_factor = 0.5 * (depth_weight_factor(local_variance_weights(ref.depth_left.at(i))) +
                          depth_weight_factor(local_variance_weights(ref.depth_right.at(i))));

  const DisparityField field = match_blocks(rl.y, rr.y, params.cyclopean.search_range);
  const auto ssims = cyclopean_block_ssims(rl.y, rr.y, dl.y, dr.y, field, shared_mask(), params.cyclopean.ssim);
  c.cyclopean_ssim = combine_cyclopean(1.0, ssims, 1.0);

  if (params.baselines) {
    const PlaneD ryl = plane_cast<double>(rl.y), dyl = plane_cast<double>(dl.y);
    const PlaneD ryr = plane_cast<double>(rr.y), dyr = plane_cast<double>(dr.y);
    Baselines& b = c.baselines;
    b.psnr_l = psnr(ryl, dyl);
    b.psnr_r = psnr(ryr, dyr);
    b.ssim_l = ssim(ryl, dyl, params.ssim);
    b.ssim_r = ssim(ryr, dyr, params.ssim);
    b.msssim_l = ms_ssim(ryl, dyl, params.ssim);
    b.msssim_r = ms_ssim(ryr, dyr, params.ssim);
    b.vifp_l = raw_y_l;
    b.vifp_r = raw_y_r;
  }
  return c;
}

std::vector<FrameComponents> score_components(const StereoSequence& ref, const StereoSequence& dist,
                                              const ScoreParams& params) {
  check_aligned(ref, dist);
  std::vector<FrameComponents> out(ref.frame_count());
  const std::size_t workers = params.workers == 0 ? worker_count() : params.workers;
  parallel_for(out.size(), workers, [&](std::size_t i) { out[i] = frame_components(ref, dist, i, params); });
  return out;
}

FrameScores combine_frame(const FrameComponents& c, const WeightVector& w) {
  FrameScores s;
  s.q_left = view_quality(c.vif_y_l, c.vif_u_l, c.vif_v_l, w);
  s.q_right = view_quality(c.vif_y_r, c.vif_u_r, c.vif_v_r, w);
  s.q_rl = cyclopean_term(c, w.beta);
  s.q_d = depth_term(c, w.beta);
  s.hv3d_max = hv3d_max(w, c.depth_factor);
  s.numerator = s.q_left + s.q_right + w.w2 * s.q_rl + w.w3 * s.q_d;
  s.hv3d = s.numerator / s.hv3d_max;
  s.baselines = c.baselines;
  return s;
}

MetricReport assemble_report(const std::vector<FrameComponents>& components, const WeightVector& w, bool has_baselines) {
  w.validate();
  if (components.empty()) throw Error(ErrorKind::InvalidArgument, "no frames to score");
  MetricReport report;
  report.weights = w;
  report.has_baselines = has_baselines;
  report.frames.reserve(components.size());
  for (const auto& c : components) report.frames.push_back(combine_frame(c, w));

  FrameScores& p = report.pooled;
  for (const auto& f : report.frames) {
    p.q_left += f.q_left;
    p.q_right += f.q_right;
    p.q_rl += f.q_rl;
    p.q_d += f.q_d;
    p.hv3d_max += f.hv3d_max;
    p.numerator += f.numerator;
    p.hv3d += f.hv3d;
    p.baselines.psnr_l += f.baselines.psnr_l;
    p.baselines.psnr_r += f.baselines.psnr_r;
    p.baselines.ssim_l += f.baselines.ssim_l;
    p.baselines.ssim_r += f.baselines.ssim_r;
    p.baselines.msssim_l += f.baselines.msssim_l;
    p.baselines.msssim_r += f.baselines.msssim_r;
    p.baselines.vifp_l += f.baselines.vifp_l;
    p.baselines.vifp_r += f.baselines.vifp_r;
  }
  const auto n = static_cast<double>(report.frames.size());
  for (double* v : {&p.q_left, &p.q_right, &p.q_rl, &p.q_d, &p.hv3d_max, &p.numerator, &p.hv3d, &p.baselines.psnr_l,
                    &p.baselines.psnr_r, &p.baselines.ssim_l, &p.baselines.ssim_r, &p.baselines.msssim_l,
                    &p.baselines.msssim_r, &p.baselines.vifp_l, &p.baselines.vifp_r}) {
    *v /= n;
  }
  return report;
}

MetricReport hv3d_score(const StereoSequence& ref, const StereoSequence& dist, const WeightVector& w,
                        const ScoreParams& params) {
  w.validate();
  return assemble_report(score_components(ref, dist, params), w, params.baselines);
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  // Avoid "-0.000000" so identical scores print identically.
  if (std::string_view(buf) == "-0.000000") return "0.000000";
  return buf;
}

void write_report_csv(std::ostream& out, const MetricReport& report) {
  out << "frame,q_left,q_right,q_rl,q_d,hv3d_max,hv3d,psnr_l,psnr_r,ssim_l,ssim_r,msssim_l,msssim_r,vifp_l,vifp_r\n";
  auto row = [&](const std::string& label, const FrameScores& f) {
    out << label;
    for (double v : {f.q_left, f.q_right, f.q_rl, f.q_d, f.hv3d_max, f.hv3d}) out << ',' << format_number(v);
    const Baselines& b = f.baselines;
    for (double v : {b.psnr_l, b.psnr_r, b.ssim_l, b.ssim_r, b.msssim_l, b.msssim_r, b.vifp_l, b.vifp_r}) {
      out << ',' << (report.has_baselines ? format_number(v) : std::string());
    }
    out << '\n';
  };
  for (std::size_t i = 0; i < report.frames.size(); ++i) row(std::to_string(i), report.frames[i]);
  row("pooled", report.pooled);
}

}  // namespace hv3d
