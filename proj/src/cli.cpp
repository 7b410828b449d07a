#include "hv3d/cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hv3d/calibration.hpp"
#include "hv3d/distort.hpp"
#include "hv3d/hv3d_core.hpp"
#include "hv3d/video_io.hpp"

namespace hv3d {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string manifest_ref;
  std::string manifest_dist;
  std::string weights_path;
  std::optional<double> beta;
  int search_range = kDefaultSearchRange;
  std::string out;
  std::string curve_out;
  std::string mos_csv;
  std::string mos_scale = "unit";
  std::uint64_t seed = 0;
  std::string kind;
  double level = 1.0;
  std::string stem = "distorted";
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingFile:
    case ErrorKind::TruncatedFrame:
    case ErrorKind::IoError:
      return kExitIo;
    case ErrorKind::PlaneTooSmall:
    case ErrorKind::ZeroVariance:
      return kExitCompute;
    default:
      return kExitConfig;
  }
}

// Writes only once the whole payload exists so a failed run leaves no file behind.
void emit(const std::string& path, const std::string& payload, std::ostream& out) {
  if (path.empty()) {
    out << payload;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorKind::IoError, "cannot open for writing: " + path);
  file << payload;
  if (!file.flush()) throw Error(ErrorKind::IoError, "write failed: " + path);
}

WeightVector resolve_weights(const RunConfig& cfg, std::ostream& err) {
  WeightVector w;
  if (!cfg.weights_path.empty()) {
    w = read_weights(cfg.weights_path);
  } else {
    err << "note: scoring with uncalibrated default weights (run `hv3d calibrate` to fit them)\n";
  }
  if (cfg.beta) w.beta = *cfg.beta;
  w.validate();
  return w;
}

std::pair<StereoSequence, StereoSequence> load_pair(const RunConfig& cfg) {
  const Manifest ref = read_manifest(cfg.manifest_ref);
  const Manifest dist = read_manifest(cfg.manifest_dist);
  if (ref.width != dist.width || ref.height != dist.height || ref.frame_count != dist.frame_count) {
    throw Error(ErrorKind::DimensionMismatch, "reference and distorted manifests disagree on geometry or frame count");
  }
  return {load_sequence(ref), load_sequence(dist)};
}

ScoreParams score_params(const RunConfig& cfg) {
  if (cfg.search_range < 0) throw Error(ErrorKind::ConfigError, "--search-range must be non-negative");
  ScoreParams p;
  p.cyclopean.search_range = cfg.search_range;
  return p;
}

int cmd_score(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const WeightVector w = resolve_weights(cfg, err);
  const ScoreParams params = score_params(cfg);
  const auto [ref, dist] = load_pair(cfg);
  const MetricReport report = hv3d_score(ref, dist, w, params);
  std::ostringstream csv;
  write_report_csv(csv, report);
  emit(cfg.out, csv.str(), out);
  return kExitOk;
}

int cmd_baselines(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const ScoreParams params = score_params(cfg);
  const auto [ref, dist] = load_pair(cfg);
  const MetricReport report = assemble_report(score_components(ref, dist, params), WeightVector{}, true);
  std::ostringstream csv;
  csv << "frame,psnr_l,psnr_r,ssim_l,ssim_r,msssim_l,msssim_r,vifp_l,vifp_r\n";
  auto row = [&](const std::string& label, const Baselines& b) {
    csv << label;
    for (double v : {b.psnr_l, b.psnr_r, b.ssim_l, b.ssim_r, b.msssim_l, b.msssim_r, b.vifp_l, b.vifp_r}) {
      csv << ',' << format_number(v);
    }
    csv << '\n';
  };
  for (std::size_t i = 0; i < report.frames.size(); ++i) row(std::to_string(i), report.frames[i].baselines);
  row("pooled", report.pooled.baselines);
  emit(cfg.out, csv.str(), out);
  return kExitOk;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  }
};

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

CsvTable read_csv(const std::string& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(ErrorKind::MissingFile, path);
  std::ifstream in(path);
  CsvTable table;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!l.empty() && l.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (table.header.empty()) {
      table.header = split(line);
      for (auto& h : table.header) h = lower(h);
      continue;
    }
    auto cells = split(line);
    if (cells.size() != table.header.size()) {
      throw Error(ErrorKind::ConfigError, path + ": row has " + std::to_string(cells.size()) + " cells, header has " +
                                              std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) throw Error(ErrorKind::ConfigError, path + ": empty CSV");
  return table;
}

double parse_number(const std::string& text, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigError, where + ": not a number: '" + text + "'");
  }
}

double normalize_mos(double mos, const RunConfig& cfg) {
  if (cfg.mos_scale == "1-10") return normalize_mos_1_to_10(mos);
  return mos;
}

int cmd_calibrate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.beta && !(*cfg.beta > 0.0 && *cfg.beta <= 1.0)) throw Error(ErrorKind::ConfigError, "--beta must lie in (0, 1]");
  const double beta = cfg.beta.value_or(kDefaultBeta);
  const CsvTable table = read_csv(cfg.mos_csv);
  const auto mos_col = table.column("mos");
  if (!mos_col) throw Error(ErrorKind::ConfigError, cfg.mos_csv + ": missing 'mos' column");

  std::vector<FeatureRow> rows;
  const auto fl = table.column("f_luma"), fc = table.column("f_chroma"), fy = table.column("f_cyclopean"),
             fd = table.column("f_depth");
  const auto mr = table.column("ref_manifest"), md = table.column("dist_manifest");
  if (fl && fc && fy && fd) {
    for (const auto& r : table.rows) {
      FeatureRow row;
      row.f_luma = parse_number(r[*fl], cfg.mos_csv);
      row.f_chroma = parse_number(r[*fc], cfg.mos_csv);
      row.f_cyclopean = parse_number(r[*fy], cfg.mos_csv);
      row.f_depth = parse_number(r[*fd], cfg.mos_csv);
      row.mos = normalize_mos(parse_number(r[*mos_col], cfg.mos_csv), cfg);
      rows.push_back(row);
    }
  } else if (mr && md) {
    if (table.rows.size() < 4) throw Error(ErrorKind::TooFewRows, "need at least 4 rows");
    const fs::path base = fs::path(cfg.mos_csv).parent_path();
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
    ScoreParams params = score_params(cfg);
    for (const auto& r : table.rows) {
      const Manifest ref_m = read_manifest(resolve(r[*mr]));
      const Manifest dist_m = read_manifest(resolve(r[*md]));
      FeatureRow row = extract_features(load_sequence(ref_m), load_sequence(dist_m), params, beta);
      row.mos = normalize_mos(parse_number(r[*mos_col], cfg.mos_csv), cfg);
      rows.push_back(row);
    }
  } else {
    throw Error(ErrorKind::ConfigError,
                cfg.mos_csv + ": expected columns f_luma,f_chroma,f_cyclopean,f_depth,mos or ref_manifest,dist_manifest,mos");
  }

  const WeightFit fit = fit_weights_detailed(rows, beta);
  emit(cfg.out, weights_json(fit.weights), out);
  err << "fitted w1=" << format_number(fit.weights.w1) << " w2=" << format_number(fit.weights.w2)
      << " w3=" << format_number(fit.weights.w3) << " w4=" << format_number(fit.weights.w4)
      << " residual_rms=" << format_number(fit.residual_rms) << '\n';
  return kExitOk;
}

struct MetricColumn {
  const char* label;
  std::vector<const char*> aliases;
};

const std::vector<MetricColumn>& evaluation_rows() {
  static const std::vector<MetricColumn> rows = {
      {"PSNR", {"psnr"}},       {"SSIM", {"ssim"}},
      {"VQM", {"vqm"}},         {"VIFp", {"vifp", "vif"}},
      {"MS-SSIM", {"ms-ssim", "ms_ssim", "msssim"}}, {"HV3D", {"hv3d"}},
  };
  return rows;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const CsvTable table = read_csv(cfg.mos_csv);
  const auto mos_col = table.column("mos");
  if (!mos_col) throw Error(ErrorKind::ConfigError, cfg.mos_csv + ": missing 'mos' column");
  if (table.rows.size() < 5) throw Error(ErrorKind::ConfigError, cfg.mos_csv + ": need at least 5 rows");

  std::vector<double> mos;
  for (const auto& r : table.rows) mos.push_back(normalize_mos(parse_number(r[*mos_col], cfg.mos_csv), cfg));

  std::ostringstream summary;
  std::ostringstream curves;
  summary << "metric,scc,pcc,pcc_logistic\n";
  curves << "metric,score,mos,fitted_mos\n";
  int found = 0;
  for (const auto& m : evaluation_rows()) {
    std::optional<std::size_t> col;
    for (const char* alias : m.aliases) {
      if ((col = table.column(alias))) break;
    }
    if (!col) continue;
    ++found;
    std::vector<double> scores;
    for (const auto& r : table.rows) {
      const double v = parse_number(r[*col], cfg.mos_csv);
      if (!std::isfinite(v)) throw Error(ErrorKind::ConfigError, std::string(m.label) + ": non-finite score");
      scores.push_back(v);
    }
    const double scc = spearman(scores, mos);
    const double pcc = pearson(scores, mos);
    const LogisticFit fit = logistic_fit(scores, mos);
    std::vector<double> fitted;
    for (double s : scores) fitted.push_back(fit.predict(s));
    const double pcc_fit = pearson(fitted, mos);
    summary << m.label << ',' << format_number(scc) << ',' << format_number(pcc) << ',' << format_number(pcc_fit) << '\n';

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    for (std::size_t i : order) {
      curves << m.label << ',' << format_number(scores[i]) << ',' << format_number(mos[i]) << ','
             << format_number(fitted[i]) << '\n';
    }
  }
  if (found == 0) throw Error(ErrorKind::ConfigError, cfg.mos_csv + ": no known metric columns");

  std::string curve_path = cfg.curve_out;
  if (curve_path.empty() && !cfg.out.empty()) {
    const fs::path o(cfg.out);
    curve_path = (o.parent_path() / (o.stem().string() + "_curves.csv")).string();
  }
  if (cfg.out.empty() && curve_path.empty()) {
    out << summary.str() << '\n' << curves.str();
    return kExitOk;
  }
  emit(cfg.out, summary.str(), out);
  emit(curve_path, curves.str(), out);
  return kExitOk;
}

int cmd_distort(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  DistortionSpec spec;
  spec.kind = parse_distortion_kind(cfg.kind);
  spec.level = cfg.level;
  spec.seed = cfg.seed;
  if (!(spec.level > 0.0)) throw Error(ErrorKind::ConfigError, "--level must be positive");
  if (cfg.out.empty()) throw Error(ErrorKind::ConfigError, "--out directory is required");
  const StereoSequence ref = load_sequence(read_manifest(cfg.manifest_ref));
  const StereoSequence dist = apply_distortion(ref, spec);
  const fs::path manifest = save_sequence(cfg.out, cfg.stem, dist);
  out << manifest.string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Full-reference stereoscopic video quality toolkit"};
  app.require_subcommand(1);

  auto add_pair = [&](CLI::App* sub) {
    sub->add_option("--manifest-ref", cfg.manifest_ref, "Reference sequence manifest (JSON)")->required();
    sub->add_option("--manifest-dist", cfg.manifest_dist, "Distorted sequence manifest (JSON)")->required();
    sub->add_option("--search-range", cfg.search_range, "Horizontal block-matching range in pixels");
    sub->add_option("--out", cfg.out, "Output CSV path (stdout when omitted)");
  };

  auto* score = app.add_subcommand("score", "Score a distorted stereo sequence against its reference");
  add_pair(score);
  score->add_option("--weights", cfg.weights_path, "Weights JSON from `calibrate`");
  score->add_option("--beta", cfg.beta, "Depth-fidelity exponent override");

  auto* baselines = app.add_subcommand("baselines", "Per-view PSNR, SSIM, MS-SSIM and VIFp");
  add_pair(baselines);

  auto* calibrate = app.add_subcommand("calibrate", "Fit weights to mean opinion scores");
  calibrate->add_option("--mos-csv", cfg.mos_csv, "Feature or manifest CSV with a mos column")->required();
  calibrate->add_option("--out", cfg.out, "Weights JSON output path");
  calibrate->add_option("--beta", cfg.beta, "Depth-fidelity exponent");
  calibrate->add_option("--mos-scale", cfg.mos_scale, "unit (already in [0,1]) or 1-10")
      ->check(CLI::IsMember({"unit", "1-10"}));
  calibrate->add_option("--search-range", cfg.search_range, "Block-matching range for manifest input");

  auto* evaluate = app.add_subcommand("evaluate", "Correlation table and logistic-fit curves against MOS");
  evaluate->add_option("--mos-csv", cfg.mos_csv, "CSV with a mos column and one column per metric")->required();
  evaluate->add_option("--out", cfg.out, "Correlation table CSV");
  evaluate->add_option("--curve-out", cfg.curve_out, "Fitted point series CSV (default: <out>_curves.csv)");
  evaluate->add_option("--mos-scale", cfg.mos_scale, "unit (already in [0,1]) or 1-10")
      ->check(CLI::IsMember({"unit", "1-10"}));

  auto* distort = app.add_subcommand("distort", "Write a synthetically degraded copy of a sequence");
  distort->add_option("--manifest-ref", cfg.manifest_ref, "Source sequence manifest")->required();
  distort->add_option("--kind", cfg.kind, "gaussian_noise | gaussian_blur | dct_quantize | depth_noise")->required();
  distort->add_option("--level", cfg.level, "Distortion strength")->required();
  distort->add_option("--seed", cfg.seed, "Noise seed");
  distort->add_option("--out", cfg.out, "Output directory")->required();
  distort->add_option("--stem", cfg.stem, "Output file stem");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*score) return cmd_score(cfg, out, err);
    if (*baselines) return cmd_baselines(cfg, out, err);
    if (*calibrate) return cmd_calibrate(cfg, out, err);
    if (*evaluate) return cmd_evaluate(cfg, out, err);
    if (*distort) return cmd_distort(cfg, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCompute;
  }
  return kExitConfig;
}

}  // namespace hv3d
