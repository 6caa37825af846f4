#include "miscal/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "miscal/csv.hpp"
#include "miscal/png_io.hpp"
#include "miscal/rng.hpp"

namespace miscal {

namespace {

using nlohmann::json;

json crop_to_json(const CropRect& c) { return {{"x", c.x}, {"y", c.y}, {"w", c.w}, {"h", c.h}}; }

CropRect crop_from_json(const json& j) {
  return {j.at("x").get<int>(), j.at("y").get<int>(), j.at("w").get<int>(), j.at("h").get<int>()};
}

SampleStatus status_from(const std::string& s) {
  if (s == "ok") return SampleStatus::Ok;
  if (s == "rejected_no_rect") return SampleStatus::RejectedNoRect;
  if (s == "rejected_degenerate") return SampleStatus::RejectedDegenerate;
  throw Error(ErrorCode::InvalidConfig, "unknown sample status '" + s + "'");
}

double raw_aspect(const StereoCalibration& calib) {
  const ImageSize size = calib.image_size();
  return static_cast<double>(size.width) / size.height;
}

std::string image_name(int id, const char* side) {
  std::ostringstream name;
  name << "images/" << std::setw(6) << std::setfill('0') << id << '_' << side << ".png";
  return name.str();
}

// Raw renders are shared by every sample that uses the same scene.
class SceneCache {
 public:
  SceneCache(const PipelineConfig& cfg)
      : cfg_(cfg),
        flags_(std::make_unique<std::once_flag[]>(static_cast<std::size_t>(cfg.scene.n_scenes))),
        renders_(static_cast<std::size_t>(cfg.scene.n_scenes)) {}

  const std::pair<ImageF, ImageF>& get(int scene) {
    const auto k = static_cast<std::size_t>(scene);
    std::call_once(flags_[k], [&] {
      renders_[k] = render_raw_pair(cfg_.base_seed + k, cfg_.scene, cfg_.calibration);
    });
    return renders_[k];
  }

 private:
  const PipelineConfig& cfg_;
  std::unique_ptr<std::once_flag[]> flags_;
  std::vector<std::pair<ImageF, ImageF>> renders_;
};

SampleRecord make_sample(const PipelineConfig& cfg, const GenerateOptions& options,
                         double delta_thr, SceneCache& scenes, int id) {
  SampleRecord rec;
  rec.id = id;
  rec.seed = cfg.base_seed + static_cast<std::uint64_t>(id);
  rec.disturbance = options.fixed_disturbance.value_or(
      sample_disturbance(rec.seed, MiscalThreshold{cfg.d_thr}));
  rec.delta_thr = delta_thr;
  if (options.train_fraction) {
    const double u = static_cast<double>(mix64(rec.seed ^ 0x5B117ULL) >> 11) * 0x1.0p-53;
    rec.split = u < *options.train_fraction ? "train" : "test";
  }

  Rectification rect;
  try {
    rect = stereo_rectify(disturb_calibration(cfg.calibration, rec.disturbance));
    const WodeResult w = wode_normalized(cfg.calibration, rec.disturbance, delta_thr);
    rec.wode = w.delta;
    rec.wode_normalized = w.delta_norm;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateBaseline) throw;
    rec.status = SampleStatus::RejectedDegenerate;
    return rec;
  }

  const auto& [raw_l, raw_r] = scenes.get(id % cfg.scene.n_scenes);
  ProcessedPair pair;
  try {
    // Raw frames come from the physical (true) rig; only the rectification
    // is computed from the disturbed calibration.
    pair = process_pair(cfg.calibration, rect, raw_l, raw_r, cfg.crop_mode);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoValidRect) throw;
    rec.status = SampleStatus::RejectedNoRect;
    return rec;
  }
  rec.crop = pair.crop_left;
  if (cfg.crop_mode == CropMode::PerImage) rec.crop_right = pair.crop_right;
  rec.left_path = image_name(id, "left");
  rec.right_path = image_name(id, "right");
  write_png_gray8(cfg.output_dir / rec.left_path, pair.left);
  write_png_gray8(cfg.output_dir / rec.right_path, pair.right);
  return rec;
}

}  // namespace

const char* to_string(SampleStatus status) {
  switch (status) {
    case SampleStatus::Ok: return "ok";
    case SampleStatus::RejectedNoRect: return "rejected_no_rect";
    case SampleStatus::RejectedDegenerate: return "rejected_degenerate";
  }
  return "ok";
}

json record_to_json(const SampleRecord& r) {
  json j = {{"id", r.id},
            {"seed", r.seed},
            {"disturbance", std::vector<double>(r.disturbance.d.data(), r.disturbance.d.data() + 6)},
            {"wode", r.wode},
            {"wode_normalized", r.wode_normalized},
            {"delta_thr", r.delta_thr},
            {"left_path", r.left_path},
            {"right_path", r.right_path},
            {"crop", crop_to_json(r.crop)},
            {"status", to_string(r.status)}};
  if (r.crop_right) j["crop_right"] = crop_to_json(*r.crop_right);
  if (r.split) j["split"] = *r.split;
  return j;
}

SampleRecord record_from_json(const json& j) {
  try {
    SampleRecord r;
    r.id = j.at("id").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    const auto d = j.at("disturbance").get<std::vector<double>>();
    if (d.size() != 6) throw Error(ErrorCode::InvalidConfig, "disturbance must have 6 entries");
    for (int i = 0; i < 6; ++i) r.disturbance.d(i) = d[static_cast<std::size_t>(i)];
    r.wode = j.at("wode").get<double>();
    r.wode_normalized = j.at("wode_normalized").get<double>();
    r.delta_thr = j.at("delta_thr").get<double>();
    r.left_path = j.at("left_path").get<std::string>();
    r.right_path = j.at("right_path").get<std::string>();
    r.crop = crop_from_json(j.at("crop"));
    if (j.contains("crop_right")) r.crop_right = crop_from_json(j.at("crop_right"));
    r.status = status_from(j.at("status").get<std::string>());
    if (j.contains("split")) r.split = j.at("split").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("manifest record: ") + e.what());
  }
}

std::vector<SampleRecord> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open manifest " + path.string());
  std::vector<SampleRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
    }
  }
  return records;
}

ProcessedPair process_pair(const StereoCalibration& calib, const Rectification& rect,
                           const ImageF& raw_left, const ImageF& raw_right, CropMode mode) {
  const ImageSize size = calib.image_size();
  ProcessedPair out;
  std::tie(out.rectified_left, out.mask_left) =
      remap_bilinear(raw_left, build_map(calib, rect, Side::Left), size);
  std::tie(out.rectified_right, out.mask_right) =
      remap_bilinear(raw_right, build_map(calib, rect, Side::Right), size);
  const double aspect = raw_aspect(calib);
  if (mode == CropMode::Joint) {
    out.crop_left = out.crop_right = joint_crop(out.mask_left, out.mask_right, aspect);
  } else {
    out.crop_left = largest_aspect_rect(out.mask_left, aspect);
    out.crop_right = largest_aspect_rect(out.mask_right, aspect);
  }
  out.left = crop_resize(out.rectified_left, out.crop_left, size);
  out.right = crop_resize(out.rectified_right, out.crop_right, size);
  return out;
}

std::vector<SampleRecord> generate_dataset(const PipelineConfig& cfg,
                                           const GenerateOptions& options) {
  cfg.validate();
  if (options.train_fraction && !(*options.train_fraction >= 0.0 && *options.train_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "split fraction must lie in [0, 1]");
  }
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir / "images", ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + cfg.output_dir.string() + ": " + ec.message());

  const double delta_thr = wode_threshold(cfg.calibration, MiscalThreshold{cfg.d_thr});
  SceneCache scenes(cfg);
  std::vector<SampleRecord> records(static_cast<std::size_t>(cfg.n_samples));

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (int id = next++; id < cfg.n_samples; id = next++) {
      try {
        records[static_cast<std::size_t>(id)] = make_sample(cfg, options, delta_thr, scenes, id);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cfg.n_samples;
      }
    }
  };
  const int jobs = std::max(1, std::min(options.jobs, cfg.n_samples));
  {
    std::vector<std::jthread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  const std::filesystem::path manifest = cfg.output_dir / "manifest.jsonl";
  std::ofstream out(manifest, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + manifest.string());
  for (const SampleRecord& r : records) out << record_to_json(r).dump() << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + manifest.string());
  return records;
}

SweepRow evaluate_disturbance(const StereoCalibration& calib,
                              const std::vector<Point3<double>>& points, const Disturbance& d) {
  SweepRow row;
  Rectification rect;
  try {
    rect = stereo_rectify(disturb_calibration(calib, d));
    row.wode = wode(calib, d);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateBaseline) throw;
    row.wode = row.e_epi = std::numeric_limits<double>::quiet_NaN();
    row.status = "degenerate_baseline";
    return row;
  }

  const ImageSize size = calib.image_size();
  CropRect window{0, 0, size.width, size.height};
  try {
    window = joint_crop(validity_from_map(build_map(calib, rect, Side::Left), size),
                        validity_from_map(build_map(calib, rect, Side::Right), size),
                        raw_aspect(calib));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoValidRect) throw;
    row.status = "no_valid_rect";
  }
  const std::vector<Correspondence> matches = project_correspondences(points, calib, rect, window);
  row.n_visible = static_cast<int>(matches.size());
  if (matches.empty()) {
    row.e_epi = std::numeric_limits<double>::quiet_NaN();
    row.status = "no_matches";
  } else {
    row.e_epi = epipolar_error(matches);
  }
  return row;
}

std::vector<SweepRow> sweep(const PipelineConfig& cfg, Dof dof, double d_max, int steps) {
  if (steps < 2) throw Error(ErrorCode::InvalidConfig, "sweep needs at least 2 steps");
  if (!std::isfinite(d_max)) throw Error(ErrorCode::InvalidConfig, "sweep range must be finite");
  const std::vector<Point3<double>> points = generate_points(cfg.base_seed, cfg.scene);
  std::vector<SweepRow> rows;
  for (int k = 0; k < steps; ++k) {
    const double d = d_max * k / (steps - 1);
    SweepRow row = evaluate_disturbance(cfg.calibration, points, Disturbance::single(dof, d));
    row.d = d;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "d,wode,e_epi,n_visible,status\n";
  for (const SweepRow& r : rows) {
    out << format_number(r.d) << ',' << format_number(r.wode) << ',' << format_number(r.e_epi)
        << ',' << r.n_visible << ',' << r.status << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

EpiReport eval_epi(const StereoCalibration& calib, const Disturbance& d,
                   const std::vector<PixelMatch>& matches, bool already_rectified) {
  if (already_rectified) {
    return {epipolar_error(matches), static_cast<int>(matches.size()), 0};
  }
  const StereoCalibration disturbed = disturb_calibration(calib, d);
  const Rectification rect = stereo_rectify(disturbed);
  std::vector<PixelMatch> mapped;
  EpiReport report;
  for (const PixelMatch& m : matches) {
    try {
      mapped.push_back({map_point_forward(disturbed, rect, Side::Left, m.left),
                        map_point_forward(disturbed, rect, Side::Right, m.right)});
    } catch (const Error&) {
      ++report.n_dropped;
    }
  }
  report.e_epi = epipolar_error(mapped);
  report.n_used = static_cast<int>(mapped.size());
  return report;
}

CorrelationReport correlate(const std::filesystem::path& manifest_path,
                            const std::filesystem::path& predictions_path) {
  std::map<int, double> truth;
  for (const SampleRecord& r : read_manifest(manifest_path)) {
    if (r.status == SampleStatus::Ok) truth[r.id] = r.wode_normalized;
  }
  const CsvTable table = read_csv(predictions_path);
  const std::size_t id_col = table.column("id"), pred_col = table.column("pred");

  std::vector<double> pred, label;
  std::vector<std::string> missing;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const int id = static_cast<int>(table.number(r, id_col));
    const auto it = truth.find(id);
    if (it == truth.end()) {
      missing.push_back(std::to_string(id));
      continue;
    }
    pred.push_back(table.number(r, pred_col));
    label.push_back(it->second);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) list += (i ? "," : "") + missing[i];
    throw Error(ErrorCode::MissingIds, std::to_string(missing.size()) +
                                           " prediction id(s) without an ok manifest record: " + list);
  }

  CorrelationReport report;
  report.n = static_cast<int>(pred.size());
  const SpearmanResult s = spearman(pred, label);
  report.rho = s.rho;
  report.p = s.p;
  Eigen::Map<const Eigen::ArrayXd> p(pred.data(), report.n), t(label.data(), report.n);
  const Eigen::ArrayXd residual = p - t;
  report.sigma = std::sqrt((residual - residual.mean()).square().sum() / (report.n - 1));
  return report;
}

Disturbance parse_disturbance(const std::string& text) {
  Disturbance d;
  std::size_t start = 0;
  for (int i = 0; i < 6; ++i) {
    const std::size_t comma = text.find(',', start);
    if ((i < 5) == (comma == std::string::npos)) {
      throw Error(ErrorCode::InvalidConfig, "disturbance must be six comma-separated numbers");
    }
    d.d(i) = parse_number(std::string_view(text).substr(start, comma == std::string::npos
                                                                    ? std::string::npos
                                                                    : comma - start));
    start = comma + 1;
  }
  if (!d.d.allFinite()) throw Error(ErrorCode::InvalidConfig, "disturbance must be finite");
  return d;
}

}  // namespace miscal
