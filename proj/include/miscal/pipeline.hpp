#ifndef MISCAL_PIPELINE_HPP
#define MISCAL_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "miscal/config.hpp"
#include "miscal/metrics.hpp"

namespace miscal {

enum class SampleStatus { Ok, RejectedNoRect, RejectedDegenerate };

[[nodiscard]] const char* to_string(SampleStatus status);

/// One manifest line. Image paths are relative to the dataset directory and
/// empty for rejected samples.
struct SampleRecord {
  int id = 0;
  std::uint64_t seed = 0;
  Disturbance disturbance;
  double wode = 0.0;
  double wode_normalized = 0.0;
  double delta_thr = 0.0;
  std::string left_path;
  std::string right_path;
  CropRect crop;
  std::optional<CropRect> crop_right;  // per-image crop mode only
  SampleStatus status = SampleStatus::Ok;
  std::optional<std::string> split;    // "train" / "test" when requested
};

[[nodiscard]] nlohmann::json record_to_json(const SampleRecord& r);
[[nodiscard]] SampleRecord record_from_json(const nlohmann::json& j);

/// Reads manifest.jsonl (one record per line). Throws IoError / InvalidConfig.
[[nodiscard]] std::vector<SampleRecord> read_manifest(const std::filesystem::path& path);

/// Rectified, cropped and resized stereo pair plus the intermediate products.
struct ProcessedPair {
  ImageF rectified_left;
  ImageF rectified_right;
  ValidityMask mask_left;
  ValidityMask mask_right;
  CropRect crop_left;
  CropRect crop_right;
  ImageF left;
  ImageF right;
};

/// Rectifies raw images of the physical rig `calib` with `rect`, finds the
/// crop (shared or per image) and resizes back to the raw size. Throws
/// NoValidRect.
[[nodiscard]] ProcessedPair process_pair(const StereoCalibration& calib, const Rectification& rect,
                                         const ImageF& raw_left, const ImageF& raw_right,
                                         CropMode mode);

struct GenerateOptions {
  int jobs = 1;
  /// Replaces the sampled disturbance of every sample (test hook).
  std::optional<Disturbance> fixed_disturbance;
  /// Fraction of samples tagged "train"; the rest are "test".
  std::optional<double> train_fraction;
};

/// Writes <output_dir>/images/<id>_{left,right}.png and
/// <output_dir>/manifest.jsonl; returns the records in id order. Sample i
/// uses seed base_seed + i and raw scene i % n_scenes, so the output does not
/// depend on the number of jobs.
std::vector<SampleRecord> generate_dataset(const PipelineConfig& cfg,
                                           const GenerateOptions& options = {});

struct SweepRow {
  double d = 0.0;
  double wode = 0.0;
  double e_epi = 0.0;  // NaN when no correspondence is visible
  int n_visible = 0;
  std::string status = "ok";
};

/// Disturbs one DoF over `steps` values evenly spaced in [0, d_max] and
/// evaluates WODE and the epipolar error of the synthetic correspondences
/// (scene seed base_seed) inside the joint crop of each disturbed rectification.
[[nodiscard]] std::vector<SweepRow> sweep(const PipelineConfig& cfg, Dof dof, double d_max,
                                          int steps);

/// Epipolar error of one disturbance on the synthetic scene, plus the
/// visible-match count. Also used by the sweep.
[[nodiscard]] SweepRow evaluate_disturbance(const StereoCalibration& calib,
                                            const std::vector<Point3<double>>& points,
                                            const Disturbance& d);

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

struct EpiReport {
  double e_epi = 0.0;
  int n_used = 0;
  int n_dropped = 0;
};

/// Scores externally matched raw-image features: both sides are forward-mapped
/// through the rectification of the disturbed calibration before measuring
/// row offsets. With `already_rectified` the matches are used as given.
[[nodiscard]] EpiReport eval_epi(const StereoCalibration& calib, const Disturbance& d,
                                 const std::vector<PixelMatch>& matches,
                                 bool already_rectified = false);

struct CorrelationReport {
  int n = 0;
  double rho = 0.0;
  double p = 1.0;
  double sigma = 0.0;  // sample std-dev of (pred - true) about its mean
};

/// Joins predictions (CSV columns id,pred) with ok manifest records on id.
/// Throws MissingIds if a prediction id has no ok manifest record.
[[nodiscard]] CorrelationReport correlate(const std::filesystem::path& manifest_path,
                                          const std::filesystem::path& predictions_path);

/// Parses "x,y,z,a,b,g".
[[nodiscard]] Disturbance parse_disturbance(const std::string& text);

}  // namespace miscal

#endif  // MISCAL_PIPELINE_HPP
