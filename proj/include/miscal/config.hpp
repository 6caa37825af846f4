#ifndef MISCAL_CONFIG_HPP
#define MISCAL_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "miscal/synth.hpp"

namespace miscal {

enum class CropMode { Joint, PerImage };

/// Everything the dataset generator needs. JSON schema (units: meters,
/// radians, pixels):
///
///   {
///     "calibration": {
///       "left":  {"fx", "fy", "cx", "cy", "dist": [k1,k2,p1,p2,k3], "image_size": [w,h]},
///       "right": {...},
///       "extrinsics": {"rotvec": [a,b,g], "translation": [x,y,z],
///                      "convention": "left_to_right" | "right_to_left"}
///     },
///     "d_thr": 0.05, "n_samples": 100, "base_seed": 0,
///     "scene": {"n_points", "depth_range": [min,max], "lateral_extent",
///               "vertical_extent", "quad_depths": [...], "n_scenes",
///               "texture": {"kind": "value-noise"|"checker"|"constant",
///                           "cell_size", "octaves", "value"}},
///     "output_dir": "out", "crop_mode": "joint" | "per-image"
///   }
///
/// Only "calibration" and "d_thr" are required. "left_to_right" means
/// X_r = R X_l + t; "right_to_left" transforms are inverted on load.
struct PipelineConfig {
  StereoCalibration calibration;
  double d_thr = 0.0;
  int n_samples = 1;
  std::uint64_t base_seed = 0;
  SceneConfig scene;
  std::filesystem::path output_dir = "out";
  CropMode crop_mode = CropMode::Joint;

  /// Collects every violated invariant, then throws one InvalidConfig.
  void validate() const;
};

[[nodiscard]] StereoCalibration calibration_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json calibration_to_json(const StereoCalibration& calib);

[[nodiscard]] PipelineConfig config_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json config_to_json(const PipelineConfig& cfg);

/// Parses and validates; IoError for unreadable files, InvalidConfig otherwise.
[[nodiscard]] PipelineConfig load_config(const std::filesystem::path& path);

/// Calibration constants resembling the KITTI 2011-09-26 grayscale pair
/// (0.537 m baseline, 1242 x 375) and the EuRoC MAV pair (0.110 m baseline,
/// 752 x 480, with its radial-tangential distortion); both with identity
/// relative rotation.
[[nodiscard]] StereoCalibration kitti_like_rig();
[[nodiscard]] StereoCalibration euroc_like_rig();

}  // namespace miscal

#endif  // MISCAL_CONFIG_HPP
