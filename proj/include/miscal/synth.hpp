#ifndef MISCAL_SYNTH_HPP
#define MISCAL_SYNTH_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "miscal/rectify.hpp"
#include "miscal/validregion.hpp"
#include "miscal/wode.hpp"

namespace miscal {

enum class TextureKind { ValueNoise, Checker, Constant };

struct TextureConfig {
  TextureKind kind = TextureKind::ValueNoise;
  double cell_size = 0.2;  // meters on the quad surface
  int octaves = 4;
  double constant_value = 128.0;
};

/// Synthetic scene description. Points are drawn inside a frustum: depth in
/// [depth_min, depth_max], |x| <= lateral_extent * z / depth_max and
/// |y| <= vertical_extent * z / depth_max (both extents are the half-sizes at
/// depth_max, meters). Rendered scenes consist of fronto-parallel textured
/// quads at quad_depths; the farthest one is an unbounded backdrop.
struct SceneConfig {
  int n_points = 300;
  double depth_min = 3.0;
  double depth_max = 40.0;
  double lateral_extent = 30.0;
  double vertical_extent = 9.0;
  TextureConfig texture;
  std::vector<double> quad_depths{6.0, 12.0, 25.0};
  int n_scenes = 4;

  void validate() const;
};

/// Ground-truth match in rectified pixel coordinates.
struct Correspondence {
  Pixel<double> left;
  Pixel<double> right;
  Point3<double> point;
};

/// Six independent uniform draws in [-1.5 d_thr, 1.5 d_thr].
[[nodiscard]] Disturbance sample_disturbance(std::uint64_t seed, const MiscalThreshold& thr);

[[nodiscard]] std::vector<Point3<double>> generate_points(std::uint64_t seed,
                                                          const SceneConfig& cfg);

/// Projects scene points (left-camera frame) into the raw images of the
/// physical rig described by `calib` and forward-maps them through `rect`.
/// A point is kept only when it lies in front of both cameras, inside both
/// raw images, and both rectified pixels fall inside `window`.
[[nodiscard]] std::vector<Correspondence> project_correspondences(
    const std::vector<Point3<double>>& points, const StereoCalibration& calib,
    const Rectification& rect, const CropRect& window);

/// Raw left/right images of the scene seen by the physical rig.
[[nodiscard]] std::pair<ImageF, ImageF> render_raw_pair(std::uint64_t seed, const SceneConfig& cfg,
                                                        const StereoCalibration& calib);

/// Raw render, rectification through `rect`, crop and resize back to the raw size.
[[nodiscard]] std::pair<ImageF, ImageF> render_pair(std::uint64_t seed, const SceneConfig& cfg,
                                                    const StereoCalibration& calib,
                                                    const Rectification& rect,
                                                    const CropRect& crop);

}  // namespace miscal

#endif  // MISCAL_SYNTH_HPP
