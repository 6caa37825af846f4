#ifndef MISCAL_RECTIFY_HPP
#define MISCAL_RECTIFY_HPP

#include <utility>

#include "miscal/geometry.hpp"
#include "miscal/image.hpp"

namespace miscal {

enum class Side { Left, Right };

/// Two pinhole cameras plus the left-to-right extrinsic transform.
struct StereoCalibration {
  CameraIntrinsicsd left;
  CameraIntrinsicsd right;
  RigidTransformd extrinsics;

  [[nodiscard]] const CameraIntrinsicsd& camera(Side side) const {
    return side == Side::Left ? left : right;
  }
  [[nodiscard]] ImageSize image_size() const { return left.image_size; }

  /// Throws InvalidConfig when an invariant is violated.
  void validate() const;
};

/// Rectifying rotations and the shared distortion-free intrinsics of the
/// rectified views. A rectified pixel p of side s sees the ray
/// r_s^T * k_new^-1 * p expressed in that camera's own frame.
struct Rectification {
  RotMat<double> r_left = RotMat<double>::Identity();
  RotMat<double> r_right = RotMat<double>::Identity();
  CameraIntrinsicsd k_new;
  double baseline = 0.0;

  [[nodiscard]] const RotMat<double>& rotation(Side side) const {
    return side == Side::Left ? r_left : r_right;
  }
};

/// Per destination pixel, the sub-pixel source coordinate in the raw image.
/// Rays that cannot be traced are stored as (-1, -1).
template <typename Scalar>
struct RectificationMap {
  Image<Scalar> x;
  Image<Scalar> y;

  [[nodiscard]] ImageSize size() const { return size_of(x); }
};

using RectificationMapd = RectificationMap<double>;

/// Bouguet-style rectification: the relative rotation is split in half
/// between the two cameras, then both are rotated so the baseline lies on
/// the x-axis, keeping the sign of the baseline's x component.
[[nodiscard]] Rectification stereo_rectify(const StereoCalibration& calib);

[[nodiscard]] RectificationMapd build_map(const StereoCalibration& calib,
                                          const Rectification& rect, Side side);

/// Analytic forward direction of build_map: raw pixel -> rectified pixel.
[[nodiscard]] Pixel<double> map_point_forward(const StereoCalibration& calib,
                                              const Rectification& rect, Side side,
                                              const Pixel<double>& raw);

/// Destination pixels whose source lies inside [0, W-1] x [0, H-1].
template <typename Scalar>
[[nodiscard]] ValidityMask validity_from_map(const RectificationMap<Scalar>& map,
                                             ImageSize raw_size) {
  const Scalar max_x = Scalar(raw_size.width - 1);
  const Scalar max_y = Scalar(raw_size.height - 1);
  return (map.x >= Scalar(0) && map.x <= max_x && map.y >= Scalar(0) && map.y <= max_y);
}

/// Bilinear remap; invalid destination pixels are set to zero.
template <typename T, typename Scalar>
[[nodiscard]] std::pair<Image<T>, ValidityMask> remap_bilinear(const Image<T>& img,
                                                               const RectificationMap<Scalar>& map,
                                                               ImageSize raw_size) {
  if (size_of(img) != raw_size) {
    throw Error(ErrorCode::SizeMismatch, "image size differs from the calibration's raw size");
  }
  ValidityMask mask = validity_from_map(map, raw_size);
  Image<T> out = Image<T>::Zero(map.x.rows(), map.x.cols());
  for (Eigen::Index v = 0; v < out.rows(); ++v) {
    for (Eigen::Index u = 0; u < out.cols(); ++u) {
      if (mask(v, u)) out(v, u) = bilinear_sample(img, map.x(v, u), map.y(v, u));
    }
  }
  return {std::move(out), std::move(mask)};
}

}  // namespace miscal

#endif  // MISCAL_RECTIFY_HPP
