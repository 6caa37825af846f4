#include "miscal/rectify.hpp"

#include <cmath>
#include <string>

namespace miscal {

void StereoCalibration::validate() const {
  if (!left.valid() || !right.valid()) {
    throw Error(ErrorCode::InvalidConfig, "camera intrinsics violate fx,fy > 0 or principal point bounds");
  }
  if (left.image_size != right.image_size) {
    throw Error(ErrorCode::InvalidConfig, "left and right image sizes differ");
  }
  if (!extrinsics.translation.allFinite() || !extrinsics.rotation.allFinite()) {
    throw Error(ErrorCode::InvalidConfig, "extrinsics must be finite");
  }
  if (extrinsics.translation.norm() <= 1e-6) {
    throw Error(ErrorCode::InvalidConfig, "baseline must be nonzero");
  }
}

Rectification stereo_rectify(const StereoCalibration& calib) {
  // Split the relative rotation so that B0 * R * A0^T = I.
  const RotVec<double> r = matrix_to_rotvec<double>(calib.extrinsics.rotation_matrix());
  const RotMat<double> a0 = rotvec_to_matrix<double>(0.5 * r);
  const RotMat<double> b0 = rotvec_to_matrix<double>(-0.5 * r);
  const Vec3<double> t = b0 * calib.extrinsics.translation;

  const double norm = t.norm();
  Vec3<double> e1 = t / norm;
  if (e1.x() < 0.0) e1 = -e1;
  if (e1.x() * e1.x() + e1.y() * e1.y() < 1e-12) {
    throw Error(ErrorCode::DegenerateBaseline, "baseline is (nearly) parallel to the optical axis");
  }
  const Vec3<double> e2 = Vec3<double>(-e1.y(), e1.x(), 0.0).normalized();
  const Vec3<double> e3 = e1.cross(e2);
  RotMat<double> rect_rot;
  rect_rot.row(0) = e1.transpose();
  rect_rot.row(1) = e2.transpose();
  rect_rot.row(2) = e3.transpose();

  Rectification out;
  out.r_left = rect_rot * a0;
  out.r_right = rect_rot * b0;
  const ImageSize size = calib.image_size();
  out.k_new.fx = out.k_new.fy = 0.5 * (calib.left.fy + calib.right.fy);
  out.k_new.cx = 0.5 * size.width;
  out.k_new.cy = 0.5 * size.height;
  out.k_new.image_size = size;
  out.baseline = calib.extrinsics.translation.norm();
  return out;
}

RectificationMapd build_map(const StereoCalibration& calib, const Rectification& rect,
                            Side side) {
  const CameraIntrinsicsd& cam = calib.camera(side);
  const RotMat<double> back = rect.rotation(side).transpose();
  const CameraIntrinsicsd& k = rect.k_new;
  const ImageSize size = k.image_size;

  RectificationMapd map{Image<double>(size.height, size.width),
                        Image<double>(size.height, size.width)};
  for (int v = 0; v < size.height; ++v) {
    const double ny = (v - k.cy) / k.fy;
    for (int u = 0; u < size.width; ++u) {
      const Vec3<double> ray = back * Vec3<double>((u - k.cx) / k.fx, ny, 1.0);
      if (ray.z() <= 1e-9) {
        map.x(v, u) = map.y(v, u) = -1.0;
        continue;
      }
      const NormalizedPoint<double> d =
          distort_normalized(cam, NormalizedPoint<double>(ray.x() / ray.z(), ray.y() / ray.z()));
      map.x(v, u) = cam.fx * d.x() + cam.cx;
      map.y(v, u) = cam.fy * d.y() + cam.cy;
    }
  }
  return map;
}

Pixel<double> map_point_forward(const StereoCalibration& calib, const Rectification& rect,
                                Side side, const Pixel<double>& raw) {
  const NormalizedPoint<double> n = pixel_to_normalized(calib.camera(side), raw);
  const Vec3<double> ray = rect.rotation(side) * Vec3<double>(n.x(), n.y(), 1.0);
  if (ray.z() <= 1e-9) {
    throw Error(ErrorCode::BehindPlane, "ray falls behind the rectified image plane");
  }
  const CameraIntrinsicsd& k = rect.k_new;
  return {k.fx * ray.x() / ray.z() + k.cx, k.fy * ray.y() / ray.z() + k.cy};
}

}  // namespace miscal
