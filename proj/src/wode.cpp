#include "miscal/wode.hpp"

#include <cmath>
#include <string>

namespace miscal {

namespace {

constexpr std::array<std::string_view, 6> kDofNames{"x", "y", "z", "rx", "ry", "rz"};

Vec6 weights_for(const StereoCalibration& calib, const Rectification& truth, const Vec6& d) {
  Vec6 w;
  for (Dof dof : kAllDofs) {
    const int i = static_cast<int>(dof);
    w(i) = wode_weight(calib, truth, dof, d(i));
  }
  return w;
}

}  // namespace

std::string_view dof_name(Dof dof) { return kDofNames[static_cast<int>(dof)]; }

Dof parse_dof(std::string_view name) {
  for (Dof dof : kAllDofs) {
    if (dof_name(dof) == name) return dof;
  }
  throw Error(ErrorCode::InvalidConfig,
              "unknown degree of freedom '" + std::string(name) + "' (expected x|y|z|rx|ry|rz)");
}

StereoCalibration disturb_calibration(const StereoCalibration& calib, const Disturbance& d) {
  StereoCalibration out = calib;
  out.extrinsics.translation += d.d.head<3>();
  out.extrinsics.rotation += d.d.tail<3>();
  return out;
}

double wode_weight(const StereoCalibration& calib, const Rectification& truth, Dof dof,
                   double d_i) {
  if (d_i == 0.0) return 0.0;
  const Rectification disturbed =
      stereo_rectify(disturb_calibration(calib, Disturbance::single(dof, d_i)));
  // Rectifying rotations are orthonormal, so H^-1 = H^T.
  const double left =
      matrix_to_rotvec<double>(disturbed.r_left.transpose() * truth.r_left).norm();
  const double right =
      matrix_to_rotvec<double>(disturbed.r_right.transpose() * truth.r_right).norm();
  return left + right;
}

double wode_weight(const StereoCalibration& calib, Dof dof, double d_i) {
  return wode_weight(calib, stereo_rectify(calib), dof, d_i);
}

double wode(const StereoCalibration& calib, const Disturbance& d) {
  const Vec6 w = weights_for(calib, stereo_rectify(calib), d.d);
  return w.cwiseProduct(d.d).cwiseAbs().sum();
}

double wode_threshold(const StereoCalibration& calib, const MiscalThreshold& thr) {
  if (!(thr.d_thr > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "d_thr must be positive");
  }
  return wode(calib, Disturbance::uniform(thr.d_thr));
}

WodeResult wode_normalized(const StereoCalibration& calib, const Disturbance& d,
                           double delta_thr) {
  if (!(delta_thr >= 1e-15)) {
    throw Error(ErrorCode::ZeroThreshold, "normalization factor delta_thr vanishes");
  }
  WodeResult out;
  out.weights = weights_for(calib, stereo_rectify(calib), d.d);
  out.delta = out.weights.cwiseProduct(d.d).cwiseAbs().sum();
  out.delta_thr = delta_thr;
  out.delta_norm = out.delta / delta_thr;
  return out;
}

WodeResult wode_normalized(const StereoCalibration& calib, const Disturbance& d,
                           const MiscalThreshold& thr) {
  return wode_normalized(calib, d, wode_threshold(calib, thr));
}

}  // namespace miscal
