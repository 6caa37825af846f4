#ifndef MISCAL_TESTS_FIXTURES_HPP
#define MISCAL_TESTS_FIXTURES_HPP

#include "miscal/rectify.hpp"
#include "miscal/rng.hpp"

namespace miscal::testing {

inline CameraIntrinsicsd random_camera(CounterRng& rng, bool distorted) {
  CameraIntrinsicsd cam;
  cam.image_size = {640, 480};
  cam.fx = rng.uniform(400.0, 900.0);
  cam.fy = cam.fx * rng.uniform(0.98, 1.02);
  cam.cx = 320.0 + rng.uniform(-20.0, 20.0);
  cam.cy = 240.0 + rng.uniform(-20.0, 20.0);
  if (distorted) {
    cam.dist << rng.uniform(-0.2, 0.1), rng.uniform(-0.05, 0.05), rng.uniform(-1e-3, 1e-3),
        rng.uniform(-1e-3, 1e-3), 0.0;
  }
  return cam;
}

/// Horizontal rig, baseline 5-60 cm with small off-axis components and a
/// small relative rotation.
inline StereoCalibration random_calibration(CounterRng& rng, bool distorted = false) {
  StereoCalibration calib;
  calib.left = random_camera(rng, distorted);
  calib.right = random_camera(rng, distorted);
  const double b = rng.uniform(0.05, 0.6);
  calib.extrinsics.translation =
      Vec3<double>(-b, rng.uniform(-0.1, 0.1) * b, rng.uniform(-0.1, 0.1) * b);
  calib.extrinsics.rotation =
      Vec3<double>(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05));
  return calib;
}

}  // namespace miscal::testing

#endif  // MISCAL_TESTS_FIXTURES_HPP
