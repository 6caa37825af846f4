#ifndef MISCAL_WODE_HPP
#define MISCAL_WODE_HPP

#include <array>
#include <string_view>

#include "miscal/rectify.hpp"

namespace miscal {

using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Extrinsic degrees of freedom in disturbance order.
enum class Dof : int { X = 0, Y = 1, Z = 2, Rx = 3, Ry = 4, Rz = 5 };

inline constexpr std::array<Dof, 6> kAllDofs{Dof::X, Dof::Y, Dof::Z, Dof::Rx, Dof::Ry, Dof::Rz};

/// "x", "y", "z", "rx", "ry", "rz".
[[nodiscard]] std::string_view dof_name(Dof dof);
/// Inverse of dof_name; throws InvalidConfig for unknown names.
[[nodiscard]] Dof parse_dof(std::string_view name);

/// Additive perturbation of the extrinsics: translation (meters) in 0..2,
/// rotation-vector components (radians) in 3..5.
struct Disturbance {
  Vec6 d = Vec6::Zero();

  [[nodiscard]] static Disturbance single(Dof dof, double value) {
    Disturbance out;
    out.d(static_cast<int>(dof)) = value;
    return out;
  }
  [[nodiscard]] static Disturbance uniform(double value) { return {Vec6::Constant(value)}; }
};

/// Per-DoF threshold beyond which the downstream application is expected to
/// fail; applied in meters to translations and radians to rotations.
struct MiscalThreshold {
  double d_thr = 0.0;
};

struct WodeResult {
  Vec6 weights = Vec6::Zero();  // w_i(d_i)
  double delta = 0.0;
  double delta_thr = 0.0;
  double delta_norm = 0.0;
};

/// Component-wise addition to translation and rotation vector; intrinsics untouched.
[[nodiscard]] StereoCalibration disturb_calibration(const StereoCalibration& calib,
                                                    const Disturbance& d);

/// Sum over both cameras of the angle between the rectifying rotation of the
/// calibration disturbed along one DoF and the true rectifying rotation.
[[nodiscard]] double wode_weight(const StereoCalibration& calib, Dof dof, double d_i);

/// Same as above, reusing an already computed true rectification.
[[nodiscard]] double wode_weight(const StereoCalibration& calib, const Rectification& truth,
                                 Dof dof, double d_i);

/// Weighted overall disturbance effect: sum_i |w_i(d_i) * d_i|.
[[nodiscard]] double wode(const StereoCalibration& calib, const Disturbance& d);

/// Normalizer: wode of the disturbance with every DoF at +d_thr.
[[nodiscard]] double wode_threshold(const StereoCalibration& calib, const MiscalThreshold& thr);

/// Full result including delta / delta_thr. Throws ZeroThreshold when
/// delta_thr < 1e-15.
[[nodiscard]] WodeResult wode_normalized(const StereoCalibration& calib, const Disturbance& d,
                                         const MiscalThreshold& thr);

/// Variant with a precomputed delta_thr (the dataset generator evaluates it once).
[[nodiscard]] WodeResult wode_normalized(const StereoCalibration& calib, const Disturbance& d,
                                         double delta_thr);

}  // namespace miscal

#endif  // MISCAL_WODE_HPP
