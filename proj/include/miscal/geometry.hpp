#ifndef MISCAL_GEOMETRY_HPP
#define MISCAL_GEOMETRY_HPP

// Rotation parameterizations, rigid transforms and the pinhole camera with
// radial-tangential (k1, k2, p1, p2, k3) distortion. Everything here is
// header-only and templated on the scalar type.

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "miscal/error.hpp"

namespace miscal {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vec5 = Eigen::Matrix<Scalar, 5, 1>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

/// Axis-angle rotation vector; its norm is the rotation angle in radians.
template <typename Scalar>
using RotVec = Vec3<Scalar>;
template <typename Scalar>
using RotMat = Mat3<Scalar>;
/// Point in a camera frame, meters.
template <typename Scalar>
using Point3 = Vec3<Scalar>;
/// Point on the z = 1 plane.
template <typename Scalar>
using NormalizedPoint = Vec2<Scalar>;
template <typename Scalar>
using Pixel = Vec2<Scalar>;

struct ImageSize {
  int width = 0;
  int height = 0;

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

template <typename Scalar>
[[nodiscard]] Mat3<Scalar> skew(const Vec3<Scalar>& v) {
  Mat3<Scalar> s;
  // clang-format off
  s << Scalar(0), -v.z(),     v.y(),
       v.z(),     Scalar(0), -v.x(),
      -v.y(),     v.x(),     Scalar(0);
  // clang-format on
  return s;
}

/// Rodrigues formula. Below 1e-8 rad the second-order Taylor expansion is used.
template <typename Scalar>
[[nodiscard]] RotMat<Scalar> rotvec_to_matrix(const RotVec<Scalar>& r) {
  const Scalar theta = r.norm();
  const Mat3<Scalar> k = skew<Scalar>(r);
  if (theta < Scalar(1e-8)) {
    return Mat3<Scalar>::Identity() + k + Scalar(0.5) * k * k;
  }
  const Scalar a = std::sin(theta) / theta;
  const Scalar b = (Scalar(1) - std::cos(theta)) / (theta * theta);
  return Mat3<Scalar>::Identity() + a * k + b * k * k;
}

/// Nearest rotation matrix in the Frobenius sense (SVD projection onto SO(3)).
template <typename Scalar>
[[nodiscard]] RotMat<Scalar> nearest_rotation(const Mat3<Scalar>& m) {
  Eigen::JacobiSVD<Mat3<Scalar>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3<Scalar> d = Mat3<Scalar>::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < Scalar(0)) {
    d(2, 2) = Scalar(-1);
  }
  return svd.matrixU() * d * svd.matrixV().transpose();
}

/// Canonical rotation vector with angle in [0, pi].
///
/// The input is first projected onto SO(3); if it was further than 1e-6 (max
/// entry) from its projection, or has negative determinant, NotARotation is
/// thrown. Near pi the axis comes from the largest diagonal entry of the
/// symmetric part, and at exactly pi the sign is chosen so the
/// largest-magnitude component is positive.
template <typename Scalar>
[[nodiscard]] RotVec<Scalar> matrix_to_rotvec(const Mat3<Scalar>& m) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::NotARotation, "non-finite matrix entries");
  }
  const RotMat<Scalar> r = nearest_rotation<Scalar>(m);
  if ((m - r).cwiseAbs().maxCoeff() > Scalar(1e-6) || m.determinant() <= Scalar(0)) {
    throw Error(ErrorCode::NotARotation, "matrix is not orthonormal with det +1");
  }

  // skew part gives sin(theta) * axis
  const Vec3<Scalar> s(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  const Vec3<Scalar> sin_axis = Scalar(0.5) * s;
  const Scalar sin_theta = sin_axis.norm();
  const Scalar cos_theta = Scalar(0.5) * (r.trace() - Scalar(1));
  const Scalar theta = std::atan2(sin_theta, cos_theta);

  if (cos_theta > Scalar(-0.5)) {
    if (sin_theta < Scalar(1e-12)) {
      return sin_axis;  // theta ~ sin_theta
    }
    return sin_axis * (theta / sin_theta);
  }

  // theta > 2pi/3: (R + R^T)/2 - cos I = (1 - cos) a a^T
  const Mat3<Scalar> outer =
      (Scalar(0.5) * (r + r.transpose()) - cos_theta * Mat3<Scalar>::Identity()) /
      (Scalar(1) - cos_theta);
  Eigen::Index k = 0;
  outer.diagonal().maxCoeff(&k);
  Vec3<Scalar> axis = outer.col(k) / std::sqrt(std::max(outer(k, k), Scalar(0)));
  axis.normalize();
  if (sin_theta > Scalar(1e-12)) {
    if (axis.dot(sin_axis) < Scalar(0)) axis = -axis;
  } else {
    Eigen::Index j = 0;
    axis.cwiseAbs().maxCoeff(&j);
    if (axis(j) < Scalar(0)) axis = -axis;
  }
  return axis * theta;
}

/// Maps points from the left-camera frame to the right-camera frame:
/// X_r = R(rotation) * X_l + translation.
template <typename Scalar>
struct RigidTransform {
  RotVec<Scalar> rotation = RotVec<Scalar>::Zero();
  Vec3<Scalar> translation = Vec3<Scalar>::Zero();

  [[nodiscard]] RotMat<Scalar> rotation_matrix() const {
    return rotvec_to_matrix<Scalar>(rotation);
  }

  [[nodiscard]] RigidTransform inverse() const {
    const RotMat<Scalar> rt = rotation_matrix().transpose();
    return {-rotation, -(rt * translation)};
  }
};

template <typename Scalar>
[[nodiscard]] Point3<Scalar> transform_point(const RigidTransform<Scalar>& t,
                                             const Point3<Scalar>& p) {
  return t.rotation_matrix() * p + t.translation;
}

template <typename Scalar>
struct CameraIntrinsics {
  Scalar fx = Scalar(1);
  Scalar fy = Scalar(1);
  Scalar cx = Scalar(0);
  Scalar cy = Scalar(0);
  Vec5<Scalar> dist = Vec5<Scalar>::Zero();  // k1, k2, p1, p2, k3
  ImageSize image_size;

  [[nodiscard]] Mat3<Scalar> matrix() const {
    Mat3<Scalar> k;
    k << fx, Scalar(0), cx, Scalar(0), fy, cy, Scalar(0), Scalar(0), Scalar(1);
    return k;
  }

  [[nodiscard]] bool valid() const {
    return fx > Scalar(0) && fy > Scalar(0) && cx >= Scalar(0) && cy >= Scalar(0) &&
           cx < Scalar(image_size.width) && cy < Scalar(image_size.height) &&
           dist.allFinite();
  }

  [[nodiscard]] bool has_distortion() const { return !dist.isZero(Scalar(0)); }
};

template <typename Scalar>
[[nodiscard]] NormalizedPoint<Scalar> distort_normalized(const CameraIntrinsics<Scalar>& cam,
                                                         const NormalizedPoint<Scalar>& p) {
  const Scalar k1 = cam.dist(0), k2 = cam.dist(1), p1 = cam.dist(2), p2 = cam.dist(3),
               k3 = cam.dist(4);
  const Scalar x = p.x(), y = p.y();
  const Scalar r2 = x * x + y * y;
  const Scalar radial = Scalar(1) + r2 * (k1 + r2 * (k2 + r2 * k3));
  return {x * radial + Scalar(2) * p1 * x * y + p2 * (r2 + Scalar(2) * x * x),
          y * radial + p1 * (r2 + Scalar(2) * y * y) + Scalar(2) * p2 * x * y};
}

/// Jacobian of distort_normalized with respect to the undistorted point.
template <typename Scalar>
[[nodiscard]] Eigen::Matrix<Scalar, 2, 2> distortion_jacobian(
    const CameraIntrinsics<Scalar>& cam, const NormalizedPoint<Scalar>& p) {
  const Scalar k1 = cam.dist(0), k2 = cam.dist(1), p1 = cam.dist(2), p2 = cam.dist(3),
               k3 = cam.dist(4);
  const Scalar x = p.x(), y = p.y();
  const Scalar r2 = x * x + y * y;
  const Scalar radial = Scalar(1) + r2 * (k1 + r2 * (k2 + r2 * k3));
  const Scalar g = k1 + r2 * (Scalar(2) * k2 + Scalar(3) * k3 * r2);  // d radial / d r2
  const Scalar cross = Scalar(2) * g * x * y + Scalar(2) * p1 * x + Scalar(2) * p2 * y;
  Eigen::Matrix<Scalar, 2, 2> j;
  j(0, 0) = radial + Scalar(2) * g * x * x + Scalar(2) * p1 * y + Scalar(6) * p2 * x;
  j(0, 1) = cross;
  j(1, 0) = cross;
  j(1, 1) = radial + Scalar(2) * g * y * y + Scalar(6) * p1 * y + Scalar(2) * p2 * x;
  return j;
}

/// Inverse of distort_normalized. Newton iterations starting from the
/// distorted point itself: at most 50 steps, stopping once the step norm
/// drops below 1e-12. Throws NoConvergence if the final residual exceeds 1e-8.
template <typename Scalar>
[[nodiscard]] NormalizedPoint<Scalar> undistort_normalized(const CameraIntrinsics<Scalar>& cam,
                                                           const NormalizedPoint<Scalar>& p) {
  if (!cam.has_distortion()) return p;
  NormalizedPoint<Scalar> u = p;
  for (int iter = 0; iter < 50; ++iter) {
    const NormalizedPoint<Scalar> residual = distort_normalized(cam, u) - p;
    const Eigen::Matrix<Scalar, 2, 2> j = distortion_jacobian(cam, u);
    const Scalar det = j.determinant();
    if (!(std::abs(det) > Scalar(1e-12))) break;
    const NormalizedPoint<Scalar> step = j.inverse() * residual;
    u -= step;
    if (!u.allFinite()) break;
    if (step.norm() < Scalar(1e-12)) break;
  }
  if (!u.allFinite() || (distort_normalized(cam, u) - p).norm() > Scalar(1e-8)) {
    throw Error(ErrorCode::NoConvergence, "undistortion did not converge");
  }
  return u;
}

template <typename Scalar>
[[nodiscard]] Pixel<Scalar> project_point(const CameraIntrinsics<Scalar>& cam,
                                          const Point3<Scalar>& p) {
  if (p.z() <= Scalar(1e-9)) {
    throw Error(ErrorCode::BehindCamera, "point is not in front of the camera");
  }
  const NormalizedPoint<Scalar> d = distort_normalized(cam, NormalizedPoint<Scalar>(p.head(2) / p.z()));
  return {cam.fx * d.x() + cam.cx, cam.fy * d.y() + cam.cy};
}

/// Pixel to undistorted normalized coordinates.
template <typename Scalar>
[[nodiscard]] NormalizedPoint<Scalar> pixel_to_normalized(const CameraIntrinsics<Scalar>& cam,
                                                          const Pixel<Scalar>& px) {
  const NormalizedPoint<Scalar> d((px.x() - cam.cx) / cam.fx, (px.y() - cam.cy) / cam.fy);
  return undistort_normalized(cam, d);
}

using RigidTransformd = RigidTransform<double>;
using CameraIntrinsicsd = CameraIntrinsics<double>;

}  // namespace miscal

#endif  // MISCAL_GEOMETRY_HPP
