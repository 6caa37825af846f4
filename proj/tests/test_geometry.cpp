#include <doctest.h>

#include <numbers>

#include "fixtures.hpp"
#include "miscal/geometry.hpp"
#include "oracles.hpp"

using namespace miscal;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("rotvec_to_matrix analytic cases") {
  CHECK(max_abs(rotvec_to_matrix<double>(Vec3<double>::Zero()) - Mat3<double>::Identity()) == 0.0);

  Mat3<double> rz;
  rz << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK(max_abs(rotvec_to_matrix<double>(Vec3<double>(0, 0, kPi / 2)) - rz) < 1e-15);
}

TEST_CASE("rotvec_to_matrix matches AngleAxis and is a rotation") {
  CounterRng rng(11);
  for (int i = 0; i < 200; ++i) {
    const Vec3<double> axis = Vec3<double>(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)).normalized();
    const Vec3<double> r = axis * rng.uniform(0.0, kPi);
    const Mat3<double> m = rotvec_to_matrix<double>(r);
    CHECK(max_abs(m - oracle::angle_axis(r)) < 1e-14);
    CHECK(max_abs(m.transpose() * m - Mat3<double>::Identity()) < 1e-9);
    CHECK(m.determinant() == Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("small-angle branch agrees with AngleAxis") {
  const Vec3<double> r(3e-9, -2e-9, 1e-9);
  CHECK(max_abs(rotvec_to_matrix<double>(r) - oracle::angle_axis(r)) < 1e-16);
}

TEST_CASE("matrix_to_rotvec analytic cases") {
  CHECK(matrix_to_rotvec<double>(Mat3<double>::Identity()).norm() == 0.0);

  Mat3<double> rz;
  rz << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK((matrix_to_rotvec<double>(rz) - Vec3<double>(0, 0, kPi / 2)).norm() < 1e-15);

  // pi about x: the canonical sign is +x, and mapping back reproduces the input.
  const Mat3<double> rx_pi = Vec3<double>(1, -1, -1).asDiagonal();
  const Vec3<double> r = matrix_to_rotvec<double>(rx_pi);
  CHECK((r - Vec3<double>(kPi, 0, 0)).norm() < 1e-12);
  CHECK(max_abs(rotvec_to_matrix<double>(r) - rx_pi) < 1e-12);
}

TEST_CASE("rotvec round trip over [0, pi - 1e-3]") {
  CounterRng rng(12);
  for (int i = 0; i < 2000; ++i) {
    const Vec3<double> axis = Vec3<double>(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)).normalized();
    // bias a quarter of the draws towards the near-pi branch
    const double angle = i % 4 == 0 ? rng.uniform(kPi - 0.5, kPi - 1e-3) : rng.uniform(0.0, kPi - 1e-3);
    const Vec3<double> r = axis * angle;
    CHECK((matrix_to_rotvec<double>(rotvec_to_matrix<double>(r)) - r).norm() < 1e-9);
  }
}

TEST_CASE("relative rotation angle is symmetric and vanishes only for equal rotations") {
  CounterRng rng(13);
  for (int i = 0; i < 200; ++i) {
    const Mat3<double> a = rotvec_to_matrix<double>(Vec3<double>(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)));
    const Mat3<double> b = rotvec_to_matrix<double>(Vec3<double>(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)));
    const double ab = matrix_to_rotvec<double>(a.transpose() * b).norm();
    const double ba = matrix_to_rotvec<double>(b.transpose() * a).norm();
    CHECK(ab == Approx(ba).epsilon(1e-9));
    CHECK(ab > 1e-9);
    CHECK(matrix_to_rotvec<double>(a.transpose() * a).norm() < 1e-9);
  }
}

TEST_CASE("matrix_to_rotvec projects slightly perturbed input and rejects non-rotations") {
  Mat3<double> m = rotvec_to_matrix<double>(Vec3<double>(0.1, 0.2, 0.3));
  m(0, 1) += 5e-7;
  CHECK((matrix_to_rotvec<double>(m) - Vec3<double>(0.1, 0.2, 0.3)).norm() < 1e-6);

  Mat3<double> scaled = 1.01 * Mat3<double>::Identity();
  CHECK_THROWS_AS((void)matrix_to_rotvec<double>(scaled), Error);
  const Mat3<double> reflection = Vec3<double>(1, 1, -1).asDiagonal();
  try {
    (void)matrix_to_rotvec<double>(reflection);
    FAIL("expected NotARotation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotARotation);
  }
}

TEST_CASE("transform_point") {
  const RigidTransformd identity;
  const Point3<double> p(0.3, -1.2, 4.0);
  CHECK((transform_point(identity, p) - p).norm() == 0.0);

  const RigidTransformd shift{Vec3<double>::Zero(), Vec3<double>(1, 0, 0)};
  CHECK((transform_point(shift, Point3<double>(0, 0, 5)) - Point3<double>(1, 0, 5)).norm() == 0.0);

  CounterRng rng(14);
  for (int i = 0; i < 100; ++i) {
    const RigidTransformd t{Vec3<double>(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)),
                            Vec3<double>(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5))};
    const Point3<double> q(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    CHECK((transform_point(t, q) - oracle::homogeneous_apply(t.rotation, t.translation, q)).norm() < 1e-12);
    CHECK((transform_point(t.inverse(), transform_point(t, q)) - q).norm() < 1e-12);
  }
}

TEST_CASE("distort_normalized") {
  CameraIntrinsicsd cam;
  const NormalizedPoint<double> p(0.3, -0.2);
  CHECK((distort_normalized(cam, p) - p).norm() == 0.0);

  cam.dist(0) = 0.1;
  CHECK((distort_normalized(cam, NormalizedPoint<double>(0.5, 0.0)) - NormalizedPoint<double>(0.5125, 0.0)).norm() < 1e-15);

  cam.dist << -0.2, 0.05, 0.0, 0.0, 0.01;
  CHECK(distort_normalized(cam, NormalizedPoint<double>(0.4, 0.0)).y() == 0.0);
}

TEST_CASE("distortion_jacobian matches central differences") {
  CameraIntrinsicsd cam;
  cam.dist << -0.25, 0.07, 8e-4, -5e-4, 0.01;
  const NormalizedPoint<double> p(0.31, -0.42);
  const double h = 1e-6;
  const auto j = distortion_jacobian(cam, p);
  for (int c = 0; c < 2; ++c) {
    NormalizedPoint<double> e = NormalizedPoint<double>::Zero();
    e(c) = h;
    const auto fd = (distort_normalized(cam, NormalizedPoint<double>(p + e)) -
                     distort_normalized(cam, NormalizedPoint<double>(p - e))) / (2 * h);
    CHECK((j.col(c) - fd).norm() < 1e-8);
  }
}

TEST_CASE("undistort_normalized") {
  CameraIntrinsicsd cam;
  CHECK((undistort_normalized(cam, NormalizedPoint<double>(0.2, 0.1)) - NormalizedPoint<double>(0.2, 0.1)).norm() == 0.0);

  cam.dist(0) = 0.1;
  CHECK((undistort_normalized(cam, NormalizedPoint<double>(0.5125, 0.0)) - NormalizedPoint<double>(0.5, 0.0)).norm() < 1e-9);

  SUBCASE("round trip over the unit box with k1 in [-0.3, 0.3]") {
    CounterRng rng(15);
    for (int i = 0; i < 2000; ++i) {
      CameraIntrinsicsd c;
      c.dist << rng.uniform(-0.3, 0.3), rng.uniform(-0.02, 0.02), rng.uniform(-1e-3, 1e-3),
          rng.uniform(-1e-3, 1e-3), 0.0;
      const NormalizedPoint<double> q(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7));
      CHECK((undistort_normalized(c, distort_normalized(c, q)) - q).norm() < 1e-9);
    }
  }

  SUBCASE("no convergence beyond the fold of the distortion curve") {
    CameraIntrinsicsd c;
    c.dist(0) = -0.5;  // r (1 - 0.5 r^2) peaks at 0.544 for r = 0.816
    try {
      (void)undistort_normalized(c, NormalizedPoint<double>(0.7, 0.0));
      FAIL("expected NoConvergence");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoConvergence);
    }
  }
}

TEST_CASE("project_point") {
  CameraIntrinsicsd cam;
  cam.fx = cam.fy = 100;
  cam.image_size = {640, 480};
  CHECK((project_point(cam, Point3<double>(1, 2, 2)) - Pixel<double>(50, 100)).norm() == 0.0);

  cam.cx = 320;
  cam.cy = 240;
  cam.dist << 0.1, -0.03, 0, 0, 0.002;
  for (double z : {0.5, 1.0, 7.0}) {
    CHECK((project_point(cam, Point3<double>(0, 0, z)) - Pixel<double>(320, 240)).norm() == 0.0);
  }

  const Point3<double> p(0.4, -0.3, 1.6);
  const NormalizedPoint<double> d = distort_normalized(cam, NormalizedPoint<double>(0.25, -0.1875));
  CHECK((project_point(cam, p) - Pixel<double>(100 * d.x() + 320, 100 * d.y() + 240)).norm() < 1e-12);

  CHECK_THROWS_AS((void)project_point(cam, Point3<double>(0, 0, 0)), Error);
  CHECK_THROWS_AS((void)project_point(cam, Point3<double>(1, 1, -1)), Error);
}

TEST_CASE("geometry is usable with float scalars") {
  const Vec3<float> r(0.1f, -0.2f, 0.3f);
  CHECK((matrix_to_rotvec<float>(rotvec_to_matrix<float>(r)) - r).norm() < 1e-5f);
}
