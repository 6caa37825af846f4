#ifndef MISCAL_IMAGE_HPP
#define MISCAL_IMAGE_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

#include "miscal/geometry.hpp"

namespace miscal {

/// Single-channel image, row-major, rows() == height.
template <typename T>
using Image = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using ImageF = Image<float>;

/// Binary map of rectified pixels whose source lies inside the raw image.
using ValidityMask = Image<bool>;

template <typename Derived>
[[nodiscard]] ImageSize size_of(const Eigen::DenseBase<Derived>& img) {
  return {static_cast<int>(img.cols()), static_cast<int>(img.rows())};
}

/// Bilinear sample at (x, y). Neighbours beyond the last row/column are
/// clamped, so any (x, y) in [0, W-1] x [0, H-1] is well defined.
template <typename T, typename Scalar>
[[nodiscard]] T bilinear_sample(const Image<T>& img, Scalar x, Scalar y) {
  const Eigen::Index w = img.cols(), h = img.rows();
  const Scalar fx = std::floor(x), fy = std::floor(y);
  const Eigen::Index x0 = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(fx), 0, w - 1);
  const Eigen::Index y0 = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(fy), 0, h - 1);
  const Eigen::Index x1 = std::min<Eigen::Index>(x0 + 1, w - 1);
  const Eigen::Index y1 = std::min<Eigen::Index>(y0 + 1, h - 1);
  const Scalar ax = x - fx, ay = y - fy;
  const Scalar top = (Scalar(1) - ax) * Scalar(img(y0, x0)) + ax * Scalar(img(y0, x1));
  const Scalar bottom = (Scalar(1) - ax) * Scalar(img(y1, x0)) + ax * Scalar(img(y1, x1));
  return static_cast<T>((Scalar(1) - ay) * top + ay * bottom);
}

}  // namespace miscal

#endif  // MISCAL_IMAGE_HPP
