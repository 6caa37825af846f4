#include "miscal/validregion.hpp"

#include <algorithm>
#include <optional>
#include <string>

namespace miscal {

namespace {

// Summed-area table of invalid pixels with a zero top row/left column.
class InvalidCounts {
 public:
  explicit InvalidCounts(const ValidityMask& mask)
      : table_(Image<int>::Zero(mask.rows() + 1, mask.cols() + 1)) {
    for (Eigen::Index v = 0; v < mask.rows(); ++v) {
      int row_sum = 0;
      for (Eigen::Index u = 0; u < mask.cols(); ++u) {
        row_sum += mask(v, u) ? 0 : 1;
        table_(v + 1, u + 1) = table_(v, u + 1) + row_sum;
      }
    }
  }

  [[nodiscard]] int count(int x, int y, int w, int h) const {
    return table_(y + h, x + w) - table_(y, x + w) - table_(y + h, x) + table_(y, x);
  }

 private:
  Image<int> table_;
};

// First all-valid placement of a w x h window in row-major order.
std::optional<CropRect> find_placement(const InvalidCounts& sat, ImageSize size, int w, int h) {
  if (w < 1 || h < 1 || w > size.width || h > size.height) return std::nullopt;
  for (int y = 0; y + h <= size.height; ++y) {
    for (int x = 0; x + w <= size.width; ++x) {
      if (sat.count(x, y, w, h) == 0) return CropRect{x, y, w, h};
    }
  }
  return std::nullopt;
}

}  // namespace

CropRect largest_aspect_rect(const ValidityMask& mask, double aspect) {
  if (!(aspect > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "aspect ratio must be positive");
  }
  const ImageSize size = size_of(mask);

  // Feasibility is monotone in h: a window of height h - 1 fits inside any
  // feasible window of height h because the paired width is nondecreasing.
  int lo = 1;
  while (lo <= size.height && aspect_width(aspect, lo) < kMinCropWidth) ++lo;
  int hi = size.height;
  while (hi >= lo && aspect_width(aspect, hi) > size.width) --hi;
  if (lo > hi) {
    throw Error(ErrorCode::NoValidRect, "no rectangle of the required aspect fits the image");
  }

  const InvalidCounts sat(mask);
  std::optional<CropRect> best = find_placement(sat, size, aspect_width(aspect, lo), lo);
  if (!best) {
    throw Error(ErrorCode::NoValidRect, "no all-valid rectangle at least " +
                                            std::to_string(kMinCropWidth) + " px wide");
  }
  ++lo;
  while (lo <= hi) {
    const int mid = lo + (hi - lo) / 2;
    if (auto found = find_placement(sat, size, aspect_width(aspect, mid), mid)) {
      best = found;
      lo = mid + 1;
    } else {
      hi = mid - 1;
    }
  }
  return *best;
}

CropRect joint_crop(const ValidityMask& left, const ValidityMask& right, double aspect) {
  if (size_of(left) != size_of(right)) {
    throw Error(ErrorCode::SizeMismatch, "validity masks differ in size");
  }
  return largest_aspect_rect(left && right, aspect);
}

ImageF crop_resize(const ImageF& img, const CropRect& rect, ImageSize out_size) {
  const ImageSize size = size_of(img);
  if (rect.w < 1 || rect.h < 1 || rect.x < 0 || rect.y < 0 || rect.x + rect.w > size.width ||
      rect.y + rect.h > size.height) {
    throw Error(ErrorCode::InvalidConfig, "crop rectangle exceeds the image bounds");
  }
  const ImageF window = img.block(rect.y, rect.x, rect.h, rect.w);
  const double sx = static_cast<double>(rect.w) / out_size.width;
  const double sy = static_cast<double>(rect.h) / out_size.height;
  ImageF out(out_size.height, out_size.width);
  for (int v = 0; v < out_size.height; ++v) {
    const double y = std::clamp((v + 0.5) * sy - 0.5, 0.0, static_cast<double>(rect.h - 1));
    for (int u = 0; u < out_size.width; ++u) {
      const double x = std::clamp((u + 0.5) * sx - 0.5, 0.0, static_cast<double>(rect.w - 1));
      out(v, u) = bilinear_sample(window, x, y);
    }
  }
  return out;
}

}  // namespace miscal
