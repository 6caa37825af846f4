#ifndef MISCAL_VALIDREGION_HPP
#define MISCAL_VALIDREGION_HPP

#include <cmath>

#include "miscal/image.hpp"

namespace miscal {

/// Axis-aligned crop window, top-left corner plus extent, in pixels.
struct CropRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  friend bool operator==(const CropRect&, const CropRect&) = default;

  [[nodiscard]] bool contains(double px, double py) const {
    return px >= x && px <= x + w - 1 && py >= y && py <= y + h - 1;
  }
};

/// Narrowest crop that still counts as a usable sample.
inline constexpr int kMinCropWidth = 32;

/// Width paired with a given height for the aspect ratio.
[[nodiscard]] inline int aspect_width(double aspect, int height) {
  return static_cast<int>(std::lround(aspect * height));
}

/// Tallest rectangle with width round(aspect * h) containing only valid
/// pixels. Ties go to the smallest y, then smallest x. Throws NoValidRect
/// when no such rectangle is at least kMinCropWidth wide.
[[nodiscard]] CropRect largest_aspect_rect(const ValidityMask& mask, double aspect);

/// largest_aspect_rect on the element-wise AND of both masks.
[[nodiscard]] CropRect joint_crop(const ValidityMask& left, const ValidityMask& right,
                                  double aspect);

/// Bilinear resize of the crop window to out_size. Output pixel (u, v)
/// samples x = rect.x + (u + 0.5) * w / W_out - 0.5 (likewise for y), with
/// coordinates clamped to the window.
[[nodiscard]] ImageF crop_resize(const ImageF& img, const CropRect& rect, ImageSize out_size);

/// Maps a point in window coordinates of the source image to the resized output.
[[nodiscard]] inline Pixel<double> crop_resize_point(const CropRect& rect, ImageSize out_size,
                                                     const Pixel<double>& p) {
  return {(p.x() - rect.x + 0.5) * out_size.width / rect.w - 0.5,
          (p.y() - rect.y + 0.5) * out_size.height / rect.h - 0.5};
}

}  // namespace miscal

#endif  // MISCAL_VALIDREGION_HPP
