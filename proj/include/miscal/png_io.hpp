#ifndef MISCAL_PNG_IO_HPP
#define MISCAL_PNG_IO_HPP

#include <filesystem>

#include "miscal/image.hpp"

namespace miscal {

/// Writes an 8-bit grayscale PNG; values are rounded and clamped to [0, 255].
void write_png_gray8(const std::filesystem::path& path, const ImageF& img);

/// Writes a mask as 0/255 grayscale.
void write_png_mask(const std::filesystem::path& path, const ValidityMask& mask);

/// Reads any PNG as 8-bit luminance. Throws IoError.
[[nodiscard]] ImageF read_png_gray(const std::filesystem::path& path);

}  // namespace miscal

#endif  // MISCAL_PNG_IO_HPP
