#include "miscal/png_io.hpp"

#include <png.h>
#include <zlib.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <vector>

namespace miscal {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_rows(const std::filesystem::path& path, const Image<std::uint8_t>& pixels) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw Error(ErrorCode::IoError, "cannot create " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::IoError, "libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::IoError, "failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_compression_level(png, Z_BEST_SPEED);
  png_set_IHDR(png, info, static_cast<png_uint_32>(pixels.cols()),
               static_cast<png_uint_32>(pixels.rows()), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (Eigen::Index v = 0; v < pixels.rows(); ++v) {
    png_write_row(png, pixels.row(v).data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_png_gray8(const std::filesystem::path& path, const ImageF& img) {
  const Image<std::uint8_t> pixels =
      img.unaryExpr([](float v) { return std::round(std::clamp(v, 0.0f, 255.0f)); })
          .cast<std::uint8_t>();
  write_rows(path, pixels);
}

void write_png_mask(const std::filesystem::path& path, const ValidityMask& mask) {
  write_rows(path, mask.cast<std::uint8_t>() * std::uint8_t{255});
}

ImageF read_png_gray(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error(ErrorCode::IoError, "cannot read PNG " + path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error(ErrorCode::IoError, "cannot decode PNG " + path.string() + ": " + image.message);
  }
  const auto h = static_cast<Eigen::Index>(image.height);
  const auto w = static_cast<Eigen::Index>(image.width);
  return Eigen::Map<const Image<std::uint8_t>>(buffer.data(), h, w).cast<float>();
}

}  // namespace miscal
