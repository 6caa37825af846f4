#include "miscal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "miscal/rng.hpp"

namespace miscal {

namespace {

struct Quad {
  double depth = 0.0;
  double x0 = -std::numeric_limits<double>::infinity();
  double x1 = std::numeric_limits<double>::infinity();
  double y0 = -std::numeric_limits<double>::infinity();
  double y1 = std::numeric_limits<double>::infinity();
  std::uint64_t texture_key = 0;
};

double lattice(std::uint64_t key, std::int64_t ix, std::int64_t iy) {
  const std::uint64_t h = mix64(key ^ mix64(static_cast<std::uint64_t>(ix) * 0x9E3779B97F4A7C15ULL +
                                            static_cast<std::uint64_t>(iy)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(std::uint64_t key, double x, double y) {
  const double fx = std::floor(x), fy = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx), iy = static_cast<std::int64_t>(fy);
  const double ax = smoothstep(x - fx), ay = smoothstep(y - fy);
  const double top = (1.0 - ax) * lattice(key, ix, iy) + ax * lattice(key, ix + 1, iy);
  const double bottom = (1.0 - ax) * lattice(key, ix, iy + 1) + ax * lattice(key, ix + 1, iy + 1);
  return (1.0 - ay) * top + ay * bottom;
}

// Intensity in [0, 255] at surface coordinates (x, y) of a quad.
double texture_at(const TextureConfig& tex, std::uint64_t key, double x, double y) {
  switch (tex.kind) {
    case TextureKind::Constant:
      return tex.constant_value;
    case TextureKind::Checker: {
      const auto cx = static_cast<std::int64_t>(std::floor(x / tex.cell_size));
      const auto cy = static_cast<std::int64_t>(std::floor(y / tex.cell_size));
      const double shade = 0.35 * lattice(key, 0, 0);
      return ((cx + cy) & 1) ? 255.0 * (0.8 - shade) : 255.0 * (0.2 + shade);
    }
    case TextureKind::ValueNoise:
      break;
  }
  double sum = 0.0, norm = 0.0, amplitude = 1.0, scale = 1.0 / tex.cell_size;
  for (int o = 0; o < tex.octaves; ++o) {
    sum += amplitude * value_noise(key + static_cast<std::uint64_t>(o), x * scale, y * scale);
    norm += amplitude;
    amplitude *= 0.5;
    scale *= 2.0;
  }
  // Sums of noise cluster around 0.5; stretch for contrast.
  return std::clamp(255.0 * (0.5 + 1.6 * (sum / norm - 0.5)), 0.0, 255.0);
}

std::vector<Quad> build_quads(std::uint64_t seed, const SceneConfig& cfg) {
  std::vector<double> depths = cfg.quad_depths;
  std::sort(depths.begin(), depths.end());
  CounterRng rng(mix64(seed ^ 0x51A7E5CE7EULL));
  std::vector<Quad> quads;
  for (std::size_t k = 0; k < depths.size(); ++k) {
    Quad q;
    q.depth = depths[k];
    q.texture_key = mix64(seed * 0x100000001B3ULL + k);
    if (k + 1 < depths.size()) {
      const double half_w = cfg.lateral_extent * q.depth / cfg.depth_max;
      const double half_h = cfg.vertical_extent * q.depth / cfg.depth_max;
      const double w = rng.uniform(0.3, 0.8) * half_w;
      const double h = rng.uniform(0.4, 1.0) * half_h;
      const double cx = rng.uniform(-half_w, half_w);
      const double cy = rng.uniform(-0.5 * half_h, 0.5 * half_h);
      q.x0 = cx - w;
      q.x1 = cx + w;
      q.y0 = cy - h;
      q.y1 = cy + h;
    }
    quads.push_back(q);
  }
  return quads;
}

ImageF render_view(const SceneConfig& cfg, const std::vector<Quad>& quads,
                   const CameraIntrinsicsd& cam, const RotMat<double>& to_left,
                   const Vec3<double>& origin) {
  const ImageSize size = cam.image_size;
  ImageF img = ImageF::Zero(size.height, size.width);
  for (int v = 0; v < size.height; ++v) {
    for (int u = 0; u < size.width; ++u) {
      NormalizedPoint<double> n;
      try {
        n = pixel_to_normalized(cam, Pixel<double>(u, v));
      } catch (const Error&) {
        continue;
      }
      const Vec3<double> dir = to_left * Vec3<double>(n.x(), n.y(), 1.0);
      if (dir.z() <= 1e-12) continue;
      for (const Quad& q : quads) {  // sorted near to far
        const double s = (q.depth - origin.z()) / dir.z();
        if (s <= 0.0) continue;
        const double x = origin.x() + s * dir.x();
        const double y = origin.y() + s * dir.y();
        if (x < q.x0 || x > q.x1 || y < q.y0 || y > q.y1) continue;
        img(v, u) = static_cast<float>(texture_at(cfg.texture, q.texture_key, x, y));
        break;
      }
    }
  }
  return img;
}

bool inside_raw(const Pixel<double>& p, ImageSize size) {
  return p.x() >= 0.0 && p.y() >= 0.0 && p.x() <= size.width - 1 && p.y() <= size.height - 1;
}

}  // namespace

void SceneConfig::validate() const {
  if (n_points < 1) throw Error(ErrorCode::InvalidConfig, "scene.n_points must be >= 1");
  if (!(depth_min > 0.0 && depth_min < depth_max)) {
    throw Error(ErrorCode::InvalidConfig, "scene depth range must satisfy 0 < min < max");
  }
  if (!(lateral_extent > 0.0) || !(vertical_extent > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "scene extents must be positive");
  }
  if (quad_depths.empty()) throw Error(ErrorCode::InvalidConfig, "scene.quad_depths is empty");
  for (double d : quad_depths) {
    if (!(d > 0.0)) throw Error(ErrorCode::InvalidConfig, "scene.quad_depths must be positive");
  }
  if (!(texture.cell_size > 0.0) || texture.octaves < 1) {
    throw Error(ErrorCode::InvalidConfig, "texture cell_size must be > 0 and octaves >= 1");
  }
  if (n_scenes < 1) throw Error(ErrorCode::InvalidConfig, "scene.n_scenes must be >= 1");
}

Disturbance sample_disturbance(std::uint64_t seed, const MiscalThreshold& thr) {
  CounterRng rng(seed);
  Disturbance out;
  for (int i = 0; i < 6; ++i) out.d(i) = rng.uniform(-1.5 * thr.d_thr, 1.5 * thr.d_thr);
  return out;
}

std::vector<Point3<double>> generate_points(std::uint64_t seed, const SceneConfig& cfg) {
  CounterRng rng(mix64(seed ^ 0x9017E5ULL));
  std::vector<Point3<double>> points;
  points.reserve(static_cast<std::size_t>(cfg.n_points));
  for (int i = 0; i < cfg.n_points; ++i) {
    const double z = rng.uniform(cfg.depth_min, cfg.depth_max);
    const double scale = z / cfg.depth_max;
    const double x = rng.uniform(-1.0, 1.0) * cfg.lateral_extent * scale;
    const double y = rng.uniform(-1.0, 1.0) * cfg.vertical_extent * scale;
    points.emplace_back(x, y, z);
  }
  return points;
}

std::vector<Correspondence> project_correspondences(const std::vector<Point3<double>>& points,
                                                    const StereoCalibration& calib,
                                                    const Rectification& rect,
                                                    const CropRect& window) {
  const RotMat<double> rot = calib.extrinsics.rotation_matrix();
  const ImageSize size = calib.image_size();
  std::vector<Correspondence> out;
  for (const Point3<double>& p : points) {
    const Point3<double> pr = rot * p + calib.extrinsics.translation;
    if (p.z() <= 1e-9 || pr.z() <= 1e-9) continue;
    const Pixel<double> raw_l = project_point(calib.left, p);
    const Pixel<double> raw_r = project_point(calib.right, pr);
    if (!inside_raw(raw_l, size) || !inside_raw(raw_r, size)) continue;
    try {
      Correspondence c{map_point_forward(calib, rect, Side::Left, raw_l),
                       map_point_forward(calib, rect, Side::Right, raw_r), p};
      if (window.contains(c.left.x(), c.left.y()) && window.contains(c.right.x(), c.right.y())) {
        out.push_back(c);
      }
    } catch (const Error&) {
      // untraceable through this rectification; treated as not visible
    }
  }
  return out;
}

std::pair<ImageF, ImageF> render_raw_pair(std::uint64_t seed, const SceneConfig& cfg,
                                          const StereoCalibration& calib) {
  const std::vector<Quad> quads = build_quads(seed, cfg);
  // Right camera rays expressed in the left frame: X_l = R^T (X_r - t).
  const RotMat<double> rt = calib.extrinsics.rotation_matrix().transpose();
  const Vec3<double> right_center = -(rt * calib.extrinsics.translation);
  return {render_view(cfg, quads, calib.left, RotMat<double>::Identity(), Vec3<double>::Zero()),
          render_view(cfg, quads, calib.right, rt, right_center)};
}

std::pair<ImageF, ImageF> render_pair(std::uint64_t seed, const SceneConfig& cfg,
                                      const StereoCalibration& calib, const Rectification& rect,
                                      const CropRect& crop) {
  const auto [raw_l, raw_r] = render_raw_pair(seed, cfg, calib);
  const ImageSize size = calib.image_size();
  const auto [rect_l, mask_l] = remap_bilinear(raw_l, build_map(calib, rect, Side::Left), size);
  const auto [rect_r, mask_r] = remap_bilinear(raw_r, build_map(calib, rect, Side::Right), size);
  return {crop_resize(rect_l, crop, size), crop_resize(rect_r, crop, size)};
}

}  // namespace miscal
