#include "miscal/config.hpp"

#include <fstream>
#include <string>
#include <vector>

namespace miscal {

namespace {

using nlohmann::json;

template <int N>
Eigen::Matrix<double, N, 1> vec_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != N) {
    throw Error(ErrorCode::InvalidConfig,
                std::string(what) + " must be an array of " + std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

template <typename Derived>
json vec_to_json(const Eigen::MatrixBase<Derived>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

CameraIntrinsicsd camera_from_json(const json& j) {
  CameraIntrinsicsd cam;
  cam.fx = j.at("fx").get<double>();
  cam.fy = j.at("fy").get<double>();
  cam.cx = j.at("cx").get<double>();
  cam.cy = j.at("cy").get<double>();
  if (j.contains("dist")) cam.dist = vec_from_json<5>(j.at("dist"), "dist");
  const json& size = j.at("image_size");
  if (!size.is_array() || size.size() != 2) {
    throw Error(ErrorCode::InvalidConfig, "image_size must be [width, height]");
  }
  cam.image_size = {size[0].get<int>(), size[1].get<int>()};
  return cam;
}

json camera_to_json(const CameraIntrinsicsd& cam) {
  return {{"fx", cam.fx},
          {"fy", cam.fy},
          {"cx", cam.cx},
          {"cy", cam.cy},
          {"dist", vec_to_json(cam.dist)},
          {"image_size", {cam.image_size.width, cam.image_size.height}}};
}

TextureKind texture_kind_from(const std::string& name) {
  if (name == "value-noise") return TextureKind::ValueNoise;
  if (name == "checker") return TextureKind::Checker;
  if (name == "constant") return TextureKind::Constant;
  throw Error(ErrorCode::InvalidConfig, "unknown texture kind '" + name + "'");
}

const char* texture_kind_name(TextureKind kind) {
  switch (kind) {
    case TextureKind::ValueNoise: return "value-noise";
    case TextureKind::Checker: return "checker";
    case TextureKind::Constant: return "constant";
  }
  return "value-noise";
}

SceneConfig scene_from_json(const json& j) {
  SceneConfig s;
  s.n_points = j.value("n_points", s.n_points);
  if (j.contains("depth_range")) {
    const Vec2<double> range = vec_from_json<2>(j.at("depth_range"), "scene.depth_range");
    s.depth_min = range(0);
    s.depth_max = range(1);
  }
  s.lateral_extent = j.value("lateral_extent", s.lateral_extent);
  s.vertical_extent = j.value("vertical_extent", s.vertical_extent);
  if (j.contains("quad_depths")) s.quad_depths = j.at("quad_depths").get<std::vector<double>>();
  s.n_scenes = j.value("n_scenes", s.n_scenes);
  if (j.contains("texture")) {
    const json& t = j.at("texture");
    if (t.contains("kind")) s.texture.kind = texture_kind_from(t.at("kind").get<std::string>());
    s.texture.cell_size = t.value("cell_size", s.texture.cell_size);
    s.texture.octaves = t.value("octaves", s.texture.octaves);
    s.texture.constant_value = t.value("value", s.texture.constant_value);
  }
  return s;
}

json scene_to_json(const SceneConfig& s) {
  return {{"n_points", s.n_points},
          {"depth_range", {s.depth_min, s.depth_max}},
          {"lateral_extent", s.lateral_extent},
          {"vertical_extent", s.vertical_extent},
          {"quad_depths", s.quad_depths},
          {"n_scenes", s.n_scenes},
          {"texture",
           {{"kind", texture_kind_name(s.texture.kind)},
            {"cell_size", s.texture.cell_size},
            {"octaves", s.texture.octaves},
            {"value", s.texture.constant_value}}}};
}

}  // namespace

StereoCalibration calibration_from_json(const json& j) {
  try {
    StereoCalibration calib;
    calib.left = camera_from_json(j.at("left"));
    calib.right = camera_from_json(j.at("right"));
    const json& ext = j.at("extrinsics");
    calib.extrinsics.rotation = vec_from_json<3>(ext.at("rotvec"), "extrinsics.rotvec");
    calib.extrinsics.translation = vec_from_json<3>(ext.at("translation"), "extrinsics.translation");
    const std::string convention = ext.value("convention", std::string("left_to_right"));
    if (convention == "right_to_left") {
      calib.extrinsics = calib.extrinsics.inverse();
    } else if (convention != "left_to_right") {
      throw Error(ErrorCode::InvalidConfig, "unknown extrinsics convention '" + convention + "'");
    }
    return calib;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("calibration: ") + e.what());
  }
}

json calibration_to_json(const StereoCalibration& calib) {
  return {{"left", camera_to_json(calib.left)},
          {"right", camera_to_json(calib.right)},
          {"extrinsics",
           {{"rotvec", vec_to_json(calib.extrinsics.rotation)},
            {"translation", vec_to_json(calib.extrinsics.translation)},
            {"convention", "left_to_right"}}}};
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig cfg;
  try {
    cfg.calibration = calibration_from_json(j.at("calibration"));
    cfg.d_thr = j.at("d_thr").get<double>();
    cfg.n_samples = j.value("n_samples", cfg.n_samples);
    cfg.base_seed = j.value("base_seed", cfg.base_seed);
    if (j.contains("scene")) cfg.scene = scene_from_json(j.at("scene"));
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    const std::string mode = j.value("crop_mode", std::string("joint"));
    if (mode == "joint") {
      cfg.crop_mode = CropMode::Joint;
    } else if (mode == "per-image") {
      cfg.crop_mode = CropMode::PerImage;
    } else {
      throw Error(ErrorCode::InvalidConfig, "crop_mode must be 'joint' or 'per-image'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  return cfg;
}

json config_to_json(const PipelineConfig& cfg) {
  return {{"calibration", calibration_to_json(cfg.calibration)},
          {"d_thr", cfg.d_thr},
          {"n_samples", cfg.n_samples},
          {"base_seed", cfg.base_seed},
          {"scene", scene_to_json(cfg.scene)},
          {"output_dir", cfg.output_dir.string()},
          {"crop_mode", cfg.crop_mode == CropMode::Joint ? "joint" : "per-image"}};
}

void PipelineConfig::validate() const {
  std::vector<std::string> problems;
  const auto check = [&](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      problems.emplace_back(e.what());
    }
  };
  check([&] { calibration.validate(); });
  check([&] { scene.validate(); });
  if (!(d_thr > 0.0)) problems.emplace_back("d_thr must be > 0");
  if (n_samples < 1) problems.emplace_back("n_samples must be >= 1");
  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw Error(ErrorCode::InvalidConfig, msg);
  }
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  PipelineConfig cfg = config_from_json(j);
  cfg.validate();
  return cfg;
}

StereoCalibration kitti_like_rig() {
  StereoCalibration calib;
  calib.left.fx = calib.left.fy = 721.5377;
  calib.left.cx = 609.5593;
  calib.left.cy = 172.854;
  calib.left.image_size = {1242, 375};
  calib.right = calib.left;
  calib.extrinsics.translation = Vec3<double>(-0.537, 0.0, 0.0);
  return calib;
}

StereoCalibration euroc_like_rig() {
  StereoCalibration calib;
  calib.left.fx = 458.654;
  calib.left.fy = 457.296;
  calib.left.cx = 367.215;
  calib.left.cy = 248.375;
  calib.left.dist << -0.28340811, 0.07395907, 0.00019359, 1.76187114e-05, 0.0;
  calib.left.image_size = {752, 480};
  calib.right.fx = 457.587;
  calib.right.fy = 456.134;
  calib.right.cx = 379.999;
  calib.right.cy = 255.238;
  calib.right.dist << -0.28368365, 0.07451284, -0.00010473, -3.55590700e-05, 0.0;
  calib.right.image_size = {752, 480};
  calib.extrinsics.translation = Vec3<double>(-0.110, 0.0, 0.0);
  return calib;
}

}  // namespace miscal
