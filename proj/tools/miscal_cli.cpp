// Command-line front end: dataset generation, WODE evaluation, DoF sweeps,
// rectification of user images, epipolar-error scoring and correlation.
//
// Exit status: 0 success, 1 validation error, 2 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "miscal/config.hpp"
#include "miscal/pipeline.hpp"
#include "miscal/png_io.hpp"

namespace {

using miscal::Error;
using miscal::ErrorCode;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

json weights_json(const miscal::Vec6& w) {
  json out = json::object();
  for (miscal::Dof dof : miscal::kAllDofs) out[std::string(miscal::dof_name(dof))] = w(static_cast<int>(dof));
  return out;
}

json wode_json(const miscal::WodeResult& r) {
  return {{"delta", r.delta},
          {"delta_thr", r.delta_thr},
          {"delta_norm", r.delta_norm},
          {"weights", weights_json(r.weights)}};
}

json crop_json(const miscal::CropRect& c) { return {{"x", c.x}, {"y", c.y}, {"w", c.w}, {"h", c.h}}; }

miscal::CropMode parse_crop_mode(const std::string& s) {
  if (s == "joint") return miscal::CropMode::Joint;
  if (s == "per-image") return miscal::CropMode::PerImage;
  throw Error(ErrorCode::InvalidConfig, "crop mode must be 'joint' or 'per-image'");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stereo miscalibration synthesis and metrology (WODE, epipolar error)"};
  app.require_subcommand(1);

  std::string config_path, out_path, disturbance_text, crop_mode;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> d_thr_override, split;
  int jobs = 1;

  auto* generate = app.add_subcommand("generate", "Generate a semi-synthetic miscalibrated dataset");
  generate->add_option("--config", config_path, "Pipeline config JSON")->required();
  generate->add_option("--out", out_path, "Output directory")->required();
  generate->add_option("--seed", seed, "Base seed (overrides config)");
  generate->add_option("--samples", samples, "Number of samples (overrides config)");
  generate->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  generate->add_option("--split", split, "Fraction of samples tagged 'train'")->check(CLI::Range(0.0, 1.0));
  generate->add_option("--crop-mode", crop_mode, "joint | per-image (overrides config)");

  auto* wode_cmd = app.add_subcommand("wode", "Print WODE, its threshold and per-DoF weights");
  wode_cmd->add_option("--config", config_path, "Pipeline config JSON")->required();
  wode_cmd->add_option("--disturbance", disturbance_text, "x,y,z,a,b,g")->required();
  wode_cmd->add_option("--d-thr", d_thr_override, "Threshold (overrides config)");

  std::string dof_text;
  double sweep_max = 0.0;
  int steps = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one DoF and tabulate WODE and e_epi");
  sweep_cmd->add_option("--config", config_path, "Pipeline config JSON")->required();
  sweep_cmd->add_option("--dof", dof_text, "x | y | z | rx | ry | rz")->required();
  sweep_cmd->add_option("--max", sweep_max, "Largest disturbance")->required();
  sweep_cmd->add_option("--steps", steps, "Number of rows (>= 2)")->required();
  sweep_cmd->add_option("--out", out_path, "Output CSV")->required();

  std::string left_path, right_path;
  auto* rectify_cmd = app.add_subcommand("rectify", "Rectify, crop and resize a user image pair");
  rectify_cmd->add_option("--config", config_path, "Pipeline config JSON")->required();
  rectify_cmd->add_option("--left", left_path, "Raw left PNG")->required();
  rectify_cmd->add_option("--right", right_path, "Raw right PNG")->required();
  rectify_cmd->add_option("--disturbance", disturbance_text, "x,y,z,a,b,g")->required();
  rectify_cmd->add_option("--out", out_path, "Output directory")->required();
  rectify_cmd->add_option("--crop-mode", crop_mode, "joint | per-image (overrides config)");

  std::string matches_path;
  bool already_rectified = false;
  auto* epi_cmd = app.add_subcommand("eval-epi", "Epipolar error of matched features");
  epi_cmd->add_option("--config", config_path, "Pipeline config JSON")->required();
  epi_cmd->add_option("--matches", matches_path, "CSV with columns xl,yl,xr,yr")->required();
  epi_cmd->add_option("--disturbance", disturbance_text, "x,y,z,a,b,g")->required();
  epi_cmd->add_flag("--rectified", already_rectified, "Matches are already in rectified coordinates");

  std::string manifest_path, pred_path;
  auto* corr_cmd = app.add_subcommand("correlate", "Spearman correlation of predictions vs labels");
  corr_cmd->add_option("--manifest", manifest_path, "manifest.jsonl")->required();
  corr_cmd->add_option("--pred", pred_path, "CSV with columns id,pred")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*generate) {
      miscal::PipelineConfig cfg = miscal::load_config(config_path);
      cfg.output_dir = out_path;
      if (seed) cfg.base_seed = *seed;
      if (samples) cfg.n_samples = *samples;
      if (!crop_mode.empty()) cfg.crop_mode = parse_crop_mode(crop_mode);
      miscal::GenerateOptions options;
      options.jobs = jobs;
      options.train_fraction = split;
      const auto records = miscal::generate_dataset(cfg, options);
      int ok = 0;
      for (const auto& r : records) ok += r.status == miscal::SampleStatus::Ok;
      std::cerr << "generated " << ok << " of " << records.size() << " samples ("
                << records.size() - static_cast<std::size_t>(ok) << " rejected) in " << out_path << '\n';
      for (const auto& r : records) {
        if (r.status != miscal::SampleStatus::Ok) {
          std::cerr << "  sample " << r.id << ": " << miscal::to_string(r.status) << '\n';
        }
      }
    } else if (*wode_cmd) {
      const miscal::PipelineConfig cfg = miscal::load_config(config_path);
      const double d_thr = d_thr_override.value_or(cfg.d_thr);
      const auto result = miscal::wode_normalized(cfg.calibration, miscal::parse_disturbance(disturbance_text),
                                                  miscal::MiscalThreshold{d_thr});
      std::cout << wode_json(result).dump(2) << '\n';
    } else if (*sweep_cmd) {
      const miscal::PipelineConfig cfg = miscal::load_config(config_path);
      const auto rows = miscal::sweep(cfg, miscal::parse_dof(dof_text), sweep_max, steps);
      miscal::write_sweep_csv(out_path, rows);
    } else if (*rectify_cmd) {
      const miscal::PipelineConfig cfg = miscal::load_config(config_path);
      const miscal::Disturbance d = miscal::parse_disturbance(disturbance_text);
      const miscal::ImageF raw_l = miscal::read_png_gray(left_path);
      const miscal::ImageF raw_r = miscal::read_png_gray(right_path);
      const miscal::Rectification rect =
          miscal::stereo_rectify(miscal::disturb_calibration(cfg.calibration, d));
      const miscal::CropMode mode = crop_mode.empty() ? cfg.crop_mode : parse_crop_mode(crop_mode);
      const miscal::ProcessedPair pair = miscal::process_pair(cfg.calibration, rect, raw_l, raw_r, mode);
      const fs::path out(out_path);
      ensure_dir(out);
      miscal::write_png_gray8(out / "left.png", pair.left);
      miscal::write_png_gray8(out / "right.png", pair.right);
      miscal::write_png_gray8(out / "rectified_left.png", pair.rectified_left);
      miscal::write_png_gray8(out / "rectified_right.png", pair.rectified_right);
      miscal::write_png_mask(out / "mask_left.png", pair.mask_left);
      miscal::write_png_mask(out / "mask_right.png", pair.mask_right);
      const json summary = {
          {"crop_left", crop_json(pair.crop_left)},
          {"crop_right", crop_json(pair.crop_right)},
          {"wode", wode_json(miscal::wode_normalized(cfg.calibration, d, miscal::MiscalThreshold{cfg.d_thr}))}};
      std::ofstream(out / "result.json") << summary.dump(2) << '\n';
      std::cout << summary.dump(2) << '\n';
    } else if (*epi_cmd) {
      const miscal::PipelineConfig cfg = miscal::load_config(config_path);
      const auto report = miscal::eval_epi(cfg.calibration, miscal::parse_disturbance(disturbance_text),
                                           miscal::read_matches_csv(matches_path), already_rectified);
      std::cout << json{{"e_epi", report.e_epi}, {"n_used", report.n_used}, {"n_dropped", report.n_dropped}}.dump(2)
                << '\n';
    } else if (*corr_cmd) {
      const auto report = miscal::correlate(manifest_path, pred_path);
      std::cout << json{{"n", report.n}, {"rho", report.rho}, {"p", report.p}, {"sigma", report.sigma}}.dump(2)
                << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::IoError ? kExitIo : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
