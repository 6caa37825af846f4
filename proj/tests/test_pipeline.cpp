#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "miscal/csv.hpp"
#include "miscal/pipeline.hpp"
#include "miscal/png_io.hpp"

using namespace miscal;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("miscal_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

PipelineConfig small_config(const fs::path& out) {
  PipelineConfig cfg;
  auto& c = cfg.calibration;
  c.left.fx = c.left.fy = 200.0;
  c.left.cx = 80.0;
  c.left.cy = 60.0;
  c.left.image_size = {160, 120};
  c.right = c.left;
  c.extrinsics.translation = Vec3<double>(-0.2, 0, 0);
  cfg.d_thr = 0.05;
  cfg.n_samples = 6;
  cfg.base_seed = 100;
  cfg.scene.n_scenes = 2;
  cfg.output_dir = out;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MISCAL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("config JSON round trip") {
  PipelineConfig cfg = small_config("some/dir");
  cfg.calibration.left.dist << 0.1, -0.01, 1e-4, -2e-4, 0.0;
  cfg.calibration.extrinsics.rotation = Vec3<double>(0.01, -0.02, 0.003);
  cfg.crop_mode = CropMode::PerImage;
  cfg.scene.texture.kind = TextureKind::Checker;
  const PipelineConfig back = config_from_json(config_to_json(cfg));
  CHECK(config_to_json(back) == config_to_json(cfg));
  CHECK(back.calibration.left.dist == cfg.calibration.left.dist);
  CHECK(back.crop_mode == CropMode::PerImage);
}

TEST_CASE("right_to_left extrinsics are inverted on load") {
  nlohmann::json j = calibration_to_json(kitti_like_rig());
  j["extrinsics"]["convention"] = "right_to_left";
  j["extrinsics"]["translation"] = {0.537, 0.0, 0.0};
  const StereoCalibration c = calibration_from_json(j);
  CHECK((c.extrinsics.translation - Vec3<double>(-0.537, 0, 0)).norm() < 1e-15);
}

TEST_CASE("config validation reports problems") {
  PipelineConfig cfg = small_config("x");
  CHECK_NOTHROW(cfg.validate());
  cfg.d_thr = 0.0;
  cfg.n_samples = 0;
  try {
    cfg.validate();
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidConfig);
    CHECK(std::string(e.what()).find("d_thr") != std::string::npos);
    CHECK(std::string(e.what()).find("n_samples") != std::string::npos);
  }
  CHECK_THROWS_AS((void)config_from_json(nlohmann::json{{"d_thr", 0.05}}), Error);
  CHECK_THROWS_AS((void)load_config("/nonexistent/config.json"), Error);
}

TEST_CASE("manifest record round trip") {
  SampleRecord r;
  r.id = 42;
  r.seed = 142;
  r.disturbance.d << 0.01, -0.02, 0.03, -0.04, 0.05, -0.06;
  r.wode = 0.0123;
  r.wode_normalized = 0.47;
  r.delta_thr = 0.026;
  r.left_path = "images/000042_left.png";
  r.right_path = "images/000042_right.png";
  r.crop = {3, 4, 100, 30};
  r.crop_right = CropRect{5, 6, 90, 27};
  r.split = "train";
  const SampleRecord b = record_from_json(record_to_json(r));
  CHECK(record_to_json(b) == record_to_json(r));
  CHECK(b.disturbance.d == r.disturbance.d);
  CHECK(b.crop == r.crop);
}

TEST_CASE("parse_disturbance") {
  CHECK(parse_disturbance("0,0.1,-2e-3,0,0,1").d == (Vec6() << 0, 0.1, -2e-3, 0, 0, 1).finished());
  CHECK_THROWS_AS((void)parse_disturbance("1,2,3"), Error);
  CHECK_THROWS_AS((void)parse_disturbance("1,2,3,4,5,6,7"), Error);
  CHECK_THROWS_AS((void)parse_disturbance("1,2,a,4,5,6"), Error);
}

TEST_CASE("generate_dataset") {
  const fs::path out = scratch("generate");
  PipelineConfig cfg = small_config(out / "a");

  SUBCASE("zero disturbance gives zero wode and full-size images") {
    GenerateOptions opt;
    opt.fixed_disturbance = Disturbance{};
    const auto records = generate_dataset(cfg, opt);
    REQUIRE(records.size() == 6u);
    for (const auto& r : records) {
      CHECK(r.status == SampleStatus::Ok);
      CHECK(r.wode_normalized == 0.0);
      CHECK(r.crop == CropRect{0, 0, 160, 120});
      const ImageF img = read_png_gray(cfg.output_dir / r.left_path);
      CHECK(img.cols() == 160);
      CHECK(img.rows() == 120);
    }
  }

  SUBCASE("deterministic and independent of job count") {
    const auto a = generate_dataset(cfg);
    cfg.output_dir = out / "b";
    GenerateOptions opt;
    opt.jobs = 3;
    const auto b = generate_dataset(cfg, opt);
    CHECK(slurp(out / "a" / "manifest.jsonl") == slurp(out / "b" / "manifest.jsonl"));
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].seed == cfg.base_seed + i);
      if (a[i].status != SampleStatus::Ok) continue;
      CHECK(slurp(out / "a" / a[i].left_path) == slurp(out / "b" / b[i].left_path));
      CHECK(slurp(out / "a" / a[i].right_path) == slurp(out / "b" / b[i].right_path));
    }
    const auto read = read_manifest(out / "a" / "manifest.jsonl");
    REQUIRE(read.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(record_to_json(read[i]) == record_to_json(a[i]));
      CHECK(a[i].wode_normalized == Approx(a[i].wode / a[i].delta_thr));
      CHECK((a[i].disturbance.d.array().abs() <= 1.5 * cfg.d_thr).all());
    }
  }

  SUBCASE("split tagging") {
    GenerateOptions opt;
    opt.train_fraction = 0.5;
    for (const auto& r : generate_dataset(cfg, opt)) {
      REQUIRE(r.split.has_value());
      CHECK((*r.split == "train" || *r.split == "test"));
    }
  }
  fs::remove_all(out);
}

TEST_CASE("sweep") {
  PipelineConfig cfg = small_config("unused");
  cfg.scene.depth_min = 2.0;
  const auto rows = sweep(cfg, Dof::Y, 0.1, 6);
  REQUIRE(rows.size() == 6u);
  CHECK(rows.front().d == 0.0);
  CHECK(rows.back().d == Approx(0.1));
  CHECK(rows.front().wode == 0.0);
  CHECK(rows.front().e_epi < 1e-6);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].wode > rows[i - 1].wode);
    CHECK(rows[i].e_epi > rows[i - 1].e_epi);
  }
  CHECK_THROWS_AS((void)sweep(cfg, Dof::Y, 0.1, 1), Error);

  const fs::path dir = scratch("sweep");
  write_sweep_csv(dir / "s.csv", rows);
  const CsvTable t = read_csv(dir / "s.csv");
  CHECK(t.header == std::vector<std::string>{"d", "wode", "e_epi", "n_visible", "status"});
  CHECK(t.rows.size() == 6u);
  fs::remove_all(dir);
}

TEST_CASE("eval_epi") {
  const StereoCalibration calib = kitti_like_rig();
  std::vector<PixelMatch> matches;
  for (int i = 0; i < 20; ++i) {
    const Point3<double> p(-4.0 + 0.4 * i, 1.0 - 0.1 * i, 8.0 + i);
    const Point3<double> pr = calib.extrinsics.rotation_matrix() * p + calib.extrinsics.translation;
    matches.push_back({project_point(calib.left, p), project_point(calib.right, pr)});
  }
  const EpiReport zero = eval_epi(calib, Disturbance{}, matches);
  CHECK(zero.e_epi < 1e-6);
  CHECK(zero.n_used == 20);
  const EpiReport off = eval_epi(calib, Disturbance::single(Dof::Rx, 0.01), matches);
  CHECK(off.e_epi > 1.0);
  CHECK(eval_epi(calib, Disturbance{}, matches, true).e_epi == 0.0);
}

TEST_CASE("correlate") {
  const fs::path dir = scratch("correlate");
  {
    std::ofstream m(dir / "manifest.jsonl");
    for (int id = 0; id < 20; ++id) {
      SampleRecord r;
      r.id = id;
      r.wode_normalized = 0.1 * id;
      r.status = id == 7 ? SampleStatus::RejectedNoRect : SampleStatus::Ok;
      m << record_to_json(r).dump() << '\n';
    }
  }
  const auto write_preds = [&](auto fn, bool include_rejected = false) {
    std::ofstream p(dir / "pred.csv");
    p << "id,pred\n";
    for (int id = 0; id < 20; ++id) {
      if (id == 7 && !include_rejected) continue;
      p << id << ',' << format_number(fn(0.1 * id)) << '\n';
    }
  };

  write_preds([](double t) { return t; });
  CorrelationReport r = correlate(dir / "manifest.jsonl", dir / "pred.csv");
  CHECK(r.n == 19);
  CHECK(r.rho == Approx(1.0));
  CHECK(r.p < 0.01);
  CHECK(r.sigma == Approx(0.0).epsilon(1e-12));

  write_preds([](double t) { return t + 0.3; });
  r = correlate(dir / "manifest.jsonl", dir / "pred.csv");
  CHECK(r.rho == Approx(1.0));
  CHECK(r.sigma < 1e-12);

  write_preds([](double t) { return std::sin(97.0 * t); });
  r = correlate(dir / "manifest.jsonl", dir / "pred.csv");
  CHECK(std::abs(r.rho) < 0.6);
  CHECK(r.sigma > 0.1);

  write_preds([](double t) { return t; }, true);
  try {
    (void)correlate(dir / "manifest.jsonl", dir / "pred.csv");
    FAIL("expected MissingIds");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingIds);
  }
  fs::remove_all(dir);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("cli");
  write_text(dir / "cfg.json", config_to_json(small_config(dir / "out")).dump());
  write_text(dir / "bad.json", R"({"d_thr": -1})");
  write_text(dir / "broken.json", "{ not json");

  CHECK(run_cli("wode --config " + (dir / "cfg.json").string() + " --disturbance 0,0.01,0,0,0,0") == 0);
  CHECK(run_cli("wode --config " + (dir / "bad.json").string() + " --disturbance 0,0,0,0,0,0") == 1);
  CHECK(run_cli("wode --config " + (dir / "broken.json").string() + " --disturbance 0,0,0,0,0,0") == 1);
  CHECK(run_cli("wode --config " + (dir / "missing.json").string() + " --disturbance 0,0,0,0,0,0") == 2);
  CHECK(run_cli("wode --config " + (dir / "cfg.json").string() + " --disturbance 1,2") == 1);
  CHECK(run_cli("sweep --config " + (dir / "cfg.json").string() + " --dof y --max 0.05 --steps 3 --out " +
                (dir / "sweep.csv").string()) == 0);
  CHECK(fs::exists(dir / "sweep.csv"));
  CHECK(run_cli("sweep --config " + (dir / "cfg.json").string() + " --dof q --max 0.05 --steps 3 --out " +
                (dir / "sweep.csv").string()) == 1);
  CHECK(run_cli("generate --config " + (dir / "cfg.json").string() + " --out " + (dir / "gen").string() +
                " --samples 2") == 0);
  CHECK(fs::exists(dir / "gen" / "manifest.jsonl"));
  fs::remove_all(dir);
}
