#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <openbook/pipeline.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace openbook;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string configs_dir() {
  return std::string(OPENBOOK_SOURCE_DIR) + "/configs";
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

RunConfig small_disk_config() {
  RunConfig cfg = load_config(configs_dir() + "/tight-s3-disk.cfg");
  cfg.grid.n_theta = cfg.grid.n_rho = cfg.grid.n_phi = cfg.grid.n_page = 12;
  cfg.n_points = 2000;
  cfg.profile_grid = 1000;
  return cfg;
}

}  // namespace

TEST_CASE("bundled configs load and validate") {
  const RunConfig disk = load_config(configs_dir() + "/tight-s3-disk.cfg");
  CHECK(disk.name == "tight-s3-disk");
  CHECK(disk.spec.page.kind == PageKind::disk);
  CHECK(disk.spec.epsilon == 0.01);
  const RunConfig ann = load_config(configs_dir() + "/annulus-twist-k.cfg");
  CHECK(ann.spec.page.kind == PageKind::annulus);
  CHECK(ann.spec.monodromy.twists.size() == 1);
}

TEST_CASE("run_pipeline end to end on the disk open book") {
  const RunConfig cfg = small_disk_config();
  const fs::path out = fs::temp_directory_path() / "openbook-test-run";
  fs::remove_all(out);
  const RunReport rep = run_pipeline(cfg, out.string());
  CHECK(rep.pass);

  const json j = json::parse(rep.json_text);
  CHECK(j["pass"] == true);
  CHECK(j["indices"]["fredholm_index"] == 2);
  CHECK(j["indices"]["mu_cz_all_one"] == true);
  CHECK(j["indices"]["normal_chern"] == 0);
  CHECK(j["indices"]["mu_cz_table"][0]["mu_cz"] == 1);
  CHECK(j["profile"]["pass"] == true);
  CHECK(j["shs_confoliation"]["pass"] == true);
  CHECK(j["shs_contact"]["pass"] == true);
  const double ratio = j["curves"]["richardson_ratio"];
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);

  CHECK(fs::exists(out / "report.json"));
  CHECK(fs::exists(out / "trajectory_binding0.csv"));
  CHECK(fs::exists(out / "profile.svg"));
  CHECK(fs::exists(out / "foliation.svg"));

  // CSV header contract
  const std::string csv = slurp((out / "trajectory_binding0.csv").string());
  CHECK(csv.rfind("s,a,rho,branch,local_error\n", 0) == 0);
}

TEST_CASE("pipeline determinism modulo timings, across worker counts") {
  const RunConfig cfg = small_disk_config();
  const fs::path out1 = fs::temp_directory_path() / "openbook-det-1";
  const fs::path out2 = fs::temp_directory_path() / "openbook-det-2";
  fs::remove_all(out1);
  fs::remove_all(out2);
  setenv("OPENBOOK_WORKERS", "1", 1);
  const RunReport r1 = run_pipeline(cfg, out1.string());
  setenv("OPENBOOK_WORKERS", "7", 1);
  const RunReport r2 = run_pipeline(cfg, out2.string());
  unsetenv("OPENBOOK_WORKERS");

  json j1 = json::parse(r1.json_text);
  json j2 = json::parse(r2.json_text);
  j1.erase("timings");
  j2.erase("timings");
  CHECK(j1.dump() == j2.dump());

  // artifacts are byte identical
  CHECK(slurp((out1 / "profile.svg").string()) ==
        slurp((out2 / "profile.svg").string()));
  CHECK(slurp((out1 / "foliation.svg").string()) ==
        slurp((out2 / "foliation.svg").string()));
  CHECK(slurp((out1 / "trajectory_binding0.csv").string()) ==
        slurp((out2 / "trajectory_binding0.csv").string()));
}

TEST_CASE("config validation errors name the offending field") {
  CHECK_THROWS_WITH_AS(
      static_cast<void>(parse_config("profile.delta_prime = 0.01\n")),
      doctest::Contains("delta_prime > delta"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(static_cast<void>(parse_config("bogus = 1\n")),
                       doctest::Contains("unknown keys"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(static_cast<void>(parse_config("solve.tol = -1\n")),
                       doctest::Contains("solve_tol"), std::invalid_argument);
}

TEST_CASE("plot_profile data and determinism") {
  const RunConfig cfg = small_disk_config();
  const Profile p = build_profile(cfg.spec.profile);
  const Profile pe = perturb_profile(p, cfg.spec.epsilon);
  const fs::path out = fs::temp_directory_path() / "openbook-plots";
  fs::create_directories(out);

  plot_profile(p, &pe, (out / "p1.svg").string());
  plot_profile(p, &pe, (out / "p2.svg").string());
  const std::string s1 = slurp((out / "p1.svg").string());
  CHECK(s1 == slurp((out / "p2.svg").string()));
  CHECK(s1.find("<svg") != std::string::npos);
  CHECK(s1.find("(f, g) path") != std::string::npos);

  // the (f, g) path starts at (c, 0) and ends at (0, 1): check the data
  CHECK(p.f(0.0) == cfg.spec.profile.c);
  CHECK(p.g(0.0) == 0.0);
  CHECK(p.f(p.rho_sup() - 1e-9) == 0.0);
  CHECK(p.g(p.rho_sup() - 1e-9) == 1.0);
  // perturbed overlay is the straight segment eps (2 - rho) on the collar
  for (double rho : {0.96, 0.98, 1.0, 1.02}) {
    CHECK(pe.f(rho) ==
          doctest::Approx(cfg.spec.epsilon * (2.0 - rho)).epsilon(1e-14));
  }
}

TEST_CASE("plot_foliation renders n_pages distinct traces") {
  RunConfig cfg = small_disk_config();
  cfg.n_pages = 8;
  const ManifoldModel m = build_manifold(cfg.spec);
  const PageCurve curve = assemble_page_curve(m, 0.0, 0.0, 300.0, 1e-10);
  const fs::path out = fs::temp_directory_path() / "openbook-plots";
  fs::create_directories(out);
  plot_foliation(m, curve, cfg.n_pages, (out / "f1.svg").string());
  plot_foliation(m, curve, cfg.n_pages, (out / "f2.svg").string());
  const std::string s1 = slurp((out / "f1.svg").string());
  CHECK(s1 == slurp((out / "f2.svg").string()));

  // one polyline per page trace plus the leaf profile and frame decorations
  size_t count = 0, pos = 0;
  while ((pos = s1.find("<polyline", pos)) != std::string::npos) {
    ++count;
    pos += 9;
  }
  CHECK(count >= static_cast<size_t>(cfg.n_pages) + 1);

  // leaf profile: a is flat on the page and increases toward the binding
  const auto& sol = curve.cylinders[0];
  CHECK(sol.a.front() == curve.a0);
  CHECK(sol.a.back() > curve.a0);
}

TEST_CASE("fnv hash is stable") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("openbook") != fnv1a_hex("openbooks"));
}

TEST_CASE("plot emitters report I/O errors") {
  const RunConfig cfg = small_disk_config();
  const Profile p = build_profile(cfg.spec.profile);
  CHECK_THROWS_AS(plot_profile(p, nullptr, "/nonexistent-dir/x.svg"),
                  std::runtime_error);
}
