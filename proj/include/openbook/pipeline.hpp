#pragma once

#include <openbook/geometry.hpp>
#include <openbook/holomorphic.hpp>

#include <string>
#include <vector>

namespace openbook {

struct RunConfig {
  std::string name = "run";
  OpenBookSpec spec;
  GridSpec grid;
  double s_max = 1500.0;
  double solve_tol = 1e-12;
  int n_pages = 16;
  int n_points = 100000;
  int profile_grid = 10000;

  void validate() const;
};

// Structured text config: "key = value" lines, '#' comments.  Unknown keys
// are rejected.  Documented schema in the README.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

struct RunReport {
  bool pass = false;
  std::string json_text;  // full report document
};

// construct -> verify -> solve -> index -> report.  Writes report.json,
// trajectory CSVs and SVG plots into out_dir (created if needed).
RunReport run_pipeline(const RunConfig& config, const std::string& out_dir);

// JSON documents with fixed field names and tolerance echoes
std::string shs_report_json_text(const SHSReport& rep);
std::string profile_report_json_text(const ProfileReport& rep);

// individual artifact emitters
void plot_profile(const Profile& p, const Profile* perturbed,
                  const std::string& path);
void plot_foliation(const ManifoldModel& m, const PageCurve& curve,
                    int n_pages, const std::string& path);
void write_trajectory_csv(const HalfCylinderSolution& sol,
                          const std::string& path);

// FNV-1a 64 content hash, hex encoded; used for artifact fingerprints.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace openbook
