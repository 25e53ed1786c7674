// openbook: build a stable Hamiltonian structure from an abstract open book,
// solve the holomorphic page curves, and verify every checkable property.
//
// verbs: verify | solve | index | run | plot
// worker count comes from the OPENBOOK_WORKERS environment variable.

#include <openbook/indices.hpp>
#include <openbook/pipeline.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace openbook;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  int grid_override = 0;
  double tol_override = 0.0;
  double s_max_override = 0.0;
  int pages_override = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("-c,--config", o.config_path, "config file")->required();
  cmd->add_option("-o,--out", o.out_dir, "output directory");
  cmd->add_option("--grid", o.grid_override,
                  "override every grid resolution");
  cmd->add_option("--tol", o.tol_override, "override the integrator tolerance");
  cmd->add_option("--s-max", o.s_max_override, "override solve.s_max");
  cmd->add_option("--pages", o.pages_override, "override foliation.pages");
}

RunConfig load_with_overrides(const CommonOpts& o) {
  RunConfig cfg = load_config(o.config_path);
  if (o.grid_override > 0) {
    cfg.grid.n_theta = o.grid_override;
    cfg.grid.n_rho = o.grid_override;
    cfg.grid.n_phi = o.grid_override;
    cfg.grid.n_page = o.grid_override;
  }
  if (o.tol_override > 0.0) cfg.solve_tol = o.tol_override;
  if (o.s_max_override > 0.0) cfg.s_max = o.s_max_override;
  if (o.pages_override > 1) cfg.n_pages = o.pages_override;
  cfg.validate();
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"open book -> stable Hamiltonian structure -> holomorphic "
               "pages, with verification"};
  app.require_subcommand(1);

  CommonOpts vo, so, io, ro, po;
  CLI::App* verify = app.add_subcommand(
      "verify", "profile conditions and the stable Hamiltonian axioms");
  add_common(verify, vo);
  CLI::App* solve =
      app.add_subcommand("solve", "half cylinders and page curves");
  add_common(solve, so);
  CLI::App* index = app.add_subcommand("index", "Conley-Zehnder and Fredholm indices");
  add_common(index, io);
  CLI::App* run = app.add_subcommand("run", "full pipeline with report");
  add_common(run, ro);
  CLI::App* plot = app.add_subcommand("plot", "profile and foliation plots");
  add_common(plot, po);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      const RunConfig cfg = load_with_overrides(vo);
      std::filesystem::create_directories(vo.out_dir);
      Profile prof = build_profile(cfg.spec.profile);
      const ProfileReport prep = verify_profile(prof, cfg.profile_grid);
      ManifoldModel m = build_manifold(cfg.spec);
      const SHSReport s0 = verify_shs(m, cfg.grid, 0.0);
      const SHSReport se = cfg.spec.epsilon > 0.0
                               ? verify_shs(m, cfg.grid, cfg.spec.epsilon)
                               : s0;
      write_text(vo.out_dir + "/profile_report.json",
                 profile_report_json_text(prep));
      write_text(vo.out_dir + "/shs_confoliation.json",
                 shs_report_json_text(s0));
      write_text(vo.out_dir + "/shs_contact.json", shs_report_json_text(se));
      std::printf("profile: %s\nshs eps=0: %s\nshs eps=%g: %s\n",
                  prep.pass ? "pass" : "FAIL", s0.pass ? "pass" : "FAIL",
                  cfg.spec.epsilon, se.pass ? "pass" : "FAIL");
      return prep.pass && s0.pass && se.pass ? 0 : 1;
    }
    if (*solve) {
      const RunConfig cfg = load_with_overrides(so);
      std::filesystem::create_directories(so.out_dir);
      ManifoldModel m = build_manifold(cfg.spec);
      PageCurve curve = assemble_page_curve(m, 0.0, 0.0, cfg.s_max, cfg.solve_tol);
      for (size_t b = 0; b < curve.cylinders.size(); ++b)
        write_trajectory_csv(curve.cylinders[b],
                             so.out_dir + "/trajectory_binding" +
                                 std::to_string(b) + ".csv");
      const auto& sol = curve.cylinders.front();
      std::printf("half cylinder: %zu steps, rho_end=%.3g, fit exponent=%.8f "
                  "(kappa=%.8f)\n",
                  sol.s.size(), sol.rho_end(), sol.fit.exponent, sol.kappa);
      return 0;
    }
    if (*index) {
      const RunConfig cfg = load_with_overrides(io);
      Profile prof = build_profile(cfg.spec.profile);
      const int k_max =
          static_cast<int>(std::floor(1.0 / std::fabs(prof.kappa())));
      bool all_one = true;
      for (int k = 1; k <= k_max; ++k)
        all_one = all_one && conley_zehnder(linearized_return_path(prof, k)) == 1;
      CurveTopology top;
      top.genus = 0;
      top.mu.assign(cfg.spec.page.kind == PageKind::disk ? 1 : 2, 1);
      top.c1 = 0;
      const int ind = fredholm_index(top);
      std::printf("mu_cz = 1 for all covers k <= %d: %s\nind(u) = %d\n"
                  "normal chern = %d\n",
                  k_max, all_one ? "yes" : "NO", ind,
                  normal_chern(ind, 0, top.gamma0()));
      return all_one && ind == 2 ? 0 : 1;
    }
    if (*run) {
      const RunConfig cfg = load_with_overrides(ro);
      const RunReport rep = run_pipeline(cfg, ro.out_dir);
      std::printf("%s: %s (report: %s/report.json)\n", cfg.name.c_str(),
                  rep.pass ? "pass" : "FAIL", ro.out_dir.c_str());
      return rep.pass ? 0 : 1;
    }
    if (*plot) {
      const RunConfig cfg = load_with_overrides(po);
      std::filesystem::create_directories(po.out_dir);
      Profile prof = build_profile(cfg.spec.profile);
      Profile prof_eps = cfg.spec.epsilon > 0.0
                             ? perturb_profile(prof, cfg.spec.epsilon)
                             : prof;
      plot_profile(prof, cfg.spec.epsilon > 0.0 ? &prof_eps : nullptr,
                   po.out_dir + "/profile.svg");
      ManifoldModel m = build_manifold(cfg.spec);
      PageCurve curve =
          assemble_page_curve(m, 0.0, 0.0, cfg.s_max, cfg.solve_tol);
      plot_foliation(m, curve, cfg.n_pages, po.out_dir + "/foliation.svg");
      std::printf("wrote %s/profile.svg and %s/foliation.svg\n",
                  po.out_dir.c_str(), po.out_dir.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
