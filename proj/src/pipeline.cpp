#include <openbook/pipeline.hpp>

#include <openbook/indices.hpp>
#include <openbook/svg.hpp>

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace openbook {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << bytes;
}

ordered_json profile_report_json(const ProfileReport& rep) {
  ordered_json j;
  j["pass"] = rep.pass;
  j["min_D"] = rep.min_D;
  j["max_fp"] = rep.max_fp;
  ordered_json checks = ordered_json::array();
  for (const auto& c : rep.checks) {
    ordered_json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["margin"] = c.margin;
    e["witness_rho"] = c.witness;
    if (!c.note.empty()) e["note"] = c.note;
    checks.push_back(e);
  }
  j["checks"] = checks;
  return j;
}

ordered_json shs_report_json(const SHSReport& r) {
  ordered_json j;
  j["eps"] = r.eps;
  j["pass"] = r.pass;
  j["min_omega_xi"] = r.min_omega_xi;
  j["sup_iota_X0_omega"] = r.sup_iota_X0_omega;
  j["sup_iota_Xeps_omega"] = r.sup_iota_Xeps_omega;
  j["sup_numeric_domega"] = r.sup_numeric_domega;
  j["sup_lambda_reeb_dev"] = r.sup_lambda_reeb_dev;
  j["contact_density_min"] = r.density_min;
  j["contact_density_max"] = r.density_max;
  j["density_vs_D_rel_dev"] = r.density_vs_D_rel_dev;
  j["density_zero_region_dev"] = r.density_zero_region_dev;
  j["x_eps_equals_x0_below_collar"] = r.x_eps_equals_x0_below_collar;
  j["x_is_dphi_on_band"] = r.x_is_dphi_on_band;
  j["x_eps_colinearity_dev"] = r.x_eps_colinearity_dev;
  j["alpha_pullback_dev"] = r.alpha_pullback_dev;
  j["f_eps_residual"] = r.f_eps_residual;
  j["f_eps_mapping_torus"] = r.f_eps_mapping_torus;
  j["binding_period"] = r.binding_period;
  j["min_dphi_X_mapping_torus"] = r.min_dphi_X_mapping_torus;
  ordered_json t;
  t["lambda_reeb"] = tol::kLambdaReeb;
  t["iota_X_omega"] = tol::kIotaOmega;
  t["numeric_domega"] = tol::kNumericDOmega;
  t["density_vs_D_rel"] = tol::kDensityRel;
  t["f_eps_residual"] = tol::kFEpsResidual;
  j["tolerances"] = t;
  return j;
}

ordered_json config_echo(const RunConfig& cfg) {
  ordered_json j;
  j["name"] = cfg.name;
  j["page.kind"] = cfg.spec.page.kind == PageKind::disk ? "disk" : "annulus";
  j["page.r0"] = cfg.spec.page.R0;
  j["page.r1"] = cfg.spec.page.R1;
  ordered_json tw = ordered_json::array();
  for (const auto& b : cfg.spec.monodromy.twists) {
    ordered_json e;
    e["r_lo"] = b.r_lo;
    e["r_hi"] = b.r_hi;
    e["count"] = b.count;
    tw.push_back(e);
  }
  j["monodromy.twists"] = tw;
  j["profile.c"] = cfg.spec.profile.c;
  j["profile.kappa"] = cfg.spec.profile.kappa.token();
  j["profile.delta"] = cfg.spec.profile.delta;
  j["profile.delta_prime"] = cfg.spec.profile.delta_prime;
  j["profile.rho1"] = cfg.spec.profile.rho1;
  j["profile.rho2"] = cfg.spec.profile.rho2;
  j["epsilon"] = cfg.spec.epsilon;
  j["tau.flat_width"] = cfg.spec.tau_flat;
  j["grid.theta"] = cfg.grid.n_theta;
  j["grid.rho"] = cfg.grid.n_rho;
  j["grid.phi"] = cfg.grid.n_phi;
  j["grid.page"] = cfg.grid.n_page;
  j["grid.fd_step"] = cfg.grid.fd_step;
  j["solve.s_max"] = cfg.s_max;
  j["solve.tol"] = cfg.solve_tol;
  j["foliation.pages"] = cfg.n_pages;
  j["foliation.points"] = cfg.n_points;
  j["profile.grid"] = cfg.profile_grid;
  return j;
}

}  // namespace

std::string shs_report_json_text(const SHSReport& rep) {
  return shs_report_json(rep).dump(2) + "\n";
}

std::string profile_report_json_text(const ProfileReport& rep) {
  return profile_report_json(rep).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// artifact emitters

void write_trajectory_csv(const HalfCylinderSolution& sol,
                          const std::string& path) {
  std::string out = "s,a,rho,branch,local_error\n";
  char buf[160];
  for (size_t i = 0; i < sol.s.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d,%.17g\n", sol.s[i],
                  sol.a[i], sol.rho[i], sol.branch[i], sol.local_error[i]);
    out += buf;
  }
  spit(path, out);
}

void plot_profile(const Profile& p, const Profile* perturbed,
                  const std::string& path) {
  SvgCanvas canvas(1020, 330);
  const int n = 400;
  const double sup = p.rho_sup() - 1e-9;

  // panel 1: the (f, g) path through the first quadrant
  SvgPanel pq;
  pq.x0 = 60;
  pq.y0 = 40;
  pq.w = 280;
  pq.h = 240;
  pq.xmin = 0.0;
  pq.xmax = std::max(p.f(0.0) * 1.2, 1e-3);
  pq.ymin = 0.0;
  pq.ymax = 1.1;
  pq.title = "(f, g) path";
  pq.xlabel = "f";
  pq.ylabel = "g";
  pq.frame(canvas);
  {
    std::vector<double> xf, yg;
    for (int i = 0; i <= n; ++i) {
      const double rho = sup * i / n;
      xf.push_back(p.f(rho));
      yg.push_back(p.g(rho));
    }
    pq.series(canvas, xf, yg, "#1f77b4");
    if (perturbed) {
      std::vector<double> xe, ye;
      for (int i = 0; i <= n; ++i) {
        const double rho = sup * i / n;
        xe.push_back(perturbed->f(rho));
        ye.push_back(perturbed->g(rho));
      }
      pq.series(canvas, xe, ye, "#d62728");
    }
  }

  // panel 2: D(rho)
  SvgPanel pd;
  pd.x0 = 420;
  pd.y0 = 40;
  pd.w = 280;
  pd.h = 240;
  pd.xmin = 0.0;
  pd.xmax = sup;
  pd.title = "D(rho) = f g' - f' g";
  pd.xlabel = "rho";
  {
    std::vector<double> xr, yD;
    double dmax = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double rho = sup * i / n;
      const ProfileSample s = p.eval(rho);
      xr.push_back(rho);
      yD.push_back(s.D);
      dmax = std::max(dmax, s.D);
    }
    pd.ymin = 0.0;
    pd.ymax = dmax * 1.1 + 1e-12;
    pd.frame(canvas);
    pd.series(canvas, xr, yD, "#2ca02c");
  }

  // panel 3: beta(rho), log scale in the value
  SvgPanel pb;
  pb.x0 = 780;
  pb.y0 = 40;
  pb.w = 200;
  pb.h = 240;
  pb.xmin = 0.0;
  pb.xmax = sup;
  pb.title = "log10 beta(rho)";
  pb.xlabel = "rho";
  {
    std::vector<double> xr, yb;
    double bmax = 0.0;
    for (int i = 1; i <= n; ++i) {
      const double rho = sup * i / n;
      const double lb = std::log10(p.beta(rho));
      xr.push_back(rho);
      yb.push_back(lb);
      bmax = std::max(bmax, lb);
    }
    pb.ymin = -0.5;
    pb.ymax = bmax + 0.5;
    pb.frame(canvas);
    pb.series(canvas, xr, yb, "#9467bd");
  }
  canvas.write(path);
}

void plot_foliation(const ManifoldModel& m, const PageCurve& curve,
                    int n_pages, const std::string& path) {
  SvgCanvas canvas(700, 340);
  const HalfCylinderSolution& sol = curve.cylinders.front();

  // panel 1: (rho, a) trajectory profile: flat on the page, rising into the
  // binding region
  SvgPanel pa;
  pa.x0 = 60;
  pa.y0 = 40;
  pa.w = 280;
  pa.h = 240;
  pa.xmin = 0.0;
  pa.xmax = m.spec().page.delta + 1.0;
  pa.title = "leaf profile";
  pa.xlabel = "rho";
  pa.ylabel = "a";
  {
    std::vector<double> xr, ya;
    // flat page part at a = a0 from the collar inward
    xr.push_back(1.0 + m.spec().page.delta * 0.5);
    ya.push_back(curve.a0);
    double amax = curve.a0;
    for (size_t i = 0; i < sol.s.size(); ++i) {
      if (sol.rho[i] < 1e-4) break;
      xr.push_back(sol.rho[i]);
      ya.push_back(sol.a[i]);
      amax = std::max(amax, sol.a[i]);
    }
    pa.ymin = curve.a0 - 1.0;
    pa.ymax = amax + 1.0;
    pa.frame(canvas);
    pa.series(canvas, xr, ya, "#1f77b4");
  }

  // panel 2: page fan (x, y) = rho (cos 2 pi phi0, sin 2 pi phi0)
  SvgPanel pf;
  pf.x0 = 420;
  pf.y0 = 40;
  pf.w = 240;
  pf.h = 240;
  pf.xmin = -1.1;
  pf.xmax = 1.1;
  pf.ymin = -1.1;
  pf.ymax = 1.1;
  pf.title = "page fan";
  pf.frame(canvas);
  const double twopi = 2.0 * std::numbers::pi;
  for (int j = 0; j < n_pages; ++j) {
    const double phi0 = static_cast<double>(j) / n_pages;
    std::vector<double> xs, ys;
    for (int i = 0; i <= 50; ++i) {
      const double rho = 1e-3 + (1.0 - 1e-3) * i / 50.0;
      xs.push_back(rho * std::cos(twopi * phi0));
      ys.push_back(rho * std::sin(twopi * phi0));
    }
    pf.series(canvas, xs, ys, "#1f77b4");
  }
  canvas.write(path);
}

// ---------------------------------------------------------------------------
// the pipeline

RunReport run_pipeline(const RunConfig& config, const std::string& out_dir) {
  config.validate();
  fs::create_directories(out_dir);
  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&t_start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start)
        .count();
  };

  ordered_json j;
  j["schema"] = "openbook-run-report v1";
  j["config"] = config_echo(config);
  ordered_json timings;

  // 1. profile
  Profile prof = build_profile(config.spec.profile);
  const ProfileReport prep = verify_profile(prof, config.profile_grid);
  j["profile"] = profile_report_json(prep);
  Profile prof_eps = config.spec.epsilon > 0.0
                         ? perturb_profile(prof, config.spec.epsilon)
                         : prof;
  timings["profile_s"] = elapsed();

  // 2. geometry
  ManifoldModel m = build_manifold(config.spec);
  const SHSReport shs0 = verify_shs(m, config.grid, 0.0);
  const SHSReport shse = config.spec.epsilon > 0.0
                             ? verify_shs(m, config.grid, config.spec.epsilon)
                             : shs0;
  j["shs_confoliation"] = shs_report_json(shs0);
  j["shs_contact"] = shs_report_json(shse);
  timings["geometry_s"] = elapsed();

  // 3. holomorphic curves
  PageCurve curve =
      assemble_page_curve(m, 0.0, 0.0, config.s_max, config.solve_tol);
  const HalfCylinderSolution& sol = curve.cylinders.front();

  double branch_dev = 0.0;
  for (size_t i = 0; i < sol.s.size(); ++i) {
    const double rho = sol.rho[i];
    if (rho >= 1.0 - config.spec.profile.delta_prime &&
        rho < 1.0 - config.spec.profile.delta)
      branch_dev = std::max(
          branch_dev, std::fabs(cylinder_rhs_generic(m.profile0(), rho) -
                                cylinder_rhs_collar()));
  }

  const double h_cr = 1e-2;
  const double s_window = std::min(60.0, config.s_max);
  const MapSamples u1 = sample_half_cylinder_map(
      m.profile0(), 0.0, 0.0, -0.5 * config.spec.profile.delta, s_window, h_cr,
      config.solve_tol);
  const MapSamples u2 = sample_half_cylinder_map(
      m.profile0(), 0.0, 0.0, -0.5 * config.spec.profile.delta, s_window,
      h_cr / 2.0, config.solve_tol);
  const ResidualField rf1 = cr_residual(u1, m.profile0());
  const ResidualField rf2 = cr_residual(u2, m.profile0());
  const double richardson = rf1.sup_all / rf2.sup_all;

  const EnergyBreakdown energy = omega_energy(curve, m);

  // a(s)/s at the far tail via the asymptotic continuation
  const double s_eval = 1e5;
  const double a_over_s = sol.a_at(s_eval) / s_eval;

  ordered_json jc;
  jc["branch_overlap_dev"] = branch_dev;
  jc["cr_sup_h"] = rf1.sup_all;
  jc["cr_sup_h_half"] = rf2.sup_all;
  jc["richardson_ratio"] = richardson;
  jc["fit_exponent"] = sol.fit.exponent;
  jc["fit_exponent_target_kappa"] = m.profile0().kappa();
  jc["fit_a_slope"] = sol.fit.a_slope;
  jc["a_over_s_tail"] = a_over_s;
  jc["a_over_s_target_c"] = config.spec.profile.c;
  jc["energy_flat"] = energy.flat;
  jc["energy_cylinders"] = energy.cylinders;
  jc["energy_tail"] = energy.tail;
  jc["energy_total"] = energy.total;
  jc["energy_quad_error"] = energy.quad_error;
  j["curves"] = jc;
  timings["curves_s"] = elapsed();

  // 4. indices
  const double kappa = m.profile0().kappa();
  const int k_max = static_cast<int>(std::floor(1.0 / std::fabs(kappa)));
  ordered_json jmu = ordered_json::array();
  bool mu_all_one = true;
  for (int k = 1; k <= k_max; ++k) {
    const SymplecticPath path = linearized_return_path(m.profile0(), k);
    const int mu = conley_zehnder(path);
    if (k <= 8 || k == k_max) {
      ordered_json e;
      e["cover"] = k;
      e["rotation"] = -kappa * k;
      e["mu_cz"] = mu;
      jmu.push_back(e);
    }
    mu_all_one = mu_all_one && mu == 1;
  }
  CurveTopology top;
  top.genus = 0;
  top.mu.assign(static_cast<size_t>(m.num_bindings()), 1);
  top.c1 = 0;
  const int ind = fredholm_index(top);
  const int c1_back = normal_chern(ind, top.genus, top.gamma0());

  ordered_json ji;
  ji["mu_cz_table"] = jmu;
  ji["mu_cz_covers_checked"] = k_max;
  ji["mu_cz_all_one"] = mu_all_one;
  ji["fredholm_index"] = ind;
  ji["normal_chern"] = c1_back;
  ji["punctures"] = top.punctures();
  ji["genus"] = top.genus;
  j["indices"] = ji;
  timings["indices_s"] = elapsed();

  // 5. foliation
  const FoliationReport fol =
      foliation_sample(m, config.n_pages, config.n_points, config.s_max,
                       config.solve_tol);
  ordered_json jf;
  jf["pass"] = fol.pass;
  jf["n_pages"] = fol.n_pages;
  jf["n_points"] = fol.n_points;
  jf["min_pairwise_distance"] = fol.min_pairwise_distance;
  jf["max_match_error"] = fol.max_match_error;
  jf["unique_match_all"] = fol.unique_match_all;
  jf["min_transversality"] = fol.min_transversality;
  jf["leaves_disjoint"] = fol.leaves_disjoint;
  j["foliation"] = jf;
  timings["foliation_s"] = elapsed();

  // 6. artifacts
  ordered_json hashes;
  for (size_t b = 0; b < curve.cylinders.size(); ++b) {
    const std::string csv =
        out_dir + "/trajectory_binding" + std::to_string(b) + ".csv";
    write_trajectory_csv(curve.cylinders[b], csv);
    hashes[fs::path(csv).filename().string()] = fnv1a_hex(slurp(csv));
  }
  {
    const std::string svg = out_dir + "/profile.svg";
    plot_profile(prof, config.spec.epsilon > 0.0 ? &prof_eps : nullptr, svg);
    hashes["profile.svg"] = fnv1a_hex(slurp(svg));
  }
  {
    const std::string svg = out_dir + "/foliation.svg";
    plot_foliation(m, curve, config.n_pages, svg);
    hashes["foliation.svg"] = fnv1a_hex(slurp(svg));
  }
  j["artifact_hashes"] = hashes;

  // overall status
  const bool fits_ok =
      std::fabs(sol.fit.exponent - kappa) <= 1e-3 &&
      std::fabs(a_over_s - config.spec.profile.c) <=
          1e-3 * config.spec.profile.c;
  const bool pass = prep.pass && shs0.pass && shse.pass &&
                    branch_dev <= tol::kBranch && richardson >= 3.5 &&
                    richardson <= 4.5 && fits_ok && mu_all_one &&
                    ind == 2 && c1_back == 0 && fol.pass;
  j["pass"] = pass;
  timings["total_s"] = elapsed();
  j["timings"] = timings;

  RunReport rep;
  rep.pass = pass;
  rep.json_text = j.dump(2) + "\n";
  spit(out_dir + "/report.json", rep.json_text);
  return rep;
}

}  // namespace openbook
