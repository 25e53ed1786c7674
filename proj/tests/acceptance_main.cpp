// Acceptance suite: one pass/fail line per criterion, exit status 0 only if
// every criterion holds at its stated tolerance.  Criteria run on the two
// bundled configs (tight-s3-disk, annulus-twist-k) plus a small-period
// variant of the disk config.

#include <openbook/holomorphic.hpp>
#include <openbook/indices.hpp>
#include <openbook/pipeline.hpp>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

using namespace openbook;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] %2d. %-28s %s\n", pass ? "PASS" : "FAIL", number,
              name.c_str(), detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <configs-dir>\n");
    return 2;
  }
  const std::string dir = argv[1];
  const auto t0 = std::chrono::steady_clock::now();

  const RunConfig disk = load_config(dir + "/tight-s3-disk.cfg");
  const RunConfig annulus = load_config(dir + "/annulus-twist-k.cfg");
  const std::vector<const RunConfig*> both = {&disk, &annulus};

  // 1. profile validity: exact sign checks on a 1e4 grid
  {
    bool pass = true;
    std::string detail;
    for (const RunConfig* cfg : both) {
      const Profile p = build_profile(cfg->spec.profile);
      const double lo = 1e-3, hi = 1.0 - cfg->spec.profile.delta - 1e-3;
      double min_D = 1e300, max_fp = -1e300;
      for (int i = 0; i <= 10000; ++i) {
        const double rho = lo + (hi - lo) * i / 10000.0;
        const ProfileSample s = p.eval(rho);
        min_D = std::min(min_D, s.D);
        max_fp = std::max(max_fp, s.fp);
      }
      pass = pass && min_D > 0.0 && max_fp < 0.0;
      detail += fmt("%s: minD=%.2e maxf'=%.2e  ", cfg->name.c_str(), min_D,
                    max_fp);
    }
    report(1, "profile validity", pass, detail);
  }

  // manifolds and SHS reports are shared by criteria 2-4
  std::vector<SHSReport> shs0s, shses;
  for (const RunConfig* cfg : both) {
    const ManifoldModel m = build_manifold(cfg->spec);
    shs0s.push_back(verify_shs(m, cfg->grid, 0.0));
    shses.push_back(verify_shs(m, cfg->grid, cfg->spec.epsilon));
  }

  // 2. SHS axioms at the stated tolerances
  {
    bool pass = true;
    std::string detail;
    for (size_t i = 0; i < both.size(); ++i) {
      const SHSReport& r = shs0s[i];
      const bool ok = r.sup_iota_X0_omega < 1e-9 && r.min_omega_xi > 0.0 &&
                      r.sup_numeric_domega < 1e-6;
      pass = pass && ok;
      detail += fmt("%s: iota=%.1e minw=%.1e dw=%.1e  ", both[i]->name.c_str(),
                    r.sup_iota_X0_omega, r.min_omega_xi,
                    r.sup_numeric_domega);
    }
    report(2, "SHS axioms", pass, detail);
  }

  // 3. contact perturbation and the eps = 0 confoliation structure
  {
    bool pass = true;
    std::string detail;
    for (size_t i = 0; i < both.size(); ++i) {
      const bool ok = shses[i].density_min > 0.0 &&
                      shs0s[i].density_vs_D_rel_dev <= 1e-9 &&
                      shs0s[i].density_zero_region_dev == 0.0;
      pass = pass && ok;
      detail += fmt("%s: min dens=%.1e D-dev=%.1e zero=%.1e  ",
                    both[i]->name.c_str(), shses[i].density_min,
                    shs0s[i].density_vs_D_rel_dev,
                    shs0s[i].density_zero_region_dev);
    }
    report(3, "contact perturbation", pass, detail);
  }

  // 4. Reeb agreement: bitwise below the collar, dphi exactly on the band
  {
    bool pass = true;
    std::string detail;
    for (size_t i = 0; i < both.size(); ++i) {
      const bool ok = shses[i].x_eps_equals_x0_below_collar &&
                      shses[i].x_is_dphi_on_band &&
                      shs0s[i].x_is_dphi_on_band;
      pass = pass && ok;
      detail += fmt("%s: bitwise=%d band=%d  ", both[i]->name.c_str(),
                    shses[i].x_eps_equals_x0_below_collar,
                    shses[i].x_is_dphi_on_band);
    }
    report(4, "Reeb agreement", pass, detail);
  }

  // 5-7 use the solved half cylinder of each config
  for (size_t i = 0; i < both.size(); ++i) {
    const RunConfig* cfg = both[i];
    const Profile p = build_profile(cfg->spec.profile);
    const HalfCylinderSolution sol =
        solve_half_cylinder(p, 0.0, 0.0, cfg->s_max, cfg->solve_tol);

    if (i == 0) {
      // 5. branch consistency along the trajectory
      double dev = 0.0;
      int n = 0;
      const double s1 = 1.0 - cfg->spec.profile.delta_prime;
      const double s2 = 1.0 - cfg->spec.profile.delta;
      for (size_t k = 0; k < sol.s.size(); ++k)
        if (sol.rho[k] >= s1 && sol.rho[k] < s2) {
          dev = std::max(dev, std::fabs(cylinder_rhs_generic(p, sol.rho[k]) -
                                        cylinder_rhs_collar()));
          ++n;
        }
      report(5, "ODE branch consistency", n > 0 && dev <= 1e-12,
             fmt("%d overlap samples, dev=%.2e", n, dev));

      // 6. Richardson ratio of the CR residual between h and h/2
      const MapSamples u1 = sample_half_cylinder_map(
          p, 0.0, 0.0, -0.5 * cfg->spec.profile.delta, 60.0, 1e-2,
          cfg->solve_tol);
      const MapSamples u2 = sample_half_cylinder_map(
          p, 0.0, 0.0, -0.5 * cfg->spec.profile.delta, 60.0, 5e-3,
          cfg->solve_tol);
      const double ratio =
          cr_residual(u1, p).sup_all / cr_residual(u2, p).sup_all;
      report(6, "CR residual convergence", ratio >= 3.5 && ratio <= 4.5,
             fmt("Richardson ratio=%.3f", ratio));
    }

    // 7. asymptotics (per config)
    const double c = cfg->spec.profile.c;
    const double exp_dev = std::fabs(sol.fit.exponent - p.kappa());
    const double aos = sol.a_at(1e5) / 1e5;
    const double aos_rel = std::fabs(aos - c) / c;
    report(7, fmt("asymptotics (%s)", cfg->name.c_str()),
           exp_dev <= 1e-3 && aos_rel <= 1e-3,
           fmt("|exp-kappa|=%.2e, |a/s-c|/c=%.2e", exp_dev, aos_rel));
  }

  // 8. indices
  {
    const Profile p = build_profile(disk.spec.profile);
    const int k_max = static_cast<int>(std::floor(1.0 / std::fabs(p.kappa())));
    bool mu_ok = true;
    for (int k = 1; k <= k_max; ++k)
      mu_ok = mu_ok && conley_zehnder(linearized_return_path(p, k)) == 1;
    bool ind_ok = true;
    for (int g = 0; g <= 3; ++g)
      ind_ok = ind_ok && fredholm_index({g, {1}, 0}) == 2 - 2 * g;
    const bool chern_ok = normal_chern(2, 0, 0) == 0;
    report(8, "indices", mu_ok && ind_ok && chern_ok,
           fmt("mu=1 for k<=%d: %d, ind(g)=2-2g: %d, c1=0: %d", k_max, mu_ok,
               ind_ok, chern_ok));
  }

  // 9. foliation coverage at n_pages = 16 with 1e5 random points
  {
    bool pass = true;
    std::string detail;
    for (const RunConfig* cfg : both) {
      const ManifoldModel m = build_manifold(cfg->spec);
      const FoliationReport f =
          foliation_sample(m, 16, 100000, cfg->s_max, cfg->solve_tol);
      const bool ok = f.max_match_error <= 1e-6 && f.unique_match_all &&
                      f.min_transversality > 0.0 && f.leaves_disjoint;
      pass = pass && ok;
      detail += fmt("%s: err=%.1e trans=%.1e  ", cfg->name.c_str(),
                    f.max_match_error, f.min_transversality);
    }
    report(9, "foliation", pass, detail);
  }

  // 10. small periods: c = 1e-3 against the mapping torus bound
  {
    OpenBookSpec spec = disk.spec;
    spec.profile.c = 1e-3;
    spec.profile.kappa = KappaSpec::parse("-pi/10000");
    spec.epsilon = 1e-4;  // perturbation scale must shrink with c
    const ManifoldModel m = build_manifold(spec);
    GridSpec grid = disk.grid;
    const SHSReport r = verify_shs(m, grid, spec.epsilon);
    const double period = r.binding_period;
    const double orbit_bound =
        r.min_dphi_X_mapping_torus * (1.0 - 1e-6);  // period >= 1 - 1e-6
    const bool ok = period == 1e-3 && r.min_dphi_X_mapping_torus == 1.0 &&
                    period / orbit_bound < 1e-2;
    report(10, "small binding periods", ok,
           fmt("period=%.1e, orbit bound=%.6f, ratio=%.1e", period,
               orbit_bound, period / orbit_bound));
  }

  const double dt = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  std::printf("%s (%d criteria failed, %.1fs)\n",
              g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              g_failures, dt);
  return g_failures == 0 ? 0 : 1;
}
