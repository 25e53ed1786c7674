#pragma once

#include <openbook/profiles.hpp>

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace openbook {

// ---------------------------------------------------------------------------
// pages and monodromy

enum class PageKind { disk, annulus };

struct TwistBand {
  double r_lo = 0.0;
  double r_hi = 0.0;
  int count = 0;
};

// Boundary-parallel Dehn twists, realized as (r, theta_c) -> (r, theta_c +
// sum_i k_i * w_i(r)) with w_i a flat-ended ramp on the band.  theta_c lives
// in R/Z, so a full twist is a shift by the integer count.
struct Monodromy {
  std::vector<TwistBand> twists;  // empty = identity

  bool is_identity() const { return twists.empty(); }
  double shift(double r) const;
  double shift_p(double r) const;
};

// Disk (r in [0, R1]) or annulus (r in [R0, R1]) with polar coordinates
// (r, theta_c), theta_c in R/Z.  Each boundary carries a collar map onto
// (rho, theta) in [1-delta, 1+delta) oriented so dtheta ^ drho is positive
// on the page; the page orientation is dr ^ dtheta_c.
struct PageModel {
  PageKind kind = PageKind::disk;
  double R0 = 0.0;
  double R1 = 1.0;
  double delta = 0.05;

  int boundaries() const { return kind == PageKind::disk ? 1 : 2; }
  // binding 0 = outer boundary (r = R1); binding 1 = inner (r = R0)
  double collar_rho(double r, int b) const;
  double collar_r(double rho, int b) const;
  double theta_sign(int b) const { return b == 0 ? 1.0 : -1.0; }
  bool in_collar(double r, int b) const;
  void validate(const Monodromy& mono) const;
};

// Radial coefficient E(r) of the page 1-form eta = E(r) dtheta_c, with
// eta = (2 - rho) dtheta on every collar and d eta > 0 on the page.
struct EtaProfile {
  PageKind kind = PageKind::disk;
  double R0 = 0, R1 = 1, delta = 0.05;
  double q = 0;            // disk: inner quadratic coefficient
  double r_a = 0, r_b = 0; // disk: blend window
  double C1 = 0;           // outer collar constant 1 + delta - R1
  double C0 = 0;           // annulus inner collar constant -(R0 + 1 + delta)
  double u_lo = 0, u_hi = 0;  // annulus: blend window for C(r)

  double E(double r) const;
  double Ep(double r) const;
  double Epp(double r) const;
  double density_at_center() const { return 2.0 * q; }  // d eta vs dx^dy
};

EtaProfile eta_on_page(const PageModel& page);

// ---------------------------------------------------------------------------
// the closed manifold

struct OpenBookSpec {
  PageModel page;
  Monodromy monodromy;
  ProfileParams profile;
  double epsilon = 0.01;
  double tau_flat = 0.2;  // flat width of the monodromy interpolation ramp

  void validate() const;
};

enum class ChartId : int { mapping_torus = -1, solid_torus_0 = 0, solid_torus_1 = 1 };

// A chart point.  Mapping torus: (r, theta_c, phi); solid torus i:
// (theta, rho, phi).  All angles in R/Z.
struct PointTM {
  ChartId chart = ChartId::solid_torus_0;
  double u0 = 0, u1 = 0, u2 = 0;

  static PointTM mt(double r, double theta_c, double phi) {
    return {ChartId::mapping_torus, r, theta_c, phi};
  }
  static PointTM st(int binding, double theta, double rho, double phi) {
    return {binding == 0 ? ChartId::solid_torus_0 : ChartId::solid_torus_1,
            theta, rho, phi};
  }
};

struct Mat3 {
  double a[3][3] = {};
};

// Values of the structure forms at a point, in the chart coordinate frame
// ((d/dr, d/dtheta_c, d/dphi) on the mapping torus, (d/dtheta, d/drho,
// d/dphi) on a solid torus).
struct FormSample {
  std::array<double, 3> lambda{};   // lambda_eps
  Mat3 dlambda;                     // d lambda_eps
  Mat3 omega;                       // omega_0 (taming form, eps independent)
  std::array<double, 3> X{};        // Reeb field of lambda_eps
  double contact_density = 0.0;     // lambda ^ dlambda vs the volume form
};

class ManifoldModel {
 public:
  const OpenBookSpec& spec() const { return spec_; }
  const Profile& profile0() const { return prof0_; }
  const Profile& profile_eps() const { return prof_eps_; }
  const Profile& profile(double eps) const;
  const EtaProfile& eta() const { return eta_; }
  int num_bindings() const { return spec_.page.boundaries(); }

  double tau(double phi) const;
  double tau_p(double phi) const;

  // alpha = tau(phi) psi*eta + (1 - tau(phi)) eta, components (dr, dtheta_c)
  std::array<double, 2> alpha_mt(double r, double phi) const;

  // chart transitions on the gluing overlap rho in [1-delta, 1]
  PointTM to_solid_torus(const PointTM& mt, int binding) const;
  PointTM to_mapping_torus(const PointTM& st) const;
  std::optional<int> collar_binding(double r) const;

  void check_point(const PointTM& pt) const;

  friend ManifoldModel build_manifold(const OpenBookSpec&);

 private:
  ManifoldModel(OpenBookSpec spec, Profile p0, Profile peps, EtaProfile eta)
      : spec_(std::move(spec)),
        prof0_(std::move(p0)),
        prof_eps_(std::move(peps)),
        eta_(eta) {}
  OpenBookSpec spec_;
  Profile prof0_;
  Profile prof_eps_;
  EtaProfile eta_;
};

ManifoldModel build_manifold(const OpenBookSpec& spec);

// Structure forms at a point.  eps = 0 gives the confoliation data; eps > 0
// the contact perturbation (the manifold caches its spec epsilon; other
// values build a transient perturbed profile).
FormSample sample_forms(const ManifoldModel& m, const PointTM& pt, double eps);

std::array<double, 3> lambda_at(const ManifoldModel& m, const PointTM& pt,
                                double eps);
std::array<double, 3> reeb_at(const ManifoldModel& m, const PointTM& pt,
                              double eps);
Mat3 taming_at(const ManifoldModel& m, const PointTM& pt);

// ---------------------------------------------------------------------------
// stable Hamiltonian structure verification

struct GridSpec {
  int n_theta = 50;
  int n_rho = 50;
  int n_phi = 50;
  int n_page = 50;
  double fd_step = 1e-3;

  void validate() const;
};

// Tolerances fixed by the acceptance criteria.
namespace tol {
inline constexpr double kLambdaReeb = 1e-12;   // |lambda(X) - 1|
inline constexpr double kIotaOmega = 1e-9;     // sup |iota_X omega|
inline constexpr double kNumericDOmega = 1e-6; // numerical sup |d omega|
inline constexpr double kDensityRel = 1e-9;    // density vs D, eps = 0
inline constexpr double kInterface = 1e-10;    // omega across interfaces
inline constexpr double kPullback = 1e-9;      // alpha descent consistency
inline constexpr double kBranch = 1e-12;       // ODE branch agreement
inline constexpr double kFoliationMatch = 1e-6;
inline constexpr double kFEpsResidual = 1e-6;  // sup |dF ^ dlambda_eps|
}  // namespace tol

struct SHSReport {
  double eps = 0.0;
  double min_omega_xi = 0.0;
  double sup_iota_X0_omega = 0.0;
  double sup_iota_Xeps_omega = 0.0;
  double sup_numeric_domega = 0.0;
  double sup_lambda_reeb_dev = 0.0;
  double density_min = 0.0;
  double density_max = 0.0;
  // eps = 0 only: density = D(rho) in the solid torus, 0 elsewhere
  double density_vs_D_rel_dev = 0.0;
  double density_zero_region_dev = 0.0;
  bool x_eps_equals_x0_below_collar = false;  // bitwise on rho < 1-delta
  bool x_is_dphi_on_band = false;             // exact on [1-delta', 1-delta)
  double x_eps_colinearity_dev = 0.0;         // mapping torus
  double alpha_pullback_dev = 0.0;
  double f_eps_residual = 0.0;                // sup |dF_eps ^ dlambda_eps|
  double f_eps_mapping_torus = 0.0;           // recovered F on the MT
  double binding_period = 0.0;
  double min_dphi_X_mapping_torus = 0.0;
  bool pass = false;
};

SHSReport verify_shs(const ManifoldModel& m, const GridSpec& grid, double eps);

}  // namespace openbook
