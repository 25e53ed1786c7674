#pragma once

#include <openbook/geometry.hpp>

#include <array>
#include <vector>

namespace openbook {

struct Mat4 {
  double a[4][4] = {};
};

// J0 at a point of R x M.  coord_matrix is in the chart coordinate frame
// (d/da, d/dtheta, d/drho, d/dphi) on a solid torus, (d/da, d/dr,
// d/dtheta_c, d/dphi) on the mapping torus.  frame_matrix is in
// (d/da, X0, e1, e2) with (e1, e2) = (drho, -g dtheta + f dphi) on a solid
// torus and the fiber frame on the mapping torus.  cartesian holds the
// matrix in (d/da, d/dtheta, d/dx, d/dy) with x + iy = rho e^{2 pi i phi};
// it is valid at solid torus points with rho > 0.
struct AcsSample {
  Mat4 frame_matrix;
  Mat4 coord_matrix;
  Mat4 cartesian;
  bool cartesian_valid = false;
};

AcsSample J0_at(const ManifoldModel& m, const PointTM& pt);

// ---------------------------------------------------------------------------
// the reduced holomorphic-curve ODE:  da/ds = f(rho),
// drho/ds = f'/(beta D) for rho < 1-delta and -1 for rho >= 1-delta'.

struct AsymptoticFit {
  double exponent = 0.0;  // least-squares slope of log rho(s) on the tail
  double a_slope = 0.0;   // (a(s2)-a(s1))/(s2-s1) on the tail window
  double s_lo = 0.0, s_hi = 0.0;
  int samples = 0;
};

struct HalfCylinderSolution {
  double a0 = 0.0;
  double phi0 = 0.0;
  std::vector<double> s;      // accepted step endpoints, s[0] = 0
  std::vector<double> a;      // a(s_i) with the a0 offset applied
  std::vector<double> rho;    // rho(s_i), strictly decreasing from 1
  std::vector<double> drho;   // rho'(s_i), for monotone Hermite inversion
  std::vector<int> branch;    // 1 = generic, 2 = rho' = -1 region
  std::vector<double> local_error;
  AsymptoticFit fit;
  double kappa = 0.0;
  double c = 0.0;

  double s_end() const { return s.back(); }
  double rho_end() const { return rho.back(); }

  // Evaluation beyond s_end uses the asymptotic tail
  // rho(s) = rho_end * exp(kappa (s - s_end)).
  double rho_at(double s_query) const;
  double a_at(double s_query) const;
  double s_of_rho(double rho_query) const;  // inverse, rho in (0, 1]
};

// Integrates the half cylinder from rho(0) = 1 with an embedded 4(5) pair
// until rho < 1e-6 or s = s_max; local error per step <= tol.
HalfCylinderSolution solve_half_cylinder(const Profile& p, double a0,
                                         double phi0, double s_max,
                                         double tol);

// right-hand sides of the two branches, exposed for consistency checks
double cylinder_rhs_generic(const Profile& p, double rho);   // f'/(beta D)
double cylinder_rhs_collar();                                // -1

// ---------------------------------------------------------------------------
// Cauchy-Riemann residuals of a sampled map

// Rectangular (s, t) grid of map values into R x (solid torus + collar),
// row-major a[i*nt + j] for (s_i, t_j).  theta and phi are R/Z valued;
// differences are taken with minimal-image wrapping.
struct MapSamples {
  int ns = 0, nt = 0;
  std::vector<double> s, t;
  std::vector<double> a, theta, rho, phi;

  double& at(std::vector<double>& v, int i, int j) { return v[i * nt + j]; }
};

struct ResidualField {
  int ns = 0, nt = 0;
  double hs = 0.0, ht = 0.0;
  // sup norm per equation: a_s, a_t, rho_s, rho_t rows of the system
  std::array<double, 4> sup{};
  double sup_all = 0.0;
};

ResidualField cr_residual(const MapSamples& u, const Profile& p);

// Samples the solved half cylinder on a uniform grid with step h in both
// directions, s in [s_lo, s_hi]; integrates to every node (no interpolation).
MapSamples sample_half_cylinder_map(const Profile& p, double a0, double phi0,
                                    double s_lo, double s_hi, double h,
                                    double tol);

// ---------------------------------------------------------------------------
// page curves and the foliation

struct PageCurve {
  double a0 = 0.0;
  double phi0 = 0.0;
  std::vector<HalfCylinderSolution> cylinders;  // one per binding
};

PageCurve assemble_page_curve(const ManifoldModel& m, double phi0, double a0,
                              double s_max, double tol);

struct EnergyBreakdown {
  double flat = 0.0;       // d eta area of the trimmed fiber
  double cylinders = 0.0;  // quadrature over the half cylinders
  double tail = 0.0;       // analytic bound for s > s_end
  double total = 0.0;
  double quad_error = 0.0;  // trapezoid refinement estimate
};

EnergyBreakdown omega_energy(const PageCurve& curve, const ManifoldModel& m);

struct FoliationReport {
  int n_pages = 0;
  int n_points = 0;
  double min_pairwise_distance = 0.0;
  double max_match_error = 0.0;
  bool unique_match_all = false;
  double min_transversality = 0.0;
  bool leaves_disjoint = false;
  bool pass = false;
};

// Builds the leaf family phi0 = j/n_pages, checks disjointness, point
// coverage by parameter inversion for n_points random points of M minus the
// binding, and transversality of the leaf projections to the Reeb field.
FoliationReport foliation_sample(const ManifoldModel& m, int n_pages,
                                 int n_points, double s_max, double tol);

}  // namespace openbook
