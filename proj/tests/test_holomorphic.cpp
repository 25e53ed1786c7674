#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <openbook/holomorphic.hpp>

#include <cmath>
#include <numbers>

using namespace openbook;

namespace {

OpenBookSpec disk_spec() {
  OpenBookSpec s;
  s.page.kind = PageKind::disk;
  s.page.R1 = 1.0;
  s.profile.c = 0.1;
  s.profile.kappa = KappaSpec{KappaSpec::Family::sqrt2, 2};
  s.epsilon = 0.01;
  s.page.delta = s.profile.delta;
  return s;
}

OpenBookSpec annulus_spec() {
  OpenBookSpec s = disk_spec();
  s.page.kind = PageKind::annulus;
  s.page.R0 = 1.0;
  s.page.R1 = 2.0;
  s.monodromy.twists = {TwistBand{1.3, 1.7, 1}};
  return s;
}

double mat4_dev(const Mat4& A, const Mat4& B) {
  double d = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      d = std::max(d, std::fabs(A.a[i][j] - B.a[i][j]));
  return d;
}

Mat4 mat4_mul(const Mat4& A, const Mat4& B) {
  Mat4 C;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += A.a[i][k] * B.a[k][j];
      C.a[i][j] = s;
    }
  return C;
}

Mat4 minus_id() {
  Mat4 I;
  for (int i = 0; i < 4; ++i) I.a[i][i] = -1.0;
  return I;
}

}  // namespace

TEST_CASE("J0 squares to minus the identity everywhere") {
  const ManifoldModel m = build_manifold(annulus_spec());
  const PointTM pts[] = {
      PointTM::st(0, 0.1, 0.2, 0.3),  PointTM::st(0, 0.6, 0.7, 0.9),
      PointTM::st(1, 0.3, 0.92, 0.1), PointTM::st(0, 0.0, 1.0, 0.0),
      PointTM::mt(1.5, 0.2, 0.5),     PointTM::mt(1.05, 0.9, 0.7),
  };
  for (const PointTM& pt : pts) {
    const AcsSample J = J0_at(m, pt);
    CHECK(mat4_dev(mat4_mul(J.coord_matrix, J.coord_matrix), minus_id()) <=
          1e-12);
    CHECK(mat4_dev(mat4_mul(J.frame_matrix, J.frame_matrix), minus_id()) <=
          1e-12);
  }
}

TEST_CASE("J0 maps da to the Reeb field and preserves xi") {
  const ManifoldModel m = build_manifold(disk_spec());
  const PointTM pt = PointTM::st(0, 0.1, 0.6, 0.3);
  const AcsSample J = J0_at(m, pt);
  const auto X = reeb_at(m, pt, 0.0);
  CHECK(J.coord_matrix.a[1][0] == doctest::Approx(X[0]).epsilon(1e-14));
  CHECK(J.coord_matrix.a[2][0] == doctest::Approx(X[1]).epsilon(1e-14));
  CHECK(J.coord_matrix.a[3][0] == doctest::Approx(X[2]).epsilon(1e-14));

  // J v1 = beta v2 with v1 = drho, v2 = -g dtheta + f dphi; exact above rho2
  const double rho = 0.6;
  const ProfileSample s = m.profile0().eval(rho);
  CHECK(s.beta == 1.0);
  CHECK(J.coord_matrix.a[1][2] == -s.g);
  CHECK(J.coord_matrix.a[3][2] == s.f);

  // lambda(J v) = 0 for v in xi: xi is J-invariant
  const double lam_Jv1 =
      s.f * J.coord_matrix.a[1][2] + s.g * J.coord_matrix.a[3][2];
  CHECK(std::fabs(lam_Jv1) <= 1e-12);
}

TEST_CASE("J0 Cartesian entries near the binding stay bounded at scale") {
  // second differences at a step proportional to rho must be bounded by a
  // constant independent of rho; frozen from the finite-difference scan
  const ManifoldModel m = build_manifold(disk_spec());
  const double twopi = 2.0 * std::numbers::pi;
  auto Jat = [&](double x, double y) {
    const double rr = std::hypot(x, y);
    double ph = std::atan2(y, x) / twopi;
    if (ph < 0) ph += 1.0;
    return J0_at(m, PointTM::st(0, 0.25, rr, ph)).cartesian;
  };
  double bound[2], entry_bound[2];
  int idx = 0;
  for (double rho0 : {1e-2, 1e-3}) {
    const double hc = rho0 / 8.0;
    double maxd2 = 0.0, maxentry = 0.0;
    for (int axis = 0; axis < 2; ++axis)
      for (int i = -1; i <= 1; ++i) {
        auto at = [&](int off) {
          const double d = (i + off) * hc;
          return axis == 0 ? Jat(rho0 + d, 0.0) : Jat(rho0, d);
        };
        const Mat4 A = at(-1), B = at(0), C = at(1);
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) {
            maxd2 = std::max(
                maxd2, std::fabs(A.a[a][b] - 2.0 * B.a[a][b] + C.a[a][b]));
            maxentry = std::max(maxentry, std::fabs(B.a[a][b]));
          }
      }
    bound[idx] = maxd2;
    entry_bound[idx] = maxentry;
    ++idx;
  }
  // frozen oracle values: 0.1884 and max entry 1/c = 10 at both scales
  CHECK(bound[0] <= 1.0);
  CHECK(bound[1] <= 1.0);
  CHECK(bound[1] <= 4.0 * bound[0] + 1e-9);  // no blow-up toward rho = 0
  CHECK(entry_bound[0] <= 2.0 / m.profile0().f(0.0));
  CHECK(entry_bound[1] <= 2.0 / m.profile0().f(0.0));
}

TEST_CASE("half cylinder: collar phase is exact") {
  const Profile p = build_profile(disk_spec().profile);
  const HalfCylinderSolution sol = solve_half_cylinder(p, 2.5, 0.0, 200.0, 1e-12);
  // rho(s) = 1 - s and a = a0 on s in [0, delta]
  for (size_t i = 0; i < sol.s.size() && sol.s[i] <= 0.05; ++i) {
    CHECK(std::fabs(sol.rho[i] - (1.0 - sol.s[i])) <= 1e-12);
    CHECK(sol.a[i] == 2.5);
  }
  // a holds a0 wherever rho >= 1 - delta
  for (size_t i = 0; i < sol.s.size(); ++i)
    if (sol.rho[i] >= 0.95) CHECK(sol.a[i] == 2.5);
}

TEST_CASE("half cylinder: branch agreement on the overlap") {
  const Profile p = build_profile(disk_spec().profile);
  const HalfCylinderSolution sol = solve_half_cylinder(p, 0.0, 0.0, 200.0, 1e-12);
  double dev = 0.0;
  int n = 0;
  for (size_t i = 0; i < sol.s.size(); ++i) {
    const double rho = sol.rho[i];
    if (rho >= 0.9 && rho < 0.95) {
      dev = std::max(dev, std::fabs(cylinder_rhs_generic(p, rho) -
                                    cylinder_rhs_collar()));
      ++n;
    }
  }
  CHECK(n > 0);
  CHECK(dev <= tol::kBranch);
}

TEST_CASE("half cylinder: asymptotics") {
  const Profile p = build_profile(disk_spec().profile);
  const HalfCylinderSolution sol =
      solve_half_cylinder(p, 0.0, 0.0, 1500.0, 1e-12);
  CHECK(sol.fit.samples >= 8);
  CHECK(std::fabs(sol.fit.exponent - p.kappa()) <= 1e-3);
  // a(s)/s -> c with relative error <= 1e-3 at the far tail
  const double c = p.params().c;
  CHECK(std::fabs(sol.a_at(1e5) / 1e5 - c) <= 1e-3 * c);
  // rho strictly decreasing and positive, a nondecreasing; strict rho
  // monotonicity also makes the sampled curve an embedded surface sample
  for (size_t i = 1; i < sol.s.size(); ++i) {
    CHECK(sol.rho[i] < sol.rho[i - 1]);
    CHECK(sol.rho[i] > 0.0);
    CHECK(sol.a[i] >= sol.a[i - 1]);
  }
  // inversion round trip
  for (double rho : {0.9, 0.5, 0.1, 1e-4}) {
    const double s = sol.s_of_rho(rho);
    CHECK(sol.rho_at(s) == doctest::Approx(rho).epsilon(1e-9));
  }
  CHECK_THROWS_AS(static_cast<void>(solve_half_cylinder(p, 0, 0, -1.0, 1e-12)),
                  std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(solve_half_cylinder(p, 0, 0, 10.0, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("R-invariance: shifting a0 shifts a bitwise") {
  const Profile p = build_profile(disk_spec().profile);
  const HalfCylinderSolution base = solve_half_cylinder(p, 0.0, 0.0, 300.0, 1e-12);
  const double sigma = 17.25;
  const HalfCylinderSolution moved =
      solve_half_cylinder(p, sigma, 0.0, 300.0, 1e-12);
  REQUIRE(base.s.size() == moved.s.size());
  for (size_t i = 0; i < base.s.size(); ++i) {
    CHECK(moved.s[i] == base.s[i]);
    CHECK(moved.rho[i] == base.rho[i]);
    CHECK(moved.a[i] == base.a[i] + sigma);
  }
}

TEST_CASE("cr_residual: Richardson order 2") {
  const Profile p = build_profile(disk_spec().profile);
  const MapSamples u1 =
      sample_half_cylinder_map(p, 0.0, 0.0, -0.025, 60.0, 1e-2, 1e-12);
  const MapSamples u2 =
      sample_half_cylinder_map(p, 0.0, 0.0, -0.025, 60.0, 5e-3, 1e-12);
  const ResidualField r1 = cr_residual(u1, p);
  const ResidualField r2 = cr_residual(u2, p);
  const double ratio = r1.sup_all / r2.sup_all;
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("cr_residual: flat page band has zero residual") {
  const Profile p = build_profile(disk_spec().profile);
  // a, phi constant and theta = t over the collar band: the reduced system
  // holds exactly
  MapSamples u;
  u.ns = 21;
  u.nt = 16;
  const double h = 1.0 / u.nt;
  for (int i = 0; i < u.ns; ++i) u.s.push_back(-0.02 + 0.002 * i);
  for (int j = 0; j < u.nt; ++j) u.t.push_back(h * j);
  for (int i = 0; i < u.ns; ++i)
    for (int j = 0; j < u.nt; ++j) {
      u.a.push_back(1.0);
      u.theta.push_back(u.t[j]);
      u.rho.push_back(1.0 - u.s[i]);
      u.phi.push_back(0.25);
    }
  const ResidualField r = cr_residual(u, p);
  CHECK(r.sup_all <= 1e-13);
}

TEST_CASE("cr_residual: corrupted map is flagged") {
  const Profile p = build_profile(disk_spec().profile);
  MapSamples u = sample_half_cylinder_map(p, 0.0, 0.0, 0.0, 30.0, 1e-2, 1e-12);
  for (int i = 0; i < u.ns; ++i)
    for (int j = 0; j < u.nt; ++j)
      u.a[static_cast<size_t>(i) * u.nt + j] += 0.1 * u.s[i] * u.s[i];
  const ResidualField r = cr_residual(u, p);
  CHECK(r.sup_all > 1e-2);

  MapSamples tiny;
  tiny.ns = 2;
  tiny.nt = 2;
  tiny.s = {0.0, 1.0};
  tiny.t = {0.0, 0.5};
  tiny.a = tiny.theta = tiny.rho = tiny.phi = {1, 1, 1, 1};
  CHECK_THROWS_AS(static_cast<void>(cr_residual(tiny, p)), std::domain_error);
}

TEST_CASE("assemble_page_curve") {
  const ManifoldModel disk = build_manifold(disk_spec());
  const PageCurve c1 = assemble_page_curve(disk, 0.25, 1.0, 300.0, 1e-12);
  CHECK(c1.cylinders.size() == 1);
  CHECK(c1.cylinders[0].a[0] == 1.0);  // junction: a = a0 at rho = 1
  CHECK(c1.cylinders[0].phi0 == 0.25);
  // positive end: a grows linearly toward the puncture
  CHECK(c1.cylinders[0].a.back() > 1.0);

  const ManifoldModel ann = build_manifold(annulus_spec());
  const PageCurve c2 = assemble_page_curve(ann, 0.0, 0.0, 300.0, 1e-12);
  CHECK(c2.cylinders.size() == 2);

  CHECK_THROWS_AS(
      static_cast<void>(assemble_page_curve(disk, 1.5, 0.0, 300.0, 1e-12)),
      std::invalid_argument);
}

TEST_CASE("omega energy") {
  const ManifoldModel m = build_manifold(disk_spec());
  const PageCurve curve = assemble_page_curve(m, 0.0, 0.0, 1500.0, 1e-12);
  const EnergyBreakdown e = omega_energy(curve, m);

  CHECK(e.total >= 0.0);
  CHECK(e.quad_error <= 0.01 * e.total);

  // flat part equals the d eta area of the trimmed fiber: by Stokes this is
  // the collar value E(R - delta) = 1 for the disk
  const double expected =
      m.eta().E(m.spec().page.R1 - m.spec().page.delta);
  CHECK(e.flat == doctest::Approx(expected).epsilon(1e-6));

  // tail decays like exp(2 kappa s1) within a factor 2
  const HalfCylinderSolution& sol = curve.cylinders[0];
  const double kappa = sol.kappa;
  double ref = 0.0;
  bool first = true;
  for (double s1 : {700.0, 750.0, 800.0}) {
    const double rho1 = sol.rho_at(s1);
    const double tail = -kappa * rho1 * rho1;  // f(0) - f(rho1)
    const double scaled = tail / std::exp(2.0 * kappa * s1);
    if (first) {
      ref = scaled;
      first = false;
    } else {
      CHECK(scaled / ref <= 2.0);
      CHECK(scaled / ref >= 0.5);
    }
  }
}

TEST_CASE("foliation sampling") {
  const ManifoldModel m = build_manifold(disk_spec());
  const FoliationReport rep = foliation_sample(m, 8, 10000, 1500.0, 1e-12);
  CHECK(rep.pass);
  CHECK(rep.leaves_disjoint);
  CHECK(rep.min_pairwise_distance == doctest::Approx(1.0 / 8).epsilon(1e-12));
  CHECK(rep.max_match_error <= tol::kFoliationMatch);
  CHECK(rep.unique_match_all);
  CHECK(rep.min_transversality > 0.0);
  CHECK_THROWS_AS(static_cast<void>(foliation_sample(m, 1, 10, 300.0, 1e-12)),
                  std::invalid_argument);
}
