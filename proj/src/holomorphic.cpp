#include <openbook/holomorphic.hpp>

#include <openbook/blend.hpp>
#include <openbook/odeint.hpp>
#include <openbook/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace openbook {

// ---------------------------------------------------------------------------
// J0

namespace {

Mat4 mul(const Mat4& A, const Mat4& B) {
  Mat4 C;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += A.a[i][k] * B.a[k][j];
      C.a[i][j] = s;
    }
  return C;
}

// Page complex structure scaling: j dr = B(r) dtheta_c.  B = 1/(2 pi r)
// near the disk center (the standard structure in Cartesian page
// coordinates) ramped to 1 before the collar; identically 1 on an annulus.
double page_B(const ManifoldModel& m, double r) {
  if (m.spec().page.kind == PageKind::annulus) return 1.0;
  const double twopi = 2.0 * std::numbers::pi;
  const double rb = m.spec().page.R1 - 2.0 * m.spec().page.delta;
  const double b1 = 0.3 * rb, b2 = 0.6 * rb;
  if (r >= b2) return 1.0;
  const double b0 = 1.0 / (twopi * r);
  if (r <= b1) return b0;
  const double w = ramp_eval((r - b1) / (b2 - b1)).w;
  return b0 + w * (1.0 - b0);
}

}  // namespace

AcsSample J0_at(const ManifoldModel& m, const PointTM& pt) {
  m.check_point(pt);
  AcsSample out;
  const Profile& p = m.profile0();

  if (pt.chart == ChartId::mapping_torus) {
    const double r = pt.u0, phi = pt.u2;
    if (r == 0.0)
      throw std::domain_error("J0_at: polar page frame degenerates at r = 0");
    const double B = page_B(m, r);
    // X0 = dphi + v_theta dtheta_c (vertical correction for twists)
    double v_theta = 0.0;
    if (!m.spec().monodromy.is_identity()) {
      const double tp = m.tau_p(phi);
      const double mu = m.eta().E(r) * m.spec().monodromy.shift_p(r);
      if (tp != 0.0 && mu != 0.0) v_theta = tp * mu / m.eta().Ep(r);
    }
    Mat4& J = out.coord_matrix;  // frame (da, dr, dtheta_c, dphi)
    // J da = X0
    J.a[2][0] = v_theta;
    J.a[3][0] = 1.0;
    // J dphi = J(X0 - v_theta dtheta_c) = -da + v_theta (1/B) dr
    J.a[0][3] = -1.0;
    J.a[1][3] = v_theta / B;
    // J dr = B dtheta_c ; J dtheta_c = -(1/B) dr
    J.a[2][1] = B;
    J.a[1][2] = -1.0 / B;
    // frame matrix in (da, X0, dr, dtheta_c)
    Mat4& F = out.frame_matrix;
    F.a[1][0] = 1.0;
    F.a[0][1] = -1.0;
    F.a[3][2] = B;
    F.a[2][3] = -1.0 / B;
    return out;
  }

  const double rho = pt.u1;
  const double s1 = 1.0 - m.spec().profile.delta_prime;
  const double f = p.f(rho), g = p.g(rho);
  const double beta = p.beta(rho);
  double ratio_f, ratio_g;  // f'/(beta D), g'/(beta D)
  double X_theta, X_phi;    // Reeb components
  if (rho >= s1) {
    ratio_f = -1.0;
    ratio_g = 0.0;
    X_theta = 0.0;
    X_phi = 1.0;
  } else {
    const double fp = p.fp(rho), gp = p.gp(rho);
    const double D = f * gp - fp * g;
    ratio_f = fp / (beta * D);
    ratio_g = gp / (beta * D);
    X_theta = gp / D;
    X_phi = -fp / D;
  }

  Mat4& J = out.coord_matrix;  // frame (da, dtheta, drho, dphi)
  // J da = X0
  J.a[1][0] = X_theta;
  J.a[3][0] = X_phi;
  // J dtheta = -f da - (f'/(beta D)) drho
  J.a[0][1] = -f;
  J.a[2][1] = -ratio_f;
  // J drho = beta (-g dtheta + f dphi)
  J.a[1][2] = -beta * g;
  J.a[3][2] = beta * f;
  // J dphi = -g da - (g'/(beta D)) drho
  J.a[0][3] = -g;
  J.a[2][3] = -ratio_g;

  Mat4& F = out.frame_matrix;  // (da, X0, v1, v2)
  F.a[1][0] = 1.0;
  F.a[0][1] = -1.0;
  F.a[3][2] = beta;
  F.a[2][3] = -1.0 / beta;

  if (rho > 0.0) {
    // basis change to (da, dtheta, dx, dy), x + iy = rho e^{2 pi i phi}
    const double twopi = 2.0 * std::numbers::pi;
    const double x = rho * std::cos(twopi * pt.u2);
    const double y = rho * std::sin(twopi * pt.u2);
    Mat4 Bm{}, Bi{};
    Bm.a[0][0] = Bi.a[0][0] = 1.0;
    Bm.a[1][1] = Bi.a[1][1] = 1.0;
    // columns of Bm: (dx, dy) in (drho, dphi) components
    Bm.a[2][2] = x / rho;
    Bm.a[3][2] = -y / (twopi * rho * rho);
    Bm.a[2][3] = y / rho;
    Bm.a[3][3] = x / (twopi * rho * rho);
    // columns of Bi: (drho, dphi) in (dx, dy) components
    Bi.a[2][2] = x / rho;
    Bi.a[3][2] = y / rho;
    Bi.a[2][3] = -twopi * y;
    Bi.a[3][3] = twopi * x;
    out.cartesian = mul(Bi, mul(J, Bm));
    out.cartesian_valid = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// half cylinders

double cylinder_rhs_generic(const Profile& p, double rho) {
  const ProfileSample s = p.eval(rho);
  return s.fp / (s.beta * s.D);
}

double cylinder_rhs_collar() { return -1.0; }

namespace {

struct CylinderRhs {
  const Profile* p;
  double s1;  // 1 - delta'
  double s2;  // 1 - delta

  int branch_for(double rho) const { return rho >= s1 ? 2 : 1; }
  void operator()(double, const std::array<double, 2>& y,
                  std::array<double, 2>& dy) const {
    const double rho = y[1];
    if (rho >= s1) {
      dy[0] = p->f(rho);
      dy[1] = -1.0;
    } else {
      const double rr = std::max(rho, 1e-300);
      dy[0] = p->f(rr);
      dy[1] = cylinder_rhs_generic(*p, rr);
    }
  }
};

void fit_tail(HalfCylinderSolution& sol) {
  // least-squares slope of log rho over the window rho in [1e-5, 5e-2]
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  double lo = 0, hi = 0, a_lo = 0, a_hi = 0;
  for (size_t i = 0; i < sol.s.size(); ++i) {
    const double r = sol.rho[i];
    if (r > 5e-2 || r < 1e-5) continue;
    const double x = sol.s[i], y = std::log(r);
    if (n == 0) {
      lo = x;
      a_lo = sol.a[i];
    }
    hi = x;
    a_hi = sol.a[i];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n >= 8) {
    sol.fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    sol.fit.a_slope = (a_hi - a_lo) / (hi - lo);
    sol.fit.s_lo = lo;
    sol.fit.s_hi = hi;
    sol.fit.samples = n;
  }
}

}  // namespace

HalfCylinderSolution solve_half_cylinder(const Profile& p, double a0,
                                         double phi0, double s_max,
                                         double tol) {
  if (!(s_max > 0.0)) throw std::invalid_argument("solve: s_max <= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("solve: tol <= 0");

  HalfCylinderSolution sol;
  sol.a0 = a0;
  sol.phi0 = phi0;
  sol.kappa = p.kappa();
  sol.c = p.params().c;

  CylinderRhs rhs{&p, 1.0 - p.params().delta_prime, 1.0 - p.params().delta};
  Dopri5<2> ode;
  ode.atol = tol;
  ode.rtol = tol;
  ode.h_init = 1e-4;
  ode.h_max = 5.0;
  ode.rhs = [&rhs](double s, const std::array<double, 2>& y,
                   std::array<double, 2>& dy) { rhs(s, y, dy); };

  std::array<double, 2> y{0.0, 1.0};  // integrate with a0 = 0, offset later
  double s = 0.0;
  auto record = [&](double sv, const std::array<double, 2>& yv, double err) {
    sol.s.push_back(sv);
    sol.a.push_back(a0 + yv[0]);
    sol.rho.push_back(yv[1]);
    std::array<double, 2> dy;
    rhs(sv, yv, dy);
    sol.drho.push_back(dy[1]);
    sol.branch.push_back(rhs.branch_for(yv[1]));
    sol.local_error.push_back(err);
  };
  record(0.0, y, 0.0);

  const double rho_stop = 1e-6;
  bool stopped = false;
  // march in outer chunks so the stop condition is polled cheaply
  while (s < s_max && !stopped) {
    const double s_next = std::min(s_max, s + 5.0);
    ode.integrate_to(s, y, s_next, [&](const Dopri5<2>::StepInfo& info) {
      if (!(info.y[1] < sol.rho.back()))
        throw std::runtime_error("half cylinder: rho not decreasing");
      record(info.s, info.y, info.err);
    });
    if (y[1] < rho_stop) stopped = true;
    if (y[1] <= 0.0)
      throw std::runtime_error("half cylinder: rho left (0, 1]");
  }
  fit_tail(sol);
  return sol;
}

double HalfCylinderSolution::rho_at(double s_query) const {
  if (s_query >= s_end())
    return rho.back() * std::exp(kappa * (s_query - s_end()));
  if (s_query <= s.front()) return 1.0 - s_query;  // collar continuation
  // Hermite interpolation on the bracketing accepted step
  const auto it = std::upper_bound(s.begin(), s.end(), s_query);
  const size_t i = static_cast<size_t>(it - s.begin()) - 1;
  const double h = s[i + 1] - s[i];
  const double u = (s_query - s[i]) / h;
  const double p0 = rho[i], p1 = rho[i + 1];
  const double m0 = drho[i] * h, m1 = drho[i + 1] * h;
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * m0 +
         (-2 * u3 + 3 * u2) * p1 + (u3 - u2) * m1;
}

double HalfCylinderSolution::a_at(double s_query) const {
  if (s_query <= s.front()) return a0;  // f = 0 on the collar
  if (s_query >= s_end()) {
    const double d = s_query - s_end();
    const double re = rho.back();
    // a' = f = c + kappa rho^2 on the tail
    const double tail_quad =
        re * re * (std::exp(2.0 * kappa * d) - 1.0) / 2.0;
    return a.back() + c * d + tail_quad;
  }
  const auto it = std::upper_bound(s.begin(), s.end(), s_query);
  const size_t i = static_cast<size_t>(it - s.begin()) - 1;
  const double u = (s_query - s[i]) / (s[i + 1] - s[i]);
  return a[i] + u * (a[i + 1] - a[i]);
}

double HalfCylinderSolution::s_of_rho(double rho_query) const {
  if (!(rho_query > 0.0 && rho_query <= 1.0))
    throw std::domain_error("s_of_rho: rho outside (0, 1]");
  if (rho_query <= rho.back())
    return s_end() + std::log(rho_query / rho.back()) / kappa;
  // rho decreasing: binary search
  size_t lo = 0, hi = rho.size() - 1;
  while (hi - lo > 1) {
    const size_t mid = (lo + hi) / 2;
    if (rho[mid] >= rho_query)
      lo = mid;
    else
      hi = mid;
  }
  // refine by bisection on the Hermite interpolant
  double slo = s[lo], shi = s[hi];
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (slo + shi);
    if (rho_at(mid) >= rho_query)
      slo = mid;
    else
      shi = mid;
  }
  return 0.5 * (slo + shi);
}

// ---------------------------------------------------------------------------
// Cauchy-Riemann residuals

namespace {

inline double wrap_diff(double d) {
  // minimal-image difference for R/Z-valued samples
  d -= std::round(d);
  return d;
}

}  // namespace

MapSamples sample_half_cylinder_map(const Profile& p, double a0, double phi0,
                                    double s_lo, double s_hi, double h,
                                    double tol) {
  MapSamples u;
  u.ns = static_cast<int>(std::round((s_hi - s_lo) / h)) + 1;
  u.nt = static_cast<int>(std::round(1.0 / h));
  u.s.resize(u.ns);
  u.t.resize(u.nt);
  for (int i = 0; i < u.ns; ++i) u.s[i] = s_lo + h * i;
  for (int j = 0; j < u.nt; ++j) u.t[j] = h * j;
  u.a.resize(static_cast<size_t>(u.ns) * u.nt);
  u.theta.resize(u.a.size());
  u.rho.resize(u.a.size());
  u.phi.resize(u.a.size());

  // integrate to every s node exactly, starting above the junction where
  // rho(s) = 1 - s holds in closed form
  CylinderRhs rhs{&p, 1.0 - p.params().delta_prime, 1.0 - p.params().delta};
  Dopri5<2> ode;
  ode.atol = tol;
  ode.rtol = tol;
  ode.h_init = 1e-4;
  ode.rhs = [&rhs](double s, const std::array<double, 2>& y,
                   std::array<double, 2>& dy) { rhs(s, y, dy); };

  std::vector<double> a_of_s(u.ns), rho_of_s(u.ns);
  const double delta = p.params().delta;
  if (u.s.front() < -delta)
    throw std::domain_error("sample_half_cylinder_map: s_lo below -delta");
  // nodes inside [s_lo, delta/2] sit in the linear region rho = 1 - s
  int i0 = -1;
  for (int i = 0; i < u.ns; ++i) {
    if (u.s[i] <= 0.5 * delta) {
      a_of_s[i] = 0.0;
      rho_of_s[i] = 1.0 - u.s[i];
      i0 = i;
    }
  }
  std::array<double, 2> y{0.0, 1.0};
  double s = 0.0;
  if (i0 >= 0) {
    y = {0.0, rho_of_s[i0]};
    s = u.s[i0];
  }
  for (int i = std::max(i0 + 1, 0); i < u.ns; ++i) {
    ode.integrate_to(s, y, u.s[i], [](const Dopri5<2>::StepInfo&) {});
    a_of_s[i] = y[0];
    rho_of_s[i] = y[1];
  }
  for (int i = 0; i < u.ns; ++i)
    for (int j = 0; j < u.nt; ++j) {
      const size_t k = static_cast<size_t>(i) * u.nt + j;
      u.a[k] = a0 + a_of_s[i];
      u.theta[k] = u.t[j];
      u.rho[k] = rho_of_s[i];
      u.phi[k] = phi0;
    }
  return u;
}

ResidualField cr_residual(const MapSamples& u, const Profile& p) {
  if (u.ns < 3 || u.nt < 3)
    throw std::domain_error("cr_residual: grid needs >= 3 points per axis");
  ResidualField rf;
  rf.ns = u.ns;
  rf.nt = u.nt;
  rf.hs = u.s[1] - u.s[0];
  rf.ht = u.t[1] - u.t[0];
  const double s1 = 1.0 - p.params().delta_prime;

  auto idx = [&u](int i, int j) {
    return static_cast<size_t>(i) * u.nt + ((j % u.nt + u.nt) % u.nt);
  };
  for (int i = 1; i + 1 < u.ns; ++i) {
    for (int j = 0; j < u.nt; ++j) {
      const size_t k = idx(i, j);
      const double rho = u.rho[k];
      if (!(rho < 1.0 + p.params().delta - 1e-12)) continue;
      // centered differences; t direction periodic with minimal image for
      // the circle-valued components
      const double as = (u.a[idx(i + 1, j)] - u.a[idx(i - 1, j)]) / (2 * rf.hs);
      const double at = (u.a[idx(i, j + 1)] - u.a[idx(i, j - 1)]) / (2 * rf.ht);
      const double rs =
          (u.rho[idx(i + 1, j)] - u.rho[idx(i - 1, j)]) / (2 * rf.hs);
      const double rt =
          (u.rho[idx(i, j + 1)] - u.rho[idx(i, j - 1)]) / (2 * rf.ht);
      const double ths =
          wrap_diff(u.theta[idx(i + 1, j)] - u.theta[idx(i - 1, j)]) /
          (2 * rf.hs);
      const double tht =
          wrap_diff(u.theta[idx(i, j + 1)] - u.theta[idx(i, j - 1)]) /
          (2 * rf.ht);
      const double phs =
          wrap_diff(u.phi[idx(i + 1, j)] - u.phi[idx(i - 1, j)]) / (2 * rf.hs);
      const double pht =
          wrap_diff(u.phi[idx(i, j + 1)] - u.phi[idx(i, j - 1)]) / (2 * rf.ht);

      const ProfileSample ps = p.eval(rho);
      const double r1 = as - (ps.f * tht + ps.g * pht);
      const double r2 = at + ps.f * ths + ps.g * phs;
      double r3, r4;
      if (rho >= s1) {  // reduced system: g' = 0, g = beta = 1
        r3 = rs + tht;
        r4 = rt - ths;
      } else {  // rho < s1 < s2: the generic system applies
        const double bd = ps.beta * ps.D;
        r3 = rs - (ps.fp * tht + ps.gp * pht) / bd;
        r4 = rt + (ps.fp * ths + ps.gp * phs) / bd;
      }
      rf.sup[0] = std::max(rf.sup[0], std::fabs(r1));
      rf.sup[1] = std::max(rf.sup[1], std::fabs(r2));
      rf.sup[2] = std::max(rf.sup[2], std::fabs(r3));
      rf.sup[3] = std::max(rf.sup[3], std::fabs(r4));
    }
  }
  rf.sup_all = std::max(std::max(rf.sup[0], rf.sup[1]),
                        std::max(rf.sup[2], rf.sup[3]));
  return rf;
}

// ---------------------------------------------------------------------------
// page curves

PageCurve assemble_page_curve(const ManifoldModel& m, double phi0, double a0,
                              double s_max, double tol) {
  if (!(phi0 >= 0.0 && phi0 < 1.0))
    throw std::invalid_argument("assemble_page_curve: phi0 outside [0,1)");
  PageCurve curve;
  curve.a0 = a0;
  curve.phi0 = phi0;
  for (int b = 0; b < m.num_bindings(); ++b) {
    HalfCylinderSolution sol =
        solve_half_cylinder(m.profile0(), a0, phi0, s_max, tol);
    if (sol.phi0 != phi0)
      throw std::invalid_argument("assemble_page_curve: phi0 mismatch");
    curve.cylinders.push_back(std::move(sol));
  }
  return curve;
}

EnergyBreakdown omega_energy(const PageCurve& curve, const ManifoldModel& m) {
  EnergyBreakdown e;
  const Profile& p = m.profile0();
  const double delta = m.spec().page.delta;
  const double R0 = m.spec().page.R0, R1 = m.spec().page.R1;

  // flat part: d eta over the fiber trimmed at the junction circle rho = 1
  // (collar radius r = R - delta on each boundary), 2-d grid quadrature
  auto flat_quad = [&](int nr) {
    const double lo = m.spec().page.kind == PageKind::disk ? 0.0 : R0 + delta;
    const double hi = R1 - delta;
    double sum = 0.0;
    for (int i = 0; i < nr; ++i) {
      const double r = lo + (hi - lo) * (i + 0.5) / nr;
      // d eta = E'(r) dr ^ dtheta; theta integrates to 1
      sum += m.eta().Ep(r) * (hi - lo) / nr;
    }
    return sum;
  };
  const double flat1 = flat_quad(2048);
  const double flat2 = flat_quad(4096);
  e.flat = flat2;
  e.quad_error = std::fabs(flat2 - flat1);

  // cylinder parts: u* omega = omega(rho' drho, dtheta) ds dt
  for (const HalfCylinderSolution& sol : curve.cylinders) {
    auto density = [&](size_t i) {
      const double rho = sol.rho[i];
      const double rp = sol.drho[i];
      const double s1 = 1.0 - m.spec().profile.delta_prime;
      const double s2 = 1.0 - delta;
      double w_tr;  // omega_{theta rho}
      if (rho < s1)
        w_tr = -p.fp(rho);
      else if (rho < s2)
        w_tr = p.h(rho);
      else
        w_tr = 1.0;
      return -rp * w_tr;  // omega(rho' drho, dtheta) = -rho' w_tr
    };
    double sum = 0.0, sum_half = 0.0;
    for (size_t i = 0; i + 1 < sol.s.size(); ++i) {
      const double ds = sol.s[i + 1] - sol.s[i];
      sum += 0.5 * (density(i) + density(i + 1)) * ds;
      if (i % 2 == 0 && i + 2 < sol.s.size())
        sum_half += 0.5 * (density(i) + density(i + 2)) *
                    (sol.s[i + 2] - sol.s[i]);
    }
    e.cylinders += sum;
    e.quad_error += std::fabs(sum - sum_half);
    // analytic tail: integral of f' rho' ds from s_end on = f(0) - f(rho_end)
    e.tail += p.f(0.0) - p.f(sol.rho_end());
  }
  e.total = e.flat + e.cylinders + e.tail;
  return e;
}

// ---------------------------------------------------------------------------
// foliation

namespace {

inline double circ_dist(double a, double b) {
  double d = std::fabs(a - b);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

// deterministic uniform doubles from splitmix-style mixing
struct DetRng {
  std::uint64_t state;
  explicit DetRng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next_u64() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }
};

}  // namespace

FoliationReport foliation_sample(const ManifoldModel& m, int n_pages,
                                 int n_points, double s_max, double tol) {
  if (n_pages < 2) throw std::invalid_argument("foliation: n_pages < 2");
  FoliationReport rep;
  rep.n_pages = n_pages;
  rep.n_points = n_points;

  // the trajectory is phi0 independent; one solve serves every leaf
  const HalfCylinderSolution traj =
      solve_half_cylinder(m.profile0(), 0.0, 0.0, s_max, tol);

  // (i) disjointness: distinct phi0 leaves project to disjoint sets since
  // phi is constant on each projection; the pairwise distance in the
  // product metric max(|dtheta|, |drho|, |dphi|) is the phi separation.
  rep.min_pairwise_distance = 1.0;
  for (int i = 0; i < n_pages; ++i) {
    const double d = circ_dist(static_cast<double>(i) / n_pages,
                               static_cast<double>((i + 1) % n_pages) / n_pages);
    rep.min_pairwise_distance = std::min(rep.min_pairwise_distance, d);
  }
  rep.leaves_disjoint = rep.min_pairwise_distance > 0.0;

  // (ii) coverage: invert the (phi0, s) parametrization per random point
  DetRng rng(0x6f70656e626f6f6bull);  // fixed seed
  double max_err = 0.0;
  bool unique_all = true;
  const double rho_floor = 1e-9;
  for (int q = 0; q < n_points; ++q) {
    // draw away from the sampled leaf grid so the 1e-6 ball is unambiguous
    double phi;
    for (;;) {
      phi = rng.uniform();
      double dmin = 1.0;
      for (int j = 0; j < n_pages; ++j)
        dmin = std::min(dmin, circ_dist(phi, static_cast<double>(j) / n_pages));
      if (dmin > 1e-5) break;
    }
    const bool in_st = (q % 2) == 0;
    double err = 0.0;
    if (in_st) {
      const double rho = rho_floor + (1.0 - rho_floor) * rng.uniform();
      const double s_inv = traj.s_of_rho(rho);
      err = std::fabs(traj.rho_at(s_inv) - rho);
    } else {
      // mapping torus point: the phi fiber contains it exactly
      err = 0.0;
      (void)rng.next_u64();
    }
    max_err = std::max(max_err, err);
    // uniqueness: no sampled grid leaf comes within the match tolerance
    int hits = 1;  // the on-demand leaf through phi itself
    for (int j = 0; j < n_pages; ++j)
      if (circ_dist(phi, static_cast<double>(j) / n_pages) <=
          tol::kFoliationMatch)
        ++hits;
    unique_all = unique_all && hits == 1 && err <= tol::kFoliationMatch;
  }
  rep.max_match_error = max_err;
  rep.unique_match_all = unique_all;

  // (iii) transversality of the leaf projections to X0
  double min_det = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < traj.s.size(); ++i) {
    const double rho = traj.rho[i];
    if (rho <= 0.0) continue;
    const PointTM pt = PointTM::st(0, 0.0, std::min(rho, 1.0), 0.0);
    const FormSample fs = sample_forms(m, pt, 0.0);
    // det[u_s, u_t, X] in (theta, rho, phi): u_s = rho' drho, u_t = dtheta
    const double det = -traj.drho[i] * fs.X[2];
    min_det = std::min(min_det, det);
  }
  {
    // page part: det[dr, dtheta_c, X] = dphi(X) = 1 on the mapping torus
    const int n = 64;
    const double lo = m.spec().page.kind == PageKind::disk
                          ? m.spec().page.R1 / n
                          : m.spec().page.R0;
    for (int i = 0; i < n; ++i) {
      const double r = lo + (m.spec().page.R1 - lo) * i / (n - 1);
      for (int jphi = 0; jphi < 8; ++jphi) {
        const PointTM pt = PointTM::mt(r, 0.0, jphi / 8.0);
        const FormSample fs = sample_forms(m, pt, 0.0);
        min_det = std::min(min_det, fs.X[2]);
      }
    }
  }
  rep.min_transversality = min_det;

  rep.pass = rep.leaves_disjoint && rep.unique_match_all &&
             rep.max_match_error <= tol::kFoliationMatch &&
             rep.min_transversality > 0.0;
  return rep;
}

}  // namespace openbook
