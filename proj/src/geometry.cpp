#include <openbook/geometry.hpp>

#include <openbook/blend.hpp>
#include <openbook/parallel.hpp>

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace openbook {

// ---------------------------------------------------------------------------
// monodromy

double Monodromy::shift(double r) const {
  double s = 0.0;
  for (const TwistBand& b : twists)
    s += b.count * ramp_eval((r - b.r_lo) / (b.r_hi - b.r_lo)).w;
  return s;
}

double Monodromy::shift_p(double r) const {
  double s = 0.0;
  for (const TwistBand& b : twists) {
    const double iw = 1.0 / (b.r_hi - b.r_lo);
    s += b.count * ramp_eval((r - b.r_lo) * iw).wp * iw;
  }
  return s;
}

// ---------------------------------------------------------------------------
// page model

double PageModel::collar_rho(double r, int b) const {
  if (b == 0) return (R1 + 1.0 - delta) - r;
  return r - R0 + 1.0 - delta;
}

double PageModel::collar_r(double rho, int b) const {
  if (b == 0) return (R1 + 1.0 - delta) - rho;
  return rho + R0 - (1.0 - delta);
}

bool PageModel::in_collar(double r, int b) const {
  const double rho = collar_rho(r, b);
  return rho >= 1.0 - delta && rho < 1.0 + delta;
}

void PageModel::validate(const Monodromy& mono) const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("page: " + what);
  };
  if (kind == PageKind::disk) {
    if (R0 != 0.0) fail("disk requires R0 = 0");
    if (!(R1 > 4.0 * delta && R1 <= 3.0))
      fail("disk radius outside (4*delta, 3]");
  } else {
    if (!(R0 > 0.0)) fail("annulus requires R0 > 0");
    if (!(R1 - R0 > 4.0 * delta)) fail("annulus collars overlap");
    if (!(R1 - R0 <= 3.0)) fail("annulus width > 3 unsupported");
  }
  for (const TwistBand& b : mono.twists) {
    if (!(b.r_lo < b.r_hi)) fail("twist band empty");
    if (b.count == 0) fail("twist count zero");
    const double lo_ok = kind == PageKind::disk ? 0.0 : R0 + 2.0 * delta;
    if (!(b.r_lo > lo_ok && b.r_hi < R1 - 2.0 * delta))
      fail("twist band must avoid collars (monodromy = id near boundary)");
  }
}

// ---------------------------------------------------------------------------
// eta

double EtaProfile::E(double r) const {
  if (kind == PageKind::disk) {
    if (r <= r_a) return q * r * r;
    if (r >= r_b) return r + C1;
    const double w = ramp_eval((r - r_a) / (r_b - r_a)).w;
    return (1.0 - w) * (q * r * r) + w * (r + C1);
  }
  if (r <= u_lo) return r + C0;
  if (r >= u_hi) return r + C1;
  const double w = ramp_eval((r - u_lo) / (u_hi - u_lo)).w;
  return r + C0 + w * (C1 - C0);
}

double EtaProfile::Ep(double r) const {
  if (kind == PageKind::disk) {
    if (r <= r_a) return 2.0 * q * r;
    if (r >= r_b) return 1.0;
    const double iw = 1.0 / (r_b - r_a);
    const RampVal W = ramp_eval((r - r_a) * iw);
    return (1.0 - W.w) * 2.0 * q * r + W.w +
           W.wp * iw * (r + C1 - q * r * r);
  }
  if (r <= u_lo || r >= u_hi) return 1.0;
  const double iw = 1.0 / (u_hi - u_lo);
  const RampVal W = ramp_eval((r - u_lo) * iw);
  return 1.0 + W.wp * iw * (C1 - C0);
}

double EtaProfile::Epp(double r) const {
  if (kind == PageKind::disk) {
    if (r <= r_a) return 2.0 * q;
    if (r >= r_b) return 0.0;
    const double iw = 1.0 / (r_b - r_a);
    const RampVal W = ramp_eval((r - r_a) * iw);
    return (1.0 - W.w) * 2.0 * q +
           W.wpp * iw * iw * (r + C1 - q * r * r) +
           2.0 * W.wp * iw * (1.0 - 2.0 * q * r);
  }
  if (r <= u_lo || r >= u_hi) return 0.0;
  const double iw = 1.0 / (u_hi - u_lo);
  const RampVal W = ramp_eval((r - u_lo) * iw);
  return W.wpp * iw * iw * (C1 - C0);
}

EtaProfile eta_on_page(const PageModel& page) {
  EtaProfile e;
  e.kind = page.kind;
  e.R0 = page.R0;
  e.R1 = page.R1;
  e.delta = page.delta;
  e.C1 = 1.0 + page.delta - page.R1;
  if (page.kind == PageKind::disk) {
    // E = q r^2 near the center, = r + C1 from the collar start inward a
    // little; the blend zone sits just inside the collar where r + C1 is
    // close to 1 - delta, so monotonicity of E is immediate.
    e.r_b = page.R1 - 2.0 * page.delta;
    const double zeta = std::min(0.5, 0.4 * e.r_b);
    e.r_a = e.r_b - zeta;
    const double floor = e.r_a + e.C1;  // min of r + C1 on the zone
    if (!(floor > 0.0))
      throw std::invalid_argument("eta: disk radius too large for the blend");
    e.q = 0.5 * floor / (e.r_b * e.r_b);
  } else {
    e.C0 = -(page.R0 + 1.0 + page.delta);
    e.u_lo = page.R0 + 2.0 * page.delta;
    e.u_hi = page.R1 - 2.0 * page.delta;
    // sanity: d eta = (1 + C'(r)) dr ^ dtheta must stay positive
    const int n = 512;
    for (int i = 0; i <= n; ++i) {
      const double r = e.u_lo + (e.u_hi - e.u_lo) * i / n;
      if (!(e.Ep(r) > 0.0))
        throw std::invalid_argument("eta: annulus blend loses positivity");
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// spec and manifold

void OpenBookSpec::validate() const {
  profile.validate();
  if (page.delta != profile.delta)
    throw std::invalid_argument("spec: page.delta must equal profile delta");
  page.validate(monodromy);
  if (!(epsilon >= 0.0)) throw std::invalid_argument("spec: epsilon < 0");
  if (!(tau_flat > 0.0 && tau_flat < 0.5))
    throw std::invalid_argument("spec: tau_flat outside (0, 0.5)");
}

ManifoldModel build_manifold(const OpenBookSpec& spec_in) {
  OpenBookSpec spec = spec_in;
  spec.page.delta = spec.profile.delta;  // single delta for page and profile
  spec.validate();
  Profile p0 = build_profile(spec.profile);
  Profile pe = spec.epsilon > 0.0 ? perturb_profile(p0, spec.epsilon) : p0;
  EtaProfile eta = eta_on_page(spec.page);
  return ManifoldModel(std::move(spec), std::move(p0), std::move(pe), eta);
}

const Profile& ManifoldModel::profile(double eps) const {
  if (eps == 0.0) return prof0_;
  if (eps == spec_.epsilon) return prof_eps_;
  throw std::invalid_argument("manifold: only eps = 0 and spec epsilon cached");
}

double ManifoldModel::tau(double phi) const {
  const double w0 = spec_.tau_flat;
  return ramp_eval((phi - w0) / (1.0 - 2.0 * w0)).w;
}

double ManifoldModel::tau_p(double phi) const {
  const double w0 = spec_.tau_flat;
  const double iw = 1.0 / (1.0 - 2.0 * w0);
  return ramp_eval((phi - w0) * iw).wp * iw;
}

std::array<double, 2> ManifoldModel::alpha_mt(double r, double phi) const {
  // alpha = tau psi*eta + (1 - tau) eta  with  psi*eta = E dtheta + E s' dr
  const double E = eta_.E(r);
  const double a_r = tau(phi) * E * spec_.monodromy.shift_p(r);
  return {a_r, E};
}

std::optional<int> ManifoldModel::collar_binding(double r) const {
  for (int b = 0; b < num_bindings(); ++b)
    if (spec_.page.in_collar(r, b)) return b;
  return std::nullopt;
}

PointTM ManifoldModel::to_solid_torus(const PointTM& mt, int b) const {
  if (mt.chart != ChartId::mapping_torus)
    throw std::invalid_argument("to_solid_torus: not a mapping torus point");
  const double r = mt.u0;
  if (!spec_.page.in_collar(r, b))
    throw std::invalid_argument("to_solid_torus: point not in the collar");
  const double rho = spec_.page.collar_rho(r, b);
  double theta = spec_.page.theta_sign(b) * mt.u1;
  theta -= std::floor(theta);
  return PointTM::st(b, theta, rho, mt.u2);
}

PointTM ManifoldModel::to_mapping_torus(const PointTM& st) const {
  if (st.chart == ChartId::mapping_torus)
    throw std::invalid_argument("to_mapping_torus: already a page point");
  const int b = static_cast<int>(st.chart);
  const double rho = st.u1;
  if (!(rho >= 1.0 - spec_.page.delta))
    throw std::invalid_argument("to_mapping_torus: point below the overlap");
  const double r = spec_.page.collar_r(rho, b);
  double theta_c = spec_.page.theta_sign(b) * st.u0;
  theta_c -= std::floor(theta_c);
  return PointTM::mt(r, theta_c, st.u2);
}

void ManifoldModel::check_point(const PointTM& pt) const {
  auto circ = [](double x) { return x >= 0.0 && x < 1.0 + 1e-12; };
  if (pt.chart == ChartId::mapping_torus) {
    if (!(pt.u0 >= spec_.page.R0 && pt.u0 <= spec_.page.R1))
      throw std::domain_error("point: r outside the page");
    if (!circ(pt.u1) || !circ(pt.u2))
      throw std::domain_error("point: angle outside [0,1)");
  } else {
    const int b = static_cast<int>(pt.chart);
    if (b >= num_bindings())
      throw std::domain_error("point: no such solid torus chart");
    if (!(pt.u1 >= 0.0 && pt.u1 < 1.0 + spec_.page.delta))
      throw std::domain_error("point: rho outside [0, 1+delta)");
    if (!circ(pt.u0) || !circ(pt.u2))
      throw std::domain_error("point: angle outside [0,1)");
  }
}

// ---------------------------------------------------------------------------
// forms

namespace {

// 2x2 solve of iota_V Omega = -tau' * mu1 on the fiber, Omega = Ep dr^dtheta.
// Solution: V = (0, tau' * E * shift' / Ep).
std::array<double, 2> vertical_correction(const ManifoldModel& m, double r,
                                          double phi) {
  if (m.spec().monodromy.is_identity()) return {0.0, 0.0};
  const double mu_r = m.eta().E(r) * m.spec().monodromy.shift_p(r);
  if (mu_r == 0.0) return {0.0, 0.0};
  const double tp = m.tau_p(phi);
  if (tp == 0.0) return {0.0, 0.0};
  const double Ep = m.eta().Ep(r);
  // generic 2x2: Ep * (v_r dtheta - v_theta dr) = -tp * mu_r dr
  const double v_r = 0.0;
  const double v_theta = tp * mu_r / Ep;
  return {v_r, v_theta};
}

FormSample sample_mt(const ManifoldModel& m, const PointTM& pt, double eps) {
  const double r = pt.u0, phi = pt.u2;
  const EtaProfile& eta = m.eta();
  FormSample out;

  const auto a = m.alpha_mt(r, phi);
  out.lambda = {eps * a[0], eps * a[1], 1.0};

  // d alpha = Ep dr^dtheta + tau' E shift' dphi^dr
  const double Ep = eta.Ep(r);
  const double cross = m.tau_p(phi) * eta.E(r) * m.spec().monodromy.shift_p(r);
  Mat3 da{};
  da.a[0][1] = Ep;
  da.a[1][0] = -Ep;
  da.a[2][0] = cross;
  da.a[0][2] = -cross;
  out.omega = da;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.dlambda.a[i][j] = eps * da.a[i][j];

  const auto v = vertical_correction(m, r, phi);
  std::array<double, 3> X0{v[0], v[1], 1.0};
  if (eps == 0.0) {
    out.X = X0;
  } else {
    const double pairing = 1.0 + eps * (a[0] * v[0] + a[1] * v[1]);
    out.X = {X0[0] / pairing, X0[1] / pairing, X0[2] / pairing};
  }

  // density of lambda ^ dlambda against dr ^ dtheta_c ^ dphi
  out.contact_density = out.lambda[0] * out.dlambda.a[1][2] -
                        out.lambda[1] * out.dlambda.a[0][2] +
                        out.lambda[2] * out.dlambda.a[0][1];
  return out;
}

FormSample sample_st(const ManifoldModel& m, const PointTM& pt, double eps) {
  const double rho = pt.u1;
  const Profile& prof = eps == 0.0 ? m.profile0() : m.profile(eps);
  const Profile& base = m.profile0();
  FormSample out;

  const double f = prof.f(rho), g = prof.g(rho);
  const double fp = prof.fp(rho), gp = prof.gp(rho);
  out.lambda = {f, 0.0, g};

  // d lambda = f' drho^dtheta + g' drho^dphi (frame order theta, rho, phi)
  out.dlambda.a[0][1] = -fp;
  out.dlambda.a[1][0] = fp;
  out.dlambda.a[1][2] = gp;
  out.dlambda.a[2][1] = -gp;

  // taming form, from the unperturbed profile
  const double s1 = 1.0 - m.spec().profile.delta_prime;
  const double s2 = 1.0 - m.spec().profile.delta;
  if (rho < s1) {
    out.omega.a[0][1] = -base.fp(rho);
    out.omega.a[1][0] = base.fp(rho);
    out.omega.a[1][2] = base.gp(rho);
    out.omega.a[2][1] = -base.gp(rho);
  } else if (rho < s2) {
    const double h = base.h(rho);
    out.omega.a[0][1] = h;
    out.omega.a[1][0] = -h;
  } else {
    out.omega.a[0][1] = 1.0;
    out.omega.a[1][0] = -1.0;
  }

  // Reeb field
  if (rho == 0.0) {
    out.X = {1.0 / f, 0.0, 0.0};  // theta-direction limit, period f(0)
  } else if (rho >= s1) {
    out.X = {0.0, 0.0, 1.0};  // g' = 0 there, X = dphi exactly
  } else {
    const double D = f * gp - fp * g;
    out.X = {gp / D, 0.0, -fp / D};
  }

  // density of lambda ^ dlambda against dtheta ^ drho ^ dphi
  out.contact_density = out.lambda[0] * out.dlambda.a[1][2] -
                        out.lambda[1] * out.dlambda.a[0][2] +
                        out.lambda[2] * out.dlambda.a[0][1];
  return out;
}

}  // namespace

FormSample sample_forms(const ManifoldModel& m, const PointTM& pt, double eps) {
  m.check_point(pt);
  if (pt.chart == ChartId::mapping_torus) return sample_mt(m, pt, eps);
  return sample_st(m, pt, eps);
}

std::array<double, 3> lambda_at(const ManifoldModel& m, const PointTM& pt,
                                double eps) {
  return sample_forms(m, pt, eps).lambda;
}

std::array<double, 3> reeb_at(const ManifoldModel& m, const PointTM& pt,
                              double eps) {
  return sample_forms(m, pt, eps).X;
}

Mat3 taming_at(const ManifoldModel& m, const PointTM& pt) {
  return sample_forms(m, pt, 0.0).omega;
}

// ---------------------------------------------------------------------------
// SHS verification

void GridSpec::validate() const {
  if (n_theta < 8 || n_rho < 8 || n_phi < 8 || n_page < 8)
    throw std::invalid_argument("grid: resolution below documented bound (8)");
  if (n_theta > 2048 || n_rho > 2048 || n_phi > 2048 || n_page > 2048)
    throw std::invalid_argument("grid: resolution above documented bound (2048)");
  if (!(fd_step > 0.0)) throw std::invalid_argument("grid: fd_step <= 0");
}

namespace {

struct Extrema {
  double min_omega_xi = std::numeric_limits<double>::infinity();
  double iota0 = 0.0;
  double iotae = 0.0;
  double domega = 0.0;
  double lam_dev = 0.0;
  double dens_min = std::numeric_limits<double>::infinity();
  double dens_max = -std::numeric_limits<double>::infinity();
  double dens_vs_D = 0.0;
  double dens_zero = 0.0;
  bool bitwise = true;
  bool dphi_band = true;
  double colinear = 0.0;
  double feps_resid = 0.0;
  double min_dphi_X = std::numeric_limits<double>::infinity();

  static Extrema combine(const Extrema& a, const Extrema& b) {
    Extrema r = a;
    r.min_omega_xi = std::min(a.min_omega_xi, b.min_omega_xi);
    r.iota0 = std::max(a.iota0, b.iota0);
    r.iotae = std::max(a.iotae, b.iotae);
    r.domega = std::max(a.domega, b.domega);
    r.lam_dev = std::max(a.lam_dev, b.lam_dev);
    r.dens_min = std::min(a.dens_min, b.dens_min);
    r.dens_max = std::max(a.dens_max, b.dens_max);
    r.dens_vs_D = std::max(a.dens_vs_D, b.dens_vs_D);
    r.dens_zero = std::max(a.dens_zero, b.dens_zero);
    r.bitwise = a.bitwise && b.bitwise;
    r.dphi_band = a.dphi_band && b.dphi_band;
    r.colinear = std::max(a.colinear, b.colinear);
    r.feps_resid = std::max(a.feps_resid, b.feps_resid);
    r.min_dphi_X = std::min(a.min_dphi_X, b.min_dphi_X);
    return r;
  }
};

double iota_sup(const std::array<double, 3>& X, const Mat3& w) {
  double sup = 0.0;
  for (int j = 0; j < 3; ++j) {
    double c = 0.0;
    for (int i = 0; i < 3; ++i) c += X[i] * w.a[i][j];
    sup = std::max(sup, std::fabs(c));
  }
  return sup;
}

double omega_on_xi(const FormSample& s, const std::array<double, 3>& e1,
                   const std::array<double, 3>& e2) {
  // project e1, e2 into ker lambda along X, then evaluate omega
  auto proj = [&s](std::array<double, 3> v) {
    double lam = 0.0;
    for (int i = 0; i < 3; ++i) lam += s.lambda[i] * v[i];
    for (int i = 0; i < 3; ++i) v[i] -= lam * s.X[i];
    return v;
  };
  const auto u1 = proj(e1), u2 = proj(e2);
  double val = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) val += u1[i] * s.omega.a[i][j] * u2[j];
  return val;
}

// taming form components only, for finite-difference stencils
Mat3 omega_only(const ManifoldModel& m, const PointTM& pt) {
  Mat3 w{};
  if (pt.chart == ChartId::mapping_torus) {
    const double Ep = m.eta().Ep(pt.u0);
    const double cross =
        m.tau_p(pt.u2) * m.eta().E(pt.u0) * m.spec().monodromy.shift_p(pt.u0);
    w.a[0][1] = Ep;
    w.a[1][0] = -Ep;
    w.a[2][0] = cross;
    w.a[0][2] = -cross;
    return w;
  }
  const Profile& base = m.profile0();
  const double rho = pt.u1;
  const double s1 = 1.0 - m.spec().profile.delta_prime;
  const double s2 = 1.0 - m.spec().profile.delta;
  if (rho < s1) {
    w.a[0][1] = -base.fp(rho);
    w.a[1][0] = base.fp(rho);
    w.a[1][2] = base.gp(rho);
    w.a[2][1] = -base.gp(rho);
  } else if (rho < s2) {
    const double h = base.h(rho);
    w.a[0][1] = h;
    w.a[1][0] = -h;
  } else {
    w.a[0][1] = 1.0;
    w.a[1][0] = -1.0;
  }
  return w;
}

// numerical (d omega)_{012} by centered differences of the components
double numeric_domega(const ManifoldModel& m, const PointTM& pt, double step) {
  const bool mt = pt.chart == ChartId::mapping_torus;
  auto comp = [&m](const PointTM& q, int i, int j) {
    return omega_only(m, q).a[i][j];
  };
  auto shift = [&](int axis, double d) {
    PointTM q = pt;
    if (axis == 0) q.u0 += d;
    if (axis == 1) q.u1 += d;
    if (axis == 2) q.u2 += d;
    // wrap the angular coordinates of each chart
    if (!mt && axis == 0) q.u0 -= std::floor(q.u0);
    if (mt && axis == 1) q.u1 -= std::floor(q.u1);
    if (axis == 2) q.u2 -= std::floor(q.u2);
    return q;
  };
  // d omega (e0,e1,e2) = d0 w12 - d1 w02 + d2 w01
  const double d0 =
      (comp(shift(0, step), 1, 2) - comp(shift(0, -step), 1, 2)) / (2 * step);
  const double d1 =
      (comp(shift(1, step), 0, 2) - comp(shift(1, -step), 0, 2)) / (2 * step);
  const double d2 =
      (comp(shift(2, step), 0, 1) - comp(shift(2, -step), 0, 1)) / (2 * step);
  return std::fabs(d0 - d1 + d2);
}

}  // namespace

SHSReport verify_shs(const ManifoldModel& m, const GridSpec& grid, double eps) {
  grid.validate();
  SHSReport rep;
  rep.eps = eps;
  const double delta = m.spec().page.delta;
  const double dp = m.spec().profile.delta_prime;
  const double s1 = 1.0 - dp, s2 = 1.0 - delta;
  const Profile& prof = eps == 0.0 ? m.profile0() : m.profile(eps);
  rep.binding_period = prof.f(0.0);

  // ---- solid torus charts -------------------------------------------------
  const int nb = m.num_bindings();
  const std::int64_t nst =
      static_cast<std::int64_t>(nb) * grid.n_theta * grid.n_rho * grid.n_phi;
  const double rho_lo = 1e-3, rho_hi = 1.0;

  auto st_block = [&](std::int64_t lo, std::int64_t hi) {
    Extrema ex;
    for (std::int64_t idx = lo; idx < hi; ++idx) {
      std::int64_t rest = idx;
      const int b = static_cast<int>(rest % nb);
      rest /= nb;
      const int it = static_cast<int>(rest % grid.n_theta);
      rest /= grid.n_theta;
      const int ir = static_cast<int>(rest % grid.n_rho);
      rest /= grid.n_rho;
      const int ip = static_cast<int>(rest);
      const double theta = static_cast<double>(it) / grid.n_theta;
      const double rho = rho_lo + (rho_hi - rho_lo) * ir / (grid.n_rho - 1);
      const double phi = static_cast<double>(ip) / grid.n_phi;
      const PointTM pt = PointTM::st(b, theta, rho, phi);
      const FormSample s = sample_forms(m, pt, eps);
      const FormSample s0 = sample_forms(m, pt, 0.0);

      double lam_pair = 0.0;
      for (int i = 0; i < 3; ++i) lam_pair += s.lambda[i] * s.X[i];
      ex.lam_dev = std::max(ex.lam_dev, std::fabs(lam_pair - 1.0));
      ex.iota0 = std::max(ex.iota0, iota_sup(s0.X, s.omega));
      ex.iotae = std::max(ex.iotae, iota_sup(s.X, s.omega));

      // xi basis v1 = drho, v2 = -g dtheta + f dphi (of the active profile)
      const double f = prof.f(rho), g = prof.g(rho);
      const double oxv = omega_on_xi(s, {0.0, 1.0, 0.0}, {-g, 0.0, f});
      // normalize by the basis area so the margin is scale honest
      ex.min_omega_xi = std::min(ex.min_omega_xi, oxv);

      ex.dens_min = std::min(ex.dens_min, s.contact_density);
      ex.dens_max = std::max(ex.dens_max, s.contact_density);
      if (eps == 0.0) {
        const ProfileSample ps = m.profile0().eval(rho);
        if (rho < s2) {
          const double rel = std::fabs(s.contact_density - ps.D) /
                             std::max(std::fabs(ps.D), 1e-300);
          ex.dens_vs_D = std::max(ex.dens_vs_D, rel);
        } else {
          ex.dens_zero = std::max(ex.dens_zero, std::fabs(s.contact_density));
        }
      }

      if (rho < s2) {
        ex.bitwise = ex.bitwise && std::memcmp(&s.X, &s0.X, sizeof(s.X)) == 0;
      }
      if (rho >= s1 && rho < s2) {
        ex.dphi_band = ex.dphi_band && s.X[0] == 0.0 && s.X[1] == 0.0 &&
                       s.X[2] == 1.0;
      }
      ex.domega = std::max(ex.domega, numeric_domega(m, pt, grid.fd_step));

      // F_eps = omega / dlambda_eps on xi, residual |dF ^ dlambda|_{012}
      if (eps > 0.0) {
        auto Feps = [&](const PointTM& q) {
          const FormSample sq = sample_forms(m, q, eps);
          const double fq = prof.f(q.u1), gq = prof.g(q.u1);
          const double num = omega_on_xi(sq, {0.0, 1.0, 0.0}, {-gq, 0.0, fq});
          const double den =
              [&] {
                double v = 0.0;
                const std::array<double, 3> v1{0.0, 1.0, 0.0},
                    v2{-gq, 0.0, fq};
                for (int i = 0; i < 3; ++i)
                  for (int j = 0; j < 3; ++j)
                    v += v1[i] * sq.dlambda.a[i][j] * v2[j];
                return v;
              }();
          return num / den;
        };
        if (ir % 5 == 0 && rho > rho_lo + grid.fd_step &&
            rho < rho_hi - grid.fd_step) {
          const double hfd = grid.fd_step;
          PointTM qp = pt, qm = pt;
          qp.u1 += hfd;
          qm.u1 -= hfd;
          const double dF_rho = (Feps(qp) - Feps(qm)) / (2 * hfd);
          PointTM tp = pt, tm = pt;
          tp.u0 = std::fmod(tp.u0 + hfd, 1.0);
          tm.u0 = std::fmod(tm.u0 - hfd + 1.0, 1.0);
          const double dF_theta = (Feps(tp) - Feps(tm)) / (2 * hfd);
          PointTM pp = pt, pm = pt;
          pp.u2 = std::fmod(pp.u2 + hfd, 1.0);
          pm.u2 = std::fmod(pm.u2 - hfd + 1.0, 1.0);
          const double dF_phi = (Feps(pp) - Feps(pm)) / (2 * hfd);
          const FormSample sq = sample_forms(m, pt, eps);
          // (dF ^ dlambda)_{012} = F_0 w12 - F_1 w02 + F_2 w01
          const double resid = dF_theta * sq.dlambda.a[1][2] -
                               dF_rho * sq.dlambda.a[0][2] +
                               dF_phi * sq.dlambda.a[0][1];
          ex.feps_resid = std::max(ex.feps_resid, std::fabs(resid));
        }
      }
    }
    return ex;
  };
  Extrema ex = parallel_block_reduce<Extrema>(nst, Extrema{}, st_block,
                                              Extrema::combine);

  // ---- mapping torus chart ------------------------------------------------
  const double R0 = m.spec().page.R0, R1 = m.spec().page.R1;
  const double r_lo =
      m.spec().page.kind == PageKind::disk ? R1 / grid.n_page : R0;
  const std::int64_t nmt =
      static_cast<std::int64_t>(grid.n_page) * grid.n_theta * grid.n_phi;

  auto mt_block = [&](std::int64_t lo, std::int64_t hi) {
    Extrema ex2;
    for (std::int64_t idx = lo; idx < hi; ++idx) {
      std::int64_t rest = idx;
      const int ir = static_cast<int>(rest % grid.n_page);
      rest /= grid.n_page;
      const int it = static_cast<int>(rest % grid.n_theta);
      rest /= grid.n_theta;
      const int ip = static_cast<int>(rest);
      const double r = r_lo + (R1 - r_lo) * ir / (grid.n_page - 1);
      const double theta = static_cast<double>(it) / grid.n_theta;
      const double phi = static_cast<double>(ip) / grid.n_phi;
      const PointTM pt = PointTM::mt(r, theta, phi);
      const FormSample s = sample_forms(m, pt, eps);
      const FormSample s0 = sample_forms(m, pt, 0.0);

      double lam_pair = 0.0;
      for (int i = 0; i < 3; ++i) lam_pair += s.lambda[i] * s.X[i];
      ex2.lam_dev = std::max(ex2.lam_dev, std::fabs(lam_pair - 1.0));
      ex2.iota0 = std::max(ex2.iota0, iota_sup(s0.X, s.omega));
      ex2.iotae = std::max(ex2.iotae, iota_sup(s.X, s.omega));
      ex2.min_omega_xi = std::min(
          ex2.min_omega_xi,
          omega_on_xi(s, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}));
      ex2.dens_min = std::min(ex2.dens_min, s.contact_density);
      ex2.dens_max = std::max(ex2.dens_max, s.contact_density);
      if (eps == 0.0)
        ex2.dens_zero = std::max(ex2.dens_zero, std::fabs(s.contact_density));
      ex2.min_dphi_X = std::min(ex2.min_dphi_X, s.X[2]);

      // colinearity of X_eps and X_0
      const double cr0 = s.X[1] * s0.X[2] - s.X[2] * s0.X[1];
      const double cr1 = s.X[2] * s0.X[0] - s.X[0] * s0.X[2];
      const double cr2 = s.X[0] * s0.X[1] - s.X[1] * s0.X[0];
      ex2.colinear = std::max(
          ex2.colinear, std::sqrt(cr0 * cr0 + cr1 * cr1 + cr2 * cr2));

      if (r - grid.fd_step > r_lo && r + grid.fd_step < R1)
        ex2.domega = std::max(ex2.domega, numeric_domega(m, pt, grid.fd_step));
    }
    return ex2;
  };
  Extrema ex2 = parallel_block_reduce<Extrema>(nmt, Extrema{}, mt_block,
                                               Extrema::combine);

  const Extrema tot = Extrema::combine(ex, ex2);
  rep.min_omega_xi = tot.min_omega_xi;
  rep.sup_iota_X0_omega = tot.iota0;
  rep.sup_iota_Xeps_omega = tot.iotae;
  rep.sup_numeric_domega = tot.domega;
  rep.sup_lambda_reeb_dev = tot.lam_dev;
  rep.density_min = tot.dens_min;
  rep.density_max = tot.dens_max;
  rep.density_vs_D_rel_dev = tot.dens_vs_D;
  rep.density_zero_region_dev = tot.dens_zero;
  rep.x_eps_equals_x0_below_collar = tot.bitwise;
  rep.x_is_dphi_on_band = tot.dphi_band;
  rep.x_eps_colinearity_dev = tot.colinear;
  rep.f_eps_residual = tot.feps_resid;
  rep.min_dphi_X_mapping_torus = ex2.min_dphi_X;

  // alpha descent consistency: alpha(1^-, p) vs alpha(0, psi(p)) . dpsi
  {
    double dev = 0.0;
    const int n = 64;
    for (int i = 0; i < n; ++i) {
      const double r = r_lo + (R1 - r_lo) * i / (n - 1);
      const auto a1 = m.alpha_mt(r, 1.0 - 1e-12);
      const auto a0 = m.alpha_mt(r, 0.0);
      const double sp = m.spec().monodromy.shift_p(r);
      // (psi* alpha0)_r = a0_r + a0_theta * shift', theta component unchanged
      dev = std::max(dev, std::fabs(a1[0] - (a0[0] + a0[1] * sp)));
      dev = std::max(dev, std::fabs(a1[1] - a0[1]));
    }
    rep.alpha_pullback_dev = dev;
  }

  // F on the mapping torus: omega = (1/eps) dlambda_eps there
  if (eps > 0.0) rep.f_eps_mapping_torus = 1.0 / eps;

  bool pass = rep.sup_lambda_reeb_dev <= tol::kLambdaReeb &&
              rep.sup_iota_X0_omega <= tol::kIotaOmega &&
              rep.sup_iota_Xeps_omega <= tol::kIotaOmega &&
              rep.sup_numeric_domega <= tol::kNumericDOmega &&
              rep.min_omega_xi > 0.0 &&
              rep.x_eps_equals_x0_below_collar && rep.x_is_dphi_on_band &&
              rep.alpha_pullback_dev <= tol::kPullback;
  if (eps == 0.0) {
    pass = pass && rep.density_vs_D_rel_dev <= tol::kDensityRel &&
           rep.density_zero_region_dev <= 1e-15;
  } else {
    pass = pass && rep.density_min > 0.0 &&
           rep.f_eps_residual <= tol::kFEpsResidual;
  }
  rep.pass = pass;
  return rep;
}

}  // namespace openbook
