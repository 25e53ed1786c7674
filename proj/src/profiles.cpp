#include <openbook/profiles.hpp>

#include <openbook/blend.hpp>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace openbook {

// ---------------------------------------------------------------------------
// kappa catalogue

double KappaSpec::value() const {
  double base = 0.0;
  int shift = k;
  switch (family) {
    case Family::sqrt2: base = std::numbers::sqrt2; break;
    case Family::sqrt3: base = std::numbers::sqrt3; break;
    case Family::pi:
      base = std::numbers::pi;
      shift = k + 1;
      break;
  }
  return -base * std::pow(10.0, -shift);
}

std::string KappaSpec::token() const {
  const char* name = family == Family::sqrt2   ? "sqrt2"
                     : family == Family::sqrt3 ? "sqrt3"
                                               : "pi";
  const int shift = family == Family::pi ? k + 1 : k;
  // e.g. -sqrt2/100, -pi/1000
  std::string s = "-";
  s += name;
  s += "/1";
  for (int i = 0; i < shift; ++i) s += '0';
  return s;
}

KappaSpec KappaSpec::parse(const std::string& token) {
  for (const KappaSpec& ks : catalogue())
    if (ks.token() == token) return ks;
  throw std::invalid_argument("kappa not in catalogue: " + token);
}

const std::vector<KappaSpec>& KappaSpec::catalogue() {
  static const std::vector<KappaSpec> cat = [] {
    std::vector<KappaSpec> v;
    for (auto fam : {Family::sqrt2, Family::sqrt3, Family::pi})
      for (int k = 1; k <= 3; ++k) v.push_back(KappaSpec{fam, k});
    return v;
  }();
  return cat;
}

// ---------------------------------------------------------------------------
// parameter validation

void ProfileParams::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("profile params: " + what);
  };
  if (!(c > 0.0)) fail("c > 0 violated");
  if (!(delta > 0.0 && delta < 0.2)) fail("delta in (0, 0.2) violated");
  if (!(delta_prime > delta)) fail("delta_prime > delta violated");
  if (!(delta_prime < 0.5)) fail("delta_prime < 0.5 violated");
  if (!(rho1 > 0.0)) fail("rho1 > 0 violated");
  if (!(rho2 > rho1)) fail("rho2 > rho1 violated");
  if (!(rho2 < 1.0 - delta_prime)) fail("rho2 < 1-delta_prime violated");
  const double kv = kappa.value();
  if (!(kv < 0.0)) fail("kappa < 0 violated");
  // f = c + kappa*rho^2 must stay positive up to the collar
  if (!(c + kv * (1.0 - delta) * (1.0 - delta) > 0.0))
    fail("c + kappa*(1-delta)^2 > 0 violated (f would vanish early)");
}

// ---------------------------------------------------------------------------
// construction

Profile build_profile(const ProfileParams& params) {
  params.validate();
  Profile p;
  p.p_ = params;
  p.kappa_ = params.kappa.value();
  const double s2 = 1.0 - params.delta;
  p.ustar_ = (1.0 - params.delta_prime - params.rho1) / (s2 - params.rho1);
  return p;
}

void Profile::check_domain(double rho) const {
  if (!(rho >= 0.0 && rho < rho_sup()))
    throw std::domain_error("profile: rho outside [0, 1+delta)");
}

namespace {

// Moebius reparametrization fixing Lambda(ustar) = 1/2; strictly increasing
// from 0 to 1 on [0,1].
struct Moebius {
  double P, Q;
  explicit Moebius(double ustar) : P(1.0 - ustar), Q(ustar) {}
  double den(double u) const { return Q + (P - Q) * u; }
  double val(double u) const { return P * u / den(u); }
  double d1(double u) const {
    const double d = den(u);
    return P * Q / (d * d);
  }
  double d2(double u) const {
    const double d = den(u);
    return -2.0 * P * Q * (P - Q) / (d * d * d);
  }
};

}  // namespace

// f decay factor m(rho) on (rho1, 1-delta): m = W(1 - Lambda(u)).
// m == 1 to all orders at rho1, == 0 to all orders at 1-delta, strictly
// decreasing in between, and m(1-delta') = 1/2.
double Profile::base_f(double rho) const {
  if (rho <= p_.rho1) return p_.c + kappa_ * rho * rho;
  const double s2 = 1.0 - p_.delta;
  if (rho >= s2) return 0.0;
  const double u = (rho - p_.rho1) / (s2 - p_.rho1);
  const Moebius L(ustar_);
  const double m = ramp_eval(1.0 - L.val(u)).w;
  return (p_.c + kappa_ * rho * rho) * m;
}

double Profile::base_fp(double rho) const {
  if (rho <= p_.rho1) return kappa_ * (2.0 * rho);
  const double s2 = 1.0 - p_.delta;
  if (rho >= s2) return 0.0;
  const double up = 1.0 / (s2 - p_.rho1);
  const double u = (rho - p_.rho1) * up;
  const Moebius L(ustar_);
  const RampVal W = ramp_eval(1.0 - L.val(u));
  const double m = W.w;
  const double mp = -W.wp * L.d1(u) * up;
  const double fhat = p_.c + kappa_ * rho * rho;
  return 2.0 * kappa_ * rho * m + fhat * mp;
}

double Profile::base_fpp(double rho) const {
  if (rho <= p_.rho1) return 2.0 * kappa_;
  const double s2 = 1.0 - p_.delta;
  if (rho >= s2) return 0.0;
  const double up = 1.0 / (s2 - p_.rho1);
  const double u = (rho - p_.rho1) * up;
  const Moebius L(ustar_);
  const RampVal W = ramp_eval(1.0 - L.val(u));
  const double yp = -L.d1(u) * up;
  const double ypp = -L.d2(u) * up * up;
  const double m = W.w;
  const double mp = W.wp * yp;
  const double mpp = W.wpp * yp * yp + W.wp * ypp;
  const double fhat = p_.c + kappa_ * rho * rho;
  return 2.0 * kappa_ * m + 4.0 * kappa_ * rho * mp + fhat * mpp;
}

double Profile::f(double rho) const {
  if (eps_ == 0.0 || rho <= 1.0 - p_.delta_prime) return base_f(rho);
  if (rho >= rho_cross_) return eps_ * (2.0 - rho);
  const double s1 = 1.0 - p_.delta_prime;
  const double w = ramp_eval((rho - s1) / (rho_cross_ - s1)).w;
  return (1.0 - w) * base_f(rho) + w * (eps_ * (2.0 - rho));
}

double Profile::fp(double rho) const {
  if (eps_ == 0.0 || rho <= 1.0 - p_.delta_prime) return base_fp(rho);
  if (rho >= rho_cross_) return -eps_;
  const double s1 = 1.0 - p_.delta_prime;
  const double iw = 1.0 / (rho_cross_ - s1);
  const RampVal W = ramp_eval((rho - s1) * iw);
  const double wp = W.wp * iw;
  return (1.0 - W.w) * base_fp(rho) - W.w * eps_ +
         wp * (eps_ * (2.0 - rho) - base_f(rho));
}

double Profile::fpp(double rho) const {
  if (eps_ == 0.0 || rho <= 1.0 - p_.delta_prime) return base_fpp(rho);
  if (rho >= rho_cross_) return 0.0;
  const double s1 = 1.0 - p_.delta_prime;
  const double iw = 1.0 / (rho_cross_ - s1);
  const RampVal W = ramp_eval((rho - s1) * iw);
  const double wp = W.wp * iw;
  const double wpp = W.wpp * iw * iw;
  const double L = eps_ * (2.0 - rho);
  return (1.0 - W.w) * base_fpp(rho) + wpp * (L - base_f(rho)) -
         2.0 * wp * (base_fp(rho) + eps_);
}

double Profile::g(double rho) const {
  if (rho <= p_.rho1) return rho * rho;
  const double s1 = 1.0 - p_.delta_prime;
  if (rho >= s1) return 1.0;
  const double v = ramp_eval((rho - p_.rho1) / (s1 - p_.rho1)).w;
  return rho * rho + v * (1.0 - rho * rho);
}

double Profile::gp(double rho) const {
  if (rho <= p_.rho1) return 2.0 * rho;
  const double s1 = 1.0 - p_.delta_prime;
  if (rho >= s1) return 0.0;
  const double iu = 1.0 / (s1 - p_.rho1);
  const RampVal W = ramp_eval((rho - p_.rho1) * iu);
  const double vp = W.wp * iu;
  return 2.0 * rho * (1.0 - W.w) + vp * (1.0 - rho * rho);
}

double Profile::gpp(double rho) const {
  if (rho <= p_.rho1) return 2.0;
  const double s1 = 1.0 - p_.delta_prime;
  if (rho >= s1) return 0.0;
  const double iu = 1.0 / (s1 - p_.rho1);
  const RampVal W = ramp_eval((rho - p_.rho1) * iu);
  const double vp = W.wp * iu;
  const double vpp = W.wpp * iu * iu;
  return 2.0 * (1.0 - W.w) - 4.0 * rho * vp + vpp * (1.0 - rho * rho);
}

double Profile::beta(double rho) const {
  if (rho >= p_.rho2) return 1.0;
  if (rho == 0.0) return std::numeric_limits<double>::infinity();
  const double b0 = 1.0 / (rho * f(rho));
  if (rho <= p_.rho1) return b0;
  const double w = ramp_eval((rho - p_.rho1) / (p_.rho2 - p_.rho1)).w;
  return b0 + w * (1.0 - b0);
}

double Profile::betap(double rho) const {
  if (rho >= p_.rho2) return 0.0;
  if (rho == 0.0) return -std::numeric_limits<double>::infinity();
  const double pr = rho * f(rho);
  const double prp = f(rho) + rho * fp(rho);
  const double b0 = 1.0 / pr;
  const double b0p = -prp / (pr * pr);
  if (rho <= p_.rho1) return b0p;
  const double iu = 1.0 / (p_.rho2 - p_.rho1);
  const RampVal W = ramp_eval((rho - p_.rho1) * iu);
  return b0p * (1.0 - W.w) + W.wp * iu * (1.0 - b0);
}

double Profile::betapp(double rho) const {
  if (rho >= p_.rho2) return 0.0;
  if (rho == 0.0) return std::numeric_limits<double>::infinity();
  const double pr = rho * f(rho);
  const double prp = f(rho) + rho * fp(rho);
  const double prpp = 2.0 * fp(rho) + rho * fpp(rho);
  const double b0p = -prp / (pr * pr);
  const double b0pp = (2.0 * prp * prp - pr * prpp) / (pr * pr * pr);
  if (rho <= p_.rho1) return b0pp;
  const double b0 = 1.0 / pr;
  const double iu = 1.0 / (p_.rho2 - p_.rho1);
  const RampVal W = ramp_eval((rho - p_.rho1) * iu);
  const double wp = W.wp * iu;
  const double wpp = W.wpp * iu * iu;
  return b0pp * (1.0 - W.w) - 2.0 * wp * b0p + wpp * (1.0 - b0);
}

// h is only structurally meaningful on [1-delta', 1-delta]; outside, the
// natural extension (-f' below, 1 above) is returned.
double Profile::h(double rho) const {
  const double s1 = 1.0 - p_.delta_prime;
  const double s2 = 1.0 - p_.delta;
  if (rho <= s1) return -base_fp(rho);
  if (rho >= s2) return 1.0;
  const double w = ramp_eval((rho - s1) / (s2 - s1)).w;
  return (1.0 - w) * (-base_fp(rho)) + w;
}

double Profile::hp(double rho) const {
  const double s1 = 1.0 - p_.delta_prime;
  const double s2 = 1.0 - p_.delta;
  if (rho <= s1) return -base_fpp(rho);
  if (rho >= s2) return 0.0;
  const double iu = 1.0 / (s2 - s1);
  const RampVal W = ramp_eval((rho - s1) * iu);
  return (1.0 - W.w) * (-base_fpp(rho)) + W.wp * iu * (1.0 + base_fp(rho));
}

double Profile::hpp(double rho) const {
  const double dh = 1e-6;
  const double lo = std::max(0.0, rho - dh);
  const double hi = std::min(rho_sup() * (1.0 - 1e-12), rho + dh);
  return (hp(hi) - hp(lo)) / (hi - lo);
}

ProfileSample Profile::eval(double rho) const {
  check_domain(rho);
  ProfileSample s;
  s.rho = rho;
  s.f = f(rho);
  s.g = g(rho);
  s.fp = fp(rho);
  s.gp = gp(rho);
  s.D = s.f * s.gp - s.fp * s.g;
  s.beta = beta(rho);
  s.h = h(rho);
  return s;
}

// ---------------------------------------------------------------------------
// perturbation

Profile perturb_profile(const Profile& p, double eps) {
  if (p.perturbed())
    throw std::invalid_argument("perturb_profile: profile already perturbed");
  if (!(eps > 0.0)) throw std::invalid_argument("perturb_profile: eps <= 0");
  const double s1 = 1.0 - p.p_.delta_prime;
  const double s2 = 1.0 - p.p_.delta;
  const double f1 = p.base_f(s1);
  if (!(eps * (2.0 - s1) < f1))
    throw std::invalid_argument(
        "perturb_profile: eps too large, eps*(1+delta') < f(1-delta') "
        "violated");
  // f crosses the line eps*(2-rho) exactly once in (s1, s2); bisect it.
  double lo = s1, hi = s2;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (p.base_f(mid) - eps * (2.0 - mid) > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15) break;
  }
  Profile q = p;
  q.eps_ = eps;
  q.rho_cross_ = 0.5 * (lo + hi);

  // The blend is strictly decreasing by construction; scan as a guard.
  const int n = 2000;
  for (int i = 1; i < n; ++i) {
    const double rho = s1 + (q.rho_sup() - 1e-9 - s1) * i / n;
    if (!(q.fp(rho) < 0.0))
      throw std::invalid_argument(
          "perturb_profile: f_eps' < 0 infeasible at rho=" +
          std::to_string(rho));
  }
  return q;
}

// ---------------------------------------------------------------------------
// verification

namespace {

void push(std::vector<ConditionResult>& v, const std::string& name, bool pass,
          double margin, double witness, const std::string& note = "") {
  v.push_back(ConditionResult{name, pass, margin, witness, note});
}

}  // namespace

ProfileReport verify_profile_sampled(
    const ProfileParams& params, bool kappa_in_catalogue, double grid_sup,
    int grid_n, const std::function<ProfileSample(double)>& sample) {
  if (grid_n < 100) throw std::domain_error("verify_profile: grid_n < 100");
  ProfileReport rep;
  auto& cs = rep.checks;
  const double kv = params.kappa.value();
  const double s1 = 1.0 - params.delta_prime;
  const double s2 = 1.0 - params.delta;

  // boundary values
  {
    const ProfileSample a = sample(0.0);
    push(cs, "f(0) = c", std::fabs(a.f - params.c) <= 1e-14,
         -std::fabs(a.f - params.c), 0.0);
    push(cs, "g(0) = 0", std::fabs(a.g) <= 1e-14, -std::fabs(a.g), 0.0);
  }
  {
    double dev = 0.0, wit = s2;
    for (int i = 0; i <= 50; ++i) {
      const double rho = s2 + (grid_sup - 1e-9 - s2) * i / 50.0;
      const ProfileSample s = sample(rho);
      const double d = std::max(std::fabs(s.f), std::fabs(s.g - 1.0));
      if (d > dev) dev = d, wit = rho;
    }
    push(cs, "(f,g) = (0,1) on [1-delta, 1+delta)", dev <= 1e-14, -dev, wit);
  }

  // grid scans
  double minD = std::numeric_limits<double>::infinity(), minD_at = 0.0;
  double maxfp = -std::numeric_limits<double>::infinity(), maxfp_at = 0.0;
  double minq = std::numeric_limits<double>::infinity(), minq_at = 0.0;
  double ming1 = std::numeric_limits<double>::infinity(), ming1_at = 0.0;
  double gdev = 0.0, gdev_at = 0.0;
  {
    const double lo = 1e-3, hi = s2 - 1e-3;
    for (int i = 0; i <= grid_n; ++i) {
      const double rho = lo + (hi - lo) * i / grid_n;
      const ProfileSample s = sample(rho);
      if (s.D < minD) minD = s.D, minD_at = rho;
      if (s.fp > maxfp) maxfp = s.fp, maxfp_at = rho;
      const double q = std::min(s.f, s.g) < 0.0 ? std::min(s.f, s.g)
                                                : std::max(s.f, s.g);
      if (q < minq) minq = q, minq_at = rho;
      if (s.gp < ming1) ming1 = s.gp, ming1_at = rho;
    }
    for (int i = 0; i <= grid_n / 10; ++i) {
      const double rho = s1 + (grid_sup - 1e-9 - s1) * i / (grid_n / 10);
      const ProfileSample s = sample(rho);
      const double d = std::fabs(s.g - 1.0);
      if (d > gdev) gdev = d, gdev_at = rho;
    }
  }
  push(cs, "D > 0 on (0, 1-delta)", minD > 0.0, minD, minD_at);
  push(cs, "f' < 0 on (0, 1-delta)", maxfp < 0.0, -maxfp, maxfp_at);
  push(cs, "first-quadrant path", minq >= 0.0, minq, minq_at);
  push(cs, "g' >= 0", ming1 >= -1e-14, ming1, ming1_at);
  push(cs, "g = 1 on [1-delta', 1+delta)", gdev <= 1e-14, -gdev, gdev_at);

  // smoothness at the origin: finite limits of f'(rho)/rho and g/rho^2,
  // with shrinking first differences
  {
    double vals_fp[4], vals_g[4];
    for (int i = 0; i < 4; ++i) {
      const double rho = std::pow(10.0, -2 - i);
      const ProfileSample s = sample(rho);
      vals_fp[i] = s.fp / rho;
      vals_g[i] = s.g / (rho * rho);
    }
    const double dfp = std::fabs(vals_fp[3] - vals_fp[2]);
    const double dfp0 = std::fabs(vals_fp[1] - vals_fp[0]);
    const double dg = std::fabs(vals_g[3] - vals_g[2]);
    const double dg0 = std::fabs(vals_g[1] - vals_g[0]);
    push(cs, "f'(rho)/rho has a finite limit",
         std::isfinite(vals_fp[3]) && dfp <= dfp0 + 1e-12, -dfp, 1e-5);
    push(cs, "g/rho^2 has a finite limit",
         std::isfinite(vals_g[3]) && dg <= dg0 + 1e-12, -dg, 1e-5);
    push(cs, "g''(0) > 0", 2.0 * vals_g[3] > 1e-9, 2.0 * vals_g[3], 1e-5);
    push(cs, "f'(0) = 0",
         std::fabs(sample(1e-7).fp) <= 1e-6, -std::fabs(sample(1e-7).fp), 0.0);
  }

  // kappa: catalogue membership plus the exact slope relation on (0, rho1]
  push(cs, "kappa in catalogue", kappa_in_catalogue, kappa_in_catalogue ? 1 : -1,
       0.0, params.kappa.token());
  {
    double dev = 0.0, wit = 0.0;
    for (int i = 1; i <= 64; ++i) {
      const double rho = params.rho1 * i / 64.0;
      const ProfileSample s = sample(rho);
      const double d = std::fabs(s.fp - kv * s.gp);
      if (d > dev) dev = d, wit = rho;
    }
    push(cs, "f' = kappa*g' on (0, rho1]", dev == 0.0, -dev, wit);
  }

  // beta
  {
    double dev = 0.0, wit = 0.0;
    for (int i = 1; i <= 64; ++i) {
      const double rho = params.rho1 * i / 64.0;
      const ProfileSample s = sample(rho);
      const double d = std::fabs(s.beta * rho * s.f - 1.0);
      if (d > dev) dev = d, wit = rho;
    }
    push(cs, "beta*rho*f = 1 on (0, rho1]", dev <= 4e-16, -dev, wit);
  }
  {
    double minb = std::numeric_limits<double>::infinity(), wit = 0.0;
    double dev1 = 0.0, wit1 = 0.0;
    for (int i = 1; i <= grid_n; ++i) {
      const double rho = 1e-4 + (grid_sup - 1e-9 - 1e-4) * i / grid_n;
      const ProfileSample s = sample(rho);
      if (s.beta < minb) minb = s.beta, wit = rho;
      if (rho >= params.rho2) {
        const double d = std::fabs(s.beta - 1.0);
        if (d > dev1) dev1 = d, wit1 = rho;
      }
    }
    push(cs, "beta > 0", minb > 0.0, minb, wit);
    push(cs, "beta = 1 on [rho2, 1+delta)", dev1 == 0.0, -dev1, wit1);
  }

  // h on [1-delta', 1-delta]
  {
    double minh = std::numeric_limits<double>::infinity(), wit = 0.0;
    for (int i = 0; i <= 256; ++i) {
      const double rho = s1 + (s2 - s1) * i / 256.0;
      const ProfileSample s = sample(rho);
      if (s.h < minh) minh = s.h, wit = rho;
    }
    const double wEdge = s1 + (s2 - s1) * 0.01;
    const ProfileSample se = sample(wEdge);
    const double dlo = std::fabs(se.h + se.fp);
    const double dhi = std::fabs(sample(s2 - (s2 - s1) * 0.01).h - 1.0);
    push(cs, "h > 0 on [1-delta', 1-delta]", minh > 0.0, minh, wit);
    push(cs, "h = -f' near 1-delta'", dlo <= 1e-14, -dlo, wEdge);
    push(cs, "h = 1 near 1-delta", dhi <= 1e-14, -dhi, s2);
  }

  rep.min_D = minD;
  rep.max_fp = maxfp;
  rep.pass = true;
  for (const auto& c : cs) rep.pass = rep.pass && c.pass;
  return rep;
}

ProfileReport verify_profile(const Profile& p, int grid_n) {
  return verify_profile_sampled(
      p.params(), true, p.rho_sup(), grid_n,
      [&p](double rho) { return p.eval(rho); });
}

// ---------------------------------------------------------------------------
// serialization: key/value lines plus a knot table.  Parameters are written
// as hex floats so the round trip is bit exact.

std::string Profile::serialize() const {
  char buf[64];
  std::ostringstream os;
  os << "openbook-profile v1\n";
  auto kv = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%a", v);
    os << key << " = " << buf << "\n";
  };
  kv("c", p_.c);
  os << "kappa = " << p_.kappa.token() << "\n";
  kv("delta", p_.delta);
  kv("delta_prime", p_.delta_prime);
  kv("rho1", p_.rho1);
  kv("rho2", p_.rho2);
  kv("epsilon", eps_);
  kv("rho_cross", rho_cross_);
  os << "knots =";
  const double knots[] = {0.0,
                          p_.rho1,
                          p_.rho2,
                          1.0 - p_.delta_prime,
                          1.0 - p_.delta,
                          1.0 + p_.delta};
  for (double k : knots) {
    std::snprintf(buf, sizeof(buf), " %a", k);
    os << buf;
  }
  os << "\n";
  return os.str();
}

Profile Profile::parse(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  if (line != "openbook-profile v1")
    throw std::invalid_argument("profile parse: bad header");
  ProfileParams params;
  double eps = 0.0;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
      while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.pop_back();
    };
    trim(key);
    trim(val);
    if (key == "c") params.c = std::strtod(val.c_str(), nullptr);
    else if (key == "kappa") params.kappa = KappaSpec::parse(val);
    else if (key == "delta") params.delta = std::strtod(val.c_str(), nullptr);
    else if (key == "delta_prime") params.delta_prime = std::strtod(val.c_str(), nullptr);
    else if (key == "rho1") params.rho1 = std::strtod(val.c_str(), nullptr);
    else if (key == "rho2") params.rho2 = std::strtod(val.c_str(), nullptr);
    else if (key == "epsilon") eps = std::strtod(val.c_str(), nullptr);
    else if (key == "rho_cross" || key == "knots") { /* derived */ }
    else throw std::invalid_argument("profile parse: unknown key " + key);
  }
  Profile p = build_profile(params);
  if (eps > 0.0) p = perturb_profile(p, eps);
  return p;
}

}  // namespace openbook
