#include <openbook/indices.hpp>

#include <openbook/odeint.hpp>
#include <openbook/profiles.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace openbook {

Mat2 Mat2::rotation(double angle) {
  Mat2 r;
  const double ca = std::cos(angle), sa = std::sin(angle);
  r.m[0][0] = ca;
  r.m[0][1] = -sa;
  r.m[1][0] = sa;
  r.m[1][1] = ca;
  return r;
}

void SymplecticPath::validate() const {
  if (t.size() != Psi.size() || t.size() < 2)
    throw std::invalid_argument("symplectic path: bad sample layout");
  const Mat2& first = Psi.front();
  if (first.m[0][0] != 1.0 || first.m[0][1] != 0.0 || first.m[1][0] != 0.0 ||
      first.m[1][1] != 1.0)
    throw std::invalid_argument("symplectic path: Psi(0) != Id");
  for (const Mat2& M : Psi)
    if (std::fabs(M.det() - 1.0) > 1e-9)
      throw std::invalid_argument("symplectic path: |det - 1| > 1e-9");
}

namespace {

int path_samples(double theta_total) {
  const int per_turn = 256;
  const int n = 256 + static_cast<int>(per_turn * std::ceil(std::fabs(theta_total)));
  return n;
}

}  // namespace

SymplecticPath linearized_return_path(const Profile& p, int k) {
  if (k < 1) throw std::invalid_argument("linearized_return_path: k < 1");
  const double kappa = p.kappa();
  const double c = p.params().c;
  const double theta_total = -kappa * k;  // normalized rotation number
  const double T = k * c;
  const int n = path_samples(theta_total);
  SymplecticPath path;
  path.period = T;
  path.t.reserve(n + 1);
  path.Psi.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = T * i / n;
    path.t.push_back(t);
    path.Psi.push_back(i == 0 ? Mat2::identity()
                              : Mat2::rotation(2.0 * std::numbers::pi *
                                               theta_total * i / n));
  }
  return path;
}

namespace {

// Transverse (x, y) components of the Reeb field in the disk factor:
// X = (g'/D) dtheta - (f'/D) dphi with dphi = 2*pi*(-y dx + x dy).
std::array<double, 2> reeb_xy(const Profile& p, double x, double y) {
  const double rho = std::hypot(x, y);
  const ProfileSample s = p.eval(rho);
  const double r = s.fp / s.D;  // f'/D, finite and -> kappa/c at the binding
  return {2.0 * std::numbers::pi * r * y, -2.0 * std::numbers::pi * r * x};
}

}  // namespace

SymplecticPath linearized_return_path_variational(const Profile& p, int k) {
  if (k < 1) throw std::invalid_argument("linearized_return_path: k < 1");
  const double c = p.params().c;
  const double T = k * c;

  // Jacobian of the transverse field at the binding by centered differences.
  const double hr = 1e-4;
  double A[2][2];
  {
    const auto xp = reeb_xy(p, hr, 0.0), xm = reeb_xy(p, -hr, 0.0);
    const auto yp = reeb_xy(p, 0.0, hr), ym = reeb_xy(p, 0.0, -hr);
    A[0][0] = (xp[0] - xm[0]) / (2.0 * hr);
    A[1][0] = (xp[1] - xm[1]) / (2.0 * hr);
    A[0][1] = (yp[0] - ym[0]) / (2.0 * hr);
    A[1][1] = (yp[1] - ym[1]) / (2.0 * hr);
  }

  Dopri5<4> ode;
  ode.atol = 1e-13;
  ode.rtol = 1e-13;
  ode.h_max = T;
  ode.rhs = [&A](double, const std::array<double, 4>& y,
                 std::array<double, 4>& dy) {
    // columns of Psi stacked: y = (Psi00, Psi10, Psi01, Psi11); Psi' = A Psi
    dy[0] = A[0][0] * y[0] + A[0][1] * y[1];
    dy[1] = A[1][0] * y[0] + A[1][1] * y[1];
    dy[2] = A[0][0] * y[2] + A[0][1] * y[3];
    dy[3] = A[1][0] * y[2] + A[1][1] * y[3];
  };

  const double theta_total = -p.kappa() * k;
  const int n = path_samples(theta_total);
  SymplecticPath path;
  path.period = T;
  path.t.reserve(n + 1);
  path.Psi.reserve(n + 1);
  path.t.push_back(0.0);
  path.Psi.push_back(Mat2::identity());
  std::array<double, 4> y{1.0, 0.0, 0.0, 1.0};
  double t = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double tn = T * i / n;
    ode.integrate_to(t, y, tn, [](const Dopri5<4>::StepInfo&) {});
    Mat2 M;
    M.m[0][0] = y[0];
    M.m[1][0] = y[1];
    M.m[0][1] = y[2];
    M.m[1][1] = y[3];
    path.t.push_back(tn);
    path.Psi.push_back(M);
  }
  return path;
}

// ---------------------------------------------------------------------------
// Conley-Zehnder index, crossing-form method.
//
// mu = (1/2) sig(G_0) + sum over interior crossings of sig(G_t), where
// G_t(v) = omega(v, Psi'(t) v) restricted to ker(Psi(t) - Id).  For the
// rotation-like paths produced here, crossings are tangential zeros of
// det(Psi - Id) (the path touches Id), so they are detected as local minima
// below a threshold and refined parabolically.

namespace {

inline double det_minus_id(const Mat2& M) {
  return (M.m[0][0] - 1.0) * (M.m[1][1] - 1.0) - M.m[0][1] * M.m[1][0];
}

inline double omega_std(double ax, double ay, double bx, double by) {
  return ax * by - ay * bx;
}

// signature of the symmetrized form S(v) = omega(v, A v) on R^2
int form_signature(const Mat2& A) {
  // S as a symmetric matrix: S(v,w) = (omega(v,Aw) + omega(w,Av))/2
  // omega((1,0), A(1,0)) = A10; omega((0,1), A(0,1)) = -A01
  // cross term: (omega(e1, A e2) + omega(e2, A e1))/2 = (A11 - A00)/2
  const double s00 = A.m[1][0];
  const double s11 = -A.m[0][1];
  const double s01 = 0.5 * (A.m[1][1] - A.m[0][0]);
  const double tr = s00 + s11;
  const double det = s00 * s11 - s01 * s01;
  const double scale = std::fabs(s00) + std::fabs(s11) + std::fabs(s01) + 1e-300;
  if (det > 1e-12 * scale * scale) return tr > 0 ? 2 : -2;
  if (det < -1e-12 * scale * scale) return 0;
  // degenerate form: one zero eigenvalue
  if (tr > 1e-12 * scale) return 1;
  if (tr < -1e-12 * scale) return -1;
  throw std::invalid_argument("conley_zehnder: vanishing crossing form");
}

Mat2 lerp(const Mat2& A, const Mat2& B, double u) {
  Mat2 R;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      R.m[i][j] = (1.0 - u) * A.m[i][j] + u * B.m[i][j];
  return R;
}

Mat2 derivative_fd(const SymplecticPath& p, size_t j) {
  const size_t n = p.t.size();
  const size_t a = j == 0 ? 0 : j - 1;
  const size_t b = j + 1 < n ? j + 1 : n - 1;
  Mat2 R;
  const double dt = p.t[b] - p.t[a];
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k)
      R.m[i][k] = (p.Psi[b].m[i][k] - p.Psi[a].m[i][k]) / dt;
  return R;
}

}  // namespace

int conley_zehnder(const SymplecticPath& path) {
  path.validate();
  const size_t n = path.t.size();
  const double dT = det_minus_id(path.Psi.back());
  if (std::fabs(dT) < 1e-11)
    throw std::invalid_argument("degenerate orbit");

  int mu = 0;

  // contribution at t = 0 (full kernel)
  mu += form_signature(derivative_fd(path, 0)) / 2;

  // interior crossings: local minima of det(Psi - Id) dipping to ~0
  const double touch_tol = 1e-8;
  std::vector<double> d(n);
  for (size_t j = 0; j < n; ++j) d[j] = det_minus_id(path.Psi[j]);
  size_t j = 2;  // skip the structural zero at t = 0
  while (j + 1 < n && d[j] < touch_tol) ++j;  // leave the initial dip
  double last_cross = -1.0;
  for (; j + 1 < n; ++j) {
    if (!(d[j] <= d[j - 1] && d[j] <= d[j + 1])) continue;
    // parabolic refinement on the interpolated path
    double lo = path.t[j - 1], hi = path.t[j + 1];
    double tl = path.t[j], dl = d[j];
    for (int it = 0; it < 60; ++it) {
      const double t1 = lo + (hi - lo) / 3.0, t2 = hi - (hi - lo) / 3.0;
      auto eval = [&](double t) {
        // locate bracketing samples
        const double pos = (t - path.t.front()) /
                           (path.t.back() - path.t.front()) * (n - 1);
        size_t a = static_cast<size_t>(std::min<double>(n - 2.0, std::max(0.0, std::floor(pos))));
        const double u = (t - path.t[a]) / (path.t[a + 1] - path.t[a]);
        return det_minus_id(lerp(path.Psi[a], path.Psi[a + 1], u));
      };
      if (eval(t1) < eval(t2)) hi = t2; else lo = t1;
      tl = 0.5 * (lo + hi);
      dl = eval(tl);
    }
    if (dl > touch_tol) continue;
    if (last_cross >= 0.0 && std::fabs(tl - last_cross) <
                                 4.0 * (path.t[1] - path.t[0]))
      continue;  // same touch seen from an adjacent sample
    last_cross = tl;
    // the kernel is two dimensional at a touch (Psi = Id): full signature
    mu += form_signature(derivative_fd(path, j));
  }
  return mu;
}

// ---------------------------------------------------------------------------

int CurveTopology::gamma0() const {
  int n = 0;
  for (int m : mu)
    if (m % 2 == 0) ++n;
  return n;
}

int fredholm_index(const CurveTopology& top) {
  if (top.mu.empty())
    throw std::invalid_argument("fredholm_index: puncture list empty");
  int sum = 0;
  for (int m : top.mu) sum += m;
  const int chi = 2 - 2 * top.genus - top.punctures();
  return chi + 2 * top.c1 + sum;
}

int normal_chern(int ind, int genus, int gamma0) {
  if (gamma0 < 0) throw std::invalid_argument("normal_chern: gamma0 < 0");
  const int rhs = ind - 2 + 2 * genus + gamma0;
  if (rhs % 2 != 0)
    throw std::invalid_argument(
        "normal_chern: parity error, inconsistent topology data");
  return rhs / 2;
}

}  // namespace openbook
