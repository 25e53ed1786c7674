#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <openbook/indices.hpp>
#include <openbook/profiles.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace openbook;

namespace {

Profile example_profile() {
  ProfileParams p;
  p.c = 0.1;
  p.kappa = KappaSpec{KappaSpec::Family::sqrt2, 2};
  return build_profile(p);
}

SymplecticPath rotation_path(double theta_total, int n = 4096) {
  SymplecticPath path;
  path.period = 1.0;
  for (int i = 0; i <= n; ++i) {
    path.t.push_back(static_cast<double>(i) / n);
    path.Psi.push_back(i == 0 ? Mat2::identity()
                              : Mat2::rotation(2.0 * std::numbers::pi *
                                               theta_total * i / n));
  }
  return path;
}

// brute-force crossing-form oracle on the raw time grid: count the dips of
// det(Psi - Id) below a threshold, with signature signs from the sampled
// generator, plus the half contribution at t = 0.
int cz_bruteforce(const SymplecticPath& path, double touch_tol) {
  auto det_mi = [](const Mat2& M) {
    return (M.m[0][0] - 1.0) * (M.m[1][1] - 1.0) - M.m[0][1] * M.m[1][0];
  };
  auto sig_at = [&path](size_t j) {
    const size_t a = j == 0 ? 0 : j - 1;
    const size_t b = std::min(j + 1, path.t.size() - 1);
    const double dt = path.t[b] - path.t[a];
    double A[2][2];
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k)
        A[i][k] = (path.Psi[b].m[i][k] - path.Psi[a].m[i][k]) / dt;
    // signature of omega(v, Av) symmetrized
    const double s00 = A[1][0], s11 = -A[0][1];
    const double s01 = 0.5 * (A[1][1] - A[0][0]);
    const double det = s00 * s11 - s01 * s01;
    const double tr = s00 + s11;
    if (det > 0) return tr > 0 ? 2 : -2;
    if (det < 0) return 0;
    return tr > 0 ? 1 : -1;
  };
  const size_t n = path.t.size();
  int mu = sig_at(0) / 2;
  size_t j = 2;
  std::vector<double> d(n);
  for (size_t i = 0; i < n; ++i) d[i] = det_mi(path.Psi[i]);
  while (j + 1 < n && d[j] < touch_tol) ++j;
  for (; j + 1 < n; ++j)
    if (d[j] <= d[j - 1] && d[j] <= d[j + 1] && d[j] < touch_tol)
      mu += sig_at(j);
  return mu;
}

}  // namespace

TEST_CASE("linearized return path is a rigid rotation") {
  const Profile p = example_profile();
  const double kappa = p.kappa();

  const SymplecticPath k1 = linearized_return_path(p, 1);
  k1.validate();
  CHECK(k1.period == doctest::Approx(0.1).epsilon(1e-15));
  // total angle 2 pi (-kappa): endpoint = R(2 pi |kappa|)
  const Mat2 expect = Mat2::rotation(2.0 * std::numbers::pi * (-kappa));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(k1.Psi.back().m[i][j] ==
            doctest::Approx(expect.m[i][j]).epsilon(1e-14));
  // endpoint is not the identity: nondegenerate
  CHECK(std::fabs((k1.Psi.back().m[0][0] - 1.0) *
                      (k1.Psi.back().m[1][1] - 1.0) -
                  k1.Psi.back().m[0][1] * k1.Psi.back().m[1][0]) > 1e-11);

  // k = 71 crosses one full turn: 71 sqrt2 / 100 = 1.00409...
  const SymplecticPath k71 = linearized_return_path(p, 71);
  const double total = -kappa * 71;
  CHECK(total == doctest::Approx(1.004091).epsilon(1e-6));
  CHECK(total > 1.0);
}

TEST_CASE("variational integration agrees with the closed form") {
  const Profile p = example_profile();
  for (int k : {1, 5, 37, 100}) {
    const SymplecticPath a = linearized_return_path(p, k);
    const SymplecticPath b = linearized_return_path_variational(p, k);
    REQUIRE(a.t.size() == b.t.size());
    double dev = 0.0;
    for (size_t i = 0; i < a.t.size(); ++i)
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          dev = std::max(dev, std::fabs(a.Psi[i].m[r][c] - b.Psi[i].m[r][c]));
    CHECK(dev <= 1e-8);
  }
}

TEST_CASE("conley_zehnder on rotations") {
  CHECK(conley_zehnder(rotation_path(std::sqrt(2.0) / 100.0)) == 1);
  CHECK(conley_zehnder(rotation_path(1.004)) == 3);
  CHECK(conley_zehnder(rotation_path(2.5)) == 5);
  // constant path at the identity is degenerate
  SymplecticPath constant;
  constant.period = 1.0;
  for (int i = 0; i <= 64; ++i) {
    constant.t.push_back(i / 64.0);
    constant.Psi.push_back(Mat2::identity());
  }
  CHECK_THROWS_WITH_AS(static_cast<void>(conley_zehnder(constant)),
                       doctest::Contains("degenerate"), std::invalid_argument);
}

TEST_CASE("conley_zehnder: 200 random rotations against the oracle") {
  std::mt19937_64 rng(42);
  auto uniform = [&rng] { return (rng() >> 11) * 0x1.0p-53; };
  int checked = 0;
  while (checked < 200) {
    const double theta = uniform() * 5.0;
    double dist = std::fabs(theta - std::round(theta));
    if (dist < 1e-2 || theta < 1e-2) continue;  // keep clear of degeneracy
    const SymplecticPath path = rotation_path(theta, 8192);
    const int expect = 2 * static_cast<int>(std::floor(theta)) + 1;
    CHECK(conley_zehnder(path) == expect);
    CHECK(cz_bruteforce(path, 1e-5) == expect);
    ++checked;
  }
}

TEST_CASE("binding orbit and covers: mu = 1 up to floor(1/|kappa|)") {
  const Profile p = example_profile();
  const int k_max = static_cast<int>(std::floor(1.0 / std::fabs(p.kappa())));
  CHECK(k_max == 70);
  for (int k = 1; k <= k_max; ++k)
    CHECK(conley_zehnder(linearized_return_path(p, k)) == 1);
  CHECK(conley_zehnder(linearized_return_path(p, 71)) == 3);
}

TEST_CASE("nondegeneracy audit: k kappa never within 1e-6 of an integer") {
  for (const KappaSpec& ks : KappaSpec::catalogue()) {
    const long double kap = std::fabs(static_cast<long double>(ks.value()));
    long double worst = 1.0L;
    for (int k = 1; k <= 10000; ++k) {
      const long double v = k * kap;
      const long double fr = v - std::floor(static_cast<double>(v));
      const long double d = fr < 0.5L ? fr : 1.0L - fr;
      worst = std::min(worst, d);
    }
    CHECK(static_cast<double>(worst) > 1e-6);
  }
}

TEST_CASE("fredholm index arithmetic") {
  CHECK(fredholm_index({0, {1}, 0}) == 2);
  CHECK(fredholm_index({0, {1, 1, 1}, 0}) == 2);
  CHECK(fredholm_index({2, {1}, 0}) == -2);
  for (int g = 0; g <= 3; ++g)
    CHECK(fredholm_index({g, {1}, 0}) == 2 - 2 * g);
  CHECK_THROWS_AS(static_cast<void>(fredholm_index({0, {}, 0})),
                  std::invalid_argument);
}

TEST_CASE("normal chern number") {
  CHECK(normal_chern(2, 0, 0) == 0);
  CHECK(normal_chern(2, 1, 0) == 1);
  CHECK(normal_chern(1, 0, 1) == 0);
  CHECK_THROWS_WITH_AS(static_cast<void>(normal_chern(1, 0, 0)),
                       doctest::Contains("parity"), std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(normal_chern(2, 0, -1)),
                  std::invalid_argument);
}

TEST_CASE("normal_chern inverts fredholm_index on consistent data") {
  // The two index relations cohere exactly when the puncture indices
  // satisfy sum(mu) = #punctures - #Gamma_0, as they do for the curves this
  // code builds (odd mu summing to the odd count, even mu summing to zero).
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    CurveTopology top;
    top.genus = static_cast<int>(rng() % 4);
    const int n_odd = 1 + static_cast<int>(rng() % 4);
    const int n_even = static_cast<int>(rng() % 3);
    int odd_sum = 0;
    for (int i = 0; i + 1 < n_odd; ++i) {
      const int mu = 2 * (static_cast<int>(rng() % 5) - 2) + 1;
      top.mu.push_back(mu);
      odd_sum += mu;
    }
    // force the odd-puncture sum to n_odd; the closing entry is again odd
    top.mu.push_back(n_odd - odd_sum);
    int even_sum = 0;
    for (int i = 0; i + 1 < n_even; ++i) {
      const int mu = 2 * (static_cast<int>(rng() % 5) - 2);
      top.mu.push_back(mu);
      even_sum += mu;
    }
    if (n_even > 0) top.mu.push_back(-even_sum);  // even sum = 0
    top.c1 = static_cast<int>(rng() % 5) - 2;
    CHECK(top.gamma0() == n_even);
    const int ind = fredholm_index(top);
    CHECK(normal_chern(ind, top.genus, top.gamma0()) == top.c1);
  }
}

TEST_CASE("page curve index pipeline: ind = 2 for planar pages") {
  const Profile p = example_profile();
  const int mu = conley_zehnder(linearized_return_path(p, 1));
  // disk page: one puncture; annulus page: two punctures; both genus zero
  for (int punctures : {1, 2}) {
    CurveTopology top;
    top.genus = 0;
    top.mu.assign(punctures, mu);
    top.c1 = 0;
    CHECK(top.gamma0() == 0);
    CHECK(fredholm_index(top) == 2);
  }
}
