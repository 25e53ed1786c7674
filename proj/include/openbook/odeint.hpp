#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace openbook {

// Embedded Dormand-Prince 5(4) step with standard PI step-size control.
// Small fixed dimension, no allocation in the hot path.
template <int N>
struct Dopri5 {
  using Vec = std::array<double, N>;
  using Rhs = std::function<void(double s, const Vec& y, Vec& dy)>;

  Rhs rhs;
  double atol = 1e-12;
  double rtol = 1e-12;
  double h_init = 1e-3;
  double h_min = 1e-14;
  double h_max = 10.0;

  struct StepInfo {
    double s = 0.0;
    Vec y{};
    double err = 0.0;  // local error estimate of the accepted step
    double h = 0.0;
  };

  // Integrate from (s, y) to exactly s_end, invoking on_accept after every
  // accepted step; when on_accept returns false the march stops early.
  // Throws on step underflow.
  template <typename Cb>
  void integrate_to(double& s, Vec& y, double s_end, Cb&& on_accept) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                            c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113,
                            b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                            e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    if (s_end <= s) return;
    double h = std::min(h_init, s_end - s);
    Vec k1, k2, k3, k4, k5, k6, k7, yt, y5;
    rhs(s, y, k1);
    int rejects_in_a_row = 0;
    while (s < s_end) {
      h = std::min(h, s_end - s);
      if (h < h_min) throw std::runtime_error("ode step underflow");
      auto stage = [&](double cs, const Vec& ys, Vec& k) { rhs(s + cs * h, ys, k); };
      for (int i = 0; i < N; ++i) yt[i] = y[i] + h * a21 * k1[i];
      stage(c2, yt, k2);
      for (int i = 0; i < N; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
      stage(c3, yt, k3);
      for (int i = 0; i < N; ++i)
        yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      stage(c4, yt, k4);
      for (int i = 0; i < N; ++i)
        yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      stage(c5, yt, k5);
      for (int i = 0; i < N; ++i)
        yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                            a64 * k4[i] + a65 * k5[i]);
      stage(1.0, yt, k6);
      for (int i = 0; i < N; ++i)
        y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                            b6 * k6[i]);
      rhs(s + h, y5, k7);

      double err = 0.0;
      for (int i = 0; i < N; ++i) {
        const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                               e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = atol + rtol * std::max(std::fabs(y[i]), std::fabs(y5[i]));
        const double r = ei / sc;
        err += r * r;
      }
      err = std::sqrt(err / N);

      if (err <= 1.0) {
        s += h;
        y = y5;
        k1 = k7;  // FSAL
        on_accept(StepInfo{s, y, err, h});
        rejects_in_a_row = 0;
        const double fac =
            std::min(5.0, std::max(0.2, 0.9 * std::pow(err > 0 ? err : 1e-16, -0.2)));
        h = std::min(h * fac, h_max);
      } else {
        ++rejects_in_a_row;
        if (rejects_in_a_row > 50)
          throw std::runtime_error("ode step control failed to converge");
        h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
      }
    }
  }
};

}  // namespace openbook
