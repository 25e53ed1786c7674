#pragma once

#include <cmath>
#include <stdexcept>

namespace openbook {

// C-infinity flat-ended ramp W(x) = sigma(x) / (sigma(x) + sigma(1-x)) with
// sigma(x) = exp(-1/x).  W vanishes to all orders at 0 and equals 1 to all
// orders at 1, and is strictly increasing on (0, 1).  Exact constancy on
// neighborhoods (the tau / twist / perturbation flats) comes from the
// x <= 0 and x >= 1 branches; inside (0, 1) the exp(-1/x) tails keep every
// strict inequality strict in floating point down to genuine underflow.

struct RampVal {
  double w;    // W(x)
  double wp;   // W'(x)
  double wpp;  // W''(x)
};

namespace detail {

// sigma and its first two derivatives; sigma(x) = 0 for x <= 0.
inline void flat_exp(double x, double& s, double& sp, double& spp) {
  if (x <= 0.0) {
    s = sp = spp = 0.0;
    return;
  }
  s = std::exp(-1.0 / x);
  if (s == 0.0) {
    sp = spp = 0.0;
    return;
  }
  const double ix = 1.0 / x;
  sp = s * ix * ix;
  spp = s * (ix * ix * ix * ix - 2.0 * ix * ix * ix);
}

}  // namespace detail

inline RampVal ramp_eval(double x) {
  if (x <= 0.0) return {0.0, 0.0, 0.0};
  if (x >= 1.0) return {1.0, 0.0, 0.0};
  double S, Sp, Spp, T, Tsp, Tspp;
  detail::flat_exp(x, S, Sp, Spp);
  detail::flat_exp(1.0 - x, T, Tsp, Tspp);
  const double Tp = -Tsp;   // d/dx sigma(1-x)
  const double Tpp = Tspp;  // d2/dx2 sigma(1-x)
  const double den = S + T;
  const double w = S / den;
  const double num = Sp * T - S * Tp;
  const double wp = num / (den * den);
  const double nump = Spp * T - S * Tpp;
  const double wpp =
      nump / (den * den) - 2.0 * num * (Sp + Tp) / (den * den * den);
  return {w, wp, wpp};
}

inline double ramp(double x) { return ramp_eval(x).w; }

// Smooth interpolation a -> b over t in [0,1], flat at both ends.
inline double blend(double t, double a, double b) {
  if (t < 0.0 || t > 1.0) throw std::domain_error("blend: t outside [0,1]");
  return a + (b - a) * ramp(t);
}

}  // namespace openbook
