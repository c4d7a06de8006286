#pragma once

#include <array>
#include <cmath>

#include "../core.hpp"

namespace lpgeom::detail {

// 2^{2k} B_{2k} / (2k)! for k = 1..12, the Laurent coefficients of coth t - 1/t.
inline const std::array<double, 12>& coth_coefficients() {
  static const std::array<double, 12> c = [] {
    const double b[12] = {1.0 / 6.0,           -1.0 / 30.0,       1.0 / 42.0,           -1.0 / 30.0,
                          5.0 / 66.0,          -691.0 / 2730.0,   7.0 / 6.0,            -3617.0 / 510.0,
                          43867.0 / 798.0,     -174611.0 / 330.0, 854513.0 / 138.0,     -236364091.0 / 2730.0};
    std::array<double, 12> out{};
    double f = 1.0;
    for (int k = 1; k <= 12; ++k) {
      f *= (2.0 * k - 1.0) * (2.0 * k);
      out[k - 1] = std::ldexp(b[k - 1], 2 * k) / f;
    }
    return out;
  }();
  return c;
}

// log(sinh(t)/t), accurate near zero and for large |t|.
inline double log_sinhc(double t) {
  const double a = std::abs(t);
  if (a < 0.5) {
    const double t2 = t * t;
    double term = 1.0, sum = 0.0;
    for (int k = 1; k < 12; ++k) {
      term *= t2 / ((2.0 * k) * (2.0 * k + 1.0));
      sum += term;
    }
    return std::log1p(sum);
  }
  return a + std::log1p(-std::exp(-2.0 * a)) - std::log(2.0 * a);
}

// Mean of x under the density proportional to e^{tx} on [-1,1]: coth t - 1/t.
inline double langevin(double t) {
  const double a = std::abs(t);
  if (a < 0.5) {
    const auto& c = coth_coefficients();
    const double t2 = t * t;
    double s = 0.0, p = t;
    for (double ck : c) {
      s += ck * p;
      p *= t2;
    }
    return s;
  }
  const double e = std::exp(-2.0 * a);
  const double coth = (1.0 + e) / (1.0 - e);
  return std::copysign(coth - 1.0 / a, t);
}

// Variance of the same tilted density: 1/t^2 - 1/sinh^2 t.
inline double langevin_variance(double t) {
  const double a = std::abs(t);
  if (a < 0.5) {
    const auto& c = coth_coefficients();
    const double t2 = t * t;
    double s = 0.0, p = 1.0;
    for (int k = 1; k <= 12; ++k) {
      s += c[k - 1] * (2.0 * k - 1.0) * p;
      p *= t2;
    }
    return s;
  }
  const double e = std::exp(-2.0 * a);
  const double csch2 = 4.0 * e / ((1.0 - e) * (1.0 - e));
  return 1.0 / (a * a) - csch2;
}

// log I_nu(t) for t >= 0, stable for large t.
inline double log_bessel_i(double nu, double t) {
  if (t == 0.0) return nu == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (t < 1e-3) {
    const double q = 0.25 * t * t;
    return nu * std::log(0.5 * t) - std::lgamma(nu + 1.0) + std::log1p(q / (nu + 1.0) + q * q / (2.0 * (nu + 1.0) * (nu + 2.0)));
  }
  if (t <= 40.0) return std::log(std::cyl_bessel_i(nu, t));
  const double mu = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double next = -term * (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * t);
    if (std::abs(next) > std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return t - 0.5 * std::log(2.0 * std::numbers::pi * t) + std::log(sum);
}

// R(t) = I_{nu+1}(t) / I_nu(t).
inline double bessel_ratio(double nu, double t) {
  if (t < 1e-3) return t / (2.0 * nu + 2.0) * (1.0 - t * t / (4.0 * (nu + 1.0) * (nu + 2.0)));
  return std::exp(log_bessel_i(nu + 1.0, t) - log_bessel_i(nu, t));
}

}  // namespace lpgeom::detail
