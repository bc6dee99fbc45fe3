#pragma once

// Closed-form constants of the fractional Hardy problem, with quadrature
// routes wherever an integral representation exists.

#include <cmath>
#include <numbers>

#include "fhardy/error.hpp"
#include "fhardy/specfun.hpp"

namespace fhardy {

/// Dimension N, fractional order s and integrability exponent p.
struct FracParams {
  int N = 1;
  double s = 0.5;
  double p = 1.0;

  FracParams() = default;
  FracParams(int dim, double order, double exponent) : N(dim), s(order), p(exponent) { validate(); }

  void validate() const {
    detail::require(N >= 1, "dimension N must be >= 1");
    detail::require_fractional_order(s);
    detail::require(p >= 1.0 && std::isfinite(p), "exponent p must lie in [1, inf)");
  }

  double sp() const { return s * p; }
  bool sp_lt_1() const { return s * p < 1.0; }
  bool sp_le_1() const { return s * p <= 1.0; }
};

/// Lebesgue measure of the unit ball of R^k, π^{k/2} / Γ(k/2 + 1).
inline double unit_ball_volume(int k) {
  detail::require(k >= 0, "unit_ball_volume requires k >= 0");
  const double half = 0.5 * k;
  return std::exp(half * std::log(std::numbers::pi) - log_gamma(half + 1.0));
}

/// C_{N,q} = π^{(N-1)/2} Γ((q+1)/2) / Γ((N+q)/2); identically 1 for N = 1.
inline double c_constant(int N, double q) {
  detail::require(N >= 1, "c_constant requires N >= 1");
  detail::require(q >= 0.0, "c_constant requires q >= 0");
  if (N == 1) return 1.0;
  return std::exp(0.5 * (N - 1) * std::log(std::numbers::pi) + log_gamma(0.5 * (q + 1.0)) - log_gamma(0.5 * (N + q)));
}

/// (N-1) ω_{N-1} ∫_0^∞ t^{N-2} (1+t²)^{-(N+q)/2} dt, mapped to (0,1) by t = u/(1-u).
inline QuadratureResult c_constant_quadrature_detailed(int N, double q, const QuadratureSpec& spec = {}) {
  detail::require(N >= 2, "c_constant_quadrature requires N >= 2");
  detail::require(q >= 0.0, "c_constant_quadrature requires q >= 0");
  const double e = 0.5 * (N + q);
  // t^{N-2} (1+t²)^{-e} dt  =  u^{N-2} (1-u)^q ((1-u)² + u²)^{-e} du
  auto f = [N, q, e](double u, double, double w) {
    return std::pow(u, N - 2) * std::pow(w, q) * std::pow(w * w + u * u, -e);
  };
  auto r = integrate(f, 0.0, 1.0, spec);
  const double pre = (N - 1) * unit_ball_volume(N - 1);
  r.value *= pre;
  r.err_estimate *= pre;
  return r;
}

inline double c_constant_quadrature(int N, double q) { return c_constant_quadrature_detailed(N, q).value; }

/// Λ_{s,p} = 2 ∫_0^1 |1 - t^{(sp-1)/p}|^p / (1-t)^{1+sp} dt + 2/(sp), always by
/// quadrature (also at p = 1, where it must reproduce 4/s).
///
/// The integral is split at t = 1/2; the half near t = 1 is rewritten in
/// u = 1 - t so both singular endpoints sit at an exact zero.
inline QuadratureResult lambda_constant_integral(double s, double p, const QuadratureSpec& base = {}) {
  detail::require_fractional_order(s);
  detail::require(p >= 1.0, "lambda_constant requires p >= 1");
  const double q = s * p;
  const double c = (q - 1.0) / p;
  QuadratureResult out;
  if (q != 1.0) {
    // t in (0, 1/2)
    QuadratureSpec left = base;
    left.abs_tol *= 0.5;
    if (q < 1.0) left.left(q - 1.0);
    auto f_left = [q, p, c](double t) {
      if (q < 1.0) {
        // |1 - t^c|^p = t^{q-1} (1 - t^{(1-q)/p})^p
        return std::pow(t, q - 1.0) * std::pow(-std::expm1(-c * std::log(t)), p) * std::pow(1.0 - t, -1.0 - q);
      }
      return std::pow(-std::expm1(c * std::log(t)), p) * std::pow(1.0 - t, -1.0 - q);
    };
    auto rl = integrate(f_left, 0.0, 0.5, left);

    // u = 1 - t in (0, 1/2): |1 - (1-u)^c|^p u^{-1-q} = u^α r(u)^p with α = p-1-q and
    // r(u) = |(1-u)^c - 1|/u → |c|. The |c|^p u^α part is exact; the remainder
    // vanishes like u^{α+1}, so α close to -1 (sp and p both near 1) stays harmless.
    QuadratureSpec right = base;
    right.abs_tol *= 0.5;
    const double alpha = p - 1.0 - q;
    const double cp = std::pow(std::abs(c), p);
    auto f_right = [p, c, alpha, cp](double u) {
      const double L = std::log1p(-u);
      const double x = c * L;
      // A = expm1(x)/x - 1, B = L/(-u) - 1, both without cancellation near 0
      double A = 0.0, B = 0.0;
      if (std::abs(x) < 1e-2) {
        double term = 1.0;
        for (int k = 1; k <= 6; ++k) A += (term *= x / (k + 1));
      } else {
        A = std::expm1(x) / x - 1.0;
      }
      if (u < 1e-2) {
        double pw = 1.0;
        for (int k = 1; k <= 8; ++k) B += (pw *= u) / (k + 1);
      } else {
        B = L / -u - 1.0;
      }
      return std::pow(u, alpha) * cp * std::expm1(p * std::log1p(A + B + A * B));
    };
    auto rr = integrate(f_right, 0.0, 0.5, right);
    rr.value += cp * std::pow(0.5, alpha + 1.0) / (alpha + 1.0);
    out.value = 2.0 * (rl.value + rr.value);
    out.err_estimate = 2.0 * (rl.err_estimate + rr.err_estimate);
    out.subdivisions = rl.subdivisions + rr.subdivisions;
  }
  out.value += 2.0 / q;
  return out;
}

/// Λ_{s,p}; exactly 4/s at p = 1.
inline double lambda_constant(double s, double p) {
  detail::require_fractional_order(s);
  detail::require(p >= 1.0, "lambda_constant requires p >= 1");
  if (p == 1.0) return 4.0 / s;
  return lambda_constant_integral(s, p).value;
}

/// Sharp Hardy constant of the half-space, C_{N,sp} Λ_{s,p}.
inline double sharp_halfspace(int N, double s, double p) {
  FracParams(N, s, p).validate();
  return c_constant(N, s * p) * lambda_constant(s, p);
}

/// Sharp constant on the punctured space R^N \ {0} for p = 1:
/// (4/s) π^{N/2} Γ(1-s) / (Γ((N-s)/2) Γ(1-s/2)).
inline double sharp_punctured(int N, double s) {
  detail::require(N >= 1, "sharp_punctured requires N >= 1");
  detail::require_fractional_order(s);
  return std::exp(std::log(4.0 / s) + 0.5 * N * std::log(std::numbers::pi) + log_gamma(1.0 - s) -
                  log_gamma(0.5 * (N - s)) - log_gamma(1.0 - 0.5 * s));
}

/// Fractional perimeter of the unit ball of R^N (Garofalo's closed form).
inline double perimeter_ball_closed(int N, double s) {
  detail::require(N >= 1, "perimeter_ball_closed requires N >= 1");
  detail::require_fractional_order(s);
  const double log_omega = std::log(unit_ball_volume(N));
  const double lg = (1.0 - s / N) * log_omega + std::log(static_cast<double>(N)) +
                    0.5 * (N + s) * std::log(std::numbers::pi) + log_gamma(1.0 - s) - std::log(0.5 * s) -
                    (s / N) * log_gamma(0.5 * N + 1.0) - log_gamma(1.0 - 0.5 * s) - log_gamma(0.5 * (N - s) + 1.0);
  return std::exp(lg);
}

/// Upper bound for h_{s,1}(B^N) / h_{s,1}(H^N_+), N >= 2.
inline double ball_ratio_bound(int N, double s) {
  detail::require(N >= 2, "ball_ratio_bound requires N >= 2");
  detail::require_fractional_order(s);
  return std::exp(0.5 * std::log(std::numbers::pi) - log_gamma(1.0 - 0.5 * s) - log_gamma(0.5 + 0.5 * s) +
                  log_gamma(0.5 * (N + s)) - log_gamma(0.5 * (N - s)) + log_gamma(N - s) - log_gamma(N));
}

/// Classical sharp Hardy constant ((p-1)/p)^p.
inline double classical_constant(double p) {
  detail::require(p >= 1.0, "classical_constant requires p >= 1");
  if (p == 1.0) return 0.0;
  return std::pow((p - 1.0) / p, p);
}

}  // namespace fhardy
