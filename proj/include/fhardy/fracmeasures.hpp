#pragma once

// Fractional perimeters P_s(E) = 2∫_E∫_{E^c}|x-y|^{-1-s} and distance-weighted
// volumes V_{q,Ω}(E) = ∫_E d_Ω^{-q}. Closed forms in 1-D and for balls, plus
// a quadrature route for the perimeter.

#include <cmath>
#include <string>
#include <vector>

#include "fhardy/constants.hpp"
#include "fhardy/error.hpp"
#include "fhardy/sets1d.hpp"
#include "fhardy/specfun.hpp"

namespace fhardy {

enum class Method { closed_form, quadrature, monte_carlo };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::closed_form:
      return "closed_form";
    case Method::quadrature:
      return "quadrature";
    default:
      return "monte_carlo";
  }
}

struct MeasureResult {
  double value = 0.0;
  Method method = Method::closed_form;
  double err_estimate = 0.0;
};

namespace detail {

// t^{1-q}, with 0 at t = 0 so touching intervals cancel exactly
inline double g_pow(double t, double q) { return t > 0.0 ? std::pow(t, 1.0 - q) : 0.0; }

// ∫_I∫_J |x-y|^{-1-q} dy dx for I = (a1,a2) lying left of J = (b1,b2), a2 <= b1
inline double pair_interaction(double a1, double a2, double b1, double b2, double q) {
  return (g_pow(b1 - a1, q) - g_pow(b1 - a2, q) - g_pow(b2 - a1, q) + g_pow(b2 - a2, q)) / (q * (1.0 - q));
}

// ∫_c^d d^{-q}, where d is the distance to the boundary of the component (a,b) ⊇ (c,d)
inline double weight_integral(double a, double b, double c, double d, double q) {
  const double m = 0.5 * (a + b);  // ±∞ for unbounded components
  double v = 0.0;
  if (c < m) v += g_pow(std::min(d, m) - a, q) - g_pow(c - a, q);
  if (d > m) v += g_pow(b - std::max(c, m), q) - g_pow(b - d, q);
  return v / (1.0 - q);
}

}  // namespace detail

/// Closed-form P_s of a finite union of intervals.
inline MeasureResult perimeter_interval_union(const IntervalUnion& E, double s) {
  detail::require_fractional_order(s);
  detail::require(!E.empty(), "perimeter of an empty set requested");
  detail::require(E.bounded(), "perimeter needs a bounded set");
  double self = 0.0, cross = 0.0;
  for (const auto& I : E) self += std::pow(I.length(), 1.0 - s);
  for (std::size_t i = 0; i < E.size(); ++i)
    for (std::size_t j = i + 1; j < E.size(); ++j)
      cross += detail::pair_interaction(E[i].a, E[i].b, E[j].a, E[j].b, s);
  return {self * 4.0 / (s * (1.0 - s)) - 4.0 * cross, Method::closed_form, 0.0};
}

/// P_s by quadrature: the inner integral over each gap of E^c is taken in
/// closed form, the outer one over each component of E adaptively.
inline MeasureResult perimeter_oracle(const IntervalUnion& E, double s, std::size_t budget = std::size_t{1} << 16) {
  detail::require_fractional_order(s);
  detail::require(!E.empty() && E.bounded(), "perimeter oracle needs a nonempty bounded set");
  // complement gaps, including the two unbounded ends
  std::vector<Interval> gaps{{-inf, E[0].a}};
  for (std::size_t i = 0; i + 1 < E.size(); ++i)
    if (E[i].b < E[i + 1].a) gaps.push_back({E[i].b, E[i + 1].a});
  gaps.push_back({E[E.size() - 1].b, inf});

  MeasureResult out{0.0, Method::quadrature, 0.0};
  for (const auto& I : E) {
    auto inner = [&](double, double dl, double dr) {
      double sum = 0.0;
      for (const auto& G : gaps) {
        if (G.b <= I.a) {
          // x - y ranges over (dl + I.a - G.b, dl + I.a - G.a)
          const double near = dl + (I.a - G.b);
          sum += std::pow(near, -s);
          if (std::isfinite(G.a)) sum -= std::pow(dl + (I.a - G.a), -s);
        } else {
          const double near = dr + (G.a - I.b);
          sum += std::pow(near, -s);
          if (std::isfinite(G.b)) sum -= std::pow(dr + (G.b - I.b), -s);
        }
      }
      return sum / s;
    };
    QuadratureSpec spec;
    spec.left(-s).right(-s);
    spec.tolerance(1e-12, 1e-11);
    spec.max_subdivisions = budget;
    const auto r = integrate(inner, I.a, I.b, spec);
    out.value += 2.0 * r.value;
    out.err_estimate += 2.0 * r.err_estimate;
  }
  return out;
}

/// V_{q,Ω}(E) = ∫_E d_Ω^{-q}, by exact power-rule pieces. E may straddle
/// null sets of Ω^c (e.g. E = (-1,1) inside (-1,0) ∪ (0,1)).
inline MeasureResult weighted_volume(const Domain1D& omega, const IntervalUnion& E, double q) {
  detail::require(q >= 0.0 && q < 1.0, "weight exponent q must lie in [0,1)");
  double total = 0.0;
  for (const auto& I : E) {
    double covered = 0.0;
    for (const auto& C : omega.components()) {
      const double c = std::max(I.a, C.a), d = std::min(I.b, C.b);
      if (!(c < d)) continue;
      covered += d - c;
      total += detail::weight_integral(C.a, C.b, c, d, q);
    }
    if (!(std::abs(covered - I.length()) <= 1e-12 * std::max(1.0, I.length())))
      throw domain_error("weighted_volume: set " + format_union(E) + " is not contained in the domain");
  }
  return {total, Method::closed_form, 0.0};
}

enum class BallDomain { ball_domain, punctured_space };

/// V of the unit ball of R^N, weighted by d_{B^N}^{-s} or by |x|^{-s}.
inline double weighted_volume_ball(int N, double s, BallDomain kind) {
  detail::require(N >= 1, "dimension must be >= 1");
  detail::require_fractional_order(s);
  const double nw = N * unit_ball_volume(N);
  if (kind == BallDomain::punctured_space) return nw / (N - s);
  return nw * std::exp(log_gamma(N) + log_gamma(1.0 - s) - log_gamma(N + 1.0 - s));
}

/// [u]_{W^{s,1}} = ∫_0^∞ P_s({u > t}) dt, exact over the finitely many levels.
inline double seminorm_s1_step(const StepFunction& u, double s) {
  detail::require_fractional_order(s);
  double total = 0.0, prev = 0.0;
  for (double w : u.levels()) {
    total += (w - prev) * perimeter_interval_union(u.superlevel_set(prev), s).value;
    prev = w;
  }
  return total;
}

/// [u]^p_{W^{s,p}} of a step function, exact cell by cell (needs sp < 1).
inline double seminorm_p_step(const StepFunction& u, double s, double p) {
  detail::require_fractional_order(s);
  detail::require(p >= 1.0, "exponent p must be >= 1");
  const double q = s * p;
  detail::require(q < 1.0, "step functions have finite (s,p)-seminorm only for sp < 1");
  if (u.is_zero()) return 0.0;
  const auto& x = u.breakpoints();
  const auto& v = u.values();
  const std::size_t m = v.size();
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    // exterior on both sides, where u = 0
    const double vi = std::pow(v[i], p);
    const double left = detail::g_pow(x[i + 1] - x.front(), q) - detail::g_pow(x[i] - x.front(), q);
    const double right = detail::g_pow(x.back() - x[i], q) - detail::g_pow(x.back() - x[i + 1], q);
    total += 2.0 * vi * (left + right) / (q * (1.0 - q));
    for (std::size_t j = i + 1; j < m; ++j) {
      const double diff = std::abs(v[i] - v[j]);
      if (diff == 0.0) continue;
      total += 2.0 * std::pow(diff, p) * detail::pair_interaction(x[i], x[i + 1], x[j], x[j + 1], q);
    }
  }
  return total;
}

/// ∫ u^p d_Ω^{-q} of a step function supported in Ω.
inline double weighted_lp_step(const StepFunction& u, const Domain1D& omega, double q, double p = 1.0) {
  const auto& x = u.breakpoints();
  const auto& v = u.values();
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) continue;
    total += std::pow(v[i], p) * weighted_volume(omega, IntervalUnion{{x[i], x[i + 1]}}, q).value;
  }
  return total;
}

/// Fractional Hardy quotient [u]^p_{W^{s,p}} / ∫ u^p d_Ω^{-sp} of a step
/// function; an upper bound for h_{s,p}(Ω).
inline double hardy_ratio_step(const StepFunction& u, const Domain1D& omega, double s, double p = 1.0) {
  detail::require_fractional_order(s);
  if (u.is_zero()) throw domain_error("hardy_ratio_step: u vanishes identically");
  const double num = p == 1.0 ? seminorm_s1_step(u, s) : seminorm_p_step(u, s, p);
  const double den = weighted_lp_step(u, omega, s * p, p);
  if (!(den > 0.0)) throw domain_error("hardy_ratio_step: zero denominator");
  return num / den;
}

}  // namespace fhardy
