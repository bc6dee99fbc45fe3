#pragma once

// Scalar special functions and the adaptive quadrature engine every constant
// in the library is built on.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <type_traits>
#include <vector>

#include "fhardy/error.hpp"

namespace fhardy {

/// Tolerances and endpoint behaviour for `integrate`.
///
/// A singularity exponent `a` declares that the integrand behaves like
/// `(distance to that endpoint)^a` there. Negative exponents are removed by a
/// power substitution, so the engine only ever sees bounded integrands.
struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::size_t max_subdivisions = std::size_t{1} << 20;
  std::optional<double> left_singularity_exponent;
  std::optional<double> right_singularity_exponent;

  QuadratureSpec& left(double exponent) {
    left_singularity_exponent = exponent;
    return *this;
  }
  QuadratureSpec& right(double exponent) {
    right_singularity_exponent = exponent;
    return *this;
  }
  QuadratureSpec& tolerance(double abs, double rel) {
    abs_tol = abs;
    rel_tol = rel;
    return *this;
  }

  void validate() const {
    detail::require(abs_tol > 0.0 && rel_tol > 0.0, "quadrature tolerances must be positive");
    detail::require(max_subdivisions > 0, "quadrature needs at least one subdivision");
    if (left_singularity_exponent) detail::require(*left_singularity_exponent > -1.0, "left singularity exponent must exceed -1");
    if (right_singularity_exponent) detail::require(*right_singularity_exponent > -1.0, "right singularity exponent must exceed -1");
  }
};

struct QuadratureResult {
  double value = 0.0;
  double err_estimate = 0.0;
  std::size_t subdivisions = 0;
};

// ---------------------------------------------------------------------------
// Gamma family
// ---------------------------------------------------------------------------

namespace detail {

// Lanczos approximation, g = 607/128, 15 terms (Godfrey's coefficients).
inline constexpr double lanczos_g = 607.0 / 128.0;
inline constexpr std::array<double, 15> lanczos_coef = {
    0.99999999999999709182,     57.156235665862923517,      -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,    0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4, 0.15808870322491248884e-3,
    -0.21026444172410488319e-3, 0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4, 0.36899182659531622704e-5};

inline double lanczos_log_gamma(double x) {
  // valid for x >= 0.5
  double sum = 0.0;
  for (std::size_t i = lanczos_coef.size() - 1; i > 0; --i) sum += lanczos_coef[i] / (x + static_cast<double>(i));
  sum += lanczos_coef[0];
  const double t = x + lanczos_g + 0.5;
  return (x + 0.5) * std::log(t) - t + 0.5 * std::log(2.0 * std::numbers::pi) + std::log(sum / x);
}

}  // namespace detail

/// ln Γ(x) for x > 0 (Lanczos kernel, reflection below 1/2).
inline double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw domain_error("log_gamma requires x > 0");
  if (x == 1.0 || x == 2.0) return 0.0;
  if (x < 0.5) {
    // Γ(x)Γ(1-x) = π / sin(πx)
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - detail::lanczos_log_gamma(1.0 - x);
  }
  return detail::lanczos_log_gamma(x);
}

inline double gamma_fn(double x) { return std::exp(log_gamma(x)); }

/// Γ(a)Γ(b)/Γ(a+b), evaluated in log space.
inline double beta(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw domain_error("beta requires a, b > 0");
  return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr std::array<double, 8> gk15_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> gk15_kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gk15_gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, err;
  bool operator<(const Segment& o) const { return err < o.err; }
};

// One 15-point Kronrod panel with the QUADPACK error heuristic.
template <class G>
Segment gk15(const G& g, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 15> fv{};
  fv[7] = g(center);
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * gk15_nodes[j];
    fv[j] = g(center - dx);
    fv[14 - j] = g(center + dx);
  }
  double kronrod = gk15_kronrod_weights[7] * fv[7];
  double gauss = gk15_gauss_weights[3] * fv[7];
  double abs_sum = std::abs(kronrod);
  for (std::size_t j = 0; j < 7; ++j) {
    const double pair = fv[j] + fv[14 - j];
    kronrod += gk15_kronrod_weights[j] * pair;
    abs_sum += gk15_kronrod_weights[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
    if (j % 2 == 1) gauss += gk15_gauss_weights[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = gk15_kronrod_weights[7] * std::abs(fv[7] - mean);
  for (std::size_t j = 0; j < 7; ++j)
    asc += gk15_kronrod_weights[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));

  double err = std::abs((kronrod - gauss) * half);
  asc *= std::abs(half);
  abs_sum *= std::abs(half);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * abs_sum, err);
  return {a, b, kronrod * half, err};
}

template <class G>
QuadratureResult adaptive_gk(const G& g, double a, double b, const QuadratureSpec& spec) {
  std::priority_queue<Segment> heap;
  std::vector<Segment> frozen;
  Segment first = gk15(g, a, b);
  double total = first.value;
  double total_err = first.err;
  heap.push(first);
  std::size_t subdivisions = 1;
  int since_resum = 0;
  while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
    if (heap.empty())
      throw convergence_error("quadrature stalled at roundoff level before reaching tolerance");
    if (subdivisions >= spec.max_subdivisions)
      throw convergence_error("quadrature reached max_subdivisions without meeting tolerance");
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const double scale = std::max(std::abs(worst.a), std::abs(worst.b));
    if (!(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e3 * std::numeric_limits<double>::epsilon() * scale) {
      frozen.push_back(worst);
      continue;
    }
    Segment left = gk15(g, worst.a, mid);
    Segment right = gk15(g, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
    if (++since_resum == 256) {
      // drift control for the running sums
      since_resum = 0;
      auto copy = heap;
      total = 0.0;
      total_err = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        total_err += copy.top().err;
        copy.pop();
      }
      for (const auto& s : frozen) {
        total += s.value;
        total_err += s.err;
      }
    }
  }
  if (!std::isfinite(total)) throw convergence_error("quadrature produced a non-finite value; check the declared singularities");
  return {total, total_err, subdivisions};
}

// Adapts an integrand to the (t, distance_from_left, distance_from_right)
// calling convention used internally.
template <class F>
double call3(const F& f, double t, double dl, double dr) {
  if constexpr (std::is_invocable_r_v<double, const F&, double, double, double>) {
    return f(t, dl, dr);
  } else {
    (void)dl;
    (void)dr;
    return f(t);
  }
}

}  // namespace detail

/// Adaptive integral of f over (a, b).
///
/// `f` is either `double(double t)` or `double(double t, double dl, double dr)`
/// where dl = t - a and dr = b - t are supplied without cancellation; the
/// second form should be used when the integrand is singular at an endpoint
/// away from the origin.
template <class F>
QuadratureResult integrate(const F& f, double a, double b, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(a < b)) throw domain_error("integrate requires a < b");
  const double lexp = spec.left_singularity_exponent.value_or(0.0);
  const double rexp = spec.right_singularity_exponent.value_or(0.0);
  const bool sub_left = lexp < 0.0;
  const bool sub_right = rexp < 0.0;

  if (!sub_left && !sub_right) {
    auto g = [&](double t) { return detail::call3(f, t, t - a, b - t); };
    return detail::adaptive_gk(g, a, b, spec);
  }

  // Each singular end gets its own half; t - a = L σ^m with m = 1/(1 + exponent)
  // turns (t - a)^exponent dt into a bounded multiple of dσ.
  const double mid = (sub_left && sub_right) ? 0.5 * (a + b) : (sub_left ? b : a);
  QuadratureSpec half_spec = spec;
  half_spec.abs_tol = sub_left && sub_right ? 0.5 * spec.abs_tol : spec.abs_tol;
  QuadratureResult out;
  if (sub_left) {
    const double len = mid - a;
    const double m = 1.0 / (1.0 + lexp);
    auto g = [&](double sigma) {
      const double dl = len * std::pow(sigma, m);
      if (dl == 0.0) return 0.0;
      const double jac = len * m * std::pow(sigma, m - 1.0);
      return detail::call3(f, a + dl, dl, b - (a + dl)) * jac;
    };
    auto r = detail::adaptive_gk(g, 0.0, 1.0, half_spec);
    out.value += r.value;
    out.err_estimate += r.err_estimate;
    out.subdivisions += r.subdivisions;
  }
  if (sub_right) {
    const double len = b - mid;
    const double m = 1.0 / (1.0 + rexp);
    auto g = [&](double sigma) {
      const double dr = len * std::pow(sigma, m);
      if (dr == 0.0) return 0.0;
      const double jac = len * m * std::pow(sigma, m - 1.0);
      return detail::call3(f, b - dr, (b - dr) - a, dr) * jac;
    };
    auto r = detail::adaptive_gk(g, 0.0, 1.0, half_spec);
    out.value += r.value;
    out.err_estimate += r.err_estimate;
    out.subdivisions += r.subdivisions;
  }
  return out;
}

/// Incomplete Beta B(x; a, b) = ∫_0^x t^{a-1} (1-t)^{b-1} dt for 0 <= x < 1,
/// a > 0 and any real b.
inline double inc_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x < 1.0)) throw domain_error("inc_beta requires 0 <= x < 1");
  if (!(a > 0.0)) throw domain_error("inc_beta requires a > 0");
  if (x == 0.0) return 0.0;
  auto f = [a, b](double t, double dl, double) { return std::pow(dl, a - 1.0) * std::exp((b - 1.0) * std::log1p(-t)); };
  QuadratureSpec spec;
  spec.tolerance(1e-14, 1e-13);
  spec.left(a - 1.0);
  return integrate(f, 0.0, x, spec).value;
}

}  // namespace fhardy
