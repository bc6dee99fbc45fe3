#pragma once

// One-dimensional geometry: finite unions of open intervals, the half-line,
// the punctured line, distance functions, step functions and their
// symmetric decreasing rearrangements.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "fhardy/error.hpp"

namespace fhardy {

inline constexpr double inf = std::numeric_limits<double>::infinity();

struct Interval {
  double a = 0.0;
  double b = 0.0;

  double length() const { return b - a; }
  bool contains(double x) const { return a < x && x < b; }
  double midpoint() const { return 0.5 * (a + b); }
};

/// Ordered finite union of pairwise disjoint open intervals. Touching
/// intervals stay separate: the shared endpoint is not a member.
class IntervalUnion {
public:
  IntervalUnion() = default;
  IntervalUnion(std::vector<Interval> iv) : iv_(std::move(iv)) { validate(); }
  IntervalUnion(std::initializer_list<Interval> iv) : iv_(iv) { validate(); }

  const std::vector<Interval>& intervals() const { return iv_; }
  std::size_t size() const { return iv_.size(); }
  bool empty() const { return iv_.empty(); }
  const Interval& operator[](std::size_t i) const { return iv_[i]; }
  auto begin() const { return iv_.begin(); }
  auto end() const { return iv_.end(); }

  double measure() const {
    double m = 0.0;
    for (const auto& I : iv_) m += I.length();
    return m;
  }

  bool bounded() const { return iv_.empty() || (std::isfinite(iv_.front().a) && std::isfinite(iv_.back().b)); }

  bool contains(double x) const {
    auto it = std::upper_bound(iv_.begin(), iv_.end(), x, [](double v, const Interval& I) { return v < I.b; });
    return it != iv_.end() && it->contains(x);
  }

  /// Index of the component containing x, or npos.
  std::size_t component_of(double x) const {
    for (std::size_t i = 0; i < iv_.size(); ++i)
      if (iv_[i].contains(x)) return i;
    return npos;
  }

  IntervalUnion scaled(double lambda) const {
    detail::require(lambda > 0.0, "scale factor must be positive");
    std::vector<Interval> out;
    for (const auto& I : iv_) out.push_back({lambda * I.a, lambda * I.b});
    return IntervalUnion(std::move(out));
  }

  IntervalUnion translated(double t) const {
    std::vector<Interval> out;
    for (const auto& I : iv_) out.push_back({I.a + t, I.b + t});
    return IntervalUnion(std::move(out));
  }

  bool operator==(const IntervalUnion& o) const {
    if (size() != o.size()) return false;
    for (std::size_t i = 0; i < size(); ++i)
      if (iv_[i].a != o.iv_[i].a || iv_[i].b != o.iv_[i].b) return false;
    return true;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
  void validate() const {
    for (std::size_t i = 0; i < iv_.size(); ++i) {
      if (!(iv_[i].a < iv_[i].b)) throw domain_error("interval union: each interval needs a < b");
      if (i + 1 < iv_.size() && !(iv_[i].b <= iv_[i + 1].a))
        throw domain_error("interval union: intervals must be ordered with disjoint interiors");
    }
  }

  std::vector<Interval> iv_;
};

/// Bounded union of intervals, the half-line (0,∞) or the punctured line ℝ∖{0}.
class Domain1D {
public:
  enum class Kind { bounded, halfline, punctured };

  static Domain1D bounded(IntervalUnion u) {
    detail::require(!u.empty() && u.bounded(), "bounded domain needs a nonempty bounded interval union");
    return Domain1D(Kind::bounded, std::move(u));
  }
  static Domain1D halfline() { return Domain1D(Kind::halfline, IntervalUnion{{0.0, inf}}); }
  static Domain1D punctured() { return Domain1D(Kind::punctured, IntervalUnion{{-inf, 0.0}, {0.0, inf}}); }

  Kind kind() const { return kind_; }
  bool is_bounded() const { return kind_ == Kind::bounded; }

  /// Connected components, possibly with infinite endpoints.
  const IntervalUnion& components() const { return comp_; }

  bool contains(double x) const { return comp_.contains(x); }

  /// Convex hull; only meaningful for bounded domains.
  Interval hull() const { return {comp_[0].a, comp_[comp_.size() - 1].b}; }

private:
  Domain1D(Kind k, IntervalUnion c) : kind_(k), comp_(std::move(c)) {}

  Kind kind_;
  IntervalUnion comp_;
};

/// d_Ω(x), distance to the boundary of Ω.
inline double distance(const Domain1D& omega, double x) {
  const auto i = omega.components().component_of(x);
  if (i == IntervalUnion::npos) throw domain_error("distance: point " + std::to_string(x) + " lies outside the domain");
  const auto& I = omega.components()[i];
  return std::min(x - I.a, I.b - x);
}

/// |{δ_{s,I} > t}| for δ_{s,I} = d_I^{-s} on a single interval of length len.
inline double delta_levelset_measure(double len, double s, double t) {
  detail::require_fractional_order(s);
  detail::require(len > 0.0, "interval length must be positive");
  detail::require(t > 0.0, "level t must be positive");
  if (t <= std::pow(2.0, s) * std::pow(len, -s)) return len;
  return 2.0 * std::pow(t, -1.0 / s);
}

inline double delta_levelset_measure(const Interval& I, double s, double t) {
  return delta_levelset_measure(I.length(), s, t);
}

/// Rearranged weight of n equal intervals of half-length r: n^s |x|^{-s} on (-nr, nr).
struct DeltaProfile {
  int n = 1;
  double r = 1.0;
  double s = 0.5;

  double support_radius() const { return n * r; }
  double operator()(double x) const {
    const double ax = std::abs(x);
    if (ax >= n * r) return 0.0;
    if (ax == 0.0) return inf;
    return std::pow(n, s) * std::pow(ax, -s);
  }
  /// |{profile > t}|
  double distribution(double t) const {
    detail::require(t > 0.0, "level t must be positive");
    return 2.0 * std::min(n * r, n * std::pow(t, -1.0 / s));
  }
};

inline DeltaProfile rearrange_delta_equal(int n, double r, double s) {
  detail::require(n >= 1, "need at least one interval");
  detail::require(r > 0.0, "half-length must be positive");
  detail::require_fractional_order(s);
  return {n, r, s};
}

/// Radius r(t) of {δ_{s,Ω} > t}^★ for components of half-lengths r_1 ≤ ... ≤ r_n.
/// Evaluated bin by bin: on (r_{n+1-k}^{-s}, r_{n-k}^{-s}] the k largest
/// components are cut at t^{-1/s}, the rest are entirely above level t.
inline double rearrange_radius(const std::vector<double>& radii, double s, double t) {
  detail::require_fractional_order(s);
  detail::require(t > 0.0, "level t must be positive");
  detail::require(!radii.empty(), "need at least one radius");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    detail::require(radii[i] > 0.0, "radii must be positive");
    if (i) detail::require(radii[i - 1] <= radii[i], "radii must be sorted ascending");
  }
  const std::size_t n = radii.size();
  // r_0 = 0 (so r_0^{-s} = ∞) and r_{n+1} = ∞ (so r_{n+1}^{-s} = 0)
  auto edge = [&](std::size_t i) {
    if (i == 0) return inf;
    if (i == n + 1) return 0.0;
    return std::pow(radii[i - 1], -s);
  };
  for (std::size_t k = 0; k <= n; ++k) {
    const double lo = edge(n + 1 - k), hi = edge(n - k);
    if (!(lo < hi)) continue;  // tied radii give empty bins
    if (lo < t && t <= hi) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n - k; ++i) sum += radii[i];
      return (k ? k * std::pow(t, -1.0 / s) : 0.0) + sum;
    }
  }
  return 0.0;  // unreachable for t > 0
}

/// r ↦ (1 - (1 - r^N)^{1/N})^{-s}: rearranged d^{-s} of the unit ball of R^N.
inline double ball_delta_rearranged(int N, double s, double rho) {
  detail::require(N >= 1, "dimension must be >= 1");
  detail::require_fractional_order(s);
  detail::require(rho > 0.0 && rho < 1.0, "radius must lie in (0,1)");
  // 1 - (1 - ρ^N)^{1/N}, computed without cancellation for small ρ
  const double d = -std::expm1(std::log1p(-std::pow(rho, N)) / N);
  return std::pow(d, -s);
}

/// Compactly supported nonnegative piecewise-constant function. Values live
/// on the open cells (x_{i-1}, x_i); the function is zero outside [x_0, x_m].
class StepFunction {
public:
  StepFunction() = default;

  StepFunction(std::vector<double> breakpoints, std::vector<double> values)
      : x_(std::move(breakpoints)), v_(std::move(values)) {
    if (x_.empty() && v_.empty()) return;
    detail::require(x_.size() == v_.size() + 1, "step function needs one more breakpoint than values");
    for (std::size_t i = 0; i + 1 < x_.size(); ++i)
      detail::require(std::isfinite(x_[i]) && x_[i] < x_[i + 1], "breakpoints must be finite and increasing");
    for (double v : v_) detail::require(v >= 0.0 && std::isfinite(v), "step values must be finite and nonnegative");
    canonicalize();
  }

  static StepFunction indicator(const IntervalUnion& E, double height = 1.0) {
    std::vector<double> x, v;
    for (const auto& I : E) {
      if (!x.empty() && x.back() < I.a) v.push_back(0.0), x.push_back(I.a);
      if (x.empty()) x.push_back(I.a);
      v.push_back(height);
      x.push_back(I.b);
    }
    return StepFunction(std::move(x), std::move(v));
  }

  const std::vector<double>& breakpoints() const { return x_; }
  const std::vector<double>& values() const { return v_; }
  bool is_zero() const { return v_.empty(); }

  double operator()(double x) const {
    if (v_.empty() || x <= x_.front() || x >= x_.back()) return 0.0;
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    if (x_[i] == x) return 0.0;  // jump points carry no value
    return v_[i];
  }

  /// ∫ u^p
  double integral(double p = 1.0) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i)
      if (v_[i] > 0.0) sum += std::pow(v_[i], p) * (x_[i + 1] - x_[i]);
    return sum;
  }

  /// Distinct positive values, ascending.
  std::vector<double> levels() const {
    std::vector<double> w;
    for (double v : v_)
      if (v > 0.0) w.push_back(v);
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end()), w.end());
    return w;
  }

  /// {u > t} as a union of open intervals (adjacent cells joined).
  IntervalUnion superlevel_set(double t) const {
    std::vector<Interval> out;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      if (!(v_[i] > t)) continue;
      if (!out.empty() && out.back().b == x_[i])
        out.back().b = x_[i + 1];
      else
        out.push_back({x_[i], x_[i + 1]});
    }
    return IntervalUnion(std::move(out));
  }

  double measure_above(double t) const { return superlevel_set(t).measure(); }

  template <class Phi>
  StepFunction map(Phi phi) const {
    std::vector<double> v(v_.size());
    for (std::size_t i = 0; i < v_.size(); ++i) v[i] = phi(v_[i]);
    return StepFunction(x_, std::move(v));
  }

  StepFunction scaled(double c) const {
    return map([c](double v) { return c * v; });
  }

  /// Canonical forms agree with values within tol.
  bool approx_equal(const StepFunction& o, double tol = 1e-12) const {
    if (x_.size() != o.x_.size()) return false;
    for (std::size_t i = 0; i < x_.size(); ++i)
      if (std::abs(x_[i] - o.x_[i]) > tol * std::max(1.0, std::abs(x_[i]))) return false;
    for (std::size_t i = 0; i < v_.size(); ++i)
      if (std::abs(v_[i] - o.v_[i]) > tol * std::max(1.0, std::abs(v_[i]))) return false;
    return true;
  }

private:
  void canonicalize() {
    // merge equal neighbours, drop zero cells at either end
    std::vector<double> x{x_.front()}, v;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      if (!v.empty() && v.back() == v_[i])
        x.back() = x_[i + 1];
      else
        v.push_back(v_[i]), x.push_back(x_[i + 1]);
    }
    std::size_t lo = 0, hi = v.size();
    while (lo < hi && v[lo] == 0.0) ++lo;
    while (hi > lo && v[hi - 1] == 0.0) --hi;
    x_.assign(x.begin() + lo, x.begin() + hi + (hi > lo ? 1 : 0));
    v_.assign(v.begin() + lo, v.begin() + hi);
  }

  std::vector<double> x_, v_;
};

/// Symmetric decreasing rearrangement u^★.
inline StepFunction rearrange_step(const StepFunction& u) {
  const auto w = u.levels();
  if (w.empty()) return {};
  // half-widths of {u ≥ w_j}, from the top level down
  std::vector<double> half;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    double m = 0.0;
    const auto& x = u.breakpoints();
    const auto& v = u.values();
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] >= *it) m += x[i + 1] - x[i];
    half.push_back(0.5 * m);
  }
  const std::size_t K = w.size();
  // breakpoints ±half[j]; the innermost pair bounds the single top cell
  std::vector<double> x, v;
  for (std::size_t j = K; j-- > 0;) x.push_back(-half[j]);
  for (std::size_t j = 0; j < K; ++j) x.push_back(half[j]);
  // values from the outside in, then mirrored
  for (std::size_t j = 0; j < K; ++j) v.push_back(w[j]);
  for (std::size_t j = K - 1; j-- > 0;) v.push_back(w[j]);
  return StepFunction(std::move(x), std::move(v));
}

// ---------------------------------------------------------------------------
// Domain grammar:
//   interval(a,b) | union[(a1,b1),(a2,b2),...] | halfline | punctured | punctured_box(R)

namespace detail {

class DomainParser {
public:
  explicit DomainParser(std::string_view text) : s_(text) {}

  Domain1D parse() {
    skip();
    const auto word = ident();
    Domain1D out = Domain1D::halfline();
    if (word == "halfline") {
      out = Domain1D::halfline();
    } else if (word == "punctured") {
      out = Domain1D::punctured();
    } else if (word == "interval") {
      expect('(');
      const double a = number();
      expect(',');
      const double b = number();
      expect(')');
      out = make_bounded({{a, b}});
    } else if (word == "union") {
      expect('[');
      std::vector<Interval> iv;
      do {
        expect('(');
        const double a = number();
        expect(',');
        const double b = number();
        expect(')');
        iv.push_back({a, b});
      } while (accept(','));
      expect(']');
      out = make_bounded(std::move(iv));
    } else if (word == "punctured_box") {
      expect('(');
      const double R = number();
      expect(')');
      out = punctured_box(R);
    } else {
      throw parse_error("unknown domain kind", std::string(word.empty() ? rest() : word));
    }
    skip();
    if (pos_ != s_.size()) throw parse_error("trailing characters in domain", rest());
    return out;
  }

  static Domain1D punctured_box(double R) {
    if (!(R > 0.0 && R <= 1e4)) throw parse_error("punctured_box radius must lie in (0, 1e4]", std::to_string(R));
    std::vector<double> cuts{-R};
    for (long k = -static_cast<long>(std::ceil(R)) + 1; k < R; ++k)
      if (k > -R) cuts.push_back(static_cast<double>(k));
    cuts.push_back(R);
    std::vector<Interval> iv;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i] < cuts[i + 1]) iv.push_back({cuts[i], cuts[i + 1]});
    return Domain1D::bounded(IntervalUnion(std::move(iv)));
  }

private:
  Domain1D make_bounded(std::vector<Interval> iv) {
    try {
      return Domain1D::bounded(IntervalUnion(std::move(iv)));
    } catch (const domain_error& e) {
      throw parse_error(e.what(), std::string(s_));
    }
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  std::string rest() const { return std::string(s_.substr(std::min(pos_, s_.size()))); }

  std::string_view ident() {
    const auto start = pos_;
    while (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return s_.substr(start, pos_ - start);
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) throw parse_error(std::string("expected '") + c + "' in domain", rest());
  }

  double number() {
    skip();
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    if (first != last && *first == '+') ++first;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || !std::isfinite(v)) throw parse_error("expected a finite number in domain", rest());
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline Domain1D parse_domain(std::string_view text) { return detail::DomainParser(text).parse(); }

inline std::string format_union(const IntervalUnion& u) {
  if (u.size() == 1) return "interval(" + detail::fmt17(u[0].a) + "," + detail::fmt17(u[0].b) + ")";
  std::string out = "union[";
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i) out += ",";
    out += "(" + detail::fmt17(u[i].a) + "," + detail::fmt17(u[i].b) + ")";
  }
  return out + "]";
}

inline std::string format_domain(const Domain1D& d) {
  switch (d.kind()) {
    case Domain1D::Kind::halfline:
      return "halfline";
    case Domain1D::Kind::punctured:
      return "punctured";
    default:
      return format_union(d.components());
  }
}

/// Parses a bounded set (interval or union) such as a candidate subset E.
inline IntervalUnion parse_union(std::string_view text) {
  const auto d = parse_domain(text);
  if (!d.is_bounded()) throw parse_error("expected a bounded interval union", std::string(text));
  return d.components();
}

}  // namespace fhardy
