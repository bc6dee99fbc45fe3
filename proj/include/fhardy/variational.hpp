#pragma once

// Optimization engines: Cheeger-quotient search over finite unions of
// intervals (p = 1), discrete Rayleigh-quotient descent on grid functions
// (general p), and the product-test-function bound on half-spaces.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fhardy/constants.hpp"
#include "fhardy/error.hpp"
#include "fhardy/fracmeasures.hpp"
#include "fhardy/sets1d.hpp"
#include "fhardy/specfun.hpp"

namespace fhardy {

struct MinimizeConfig {
  int restarts = 4;
  int max_iters = 400;
  double step0 = 0.5;
  double backtrack = 0.5;
  double tol = 1e-10;
  unsigned long long seed = 0;

  void validate() const {
    detail::require(restarts >= 0, "restarts must be >= 0");
    detail::require(max_iters > 0, "max_iters must be positive");
    detail::require(step0 > 0.0, "step0 must be positive");
    detail::require(backtrack > 0.0 && backtrack < 1.0, "backtrack must lie in (0,1)");
    detail::require(tol > 0.0, "tol must be positive");
  }
};

// ---------------------------------------------------------------------------
// Cheeger quotient and search

/// P_s(E) / V_{s,Ω}(E), both in closed form.
inline double cheeger_quotient(const Domain1D& omega, const IntervalUnion& E, double s) {
  detail::require_fractional_order(s);
  if (E.empty() || !(E.measure() > 0.0)) throw domain_error("cheeger_quotient: E must have positive measure");
  const double vol = weighted_volume(omega, E, s).value;
  return perimeter_interval_union(E, s).value / vol;
}

/// Hausdorff distance between the closures of two nonempty bounded unions.
inline double hausdorff_distance(const IntervalUnion& A, const IntervalUnion& B) {
  auto dist_to = [](double x, const IntervalUnion& U) {
    double d = inf;
    for (const auto& I : U) d = std::min(d, x < I.a ? I.a - x : (x > I.b ? x - I.b : 0.0));
    return d;
  };
  auto one_sided = [&](const IntervalUnion& X, const IntervalUnion& Y) {
    double worst = 0.0;
    for (const auto& I : X) {
      std::vector<double> cand{I.a, I.b};
      // the distance to Y peaks at endpoints or at midpoints of Y's gaps
      for (std::size_t j = 0; j + 1 < Y.size(); ++j) cand.push_back(0.5 * (Y[j].b + Y[j + 1].a));
      for (double c : cand)
        if (c >= I.a && c <= I.b) worst = std::max(worst, dist_to(c, Y));
    }
    return worst;
  };
  return std::max(one_sided(A, B), one_sided(B, A));
}

struct CheegerResult {
  IntervalUnion best_set;
  double quotient = inf;
  std::vector<std::pair<int, double>> trace;  // (iteration, best quotient so far)
  long evaluations = 0;
  bool converged = true;
  std::string note;
};

namespace detail {

struct Piece {
  std::size_t comp;
  double lo, hi;
};

class CheegerSearch {
public:
  CheegerSearch(const Domain1D& omega, double s, int k, const MinimizeConfig& cfg, int nodes)
      : omega_(omega), s_(s), k_(static_cast<std::size_t>(k)), cfg_(cfg), nodes_(nodes) {
    const auto& C = omega_.components();
    for (const auto& I : C) {
      std::vector<double> g(static_cast<std::size_t>(nodes_));
      for (int j = 0; j < nodes_; ++j) g[static_cast<std::size_t>(j)] = I.a + I.length() * j / (nodes_ - 1);
      g.front() = I.a;
      g.back() = I.b;
      grid_.push_back(std::move(g));
    }
  }

  CheegerResult run() {
    const auto& C = omega_.components();
    const std::size_t m = C.size();
    std::vector<std::vector<Piece>> seeds;
    if (m <= k_) {
      std::vector<Piece> all;
      for (std::size_t c = 0; c < m; ++c) all.push_back({c, C[c].a, C[c].b});
      seeds.push_back(all);
    }
    for (std::size_t c = 0; c < m; ++c) seeds.push_back({{c, C[c].a, C[c].b}});
    std::mt19937_64 rng(cfg_.seed);
    for (int r = 0; r < cfg_.restarts; ++r) {
      std::vector<std::size_t> idx(m);
      for (std::size_t c = 0; c < m; ++c) idx[c] = c;
      std::shuffle(idx.begin(), idx.end(), rng);
      const std::size_t cnt = 1 + rng() % std::min(k_, m);
      idx.resize(cnt);
      std::sort(idx.begin(), idx.end());
      std::vector<Piece> seed;
      for (std::size_t c : idx) {
        std::size_t i = rng() % static_cast<std::size_t>(nodes_), j = rng() % static_cast<std::size_t>(nodes_);
        if (i > j) std::swap(i, j);
        if (i == j) j = std::min<std::size_t>(i + 1, static_cast<std::size_t>(nodes_) - 1), i = j - 1;
        seed.push_back({c, grid_[c][i], grid_[c][j]});
      }
      seeds.push_back(seed);
    }

    for (auto& seed : seeds) {
      double q = eval(seed);
      consider(seed, q);
      scan(seed, q);
      refine(seed, q);
    }
    result_.best_set = to_union(best_);
    result_.quotient = best_q_;
    result_.evaluations = evals_;
    return result_;
  }

private:
  IntervalUnion to_union(const std::vector<Piece>& ps) const {
    std::vector<Interval> iv;
    for (const auto& p : ps) iv.push_back({p.lo, p.hi});
    return IntervalUnion(std::move(iv));
  }

  double eval(const std::vector<Piece>& ps) {
    ++evals_;
    return cheeger_quotient(omega_, to_union(ps), s_);
  }

  static bool lex_less(const std::vector<Piece>& a, const std::vector<Piece>& b) {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      if (a[i].lo != b[i].lo) return a[i].lo < b[i].lo;
      if (a[i].hi != b[i].hi) return a[i].hi < b[i].hi;
    }
    return a.size() < b.size();
  }

  static bool better(double q1, const std::vector<Piece>& e1, double q2, const std::vector<Piece>& e2) {
    return q1 < q2 || (q1 == q2 && lex_less(e1, e2));
  }

  void consider(const std::vector<Piece>& ps, double q) {
    if (best_.empty() || better(q, ps, best_q_, best_)) {
      const bool strict = q < best_q_;
      best_ = ps;
      best_q_ = q;
      if (strict) result_.trace.emplace_back(iter_, q);
    }
  }

  // admissible range for an endpoint of piece i
  double lower_limit(const std::vector<Piece>& ps, std::size_t i) const {
    const auto& C = omega_.components()[ps[i].comp];
    if (i > 0 && ps[i - 1].comp == ps[i].comp) return ps[i - 1].hi;
    return C.a;
  }
  double upper_limit(const std::vector<Piece>& ps, std::size_t i) const {
    const auto& C = omega_.components()[ps[i].comp];
    if (i + 1 < ps.size() && ps[i + 1].comp == ps[i].comp) return ps[i + 1].lo;
    return C.b;
  }

  void scan(std::vector<Piece>& cur, double& q) {
    for (bool improved = true; improved && iter_ < 100000;) {
      improved = false;
      ++iter_;
      auto try_cand = [&](const std::vector<Piece>& cand) {
        const double qc = eval(cand);
        if (better(qc, cand, q, cur)) {
          cur = cand;
          q = qc;
          improved = true;
          consider(cur, q);
        }
      };
      for (std::size_t i = 0; i < cur.size(); ++i) {
        const auto& g = grid_[cur[i].comp];
        for (double x : g) {
          if (x >= lower_limit(cur, i) && x < cur[i].hi && x != cur[i].lo) {
            auto cand = cur;
            cand[i].lo = x;
            try_cand(cand);
          }
        }
        for (double x : g) {
          if (x <= upper_limit(cur, i) && x > cur[i].lo && x != cur[i].hi) {
            auto cand = cur;
            cand[i].hi = x;
            try_cand(cand);
          }
        }
      }
      if (cur.size() > 1) {
        for (std::size_t i = 0; i < cur.size(); ++i) {
          auto cand = cur;
          cand.erase(cand.begin() + static_cast<std::ptrdiff_t>(i));
          try_cand(cand);
        }
      }
      if (cur.size() < k_) {
        // add a whole unused component
        for (std::size_t c = 0; c < omega_.components().size(); ++c) {
          if (std::any_of(cur.begin(), cur.end(), [c](const Piece& p) { return p.comp == c; })) continue;
          auto cand = cur;
          cand.push_back({c, omega_.components()[c].a, omega_.components()[c].b});
          std::sort(cand.begin(), cand.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
          try_cand(cand);
        }
        // punch a one-cell hole into a piece
        for (std::size_t i = 0; i < cur.size(); ++i) {
          const auto& g = grid_[cur[i].comp];
          for (std::size_t j = 0; j + 1 < g.size(); ++j) {
            if (!(g[j] > cur[i].lo && g[j + 1] < cur[i].hi)) continue;
            auto cand = cur;
            cand[i].hi = g[j];
            cand.insert(cand.begin() + static_cast<std::ptrdiff_t>(i) + 1, Piece{cur[i].comp, g[j + 1], cur[i].hi});
            try_cand(cand);
          }
        }
      }
    }
  }

  // coordinate-wise golden section, bracket endpoints included
  void refine(std::vector<Piece>& cur, double& q) {
    constexpr double invphi = 0.6180339887498949;
    bool settled = false;
    for (int sweep = 0; sweep < cfg_.max_iters; ++sweep) {
      ++iter_;
      const double start = q;
      for (std::size_t i = 0; i < cur.size(); ++i) {
        for (int side = 0; side < 2; ++side) {
          const double scale = omega_.components()[cur[i].comp].length();
          const double gap = 1e-12 * scale;
          double lo = side == 0 ? lower_limit(cur, i) : cur[i].lo + gap;
          double hi = side == 0 ? cur[i].hi - gap : upper_limit(cur, i);
          if (!(lo < hi)) continue;
          auto f = [&](double x) {
            auto cand = cur;
            (side == 0 ? cand[i].lo : cand[i].hi) = x;
            return std::make_pair(eval(cand), cand);
          };
          auto take = [&](const std::pair<double, std::vector<Piece>>& r) {
            if (better(r.first, r.second, q, cur)) {
              cur = r.second;
              q = r.first;
              consider(cur, q);
            }
          };
          take(f(lo));
          take(f(hi));
          double a = lo, b = hi;
          double c = b - invphi * (b - a), d = a + invphi * (b - a);
          double fc = f(c).first, fd = f(d).first;
          const double xtol = std::max(1e-8 * scale, 1e-15);
          while (b - a > xtol) {
            if (fc < fd) {
              b = d, d = c, fd = fc;
              c = b - invphi * (b - a);
              fc = f(c).first;
            } else {
              a = c, c = d, fc = fd;
              d = a + invphi * (b - a);
              fd = f(d).first;
            }
          }
          take(f(0.5 * (a + b)));
        }
      }
      if (!(q < start - cfg_.tol * std::abs(start))) {
        settled = true;
        break;
      }
    }
    if (!settled) {
      result_.converged = false;
      result_.note = "coordinate refinement hit max_iters before settling";
    }
  }

  const Domain1D& omega_;
  double s_;
  std::size_t k_;
  MinimizeConfig cfg_;
  int nodes_;
  std::vector<std::vector<double>> grid_;
  std::vector<Piece> best_;
  double best_q_ = inf;
  long evals_ = 0;
  int iter_ = 0;
  CheegerResult result_;
};

}  // namespace detail

/// Searches unions of at most k intervals inside a bounded Ω for the smallest
/// Cheeger quotient; the result is an upper bound for h_{s,1}(Ω).
inline CheegerResult cheeger_search(const Domain1D& omega, double s, int k, const MinimizeConfig& cfg = {},
                                    int scan_nodes = 64) {
  detail::require_fractional_order(s);
  detail::require(omega.is_bounded(), "cheeger_search needs a bounded domain");
  cfg.validate();
  const int m = static_cast<int>(omega.components().size());
  if (k < 1 || k > m + 2)
    throw domain_error("cheeger_search: k = " + std::to_string(k) + " must lie in [1, " + std::to_string(m + 2) + "]");
  detail::require(scan_nodes >= 2, "scan_nodes must be >= 2");
  return detail::CheegerSearch(omega, s, k, cfg, scan_nodes).run();
}

// ---------------------------------------------------------------------------
// Grid functions

enum class GridInterp { piecewise_constant, piecewise_linear };

/// Nonnegative function on a uniform grid. Piecewise-constant: values[i]
/// lives on the cell (origin + i h, origin + (i+1) h). Piecewise-linear:
/// values[i] sits at the node origin + (i+1) h, with zeros at origin and
/// origin + (n+1) h. Either way u vanishes outside window().
struct GridFunction {
  double origin = 0.0;
  double h = 1.0;
  std::vector<double> values;
  GridInterp interp = GridInterp::piecewise_constant;

  std::size_t cells() const { return interp == GridInterp::piecewise_constant ? values.size() : values.size() + 1; }
  Interval window() const { return {origin, origin + static_cast<double>(cells()) * h}; }

  // value at cell c's left / right end (linear) or on the cell (constant)
  double left_value(std::size_t c) const {
    if (interp == GridInterp::piecewise_constant) return values[c];
    return c == 0 ? 0.0 : values[c - 1];
  }
  double right_value(std::size_t c) const {
    if (interp == GridInterp::piecewise_constant) return values[c];
    return c < values.size() ? values[c] : 0.0;
  }
  double midpoint_value(std::size_t c) const { return 0.5 * (left_value(c) + right_value(c)); }

  double operator()(double x) const {
    const auto w = window();
    if (!(x > w.a && x < w.b)) return 0.0;
    const double t = (x - origin) / h;
    const auto c = std::min(static_cast<std::size_t>(t), cells() - 1);
    if (interp == GridInterp::piecewise_constant) return values[c];
    const double f = t - static_cast<double>(c);
    return (1 - f) * left_value(c) + f * right_value(c);
  }

  void validate() const {
    detail::require(h > 0.0 && std::isfinite(h) && std::isfinite(origin), "grid needs finite origin and h > 0");
    detail::require(!values.empty(), "grid function has no values");
    for (double v : values) detail::require(v >= 0.0 && std::isfinite(v), "grid values must be finite and >= 0");
  }

  bool is_zero() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
  }

  StepFunction to_step() const {
    detail::require(interp == GridInterp::piecewise_constant, "to_step needs a piecewise-constant grid");
    std::vector<double> x(values.size() + 1);
    for (std::size_t i = 0; i <= values.size(); ++i) x[i] = origin + static_cast<double>(i) * h;
    return StepFunction(x, values);
  }

  static GridFunction constant_on(const Interval& window, std::size_t n, double value = 1.0) {
    return {window.a, window.length() / static_cast<double>(n), std::vector<double>(n, value),
            GridInterp::piecewise_constant};
  }
};

namespace detail {

// Gauss–Legendre nodes and weights on [-1,1] by Newton iteration.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)), dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1, p1 = p2;
      }
      if (n == 1) p1 = z, p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(n - 1 - i);
    x[a] = -z, x[b] = z;
    w[a] = w[b] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

inline const std::pair<std::vector<double>, std::vector<double>>& gl16() {
  static const auto r = gauss_legendre(16);
  return r;
}

// Exact cell-pair kernel integrals for piecewise-constant grids (q < 1):
// K[d] = ∫_{cell i}∫_{cell i+d} |x-y|^{-1-q}, tail[i] = ∫_{cell i}∫_{outside window}.
struct CellKernel {
  std::vector<double> K, tail;
};

inline CellKernel make_cell_kernel(std::size_t n, double h, double q) {
  auto G = [q](double t) { return g_pow(t, q); };
  const double c = std::pow(h, 1.0 - q) / (q * (1.0 - q));
  CellKernel k;
  k.K.assign(n, 0.0);
  for (std::size_t d = 1; d < n; ++d) {
    const double dd = static_cast<double>(d);
    k.K[d] = c * (2.0 * G(dd) - G(dd - 1.0) - G(dd + 1.0));
  }
  k.tail.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = static_cast<double>(i), b = static_cast<double>(n - i);
    k.tail[i] = c * (G(a + 1.0) - G(a) + G(b) - G(b - 1.0));
  }
  return k;
}

// Σ_{i≠j} |u_i - u_j|^p K_{|i-j|} + 2 Σ_i u_i^p tail_i, optional gradient
inline double cell_numerator(const std::vector<double>& u, const CellKernel& k, double p, std::vector<double>* grad) {
  const std::size_t n = u.size();
  if (grad) grad->assign(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ti = u[i] == 0.0 ? 0.0 : (p == 1.0 ? u[i] : std::pow(u[i], p));
    total += 2.0 * ti * k.tail[i];
    if (grad && u[i] > 0.0) (*grad)[i] += 2.0 * p * (p == 1.0 ? 1.0 : ti / u[i]) * k.tail[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double diff = u[i] - u[j];
      if (diff == 0.0) continue;
      const double ad = std::abs(diff);
      const double kd = k.K[j - i];
      double term, dterm;
      if (p == 1.0)
        term = ad, dterm = 1.0;
      else if (p == 2.0)
        term = ad * ad, dterm = 2.0 * ad;
      else
        term = std::pow(ad, p), dterm = p * term / ad;
      total += 2.0 * term * kd;
      if (grad) {
        const double g = 2.0 * dterm * kd * (diff > 0 ? 1.0 : -1.0);
        (*grad)[i] += g;
        (*grad)[j] -= g;
      }
    }
  }
  return total;
}

// ∫_{τ0}^{τ1} |A + Bτ|^p dτ
inline double abs_linear_power_integral(double A, double B, double t0, double t1, double p) {
  const double span = t1 - t0;
  if (!(span > 0.0)) return 0.0;
  if (B == 0.0) return std::pow(std::abs(A), p) * span;
  const double zm = A + B * 0.5 * (t0 + t1);
  if (std::abs(B) * span <= 1e-4 * std::abs(zm)) {
    // nearly constant: midpoint value plus the second-order correction
    const double az = std::abs(zm);
    return std::pow(az, p) * span + p * (p - 1.0) * std::pow(az, p - 2.0) * B * B * span * span * span / 24.0;
  }
  auto Phi = [p](double z) { return z * std::pow(std::abs(z), p) / (p + 1.0); };
  return (Phi(A + B * t1) - Phi(A + B * t0)) / B;
}

// [u]^p for the piecewise-linear interpolant
inline double linear_numerator(const GridFunction& u, double q, double p) {
  const std::size_t nc = u.cells();
  const double h = u.h;
  const auto& [gx, gw] = gl16();
  const double e = p - q;  // ρ-exponent after the polar change of variables
  double total = 0.0;
  for (std::size_t i = 0; i < nc; ++i) {
    const double ui0 = u.left_value(i), ui1 = u.right_value(i);
    const double gi = (ui1 - ui0) / h;
    // same cell
    total += std::pow(std::abs(gi), p) * 2.0 * std::pow(h, e + 1.0) / (e * (e + 1.0));
    // adjacent cell i+1, both orders
    if (i + 1 < nc) {
      const double g1 = gi, g2 = (u.right_value(i + 1) - u.left_value(i + 1)) / h;
      const double A = g2, B = g1 - g2;
      double adj = std::pow(h, e + 1.0) / (e + 1.0) * abs_linear_power_integral(A, B, 0.0, 1.0, p);
      // ρ in (h, 2h): τ in (1 - h/ρ, h/ρ)
      double far = 0.0;
      for (std::size_t k = 0; k < gx.size(); ++k) {
        const double rho = h * (1.5 + 0.5 * gx[k]);
        far += gw[k] * std::pow(rho, e) * abs_linear_power_integral(A, B, 1.0 - h / rho, h / rho, p);
      }
      adj += 0.5 * h * far;
      total += 2.0 * adj;
    }
    // cells two or more apart: midpoint rule, both orders
    const double mi = u.midpoint_value(i);
    for (std::size_t j = i + 2; j < nc; ++j) {
      const double diff = std::abs(mi - u.midpoint_value(j));
      if (diff == 0.0) continue;
      total += 2.0 * std::pow(diff, p) * std::pow(h * static_cast<double>(j - i), -1.0 - q) * h * h;
    }
    // exterior of the window, both orders: ∫_cell |u|^p ((x-a)^{-q} + (b-x)^{-q}) / q
    const double L = static_cast<double>(nc) * h;
    double ext = 0.0;
    const double x0 = static_cast<double>(i) * h;
    if (i == 0 || i + 1 == nc) {
      // u vanishes linearly at the window end: exact in t^{p-q}
      const double g = std::abs(gi);
      ext += std::pow(g, p) * std::pow(h, e + 1.0) / (e + 1.0);
      for (std::size_t k = 0; k < gx.size(); ++k) {
        const double t = 0.5 * h * (1.0 + gx[k]);  // distance from the vanishing end
        const double val = g * t;
        const double other = L - t;                 // distance to the opposite window end
        ext += 0.5 * h * gw[k] * std::pow(val, p) * std::pow(other, -q);
      }
    } else {
      for (std::size_t k = 0; k < gx.size(); ++k) {
        const double t = 0.5 * h * (1.0 + gx[k]);
        const double val = ui0 + gi * t;
        const double x = x0 + t;
        ext += 0.5 * h * gw[k] * std::pow(val, p) * (std::pow(x, -q) + std::pow(L - x, -q));
      }
    }
    total += 2.0 * ext / q;
  }
  return total;
}

// exact ∫_cell d_Ω^{-q}; negative when the cell is not inside Ω
inline std::vector<double> cell_weights(const GridFunction& u, const Domain1D& omega, double q) {
  std::vector<double> w(u.cells());
  for (std::size_t c = 0; c < w.size(); ++c) {
    const double a = u.origin + static_cast<double>(c) * u.h, b = a + u.h;
    try {
      w[c] = weighted_volume(omega, IntervalUnion{{a, b}}, q).value;
    } catch (const domain_error&) {
      w[c] = -1.0;
    }
  }
  return w;
}

}  // namespace detail

/// Discrete [u]^p_{W^{s,p}(R)}. Piecewise-constant grids are exact (sp < 1);
/// piecewise-linear grids integrate touching cell pairs exactly, far pairs by
/// the midpoint rule and the exterior analytically in the outer variable.
inline double seminorm_p_grid(const GridFunction& u, double s, double p) {
  detail::require_fractional_order(s);
  detail::require(p >= 1.0, "exponent p must be >= 1");
  u.validate();
  if (u.is_zero()) throw domain_error("seminorm_p_grid: empty support");
  const double q = s * p;
  detail::require(q < 1.0 + p, "seminorm_p_grid needs sp < 1 + p");
  if (u.interp == GridInterp::piecewise_constant) {
    detail::require(q < 1.0, "piecewise-constant grids have finite seminorm only for sp < 1");
    return detail::cell_numerator(u.values, detail::make_cell_kernel(u.values.size(), u.h, q), p, nullptr);
  }
  return detail::linear_numerator(u, q, p);
}

/// Σ_cells |u(midpoint)|^p ∫_cell d_Ω^{-sp}, with the weight integrated exactly.
inline double weighted_lp_grid(const GridFunction& u, const Domain1D& omega, double s, double p) {
  detail::require_fractional_order(s);
  u.validate();
  const double q = s * p;
  detail::require(q < 1.0, "weighted_lp_grid needs sp < 1");
  const auto w = detail::cell_weights(u, omega, q);
  double total = 0.0;
  for (std::size_t c = 0; c < w.size(); ++c) {
    const double v = u.midpoint_value(c);
    if (v == 0.0) continue;
    if (w[c] < 0.0) throw domain_error("weighted_lp_grid: support escapes the domain");
    total += std::pow(v, p) * w[c];
  }
  return total;
}

/// ∂/∂u_i of seminorm_p_grid on a piecewise-constant grid (a subgradient at ties when p = 1).
inline std::vector<double> seminorm_gradient(const GridFunction& u, double s, double p) {
  detail::require(u.interp == GridInterp::piecewise_constant, "gradients are available on piecewise-constant grids");
  detail::require_fractional_order(s);
  detail::require(s * p < 1.0, "gradient needs sp < 1");
  std::vector<double> g;
  detail::cell_numerator(u.values, detail::make_cell_kernel(u.values.size(), u.h, s * p), p, &g);
  return g;
}

/// ∂/∂u_i of weighted_lp_grid on a piecewise-constant grid.
inline std::vector<double> weighted_lp_gradient(const GridFunction& u, const Domain1D& omega, double s, double p) {
  detail::require(u.interp == GridInterp::piecewise_constant, "gradients are available on piecewise-constant grids");
  const auto w = detail::cell_weights(u, omega, s * p);
  std::vector<double> g(w.size(), 0.0);
  for (std::size_t c = 0; c < w.size(); ++c)
    if (w[c] > 0.0 && u.values[c] > 0.0) g[c] = p * std::pow(u.values[c], p - 1.0) * w[c];
  return g;
}

struct RayleighTraceEntry {
  int start = 0;
  int iter = 0;
  double quotient = 0.0;
  double step = 0.0;
  double decrease = 0.0;  // directional decrease <g, u - u_new> used by the Armijo test
};

struct RayleighResult {
  double quotient = inf;
  GridFunction u;
  std::vector<RayleighTraceEntry> trace;  // accepted steps of the winning start
  int best_start = 0;
  long evaluations = 0;
  bool converged = true;
};

namespace detail {

inline constexpr double armijo_c1 = 1e-4;

struct RayleighProblem {
  std::size_t n;
  double h, p;
  CellKernel kernel;
  std::vector<double> weight;  // negative: cell outside Ω, pinned to zero
  long evals = 0;

  double numerator(const std::vector<double>& u, std::vector<double>* g) const {
    return cell_numerator(u, kernel, p, g);
  }
  double denominator(const std::vector<double>& u, std::vector<double>* g) const {
    double d = 0.0;
    if (g) g->assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (weight[i] <= 0.0 || u[i] == 0.0) continue;
      const double up = p == 1.0 ? u[i] : std::pow(u[i], p);
      d += up * weight[i];
      if (g) (*g)[i] = p * (p == 1.0 ? 1.0 : up / u[i]) * weight[i];
    }
    return d;
  }
  double quotient(const std::vector<double>& u) {
    ++evals;
    const double d = denominator(u, nullptr);
    return d > 0.0 ? numerator(u, nullptr) / d : inf;
  }
  void normalize(std::vector<double>& u) const {
    const double d = denominator(u, nullptr);
    const double c = std::pow(d, -1.0 / p);
    for (auto& v : u) v *= c;
  }
};

inline std::string dump_iterate(const std::vector<double>& u) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (std::size_t i = 0; i < u.size(); ++i) os << (i ? "," : "") << u[i];
  os << "]";
  return os.str();
}

// projected gradient descent from one start; returns the final quotient
inline double descend(RayleighProblem& pr, std::vector<double>& u, const MinimizeConfig& cfg, int start,
                      std::vector<RayleighTraceEntry>& trace, bool& converged) {
  pr.normalize(u);
  double q = pr.quotient(u);
  trace.push_back({start, 0, q, 0.0, 0.0});
  std::vector<double> gn, gd, g(pr.n), trial(pr.n);
  double step = -1.0;
  converged = false;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const double num = pr.numerator(u, &gn);
    const double den = pr.denominator(u, &gd);
    double gmax = 0.0, umax = 0.0;
    for (std::size_t i = 0; i < pr.n; ++i) {
      g[i] = pr.weight[i] > 0.0 ? (gn[i] - (num / den) * gd[i]) / den : 0.0;
      if (!std::isfinite(g[i])) throw convergence_error("minimize_rayleigh: non-finite gradient at iterate " + dump_iterate(u));
      gmax = std::max(gmax, std::abs(g[i]));
      umax = std::max(umax, u[i]);
    }
    if (gmax == 0.0) {
      converged = true;
      break;
    }
    if (step < 0.0) step = cfg.step0 * umax / gmax;
    bool accepted = false;
    double alpha = step;
    for (int bt = 0; bt < 60 && alpha > 1e-18 * umax / gmax; ++bt, alpha *= cfg.backtrack) {
      double decrease = 0.0;
      for (std::size_t i = 0; i < pr.n; ++i) {
        trial[i] = pr.weight[i] > 0.0 ? std::max(0.0, u[i] - alpha * g[i]) : 0.0;
        decrease += g[i] * (u[i] - trial[i]);
      }
      if (!(decrease > 0.0)) break;
      const double qt = pr.quotient(trial);
      if (qt <= q - armijo_c1 * decrease && qt < q) {
        u = trial;
        pr.normalize(u);
        const double rel = (q - qt) / q;
        q = qt;
        trace.push_back({start, it, q, alpha, decrease});
        accepted = true;
        step = alpha / cfg.backtrack;  // let the step grow again
        if (rel < cfg.tol) converged = true;
        break;
      }
    }
    if (!accepted) {
      converged = true;  // no projected descent direction left at this resolution
      break;
    }
    if (converged) break;
  }
  return q;
}

}  // namespace detail

inline Interval default_window(const Domain1D& omega) {
  switch (omega.kind()) {
    case Domain1D::Kind::halfline:
      return {0.0, 1.0};
    case Domain1D::Kind::punctured:
      return {-1.0, 1.0};
    default:
      return omega.hull();
  }
}

/// Descent from a given piecewise-constant start.
inline RayleighResult minimize_rayleigh_from(const Domain1D& omega, double s, double p, const GridFunction& u0,
                                             const MinimizeConfig& cfg = {}) {
  detail::require_fractional_order(s);
  detail::require(p >= 1.0, "exponent p must be >= 1");
  detail::require(s * p < 1.0, "minimize_rayleigh needs sp < 1");
  detail::require(u0.interp == GridInterp::piecewise_constant, "minimize_rayleigh works on piecewise-constant grids");
  cfg.validate();
  u0.validate();
  detail::RayleighProblem pr{u0.values.size(), u0.h, p, detail::make_cell_kernel(u0.values.size(), u0.h, s * p),
                             detail::cell_weights(u0, omega, s * p)};
  auto u = u0.values;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (pr.weight[i] <= 0.0) u[i] = 0.0;
  if (std::all_of(u.begin(), u.end(), [](double v) { return v == 0.0; }))
    throw domain_error("minimize_rayleigh: start vanishes on the domain (cannot normalize u = 0)");
  RayleighResult res;
  bool conv = true;
  res.quotient = detail::descend(pr, u, cfg, 0, res.trace, conv);
  res.converged = conv;
  res.u = u0;
  res.u.values = u;
  res.evaluations = pr.evals;
  return res;
}

/// Multi-start projected descent of [u]^p / ∫ u^p d_Ω^{-sp} over nonnegative
/// piecewise-constant functions on grid_n cells of the window. Every
/// reported quotient is the exact quotient of a step function, hence an
/// upper bound for h_{s,p}(Ω).
inline RayleighResult minimize_rayleigh(const Domain1D& omega, double s, double p, int grid_n,
                                        const MinimizeConfig& cfg = {}, std::optional<Interval> window = {}) {
  detail::require_fractional_order(s);
  detail::require(p >= 1.0, "exponent p must be >= 1");
  detail::require(s * p < 1.0, "minimize_rayleigh needs sp < 1");
  detail::require(grid_n >= 16, "grid_n must be >= 16");
  cfg.validate();
  const Interval w = window.value_or(default_window(omega));
  detail::require(std::isfinite(w.a) && std::isfinite(w.b) && w.a < w.b, "window must be a bounded interval");
  auto base = GridFunction::constant_on(w, static_cast<std::size_t>(grid_n));
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  RayleighResult best;
  long evals = 0;
  int collapsed = 0;
  for (int start = 0; start <= cfg.restarts; ++start) {
    auto u0 = base;
    if (start > 0)
      for (auto& v : u0.values) v = U(rng);
    RayleighResult r;
    try {
      r = minimize_rayleigh_from(omega, s, p, u0, cfg);
    } catch (const domain_error&) {
      ++collapsed;
      continue;
    }
    evals += r.evaluations;
    for (auto& t : r.trace) t.start = start;
    if (r.quotient < best.quotient) {
      best = std::move(r);
      best.best_start = start;
    }
  }
  if (collapsed == cfg.restarts + 1) throw convergence_error("minimize_rayleigh: every start collapsed to u = 0");
  best.evaluations = evals;
  return best;
}

// ---------------------------------------------------------------------------
// Product test functions on the half-space

/// 2 ∫_0^∞ (1+t²)^{-(N+s)/2} dt by quadrature.
inline double product_tail_integral(int N, double s) {
  const double e = 0.5 * (N + s);
  // t = u/(1-u)
  auto f = [e](double u, double, double w) { return std::pow(w, 2.0 * e - 2.0) * std::pow(w * w + u * u, -e); };
  return 2.0 * integrate(f, 0.0, 1.0).value;
}

/// Upper bounds for h_{s,1}(H^N_+) from u_k(x) = φ(x'/k) ψ(x_N), φ the
/// indicator of the unit ball of R^{N-1}, one per k in the ladder.
inline std::vector<double> product_upper_bound(int N, double s, const StepFunction& psi, const std::vector<double>& k_ladder) {
  detail::require(N >= 2, "product bound needs N >= 2");
  detail::require_fractional_order(s);
  if (psi.is_zero()) throw domain_error("product_upper_bound: psi vanishes identically");
  detail::require(psi.breakpoints().front() >= 0.0, "psi must be supported in (0, inf)");
  const auto half = Domain1D::halfline();
  const double weighted = weighted_lp_step(psi, half, s);
  const double q_psi = seminorm_s1_step(psi, s) / weighted;
  const double phi_ratio = perimeter_ball_closed(N - 1, s) / unit_ball_volume(N - 1);
  const double r = phi_ratio * psi.integral() / weighted * product_tail_integral(N, s);
  const double lead = c_constant(N, s) * q_psi;
  std::vector<double> out;
  for (double k : k_ladder) {
    detail::require(k > 0.0, "k must be positive");
    out.push_back(lead + std::pow(k, -s) * r);
  }
  return out;
}

}  // namespace fhardy
