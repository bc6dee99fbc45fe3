#pragma once

// Regression suite over the library: each ClaimCheck compares a computed
// quantity with a closed form, a bound or an extrapolated limit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "fhardy/constants.hpp"
#include "fhardy/error.hpp"
#include "fhardy/fracmeasures.hpp"
#include "fhardy/sets1d.hpp"
#include "fhardy/specfun.hpp"
#include "fhardy/variational.hpp"

namespace fhardy {

// lt / gt are strict versions of le / ge: the margin is the tolerance
enum class Relation { eq, le, ge, lt, gt, limit };
enum class Status { pass, fail, skipped };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::eq: return "eq";
    case Relation::le: return "le";
    case Relation::ge: return "ge";
    case Relation::lt: return "lt";
    case Relation::gt: return "gt";
    default: return "limit";
  }
}

inline const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    default: return "skipped";
  }
}

struct ClaimCheck {
  std::string id;
  std::string description;
  double lhs = 0.0;
  double rhs = 0.0;
  Relation relation = Relation::eq;
  double tolerance = 1e-12;
  Status status = Status::skipped;
  nlohmann::json params = nlohmann::json::object();
  std::vector<double> ladder;  // rung values of a limit check, in ladder order
};

/// Status from (lhs, rhs, relation, tolerance); limit checks also look at
/// the last three rungs, which must approach the extrapolant monotonically.
inline Status evaluate(const ClaimCheck& c) {
  if (!std::isfinite(c.lhs) || !std::isfinite(c.rhs) || !(c.tolerance > 0.0)) return Status::fail;
  const double eff = c.tolerance * std::max(1.0, std::abs(c.rhs));
  bool ok = false;
  switch (c.relation) {
    case Relation::eq: ok = std::abs(c.lhs - c.rhs) <= eff; break;
    case Relation::le: ok = c.lhs <= c.rhs + eff; break;
    case Relation::ge: ok = c.lhs >= c.rhs - eff; break;
    case Relation::lt: ok = c.lhs < c.rhs - eff; break;
    case Relation::gt: ok = c.lhs > c.rhs + eff; break;
    case Relation::limit: {
      const std::size_t n = c.ladder.size();
      if (n < 3 || std::abs(c.lhs - c.rhs) > eff) break;
      const double a = c.ladder[n - 3], b = c.ladder[n - 2], z = c.ladder[n - 1];
      ok = (b - a) * (z - b) >= 0.0 && std::abs(z - c.lhs) <= std::abs(b - c.lhs);
      break;
    }
  }
  return ok ? Status::pass : Status::fail;
}

struct VerifyConfig {
  std::string suite = "all";  // "all", one group, or a comma-separated list
  std::uint64_t seed = 7;
  int rungs = 5;

  void validate() const { detail::require(rungs >= 3 && rungs <= 12, "rungs must lie in [3, 12]"); }
};

namespace detail {

/// Value at h = 0 of the polynomial through (h_k, f_k).
inline double neville_at_zero(const std::vector<double>& h, std::vector<double> f) {
  require(h.size() == f.size() && !h.empty(), "neville: ladder size mismatch");
  const std::size_t n = h.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i) f[i] = (h[i] * f[i + 1] - h[i + m] * f[i]) / (h[i] - h[i + m]);
  return f[0];
}

inline std::vector<double> halving(double h0, int n) {
  std::vector<double> h(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) h[static_cast<std::size_t>(k)] = std::ldexp(h0, -k);
  return h;
}

inline std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline std::string idx(int i, int width = 2) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%0*d", width, i);
  return buf;
}

// tolerance that makes evaluate() test an absolute error bound
inline double absolute(double tol, double rhs) { return tol / std::max(1.0, std::abs(rhs)); }

class Collector {
public:
  void add(std::string id, std::string description, double lhs, double rhs, Relation rel, double tol,
           nlohmann::json params = nlohmann::json::object()) {
    ClaimCheck c{std::move(id), std::move(description), lhs, rhs, rel, tol, Status::skipped, std::move(params), {}};
    c.status = evaluate(c);
    out_.push_back(std::move(c));
  }

  // Neville extrapolation of f along h -> 0
  void limit(std::string id, std::string description, const std::vector<double>& h, const std::vector<double>& f,
             double target, double tol, nlohmann::json params = nlohmann::json::object()) {
    params["h"] = h;
    params["ladder"] = f;
    ClaimCheck c{std::move(id), std::move(description), neville_at_zero(h, f), target, Relation::limit, tol,
                 Status::skipped, std::move(params), f};
    c.status = evaluate(c);
    out_.push_back(std::move(c));
  }

  void error(const std::string& group, const std::string& what) {
    ClaimCheck c{group + ".error", "group aborted with an exception", std::nan(""), 0.0, Relation::eq, 1.0,
                 Status::fail, {{"error", what}}, {}};
    out_.push_back(std::move(c));
  }

  std::vector<ClaimCheck>& checks() { return out_; }

private:
  std::vector<ClaimCheck> out_;
};

inline std::mt19937_64 group_rng(std::uint64_t seed, std::uint64_t group) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(group)};
  return std::mt19937_64(seq);
}

inline IntervalUnion random_union(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> U(lo, hi);
  std::vector<double> pts(static_cast<std::size_t>(2 * n));
  for (;;) {
    for (auto& x : pts) x = U(rng);
    std::sort(pts.begin(), pts.end());
    if (std::adjacent_find(pts.begin(), pts.end()) == pts.end()) break;
  }
  std::vector<Interval> iv;
  for (int i = 0; i < n; ++i) iv.push_back({pts[static_cast<std::size_t>(2 * i)], pts[static_cast<std::size_t>(2 * i + 1)]});
  return IntervalUnion(iv);
}

inline StepFunction random_step(std::mt19937_64& rng, double a, double b, int cells) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> x{a}, v;
  std::vector<double> cuts(static_cast<std::size_t>(cells - 1));
  for (auto& c : cuts) c = a + (b - a) * U(rng);
  std::sort(cuts.begin(), cuts.end());
  for (double c : cuts)
    if (c > x.back()) x.push_back(c);
  x.push_back(b);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) v.push_back(U(rng) < 0.15 ? 0.0 : 0.1 + 2.0 * U(rng));
  return StepFunction(x, v);
}

inline double one_d_sharp(double s) { return std::pow(2.0, 2.0 - s) / s; }

// --- groups -----------------------------------------------------------------

inline void check_constants(Collector& C, const VerifyConfig& cfg) {
  for (int N = 2; N <= 5; ++N)
    for (double q : {0.0, 0.25, 0.5, 1.0, 1.5}) {
      const double exact = c_constant(N, q);
      C.add("constants.c_quadrature.N" + std::to_string(N) + ".q" + g6(q),
            "C_{N,q} by quadrature against the Gamma-function closed form", c_constant_quadrature(N, q), exact,
            Relation::eq, 1e-9 * std::abs(exact) / std::max(1.0, exact), {{"N", N}, {"q", q}});
    }
  // C_{N,1} = ω_{N-1} holds with ω_k = π^{k/2}/Γ(k/2+1)
  for (int N = 2; N <= 5; ++N)
    C.add("constants.omega_convention.N" + std::to_string(N), "C_{N,1} equals the volume of the unit ball of R^{N-1}",
          c_constant(N, 1.0), unit_ball_volume(N - 1), Relation::eq, 1e-13, {{"N", N}});
  for (int k = 1; k <= 9; ++k) {
    const double s = 0.1 * k;
    C.add("constants.punctured_1d.s" + g6(s), "punctured-line constant times s 2^{s-2} equals 1",
          sharp_punctured(1, s) * s * std::pow(2.0, s - 2.0), 1.0, Relation::eq, 1e-12, {{"N", 1}, {"s", s}});
  }
  for (int N : {2, 3})
    for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double ratio = perimeter_ball_closed(N, s) / weighted_volume_ball(N, s, BallDomain::punctured_space);
      const double rhs = sharp_punctured(N, s);
      C.add("constants.punctured_ball.N" + std::to_string(N) + ".s" + g6(s),
            "unit ball quotient P_s(B)/V_s(B) in the punctured space equals the punctured constant", ratio, rhs,
            Relation::eq, 1e-10, {{"N", N}, {"s", s}});
    }
  // centred intervals are optimal among the sampled sets
  auto rng = group_rng(cfg.seed, 1);
  std::uniform_real_distribution<double> S(0.05, 0.95), Rr(0.1, 3.0);
  std::uniform_int_distribution<int> K(1, 3);
  const auto punct = Domain1D::punctured();
  for (int i = 0; i < 12; ++i) {
    const double s = S(rng);
    IntervalUnion E = i < 2 ? IntervalUnion{{-Rr(rng), 0.0}} : random_union(rng, K(rng), -3.0, 3.0);
    if (i == 0) {
      const double r = Rr(rng);
      E = IntervalUnion{{-r, r}};
    }
    C.add("constants.punctured_optimality." + idx(i), "P_s(E)/∫_E|x|^{-s} is at least the punctured-line constant",
          cheeger_quotient(punct, E, s), sharp_punctured(1, s), i == 0 ? Relation::eq : Relation::ge, 1e-12,
          {{"domain", "punctured"}, {"set", format_union(E)}, {"s", s}});
  }
}

inline void check_lambda(Collector& C, const VerifyConfig& cfg) {
  for (int k = 1; k <= 9; ++k) {
    const double s = 0.1 * k;
    C.add("lambda.p1.s" + g6(s), "Λ_{s,1} by quadrature equals 4/s", lambda_constant_integral(s, 1.0).value, 4.0 / s,
          Relation::eq, absolute(1e-8, 4.0 / s), {{"s", s}, {"p", 1}});
  }
  // p spread over (1, 1/s) so every point has sp < 1
  for (int k = 1; k <= 9; ++k) {
    const double s = 0.1 * k;
    for (int j = 0; j < 5; ++j) {
      const double frac = 0.1 + 0.2 * j;
      const double p = 1.0 + (1.0 / s - 1.0) * frac;
      C.add("lambda.strict.s" + g6(s) + ".p" + g6(p), "Λ_{s,p} < 4/(sp) with margin", lambda_constant(s, p),
            4.0 / (s * p), Relation::lt, 1e-9, {{"s", s}, {"p", p}});
    }
  }
  C.add("lambda.sp1", "Λ_{s,p} = 2/(sp) when sp = 1", lambda_constant(0.5, 2.0), 2.0, Relation::eq, 1e-12,
        {{"s", 0.5}, {"p", 2.0}});
  for (double s : {0.3, 0.5, 0.7}) {
    const auto h = halving(0.1, cfg.rungs);
    std::vector<double> f;
    for (double hk : h) f.push_back(lambda_constant(s, 1.0 + hk));
    C.limit("lambda.limit.s" + g6(s), "Λ_{s,p} → 4/s as p → 1", h, f, 4.0 / s, 1e-4, {{"s", s}, {"variable", "p-1"}});
  }
}

inline void check_halfspace(Collector& C, const VerifyConfig& cfg) {
  const auto half = Domain1D::halfline();
  MinimizeConfig mc;
  mc.seed = cfg.seed;
  mc.restarts = 2;
  for (double s : {0.3, 0.5, 0.7}) {
    const nlohmann::json par{{"domain", "halfline"}, {"s", s}, {"p", 1}};
    C.add("halfspace.closed.s" + g6(s), "quotient of (0,1) in the half-line equals 4/s", cheeger_quotient(half, {{0.0, 1.0}}, s),
          4.0 / s, Relation::eq, 1e-14, nlohmann::json{{"domain", "halfline"}, {"set", "(0,1)"}, {"s", s}});
    const auto r = minimize_rayleigh(half, s, 1.0, 32, mc);
    auto p2 = par;
    p2["grid_n"] = 32;
    p2["seed"] = cfg.seed;
    C.add("halfspace.rayleigh.s" + g6(s), "Rayleigh minimum on a truncated half-line within 5% of 4/s", r.quotient,
          4.0 / s, Relation::eq, 0.05, p2);
    C.add("halfspace.rayleigh_upper.s" + g6(s), "Rayleigh minimum is an upper bound for 4/s", r.quotient, 4.0 / s,
          Relation::ge, 1e-12, p2);
  }
  // product test functions on H^N_+: the k^{-s} ladder halves the gap exactly
  for (int N : {2, 3}) {
    const double s = 0.5, eps = 1e-10;
    const auto h = halving(1.0, cfg.rungs);
    std::vector<double> ks;
    for (double hk : h) ks.push_back(std::pow(hk, -1.0 / s));
    const auto b = product_upper_bound(N, s, StepFunction({eps, 1.0}, {1.0}), ks);
    const double target = sharp_halfspace(N, s, 1.0);
    const nlohmann::json par{{"N", N}, {"s", s}, {"psi", "indicator(" + g6(eps) + ",1)"}, {"k", ks}};
    C.limit("halfspace.product.N" + std::to_string(N), "product test functions approach C_{N,s} 4/s", h, b, target,
            1e-3, par);
    C.add("halfspace.product_upper.N" + std::to_string(N), "product bound stays above C_{N,s} 4/s", b.back(), target,
          Relation::ge, 1e-12, par);
  }
  // p > 1 on (-1,1): the gap to the half-space constant is reported, not asserted
  const auto ball = Domain1D::bounded({{-1.0, 1.0}});
  const double s = 0.3, p = 2.0;
  const auto r = minimize_rayleigh(ball, s, p, 48, mc);
  const double lower = 2.0 * c_constant(1, s * p) / (s * p);
  C.add("halfspace.rayleigh_gap.s0.3.p2", "Rayleigh upper bound on (-1,1) is above the lower bound 2C/(sp)", r.quotient,
        lower, Relation::ge, 1e-12,
        {{"domain", "interval(-1,1)"}, {"s", s}, {"p", p}, {"grid_n", 48}, {"seed", cfg.seed},
         {"sharp_halfspace", sharp_halfspace(1, s, p)}, {"gap_to_halfspace", r.quotient - sharp_halfspace(1, s, p)}});
}

inline void check_homo(Collector& C, const VerifyConfig& cfg) {
  const auto ball = Domain1D::bounded({{-1.0, 1.0}});
  for (int k = 1; k <= 9; ++k) {
    const double s = 0.1 * k;
    C.add("homo.interval.s" + g6(s), "quotient of (-1,1) over the half-line constant equals 2^{-s}",
          cheeger_quotient(ball, ball.components(), s) / sharp_halfspace(1, s, 1.0), std::pow(2.0, -s), Relation::eq,
          1e-12, {{"domain", "interval(-1,1)"}, {"s", s}});
  }
  MinimizeConfig mc;
  mc.seed = cfg.seed;
  for (double s : {0.25, 0.5, 0.75}) {
    const auto r = cheeger_search(ball, s, 1, mc);
    const nlohmann::json par{{"domain", "interval(-1,1)"}, {"s", s}, {"k", 1}, {"seed", cfg.seed}, {"set", format_union(r.best_set)}};
    C.add("homo.search.s" + g6(s), "set search on (-1,1) reaches 2^{2-s}/s", r.quotient, one_d_sharp(s), Relation::eq,
          absolute(1e-6, one_d_sharp(s)), par);
    C.add("homo.search_set.s" + g6(s), "optimal set is (-1,1) in Hausdorff distance",
          hausdorff_distance(r.best_set, ball.components()), 0.0, Relation::le, 1e-3, par);
  }
  for (int N : {2, 3})
    for (double s : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999})
      C.add("homo.ball_lower.N" + std::to_string(N) + ".s" + g6(s), "ball ratio bound is at least 1/2",
            ball_ratio_bound(N, s), 0.5, Relation::ge, 1e-9, {{"N", N}, {"s", s}});
  C.add("homo.ball_near_one.N2", "ball ratio bound at s = 0.999 within 1% of 1/2", ball_ratio_bound(2, 0.999), 0.5,
        Relation::eq, 5e-3, {{"N", 2}, {"s", 0.999}});
  for (int N : {2, 3}) {
    const auto h = halving(0.2, cfg.rungs);
    std::vector<double> f;
    for (double hk : h) f.push_back(ball_ratio_bound(N, 1.0 - hk));
    C.limit("homo.ball_limit.N" + std::to_string(N), "ball ratio bound → 1/2 as s → 1", h, f, 0.5, 1e-3,
            {{"N", N}, {"variable", "1-s"}});
  }
}

inline void check_salto(Collector& C, const VerifyConfig& cfg) {
  // Ω = (-1,1): 2/(sp) ≤ h_{s,p}(Ω) ≤ h_{sp,1}(Ω) = 2^{2-sp}/(sp), both over h_{s,p}(H¹₊) = Λ_{s,p}
  const auto hs = halving(0.2, cfg.rungs);
  std::vector<double> anchors;
  for (double hsk : hs) {
    const double s = 1.0 - hsk;
    const auto hp = halving(0.5 * (1.0 - s) / s, cfg.rungs);  // keeps sp < 1
    std::vector<double> upper;
    for (std::size_t k = 0; k < hp.size(); ++k) {
      const double p = 1.0 + hp[k], q = s * p;
      const double lam = lambda_constant(s, p);
      const double lo = 2.0 / q / lam, up = one_d_sharp(q) / lam;
      upper.push_back(up);
      C.add("salto.sandwich.s" + g6(s) + ".k" + std::to_string(k), "lower ratio 2/(sp Λ) below upper ratio h_{sp,1}/Λ", lo,
            up, Relation::le, 1e-12, {{"s", s}, {"p", p}});
    }
    C.limit("salto.p_limit.s" + g6(s), "upper ratio → 2^{-s} as p → 1", hp, upper, std::pow(2.0, -s), 1e-3,
            {{"s", s}, {"variable", "p-1"}});
    anchors.push_back(neville_at_zero(hp, upper));
  }
  C.limit("salto.limit", "p → 1 anchors → 1/2 as s → 1", hs, anchors, 0.5, 5e-2, {{"variable", "1-s"}});
}

inline void check_punctured(Collector& C, const VerifyConfig& cfg) {
  auto value = [](int m, double q) {
    const auto box = parse_domain("punctured_box(" + std::to_string(m) + ")");
    return cheeger_quotient(box, box.components(), q);
  };
  for (double q : {0.25, 0.5, 0.75}) {
    double prev = inf;
    for (int m : {1, 2, 4, 8}) {
      const double v = value(m, q);
      const nlohmann::json par{{"domain", "punctured_box(" + std::to_string(m) + ")"}, {"s", q}};
      C.add("punctured.full.q" + g6(q) + ".m" + std::to_string(m), "full-set quotient equals m^{-q} 4^{1-q}/q", v,
            std::pow(m, -q) * std::pow(4.0, 1.0 - q) / q, Relation::eq, 1e-12, par);
      if (std::isfinite(prev))
        C.add("punctured.decrease.q" + g6(q) + ".m" + std::to_string(m), "quotient decreases as m doubles", v, prev,
              Relation::lt, 1e-9, par);
      prev = v;
    }
  }
  // m = 4^k makes m^{-1/2} halve
  std::vector<double> h, f;
  for (int k = 0; k < std::min(cfg.rungs, 5); ++k) {
    const int m = 1 << (2 * k);
    h.push_back(1.0 / (1 << k));
    f.push_back(value(m, 0.5));
  }
  C.limit("punctured.limit.q0.5", "full-set quotient → 0 as m → ∞", h, f, 0.0, 1e-9, {{"s", 0.5}, {"variable", "m^{-1/2}"}});
}

inline void check_nsegments(Collector& C, const VerifyConfig& cfg) {
  MinimizeConfig mc;
  mc.seed = cfg.seed;
  const double s = 0.5;
  for (int n = 1; n <= 3; ++n) {
    std::vector<Interval> iv;
    for (int i = 0; i < n; ++i) iv.push_back({-n + 2.0 * i, -n + 2.0 * (i + 1)});
    const auto omega = Domain1D::bounded(IntervalUnion(iv));
    const auto r = cheeger_search(omega, s, n, mc);
    const double rhs = one_d_sharp(s) / std::pow(n, s);
    C.add("nsegments.touching.n" + std::to_string(n), "n touching unit intervals reach 2^{2-s}/(s n^s)", r.quotient, rhs,
          Relation::eq, absolute(1e-5, rhs),
          {{"domain", format_domain(omega)}, {"s", s}, {"k", n}, {"seed", cfg.seed}, {"set", format_union(r.best_set)}});
  }
  auto bound = [](double l, double d, double q) { return one_d_sharp(q) * (1.0 - std::pow(l / (l + d), q)); };
  auto run = [&](const std::string& id, double l, double d, double q) {
    const auto omega = Domain1D::bounded({{0.0, l}, {l + d, 2.0 * l + d}});
    const auto r = cheeger_search(omega, q, 2, mc);
    C.add(id, "two intervals at distance δ: quotient above (2^{2-sp}/sp)(1-(ℓ/(ℓ+δ))^{sp})", r.quotient, bound(l, d, q),
          Relation::ge, 1e-9,
          {{"domain", format_domain(omega)}, {"s", q}, {"p", 1}, {"k", 2}, {"seed", cfg.seed},
           {"set", format_union(r.best_set)}, {"l", l}, {"delta", d}});
  };
  run("nsegments.example", 1.0, 1.0, 0.5);
  auto rng = group_rng(cfg.seed, 7);
  std::uniform_real_distribution<double> L(0.2, 2.0), D(0.05, 3.0), Q(0.05, 0.95);
  for (int i = 0; i < 20; ++i) {
    const double l = L(rng), d = D(rng), q = Q(rng);
    run("nsegments.random." + idx(i), l, d, q);
  }
}

inline void check_davila_mazya(Collector& C, const VerifyConfig& cfg) {
  struct Case {
    std::string name;
    std::function<double(double)> perimeter;
    double boundary;  // 2 ω_{N-1} P(Ω)
    double volume;    // 2 N ω_N |Ω|
  };
  const double pi = std::numbers::pi;
  const IntervalUnion one{{0.0, 1.0}}, two{{0.0, 1.0}, {2.0, 3.0}};
  const std::vector<Case> cases{
      {"interval", [&](double s) { return perimeter_interval_union(one, s).value; }, 4.0, 4.0},
      {"two_intervals", [&](double s) { return perimeter_interval_union(two, s).value; }, 8.0, 8.0},
      {"ball_N2", [](double s) { return perimeter_ball_closed(2, s); }, 8.0 * pi, 4.0 * pi * pi},
  };
  const auto h = halving(0.2, cfg.rungs);
  for (const auto& c : cases) {
    std::vector<double> up, down;
    for (double hk : h) {
      up.push_back(hk * c.perimeter(1.0 - hk));
      down.push_back(hk * c.perimeter(hk));
    }
    C.limit("davila." + c.name, "(1-s) P_s → 2 ω_{N-1} P as s → 1", h, up, c.boundary, 1e-3, {{"set", c.name}, {"variable", "1-s"}});
    C.limit("mazya." + c.name, "s P_s → 2 N ω_N |Ω| as s → 0", h, down, c.volume, 1e-3, {{"set", c.name}, {"variable", "s"}});
  }
}

// |B_R|^{1-s/N} / ∫_{B_R} δ★
inline double badluck_quotient(int N, double s, double R) {
  QuadratureSpec spec;
  spec.left(N - 1.0 - N * s).tolerance(1e-14, 1e-12);
  const auto r = integrate([&](double, double dl, double) { return std::pow(dl, N - 1.0) * ball_delta_rearranged(N, s, dl); },
                           0.0, R, spec);
  const double w = unit_ball_volume(N);
  return std::pow(w * std::pow(R, N), 1.0 - s / N) / (N * w * r.value);
}

inline void check_badluck(Collector& C, const VerifyConfig& cfg) {
  const double s = 0.5;
  for (int N : {2, 3}) {
    // R = h^{1/(s(N-1))} makes the leading term linear in h
    const auto h = halving(1.0, cfg.rungs);
    std::vector<double> f;
    for (std::size_t k = 0; k < h.size(); ++k) {
      const double R = std::pow(h[k], 1.0 / (s * (N - 1)));
      f.push_back(badluck_quotient(N, s, R));
      if (k)
        C.add("badluck.decrease.N" + std::to_string(N) + ".k" + std::to_string(k), "rearranged ball quotient decreases with R",
              f[k], f[k - 1], Relation::lt, 1e-12, {{"N", N}, {"s", s}, {"R", R}});
    }
    C.limit("badluck.limit.N" + std::to_string(N), "rearranged ball quotient → 0 as R → 0", h, f, 0.0, 1e-3,
            {{"N", N}, {"s", s}, {"variable", "R^{s(N-1)}"}});
  }
  for (double s1 : {0.25, 0.5, 0.75})
    for (double R : {1.0, 0.1, 0.01})
      C.add("badluck.n1.s" + g6(s1) + ".R" + g6(R), "in one dimension the quotient is the constant (1-s)/2^s",
            badluck_quotient(1, s1, R), (1.0 - s1) / std::pow(2.0, s1), Relation::eq, 1e-10, {{"N", 1}, {"s", s1}, {"R", R}});
}

inline GridFunction linear_profile(std::size_t nodes, double plateau) {
  // on (-1,1): 1 for |x| ≤ plateau, linear down to 0 at |x| = 1
  GridFunction u{-1.0, 2.0 / static_cast<double>(nodes + 1), std::vector<double>(nodes), GridInterp::piecewise_linear};
  for (std::size_t i = 0; i < nodes; ++i) {
    const double x = -1.0 + static_cast<double>(i + 1) * u.h;
    u.values[i] = std::min(1.0, (1.0 - std::abs(x)) / (1.0 - plateau));
  }
  return u;
}

inline void check_stability(Collector& C, const VerifyConfig& cfg) {
  const auto ball = Domain1D::bounded({{-1.0, 1.0}});
  const double s = 0.5;
  const std::vector<std::pair<std::string, GridFunction>> fns{{"hat", linear_profile(63, 0.0)},
                                                              {"smoothed_indicator", linear_profile(63, 0.5)}};
  // |Δu|^p varies like e^{p log|Δu|}, so the ladder starts close to p = 1
  const auto h = halving(0.05, cfg.rungs);
  for (const auto& [name, u] : fns) {
    std::vector<double> wl, sn, qt;
    for (double hk : h) {
      wl.push_back(weighted_lp_grid(u, ball, s, 1.0 + hk));
      sn.push_back(seminorm_p_grid(u, s, 1.0 + hk));
      qt.push_back(sn.back() / wl.back());
    }
    const double w1 = weighted_lp_grid(u, ball, s, 1.0), s1 = seminorm_p_grid(u, s, 1.0);
    const nlohmann::json par{{"domain", "interval(-1,1)"}, {"function", name}, {"s", s}, {"nodes", u.values.size()}, {"variable", "p-1"}};
    C.limit("stability." + name + ".weighted", "∫u^p d^{-sp} → ∫u d^{-s} as p → 1", h, wl, w1, 1e-6, par);
    C.limit("stability." + name + ".seminorm", "[u]^p_{s,p} → [u]_{s,1} as p → 1", h, sn, s1, 1e-6, par);
    C.limit("stability." + name + ".quotient", "grid Hardy quotient is continuous as p → 1", h, qt, s1 / w1, 1e-6, par);
  }
}

inline void check_perimeter(Collector& C, const VerifyConfig& cfg) {
  auto rng = group_rng(cfg.seed, 11);
  std::uniform_real_distribution<double> S(0.05, 0.95);
  std::uniform_int_distribution<int> K(1, 4);
  for (int i = 0; i < 100; ++i) {
    const double s = S(rng);
    const auto E = random_union(rng, K(rng), -5.0, 5.0);
    C.add("perimeter.oracle." + idx(i, 3), "closed-form P_s of a union against quadrature",
          perimeter_interval_union(E, s).value, perimeter_oracle(E, s).value, Relation::eq, 1e-6,
          {{"set", format_union(E)}, {"s", s}});
  }
  std::uniform_real_distribution<double> U(0.1, 3.0);
  for (int i = 0; i < 20; ++i) {
    const double s = S(rng);
    const auto E = random_union(rng, 2, -2.0, 2.0);
    const double a = U(rng), b = U(rng);
    // two levels: a on the first piece, b on the second, hole between
    const StepFunction u({E[0].a, E[0].b, E[1].a, E[1].b}, {a, 0.0, b});
    C.add("perimeter.coarea." + idx(i), "layer-cake seminorm equals the direct double integral", seminorm_s1_step(u, s),
          seminorm_p_step(u, s, 1.0), Relation::eq, 1e-6, {{"set", format_union(E)}, {"levels", {a, b}}, {"s", s}});
  }
}

inline void check_properties(Collector& C, const VerifyConfig& cfg) {
  auto rng = group_rng(cfg.seed, 13);
  std::uniform_real_distribution<double> S(0.1, 0.45);
  const auto ball = Domain1D::bounded({{-1.0, 1.0}});
  const auto pair = Domain1D::bounded({{-3.0, -1.0}, {1.0, 3.0}});
  const auto punct = Domain1D::punctured();
  for (int i = 0; i < 20; ++i) {
    const double s = S(rng);
    const auto u = random_step(rng, -1.0, 1.0, 4 + i % 9);
    if (u.is_zero()) continue;
    const auto star = rearrange_step(u);
    double worst = 0.0;
    for (double t : u.levels()) worst = std::max(worst, std::abs(u.measure_above(0.5 * t) - star.measure_above(0.5 * t)));
    for (double t : u.levels()) worst = std::max(worst, std::abs(u.measure_above(t) - star.measure_above(t)));
    const nlohmann::json par{{"s", s}, {"breakpoints", u.breakpoints()}, {"values", u.values()}};
    C.add("properties.rearrangement.measure." + idx(i), "rearrangement preserves level-set measures", worst, 0.0,
          Relation::le, 1e-12, par);
    C.add("properties.rearrangement.hardy_littlewood." + idx(i), "∫u d^{-s} ≤ ∫u★ |x|^{-s} on (-1,1)",
          weighted_lp_step(u, ball, s), weighted_lp_step(star, punct, s), Relation::le, 1e-12, par);
    for (double p : {1.0, 2.0})
      C.add("properties.rearrangement.quotient.p" + g6(p) + "." + idx(i),
            "rearranged quotient in the punctured line is below the quotient on (-1,1)",
            hardy_ratio_step(star, punct, s, p), hardy_ratio_step(u, ball, s, p), Relation::le, 1e-12, par);
    // two unit-radius components: δ★ = 2^s |x|^{-s}; copies of u on (-3,-1) and (1,3)
    std::vector<double> xs, vs = u.values();
    for (double xi : u.breakpoints()) xs.push_back(xi - 2.0);
    for (double xi : u.breakpoints()) xs.push_back(xi + 2.0);
    vs.push_back(0.0);
    vs.insert(vs.end(), u.values().begin(), u.values().end());
    const StepFunction u2(xs, vs);
    C.add("properties.rearrangement.hardy_littlewood_pair." + idx(i), "∫u d^{-s} ≤ 2^s ∫u★ |x|^{-s} on two unit intervals",
          weighted_lp_step(u2, pair, s), std::pow(2.0, s) * weighted_lp_step(rearrange_step(u2), punct, s), Relation::le,
          1e-12, par);
  }

  MinimizeConfig mc;
  mc.seed = cfg.seed;
  mc.restarts = 3;
  const auto omega = Domain1D::bounded({{-1.0, 0.5}, {0.5, 2.0}});
  const auto r = minimize_rayleigh(omega, 0.4, 1.5, 32, mc);
  double rise = 0.0, armijo = 0.0;
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    rise = std::max(rise, r.trace[i].quotient - r.trace[i - 1].quotient);
    armijo = std::max(armijo, r.trace[i].quotient - (r.trace[i - 1].quotient - detail::armijo_c1 * r.trace[i].decrease));
  }
  const nlohmann::json rpar{{"domain", format_domain(omega)}, {"s", 0.4}, {"p", 1.5}, {"grid_n", 32}, {"seed", cfg.seed},
                            {"trace_length", r.trace.size()}};
  C.add("properties.descent.monotone", "largest increase along the accepted descent trace", rise, 0.0, Relation::le, 1e-15, rpar);
  C.add("properties.descent.armijo", "largest violation of the sufficient-decrease test", armijo, 0.0, Relation::le, 1e-12, rpar);

  for (double p : {1.0, 1.5, 2.0}) {
    const double s = 0.3;
    auto u = GridFunction::constant_on({-1.0, 1.0}, 20);
    std::uniform_real_distribution<double> V(0.05, 2.0);
    for (auto& v : u.values) v = V(rng);
    const auto gn = seminorm_gradient(u, s, p);
    const auto gd = weighted_lp_gradient(u, ball, s, p);
    double worst = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      const double eps = 1e-6 * u.values[i];
      auto up = u, dn = u;
      up.values[i] += eps;
      dn.values[i] -= eps;
      const double fn = (seminorm_p_grid(up, s, p) - seminorm_p_grid(dn, s, p)) / (2 * eps);
      const double fd = (weighted_lp_grid(up, ball, s, p) - weighted_lp_grid(dn, ball, s, p)) / (2 * eps);
      worst = std::max({worst, std::abs(gn[i] - fn) / std::max(std::abs(gn[i]), 1e-300),
                        std::abs(gd[i] - fd) / std::max(std::abs(gd[i]), 1e-300)});
    }
    C.add("properties.gradient.p" + g6(p), "analytic gradients against central differences (relative)", worst, 0.0,
          Relation::le, 1e-5, {{"s", s}, {"p", p}, {"values", u.values}});
  }

  // same seed, same bits
  const auto dom = Domain1D::bounded({{0.0, 1.0}, {1.3, 2.0}, {2.5, 4.0}});
  const auto a = cheeger_search(dom, 0.4, 3, mc), b = cheeger_search(dom, 0.4, 3, mc);
  const double cheeger_mismatch = (a.quotient != b.quotient) + !(a.best_set == b.best_set) + (a.evaluations != b.evaluations);
  C.add("properties.determinism.cheeger", "repeated set search with the same seed differs in this many fields",
        cheeger_mismatch, 0.0, Relation::eq, 0.5, {{"domain", format_domain(dom)}, {"s", 0.4}, {"k", 3}, {"seed", cfg.seed}});
  const auto ra = minimize_rayleigh(omega, 0.3, 1.7, 24, mc), rb = minimize_rayleigh(omega, 0.3, 1.7, 24, mc);
  const double rayleigh_mismatch = (ra.quotient != rb.quotient) + (ra.u.values != rb.u.values) + (ra.trace.size() != rb.trace.size());
  C.add("properties.determinism.rayleigh", "repeated Rayleigh descent with the same seed differs in this many fields",
        rayleigh_mismatch, 0.0, Relation::eq, 0.5, {{"domain", format_domain(omega)}, {"s", 0.3}, {"p", 1.7}, {"seed", cfg.seed}});
}

struct Group {
  const char* name;
  void (*run)(Collector&, const VerifyConfig&);
};

inline const std::vector<Group>& groups() {
  static const std::vector<Group> g{
      {"badluck", check_badluck},     {"constants", check_constants}, {"davila", check_davila_mazya},
      {"halfspace", check_halfspace}, {"homo", check_homo},           {"lambda", check_lambda},
      {"nsegments", check_nsegments}, {"perimeter", check_perimeter}, {"properties", check_properties},
      {"punctured", check_punctured}, {"salto", check_salto},         {"stability", check_stability},
  };
  return g;
}

}  // namespace detail

/// Names accepted by VerifyConfig::suite besides "all". "davila" also runs
/// the small-s limits (ids "mazya.*").
inline std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (const auto& g : detail::groups()) out.push_back(g.name);
  return out;
}

/// Runs the selected groups; checks come back sorted by id.
inline std::vector<ClaimCheck> run_all(const VerifyConfig& cfg = {}) {
  cfg.validate();
  std::vector<std::string> wanted;
  for (std::size_t pos = 0; pos <= cfg.suite.size();) {
    const std::size_t next = std::min(cfg.suite.find(',', pos), cfg.suite.size());
    wanted.push_back(cfg.suite.substr(pos, next - pos));
    pos = next + 1;
  }
  const auto names = suite_names();
  for (const auto& w : wanted)
    if (w != "all" && w != "mazya" && std::find(names.begin(), names.end(), w) == names.end())
      throw parse_error("unknown verification suite", w);
  auto selected = [&](const std::string& n) {
    return std::find(wanted.begin(), wanted.end(), "all") != wanted.end() ||
           std::find(wanted.begin(), wanted.end(), n) != wanted.end() ||
           (n == "davila" && std::find(wanted.begin(), wanted.end(), "mazya") != wanted.end());
  };
  detail::Collector C;
  for (const auto& g : detail::groups()) {
    if (!selected(g.name)) continue;
    try {
      g.run(C, cfg);
    } catch (const std::exception& e) {
      C.error(g.name, e.what());
    }
  }
  auto out = std::move(C.checks());
  std::stable_sort(out.begin(), out.end(), [](const ClaimCheck& a, const ClaimCheck& b) { return a.id < b.id; });
  return out;
}

inline bool all_passed(const std::vector<ClaimCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const ClaimCheck& c) { return c.status != Status::fail; });
}

inline nlohmann::ordered_json to_json(const ClaimCheck& c) {
  nlohmann::ordered_json j;
  j["id"] = c.id;
  j["description"] = c.description;
  j["lhs"] = c.lhs;
  j["rhs"] = c.rhs;
  j["relation"] = to_string(c.relation);
  j["tolerance"] = c.tolerance;
  j["status"] = to_string(c.status);
  j["params"] = c.params;
  return j;
}

inline void write_jsonl(std::ostream& os, const std::vector<ClaimCheck>& checks) {
  for (const auto& c : checks) os << to_json(c).dump() << '\n';
}

/// Human-readable table; failures also print their parameters.
inline void write_table(std::ostream& os, const std::vector<ClaimCheck>& checks) {
  char line[512];
  std::snprintf(line, sizeof line, "%-52s %-6s %24s %24s %10s  %s\n", "id", "rel", "lhs", "rhs", "tol", "status");
  os << line;
  int pass = 0, fail = 0, skipped = 0;
  for (const auto& c : checks) {
    std::snprintf(line, sizeof line, "%-52s %-6s %24.17g %24.17g %10.3g  %s\n", c.id.c_str(), to_string(c.relation), c.lhs,
                  c.rhs, c.tolerance, to_string(c.status));
    os << line;
    if (c.status == Status::fail) os << "    params: " << c.params.dump() << '\n';
    (c.status == Status::pass ? pass : c.status == Status::fail ? fail : skipped)++;
  }
  os << checks.size() << " checks: " << pass << " pass, " << fail << " fail, " << skipped << " skipped\n";
}

}  // namespace fhardy
