#pragma once

// Formula evaluators and the worked-example verifications, packaged as
// CheckReports.

#include <algorithm>
#include <map>

#include "leray/cycles.hpp"
#include "leray/kernels.hpp"
#include "leray/report.hpp"

namespace leray {

namespace detail {

inline cplx eval_f(const HolomorphicExpr& f, std::span<const cplx> x) {
  return f.arity() == 0 ? f(x) : eval_expr(f, x);
}

inline std::string point_text(std::span<const cplx> p) {
  std::string s;
  for (auto c : p) s += (s.empty() ? "" : ",") + CheckReport::format_complex(c);
  return s;
}

inline double factorial(int k) {
  double r = 1.0;
  for (int j = 2; j <= k; ++j) r *= j;
  return r;
}

// One-dimensional trapezoid rule for a contour integral over |w - c| = r,
// written out directly; used by the oracles so they share no code with
// the cycle machinery.
template <typename Fn>
cplx circle_trapezoid(Fn&& g, cplx center, double r, int n) {
  CompensatedSum acc;
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * pi * j / n;
    const cplx w = center + std::polar(r, t);
    acc.add(g(w) * (I * std::polar(r, t)) * (2.0 * pi / n));
  }
  return acc.value();
}

}  // namespace detail

/// Orientation of alpha relative to orientation_sign's convention (outward
/// normal first, coordinates Re x1, Im x1, ..., Re xn, Im xn): +1 outward,
/// -1 inward. Both implemented dimensions need the inward sphere here, which
/// is the outward one when the normal is placed last instead.
inline int alpha_orientation(int n) {
  if (n != 1 && n != 2) throw InputError("alpha orientation is implemented for n = 1 and n = 2 only");
  return -1;
}

inline QuadratureSpec default_first_quadrature(int n) {
  return n == 1 ? QuadratureSpec{{128}} : QuadratureSpec{{32, 64, 64}};
}

/// (n-1)!/(2 pi i)^n times the integral of f Phi_z over the cycle M of
/// radius eps about z, against f(z).
inline CheckReport first_formula(int n, const HolomorphicExpr& f, const AffinePoint& z, double eps,
                                 QuadratureSpec quad, double tol, int workers = 1) {
  if (n != 1 && n != 2) throw InputError("first formula: n must be 1 or 2, got " + std::to_string(n));
  if (static_cast<int>(z.dim()) != n) throw InputError("first formula: z must have n coordinates");
  if (!(eps > 0.0)) throw InputError("first formula: eps must be positive");
  if (quad.nodes.empty()) quad = default_first_quadrature(n);
  if (static_cast<int>(quad.nodes.size()) != (n == 1 ? 1 : 3))
    throw InputError("first formula: expected " + std::string(n == 1 ? "1" : "3") + " quadrature sizes");

  Cycle m = make_sphere_m(z, eps);
  const int raw_sign = orientation_sign(m);
  m.orientation = alpha_orientation(n) * raw_sign;

  const cplx integral = integrate(phi(n, z, f), m, quad, workers);
  const cplx computed = detail::factorial(n - 1) / std::pow(2.0 * pi * I, n) * integral;
  const cplx expected = detail::eval_f(f, z.coords);

  CheckReport r = value_check("first_n" + std::to_string(n), computed, expected, tol, quad.nodes);
  r.param("n", std::to_string(n))
      .param("f", print_expr(f))
      .param("z", detail::point_text(z.coords))
      .param("eps", eps)
      .param("parametrization_sign", std::to_string(raw_sign))
      .param("alpha", alpha_orientation(n) > 0 ? "outward" : "inward")
      .param("integral", integral);
  return r;
}

/// n = 1: minus the residue on Q n P of f Phi_z, as a small-circle residue of
/// the pullback of f Phi_z to Q (parametrized by x), against f(z).
inline CheckReport second_formula_n1(const HolomorphicExpr& f, cplx z, double r, int nodes, double tol) {
  if (!(r > 0.0)) throw InputError("second formula: radius must be positive");
  if (f.arity() > 1) throw InputError("second formula: f must be a function of one variable");
  // x -> (xi_0, xi_1, x) = (-x, 1, x) lies on Q.
  const ChartMap on_q{1, 3, [](std::span<const cplx> p) { return Point{-p[0], 1.0, p[0]}; },
                      [](std::span<const cplx>) { return std::vector<Vector>{{-1.0, 0.0, 1.0}}; }};
  const KForm restricted = pullback(phi(1, AffinePoint({z}), f), on_q);
  const cplx loop = integrate(restricted, make_circle(z, r), QuadratureSpec{{nodes}});
  const cplx residue = loop / (2.0 * pi * I);
  const cplx computed = -residue;

  CheckReport rep = value_check("second_n1", computed, f(z), tol, {nodes});
  rep.param("f", print_expr(f)).param("z", z).param("r", r).param("residue", residue);
  return rep;
}

/// The gamma-integral of the residue representative of Example A (with a) or
/// B, from 1 to 0. pass compares against the example's closed form;
/// formula_holds records whether the value equals f(0).
inline CheckReport third_formula_case(char id, cplx a, const HolomorphicExpr& f, int nodes, double tol) {
  if (id != 'A' && id != 'B') throw InputError(std::string("third formula: unknown case '") + id + "'");
  if (f.arity() > 1) throw InputError("third formula: f must be a function of one variable");
  const KForm rep_form = casebook_form(id == 'A' ? "residue_A" : "residue_B", a, f);
  const cplx computed = integrate(rep_form, make_segment(1.0, 0.0), QuadratureSpec{{nodes}});
  const cplx f0 = f(cplx{0.0});
  const cplx closed = id == 'A' ? f0 - a * f(cplx{1.0}) : f0;

  CheckReport r = value_check(std::string("third_") + id, computed, closed, tol, {nodes});
  const bool holds = std::abs(computed - f0) <= tol;
  if (id == 'A') r.param("a", a);
  r.param("f", print_expr(f))
      .param("f0", f0)
      .param("pass_closed_form", r.pass ? "true" : "false")
      .param("formula_holds", holds ? "true" : "false");
  return r;
}

// ---------------------------------------------------------------------------
// Obstruction integrals

/// Product of the one-variable contour integrals of dy1/(y1(y1+1)) over
/// |y1| = eps and (x2^2+1)/x2 dx2 over |x2| = eps.
inline cplx torus_d_oracle(double eps, int n = 512) {
  cplx a = detail::circle_trapezoid([](cplx y) { return 1.0 / (y * (y + 1.0)); }, 0.0, eps, n);
  cplx b = detail::circle_trapezoid([](cplx x) { return (x * x + 1.0) / x; }, 0.0, eps, n);
  return a * b;
}

/// Residue in u of ((v-u)^3+1)/(uv) is (v^3+1)/v; integrate that over
/// |v| = r2 and multiply by the integral of du/u over |u| = r1.
inline cplx torus_e_oracle(double r1, double r2, int n = 512) {
  cplx a = detail::circle_trapezoid([](cplx u) { return 1.0 / u; }, 0.0, r1, n);
  cplx b = detail::circle_trapezoid([](cplx v) { return (v * v * v + 1.0) / v; }, 0.0, r2, n);
  return a * b;
}

/// Torus integral of theta_D (id 'D', radii = {eps}) or integrand_E
/// (id 'E', radii = {r1, r2}). The oracle is evaluated first and becomes the
/// expected value; pass also requires |computed| > 0.1.
inline CheckReport necessary_condition_case(char id, std::vector<double> radii, QuadratureSpec quad, double tol,
                                            int workers = 1) {
  if (quad.nodes.empty()) quad.nodes = {128, 128};
  if (quad.nodes.size() != 2) throw InputError("necessary condition: torus quadrature needs two sizes");
  cplx oracle, computed;
  if (id == 'D') {
    if (radii.size() != 1) throw InputError("necessary condition D: expects one radius eps");
    oracle = torus_d_oracle(radii[0]);
    computed = integrate(casebook_form("theta_D"), make_torus_d(radii[0]), quad, workers);
  } else if (id == 'E') {
    if (radii.size() == 1) radii.push_back(radii[0]);
    if (radii.size() != 2) throw InputError("necessary condition E: expects radii r1,r2");
    if (!(radii[0] > 0.0 && radii[1] > 0.0)) throw InputError("necessary condition E: radii must be positive");
    oracle = torus_e_oracle(radii[0], radii[1]);
    computed = integrate(casebook_form("integrand_E"), make_torus_e(radii[0], radii[1]), quad, workers);
  } else {
    throw InputError(std::string("necessary condition: unknown case '") + id + "'");
  }
  const cplx closed = -4.0 * pi * pi;
  CheckReport r = value_check(std::string("necessary_") + id, computed, oracle, tol, quad.nodes);
  const bool nonzero = std::abs(computed) > 0.1;
  const bool oracle_ok = std::abs(oracle - closed) <= tol;
  r.pass = r.pass && nonzero && oracle_ok;
  if (id == 'D') r.param("eps", radii[0]);
  else r.param("r1", radii[0]).param("r2", radii[1]);
  r.param("oracle", oracle)
      .param("closed_form", closed)
      .param("nonzero", nonzero ? "true" : "false")
      .param("predicate", "|computed| > 0.1 and |computed - oracle| <= tol");
  return r;
}

// ---------------------------------------------------------------------------
// Identity suite

namespace detail {

inline Point random_point(Rng& rng, int dim, double half_width) {
  Point p(dim);
  for (auto& c : p) c = rng.in_box(half_width);
  return p;
}

inline std::vector<Vector> random_frame(Rng& rng, int dim, int k) {
  std::vector<Vector> vs;
  for (int j = 0; j < k; ++j) vs.push_back(rng.vector_in_box(dim, 1.0));
  return vs;
}

// (xi, x) with |xi . z| >= 0.2.
inline Point kernel_point(Rng& rng, int n, const Point& z) {
  for (;;) {
    Point p = random_point(rng, 2 * n + 1, 1.5);
    if (std::abs(dual_pairing(std::span<const cplx>(p).subspan(0, n + 1), z)) >= 0.2) return p;
  }
}

inline CheckReport max_relative(std::string id, double worst, double bound, const std::string& what, int count) {
  CheckReport r = bound_check(std::move(id), worst, bound, false, "max relative error of " + what + " < bound");
  r.param("points", std::to_string(count));
  return r;
}

inline ChartMap x_projection(int dim, int index) {
  return ChartMap{dim, 1, [index](std::span<const cplx> p) { return Point{p[index]}; },
                  [dim, index](std::span<const cplx>) {
                    std::vector<Vector> cols(dim, Vector{0.0});
                    cols[index][0] = 1.0;
                    return cols;
                  }};
}

}  // namespace detail

inline const std::vector<std::string>& identity_ids() {
  static const std::vector<std::string> ids{"dPhi_nPsi", "scale",    "chart_phi", "exact_A",
                                            "exact_D",   "extend_B", "extend_C",  "vanish_all"};
  return ids;
}

/// d_numeric(Phi_z) against n Psi_z at random points off P.
inline CheckReport identity_dphi(int n, std::uint64_t seed, int count = 100) {
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    Point z = detail::random_point(rng, n, 1.0);
    Point p = detail::kernel_point(rng, n, z);
    auto vs = detail::random_frame(rng, 2 * n + 1, 2 * n);
    const AffinePoint zp(z);
    cplx lhs = d_numeric(phi(n, zp), p, vs);
    cplx rhs = static_cast<double>(n) * evaluate(psi(n, zp), p, vs);
    worst = std::max(worst, relative_difference(lhs, rhs));
  }
  CheckReport r = detail::max_relative("dPhi_nPsi_n" + std::to_string(n), worst, 1e-5, "dPhi vs n Psi", count);
  return r.param("n", std::to_string(n));
}

/// Phi_z(lambda xi, x; lambda v_xi, v_x) against Phi_z(xi, x; v), and the
/// same for Psi_z.
inline CheckReport identity_scale(const std::string& which, int n, std::uint64_t seed, int count = 100) {
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    Point z = detail::random_point(rng, n, 1.0);
    const AffinePoint zp(z);
    KForm form = which == "phi" ? phi(n, zp) : psi(n, zp);
    Point p = detail::kernel_point(rng, n, z);
    auto vs = detail::random_frame(rng, 2 * n + 1, form.degree());
    const cplx lambda = rng.in_annulus(0.5, 2.0);
    Point q = p;
    auto ws = vs;
    for (int j = 0; j <= n; ++j) {
      q[j] *= lambda;
      for (auto& w : ws) w[j] *= lambda;
    }
    worst = std::max(worst, relative_difference(evaluate(form, p, vs), evaluate(form, q, ws)));
  }
  CheckReport r = detail::max_relative("scale_" + which + "_n" + std::to_string(n), worst, 1e-12,
                                       which + " under xi -> lambda xi", count);
  return r.param("n", std::to_string(n));
}

inline CheckReport identity_chart_phi(int n, std::uint64_t seed, int count = 100) {
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    Point p(2 * n);
    for (int j = 0; j < n; ++j) p[j] = rng.in_annulus(0.5, 1.5);
    for (int j = n; j < 2 * n; ++j) p[j] = rng.in_box(1.5);
    auto vs = detail::random_frame(rng, 2 * n, 2 * n - 1);
    worst = std::max(worst, phi_chart_identity_gap(n, p, vs));
  }
  CheckReport r = detail::max_relative("chart_phi_n" + std::to_string(n), worst, 1e-10, "chart formula gap", count);
  return r.param("n", std::to_string(n));
}

/// f Psi + d(f sigma_A) against (deta/eta) ^ d(f(x)((a-1)x+1)) on (eta, x).
inline CheckReport identity_exact_a(cplx a, const HolomorphicExpr& f, std::uint64_t seed, int count = 100) {
  const KForm f_psi = pullback(psi(1, AffinePoint({0.0}), f), eta_chart.lift());
  const KForm lhs = f_psi + d_numeric_form(casebook_form("sigma_A", a, f));
  const KForm deta_over_eta = one_form(2, [](std::span<const cplx> p) { return Vector{1.0 / p[0], 0.0}; });
  const KForm rhs = wedge(deta_over_eta, pullback(casebook_form("residue_A", a, f), detail::x_projection(2, 1)));
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    Point p{rng.in_annulus(0.3, 1.5), rng.in_box(1.5)};
    auto vs = detail::random_frame(rng, 2, 2);
    worst = std::max(worst, relative_difference(evaluate(lhs, p, vs), evaluate(rhs, p, vs)));
  }
  CheckReport r = detail::max_relative("exact_A", worst, 1e-5, "f Psi + d(f sigma) vs deta/eta ^ residue", count);
  return r.param("a", a).param("f", print_expr(f));
}

/// Psi + (1/2) d tau against (dy0/y0) ^ dy1 ^ dx1 ^ dx2 on the chart xi_2 = 1.
inline CheckReport identity_exact_tau(char id, std::uint64_t seed, int count = 100) {
  const KForm psi_u2 = pullback(psi(2, AffinePoint({0.0, 0.0})), u2_chart.lift());
  const KForm tau = casebook_form(std::string("tau_") + id);
  const KForm lhs = psi_u2 + 0.5 * d_numeric_form(tau);
  const KForm rhs = multiply([](std::span<const cplx> p) { return 1.0 / p[0]; }, coordinate_form(4, {0, 1, 2, 3}));
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    Point p{rng.in_annulus(0.3, 1.5), rng.in_box(1.5), rng.in_box(1.5), rng.in_box(1.5)};
    auto vs = detail::random_frame(rng, 4, 4);
    worst = std::max(worst, relative_difference(evaluate(lhs, p, vs), evaluate(rhs, p, vs)));
  }
  return detail::max_relative(std::string("exact_") + id, worst, 1e-5, "Psi + d(tau)/2 vs dy0/y0 ^ ...", count);
}

/// Pullback of Phi_0 to S_B, parametrized by eta, against -(eta+2)/(eta+1)^2.
inline CheckReport identity_extend_b(std::uint64_t seed, int count = 50) {
  const ChartMap param{1, 2,
                       [](std::span<const cplx> p) {
                         cplx eta = p[0];
                         return Point{eta, 1.0 - eta * eta / (eta + 1.0)};
                       },
                       [](std::span<const cplx> p) {
                         cplx eta = p[0], d = eta + 1.0;
                         return std::vector<Vector>{{1.0, -eta * (eta + 2.0) / (d * d)}};
                       }};
  const KForm on_s = pullback(phi(1, AffinePoint({0.0})), compose(eta_chart.lift(), param));
  Rng rng(seed);
  std::vector<cplx> etas{1e-6};
  while (static_cast<int>(etas.size()) < count) {
    cplx eta = rng.in_annulus(0.05, 1.5);
    if (std::abs(eta + 1.0) > 0.1) etas.push_back(eta);
  }
  double worst = 0.0;
  for (cplx eta : etas) {
    cplx got = evaluate(on_s, Point{eta}, std::vector<Vector>{{1.0}});
    cplx want = -(eta + 2.0) / ((eta + 1.0) * (eta + 1.0));
    worst = std::max(worst, relative_difference(got, want));
  }
  CheckReport r = detail::max_relative("extend_B", worst, 1e-10, "Phi|S_B vs -(eta+2)/(eta+1)^2 deta", count);
  return r.param("includes_eta", "1e-06");
}

/// Pullback of Phi_0 to S_C1 n U2, parametrized by (y0, y1, x1), against
/// 3 dy0 ^ dy1 ^ dx1.
inline CheckReport identity_extend_c(std::uint64_t seed, int count = 50) {
  const ChartMap param{3, 4,
                       [](std::span<const cplx> p) {
                         cplx y0 = p[0], y1 = p[1], x1 = p[2];
                         return Point{y0, y1, x1, 2.0 - y0 * y0 * y0 - y1 * y1 * y1 * (x1 - 1.0)};
                       },
                       [](std::span<const cplx> p) {
                         cplx y0 = p[0], y1 = p[1], x1 = p[2];
                         return std::vector<Vector>{{1.0, 0.0, 0.0, -3.0 * y0 * y0},
                                                    {0.0, 1.0, 0.0, -3.0 * y1 * y1 * (x1 - 1.0)},
                                                    {0.0, 0.0, 1.0, -y1 * y1 * y1}};
                       }};
  const KForm on_s = pullback(phi(2, AffinePoint({0.0, 0.0})), compose(u2_chart.lift(), param));
  const std::vector<Vector> frame{unit_vector(3, 0), unit_vector(3, 1), unit_vector(3, 2)};
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    cplx y0 = k == 0 ? cplx{1e-6} : rng.in_annulus(0.05, 1.5);
    Point p{y0, rng.in_box(1.5), rng.in_box(1.5)};
    worst = std::max(worst, relative_difference(evaluate(on_s, p, frame), 3.0));
  }
  CheckReport r = detail::max_relative("extend_C", worst, 1e-10, "Phi|S_C1 vs 3 dy0^dy1^dx1", count);
  return r.param("includes_y0", "1e-06");
}

/// Every sigma / tau form against the surfaces it must vanish on.
inline std::vector<CheckReport> identity_vanishing(std::uint64_t seed, int count = 30) {
  const cplx a{0.7, -0.2};
  const HolomorphicExpr f = parse_expr("exp(x)+x^2", 1);
  struct Case {
    std::string id, form, surface;
    std::vector<cplx> params;
  };
  const std::vector<Case> cases{{"vanish_sigmaA_Q", "sigma_A", "Q", {}},   {"vanish_sigmaA_SA", "sigma_A", "S_A", {a}},
                                {"vanish_sigmaB_Q", "sigma_B", "Q", {}},   {"vanish_sigmaB_SB", "sigma_B", "S_B", {}},
                                {"vanish_tauD_SD", "tau_D", "S_D", {}},    {"vanish_tauE_SE", "tau_E", "S_E", {}}};
  std::vector<CheckReport> out;
  std::uint64_t s = seed;
  for (const auto& c : cases) {
    const SurfaceSpec spec = surface_catalog(c.surface, c.params);
    const VanishingResult v = vanishing_max(casebook_form(c.form, a, f), spec, s++, count);
    const double ratio = v.scale > 0.0 ? v.max_abs / v.scale : v.max_abs;
    CheckReport r = bound_check(c.id, ratio, 1e-9, false, "max |form on tangent frames| / scale < bound");
    r.param("max_abs", v.max_abs).param("scale", v.scale).param("points", std::to_string(count));
    out.push_back(std::move(r));
  }
  return out;
}

/// Runs the named identity groups (all when `ids` is empty).
inline std::vector<CheckReport> identity_suite(const std::vector<std::string>& ids, std::uint64_t seed) {
  for (const auto& id : ids)
    if (std::find(identity_ids().begin(), identity_ids().end(), id) == identity_ids().end())
      throw InputError("identity_suite: unknown identity '" + id + "'");
  auto wanted = [&](const std::string& id) { return ids.empty() || std::find(ids.begin(), ids.end(), id) != ids.end(); };
  std::vector<CheckReport> out;
  auto add = [&](auto&& make) { out.push_back(timed(make)); };
  if (wanted("dPhi_nPsi")) {
    add([&] { return identity_dphi(1, seed + 1); });
    add([&] { return identity_dphi(2, seed + 2); });
  }
  if (wanted("scale")) {
    add([&] { return identity_scale("phi", 2, seed + 3); });
    add([&] { return identity_scale("psi", 2, seed + 4); });
  }
  if (wanted("chart_phi")) {
    add([&] { return identity_chart_phi(2, seed + 5); });
    add([&] { return identity_chart_phi(3, seed + 6); });
  }
  if (wanted("exact_A")) add([&] { return identity_exact_a({0.7, -0.2}, parse_expr("exp(x)+x^2", 1), seed + 7); });
  if (wanted("exact_D")) {
    add([&] { return identity_exact_tau('D', seed + 8); });
    add([&] { return identity_exact_tau('E', seed + 9); });
  }
  if (wanted("extend_B")) add([&] { return identity_extend_b(seed + 10); });
  if (wanted("extend_C")) add([&] { return identity_extend_c(seed + 11); });
  if (wanted("vanish_all")) {
    auto t0 = std::chrono::steady_clock::now();
    auto v = identity_vanishing(seed + 12);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    for (auto& r : v) {
      r.runtime_ms = ms / static_cast<double>(v.size());
      out.push_back(std::move(r));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Example C, second surface: P n S is a fibration over P^1

namespace detail {

// s restricted to P (xi_0 = 0).
inline cplx c2_on_p(cplx xi1, cplx xi2, cplx x1, cplx x2) {
  return xi1 * xi1 * xi1 * (x1 - 1.0) + xi2 * xi2 * xi2 * (x2 - 2.0) + 2.0 * xi1 * xi1 * xi2;
}

}  // namespace detail

/// (i) surjectivity witnesses lie on P n S, (ii) the two trivializations
/// invert each other, (iii) no fibre of P lies in S.
inline CheckReport fibration_check_c2(std::uint64_t seed, int count) {
  if (count < 1) throw InputError("fibration check: count must be at least 1");
  Rng rng(seed);
  double witness_max = 0.0, roundtrip_max = 0.0;
  for (int k = 0; k < count; ++k) {
    const cplx xi1 = rng.in_annulus(0.5, 1.5), xi2 = rng.in_annulus(0.5, 1.5);
    const cplx c = xi1 * xi1 * xi1 + 2.0 * xi2 * xi2 * xi2 - 2.0 * xi1 * xi1 * xi2;
    // Witness over xi1 != 0: x2 = 0; over xi2 != 0: x1 = 0.
    witness_max = std::max(witness_max, std::abs(detail::c2_on_p(xi1, xi2, c / (xi1 * xi1 * xi1), 0.0)));
    witness_max = std::max(witness_max, std::abs(detail::c2_on_p(xi1, xi2, 0.0, c / (xi2 * xi2 * xi2))));

    // Over xi1 != 0 the section is x1(xi, x2); over xi2 != 0 it is x2(xi, x1).
    auto x1_of = [&](cplx x2) { return 1.0 - (xi2 * xi2 * xi2 * (x2 - 2.0) + 2.0 * xi1 * xi1 * xi2) / (xi1 * xi1 * xi1); };
    auto x2_of = [&](cplx x1) { return 2.0 - (xi1 * xi1 * xi1 * (x1 - 1.0) + 2.0 * xi1 * xi1 * xi2) / (xi2 * xi2 * xi2); };
    const cplx x1 = rng.in_box(1.5), x2 = rng.in_box(1.5);
    roundtrip_max = std::max(roundtrip_max, relative_difference(x1_of(x2_of(x1)), x1));
    roundtrip_max = std::max(roundtrip_max, relative_difference(x2_of(x1_of(x2)), x2));
  }

  // For each base point some xi in {[1:0], [0:1], [1:1]} gives s != 0.
  const std::vector<std::pair<cplx, cplx>> candidates{{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
  std::vector<std::pair<cplx, cplx>> bases{{1.0, 2.0}};
  while (bases.size() < 21) bases.emplace_back(rng.in_box(3.0), rng.in_box(3.0));
  int separated = 0;
  for (auto [x1, x2] : bases) {
    double best = 0.0;
    for (auto [a, b] : candidates) best = std::max(best, std::abs(detail::c2_on_p(a, b, x1, x2)));
    if (best > 1e-3) ++separated;
  }

  const bool ok_witness = witness_max < 1e-10, ok_roundtrip = roundtrip_max < 1e-12,
             ok_fibre = separated == static_cast<int>(bases.size());
  const int passed = int(ok_witness) + int(ok_roundtrip) + int(ok_fibre);
  CheckReport r = value_check("fibration_C2", static_cast<double>(passed), 3.0, 0.0);
  r.param("predicate", "all three sub-checks pass")
      .param("witness_max", witness_max)
      .param("roundtrip_max", roundtrip_max)
      .param("nofibre_bases", std::to_string(separated) + "/" + std::to_string(bases.size()))
      .param("count", std::to_string(count));
  return r;
}

// ---------------------------------------------------------------------------
// Transversality

namespace detail {

inline CheckReport margin_at_points(std::string id, std::span<const SurfaceSpec> specs,
                                    const std::vector<Point>& points) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& p : points) worst = std::min(worst, transversality_margin(specs, p));
  CheckReport r = bound_check(std::move(id), worst, 1e-6, true, "min smallest singular value > bound");
  std::string names;
  for (const auto& s : specs) names += (names.empty() ? "" : ",") + s.name;
  r.param("surfaces", names).param("points", std::to_string(points.size()));
  return r;
}

}  // namespace detail

inline std::vector<CheckReport> transversality_suite(std::uint64_t seed, int count = 10) {
  std::vector<CheckReport> out;
  auto add = [&](auto&& make) { out.push_back(timed(make)); };

  // Example B on (eta, x), z = 0: the pairwise intersections are points.
  {
    const SurfaceSpec p = surface_catalog("P", {0.0}), q = surface_catalog("Q"), s = surface_catalog("S_B");
    add([&] { return detail::margin_at_points("transversality_B_PQ", std::vector{p, q}, {{0.0, 0.0}}); });
    add([&] { return detail::margin_at_points("transversality_B_PS", std::vector{p, s}, {{0.0, 1.0}}); });
    add([&] { return detail::margin_at_points("transversality_B_QS", std::vector{q, s}, {{-0.5, 0.5}}); });
  }

  // Examples C-E on U2, z = 0. Newton solves for y0 (P), x2 (Q) and x1 or x2 (S).
  const SurfaceSpec p = surface_catalog("P", {0.0, 0.0}), q = surface_catalog("Q", {}, u2_chart);
  std::uint64_t s_seed = seed;
  for (const std::string name : {"S_C1", "S_C2", "S_D", "S_E"}) {
    const SurfaceSpec s = surface_catalog(name);
    const bool is_c = name.rfind("S_C", 0) == 0;
    const std::string tag = "transversality_" + name.substr(2);
    struct Combo {
      std::string suffix;
      std::vector<SurfaceSpec> specs;
      std::vector<int> solve;
    };
    const std::vector<Combo> combos{
        {"_PQ", {p, q}, {0, 3}},
        {"_PS", {p, s}, {0, is_c ? 3 : 2}},
        {"_QS", {q, s}, is_c ? std::vector<int>{0, 3} : std::vector<int>{3, 2}},
        {"_PQS", {p, q, s}, {0, 3, 2}},
    };
    for (const auto& c : combos) {
      if (c.suffix == "_PQ" && name != "S_C1") continue;  // the same for every example
      const std::uint64_t sd = s_seed++;
      add([&] {
        auto pts = sample_intersection(c.specs, c.solve, sd, count);
        return detail::margin_at_points(c.suffix == "_PQ" ? "transversality_PQ" : tag + c.suffix, c.specs, pts);
      });
    }
  }

  // Example D over (x1, x2) = (1, 0): on the chart xi_1 = 1 at (w0, w2, x1, x2) = (0, 0, 1, 0).
  add([&] {
    const SurfaceSpec p1 = surface_catalog("P", {0.0, 0.0}, u1_chart), s1 = surface_catalog("S_D", {}, u1_chart);
    const std::vector specs{p1, s1};
    const double m = transversality_margin(specs, Point{0.0, 0.0, 1.0, 0.0});
    CheckReport r = bound_check("transversality_D_degenerate", m, 1e-6, false,
                                "smallest singular value < bound (P, S_D not in general position)");
    r.param("surfaces", "P,S_D").param("point", "w0=0,w2=0,x1=1,x2=0");
    return r;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Full report

struct RunConfig {
  std::uint64_t seed = 20240917;
  int workers = 1;
  std::vector<std::string> exclude;  // group names or check-id prefixes
  std::vector<std::string> only;     // when non-empty, keep only these groups / prefixes
  std::map<std::string, double> tolerances;
  std::map<std::string, std::vector<int>> quad_sizes;
  std::string format = "json";
  std::string out_path;  // empty: stdout
};

/// Tolerance and quadrature keys accepted by RunConfig, with their defaults.
inline std::map<std::string, double> default_tolerances() {
  return {{"first_n1", 1e-10}, {"first_n2_const", 1e-8}, {"first_n2", 1e-6}, {"second", 1e-10},
          {"third", 1e-10},    {"necessary", 1e-8},      {"invariance", 1e-8}};
}

inline std::map<std::string, std::vector<int>> default_quad_sizes() {
  return {{"first_n1", {128}}, {"first_n2", {32, 64, 64}}, {"second", {64}}, {"third", {16}}, {"necessary", {128, 128}}};
}

inline const std::vector<std::string>& report_groups() {
  static const std::vector<std::string> g{"first",        "second",       "third_A",         "third_B",
                                          "necessary_D",  "necessary_E",  "fibration_C2",    "identities",
                                          "transversality"};
  return g;
}

/// Checks the config before any computation; throws InputError.
inline void validate(RunConfig& cfg) {
  if (cfg.workers < 1) throw InputError("config: workers must be at least 1");
  for (const auto& [k, v] : cfg.tolerances) {
    auto defaults = default_tolerances();
    if (!defaults.count(k)) throw InputError("config: unknown tolerance key '" + k + "'");
    if (!(v > 0.0)) throw InputError("config: tolerance '" + k + "' must be positive");
  }
  for (const auto& [k, v] : cfg.quad_sizes) {
    auto defaults = default_quad_sizes();
    if (!defaults.count(k)) throw InputError("config: unknown quadrature key '" + k + "'");
    if (v.size() != defaults[k].size()) throw InputError("config: quadrature '" + k + "' has the wrong number of sizes");
    for (int n : v)
      if (n < 4) throw InputError("config: quadrature sizes must be at least 4");
  }
  if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "table")
    throw InputError("config: format must be json, csv or table");
}

inline std::vector<CheckReport> full_report(RunConfig cfg) {
  validate(cfg);
  auto tol = default_tolerances();
  for (const auto& [k, v] : cfg.tolerances) tol[k] = v;
  auto quad = default_quad_sizes();
  for (const auto& [k, v] : cfg.quad_sizes) quad[k] = v;

  auto matches = [](const std::vector<std::string>& tokens, const std::string& name) {
    for (const auto& t : tokens)
      if (name.rfind(t, 0) == 0) return true;
    return false;
  };
  // A group runs unless excluded; with `only`, it runs when a token names it
  // or one of its checks.
  auto group_on = [&](const std::string& g) {
    if (matches(cfg.exclude, g)) return false;
    if (cfg.only.empty() || matches(cfg.only, g)) return true;
    return g != "identities" && g != "transversality" &&
           std::any_of(cfg.only.begin(), cfg.only.end(), [&](const std::string& t) { return t.rfind(g, 0) == 0; });
  };
  auto keep = [&](const std::string& g, const std::string& id) {
    if (matches(cfg.exclude, id)) return false;
    return cfg.only.empty() || matches(cfg.only, g) || matches(cfg.only, id);
  };

  const int w = cfg.workers;
  std::vector<CheckReport> out;
  std::string group;
  auto add = [&](auto&& make) {
    CheckReport r = timed(make);
    if (keep(group, r.id)) out.push_back(std::move(r));
  };
  auto enter = [&](const std::string& g) {
    group = g;
    return group_on(g);
  };

  if (enter("first")) {
    add([&] {
      auto r = first_formula(1, parse_expr("exp(x)+x^2", 1), AffinePoint(Point{cplx{0.3, 0.1}}), 0.7,
                             QuadratureSpec{quad["first_n1"]}, tol["first_n1"], w);
      r.id = "first_n1_cauchy";
      return r;
    });
    add([&] {
      auto r = first_formula(2, parse_expr("1", 2), AffinePoint({0.2, -0.1}), 0.5, QuadratureSpec{quad["first_n2"]},
                             tol["first_n2_const"], w);
      r.id = "first_n2_const";
      return r;
    });
    add([&] {
      auto r = first_formula(2, parse_expr("x1^2*x2+3", 2), AffinePoint({0.2, -0.1}), 0.5,
                             QuadratureSpec{quad["first_n2"]}, tol["first_n2"], w);
      r.id = "first_n2_poly";
      return r;
    });
  }
  if (enter("second"))
    add([&] { return second_formula_n1(parse_expr("exp(x)", 1), 0.3, 0.4, quad["second"][0], tol["second"]); });
  if (enter("third_A")) {
    const std::vector<std::pair<cplx, std::string>> cases{{0.0, "exp(x)"}, {2.0, "x+1"}, {1.0, "1"}};
    for (const auto& [a, f] : cases) {
      add([&] {
        auto r = third_formula_case('A', a, parse_expr(f, 1), quad["third"][0], tol["third"]);
        r.id = "third_A_a" + std::to_string(static_cast<int>(a.real()));
        return r;
      });
    }
    add([&] {
      // a = 1, f = 1: the closed form holds but the third formula does not.
      auto base = third_formula_case('A', 1.0, parse_expr("1", 1), quad["third"][0], tol["third"]);
      CheckReport r = bound_check("third_A_a1_formula_fails", std::abs(base.computed - 1.0), tol["third"], true,
                                  "|computed - f(0)| > tol (third formula fails)");
      r.computed = base.computed;
      r.expected = 1.0;
      r.param("a", "1").param("f", "1");
      return r;
    });
  }
  if (enter("third_B"))
    add([&] {
      auto r = third_formula_case('B', 0.0, parse_expr("exp(x)", 1), quad["third"][0], tol["third"]);
      r.id = "third_B_exp";
      return r;
    });
  if (enter("necessary_D")) {
    add([&] { return necessary_condition_case('D', {0.5}, QuadratureSpec{quad["necessary"]}, tol["necessary"], w); });
    add([&] {
      const QuadratureSpec qs{quad["necessary"]};
      const cplx lo = integrate(casebook_form("theta_D"), make_torus_d(0.3), qs, w);
      const cplx hi = integrate(casebook_form("theta_D"), make_torus_d(0.7), qs, w);
      CheckReport r = value_check("necessary_D_invariance", lo, hi, tol["invariance"], qs.nodes);
      r.param("eps_computed", "0.3").param("eps_expected", "0.7");
      return r;
    });
  }
  if (enter("necessary_E"))
    add([&] {
      return necessary_condition_case('E', {0.5, 0.5}, QuadratureSpec{quad["necessary"]}, tol["necessary"], w);
    });
  if (enter("fibration_C2")) add([&] { return fibration_check_c2(cfg.seed + 100, 50); });
  if (enter("identities"))
    for (auto& r : identity_suite({}, cfg.seed + 200))
      if (keep(group, r.id)) out.push_back(std::move(r));
  if (enter("transversality"))
    for (auto& r : transversality_suite(cfg.seed + 300))
      if (keep(group, r.id)) out.push_back(std::move(r));

  return out;
}

}  // namespace leray
