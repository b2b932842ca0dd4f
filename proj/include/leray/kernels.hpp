#pragma once

// The Cauchy-Fantappie kernels and the explicit forms of the worked examples.
//
// Ambient coordinates for the kernels are (xi_0..xi_n, x_1..x_n) in
// C^{n+1} x C^n. The kernels are evaluated on unnormalised homogeneous
// coordinates; they are invariant under xi -> lambda xi (with tangent
// xi-components scaled alike), which is what makes them well defined on P^n.

#include <string_view>

#include "leray/expr.hpp"
#include "leray/forms.hpp"
#include "leray/geometry.hpp"
#include "leray/linalg.hpp"

namespace leray {

namespace detail {

inline void require_dimension(int n) {
  if (n < 1) throw InputError("kernel dimension n must be at least 1");
}

inline cplx pairing_power(std::span<const cplx> pt, const Point& z, int n, int power) {
  cplx d = dual_pairing(pt.subspan(0, n + 1), z);
  if (d == cplx{}) throw PoleError("xi . z = 0 at point " + to_string(pt));
  return std::pow(d, power);
}

inline cplx eval_on_x(const HolomorphicExpr& f, std::span<const cplx> x) {
  return f.arity() == 0 ? f(x) : eval_expr(f, x);
}

inline void check_f(const HolomorphicExpr& f, int n) {
  if (f.arity() != 0 && f.arity() != n)
    throw InputError("f is a function of " + std::to_string(f.arity()) + " variables, kernel has n = " +
                     std::to_string(n));
}

}  // namespace detail

/// omega(x) = dx_1 ^ ... ^ dx_n,
/// omega'(xi) = sum_{k>=1} (-1)^{k-1} xi_k dxi_1 ^ .. ^dxi_k^ .. ^ dxi_n,
/// omega*(xi) = sum_{k>=0} (-1)^k xi_k dxi_0 ^ .. ^dxi_k^ .. ^ dxi_n,
/// each written out term by term on C^{n+1} x C^n.
inline KForm kernel_basis_form(std::string_view kind, int n) {
  detail::require_dimension(n);
  const int dim = 2 * n + 1;
  if (kind == "omega") {
    std::vector<int> idx;
    for (int k = 1; k <= n; ++k) idx.push_back(n + k);
    return coordinate_form(dim, idx);
  }
  if (kind == "omega_prime" || kind == "omega_star") {
    const int first = kind == "omega_prime" ? 1 : 0;
    std::vector<KForm> terms;
    for (int k = first; k <= n; ++k) {
      std::vector<int> idx;
      for (int j = first; j <= n; ++j)
        if (j != k) idx.push_back(j);
      const double sign = ((k - first) % 2) ? -1.0 : 1.0;
      terms.push_back(multiply([k, sign](std::span<const cplx> p) { return sign * p[k]; }, coordinate_form(dim, idx)));
    }
    KForm acc = terms[0];
    for (std::size_t t = 1; t < terms.size(); ++t) acc = acc + terms[t];
    return acc;
  }
  throw InputError("kernel_basis_form: unknown kind '" + std::string(kind) + "'");
}

/// f Phi_z = f(x) omega'(xi) ^ omega(x) / (xi . z)^n, a (2n-1)-form.
/// omega' ^ omega is the contraction of the Euler field sum xi_k d/dxi_k
/// (k >= 1) into dxi_1 ^ .. ^ dxi_n ^ dx_1 ^ .. ^ dx_n, i.e. one determinant.
inline KForm phi(int n, const AffinePoint& z, const HolomorphicExpr& f = HolomorphicExpr::constant(1.0)) {
  detail::require_dimension(n);
  if (static_cast<int>(z.dim()) != n) throw InputError("phi: base point dimension differs from n");
  detail::check_f(f, n);
  const Point zc = z.coords;
  return KForm(2 * n - 1, 2 * n + 1, [n, zc, f](std::span<const cplx> p, std::span<const Vector> vs) {
    std::vector<Vector> cols(2 * n, Vector(2 * n));
    for (int r = 0; r < n; ++r) cols[0][r] = p[1 + r];
    for (int r = n; r < 2 * n; ++r) cols[0][r] = 0.0;
    for (int j = 0; j < 2 * n - 1; ++j)
      for (int r = 0; r < 2 * n; ++r) cols[j + 1][r] = vs[j][1 + r];
    cplx den = detail::pairing_power(p, zc, n, n);
    return detail::eval_on_x(f, p.subspan(n + 1)) * linalg::det_columns(cols) / den;
  });
}

/// f Psi_z = f(x) omega*(xi) ^ omega(x) / (xi . z)^{n+1}, a 2n-form.
inline KForm psi(int n, const AffinePoint& z, const HolomorphicExpr& f = HolomorphicExpr::constant(1.0)) {
  detail::require_dimension(n);
  if (static_cast<int>(z.dim()) != n) throw InputError("psi: base point dimension differs from n");
  detail::check_f(f, n);
  const Point zc = z.coords;
  return KForm(2 * n, 2 * n + 1, [n, zc, f](std::span<const cplx> p, std::span<const Vector> vs) {
    const int m = 2 * n + 1;
    std::vector<Vector> cols(m, Vector(m));
    for (int r = 0; r <= n; ++r) cols[0][r] = p[r];
    for (int r = n + 1; r < m; ++r) cols[0][r] = 0.0;
    for (int j = 0; j < 2 * n; ++j)
      for (int r = 0; r < m; ++r) cols[j + 1][r] = vs[j][r];
    cplx den = detail::pairing_power(p, zc, n, n + 1);
    return detail::eval_on_x(f, p.subspan(n + 1)) * linalg::det_columns(cols) / den;
  });
}

/// Relative gap between Phi_0 on the chart xi_0 = 1, coordinates
/// (y_1..y_n, x_1..x_n), and y_1^n d(y_2/y_1) ^ .. ^ d(y_n/y_1) ^ omega(x).
inline double phi_chart_identity_gap(int n, std::span<const cplx> point, std::span<const Vector> vectors) {
  if (n < 2) throw InputError("phi_chart_identity_gap: n must be at least 2");
  const int dim = 2 * n;
  if (static_cast<int>(point.size()) != dim) throw InputError("phi_chart_identity_gap: point dimension");
  if (point[0] == cplx{}) throw InputError("phi_chart_identity_gap: y_1 = 0 is outside the chart formula");

  const KForm lhs = pullback(phi(n, AffinePoint(Point(n, 0.0))), Chart{n, 0}.lift());

  KForm rhs = function_form(dim, [n](std::span<const cplx> p) { return std::pow(p[0], n); });
  for (int j = 1; j < n; ++j) {
    // d(y_{j+1} / y_1) = dy_{j+1} / y_1 - y_{j+1} dy_1 / y_1^2
    rhs = wedge(rhs, one_form(dim, [j, dim](std::span<const cplx> p) {
                  Vector c(dim, cplx{});
                  c[0] = -p[j] / (p[0] * p[0]);
                  c[j] = 1.0 / p[0];
                  return c;
                }));
  }
  std::vector<int> xs;
  for (int k = 0; k < n; ++k) xs.push_back(n + k);
  rhs = wedge(rhs, coordinate_form(dim, xs));

  cplx a = evaluate(lhs, point, vectors), b = evaluate(rhs, point, vectors);
  if (a == cplx{} && b == cplx{}) return 0.0;
  return relative_difference(a, b);
}

// ---------------------------------------------------------------------------
// Forms from the worked examples

struct KernelCatalogEntry {
  std::string id;
  std::string chart;  // coordinates the form is written in
  KForm form;
};

namespace detail {

inline cplx inverse(cplx v, const char* what) {
  if (v == cplx{}) throw PoleError(std::string(what) + " vanishes");
  return 1.0 / v;
}

}  // namespace detail

/// The explicit forms of the examples, in the coordinates each example uses:
///   sigma_A, sigma_B                (eta, x)
///   residue_A, residue_B            x on C
///   tau_D, tau_E, theta_D           (y0, y1, x1, x2) on xi_2 = 1
///   integrand_E                     (u, v)
/// `a` is used by sigma_A / residue_A; `f` multiplies the n = 1 forms (the
/// n = 2 forms are the f = 1 forms of the examples).
inline KernelCatalogEntry casebook_entry(const std::string& id, cplx a = 0.0,
                                         const HolomorphicExpr& f = HolomorphicExpr::constant(1.0)) {
  if (f.arity() > 1) throw InputError("casebook_form: f must be a function of one variable");
  const HolomorphicExpr df = differentiate(f, 0);

  if (id == "sigma_A") {
    // f [ (a eta + x - 1)/eta (deta + dx) - (eta + x)/eta (a deta + dx) ]
    return {id, "eta,x", one_form(2, [a, f](std::span<const cplx> p) {
              cplx inv = detail::inverse(p[0], "eta");
              cplx s = (a * p[0] + p[1] - 1.0) * inv, q = (p[0] + p[1]) * inv, fx = f(p[1]);
              return Vector{fx * (s - a * q), fx * (s - q)};
            })};
  }
  if (id == "sigma_B") {
    // f/eta (s dq - q ds), s = eta^2 + (eta + 1)(x - 1), q = eta + x
    return {id, "eta,x", one_form(2, [f](std::span<const cplx> p) {
              cplx eta = p[0], x = p[1];
              cplx c = f(x) * detail::inverse(eta, "eta");
              cplx s = eta * eta + (eta + 1.0) * (x - 1.0), q = eta + x;
              cplx ds_eta = 2.0 * eta + x - 1.0, ds_x = eta + 1.0;
              return Vector{c * (s - q * ds_eta), c * (s - q * ds_x)};
            })};
  }
  if (id == "residue_A") {
    // d( f(x) ((a - 1) x + 1) )
    return {id, "x", one_form(1, [a, f, df](std::span<const cplx> p) {
              cplx x = p[0];
              return Vector{df(x) * ((a - 1.0) * x + 1.0) + f(x) * (a - 1.0)};
            })};
  }
  if (id == "residue_B") {
    // d( f(x) (x - 1)^2 )
    return {id, "x", one_form(1, [f, df](std::span<const cplx> p) {
              cplx x = p[0];
              return Vector{df(x) * (x - 1.0) * (x - 1.0) + 2.0 * f(x) * (x - 1.0)};
            })};
  }
  if (id == "theta_D") {
    return {id, "y0,y1,x1,x2",
            multiply([](std::span<const cplx> p) { return 1.0 - p[2]; }, coordinate_form(4, {1, 3}))};
  }
  if (id == "integrand_E") {
    return {id, "u,v", multiply(
                           [](std::span<const cplx> p) {
                             cplx u = p[0], v = p[1], w = v - u;
                             return (w * w * w + 1.0) * detail::inverse(u * v, "u v");
                           },
                           coordinate_form(2, {0, 1}))};
  }
  if (id == "tau_D" || id == "tau_E") {
    const bool is_d = id == "tau_D";
    const SurfaceSpec s = surface_catalog(is_d ? "S_D" : "S_E");
    auto inv_y0_sq = [](std::span<const cplx> p) {
      cplx r = detail::inverse(p[0], "y0");
      return r * r;
    };
    KForm lead = multiply([s, inv_y0_sq](std::span<const cplx> p) { return s.value(p) * inv_y0_sq(p); },
                          coordinate_form(4, {1, 2, 3}));
    KForm ds = one_form(4, s.gradient);
    KForm bracket = [&]() {
      if (is_d) {
        // ((x1 - 1) dy1 ^ dx2 - x2 dy1 ^ dx1) / (2 y0^2)
        return multiply([inv_y0_sq](std::span<const cplx> p) { return (p[2] - 1.0) * inv_y0_sq(p) / 2.0; },
                        coordinate_form(4, {1, 3})) -
               multiply([inv_y0_sq](std::span<const cplx> p) { return p[3] * inv_y0_sq(p) / 2.0; },
                        coordinate_form(4, {1, 2}));
      }
      // -(y1 dx1 ^ dx2 - (x1 - 1) dy1 ^ dx2 + x2 dy1 ^ dx1) / (3 y0^2)
      KForm b = multiply([inv_y0_sq](std::span<const cplx> p) { return p[1] * inv_y0_sq(p) / 3.0; },
                         coordinate_form(4, {2, 3})) -
                multiply([inv_y0_sq](std::span<const cplx> p) { return (p[2] - 1.0) * inv_y0_sq(p) / 3.0; },
                         coordinate_form(4, {1, 3})) +
                multiply([inv_y0_sq](std::span<const cplx> p) { return p[3] * inv_y0_sq(p) / 3.0; },
                         coordinate_form(4, {1, 2}));
      return (-1.0) * b;
    }();
    return {id, "y0,y1,x1,x2", lead + wedge(bracket, ds)};
  }
  throw InputError("casebook_form: unknown form '" + id + "'");
}

inline KForm casebook_form(const std::string& id, cplx a = 0.0,
                           const HolomorphicExpr& f = HolomorphicExpr::constant(1.0)) {
  return casebook_entry(id, a, f).form;
}

// ---------------------------------------------------------------------------

struct VanishingResult {
  double max_abs;  // largest |form| on tangent frames of the surface
  double scale;    // largest coordinate norm of the form at the same points
};

/// Evaluates `form` on every k-subset of an orthonormal tangent basis at
/// seeded points of the surface.
inline VanishingResult vanishing_max(const KForm& form, const SurfaceSpec& spec, std::uint64_t seed, int count) {
  const int m = spec.chart.dim();
  if (form.dim() != m) throw InputError("vanishing_max: form on C^" + std::to_string(form.dim()) + " but surface " + spec.name + " in " + spec.chart.name());
  if (form.degree() > m - 1) throw InputError("vanishing_max: form degree exceeds the surface dimension");
  VanishingResult out{0.0, 0.0};
  const int k = form.degree();
  for (const auto& p : sample_on_surface(spec, seed, count)) {
    auto basis = linalg::null_space_of_row(spec.gradient(p));
    std::vector<Vector> vs(k);
    detail::for_each_shuffle(k, m - 1 - k, [&](const std::vector<int>& sel, double) {
      for (int j = 0; j < k; ++j) vs[j] = basis[sel[j]];
      out.max_abs = std::max(out.max_abs, std::abs(form.raw(p, vs)));
    });
    out.scale = std::max(out.scale, coordinate_norm(form, p));
  }
  return out;
}

}  // namespace leray
