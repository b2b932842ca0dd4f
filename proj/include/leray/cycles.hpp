#pragma once

// Parametrized cycles, their orientation, and tensor-product quadrature of
// pulled-back forms.

#include <exception>
#include <limits>
#include <tuple>
#include <optional>
#include <thread>

#include "leray/forms.hpp"
#include "leray/geometry.hpp"
#include "leray/linalg.hpp"
#include "leray/quadrature.hpp"

namespace leray {

struct ParamFactor {
  enum class Kind { Circle, Interval };
  Kind kind;
  double a = 0.0;
  double b = 2.0 * pi;

  static ParamFactor circle() { return {Kind::Circle, 0.0, 2.0 * pi}; }
  static ParamFactor interval(double lo, double hi) {
    if (!(lo < hi)) throw InputError("ParamFactor: interval needs a < b");
    return {Kind::Interval, lo, hi};
  }
};

struct ParamDomain {
  std::vector<ParamFactor> factors;
};

/// Present on cycles that bound a ball: the centre and where the affine
/// coordinates x_1..x_n sit in the ambient point.
struct BoundarySphere {
  Point center;
  int x_offset = 0;
};

struct Cycle {
  std::string kind;
  ParamDomain domain;
  int ambient_dim = 0;
  std::function<Point(std::span<const double>)> map;
  // One ambient vector per parameter factor, in factor order.
  std::function<std::vector<Vector>(std::span<const double>)> tangent;
  int orientation = 1;
  std::optional<BoundarySphere> sphere;

  int dim() const { return static_cast<int>(domain.factors.size()); }
};

struct QuadratureSpec {
  std::vector<int> nodes;  // per factor: trapezoid(N) on circles, Gauss-Legendre(N) on intervals
};

// ---------------------------------------------------------------------------
// Constructors

inline Cycle make_circle(cplx center, double radius) {
  if (!(radius > 0.0)) throw InputError("circle: radius must be positive");
  Cycle c;
  c.kind = "circle";
  c.domain.factors = {ParamFactor::circle()};
  c.ambient_dim = 1;
  c.map = [=](std::span<const double> t) { return Point{center + std::polar(radius, t[0])}; };
  c.tangent = [=](std::span<const double> t) { return std::vector<Vector>{{I * std::polar(radius, t[0])}}; };
  c.sphere = BoundarySphere{{center}, 0};
  return c;
}

/// Straight path from a to b, t in [0, 1].
inline Cycle make_segment(cplx a, cplx b) {
  Cycle c;
  c.kind = "segment";
  c.domain.factors = {ParamFactor::interval(0.0, 1.0)};
  c.ambient_dim = 1;
  c.map = [=](std::span<const double> t) { return Point{a + t[0] * (b - a)}; };
  c.tangent = [=](std::span<const double>) { return std::vector<Vector>{{b - a}}; };
  return c;
}

/// center + radius e^{it}, t from t0 to t1.
inline Cycle make_arc(cplx center, double radius, double t0, double t1) {
  if (!(radius > 0.0)) throw InputError("arc: radius must be positive");
  Cycle c;
  c.kind = "arc";
  bool reversed = t1 < t0;
  c.domain.factors = {ParamFactor::interval(std::min(t0, t1), std::max(t0, t1))};
  c.ambient_dim = 1;
  c.map = [=](std::span<const double> t) { return Point{center + std::polar(radius, t[0])}; };
  c.tangent = [=](std::span<const double> t) { return std::vector<Vector>{{I * std::polar(radius, t[0])}}; };
  c.orientation = reversed ? -1 : 1;
  return c;
}

namespace detail {

// xi(x) = [x . conj(z) - |x|^2, conj(x_1 - z_1), ..., conj(x_n - z_n)] and its
// derivative along dx.
inline void sphere_lift(const Point& z, const Point& x, Point& out) {
  const std::size_t n = z.size();
  cplx xi0 = 0.0;
  for (std::size_t k = 0; k < n; ++k) xi0 += x[k] * std::conj(z[k] - x[k]);
  out[0] = xi0;
  for (std::size_t k = 0; k < n; ++k) {
    out[k + 1] = std::conj(x[k] - z[k]);
    out[n + 1 + k] = x[k];
  }
}

inline Vector sphere_lift_tangent(const Point& z, const Point& x, const Vector& dx) {
  const std::size_t n = z.size();
  Vector v(2 * n + 1);
  cplx d0 = 0.0;
  for (std::size_t k = 0; k < n; ++k) d0 += dx[k] * std::conj(z[k] - x[k]) - x[k] * std::conj(dx[k]);
  v[0] = d0;
  for (std::size_t k = 0; k < n; ++k) {
    v[k + 1] = std::conj(dx[k]);
    v[n + 1 + k] = dx[k];
  }
  return v;
}

}  // namespace detail

/// The cycle M over the sphere |x - z| = eps, lifted into (xi, x) space.
/// n = 1: theta in [0, 2pi).  n = 2: (psi, phi1, phi2) with
/// x1 = z1 + eps cos(psi) e^{i phi1}, x2 = z2 + eps sin(psi) e^{i phi2}.
inline Cycle make_sphere_m(const AffinePoint& z_pt, double eps) {
  if (!(eps > 0.0)) throw InputError("sphere_M: eps must be positive");
  const Point z = z_pt.coords;
  const int n = static_cast<int>(z.size());
  if (n != 1 && n != 2) throw InputError("sphere_M: only n = 1 and n = 2 are supported");
  Cycle c;
  c.kind = "sphere_M";
  c.ambient_dim = 2 * n + 1;
  c.sphere = BoundarySphere{z, n + 1};
  if (n == 1) {
    c.domain.factors = {ParamFactor::circle()};
    c.map = [z, eps](std::span<const double> t) {
      Point x{z[0] + std::polar(eps, t[0])}, out(3);
      detail::sphere_lift(z, x, out);
      return out;
    };
    c.tangent = [z, eps](std::span<const double> t) {
      Point x{z[0] + std::polar(eps, t[0])};
      return std::vector<Vector>{detail::sphere_lift_tangent(z, x, {I * std::polar(eps, t[0])})};
    };
  } else {
    c.domain.factors = {ParamFactor::interval(0.0, pi / 2.0), ParamFactor::circle(), ParamFactor::circle()};
    c.map = [z, eps](std::span<const double> t) {
      Point x{z[0] + eps * std::cos(t[0]) * std::polar(1.0, t[1]), z[1] + eps * std::sin(t[0]) * std::polar(1.0, t[2])};
      Point out(5);
      detail::sphere_lift(z, x, out);
      return out;
    };
    c.tangent = [z, eps](std::span<const double> t) {
      const double cs = std::cos(t[0]), sn = std::sin(t[0]);
      const cplx e1 = std::polar(1.0, t[1]), e2 = std::polar(1.0, t[2]);
      Point x{z[0] + eps * cs * e1, z[1] + eps * sn * e2};
      return std::vector<Vector>{
          detail::sphere_lift_tangent(z, x, {-eps * sn * e1, eps * cs * e2}),
          detail::sphere_lift_tangent(z, x, {I * eps * cs * e1, 0.0}),
          detail::sphere_lift_tangent(z, x, {0.0, I * eps * sn * e2}),
      };
    };
  }
  return c;
}

/// Two-cycle in the Example D intersection S n P, in chart coordinates
/// (y0, y1, x1, x2) with y0 = 0:
///   y1 = eps e^{i theta}, x2 = eps e^{i eta},
///   x1 = 1 - (1 + x2^2) / (x2 y1 (1 + y1)).
inline Cycle make_torus_d(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("torus_D: eps must lie in (0, 1)");
  Cycle c;
  c.kind = "torus_D";
  c.domain.factors = {ParamFactor::circle(), ParamFactor::circle()};
  c.ambient_dim = 4;
  auto parts = [eps](std::span<const double> t) {
    cplx y1 = std::polar(eps, t[0]), x2 = std::polar(eps, t[1]);
    cplx g = (1.0 + x2 * x2) / (x2 * y1 * (1.0 + y1));
    return std::tuple{y1, x2, g};
  };
  c.map = [parts](std::span<const double> t) {
    auto [y1, x2, g] = parts(t);
    return Point{0.0, y1, 1.0 - g, x2};
  };
  c.tangent = [parts](std::span<const double> t) {
    auto [y1, x2, g] = parts(t);
    const cplx dy1 = I * y1, dx2 = I * x2;
    const cplx dg_dy1 = -g * (1.0 + 2.0 * y1) / (y1 * (1.0 + y1));
    const cplx dg_dx2 = (x2 * x2 - 1.0) / (x2 * x2 * y1 * (1.0 + y1));
    return std::vector<Vector>{{0.0, dy1, -dg_dy1 * dy1, 0.0}, {0.0, 0.0, -dg_dx2 * dx2, dx2}};
  };
  return c;
}

/// Product of circles |u - c1| = r1, |v - c2| = r2 in C^2.
inline Cycle make_torus_generic(cplx c1, double r1, cplx c2, double r2) {
  if (!(r1 > 0.0 && r2 > 0.0)) throw InputError("torus: radii must be positive");
  Cycle c;
  c.kind = "torus_generic";
  c.domain.factors = {ParamFactor::circle(), ParamFactor::circle()};
  c.ambient_dim = 2;
  c.map = [=](std::span<const double> t) { return Point{c1 + std::polar(r1, t[0]), c2 + std::polar(r2, t[1])}; };
  c.tangent = [=](std::span<const double> t) {
    return std::vector<Vector>{{I * std::polar(r1, t[0]), 0.0}, {0.0, I * std::polar(r2, t[1])}};
  };
  return c;
}

/// Product of two small circles about the origin in the (u, v) plane.
inline Cycle make_torus_e(double r1, double r2) {
  Cycle c = make_torus_generic(0.0, r1, 0.0, r2);
  c.kind = "torus_E";
  return c;
}

/// The image of `cycle` under a holomorphic map.
inline Cycle compose(const Cycle& cycle, const ChartMap& f) {
  if (cycle.ambient_dim != f.src_dim) throw InputError("compose: map source does not match cycle ambient dimension");
  Cycle c = cycle;
  c.kind = cycle.kind + "*";
  c.ambient_dim = f.dst_dim;
  c.sphere.reset();
  c.map = [cycle, f](std::span<const double> t) { return f.map(cycle.map(t)); };
  c.tangent = [cycle, f](std::span<const double> t) {
    Point p = cycle.map(t);
    auto jac = f.jacobian(p);
    std::vector<Vector> out;
    for (const auto& v : cycle.tangent(t)) out.push_back(push_forward(jac, v));
    return out;
  };
  return c;
}

/// Runs the given factor backwards (t -> a + b - t).
inline Cycle reverse_factor(const Cycle& cycle, int k) {
  if (k < 0 || k >= cycle.dim()) throw InputError("reverse_factor: factor out of range");
  Cycle c = cycle;
  const double a = cycle.domain.factors[k].a, b = cycle.domain.factors[k].b;
  auto flip = [k, a, b](std::span<const double> t) {
    std::vector<double> s(t.begin(), t.end());
    s[k] = a + b - s[k];
    return s;
  };
  c.map = [cycle, flip](std::span<const double> t) { return cycle.map(flip(t)); };
  c.tangent = [cycle, flip, k](std::span<const double> t) {
    auto v = cycle.tangent(flip(t));
    for (auto& comp : v[k]) comp = -comp;
    return v;
  };
  return c;
}

// ---------------------------------------------------------------------------
// Orientation

/// +1 when the cycle (parametrization times its orientation field) carries the
/// outward-normal orientation of the sphere it covers: the sign of
/// det[outward normal | real tangent frame], with C^n identified with R^{2n}
/// as (Re x1, Im x1, ..., Re xn, Im xn).
inline int orientation_sign(const Cycle& cycle) {
  if (!cycle.sphere) throw UnsupportedKindError("orientation_sign: " + cycle.kind + " does not bound a ball");
  const auto& sph = *cycle.sphere;
  const int n = static_cast<int>(sph.center.size());
  std::vector<double> ref;
  for (const auto& f : cycle.domain.factors)
    ref.push_back(f.kind == ParamFactor::Kind::Circle ? 0.3 : f.a + (f.b - f.a) * 0.37);
  Point p = cycle.map(ref);
  auto frame = cycle.tangent(ref);
  Eigen::MatrixXd m(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    cplx r = p[sph.x_offset + k] - sph.center[k];
    m(2 * k, 0) = r.real();
    m(2 * k + 1, 0) = r.imag();
    for (int j = 0; j < static_cast<int>(frame.size()); ++j) {
      cplx v = frame[j][sph.x_offset + k];
      m(2 * k, j + 1) = v.real();
      m(2 * k + 1, j + 1) = v.imag();
    }
  }
  double d = m.determinant();
  if (d == 0.0) throw PreconditionError("orientation_sign: degenerate frame at the reference parameter");
  return (d > 0.0 ? 1 : -1) * cycle.orientation;
}

// ---------------------------------------------------------------------------
// Integration

inline bool in_domain(const ParamDomain& d, std::span<const double> t) {
  if (t.size() != d.factors.size()) return false;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (!(t[k] >= d.factors[k].a && t[k] <= d.factors[k].b)) return false;
  return true;
}

/// orientation * form(map(t); tangent(t)).
inline cplx pullback_integrand(const KForm& form, const Cycle& cycle, std::span<const double> param) {
  if (form.degree() != cycle.dim())
    throw InputError("pullback_integrand: form degree " + std::to_string(form.degree()) + " on a " +
                     std::to_string(cycle.dim()) + "-cycle");
  if (form.dim() != cycle.ambient_dim) throw InputError("pullback_integrand: ambient dimension mismatch");
  if (!in_domain(cycle.domain, param)) throw InputError("pullback_integrand: parameter outside the domain");
  Point p = cycle.map(param);
  auto frame = cycle.tangent(param);
  return static_cast<double>(cycle.orientation) * form.raw(p, frame);
}

/// Tensor-product quadrature of `form` over `cycle`. Grid values may be
/// computed by several workers; the reduction always runs in lexicographic
/// grid order, so the result does not depend on `workers`.
inline cplx integrate(const KForm& form, const Cycle& cycle, const QuadratureSpec& quad, int workers = 1) {
  const int d = cycle.dim();
  if (static_cast<int>(quad.nodes.size()) != d)
    throw InputError("integrate: quadrature has " + std::to_string(quad.nodes.size()) + " factors, cycle has " +
                     std::to_string(d));
  if (form.degree() != d) throw InputError("integrate: form degree does not match cycle dimension");
  if (form.dim() != cycle.ambient_dim) throw InputError("integrate: ambient dimension mismatch");
  std::vector<QuadratureRule> rules;
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) {
    if (quad.nodes[k] < 4) throw InputError("integrate: at least 4 nodes per factor");
    const auto& f = cycle.domain.factors[k];
    rules.push_back(f.kind == ParamFactor::Kind::Circle ? trapezoid(quad.nodes[k])
                                                        : gauss_legendre(quad.nodes[k], f.a, f.b));
    total *= static_cast<std::size_t>(quad.nodes[k]);
  }

  std::vector<cplx> values(total);
  auto unravel = [&](std::size_t idx, std::vector<double>& t, double& w, std::vector<int>& multi) {
    w = 1.0;
    for (int k = d - 1; k >= 0; --k) {
      const auto nk = static_cast<std::size_t>(quad.nodes[k]);
      multi[k] = static_cast<int>(idx % nk);
      idx /= nk;
      t[k] = rules[k].nodes[multi[k]];
      w *= rules[k].weights[multi[k]];
    }
  };

  struct Failure {
    std::size_t index = SIZE_MAX;
    std::exception_ptr error;
  };
  const int nworkers = std::max(1, std::min<int>(workers, static_cast<int>(total)));
  std::vector<Failure> failures(nworkers);

  auto run = [&](int worker) {
    std::vector<double> t(d);
    std::vector<int> multi(d);
    double w = 0.0;
    const std::size_t lo = total * worker / nworkers, hi = total * (worker + 1) / nworkers;
    for (std::size_t idx = lo; idx < hi; ++idx) {
      unravel(idx, t, w, multi);
      try {
        Point p = cycle.map(t);
        auto frame = cycle.tangent(t);
        values[idx] = (w * cycle.orientation) * form.raw(p, frame);
      } catch (const PoleError& e) {
        std::string where = "grid index (";
        for (int k = 0; k < d; ++k) where += (k ? "," : "") + std::to_string(multi[k]);
        where += ") parameter (";
        for (int k = 0; k < d; ++k) where += (k ? "," : "") + std::to_string(t[k]);
        failures[worker] = {idx, std::make_exception_ptr(PoleError(std::string(e.what()) + " [" + where + ")]"))};
        return;
      } catch (...) {
        failures[worker] = {idx, std::current_exception()};
        return;
      }
    }
  };

  if (nworkers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nworkers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }
  for (const auto& f : failures)
    if (f.error) std::rethrow_exception(f.error);  // workers are ordered, so this is the lowest index

  CompensatedSum sum;
  for (const auto& v : values) sum.add(v);
  return sum.value();
}

struct RefineResult {
  cplx value;
  double delta;
  QuadratureSpec quad;
};

/// Doubles every node count until successive results differ by less than tol.
inline RefineResult refine_until(const KForm& form, const Cycle& cycle, QuadratureSpec quad, double tol,
                                 int max_doublings, int workers = 1) {
  if (!(tol > 0.0)) throw InputError("refine_until: tol must be positive");
  cplx prev = integrate(form, cycle, quad, workers);
  double delta = std::numeric_limits<double>::infinity();
  for (int dbl = 0; dbl < max_doublings; ++dbl) {
    for (auto& n : quad.nodes) n *= 2;
    cplx cur = integrate(form, cycle, quad, workers);
    delta = std::abs(cur - prev);
    if (delta < tol) return {cur, delta, quad};
    if (dbl + 1 == max_doublings)
      throw ConvergenceError("refine_until: no convergence after " + std::to_string(max_doublings) +
                                 " doublings (delta " + std::to_string(delta) + ")",
                             cur, prev);
    prev = cur;
  }
  throw ConvergenceError("refine_until: max_doublings must be positive", prev, prev);
}

}  // namespace leray
