#pragma once

// Points of C^n and P^n, affine charts of P^n x C^n, and the defining
// functions of the hyperplane section P_z, the incidence hypersurface Q and
// the example hypersurfaces, each with a hand-differentiated gradient.

#include <algorithm>
#include <optional>
#include <string>

#include "leray/forms.hpp"
#include "leray/linalg.hpp"
#include "leray/types.hpp"

namespace leray {

struct AffinePoint {
  std::vector<cplx> coords;

  explicit AffinePoint(std::vector<cplx> c) : coords(std::move(c)) {
    if (coords.empty()) throw InputError("AffinePoint: dimension must be at least 1");
  }
  std::size_t dim() const { return coords.size(); }
};

struct ProjectivePoint {
  std::vector<cplx> xi;

  explicit ProjectivePoint(std::vector<cplx> h) : xi(std::move(h)) {
    if (xi.size() < 2) throw InputError("ProjectivePoint: need at least two homogeneous coordinates");
    if (std::all_of(xi.begin(), xi.end(), [](cplx c) { return c == cplx{}; }))
      throw InputError("ProjectivePoint: all homogeneous coordinates are zero");
  }
  std::size_t dim() const { return xi.size() - 1; }
};

/// xi . x = xi_0 + xi_1 x_1 + ... + xi_n x_n
inline cplx dual_pairing(std::span<const cplx> xi, std::span<const cplx> x) {
  if (xi.size() != x.size() + 1)
    throw InputError("dual_pairing: " + std::to_string(xi.size()) + " homogeneous coordinates against a point of C^" +
                     std::to_string(x.size()));
  cplx acc = xi[0];
  for (std::size_t k = 0; k < x.size(); ++k) acc += xi[k + 1] * x[k];
  return acc;
}

inline cplx dual_pairing(const ProjectivePoint& xi, const AffinePoint& x) { return dual_pairing(xi.xi, x.coords); }

/// (xi_j / xi_k) for j != k, in index order.
inline std::vector<cplx> affine_chart(const ProjectivePoint& xi, std::size_t k) {
  if (k >= xi.xi.size()) throw InputError("affine_chart: chart index out of range");
  if (xi.xi[k] == cplx{}) throw ChartDomainError("affine_chart: xi_" + std::to_string(k) + " = 0");
  std::vector<cplx> out;
  for (std::size_t j = 0; j < xi.xi.size(); ++j)
    if (j != k) out.push_back(xi.xi[j] / xi.xi[k]);
  return out;
}

// ---------------------------------------------------------------------------
// Charts of P^n x C^n

/// Affine chart {xi_fixed = 1} of P^n times C^n. Chart coordinates are the
/// remaining xi_j in index order followed by x_1..x_n.
struct Chart {
  int n;
  int fixed;

  int dim() const { return 2 * n; }
  std::string name() const { return "U" + std::to_string(fixed) + "(n=" + std::to_string(n) + ")"; }
  friend bool operator==(const Chart&, const Chart&) = default;

  /// Homogeneous coordinates of a chart point.
  Point xi(std::span<const cplx> p) const {
    Point out(n + 1);
    for (int j = 0, r = 0; j <= n; ++j) out[j] = j == fixed ? cplx{1.0} : p[r++];
    return out;
  }

  /// The inclusion of the chart into C^{n+1} x C^n, (xi, x).
  ChartMap lift() const {
    const int src = dim(), dst = 2 * n + 1, fx = fixed;
    auto target_index = [fx](int j) { return j < fx ? j : j + 1; };
    return ChartMap{
        src, dst,
        [src, fx, target_index](std::span<const cplx> p) {
          Point q(src + 1);
          q[fx] = 1.0;
          for (int j = 0; j < src; ++j) q[target_index(j)] = p[j];
          return q;
        },
        [src, dst, target_index](std::span<const cplx>) {
          std::vector<Vector> cols;
          for (int j = 0; j < src; ++j) cols.push_back(unit_vector(dst, target_index(j)));
          return cols;
        }};
  }
};

/// (eta, x) with eta = xi_0 / xi_1, n = 1.
inline constexpr Chart eta_chart{1, 1};
/// (y_0, y_1, x_1, x_2) with y_j = xi_j / xi_2.
inline constexpr Chart u2_chart{2, 2};
/// (w_0, w_2, x_1, x_2) with w_j = xi_j / xi_1.
inline constexpr Chart u1_chart{2, 1};

// ---------------------------------------------------------------------------
// Surfaces

struct SurfaceSpec {
  std::string name;
  std::vector<cplx> params;
  Chart chart;
  std::function<cplx(std::span<const cplx>)> value;
  std::function<Vector(std::span<const cplx>)> gradient;
  // One sampling attempt: draws the free coordinates and solves for the
  // remaining one; nullopt when the draw hits a singularity of the solve.
  std::function<std::optional<Point>(Rng&)> sample_once;
};

namespace detail {

inline cplx free_coordinate(Rng& rng) { return rng.in_annulus(0.25, 1.5); }

inline std::optional<Point> guarded(Point p, cplx denominator, double min_abs) {
  if (std::abs(denominator) < min_abs) return std::nullopt;
  return p;
}

}  // namespace detail

/// Builds the named surface in `chart` (default: the chart the examples use).
///   P    params: z (n values)      Q     no params
///   S_A  params: a                 S_B, S_C1, S_C2, S_D, S_E   no params
inline SurfaceSpec surface_catalog(const std::string& name, std::vector<cplx> params = {},
                                   std::optional<Chart> chart_opt = std::nullopt) {
  using detail::free_coordinate;
  auto need_params = [&](std::size_t k) {
    if (params.size() != k)
      throw InputError("surface_catalog: " + name + " expects " + std::to_string(k) + " parameters");
  };
  auto reject_chart = [&](const Chart& c) {
    throw InputError("surface_catalog: " + name + " is not available in chart " + c.name());
  };

  SurfaceSpec s{name, params, eta_chart, {}, {}, {}};

  if (name == "P") {
    if (params.empty() || params.size() > 2) throw InputError("surface_catalog: P expects the base point z");
    Chart c = chart_opt.value_or(params.size() == 1 ? eta_chart : u2_chart);
    if (c.n != static_cast<int>(params.size())) reject_chart(c);
    s.chart = c;
    const auto z = params;
    if (c == eta_chart) {
      s.value = [z](std::span<const cplx> p) { return p[0] + z[0]; };
      s.gradient = [](std::span<const cplx>) { return Vector{1.0, 0.0}; };
      s.sample_once = [z](Rng& r) -> std::optional<Point> { return Point{-z[0], free_coordinate(r)}; };
    } else if (c == u2_chart) {
      s.value = [z](std::span<const cplx> p) { return p[0] + p[1] * z[0] + z[1]; };
      s.gradient = [z](std::span<const cplx>) { return Vector{1.0, z[0], 0.0, 0.0}; };
      s.sample_once = [z](Rng& r) -> std::optional<Point> {
        cplx y1 = free_coordinate(r), x1 = free_coordinate(r), x2 = free_coordinate(r);
        return Point{-(y1 * z[0] + z[1]), y1, x1, x2};
      };
    } else if (c == u1_chart) {
      s.value = [z](std::span<const cplx> p) { return p[0] + z[0] + p[1] * z[1]; };
      s.gradient = [z](std::span<const cplx>) { return Vector{1.0, z[1], 0.0, 0.0}; };
      s.sample_once = [z](Rng& r) -> std::optional<Point> {
        cplx w2 = free_coordinate(r), x1 = free_coordinate(r), x2 = free_coordinate(r);
        return Point{-(z[0] + w2 * z[1]), w2, x1, x2};
      };
    } else {
      reject_chart(c);
    }
    return s;
  }

  if (name == "Q") {
    need_params(0);
    Chart c = chart_opt.value_or(eta_chart);
    s.chart = c;
    if (c == eta_chart) {
      s.value = [](std::span<const cplx> p) { return p[0] + p[1]; };
      s.gradient = [](std::span<const cplx>) { return Vector{1.0, 1.0}; };
      s.sample_once = [](Rng& r) -> std::optional<Point> {
        cplx eta = free_coordinate(r);
        return Point{eta, -eta};
      };
    } else if (c == u2_chart) {
      s.value = [](std::span<const cplx> p) { return p[0] + p[1] * p[2] + p[3]; };
      s.gradient = [](std::span<const cplx> p) { return Vector{1.0, p[2], p[1], 1.0}; };
      s.sample_once = [](Rng& r) -> std::optional<Point> {
        cplx y0 = free_coordinate(r), y1 = free_coordinate(r), x1 = free_coordinate(r);
        return Point{y0, y1, x1, -y0 - y1 * x1};
      };
    } else if (c == u1_chart) {
      s.value = [](std::span<const cplx> p) { return p[0] + p[2] + p[1] * p[3]; };
      s.gradient = [](std::span<const cplx> p) { return Vector{1.0, p[3], 1.0, p[1]}; };
      s.sample_once = [](Rng& r) -> std::optional<Point> {
        cplx w0 = free_coordinate(r), w2 = free_coordinate(r), x2 = free_coordinate(r);
        return Point{w0, w2, -w0 - w2 * x2, x2};
      };
    } else {
      reject_chart(c);
    }
    return s;
  }

  if (name == "S_A") {
    need_params(1);
    Chart c = chart_opt.value_or(eta_chart);
    if (!(c == eta_chart)) reject_chart(c);
    const cplx a = params[0];
    s.value = [a](std::span<const cplx> p) { return a * p[0] + p[1] - 1.0; };
    s.gradient = [a](std::span<const cplx>) { return Vector{a, 1.0}; };
    s.sample_once = [a](Rng& r) -> std::optional<Point> {
      cplx eta = free_coordinate(r);
      return Point{eta, 1.0 - a * eta};
    };
    return s;
  }

  if (name == "S_B") {
    need_params(0);
    Chart c = chart_opt.value_or(eta_chart);
    if (!(c == eta_chart)) reject_chart(c);
    // eta^2 + (eta + 1)(x - 1)
    s.value = [](std::span<const cplx> p) { return p[0] * p[0] + (p[0] + 1.0) * (p[1] - 1.0); };
    s.gradient = [](std::span<const cplx> p) { return Vector{2.0 * p[0] + p[1] - 1.0, p[0] + 1.0}; };
    s.sample_once = [](Rng& r) -> std::optional<Point> {
      cplx eta = free_coordinate(r);
      return detail::guarded(Point{eta, 1.0 - eta * eta / (eta + 1.0)}, eta + 1.0, 0.1);
    };
    return s;
  }

  if (name == "S_C1" || name == "S_C2") {
    need_params(0);
    Chart c = chart_opt.value_or(u2_chart);
    if (!(c == u2_chart)) reject_chart(c);
    s.chart = c;
    const double twist = name == "S_C2" ? 2.0 : 0.0;
    // y0^3 + y1^3 (x1 - 1) + (x2 - 2) [+ 2 y1^2]
    s.value = [twist](std::span<const cplx> p) {
      return p[0] * p[0] * p[0] + p[1] * p[1] * p[1] * (p[2] - 1.0) + (p[3] - 2.0) + twist * p[1] * p[1];
    };
    s.gradient = [twist](std::span<const cplx> p) {
      return Vector{3.0 * p[0] * p[0], 3.0 * p[1] * p[1] * (p[2] - 1.0) + 2.0 * twist * p[1], p[1] * p[1] * p[1],
                    1.0};
    };
    s.sample_once = [twist](Rng& r) -> std::optional<Point> {
      cplx y0 = free_coordinate(r), y1 = free_coordinate(r), x1 = free_coordinate(r);
      return Point{y0, y1, x1, 2.0 - y0 * y0 * y0 - y1 * y1 * y1 * (x1 - 1.0) - twist * y1 * y1};
    };
    return s;
  }

  if (name == "S_D") {
    need_params(0);
    Chart c = chart_opt.value_or(u2_chart);
    if (c == u2_chart) {
      // y0^2 + y1 (y1 + 1)(x1 - 1) x2 + x2^2 + 1
      s.value = [](std::span<const cplx> p) {
        return p[0] * p[0] + p[1] * (p[1] + 1.0) * (p[2] - 1.0) * p[3] + p[3] * p[3] + 1.0;
      };
      s.gradient = [](std::span<const cplx> p) {
        cplx y1 = p[1], x1 = p[2], x2 = p[3];
        return Vector{2.0 * p[0], (2.0 * y1 + 1.0) * (x1 - 1.0) * x2, y1 * (y1 + 1.0) * x2,
                      y1 * (y1 + 1.0) * (x1 - 1.0) + 2.0 * x2};
      };
      s.sample_once = [](Rng& r) -> std::optional<Point> {
        cplx y0 = free_coordinate(r), y1 = free_coordinate(r), x2 = free_coordinate(r);
        cplx den = y1 * (y1 + 1.0) * x2;
        return detail::guarded(Point{y0, y1, 1.0 - (y0 * y0 + x2 * x2 + 1.0) / den, x2}, den, 0.05);
      };
    } else if (c == u1_chart) {
      // w0^2 + (1 + w2)(x1 - 1) x2 + w2^2 (x2^2 + 1)
      s.value = [](std::span<const cplx> p) {
        return p[0] * p[0] + (1.0 + p[1]) * (p[2] - 1.0) * p[3] + p[1] * p[1] * (p[3] * p[3] + 1.0);
      };
      s.gradient = [](std::span<const cplx> p) {
        cplx w2 = p[1], x1 = p[2], x2 = p[3];
        return Vector{2.0 * p[0], (x1 - 1.0) * x2 + 2.0 * w2 * (x2 * x2 + 1.0), (1.0 + w2) * x2,
                      (1.0 + w2) * (x1 - 1.0) + 2.0 * w2 * w2 * x2};
      };
      s.sample_once = [](Rng& r) -> std::optional<Point> {
        cplx w0 = free_coordinate(r), w2 = free_coordinate(r), x2 = free_coordinate(r);
        cplx den = (1.0 + w2) * x2;
        return detail::guarded(Point{w0, w2, 1.0 - (w0 * w0 + w2 * w2 * (x2 * x2 + 1.0)) / den, x2}, den, 0.05);
      };
    } else {
      reject_chart(c);
    }
    s.chart = c;
    return s;
  }

  if (name == "S_E") {
    need_params(0);
    Chart c = chart_opt.value_or(u2_chart);
    if (!(c == u2_chart)) reject_chart(c);
    s.chart = c;
    // y0^2 + (y1^2 + 3 y1 x2 + 2 x2^2)(x1 - 1) + x2^3 + 1
    s.value = [](std::span<const cplx> p) {
      cplx y1 = p[1], x1 = p[2], x2 = p[3];
      return p[0] * p[0] + (y1 * y1 + 3.0 * y1 * x2 + 2.0 * x2 * x2) * (x1 - 1.0) + x2 * x2 * x2 + 1.0;
    };
    s.gradient = [](std::span<const cplx> p) {
      cplx y1 = p[1], x1 = p[2], x2 = p[3];
      return Vector{2.0 * p[0], (2.0 * y1 + 3.0 * x2) * (x1 - 1.0), y1 * y1 + 3.0 * y1 * x2 + 2.0 * x2 * x2,
                    (3.0 * y1 + 4.0 * x2) * (x1 - 1.0) + 3.0 * x2 * x2};
    };
    s.sample_once = [](Rng& r) -> std::optional<Point> {
      cplx y0 = free_coordinate(r), y1 = free_coordinate(r), x2 = free_coordinate(r);
      cplx h = y1 * y1 + 3.0 * y1 * x2 + 2.0 * x2 * x2;
      return detail::guarded(Point{y0, y1, 1.0 - (y0 * y0 + x2 * x2 * x2 + 1.0) / h, x2}, h, 0.05);
    };
    return s;
  }

  throw InputError("surface_catalog: unknown surface '" + name + "'");
}

/// Deterministic on-surface samples; singular draws are silently redrawn.
inline std::vector<Point> sample_on_surface(const SurfaceSpec& spec, std::uint64_t seed, int count) {
  if (count < 1) throw InputError("sample_on_surface: count must be at least 1");
  Rng rng(seed);
  std::vector<Point> out;
  for (long attempts = 0; static_cast<int>(out.size()) < count; ++attempts) {
    if (attempts > 1000L * count) throw PreconditionError("sample_on_surface: too many singular draws for " + spec.name);
    if (auto p = spec.sample_once(rng)) out.push_back(std::move(*p));
  }
  return out;
}

/// Smallest singular value of the stacked gradients at a common point.
inline double transversality_margin(std::span<const SurfaceSpec> specs, std::span<const cplx> point,
                                    double on_surface_tol = 1e-9) {
  if (specs.empty()) throw InputError("transversality_margin: no surfaces");
  std::vector<Vector> rows;
  for (const auto& s : specs) {
    if (!(s.chart == specs[0].chart)) throw InputError("transversality_margin: surfaces use different charts");
    if (static_cast<int>(point.size()) != s.chart.dim()) throw InputError("transversality_margin: point dimension");
    cplx v = s.value(point);
    if (std::abs(v) > on_surface_tol)
      throw PreconditionError("transversality_margin: point " + to_string(point) + " is not on " + s.name +
                              " (|value| = " + std::to_string(std::abs(v)) + ")");
    rows.push_back(s.gradient(point));
  }
  return linalg::smallest_singular_value(rows);
}

/// Points on the common zero set of `specs`, found by Newton's method in the
/// coordinates `solve_for` (one per surface) from seeded random starts.
inline std::vector<Point> sample_intersection(std::span<const SurfaceSpec> specs, std::vector<int> solve_for,
                                              std::uint64_t seed, int count, double max_modulus = 20.0) {
  if (specs.empty() || solve_for.size() != specs.size())
    throw InputError("sample_intersection: need one solve coordinate per surface");
  const Chart chart = specs[0].chart;
  const int m = chart.dim();
  Rng rng(seed);
  std::vector<Point> out;
  for (long attempts = 0; static_cast<int>(out.size()) < count; ++attempts) {
    if (attempts > 500L * count) throw PreconditionError("sample_intersection: Newton failed repeatedly");
    Point p(m);
    for (auto& c : p) c = detail::free_coordinate(rng);
    for (int j : solve_for) p[j] = rng.in_box(1.5);
    bool converged = false;
    for (int it = 0; it < 60 && !converged; ++it) {
      Vector f(specs.size());
      std::vector<Vector> jac(specs.size(), Vector(specs.size()));
      double fmax = 0.0, pmax = 0.0;
      for (std::size_t i = 0; i < specs.size(); ++i) {
        f[i] = specs[i].value(p);
        fmax = std::max(fmax, std::abs(f[i]));
        Vector g = specs[i].gradient(p);
        for (std::size_t j = 0; j < solve_for.size(); ++j) jac[i][j] = g[solve_for[j]];
      }
      for (auto c : p) pmax = std::max(pmax, std::abs(c));
      if (!std::isfinite(pmax) || pmax > 1e6) break;
      if (fmax < 1e-14 * (1.0 + pmax)) {
        converged = true;
        break;
      }
      Vector step = linalg::solve(jac, f);
      for (std::size_t j = 0; j < solve_for.size(); ++j) p[solve_for[j]] -= step[j];
    }
    if (!converged) continue;
    double pmax = 0.0;
    for (auto c : p) pmax = std::max(pmax, std::abs(c));
    if (pmax <= max_modulus) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace leray
