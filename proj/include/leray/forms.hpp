#pragma once

// Holomorphic differential forms as evaluators on complex tangent vectors.
//
// A degree-k form on C^m is a function (point, v_1..v_k) -> C that is
// complex-multilinear and alternating in the v_i. Wedge products use the
// determinant convention: (dx ^ dy)(e1, e2) = 1.

#include <algorithm>
#include <functional>
#include <memory>
#include <utility>

#include "leray/linalg.hpp"
#include "leray/types.hpp"

namespace leray {

using TangentVector = Vector;
using ScalarFn = std::function<cplx(std::span<const cplx>)>;

class KForm {
 public:
  using Eval = std::function<cplx(std::span<const cplx>, std::span<const Vector>)>;

  KForm(int degree, int dim, Eval eval) : degree_(degree), dim_(dim), eval_(std::move(eval)) {
    if (degree < 0 || dim < 1) throw InputError("KForm: invalid degree or dimension");
  }

  int degree() const { return degree_; }
  int dim() const { return dim_; }

  /// Unchecked evaluation; callers guarantee arity and dimensions.
  cplx raw(std::span<const cplx> point, std::span<const Vector> vectors) const {
    return eval_(point, vectors);
  }

  cplx operator()(std::span<const cplx> point, std::span<const Vector> vectors) const;

 private:
  int degree_;
  int dim_;
  Eval eval_;
};

/// Checked evaluation of `form` at `point` on exactly degree() vectors.
inline cplx evaluate(const KForm& form, std::span<const cplx> point, std::span<const Vector> vectors) {
  if (static_cast<int>(vectors.size()) != form.degree())
    throw InputError("evaluate: form of degree " + std::to_string(form.degree()) + " given " +
                     std::to_string(vectors.size()) + " vectors");
  if (static_cast<int>(point.size()) != form.dim())
    throw InputError("evaluate: point dimension " + std::to_string(point.size()) +
                     " does not match form dimension " + std::to_string(form.dim()));
  for (const auto& v : vectors)
    if (static_cast<int>(v.size()) != form.dim())
      throw InputError("evaluate: tangent vector dimension mismatch");
  return form.raw(point, vectors);
}

inline cplx KForm::operator()(std::span<const cplx> point, std::span<const Vector> vectors) const {
  return evaluate(*this, point, vectors);
}

// ---------------------------------------------------------------------------
// Builders

inline KForm function_form(int dim, ScalarFn fn) {
  return KForm(0, dim, [fn = std::move(fn)](std::span<const cplx> p, std::span<const Vector>) { return fn(p); });
}

/// dx_{i_1} ^ ... ^ dx_{i_k} with constant coefficient 1 (0-based indices).
inline KForm coordinate_form(int dim, std::vector<int> indices) {
  for (int i : indices)
    if (i < 0 || i >= dim) throw InputError("coordinate_form: index out of range");
  const int k = static_cast<int>(indices.size());
  return KForm(k, dim, [indices = std::move(indices), k](std::span<const cplx>, std::span<const Vector> vs) {
    std::vector<Vector> cols(k, Vector(k));
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < k; ++i) cols[j][i] = vs[j][indices[i]];
    return linalg::det_columns(cols);
  });
}

/// sum_j c_j(p) dx_j
inline KForm one_form(int dim, std::function<Vector(std::span<const cplx>)> coeffs) {
  return KForm(1, dim, [coeffs = std::move(coeffs)](std::span<const cplx> p, std::span<const Vector> vs) {
    Vector c = coeffs(p);
    cplx acc = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) acc += c[j] * vs[0][j];
    return acc;
  });
}

inline KForm multiply(ScalarFn fn, const KForm& form) {
  return KForm(form.degree(), form.dim(), [fn = std::move(fn), form](std::span<const cplx> p, std::span<const Vector> vs) {
    return fn(p) * form.raw(p, vs);
  });
}

inline KForm operator*(cplx c, const KForm& form) {
  return KForm(form.degree(), form.dim(),
               [c, form](std::span<const cplx> p, std::span<const Vector> vs) { return c * form.raw(p, vs); });
}

inline KForm operator+(const KForm& a, const KForm& b) {
  if (a.degree() != b.degree() || a.dim() != b.dim()) throw InputError("form sum: degree or dimension mismatch");
  return KForm(a.degree(), a.dim(),
               [a, b](std::span<const cplx> p, std::span<const Vector> vs) { return a.raw(p, vs) + b.raw(p, vs); });
}

inline KForm operator-(const KForm& a, const KForm& b) { return a + (-1.0) * b; }

namespace detail {

// Calls fn(selected, sign) for every p-subset of {0..p+q-1} in lexicographic
// order; sign is the parity of the (p,q)-shuffle that puts the subset first.
template <typename Fn>
void for_each_shuffle(int p, int q, Fn&& fn) {
  std::vector<int> sel(p);
  for (int i = 0; i < p; ++i) sel[i] = i;
  const int n = p + q;
  for (;;) {
    int inversions = 0;
    for (int j = 0; j < p; ++j) inversions += sel[j] - j;
    fn(sel, (inversions % 2) ? -1.0 : 1.0);
    int j = p - 1;
    while (j >= 0 && sel[j] == n - p + j) --j;
    if (j < 0) return;
    ++sel[j];
    for (int t = j + 1; t < p; ++t) sel[t] = sel[t - 1] + 1;
  }
}

}  // namespace detail

/// Shuffle-sum wedge product.
inline KForm wedge(const KForm& a, const KForm& b) {
  if (a.dim() != b.dim()) throw InputError("wedge: ambient dimension mismatch");
  const int p = a.degree(), q = b.degree();
  return KForm(p + q, a.dim(), [a, b, p, q](std::span<const cplx> pt, std::span<const Vector> vs) {
    cplx acc = 0.0;
    std::vector<Vector> left(p), right(q);
    std::vector<char> used(p + q);
    detail::for_each_shuffle(p, q, [&](const std::vector<int>& sel, double sign) {
      std::fill(used.begin(), used.end(), 0);
      for (int j = 0; j < p; ++j) {
        left[j] = vs[sel[j]];
        used[sel[j]] = 1;
      }
      int r = 0;
      for (int j = 0; j < p + q; ++j)
        if (!used[j]) right[r++] = vs[j];
      acc += sign * a.raw(pt, left) * b.raw(pt, right);
    });
    return acc;
  });
}

// ---------------------------------------------------------------------------
// Numeric exterior derivative

/// Step used by d_numeric along direction v at point p.
inline double default_step(std::span<const cplx> p, const Vector& v) {
  double pmax = 0.0, vmax = 0.0;
  for (auto c : p) pmax = std::max(pmax, std::abs(c));
  for (auto c : v) vmax = std::max(vmax, std::abs(c));
  return vmax > 0.0 ? 1e-5 * (1.0 + pmax) / vmax : 1e-5 * (1.0 + pmax);
}

/// dF(v_0..v_k) = sum_i (-1)^i D_{v_i} F(v_0..^v_i..v_k) for constant vector
/// fields, with central differences. A non-positive `step` selects the
/// default per-direction step.
inline cplx d_numeric(const KForm& form, std::span<const cplx> point, std::span<const Vector> vectors,
                      double step = 0.0) {
  const int k = form.degree();
  if (static_cast<int>(vectors.size()) != k + 1)
    throw InputError("d_numeric: need " + std::to_string(k + 1) + " vectors");
  if (static_cast<int>(point.size()) != form.dim()) throw InputError("d_numeric: point dimension mismatch");
  cplx acc = 0.0;
  std::vector<Vector> rest(k);
  Point plus(point.begin(), point.end()), minus(plus);
  for (int i = 0; i <= k; ++i) {
    for (int j = 0, r = 0; j <= k; ++j)
      if (j != i) rest[r++] = vectors[j];
    const Vector& v = vectors[i];
    double h = step > 0.0 ? step : default_step(point, v);
    for (std::size_t c = 0; c < point.size(); ++c) {
      plus[c] = point[c] + h * v[c];
      minus[c] = point[c] - h * v[c];
    }
    cplx deriv = (form.raw(plus, rest) - form.raw(minus, rest)) / (2.0 * h);
    acc += (i % 2 ? -1.0 : 1.0) * deriv;
  }
  return acc;
}

/// The (k+1)-form p -> d_numeric(form, p, .).
inline KForm d_numeric_form(const KForm& form, double step = 0.0) {
  return KForm(form.degree() + 1, form.dim(), [form, step](std::span<const cplx> p, std::span<const Vector> vs) {
    return d_numeric(form, p, vs, step);
  });
}

// ---------------------------------------------------------------------------
// Maps between coordinate spaces and pullback

/// Holomorphic map C^src -> C^dst with an analytic Jacobian (one column per
/// source coordinate).
struct ChartMap {
  int src_dim;
  int dst_dim;
  std::function<Point(std::span<const cplx>)> map;
  std::function<std::vector<Vector>(std::span<const cplx>)> jacobian;
};

inline Vector push_forward(const std::vector<Vector>& jac_cols, const Vector& v) {
  Vector out(jac_cols.empty() ? 0 : jac_cols[0].size(), cplx{});
  for (std::size_t j = 0; j < jac_cols.size(); ++j) {
    if (v[j] == cplx{}) continue;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[j] * jac_cols[j][i];
  }
  return out;
}

inline KForm pullback(const KForm& form, const ChartMap& f) {
  if (form.dim() != f.dst_dim) throw InputError("pullback: form dimension does not match map target");
  return KForm(form.degree(), f.src_dim, [form, f](std::span<const cplx> p, std::span<const Vector> vs) {
    Point q = f.map(p);
    auto jac = f.jacobian(p);
    std::vector<Vector> pushed;
    pushed.reserve(vs.size());
    for (const auto& v : vs) pushed.push_back(push_forward(jac, v));
    return form.raw(q, pushed);
  });
}

/// outer o inner.
inline ChartMap compose(const ChartMap& outer, const ChartMap& inner) {
  if (inner.dst_dim != outer.src_dim) throw InputError("compose: dimension mismatch");
  return ChartMap{inner.src_dim, outer.dst_dim,
                  [outer, inner](std::span<const cplx> p) { return outer.map(inner.map(p)); },
                  [outer, inner](std::span<const cplx> p) {
                    auto jo = outer.jacobian(inner.map(p));
                    std::vector<Vector> cols;
                    for (const auto& c : inner.jacobian(p)) cols.push_back(push_forward(jo, c));
                    return cols;
                  }};
}

/// Unit coordinate vector e_i in C^dim.
inline Vector unit_vector(int dim, int i) {
  Vector v(dim, cplx{});
  v.at(i) = 1.0;
  return v;
}

/// Largest |form(e_I)| over increasing index tuples I; a pointwise norm used
/// to scale vanishing tests.
inline double coordinate_norm(const KForm& form, std::span<const cplx> point) {
  const int k = form.degree(), m = form.dim();
  if (k == 0) return std::abs(form.raw(point, {}));
  double best = 0.0;
  std::vector<Vector> vs(k);
  detail::for_each_shuffle(k, m - k, [&](const std::vector<int>& sel, double) {
    for (int j = 0; j < k; ++j) vs[j] = unit_vector(m, sel[j]);
    best = std::max(best, std::abs(form.raw(point, vs)));
  });
  return best;
}

}  // namespace leray
