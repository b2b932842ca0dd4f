#include <catch_amalgamated.hpp>

#include "leray/forms.hpp"

using namespace leray;

namespace {

std::vector<Vector> random_vectors(Rng& rng, int dim, int k) {
  std::vector<Vector> out;
  for (int j = 0; j < k; ++j) out.push_back(rng.vector_in_box(dim, 1.0));
  return out;
}

// A non-constant 1-form and 2-form on C^3 for algebraic checks.
KForm sample_one_form() {
  return one_form(3, [](std::span<const cplx> p) { return Vector{p[1] * p[2], std::exp(p[0]), p[0] - p[2]}; });
}
KForm sample_two_form() {
  return multiply([](std::span<const cplx> p) { return p[0] * p[0] + 1.0; }, coordinate_form(3, {0, 2})) +
         multiply([](std::span<const cplx> p) { return p[1]; }, coordinate_form(3, {1, 2}));
}

}  // namespace

TEST_CASE("coordinate forms are determinants", "[forms]") {
  const KForm dxdy = coordinate_form(2, {0, 1});
  const Point p{0.0, 0.0};
  CHECK(dxdy(p, std::vector<Vector>{{1.0, 0.0}, {0.0, 1.0}}) == cplx(1.0));
  CHECK(dxdy(p, std::vector<Vector>{{0.0, 1.0}, {1.0, 0.0}}) == cplx(-1.0));
  CHECK(dxdy(p, std::vector<Vector>{{1.0, 2.0}, {3.0, 4.0}}) == cplx(-2.0));
  CHECK_THROWS_AS(coordinate_form(2, {0, 2}), InputError);
}

TEST_CASE("evaluate checks arity and dimension", "[forms]") {
  const KForm dx = coordinate_form(2, {0});
  CHECK_THROWS_AS(evaluate(dx, Point{0.0, 0.0}, std::vector<Vector>{}), InputError);
  CHECK_THROWS_AS(evaluate(dx, Point{0.0}, std::vector<Vector>{{1.0}}), InputError);
  CHECK_THROWS_AS(evaluate(dx, Point{0.0, 0.0}, std::vector<Vector>{{1.0}}), InputError);
}

TEST_CASE("wedge of coordinate 1-forms", "[forms]") {
  Rng rng(1);
  const KForm w = wedge(coordinate_form(3, {0}), wedge(coordinate_form(3, {1}), coordinate_form(3, {2})));
  const KForm c = coordinate_form(3, {0, 1, 2});
  for (int t = 0; t < 20; ++t) {
    auto vs = random_vectors(rng, 3, 3);
    Point p = rng.vector_in_box(3, 1.0);
    CHECK(std::abs(w(p, vs) - c(p, vs)) < 1e-14);
  }
}

TEST_CASE("wedge is associative and graded commutative", "[forms][property]") {
  Rng rng(2);
  const KForm a = sample_one_form(), b = sample_two_form();
  const KForm g = one_form(3, [](std::span<const cplx> p) { return Vector{1.0, p[2], p[1] * p[1]}; });
  for (int t = 0; t < 30; ++t) {
    Point p = rng.vector_in_box(3, 1.0);
    auto v3 = random_vectors(rng, 3, 3);
    CHECK(std::abs(wedge(a, b)(p, v3) - wedge(b, a)(p, v3)) < 1e-13);      // (-1)^{1*2} = +1
    auto v2 = random_vectors(rng, 3, 2);
    CHECK(std::abs(wedge(a, g)(p, v2) + wedge(g, a)(p, v2)) < 1e-13);      // (-1)^{1*1} = -1
    CHECK(std::abs(wedge(wedge(a, g), g)(p, v3)) < 1e-13);                 // g ^ g = 0
    CHECK(std::abs(wedge(wedge(a, g), a)(p, v3) - wedge(a, wedge(g, a))(p, v3)) < 1e-13);
  }
}

TEST_CASE("numeric exterior derivative", "[forms]") {
  Rng rng(3);
  // d(x dy) = dx ^ dy
  const KForm xdy = multiply([](std::span<const cplx> p) { return p[0]; }, coordinate_form(2, {1}));
  // d(f) for f = x^2 y on C^2 is 2xy dx + x^2 dy
  const KForm f = function_form(2, [](std::span<const cplx> p) { return p[0] * p[0] * p[1]; });
  for (int t = 0; t < 20; ++t) {
    Point p = rng.vector_in_box(2, 1.0);
    auto vs = random_vectors(rng, 2, 2);
    CHECK(std::abs(d_numeric(xdy, p, vs) - coordinate_form(2, {0, 1})(p, vs)) < 1e-9);
    std::vector<Vector> one{vs[0]};
    cplx want = 2.0 * p[0] * p[1] * vs[0][0] + p[0] * p[0] * vs[0][1];
    CHECK(std::abs(d_numeric(f, p, one) - want) < 1e-9);
  }
  CHECK_THROWS_AS(d_numeric(xdy, Point{0.0, 0.0}, std::vector<Vector>{{1.0, 0.0}}), InputError);
}

TEST_CASE("d of an exact form vanishes", "[forms][property]") {
  Rng rng(4);
  // grad of exp(x) y + z^3
  const KForm df = one_form(3, [](std::span<const cplx> p) {
    return Vector{std::exp(p[0]) * p[1], std::exp(p[0]), 3.0 * p[2] * p[2]};
  });
  for (int t = 0; t < 20; ++t) {
    Point p = rng.vector_in_box(3, 1.0);
    CHECK(std::abs(d_numeric(df, p, random_vectors(rng, 3, 2))) < 1e-8);
  }
}

TEST_CASE("pullback by a holomorphic map", "[forms]") {
  // (u, v) -> (uv, u + v); Jacobian determinant v - u.
  const ChartMap m{2, 2, [](std::span<const cplx> p) { return Point{p[0] * p[1], p[0] + p[1]}; },
                   [](std::span<const cplx> p) { return std::vector<Vector>{{p[1], 1.0}, {p[0], 1.0}}; }};
  const KForm area = pullback(coordinate_form(2, {0, 1}), m);
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    Point p = rng.vector_in_box(2, 1.0);
    std::vector<Vector> e{{1.0, 0.0}, {0.0, 1.0}};
    CHECK(std::abs(area(p, e) - (p[1] - p[0])) < 1e-14);

    // Pullback commutes with wedge.
    const KForm a = one_form(2, [](std::span<const cplx> q) { return Vector{q[1], q[0] * q[0]}; });
    const KForm b = one_form(2, [](std::span<const cplx> q) { return Vector{1.0, std::exp(q[0])}; });
    auto vs = random_vectors(rng, 2, 2);
    CHECK(std::abs(pullback(wedge(a, b), m)(p, vs) - wedge(pullback(a, m), pullback(b, m))(p, vs)) < 1e-13);
  }
  CHECK_THROWS_AS(pullback(coordinate_form(3, {0}), m), InputError);
}

TEST_CASE("composed maps pull back in sequence", "[forms]") {
  const ChartMap sq{1, 1, [](std::span<const cplx> p) { return Point{p[0] * p[0]}; },
                    [](std::span<const cplx> p) { return std::vector<Vector>{{2.0 * p[0]}}; }};
  const ChartMap emb{1, 2, [](std::span<const cplx> p) { return Point{p[0], std::exp(p[0])}; },
                     [](std::span<const cplx> p) { return std::vector<Vector>{{1.0, std::exp(p[0])}}; }};
  const KForm form = one_form(2, [](std::span<const cplx> q) { return Vector{q[1], q[0]}; });
  const KForm once = pullback(form, compose(emb, sq));
  const KForm twice = pullback(pullback(form, emb), sq);
  for (cplx t : {cplx(0.3, 0.1), cplx(-0.7, 0.4)}) {
    std::vector<Vector> e{{1.0}};
    CHECK(std::abs(once(Point{t}, e) - twice(Point{t}, e)) < 1e-14);
  }
  CHECK_THROWS_AS(compose(sq, emb), InputError);
}

TEST_CASE("coordinate norm", "[forms]") {
  const KForm f = 3.0 * coordinate_form(3, {0, 2}) - coordinate_form(3, {1, 2});
  CHECK(coordinate_norm(f, Point{0.0, 0.0, 0.0}) == Catch::Approx(3.0));
  CHECK(coordinate_norm(function_form(1, [](std::span<const cplx>) { return cplx(0.0, -2.0); }), Point{0.0}) ==
        Catch::Approx(2.0));
}
