#include <catch_amalgamated.hpp>

#include "leray/kernels.hpp"

using namespace leray;

namespace {

std::vector<Vector> frame(Rng& rng, int dim, int k) {
  std::vector<Vector> out;
  for (int j = 0; j < k; ++j) out.push_back(rng.vector_in_box(dim, 1.0));
  return out;
}

}  // namespace

TEST_CASE("basis forms", "[kernels]") {
  // n = 1 on (xi0, xi1, x): omega = dx, omega' = xi1, omega* = xi0 dxi1 - xi1 dxi0.
  const Point p{2.0, 3.0, 5.0};
  CHECK(kernel_basis_form("omega", 1)(p, std::vector<Vector>{{0.0, 0.0, 1.0}}) == cplx(1.0));
  CHECK(kernel_basis_form("omega_prime", 1)(p, std::vector<Vector>{}) == cplx(3.0));
  const KForm star = kernel_basis_form("omega_star", 1);
  CHECK(star(p, std::vector<Vector>{{0.0, 1.0, 0.0}}) == cplx(2.0));
  CHECK(star(p, std::vector<Vector>{{0.0, 0.0, 1.0}}) == cplx(0.0));
  CHECK(star(p, std::vector<Vector>{{1.0, 0.0, 0.0}}) == cplx(-3.0));
  CHECK(star.degree() == 1);
  // n = 2: omega' = xi1 dxi2 - xi2 dxi1.
  const KForm prime2 = kernel_basis_form("omega_prime", 2);
  const Point q{1.0, 2.0, 3.0, 0.0, 0.0};
  CHECK(prime2(q, std::vector<Vector>{{0.0, 0.0, 1.0, 0.0, 0.0}}) == cplx(2.0));
  CHECK(prime2(q, std::vector<Vector>{{0.0, 1.0, 0.0, 0.0, 0.0}}) == cplx(-3.0));
  CHECK_THROWS_AS(kernel_basis_form("omega_bar", 1), InputError);
  CHECK_THROWS_AS(kernel_basis_form("omega", 0), InputError);
}

TEST_CASE("determinant route matches the wedge definition", "[kernels][property]") {
  Rng rng(13);
  for (int n = 1; n <= 3; ++n) {
    Point z(n);
    for (auto& c : z) c = rng.in_box(0.5);
    const AffinePoint zp(z);
    const HolomorphicExpr f = parse_expr(n == 1 ? "exp(x)" : "x1+2", n);
    const Point zc = z;
    auto weight = [n, zc, f](int power) {
      return [n, zc, f, power](std::span<const cplx> p) {
        return f(p.subspan(n + 1)) / std::pow(dual_pairing(p.subspan(0, n + 1), zc), power);
      };
    };
    const KForm phi_ref = multiply(weight(n), wedge(kernel_basis_form("omega_prime", n), kernel_basis_form("omega", n)));
    const KForm psi_ref =
        multiply(weight(n + 1), wedge(kernel_basis_form("omega_star", n), kernel_basis_form("omega", n)));
    const KForm ph = phi(n, zp, f), ps = psi(n, zp, f);
    for (int t = 0; t < 20; ++t) {
      Point p = rng.vector_in_box(2 * n + 1, 1.0);
      auto v1 = frame(rng, 2 * n + 1, 2 * n - 1), v2 = frame(rng, 2 * n + 1, 2 * n);
      cplx a = ph(p, v1), b = phi_ref(p, v1);
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
      a = ps(p, v2);
      b = psi_ref(p, v2);
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
    }
  }
}

TEST_CASE("kernels on the xi_1 = 1 chart, n = 1", "[kernels]") {
  // Coordinates (eta, x) with xi = (eta, 1): Phi_0 = dx / eta, Psi_0 = dx ^ deta / eta^2.
  const AffinePoint zero(Point{0.0});
  const KForm ph = pullback(phi(1, zero), eta_chart.lift());
  const KForm ps = pullback(psi(1, zero), eta_chart.lift());
  CHECK(ph(Point{2.0, 0.7}, std::vector<Vector>{{0.0, 1.0}}) == cplx(0.5));
  CHECK(ph(Point{2.0, 0.7}, std::vector<Vector>{{1.0, 0.0}}) == cplx(0.0));
  Rng rng(17);
  for (int t = 0; t < 10; ++t) {
    Point p{rng.in_annulus(0.3, 1.5), rng.in_box(1.0)};
    std::vector<Vector> e{{0.0, 1.0}, {1.0, 0.0}};
    CHECK(std::abs(ps(p, e) - 1.0 / (p[0] * p[0])) < 1e-13);
  }
}

TEST_CASE("kernels on the xi_0 = 1 chart, n = 2", "[kernels]") {
  // (y1, y2, x1, x2), xi = (1, y1, y2), z = 0: xi . z = 1, so Phi_0 is
  // (y1 dy2 - y2 dy1) ^ dx1 ^ dx2 and Psi_0 = dy1 ^ dy2 ^ dx1 ^ dx2.
  const AffinePoint zero(Point{0.0, 0.0});
  const KForm ps = pullback(psi(2, zero), Chart{2, 0}.lift());
  const KForm ph = pullback(phi(2, zero), Chart{2, 0}.lift());
  Rng rng(19);
  for (int t = 0; t < 10; ++t) {
    Point p = rng.vector_in_box(4, 1.0);
    auto v = frame(rng, 4, 4);
    CHECK(std::abs(ps(p, v) - coordinate_form(4, {0, 1, 2, 3})(p, v)) < 1e-13);
    auto w = frame(rng, 4, 3);
    cplx want = p[0] * coordinate_form(4, {1, 2, 3})(p, w) - p[1] * coordinate_form(4, {0, 2, 3})(p, w);
    CHECK(std::abs(ph(p, w) - want) < 1e-13);
  }
}

TEST_CASE("kernel errors", "[kernels]") {
  const AffinePoint zero(Point{0.0});
  // xi = (0, 1), z = 0 gives xi . z = 0.
  CHECK_THROWS_AS(phi(1, zero)(Point{0.0, 1.0, 0.5}, std::vector<Vector>{{0.0, 0.0, 1.0}}), PoleError);
  CHECK_THROWS_AS(phi(2, zero), InputError);
  CHECK_THROWS_AS(phi(1, zero, parse_expr("x1+x2", 2)), InputError);
  CHECK_THROWS_AS(psi(0, AffinePoint(Point{})), InputError);
}

TEST_CASE("phi chart identity gap", "[kernels]") {
  Rng rng(23);
  for (int n : {2, 3}) {
    for (int t = 0; t < 10; ++t) {
      Point p = rng.vector_in_box(2 * n, 1.0);
      p[0] = rng.in_annulus(0.3, 1.2);
      CHECK(phi_chart_identity_gap(n, p, frame(rng, 2 * n, 2 * n - 1)) < 1e-12);
    }
  }
  CHECK_THROWS_AS(phi_chart_identity_gap(1, Point{1.0, 1.0}, std::vector<Vector>{{1.0, 0.0}}), InputError);
  Point bad(4, 0.5);
  bad[0] = 0.0;
  CHECK_THROWS_AS(phi_chart_identity_gap(2, bad, frame(rng, 4, 3)), InputError);
}

TEST_CASE("residue representatives", "[kernels]") {
  // f = 1: residue_A = (a - 1) dx and residue_B = 2 (x - 1) dx.
  const cplx a(0.4, -0.3);
  for (cplx x : {cplx(0.2, 0.1), cplx(-1.0, 0.5)}) {
    std::vector<Vector> e{{1.0}};
    CHECK(std::abs(casebook_form("residue_A", a)(Point{x}, e) - (a - 1.0)) < 1e-15);
    CHECK(std::abs(casebook_form("residue_B")(Point{x}, e) - 2.0 * (x - 1.0)) < 1e-15);
  }
  CHECK(casebook_entry("tau_D").chart == "y0,y1,x1,x2");
  CHECK_THROWS_AS(casebook_form("sigma_Z"), InputError);
  CHECK_THROWS_AS(casebook_form("sigma_A", 0.0, parse_expr("x1", 2)), InputError);
  CHECK_THROWS_AS(casebook_form("sigma_A")(Point{0.0, 1.0}, std::vector<Vector>{{1.0, 0.0}}), PoleError);
}

TEST_CASE("forms vanish on their surfaces", "[kernels]") {
  const cplx a(0.7, -0.2);
  const auto f = parse_expr("exp(x)", 1);
  struct Case {
    std::string form;
    SurfaceSpec surface;
    cplx a = 0.0;
  };
  const std::vector<Case> cases{{"sigma_A", surface_catalog("Q"), a},
                                {"sigma_A", surface_catalog("S_A", {a}), a},
                                {"sigma_B", surface_catalog("Q")},
                                {"sigma_B", surface_catalog("S_B")},
                                {"tau_D", surface_catalog("S_D")},
                                {"tau_E", surface_catalog("S_E")}};
  for (const auto& c : cases) {
    INFO(c.form << " on " << c.surface.name);
    auto r = vanishing_max(casebook_form(c.form, c.a, f), c.surface, 29, 30);
    CHECK(r.scale > 0.1);
    CHECK(r.max_abs <= 1e-9 * r.scale);
  }
  // Negative control: dx does not vanish on Q.
  auto r = vanishing_max(coordinate_form(2, {1}), surface_catalog("Q"), 29, 10);
  CHECK(r.max_abs == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(vanishing_max(casebook_form("tau_D"), surface_catalog("Q"), 1, 1), InputError);
}
