#include <catch_amalgamated.hpp>

#include "leray/expr.hpp"

using namespace leray;
using Catch::Matchers::ContainsSubstring;

namespace {

cplx at(const std::string& text, int n, std::vector<cplx> x) { return eval_expr(parse_expr(text, n), x); }

// Random trees built without simplification, so every operator shows up.
HolomorphicExpr::NodePtr random_tree(Rng& rng, int depth, int n) {
  using E = HolomorphicExpr;
  using Op = E::Op;
  const double u = rng.uniform();
  if (depth == 0 || u < 0.2) {
    if (rng.uniform() < 0.5) return E::make(Op::Var, {}, nullptr, nullptr, static_cast<int>(rng.uniform() * n));
    const double re = std::round(rng.uniform(-40.0, 40.0)) / 8.0;
    const double im = rng.uniform() < 0.3 ? std::round(rng.uniform(-40.0, 40.0)) / 8.0 : 0.0;
    return E::make(Op::Const, cplx{re, im});
  }
  const int pick = static_cast<int>(rng.uniform() * 7.0);
  switch (pick) {
    case 0: return E::make(Op::Neg, {}, random_tree(rng, depth - 1, n));
    case 1: return E::make(Op::Add, {}, random_tree(rng, depth - 1, n), random_tree(rng, depth - 1, n));
    case 2: return E::make(Op::Sub, {}, random_tree(rng, depth - 1, n), random_tree(rng, depth - 1, n));
    case 3: return E::make(Op::Mul, {}, random_tree(rng, depth - 1, n), random_tree(rng, depth - 1, n));
    case 4: return E::make(Op::Div, {}, random_tree(rng, depth - 1, n), random_tree(rng, depth - 1, n));
    case 5: {
      const int k = static_cast<int>(rng.uniform() * 6.0) - 2;
      return E::make(Op::Pow, {}, random_tree(rng, depth - 1, n), nullptr, k);
    }
    default: return E::make(Op::Exp, {}, random_tree(rng, depth - 1, n));
  }
}

}  // namespace

TEST_CASE("grammar and precedence", "[expr]") {
  CHECK(at("x1^2*x2+3", 2, {0.2, -0.1}) == cplx(0.2 * 0.2 * -0.1 + 3.0));
  CHECK(std::abs(at("exp(3*x)", 1, {0.1}) - std::exp(0.3)) < 1e-15);
  CHECK(at("-x^2", 1, {2.0}) == cplx(-4.0));
  CHECK(at("2^3^2", 1, {0.0}) == cplx(512.0));
  CHECK(at("2+3*4", 1, {0.0}) == cplx(14.0));
  CHECK(at("(1+2)*3", 1, {0.0}) == cplx(9.0));
  CHECK(at("8/2/2", 1, {0.0}) == cplx(2.0));
  CHECK(at("1-2-3", 1, {0.0}) == cplx(-4.0));
  CHECK(at("x^-2", 1, {2.0}) == cplx(0.25));
  CHECK(at("--x", 1, {3.0}) == cplx(3.0));
  CHECK(at("1.5e2 + 2.5E-1", 1, {0.0}) == cplx(150.25));
}

TEST_CASE("imaginary literals", "[expr]") {
  CHECK(at("i", 1, {0.0}) == cplx(0.0, 1.0));
  CHECK(at("2i", 1, {0.0}) == cplx(0.0, 2.0));
  CHECK(at("1+2i", 1, {0.0}) == cplx(1.0, 2.0));
  CHECK(at("i*i", 1, {0.0}) == cplx(-1.0, 0.0));
  CHECK(at("x+1", 1, {cplx(0.0, 1.0)}) == cplx(1.0, 1.0));
  // No juxtaposition: "2 i" is two adjacent atoms.
  CHECK_THROWS_AS(parse_expr("2 i", 1), ParseError);
  CHECK_THROWS_AS(parse_expr("2x", 1), ParseError);
}

TEST_CASE("syntax errors carry the offset", "[expr]") {
  try {
    parse_expr("x1+", 1);
    FAIL("expected a syntax error");
  } catch (const ParseError& e) {
    CHECK(e.offset == 3);
    CHECK_THAT(e.what(), ContainsSubstring("offset 3"));
  }
  CHECK_THROWS_AS(parse_expr("(x", 1), ParseError);
  CHECK_THROWS_AS(parse_expr("x)", 1), ParseError);
  CHECK_THROWS_AS(parse_expr("exp x", 1), ParseError);
  CHECK_THROWS_AS(parse_expr("sin(x)", 1), ParseError);
  CHECK_THROWS_AS(parse_expr("x^1.5", 1), ParseError);
  CHECK_THROWS_AS(parse_expr("x^x", 1), ParseError);
  CHECK_THROWS_AS(parse_expr("", 1), ParseError);
}

TEST_CASE("variables are range checked", "[expr]") {
  CHECK_THROWS_AS(parse_expr("x", 2), ParseError);
  CHECK_THROWS_AS(parse_expr("x3", 2), ParseError);
  CHECK_THROWS_AS(parse_expr("x0", 2), ParseError);
  CHECK_NOTHROW(parse_expr("x1", 1));
  CHECK_THROWS_AS(eval_expr(parse_expr("x1+x2", 2), std::vector<cplx>{1.0}), InputError);
}

TEST_CASE("evaluation", "[expr]") {
  CHECK(at("exp(0)", 1, {0.0}) == cplx(1.0));
  CHECK(at("(x+1)", 1, {cplx(0.0, 1.0)}) == cplx(1.0, 1.0));
  try {
    at("1/x", 1, {0.0});
    FAIL("expected a pole");
  } catch (const PoleError& e) {
    CHECK_THAT(e.what(), ContainsSubstring("(0,0)"));
  }
  CHECK_THROWS_AS(at("x^-1", 1, {0.0}), PoleError);
}

TEST_CASE("symbolic derivatives", "[expr]") {
  auto d = [](const std::string& s) { return differentiate(parse_expr(s, 1), 0); };
  CHECK(print_expr(d("x^2+2*x")) == "2*x+2");
  for (cplx x : {cplx(0.3, -0.2), cplx(-1.1, 0.7)}) {
    CHECK(std::abs(d("exp(3*x)")(x) - 3.0 * std::exp(3.0 * x)) < 1e-13);
    CHECK(std::abs(d("x*exp(x)")(x) - (std::exp(x) + x * std::exp(x))) < 1e-13);
    CHECK(std::abs(d("1/x")(x) + 1.0 / (x * x)) < 1e-13);
  }
  auto e = parse_expr("x1^2*x2+3", 2);
  CHECK(eval_expr(differentiate(e, 1), std::vector<cplx>{0.2, -0.1}) == cplx(0.2 * 0.2));
  CHECK_THROWS_AS(differentiate(e, 2), InputError);
}

TEST_CASE("derivatives agree with central differences", "[expr][property]") {
  Rng rng(7);
  int compared = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform() * 2.0);
    HolomorphicExpr e(random_tree(rng, 4, n), n);
    const int var = static_cast<int>(rng.uniform() * n);
    const HolomorphicExpr de = differentiate(e, var);
    std::vector<cplx> p(n);
    for (auto& c : p) c = rng.in_annulus(0.5, 1.2);
    try {
      const double h = 1e-5;
      auto plus = p, minus = p;
      plus[var] += h;
      minus[var] -= h;
      const cplx fd = (e(plus) - e(minus)) / (2.0 * h);
      const cplx sym = de(p);
      const double scale = std::max({std::abs(sym), std::abs(e(p)), 1e-3});
      if (!std::isfinite(std::abs(fd)) || !std::isfinite(std::abs(sym)) || scale > 1e6) continue;
      INFO(print_expr(e) << " d/dx" << var + 1 << " at " << to_string(p));
      CHECK(std::abs(fd - sym) / scale < 1e-7);
      ++compared;
    } catch (const PoleError&) {
    }
  }
  CHECK(compared > 60);
}

TEST_CASE("parse . print . parse is idempotent", "[expr][property]") {
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform() * 3.0);
    HolomorphicExpr e(random_tree(rng, 5, n), n);
    const std::string s1 = print_expr(e);
    const HolomorphicExpr p1 = parse_expr(s1, n);
    const HolomorphicExpr p2 = parse_expr(print_expr(p1), n);
    INFO(s1);
    CHECK(p1 == p2);
    CHECK(print_expr(p1) == print_expr(p2));
    // Printing keeps the value.
    std::vector<cplx> x(n);
    for (auto& c : x) c = rng.in_annulus(0.5, 1.2);
    try {
      const cplx a = e(x), b = p1(x);
      if (std::isfinite(std::abs(a))) CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    } catch (const PoleError&) {
    }
  }
}
