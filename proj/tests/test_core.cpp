#include <random>

#include "doctest.h"
#include "spf/enumerate.hpp"
#include "spf/error.hpp"
#include "spf/parse.hpp"
#include "spf/rational.hpp"
#include "spf/set.hpp"
#include "spf/solver.hpp"

using namespace spf;

TEST_CASE("rational normalizes and orders") {
  CHECK(Rational(4, -6) == Rational(-2, 3));
  CHECK(Rational(-7, 2).floor() == -4);
  CHECK(Rational(-7, 2).ceil() == -3);
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(2, 3) < Rational(3, 4));
  CHECK(Rational(3, 4) / Rational(3, 2) == Rational(1, 2));
  CHECK_THROWS_AS(Rational(INT64_MAX) * Rational(3), Overflow);
}

TEST_CASE("rational arithmetic matches cross multiplication") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int64_t> d(-50, 50);
  for (int i = 0; i < 2000; ++i) {
    int64_t a = d(rng), b = d(rng), c = d(rng), e = d(rng);
    if (!b || !e) continue;
    Rational x(a, b), y(c, e);
    Rational s = x + y, p = x * y;
    CHECK(s.num() * (b * e) == (a * e + c * b) * s.den());
    CHECK(p.num() * (b * e) == a * c * p.den());
    CHECK((x < y) == ((long double)a / b < (long double)c / e));
    CHECK(gcd64(s.num(), s.den()) == 1);
    CHECK(s.den() > 0);
  }
}

TEST_CASE("floor and ceil division round the right way") {
  for (int64_t a = -20; a <= 20; ++a)
    for (int64_t b : {-7, -3, -1, 1, 2, 5}) {
      int64_t f = floorDiv(a, b), c = ceilDiv(a, b);
      CHECK((long double)f <= (long double)a / b);
      CHECK((long double)f + 1 > (long double)a / b);
      CHECK((long double)c >= (long double)a / b);
      CHECK((long double)c - 1 < (long double)a / b);
    }
}

TEST_CASE("affine expressions stay normalized") {
  AffineExpr e = AffineExpr::var("x") * 2 + AffineExpr::var("y") - AffineExpr::var("x") * 2 + 3;
  CHECK(e == AffineExpr::var("y") + 3);
  CHECK(e.coeff("x") == 0);
  AffineExpr u = AffineExpr::app("f", {AffineExpr::var("i") + 1});
  CHECK(u.mentionsInUf("i"));
  CHECK(u.coeff("i") == 0);
  CHECK(u.hasUf());
  CHECK(u.substitute({{"i", AffineExpr(4)}}) == AffineExpr::app("f", {AffineExpr(5)}));
  CHECK(parseAffine("2*i - f(j+1) + 3") ==
        AffineExpr::var("i", 2) - AffineExpr::app("f", {AffineExpr::var("j") + 1}) + 3);
}

TEST_CASE("set notation parses and enumerates") {
  PresburgerSet s = parseSet("{[i,j] : 0 <= i < n and i <= j < n}");
  CHECK(s.tuple.size() == 2);
  CHECK(s.parameters() == std::set<std::string>{"n"});
  Env env;
  env.vals["n"] = 3;
  auto pts = enumerate(s, {{"i", {-2, 5}}, {"j", {-2, 5}}}, env);
  CHECK(pts.size() == 6);
  CHECK(pts.front() == std::vector<int64_t>{0, 0});
  CHECK(pts.back() == std::vector<int64_t>{2, 2});
  CHECK_THROWS_AS(parseSet("{[i] : i < }"), Error);
}

TEST_CASE("intersect, apply and inverse agree with enumeration") {
  PresburgerSet a = parseSet("{[i] : 0 <= i < 10}");
  PresburgerSet b = parseSet("{[i] : 4 <= i}");
  Env env;
  Box box{{"i", {-5, 20}}};
  CHECK(enumerate(intersect(a, b), box, env).size() == 6);

  PresburgerRelation r = parseRelation("{[i] -> [k] : k = 2*i + 1}");
  PresburgerSet img = apply(a, r);
  auto pts = enumerate(img, {{"k", {-5, 30}}}, env, {-5, 20});
  REQUIRE(pts.size() == 10);
  for (size_t n = 0; n < pts.size(); ++n) CHECK(pts[n][0] == 2 * (int64_t)n + 1);

  auto back = enumerate(inverse(r), {{"k", {0, 4}}, {"i", {-5, 5}}}, env);
  CHECK(back.size() == 2); // k = 1 and k = 3
}

TEST_CASE("uninterpreted functions read concrete arrays") {
  PresburgerSet s = parseSet("{[p,j] : 0 <= p < 2 and rowPtr(p) <= j < rowPtr(p+1)}");
  Env env;
  env.arrays["rowPtr"] = {0, 2, 3};
  auto pts = enumerate(s, {{"p", {0, 3}}, {"j", {0, 5}}}, env);
  CHECK(pts == std::vector<std::vector<int64_t>>{{0, 0}, {0, 1}, {1, 2}});
}

TEST_CASE("solver decides simple theories") {
  auto x = AffineExpr::var("x"), y = AffineExpr::var("y");
  auto fx = AffineExpr::app("f", {x}), fy = AffineExpr::app("f", {y});
  CHECK(solve({Formula::ge(x, 0), Formula::le(x * 2, 1), Formula::ge(x * 2, 1)}).verdict == Verdict::Unsat);
  CHECK(solve({Formula::eq(x, y), Formula::ne(fx, fy)}).verdict == Verdict::Unsat);
  SolveResult r = solve({Formula::lt(x, y), Formula::gt(fx, fy), Formula::ge(x, 0)});
  CHECK(r.verdict == Verdict::Sat);
  CHECK(r.model.at("x") < r.model.at("y"));
  // sorted f and x < y force f(x) < f(y)
  Formula sorted = Formula::implies(Formula::lt(x, y), Formula::lt(fx, fy));
  CHECK(solve({sorted, Formula::lt(x, y), Formula::ge(fx, fy)}).verdict == Verdict::Unsat);
  std::string smt = toSmtLib({Formula::eq(fx, 3)}, "probe");
  CHECK(smt.find("(declare-fun |f| (Int) Int)") != std::string::npos);
  CHECK(smt.find("(check-sat)") != std::string::npos);
}

TEST_CASE("solver models satisfy the query") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int64_t> c(-3, 3);
  auto x = AffineExpr::var("x"), y = AffineExpr::var("y"), z = AffineExpr::var("z");
  int sat = 0;
  for (int q = 0; q < 300; ++q) {
    std::vector<Formula> fs;
    for (int k = 0; k < 3; ++k) {
      AffineExpr e = x * c(rng) + y * c(rng) + z * c(rng) + c(rng);
      fs.push_back(k == 2 ? Formula::ne(e, 0) : Formula::ge(e, 0));
    }
    for (auto &v : {x, y, z}) {
      fs.push_back(Formula::ge(v, -4));
      fs.push_back(Formula::le(v, 4));
    }
    SolveResult r = solve(fs);
    REQUIRE(r.verdict != Verdict::Unknown);
    bool brute = false;
    Env env;
    for (int64_t a = -4; a <= 4 && !brute; ++a)
      for (int64_t b = -4; b <= 4 && !brute; ++b)
        for (int64_t d = -4; d <= 4 && !brute; ++d) {
          env.vals = {{"x", a}, {"y", b}, {"z", d}};
          bool all = true;
          for (auto &f : fs) all = all && f.holds(env);
          brute = all;
        }
    CHECK((r.verdict == Verdict::Sat) == brute);
    if (r.verdict == Verdict::Sat) {
      ++sat;
      env.vals = {r.model.begin(), r.model.end()};
      for (auto &f : fs) CHECK(f.holds(env));
    }
  }
  CHECK(sat > 0);
}
