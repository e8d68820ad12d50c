#include <doctest.h>

#include <random>

#include "lineorder/thompson.hpp"

using namespace lineorder;

namespace {

Dyadic d(const char* s) { return Dyadic::parse(s); }

PLMap random_f(std::mt19937_64& rng, const Interval& I, int factors) {
  std::uniform_int_distribution<int> pick(1, 255);
  PLMap f = PLMap::identity(I);
  for (int i = 0; i < factors; ++i) {
    Dyadic u = I.lo + I.length() * Dyadic::from_parts(pick(rng), 8);
    Dyadic v = I.lo + I.length() * Dyadic::from_parts(pick(rng), 8);
    f = compose(f, dyadic_transporter(u, v, I));
  }
  return f;
}

// Translation number by brute iteration of the lift with exact arithmetic;
// used only to cross-check the exact solver within its error bound.
Rational iterate_mean(const CircleMap& t, int n) {
  Dyadic p(t.period());
  Dyadic x = 0;
  for (int i = 0; i < n; ++i) {
    Dyadic base = Dyadic(x.floor_int() / t.period() * t.period());
    if (x < base) base -= p;
    while (x - base >= p) base += p;
    x = t.lift()(x - base) + base;
  }
  return x.to_rational() / Rational(n);
}

}  // namespace

TEST_CASE("H generators") {
  const auto& g = h_generators();
  CHECK(flip_conjugate(g.nu1, {0, 1}) == g.nu1);
  auto hull2 = active_hull(g.nu2);
  REQUIRE(hull2);
  CHECK(hull2->lo >= d("1/16"));
  CHECK(hull2->hi <= d("15/16"));
  auto s2 = support_components(g.nu2);
  REQUIRE(s2.size() == 1);
  CHECK(s2[0].lo == Rational(1, 16));
  CHECK(s2[0].hi == Rational(15, 16));
  CHECK(g.nu1(d("1/32")) == d("1/16"));
  for (int k = 0; k <= 32; ++k) {
    Dyadic x = Dyadic::from_parts(k, 5);
    CHECK(g.nu1(Dyadic(1) - x) == Dyadic(1) - g.nu1(x));
    CHECK(g.nu1(x) == c1_map()(c0_map()(x)));
  }
  // on [1/16, 15/16], nu2 is psi-conjugate of x0
  for (int k = 0; k <= 16; ++k) {
    Dyadic t = Dyadic::from_parts(k, 4);
    CHECK(g.nu2(psi_map()(t)) == psi_map()(x0_map()(t)));
    CHECK(g.nu3(psi_map()(t)) == psi_map()(x1_map()(t)));
  }
  CHECK_THROWS_AS(h_generator(4), InvalidInput);
}

TEST_CASE("F relators") {
  CHECK(check_f_relations());
  CHECK(check_f_relations(x0_map(), x1_map()));
  CHECK(!check_f_relations(x0_map(), compose(x0_map(), x1_map())));
  CHECK(check_f_relations(x0_map(), x0_map()));
  PLMap id = PLMap::identity({0, 1});
  CHECK(check_f_relations(id, id));
}

TEST_CASE("circle compose and rotations") {
  auto half = CircleMap::rotation(d("1/2"), 1);
  CHECK(circle_compose(half, half).is_identity());
  auto quarter = CircleMap::rotation(d("1/4"), 1);
  CHECK(circle_compose(quarter, quarter) == half);
  CHECK(circle_compose(quarter, circle_inverse(quarter)).is_identity());
  CHECK(CircleMap::rotation(d("5/4"), 1) == quarter);
  CHECK(CircleMap::rotation(d("-3/4"), 1) == quarter);
  CHECK(half(d("3/4")) == d("1/4"));
  CHECK_THROWS_AS(circle_compose(half, CircleMap::identity(2)), InvalidInput);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    std::int64_t p = 1 + i % 3;
    Interval I(0, Dyadic(p));
    auto f = circle_compose(CircleMap::from_lift(random_f(rng, I, 3), p),
                            CircleMap::rotation(Dyadic::from_parts(i * 7 % 16, 4) * Dyadic(p), p));
    auto g = circle_compose(CircleMap::rotation(Dyadic::from_parts(i % 8, 3), p),
                            CircleMap::from_lift(random_f(rng, I, 2), p));
    auto h = CircleMap::from_lift(random_f(rng, I, 2), p);
    CHECK(circle_compose(circle_compose(f, g), h) == circle_compose(f, circle_compose(g, h)));
    CHECK(circle_compose(f, circle_inverse(f)).is_identity());
    for (int k = 0; k < 8 * p; ++k) {
      Dyadic x = Dyadic::from_parts(k, 3);
      CHECK(circle_compose(f, g)(x) == g(f(x)));
    }
  }
}

TEST_CASE("decompose_t") {
  auto r = CircleMap::rotation(d("3/4"), 1);
  auto dr = decompose_t(r);
  CHECK(dr.s == r);
  CHECK(dr.f.is_identity());
  std::mt19937_64 rng(9);
  auto fixer = CircleMap::from_lift(random_f(rng, {0, 1}, 3), 1);
  auto df = decompose_t(fixer);
  CHECK(df.s.is_identity());
  CHECK(df.f == fixer);
  for (int i = 0; i < 20; ++i) {
    auto f = CircleMap::from_lift(random_f(rng, {0, 2}, 3), 2);
    auto s = CircleMap::rotation(Dyadic::from_parts(1 + i, 3), 2);
    auto t = circle_compose(f, s);
    auto parts = decompose_t(t);
    CHECK(parts.f.offset() == Dyadic(0));
    CHECK(circle_compose(parts.f, parts.s) == t);
    CHECK(parts.s == s);
    CHECK(parts.f == f);
  }
}

TEST_CASE("rotation numbers") {
  auto r = rotation_number(CircleMap::rotation(d("3/8"), 1));
  CHECK(r.exact);
  CHECK(r.value == Rational(3, 8));
  std::mt19937_64 rng(13);
  auto fixer = CircleMap::from_lift(random_f(rng, {0, 1}, 3), 1);
  auto r0 = rotation_number(fixer);
  CHECK(r0.exact);
  CHECK(r0.value == 0);
  // rotation by 1/2 after an F(1)-element commuting with it has period 2
  PLMap half_f = random_f(rng, {0, d("1/2")}, 2);
  PLMap sym = glue({half_f, translate(half_f, d("1/2"))});
  auto t = circle_compose(CircleMap::from_lift(sym, 1), CircleMap::rotation(d("1/2"), 1));
  auto rt = rotation_number(t);
  CHECK(rt.exact);
  CHECK(rt.value == Rational(1, 2));
  CHECK(rt.q == 2);
  for (int i = 0; i < 25; ++i) {
    std::int64_t p = 1 + i % 3;
    auto s = circle_compose(CircleMap::from_lift(random_f(rng, {0, Dyadic(p)}, 3), p),
                            CircleMap::rotation(Dyadic::from_parts(i * 5 % 32, 5) * Dyadic(p), p));
    auto rs = rotation_number(s);
    Rational mean = iterate_mean(s, 2048);
    Rational err(p, 2048);
    err.canonicalize();
    if (rs.exact) {
      Rational gap = abs(rs.value - mean);
      CHECK((gap <= err || abs(gap - p) <= err));
      CHECK(rs.value >= 0);
      CHECK(rs.value < p);
      // periodic point witness
      CHECK(rs.q >= 1);
    } else {
      CHECK(rs.lo <= mean);
      CHECK(mean <= rs.hi);
    }
  }
  auto fallback = rotation_number(CircleMap::rotation(d("1/1024"), 1), 4, 64);
  CHECK(!fallback.exact);
  CHECK(fallback.lo <= Rational(1, 1024));
  CHECK(Rational(1, 1024) <= fallback.hi);
}
