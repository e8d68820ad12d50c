#include <doctest.h>

#include <random>

#include "lineorder/dyadic.hpp"

using namespace lineorder;

namespace {
Dyadic d(const char* s) { return Dyadic::parse(s); }
}  // namespace

TEST_CASE("dyadic arithmetic") {
  CHECK(d("3/8") + d("1/8") == d("1/2"));
  CHECK(d("3/4") * d("1/2") == d("3/8"));
  CHECK(d("5/16") - d("5/16") == Dyadic(0));
  CHECK((d("1/2") + d("1/2")).is_integer());
  CHECK(d("-3/4").to_string() == "-3/2^2");
  CHECK(d("6/8").exponent() == 2);
}

TEST_CASE("dyadic parsing") {
  CHECK(d("0.3125") == d("5/16"));
  CHECK(d("-0.5") == d("-1/2"));
  CHECK(d("7/2^3") == d("7/8"));
  CHECK(d("12") == Dyadic(12));
  CHECK_THROWS_AS(d("0.1"), InvalidInput);
  CHECK_THROWS_AS(d("1/3"), InvalidInput);
  CHECK_THROWS_AS(d(""), InvalidInput);
  CHECK_THROWS_AS(d("abc"), InvalidInput);
  CHECK_THROWS_AS(d("1/0"), InvalidInput);
}

TEST_CASE("dyadic floor") {
  CHECK(d("3/2").floor_int() == 1);
  CHECK(d("-1/4").floor_int() == -1);
  CHECK(Dyadic(2).floor_int() == 2);
  CHECK(d("-2").floor_int() == -2);
  CHECK(d("-1/4").ceil_int() == 0);
}

TEST_CASE("dyadic log2_exact") {
  CHECK(log2_exact(d("1/2")) == std::optional<std::int64_t>(-1));
  CHECK(log2_exact(Dyadic(4)) == std::optional<std::int64_t>(2));
  CHECK(!log2_exact(d("3/4")).has_value());
  CHECK_THROWS_AS(log2_exact(Dyadic(0)), InvalidInput);
  CHECK_THROWS_AS(log2_exact(d("-2")), InvalidInput);
}

TEST_CASE("dyadic properties against rationals") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> num(-1000, 1000);
  std::uniform_int_distribution<int> ex(0, 12);
  for (int i = 0; i < 500; ++i) {
    Dyadic x = Dyadic::from_parts(num(rng), ex(rng));
    Dyadic y = Dyadic::from_parts(num(rng), ex(rng));
    Dyadic z = Dyadic::from_parts(num(rng), ex(rng));
    CHECK((x + y).to_rational() == x.to_rational() + y.to_rational());
    CHECK((x - y).to_rational() == x.to_rational() - y.to_rational());
    CHECK((x * y).to_rational() == x.to_rational() * y.to_rational());
    CHECK(((x <=> y) < 0) == (x.to_rational() < y.to_rational()));
    if (x < y) CHECK(x + z < y + z);
    // normalized: exponent zero or odd numerator
    Dyadic s = x + y;
    CHECK((s.exponent() == 0 || mpz_odd_p(s.numerator().get_mpz_t())));
    CHECK(Dyadic::parse(x.to_string()) == x);
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), x.to_rational().get_num_mpz_t(), x.to_rational().get_den_mpz_t());
    CHECK(x.floor() == fl);
  }
}
