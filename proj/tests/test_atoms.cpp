#include <doctest.h>

#include <random>

#include "lineorder/atoms.hpp"
#include "lineorder/thompson.hpp"

using namespace lineorder;

namespace {

Dyadic d(const char* s) { return Dyadic::parse(s); }

LabellingPtr recursive() {
  static LabellingPtr r = quasi_periodic_recursive();
  return r;
}

LabellingPtr periodic(const char* w) { return periodic_from_word(LWord::parse(w)); }

Interval iv(long a, long b) { return {Dyadic(a), Dyadic(b)}; }


}  // namespace

TEST_CASE("atoms in a window") {
  auto rho = recursive();
  LazyHomeo l2 = lambda_embed(rho, h_generator(2));
  auto atoms = atoms_in_window(l2, iv(0, 4));
  REQUIRE(atoms.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(atoms[k].carrier == iv(static_cast<long>(k), static_cast<long>(k) + 1));
    CHECK_FALSE(atoms[k].partial);
  }
  CHECK(atoms_in_window(LazyHomeo::identity(rho), iv(-5, 5)).empty());
  // nu1 moves integers, so every run is cut by the window
  auto cut = atoms_in_window(lambda_embed(rho, h_generator(1)), iv(-3, 3));
  REQUIRE(cut.size() == 1);
  CHECK(cut[0].partial);
  CHECK_THROWS_AS(atoms_in_window(l2, Interval(d("1/2"), 3)), InvalidInput);
}

TEST_CASE("special elements have one atom per match") {
  auto rho = recursive();
  const std::int64_t n = 9;
  LazyHomeo g = special_element(rho, iv(0, 1), n, free_pair_map());
  LWord ctx = word_on_interval(*rho, iv(0, 1), n);
  int matches = 0;
  for (long j = -40; j < 40; ++j) {
    LWord c = word_on_interval(*rho, iv(j, j + 1), n);
    if (c == ctx || c == formal_inverse(ctx)) ++matches;
  }
  auto atoms = atoms_in_window(g, iv(-40, 40));
  CHECK(static_cast<int>(atoms.size()) == matches);
  auto near = atoms_in_window(g, iv(-2, 3));
  REQUIRE(near.size() == 1);
  CHECK(near[0].carrier == iv(0, 1));
}

TEST_CASE("atom carriers are disjoint and cover the support") {
  std::mt19937 rng(13);
  auto sigma = periodic("a b a b' a' b'");
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<GenSymbol> s;
    for (int i = 0; i < 3; ++i) s.push_back(GenSymbol::from_generator(static_cast<int>(rng() % 6), rng() % 2 == 1));
    LazyHomeo h = LazyHomeo::from_word(sigma, GroupWord(s));
    Interval W = iv(-6, 6);
    auto atoms = atoms_in_window(h, W);
    for (std::size_t i = 1; i < atoms.size(); ++i) CHECK(atoms[i - 1].carrier.hi <= atoms[i].carrier.lo);
    PLMap R = window_restrict(h, W);
    for (const auto& c : moved_components(R)) {
      bool covered = false;
      for (const auto& a : atoms) {
        if (a.carrier.lo.to_rational() <= c.lo && c.hi <= a.carrier.hi.to_rational()) covered = true;
      }
      CHECK(covered);
    }
  }
}

TEST_CASE("classification of decorated atoms") {
  auto rho = recursive();
  PLMap f = free_pair_map();
  auto atom_at = [&](long m, bool flipped) {
    PLMap base = flipped ? flip_conjugate(f, iv(0, 1)) : f;
    return Atom{iv(m, m + 1), translate(base, Dyadic(m)), false};
  };
  // find cells with equal, inverse and different contexts
  std::optional<long> same, inverse, other;
  LWord c0 = word_on_interval(*rho, iv(0, 1), 1);
  for (long m = 1; m < 200; ++m) {
    LWord c = word_on_interval(*rho, iv(m, m + 1), 1);
    if (!same && c == c0) same = m;
    if (!inverse && c == formal_inverse(c0)) inverse = m;
    if (!other && c != c0 && c != formal_inverse(c0)) other = m;
  }
  REQUIRE(same);
  REQUIRE(inverse);
  REQUIRE(other);
  DecoratedAtom a0 = decorate(*rho, atom_at(0, false), 1);
  CHECK(classify({a0, decorate(*rho, atom_at(*same, false), 1)}).count == 1);
  CHECK(classify({a0, decorate(*rho, atom_at(*inverse, true), 1)}).count == 1);
  CHECK(classify({a0, decorate(*rho, atom_at(*inverse, false), 1)}).count == 2);
  CHECK(classify({a0, decorate(*rho, atom_at(*other, false), 1)}).count == 2);
}

TEST_CASE("l_f constants") {
  auto rho = recursive();
  CHECK(l_f_constant(lambda_embed(rho, h_generator(2)), 1, iv(-10, 10)) == 2);
  CHECK(l_f_constant(LazyHomeo::identity(rho), 3, iv(-10, 10)) == 3);
  LazyHomeo wide = special_element(rho, iv(0, 2), 2, free_pair_map());
  CHECK(l_f_constant(wide, 1, iv(-3, 5)) == 3);
  CHECK_THROWS_AS(l_f_constant(lambda_embed(rho, h_generator(1)), 1, iv(-3, 3)), InvalidInput);
}

TEST_CASE("periodic stability") {
  auto ab = periodic("a b");
  auto flips = periodic("a b a b'");
  for (auto sigma : {ab, flips}) {
    auto r = periodic_stability(lambda_embed(sigma, h_generator(2)));
    CHECK(r.stable);
    CHECK(r.classes.count >= 1);
    CHECK(r.classes.count <= 2);
  }
  CHECK(periodic_stability(lambda_embed(ab, h_generator(2))).classes.count == 1);
  CHECK(periodic_stability(lambda_embed(flips, h_generator(2))).classes.count == 2);
  auto shift = periodic_stability(LazyHomeo::translation(flips, Dyadic(2)));
  CHECK_FALSE(shift.stable);
  REQUIRE(shift.unstable_run);
  auto id = periodic_stability(LazyHomeo::identity(flips));
  CHECK(id.stable);
  CHECK(id.atoms.empty());
  CHECK_THROWS_AS(periodic_stability(LazyHomeo::identity(recursive())), InvalidInput);
}

TEST_CASE("cellular decompositions over periodic labellings") {
  std::mt19937 rng(21);
  auto sigma = periodic("a b' a' b a b a' b'");
  int done = 0;
  for (int trial = 0; trial < 400 && done < 12; ++trial) {
    std::vector<GenSymbol> s;
    int len = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < len; ++i) s.push_back(GenSymbol::from_generator(static_cast<int>(rng() % 6), rng() % 2 == 1));
    LazyHomeo h = LazyHomeo::from_word(sigma, GroupWord(s));
    auto st = periodic_stability(h);
    if (!st.stable || st.atoms.empty()) continue;
    ++done;
    std::int64_t p = st.period;
    std::int64_t k = locality_constant(h, iv(0, p));
    auto cd = cellular_decomposition(h, k, *st.window);
    CHECK(cd.classes.count == st.classes.count);
    CHECK(cd.classes.count <= 2 * p);
    LazyHomeo prod = LazyHomeo::identity(sigma);
    for (const auto& piece : cd.pieces) prod = prod * piece;
    CHECK(window_restrict(prod, iv(0, p)) == window_restrict(h, iv(0, p)));
    for (std::size_t i = 0; i < cd.pieces.size(); ++i) {
      for (std::size_t j = i + 1; j < cd.pieces.size(); ++j) {
        LazyHomeo c = commutator(cd.pieces[i], cd.pieces[j]);
        CHECK(window_restrict(c, iv(-p, 2 * p)).is_identity());
      }
      CHECK(krho_window_check(cd.pieces[i], k + cd.max_atom_length, iv(-2 * p, 2 * p)).passed);
    }
    if (cd.pieces.size() == 1) CHECK(window_restrict(cd.pieces[0], iv(-p, p)) == window_restrict(h, iv(-p, p)));
  }
  CHECK(done == 12);
  std::string csv = atoms_csv(periodic_stability(lambda_embed(sigma, h_generator(3))).atoms,
                              periodic_stability(lambda_embed(sigma, h_generator(3))).classes);
  CHECK(csv.rfind("carrier_lo,carrier_hi,class,context\n", 0) == 0);
}

TEST_CASE("atom classes stabilize as the window grows") {
  auto rho = recursive();
  LazyHomeo h = LazyHomeo::from_word(rho, GroupWord::parse("z2 z3'"));
  REQUIRE(fixes_neighbourhood(window_restrict(h, iv(-1, 1)), Dyadic(0)));
  std::vector<int> counts;
  for (long r : {8, 16, 32, 64}) {
    std::vector<DecoratedAtom> decorated;
    for (const auto& a : atoms_in_window(h, iv(-r, r))) {
      if (!a.partial) decorated.push_back(decorate(*rho, a, 2));
    }
    counts.push_back(classify(decorated).count);
  }
  for (std::size_t i = 1; i < counts.size(); ++i) CHECK(counts[i] >= counts[i - 1]);
  CHECK(counts[2] == counts[3]);
}
