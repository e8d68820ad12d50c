#include "lineorder/thompson.hpp"

#include <algorithm>

namespace lineorder {

namespace {

Dyadic q(long num, int exp) { return Dyadic::from_parts(num, exp); }

PLMap build_c0() {
  PLMap c = PLMap::from_points({0, q(1, 4), q(1, 3), q(1, 2), 1}, {0, q(1, 3), q(3, 4), q(1, 2), 1});
  // support (0, 1/4), pushes right, doubles on (0, 1/16)
  auto supp = support_components(c);
  if (supp.size() != 1 || supp[0].lo != 0 || supp[0].hi != Rational(1, 4)) throw InternalError("c0 support");
  if (!(c(q(1, 8)) > q(1, 8)) || c(q(1, 5)) != q(1, 4)) throw InternalError("c0 shape");
  return c;
}

PLMap extend_by_identity(const PLMap& inner, const Interval& outer) {
  std::vector<PLMap> parts;
  if (outer.lo < inner.domain().lo) parts.push_back(PLMap::identity({outer.lo, inner.domain().lo}));
  parts.push_back(inner);
  if (inner.domain().hi < outer.hi) parts.push_back(PLMap::identity({inner.domain().hi, outer.hi}));
  return glue(parts);
}

HGenerators build_generators() {
  const PLMap& psi = psi_map();
  PLMap psi_inv = invert(psi);
  Interval unit(0, 1);
  PLMap nu1 = compose(c0_map(), c1_map());
  PLMap nu2 = extend_by_identity(compose(compose(psi_inv, x0_map()), psi), unit);
  PLMap nu3 = extend_by_identity(compose(compose(psi_inv, x1_map()), psi), unit);
  if (flip_conjugate(nu1, unit) != nu1) throw InternalError("nu1 is not symmetric");
  for (const PLMap* g : {&nu1, &nu2, &nu3}) {
    if (!g->power2()) throw InternalError("H generator with non-dyadic slope");
  }
  for (const PLMap* g : {&nu2, &nu3}) {
    auto hull = active_hull(*g);
    if (!hull || hull->lo < q(1, 4) || hull->hi > q(15, 4)) throw InternalError("nu2/nu3 support");
  }
  return {nu1, nu2, nu3};
}

Dyadic mod_period(const Dyadic& x, const Dyadic& p) {
  // x - floor(x/p) p, for integer p
  Rational r = x.to_rational() / p.to_rational();
  mpz_class k;
  mpz_fdiv_q(k.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return x - Dyadic(k) * p;
}

Dyadic floor_multiple(const Dyadic& x, const Dyadic& p) { return x - mod_period(x, p); }

}  // namespace

const PLMap& c0_map() {
  static const PLMap c = build_c0();
  return c;
}

const PLMap& c1_map() {
  static const PLMap c = flip_conjugate(c0_map(), {0, 1});
  return c;
}

const PLMap& x0_map() {
  static const PLMap x = PLMap::from_points({0, q(1, 2), q(1, 1), 1}, {0, q(1, 1), q(3, 2), 1});
  return x;
}

const PLMap& x1_map() {
  static const PLMap x = glue({PLMap::identity({0, q(1, 1)}), PLMap::from_points({q(1, 1), q(5, 3), q(3, 2), 1},
                                                                                  {q(1, 1), q(3, 2), q(7, 3), 1})});
  return x;
}

const PLMap& psi_map() {
  static const PLMap p = PLMap::from_points({0, q(1, 1), q(3, 2), 1}, {q(1, 4), q(9, 4), q(13, 4), q(15, 4)});
  return p;
}

const HGenerators& h_generators() {
  static const HGenerators gens = build_generators();
  return gens;
}

const PLMap& h_generator(int i) {
  const auto& g = h_generators();
  switch (i) {
    case 1: return g.nu1;
    case 2: return g.nu2;
    case 3: return g.nu3;
    default: throw InvalidInput("H generator index must be 1, 2 or 3");
  }
}

PLMap conjugate(const PLMap& g, const PLMap& f) { return compose(compose(invert(f), g), f); }

PLMap commutator(const PLMap& f, const PLMap& g) {
  return compose(compose(invert(f), invert(g)), compose(f, g));
}

bool check_f_relations(const PLMap& f, const PLMap& g) {
  PLMap base = compose(f, invert(g));
  PLMap r1 = commutator(base, conjugate(g, f));
  PLMap r2 = commutator(base, conjugate(g, compose(f, f)));
  return r1.is_identity() && r2.is_identity();
}

bool check_f_relations() { return check_f_relations(x0_map(), x1_map()); }

// ---------------------------------------------------------------------------
// circle maps

CircleMap CircleMap::from_lift(const PLMap& lift, std::int64_t period) {
  if (period <= 0) throw InvalidInput("circle period must be positive");
  Dyadic p(period);
  if (lift.domain().length() != p || lift.range().length() != p) {
    throw InvalidInput("circle lift must map an interval of length p onto one of length p");
  }
  if (!lift.power2()) throw InvalidInput("circle lift has a slope that is not a power of two");
  PLMap on_zero = periodic_lift_on(lift, p, 0);
  Dyadic c = on_zero.values().front();
  Dyadic shift = floor_multiple(c, p);
  std::vector<Dyadic> ys = on_zero.values();
  for (auto& y : ys) y -= shift;
  return CircleMap(PLMap::from_points(on_zero.breakpoints(), ys), period);
}

CircleMap CircleMap::identity(std::int64_t period) {
  if (period <= 0) throw InvalidInput("circle period must be positive");
  return CircleMap(PLMap::identity({0, Dyadic(period)}), period);
}

CircleMap CircleMap::rotation(const Dyadic& angle, std::int64_t period) {
  if (period <= 0) throw InvalidInput("circle period must be positive");
  return from_lift(PLMap::shift({0, Dyadic(period)}, angle), period);
}

Dyadic CircleMap::operator()(const Dyadic& x) const {
  Dyadic p(period_);
  return mod_period(lift_(mod_period(x, p)), p);
}

PLMap periodic_lift_on(const PLMap& lift, const Dyadic& period, const Dyadic& start) {
  Dyadic a = lift.domain().lo;
  if (lift.domain().length() != period) throw InvalidInput("lift domain length differs from the period");
  // k with start in [a + k p, a + (k+1) p)
  Dyadic k_p = floor_multiple(start - a, period);
  PLMap base = translate(lift, k_p);  // on [a + kp, a + kp + p]
  Dyadic mid = base.domain().hi;
  if (start == base.domain().lo) return base;
  PLMap next = translate(lift, k_p + period);
  std::vector<PLMap> parts{restrict(base, {start, mid}), restrict(next, {mid, start + period})};
  return glue(parts);
}

CircleMap circle_compose(const CircleMap& f, const CircleMap& g) {
  if (f.period() != g.period()) throw InvalidInput("circle maps have different periods");
  Dyadic p(f.period());
  PLMap g_on = periodic_lift_on(g.lift(), p, f.offset());
  return CircleMap::from_lift(compose(f.lift(), g_on), f.period());
}

CircleMap circle_inverse(const CircleMap& f) { return CircleMap::from_lift(invert(f.lift()), f.period()); }

TDecomposition decompose_t(const CircleMap& t) {
  CircleMap s = CircleMap::rotation(t.offset(), t.period());
  CircleMap f = circle_compose(t, circle_inverse(s));
  if (f.offset() != 0) throw InternalError("decompose_t: F(p) factor moves 0");
  return {s, f};
}

// ---------------------------------------------------------------------------
// rotation numbers

std::string RotationNumber::to_string() const {
  if (exact) return lineorder::to_string(value);
  return "[" + lineorder::to_string(lo) + ", " + lineorder::to_string(hi) + "]";
}

namespace {

// x in [lo(F), hi(F)] with x.F - x == target, or nullopt.
std::optional<Rational> solve_displacement(const PLMap& F, const Dyadic& target) {
  const auto& xs = F.breakpoints();
  const auto& ys = F.values();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (ys[i] - xs[i] == target) return xs[i].to_rational();
  }
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    Dyadic d0 = ys[i] - xs[i] - target;
    Dyadic d1 = ys[i + 1] - xs[i + 1] - target;
    if (d0.sign() * d1.sign() < 0) {
      Rational a = d0.to_rational();
      Rational b = d1.to_rational();
      return xs[i].to_rational() + a * (xs[i + 1] - xs[i]).to_rational() / (a - b);
    }
  }
  return std::nullopt;
}

mpz_class ceil_div(const Dyadic& x, const Dyadic& p) {
  Rational r = x.to_rational() / p.to_rational();
  mpz_class out;
  mpz_cdiv_q(out.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return out;
}

}  // namespace

RotationNumber lift_translation_number(const PLMap& lift, const Dyadic& period, int Q, int N) {
  if (Q < 1 || N < 1) throw InvalidInput("rotation number bounds Q and N must be positive");
  PLMap F = periodic_lift_on(lift, period, 0);
  PLMap power = F;
  for (int qq = 1; qq <= Q; ++qq) {
    if (qq > 1) power = compose(power, periodic_lift_on(F, period, power.values().front()));
    Dyadic lo_d = power.values().front() - power.breakpoints().front();
    Dyadic hi_d = lo_d;
    for (std::size_t i = 0; i < power.breakpoints().size(); ++i) {
      Dyadic d = power.values()[i] - power.breakpoints()[i];
      lo_d = std::min(lo_d, d);
      hi_d = std::max(hi_d, d);
    }
    mpz_class r = ceil_div(lo_d, period);
    if (Dyadic(r) * period <= hi_d) {
      RotationNumber out;
      out.exact = true;
      out.q = qq;
      out.value = Dyadic(r).to_rational() * period.to_rational() / Rational(qq);
      out.value.canonicalize();
      auto x = solve_displacement(power, Dyadic(r) * period);
      if (!x) throw InternalError("rotation number: periodic point vanished");
      out.periodic_point = *x;
      out.lo = out.hi = out.value;
      return out;
    }
  }
  Dyadic x = 0;
  for (int i = 0; i < N; ++i) {
    Dyadic base = floor_multiple(x, period);
    x = F(x - base) + base;
  }
  RotationNumber out;
  Rational mean = x.to_rational() / Rational(N);
  Rational err = period.to_rational() / Rational(N);
  out.lo = mean - err;
  out.hi = mean + err;
  out.lo.canonicalize();
  out.hi.canonicalize();
  return out;
}

RotationNumber rotation_number(const CircleMap& t, int Q, int N) {
  RotationNumber out = lift_translation_number(t.lift(), Dyadic(t.period()), Q, N);
  if (out.exact && out.value >= t.period()) {
    out.value -= t.period();
    out.lo = out.hi = out.value;
  }
  return out;
}

}  // namespace lineorder
