#pragma once

#include <optional>
#include <string>

#include "lineorder/plmap.hpp"

namespace lineorder {

/// Fixed maps on [0,1]. c0 doubles near 0 and has support (0, 1/4); c1 is its
/// flip; x0, x1 are the standard generators of F; psi is the affine-by-parts
/// embedding [0,1] -> [1/16, 15/16] used to build nu2, nu3.
const PLMap& c0_map();
const PLMap& c1_map();
const PLMap& x0_map();
const PLMap& x1_map();
const PLMap& psi_map();

/// nu1 = c0 c1, nu2, nu3: generators of H. Validated on first use.
struct HGenerators {
  PLMap nu1;
  PLMap nu2;
  PLMap nu3;
};
const HGenerators& h_generators();
/// nu_i for i in {1, 2, 3}.
const PLMap& h_generator(int i);

/// f^-1 g f (left-to-right).
PLMap conjugate(const PLMap& g, const PLMap& f);
/// f^-1 g^-1 f g.
PLMap commutator(const PLMap& f, const PLMap& g);

/// Both relators [f g^-1, g^f] and [f g^-1, g^(f^2)] are the identity.
bool check_f_relations(const PLMap& f, const PLMap& g);
/// check_f_relations(x0, x1).
bool check_f_relations();

/// Element of T(p): a lift [0, p] -> [c, c + p] of a PL homeomorphism of the
/// circle [0, p]/{0, p}, normalized so that c lies in [0, p).
class CircleMap {
 public:
  /// Accepts any lift [a, a + p] -> [b, b + p] and renormalizes. Throws
  /// InvalidInput unless slopes are powers of two.
  static CircleMap from_lift(const PLMap& lift, std::int64_t period);
  static CircleMap identity(std::int64_t period);
  static CircleMap rotation(const Dyadic& angle, std::int64_t period);

  const PLMap& lift() const { return lift_; }
  std::int64_t period() const { return period_; }
  /// 0 . f, in [0, p).
  const Dyadic& offset() const { return lift_.values().front(); }
  /// Image of x in [0, p), reduced mod p.
  Dyadic operator()(const Dyadic& x) const;
  bool is_identity() const { return lift_.is_identity(); }

  friend bool operator==(const CircleMap&, const CircleMap&) = default;

 private:
  CircleMap(PLMap lift, std::int64_t period) : lift_(std::move(lift)), period_(period) {}
  PLMap lift_;
  std::int64_t period_;
};

/// x -> (x.f).g on the circle.
CircleMap circle_compose(const CircleMap& f, const CircleMap& g);
CircleMap circle_inverse(const CircleMap& f);

/// t = f s (left-to-right) with s the rotation by 0.t and f fixing 0.
struct TDecomposition {
  CircleMap s;
  CircleMap f;
};
TDecomposition decompose_t(const CircleMap& t);

/// Degree-one lift F: [a, a+p] -> [F(a), F(a)+p] extended p-equivariantly to
/// all of R, restricted to [start, start + p].
PLMap periodic_lift_on(const PLMap& lift, const Dyadic& period, const Dyadic& start);

/// Exact rational value r p / q, or a certified enclosing interval.
struct RotationNumber {
  bool exact = false;
  Rational value;
  std::int64_t q = 0;
  /// A point x with x.F^q = x + r p when exact.
  Rational periodic_point;
  Rational lo;
  Rational hi;
  std::string to_string() const;
};

/// Translation number lim (0.F^n)/n of a p-equivariant lift given on
/// [a, a + p]. Searches q = 1..Q for solutions of x.F^q = x + r p; falls
/// back to (0.F^N)/N +- p/N.
RotationNumber lift_translation_number(const PLMap& lift, const Dyadic& period, int Q = 64, int N = 4096);

/// Rotation number of t in [0, p). An unresolved value is reported as the
/// interval for the normalized lift.
RotationNumber rotation_number(const CircleMap& t, int Q = 64, int N = 4096);

}  // namespace lineorder
