#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lineorder/dyadic.hpp"

namespace lineorder {

/// Compact interval [lo, hi] with dyadic endpoints, lo < hi.
struct Interval {
  Dyadic lo;
  Dyadic hi;

  Interval(Dyadic lo_, Dyadic hi_);
  Dyadic length() const { return hi - lo; }
  bool contains(const Dyadic& x) const { return lo <= x && x <= hi; }
  std::string to_string() const;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Open interval (lo, hi) with rational endpoints. Support components can
/// end at isolated fixed points of slope != 1 pieces, which need not be
/// dyadic.
struct OpenInterval {
  Rational lo;
  Rational hi;
  friend bool operator==(const OpenInterval& a, const OpenInterval& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
};

/// Closed set of fixed points [lo, hi] (lo == hi for an isolated point).
struct FixedRun {
  Rational lo;
  Rational hi;
};

enum class Side { Left, Right };
enum class Orientation { Preserving, Reversing };

/// Strictly increasing piecewise-linear bijection [x0, xm] -> [y0, ym],
/// affine on each [x_i, x_{i+1}] with x_i -> y_i. Stored in canonical form
/// (no breakpoint where left and right slopes agree), so two maps are equal
/// as functions iff their breakpoint and value lists are identical.
class PLMap {
 public:
  /// Validates (m >= 1, both lists strictly increasing, equal sizes) and
  /// canonicalizes. Throws InvalidInput.
  static PLMap from_points(std::vector<Dyadic> xs, std::vector<Dyadic> ys);
  static PLMap identity(const Interval& domain);
  /// x -> x + shift on the given domain.
  static PLMap shift(const Interval& domain, const Dyadic& shift);

  const std::vector<Dyadic>& breakpoints() const { return xs_; }
  const std::vector<Dyadic>& values() const { return ys_; }
  std::size_t pieces() const { return xs_.size() - 1; }
  Interval domain() const { return {xs_.front(), xs_.back()}; }
  Interval range() const { return {ys_.front(), ys_.back()}; }

  /// Every slope is an integer power of two.
  bool power2() const { return power2_; }
  Rational slope(std::size_t piece) const;
  /// log2 of the slope of a piece, when power2().
  std::int64_t slope_exponent(std::size_t piece) const { return slope_exp_[piece]; }

  /// Index i of the piece with x_i <= x < x_{i+1} (the last piece at x_m).
  std::size_t piece_of(const Dyadic& x) const;

  Dyadic operator()(const Dyadic& x) const { return evaluate(x); }
  Dyadic evaluate(const Dyadic& x) const;
  Rational evaluate(const Rational& x) const;

  bool is_identity() const;

  friend bool operator==(const PLMap& a, const PLMap& b) { return a.xs_ == b.xs_ && a.ys_ == b.ys_; }

 private:
  PLMap() = default;
  static PLMap build(std::vector<Dyadic> xs, std::vector<Dyadic> ys);
  void canonicalize();
  void compute_slopes();
  Dyadic eval_on_piece(std::size_t piece, const Dyadic& x) const;

  std::vector<Dyadic> xs_;
  std::vector<Dyadic> ys_;
  std::vector<std::int64_t> slope_exp_;
  bool power2_ = true;

  friend PLMap invert(const PLMap& f);
  friend PLMap compose(const PLMap& f, const PLMap& g);
};

/// x -> (x.f).g. Requires range(f) == domain(g).
PLMap compose(const PLMap& f, const PLMap& g);
PLMap invert(const PLMap& f);

/// Slope of the piece adjacent to x on the given side.
Dyadic one_sided_slope(const PLMap& f, const Dyadic& x, Side side);

/// iota o f o iota, iota the orientation-reversing isometry of I.
/// Requires domain(f) == range(f) == I.
PLMap flip_conjugate(const PLMap& f, const Interval& I);

/// Copy of the self-map f transported onto J by the isometry domain(f) -> J,
/// flipped first when orientation is Reversing.
PLMap isometry_conjugate(const PLMap& f, const Interval& J, Orientation orientation);

/// Domain and range both shifted by d.
PLMap translate(const PLMap& f, const Dyadic& d);

/// Restriction of f to sub, a subinterval of domain(f).
PLMap restrict(const PLMap& f, const Interval& sub);

/// Concatenation of maps with abutting domains and ranges.
PLMap glue(const std::vector<PLMap>& parts);

/// Maximal open intervals of the domain on which x.f != x. Works for any
/// map; components cut by the domain boundary end at that boundary.
std::vector<OpenInterval> moved_components(const PLMap& f);

/// Merged closed runs of fixed points, ascending.
std::vector<FixedRun> fixed_runs(const PLMap& f);

/// f is the identity on a neighbourhood of x (x interior to the domain).
bool fixes_neighbourhood(const PLMap& f, const Dyadic& x);

/// Support components of a self-map. Throws InvalidInput if domain != range.
std::vector<OpenInterval> support_components(const PLMap& f);

/// Endpoints of support components lying in the open domain.
std::vector<Rational> transition_points(const PLMap& f);

/// Smallest closed interval outside of which f is the identity, or nullopt
/// for the identity map.
std::optional<Interval> active_hull(const PLMap& f);

/// Power-of-two-slope map J -> I built by binary subdivision: both lengths
/// are split into their binary digits (largest first, left to right), then
/// the side with fewer pieces has its largest piece halved until the piece
/// counts agree.
PLMap dyadic_interval_map(const Interval& J, const Interval& I);

/// Power-of-two-slope self-map of S, the identity near both endpoints,
/// sending u to v. u, v must be interior to S.
PLMap dyadic_transporter(const Dyadic& u, const Dyadic& v, const Interval& S);

/// JSON array of [breakpoint, value] string pairs.
std::string to_json(const PLMap& f);
PLMap plmap_from_json(const std::string& text);

/// Standalone SVG plot of the graph of f.
std::string to_svg(const PLMap& f, const std::string& title = "");

}  // namespace lineorder
