#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lineorder/labelling.hpp"
#include "lineorder/plmap.hpp"

namespace lineorder {

/// zeta_i acts on integer cells [n, n+1], chi_i on half-integer cells
/// [n - 1/2, n + 1/2].
enum class Family { Zeta, Chi };

/// One of the twelve letters z1 z2 z3 x1 x2 x3 and their inverses.
struct GenSymbol {
  Family family = Family::Zeta;
  int index = 1;  // 1..3
  bool inverted = false;

  /// "z1", "x2'", ...
  static GenSymbol parse(std::string_view token);
  /// 0..5 in the order z1 z2 z3 x1 x2 x3.
  int generator() const { return (family == Family::Zeta ? 0 : 3) + index - 1; }
  static GenSymbol from_generator(int generator, bool inverted);
  GenSymbol inverse() const { return {family, index, !inverted}; }
  std::string to_string() const;
  friend bool operator==(const GenSymbol&, const GenSymbol&) = default;
};

/// Freely reduced word in the standard generators.
class GroupWord {
 public:
  GroupWord() = default;
  /// Reduces freely.
  explicit GroupWord(std::vector<GenSymbol> symbols);
  /// Whitespace-separated tokens, e.g. "z1 x2' z1'".
  static GroupWord parse(std::string_view text);

  const std::vector<GenSymbol>& symbols() const { return symbols_; }
  std::size_t length() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  GroupWord inverse() const;
  friend GroupWord operator*(const GroupWord& x, const GroupWord& y);
  std::string to_string() const;
  friend bool operator==(const GroupWord&, const GroupWord&) = default;

 private:
  std::vector<GenSymbol> symbols_;
};

/// Calls fn on every freely reduced word of the given length over
/// `generators` letters and their inverses. Letters are encoded as
/// +-(g + 1). Order is lexicographic in the letter sequence
/// g1, g1^-1, g2, g2^-1, ...
void for_each_reduced_word(int generators, int length, const std::function<void(const std::vector<int>&)>& fn);
/// 2g (2g - 1)^(length - 1), or 1 for length 0.
std::uint64_t reduced_word_count(int generators, int length);

/// Element of Homeo+(R) defined lazily over a labelling: standard generators,
/// lambda/pi images, special elements, translations, cellular pieces and
/// products of these. Immutable; cheap to copy.
class LazyHomeo {
 public:
  struct Node;

  static LazyHomeo identity(LabellingPtr rho);
  static LazyHomeo generator(LabellingPtr rho, GenSymbol g);
  static LazyHomeo from_word(LabellingPtr rho, const GroupWord& w);
  /// lambda(f) for Family::Zeta, pi(f) for Family::Chi. f must fix 0 and 1,
  /// have power-of-two slopes and equal end slopes (f in H).
  static LazyHomeo cellwise(LabellingPtr rho, Family family, const PLMap& f);
  /// x -> x + d. Requires a periodic labelling.
  static LazyHomeo translation(LabellingPtr rho, const Dyadic& d);
  /// Element given by its exact restriction to any window. radius and
  /// spread as for context_radius() and spread().
  static LazyHomeo custom(LabellingPtr rho, std::function<PLMap(const Interval&)> restrict_fn,
                          std::int64_t radius, std::int64_t spread, std::string label);

  /// Left-to-right product: x.(gh) = (x.g).h.
  friend LazyHomeo operator*(const LazyHomeo& g, const LazyHomeo& h);
  LazyHomeo inverse() const;
  LazyHomeo pow(int k) const;

  Dyadic eval(const Dyadic& x) const;
  Rational eval(const Rational& x) const;
  Dyadic operator()(const Dyadic& x) const { return eval(x); }

  /// The restriction of cell [m, m+1] is determined by the letters at
  /// half-indices [2m - R, 2m + 2 + R] with R = context_radius(), and points
  /// move by at most spread() half-units. Undefined with translations.
  std::int64_t context_radius() const;
  std::int64_t spread() const;
  bool has_translation() const;

  const LabellingPtr& labelling() const { return rho_; }
  const std::shared_ptr<const Node>& node() const { return node_; }
  std::string describe() const;

 private:
  LazyHomeo(LabellingPtr rho, std::shared_ptr<const Node> node) : rho_(std::move(rho)), node_(std::move(node)) {}
  LabellingPtr rho_;
  std::shared_ptr<const Node> node_;
};

LazyHomeo lambda_embed(LabellingPtr rho, const PLMap& f);
LazyHomeo pi_embed(LabellingPtr rho, const PLMap& f);
LazyHomeo commutator(const LazyHomeo& g, const LazyHomeo& h);

/// nu_i (flipped when the governing letter is inverted, inverted when g is)
/// on the cell of g's family, as a self-map of that cell.
PLMap generator_cell_map(const Labelling& rho, GenSymbol g, const Interval& cell);

/// Exact restriction of h to [A, B] as a map [A, B] -> [A.h, B.h].
PLMap window_restrict(const LazyHomeo& h, const Interval& W);

/// Cells whose contexts of radius R (half-indices [2m - R, 2m + 2 + R])
/// represent every context occurring in the labelling, one cell each.
std::vector<std::int64_t> representative_cells(const Labelling& rho, std::int64_t radius);

struct TrivialityResult {
  bool trivial = true;
  /// A point moved by h when not trivial.
  std::optional<Dyadic> witness;
};
/// Exact for periodic labellings (fundamental window) and for labellings with
/// factor enumeration (one representative cell per context class).
TrivialityResult is_trivial(const LazyHomeo& h);
TrivialityResult is_trivial(LabellingPtr rho, const GroupWord& w);

/// No point is moved by both g and h. Exact, by context classes.
bool supports_disjoint(const LazyHomeo& g, const LazyHomeo& h);

/// Special element: on every integer
/// interval J with |J| = |I| and W(J, n) = W(I, n) it acts as the transport
/// of f onto J; where W(J, n)^-1 = W(I, n) it acts as the
/// orientation-reversed transport; elsewhere as the identity. f is a map of
/// [0, 1] supported in the open interval. Overlapping claims with different
/// effect throw InvalidInput when encountered.
LazyHomeo special_element(LabellingPtr rho, const Interval& I, std::int64_t n, const PLMap& f);

/// The map f of the free pair: identity outside [1/16, 15/16], 1/8 -> 29/32.
const PLMap& free_pair_map();
struct FreePair {
  LazyHomeo lambda_f;
  LazyHomeo pi_f;
};
FreePair free_pair(LabellingPtr rho);

/// Symmetric bump in F' supported in (0, e) u (1 - e, 1), e a power of two.
PLMap edge_bump(const Dyadic& e);

struct CommutingChain {
  LazyHomeo f;
  LazyHomeo h1;
  LazyHomeo h2;
  LazyHomeo g;
  Dyadic eps;    // h1 supported within eps of the integers
  Dyadic delta;  // h2 supported within delta of the half-integers
  bool commutators_trivial[3] = {false, false, false};
  bool supports_disjoint[3] = {false, false, false};
  bool certified() const;
};
/// f = lambda(f0), g = pi(g0) with f0, g0 in F' (identity near 0 and 1).
/// Returns h1 in K', h2 in L' with [f, h1] = [h1, h2] = [h2, g] = e.
CommutingChain commuting_chain(LabellingPtr rho, const PLMap& f0, const PLMap& g0);

struct KrhoReport {
  bool passed = true;
  std::int64_t cells_checked = 0;
  std::int64_t classes = 0;
  /// Failing pair of cells (left endpoints) and the clause, when failed.
  std::optional<std::int64_t> cell_x;
  std::optional<std::int64_t> cell_y;
  std::string clause;
};
/// Checks clauses 3.a and 3.b of the K_rho characterization with constant k
/// on all pairs of integer cells in W, comparing displacement functions
/// exactly.
KrhoReport krho_window_check(const LazyHomeo& h, std::int64_t k, const Interval& W);

struct ToZeroResult {
  LazyHomeo g;
  GroupWord word;       // the searched prefix
  PLMap transporter;    // pi-embedded final step (identity when not needed)
  std::uint64_t nodes = 0;
};
/// g with r.g = 0: best-first search over generator words of length at most
/// max_length for a point in (-1/2, 1/2), then a pi-embedded transporter.
/// Throws InvalidInput when the budget is exhausted.
ToZeroResult map_dyadic_to_zero(LabellingPtr rho, const Dyadic& r, int max_length = 12,
                                std::uint64_t node_budget = 200000);

/// Transition points of h strictly inside W, from a restriction with a
/// one-cell margin. Ascending.
std::vector<Rational> transition_points_window(const LazyHomeo& h, const Interval& W);

}  // namespace lineorder
