#include "lineorder/atoms.hpp"

#include <algorithm>
#include <sstream>

namespace lineorder {

namespace {

void require_integer_window(const Interval& W) {
  if (!W.lo.is_integer() || !W.hi.is_integer()) throw InvalidInput("window " + W.to_string() + " needs integer endpoints");
}

}  // namespace

std::vector<Atom> atoms_in_window(const LazyHomeo& h, const Interval& W) {
  require_integer_window(W);
  // one cell of margin so boundary integers are interior to the restriction
  PLMap R = window_restrict(h, Interval(W.lo - Dyadic(1), W.hi + Dyadic(1)));
  std::int64_t lo = W.lo.floor_int();
  std::int64_t hi = W.hi.floor_int();
  std::vector<std::int64_t> fixed;
  for (std::int64_t m = lo; m <= hi; ++m) {
    if (fixes_neighbourhood(R, Dyadic(m))) fixed.push_back(m);
  }
  std::vector<Atom> out;
  auto add = [&](std::int64_t a, std::int64_t b, bool partial) {
    Interval c{Dyadic(a), Dyadic(b)};
    PLMap r = restrict(R, c);
    if (!r.is_identity()) out.push_back({c, std::move(r), partial});
  };
  if (fixed.empty()) {
    add(lo, hi, true);
    return out;
  }
  if (fixed.front() > lo) add(lo, fixed.front(), true);
  for (std::size_t i = 0; i + 1 < fixed.size(); ++i) add(fixed[i], fixed[i + 1], false);
  if (fixed.back() < hi) add(fixed.back(), hi, true);
  return out;
}

DecoratedAtom decorate(const Labelling& rho, const Atom& a, std::int64_t n) {
  return {a, n, word_on_interval(rho, a.carrier, n)};
}

bool equivalent(const DecoratedAtom& x, const DecoratedAtom& y) {
  if (x.atom.partial || y.atom.partial) return false;
  if (x.atom.carrier.length() != y.atom.carrier.length() || x.n != y.n) return false;
  Dyadic shift = y.atom.carrier.lo - x.atom.carrier.lo;
  if (x.context == y.context && translate(x.atom.restriction, shift) == y.atom.restriction) return true;
  return formal_inverse(x.context) == y.context &&
         isometry_conjugate(x.atom.restriction, y.atom.carrier, Orientation::Reversing) == y.atom.restriction;
}

AtomClasses classify(const std::vector<DecoratedAtom>& atoms) {
  AtomClasses out;
  std::vector<std::size_t> reps;
  for (const auto& a : atoms) {
    int cls = -1;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      if (equivalent(atoms[reps[r]], a)) {
        cls = static_cast<int>(r);
        break;
      }
    }
    if (cls < 0) {
      cls = static_cast<int>(reps.size());
      reps.push_back(static_cast<std::size_t>(&a - atoms.data()));
    }
    out.class_of.push_back(cls);
  }
  out.count = static_cast<int>(reps.size());
  return out;
}

std::int64_t locality_constant(const LazyHomeo& h, const Interval& W, std::optional<std::int64_t> limit) {
  std::int64_t top = std::max<std::int64_t>(1, limit.value_or(h.context_radius() + 1));
  for (std::int64_t k = 1; k <= top; ++k) {
    if (krho_window_check(h, k, W).passed) return k;
  }
  if (limit) throw InvalidInput("no locality constant up to " + std::to_string(top) + " on " + W.to_string());
  throw InternalError("locality bound context_radius + 1 failed on " + W.to_string());
}

std::int64_t l_f_constant(const LazyHomeo& h, std::int64_t k_h, const Interval& W) {
  std::int64_t longest = 0;
  for (const auto& a : atoms_in_window(h, W)) {
    if (a.partial) throw InvalidInput("partial atom " + a.carrier.to_string() + " on " + W.to_string());
    longest = std::max(longest, a.carrier.length().floor_int());
  }
  return k_h + longest;
}

CellularDecomposition cellular_decomposition(const LazyHomeo& h, std::int64_t n, const Interval& W) {
  if (n < 1) throw InvalidInput("decoration depth must be positive");
  const Labelling& rho = *h.labelling();
  CellularDecomposition out;
  for (const auto& a : atoms_in_window(h, W)) {
    if (a.partial) throw InvalidInput("partial atom " + a.carrier.to_string() + "; element is not stable on " + W.to_string());
    out.max_atom_length = std::max(out.max_atom_length, a.carrier.length().floor_int());
    out.atoms.push_back(decorate(rho, a, n));
  }
  out.classes = classify(out.atoms);
  const std::int64_t margin = out.max_atom_length + 1;
  for (int c = 0; c < out.classes.count; ++c) {
    std::size_t rep = static_cast<std::size_t>(
        std::find(out.classes.class_of.begin(), out.classes.class_of.end(), c) - out.classes.class_of.begin());
    DecoratedAtom representative = out.atoms[rep];
    LazyHomeo hh = h;
    auto restrict_fn = [hh, representative, n, margin](const Interval& V) {
      Interval E(Dyadic(V.lo.floor_int() - margin), Dyadic(V.hi.ceil_int() + margin));
      std::vector<PLMap> parts;
      Dyadic at = E.lo;
      for (const auto& a : atoms_in_window(hh, E)) {
        bool meets = a.carrier.lo < V.hi && V.lo < a.carrier.hi;
        if (a.partial) {
          if (meets) throw InvalidInput("partial atom " + a.carrier.to_string() + " near " + V.to_string());
          continue;
        }
        if (!equivalent(representative, decorate(*hh.labelling(), a, n))) continue;
        if (at < a.carrier.lo) parts.push_back(PLMap::identity({at, a.carrier.lo}));
        parts.push_back(a.restriction);
        at = a.carrier.hi;
      }
      if (at < E.hi) parts.push_back(PLMap::identity({at, E.hi}));
      return restrict(parts.size() == 1 ? parts.front() : glue(parts), V);
    };
    std::int64_t radius = 2 * (out.max_atom_length + 1) + h.context_radius() + h.spread() + n + 2;
    out.pieces.push_back(LazyHomeo::custom(h.labelling(), restrict_fn, radius, 2 * out.max_atom_length,
                                           "piece" + std::to_string(c)));
  }
  return out;
}

StabilityReport periodic_stability(const LazyHomeo& h, std::int64_t n) {
  auto P = h.labelling()->period_letters();
  if (!P) throw InvalidInput("periodic_stability needs a periodic labelling");
  StabilityReport out;
  out.period = *P / 2;
  Interval period(Dyadic(0), Dyadic(out.period));
  PLMap R = window_restrict(h, Interval(Dyadic(-1), Dyadic(out.period + 1)));
  std::optional<std::int64_t> m0;
  for (std::int64_t m = 0; m < out.period && !m0; ++m) {
    if (fixes_neighbourhood(R, Dyadic(m))) m0 = m;
  }
  if (!m0) {
    out.unstable_run = period;
    return out;
  }
  out.stable = true;
  out.window = Interval(Dyadic(*m0), Dyadic(*m0 + out.period));
  if (n <= 0) n = locality_constant(h, period);
  for (const auto& a : atoms_in_window(h, *out.window)) {
    if (a.partial) throw InternalError("partial atom between fixed integers");
    out.atoms.push_back(decorate(*h.labelling(), a, n));
  }
  out.classes = classify(out.atoms);
  return out;
}

StabilityReport periodic_stability(LabellingPtr sigma, const GroupWord& w, std::int64_t n) {
  return periodic_stability(LazyHomeo::from_word(std::move(sigma), w), n);
}

std::string atoms_csv(const std::vector<DecoratedAtom>& atoms, const AtomClasses& classes) {
  std::ostringstream out;
  out << "carrier_lo,carrier_hi,class,context\n";
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    out << a.atom.carrier.lo.to_string() << ',' << a.atom.carrier.hi.to_string() << ','
        << (i < classes.class_of.size() ? classes.class_of[i] : -1) << ',' << a.context.to_string() << '\n';
  }
  return out.str();
}

}  // namespace lineorder
