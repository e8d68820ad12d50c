#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lineorder/grho.hpp"

namespace lineorder {

/// Maximal interval between integers whose neighbourhoods are fixed, on which
/// h is not the identity. A partial atom is cut by the window and its
/// restriction need not be a self-map.
struct Atom {
  Interval carrier;
  PLMap restriction;
  bool partial = false;
};

struct DecoratedAtom {
  Atom atom;
  std::int64_t n = 0;
  LWord context;  // W(carrier, n)
};

/// W must have integer endpoints.
std::vector<Atom> atoms_in_window(const LazyHomeo& h, const Interval& W);

DecoratedAtom decorate(const Labelling& rho, const Atom& a, std::int64_t n);

/// Equal up to integer translation with equal contexts, or flip-conjugate up
/// to translation with mutually inverse contexts.
bool equivalent(const DecoratedAtom& x, const DecoratedAtom& y);

struct AtomClasses {
  std::vector<int> class_of;  // per input atom, numbered by first occurrence
  int count = 0;
};
AtomClasses classify(const std::vector<DecoratedAtom>& atoms);

/// Smallest k >= 1, k <= limit, such that krho_window_check(h, k, W) passes.
/// The limit defaults to context_radius() + 1, which always suffices.
std::int64_t locality_constant(const LazyHomeo& h, const Interval& W, std::optional<std::int64_t> limit = {});

/// k_h + the longest atom on W. Throws InvalidInput on partial atoms.
std::int64_t l_f_constant(const LazyHomeo& h, std::int64_t k_h, const Interval& W);

/// One piece per class of decorated atoms found on W, equal to h on atoms of
/// that class and the identity elsewhere. Pieces are evaluated lazily: atoms
/// are located again around each query window, and meeting a partial atom
/// there throws InvalidInput. Throws InvalidInput when W has partial atoms.
struct CellularDecomposition {
  std::vector<DecoratedAtom> atoms;
  AtomClasses classes;
  std::vector<LazyHomeo> pieces;
  std::int64_t max_atom_length = 0;
};
CellularDecomposition cellular_decomposition(const LazyHomeo& h, std::int64_t n, const Interval& W);

struct StabilityReport {
  bool stable = false;
  std::int64_t period = 0;
  /// Complete atoms over one period, starting at a fixed integer.
  std::vector<DecoratedAtom> atoms;
  AtomClasses classes;
  /// Window of the cut-free scan, [m0, m0 + p].
  std::optional<Interval> window;
  /// When unstable: an activity run covering a full period.
  std::optional<Interval> unstable_run;
};
/// Exact for periodic labellings: one period determines every atom.
/// n = 0 uses the locality constant of h.
StabilityReport periodic_stability(const LazyHomeo& h, std::int64_t n = 0);
StabilityReport periodic_stability(LabellingPtr sigma, const GroupWord& w, std::int64_t n = 0);

/// carrier_lo,carrier_hi,class,context
std::string atoms_csv(const std::vector<DecoratedAtom>& atoms, const AtomClasses& classes);

}  // namespace lineorder
