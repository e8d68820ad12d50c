#include "lineorder/grho.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_set>
#include <variant>

#include "lineorder/thompson.hpp"

namespace lineorder {

// ---------------------------------------------------------------------------
// words

GenSymbol GenSymbol::parse(std::string_view token) {
  std::string t(token);
  bool inv = false;
  if (!t.empty() && t.back() == '\'') {
    inv = true;
    t.pop_back();
  }
  if (t.size() != 2 || (t[0] != 'z' && t[0] != 'x') || t[1] < '1' || t[1] > '3') {
    throw InvalidInput("unknown generator '" + std::string(token) + "' (expected z1..z3, x1..x3, optional ')");
  }
  return {t[0] == 'z' ? Family::Zeta : Family::Chi, t[1] - '0', inv};
}

GenSymbol GenSymbol::from_generator(int generator, bool inverted) {
  if (generator < 0 || generator > 5) throw InvalidInput("generator index must be in 0..5");
  return {generator < 3 ? Family::Zeta : Family::Chi, generator % 3 + 1, inverted};
}

std::string GenSymbol::to_string() const {
  std::string s(1, family == Family::Zeta ? 'z' : 'x');
  s += static_cast<char>('0' + index);
  if (inverted) s += '\'';
  return s;
}

GroupWord::GroupWord(std::vector<GenSymbol> symbols) {
  for (const auto& s : symbols) {
    if (!symbols_.empty() && symbols_.back() == s.inverse()) {
      symbols_.pop_back();
    } else {
      symbols_.push_back(s);
    }
  }
}

GroupWord GroupWord::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<GenSymbol> out;
  std::string tok;
  while (in >> tok) out.push_back(GenSymbol::parse(tok));
  return GroupWord(std::move(out));
}

GroupWord GroupWord::inverse() const {
  std::vector<GenSymbol> out;
  for (auto it = symbols_.rbegin(); it != symbols_.rend(); ++it) out.push_back(it->inverse());
  return GroupWord(std::move(out));
}

GroupWord operator*(const GroupWord& x, const GroupWord& y) {
  std::vector<GenSymbol> s = x.symbols_;
  s.insert(s.end(), y.symbols_.begin(), y.symbols_.end());
  return GroupWord(std::move(s));
}

std::string GroupWord::to_string() const {
  if (symbols_.empty()) return "e";
  std::string out;
  for (const auto& s : symbols_) {
    if (!out.empty()) out += ' ';
    out += s.to_string();
  }
  return out;
}

namespace {

void reduced_words_rec(int generators, int length, std::vector<int>& cur,
                       const std::function<void(const std::vector<int>&)>& fn) {
  if (static_cast<int>(cur.size()) == length) {
    fn(cur);
    return;
  }
  for (int g = 1; g <= generators; ++g) {
    for (int sign : {1, -1}) {
      int letter = sign * g;
      if (!cur.empty() && cur.back() == -letter) continue;
      cur.push_back(letter);
      reduced_words_rec(generators, length, cur, fn);
      cur.pop_back();
    }
  }
}

}  // namespace

void for_each_reduced_word(int generators, int length, const std::function<void(const std::vector<int>&)>& fn) {
  if (generators < 1 || length < 0) throw InvalidInput("for_each_reduced_word: bad arguments");
  std::vector<int> cur;
  cur.reserve(static_cast<std::size_t>(length));
  reduced_words_rec(generators, length, cur, fn);
}

std::uint64_t reduced_word_count(int generators, int length) {
  if (length == 0) return 1;
  std::uint64_t n = 2 * static_cast<std::uint64_t>(generators);
  for (int i = 1; i < length; ++i) n *= 2 * static_cast<std::uint64_t>(generators) - 1;
  return n;
}

// ---------------------------------------------------------------------------
// nodes

namespace {

struct IdentityNode {};

// base acts on cells with a non-inverted governing letter, flipped on the rest
struct CellwiseNode {
  Family family;
  PLMap base;
  PLMap flipped;
};

struct ProductNode {
  std::vector<std::shared_ptr<const LazyHomeo::Node>> factors;
};

struct SpecialNode {
  Interval I;
  std::int64_t n;
  PLMap f;
  PLMap phi;  // f transported onto I
  LWord ctx;
  LWord ctx_inv;
};

struct TranslationNode {
  Dyadic d;
};

struct CustomNode {
  std::function<PLMap(const Interval&)> restrict_fn;
};

struct InverseNode {
  std::shared_ptr<const LazyHomeo::Node> inner;
};

}  // namespace

struct LazyHomeo::Node {
  std::variant<IdentityNode, CellwiseNode, ProductNode, SpecialNode, TranslationNode, CustomNode, InverseNode> v;
  std::int64_t radius = 0;
  std::int64_t spread = 0;
  bool translation = false;
  std::string label;
};

namespace {

using NodePtr = std::shared_ptr<const LazyHomeo::Node>;

NodePtr make_node(LazyHomeo::Node n) { return std::make_shared<const LazyHomeo::Node>(std::move(n)); }

const Interval& unit() {
  static const Interval u(0, 1);
  return u;
}

void require_h_element(const PLMap& f) {
  if (f.domain() != unit() || f.range() != unit()) throw InvalidInput("map must be a self-map of [0, 1]");
  if (!f.power2()) throw InvalidInput("map has a slope that is not a power of two");
  if (f.slope_exponent(0) != f.slope_exponent(f.pieces() - 1)) {
    throw InvalidInput("map is not in H: slopes at 0 and 1 differ");
  }
}

NodePtr cellwise_node(Family family, const PLMap& f, std::string label) {
  LazyHomeo::Node n;
  n.v = CellwiseNode{family, f, flip_conjugate(f, unit())};
  n.radius = 1;
  n.spread = 1;
  n.label = std::move(label);
  return make_node(std::move(n));
}

std::string map_label(const PLMap& f) { return to_json(f); }

PLMap transport_to(const PLMap& f, const Interval& I) {
  Dyadic L = I.length();
  std::vector<Dyadic> xs = f.breakpoints();
  std::vector<Dyadic> ys = f.values();
  for (auto& x : xs) x = I.lo + x * L;
  for (auto& y : ys) y = I.lo + y * L;
  return PLMap::from_points(std::move(xs), std::move(ys));
}

NodePtr special_node(const Labelling& rho, const Interval& I, std::int64_t n, const PLMap& f, std::string label) {
  std::int64_t L = I.length().floor_int();
  LazyHomeo::Node node;
  LWord ctx = word_on_interval(rho, I, n);
  LWord inv = formal_inverse(ctx);
  node.v = SpecialNode{I, n, f, transport_to(f, I), std::move(ctx), std::move(inv)};
  node.radius = 4 * L + n;
  node.spread = 2 * L;
  node.label = std::move(label);
  return make_node(std::move(node));
}

NodePtr inverse_node(const Labelling& rho, const NodePtr& p);

NodePtr inverse_node(const Labelling& rho, const NodePtr& p) {
  const auto& n = *p;
  return std::visit(
      [&](const auto& v) -> NodePtr {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IdentityNode>) {
          return p;
        } else if constexpr (std::is_same_v<T, CellwiseNode>) {
          LazyHomeo::Node out;
          out.v = CellwiseNode{v.family, invert(v.base), invert(v.flipped)};
          out.radius = n.radius;
          out.spread = n.spread;
          out.label = n.label.empty() ? "" : n.label + "'";
          if (n.label.size() == 3 && n.label.back() == '\'') out.label = n.label.substr(0, 2);
          return make_node(std::move(out));
        } else if constexpr (std::is_same_v<T, ProductNode>) {
          LazyHomeo::Node out;
          ProductNode prod;
          for (auto it = v.factors.rbegin(); it != v.factors.rend(); ++it) {
            prod.factors.push_back(inverse_node(rho, *it));
          }
          out.v = std::move(prod);
          out.radius = n.radius;
          out.spread = n.spread;
          out.translation = n.translation;
          return make_node(std::move(out));
        } else if constexpr (std::is_same_v<T, SpecialNode>) {
          return special_node(rho, v.I, v.n, invert(v.f), n.label + "'");
        } else if constexpr (std::is_same_v<T, TranslationNode>) {
          LazyHomeo::Node out;
          out.v = TranslationNode{-v.d};
          out.translation = true;
          out.label = "shift(" + (-v.d).to_string() + ")";
          return make_node(std::move(out));
        } else if constexpr (std::is_same_v<T, CustomNode>) {
          LazyHomeo::Node out;
          out.v = InverseNode{p};
          out.radius = n.radius;
          out.spread = n.spread;
          out.label = n.label + "'";
          return make_node(std::move(out));
        } else {
          return v.inner;
        }
      },
      n.v);
}

// ---------------------------------------------------------------------------
// restriction

PLMap restrict_node(const Labelling& rho, const LazyHomeo::Node& node, const Interval& W);

PLMap restrict_cellwise(const Labelling& rho, const CellwiseNode& c, const Interval& W) {
  // zeta cells [k, k+1] read h = 2k + 1; chi cells [k - 1/2, k + 1/2] read h = 2k
  const bool zeta = c.family == Family::Zeta;
  Dyadic half = Dyadic::from_parts(1, 1);
  Dyadic origin = zeta ? Dyadic(0) : -half;
  std::int64_t k_lo = (W.lo - origin).floor_int();
  std::int64_t k_hi = (W.hi - origin).ceil_int() - 1;
  std::vector<PLMap> parts;
  parts.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
  for (std::int64_t k = k_lo; k <= k_hi; ++k) {
    Letter l = rho.letter_at(zeta ? 2 * k + 1 : 2 * k);
    parts.push_back(translate(l.inverse ? c.flipped : c.base, Dyadic(k) + origin));
  }
  PLMap all = parts.size() == 1 ? parts.front() : glue(parts);
  return restrict(all, W);
}

PLMap restrict_special(const Labelling& rho, const SpecialNode& s, const Interval& W) {
  const std::int64_t L = s.I.length().floor_int();
  std::int64_t j_lo = W.lo.floor_int() - L + 1;
  std::int64_t j_hi = W.hi.ceil_int() - 1;
  // scan one block further on each side so overlapping claims are detected
  std::map<std::int64_t, Orientation> claims;
  for (std::int64_t j = j_lo - L + 1; j <= j_hi + L - 1; ++j) {
    LWord c = word_on_interval(rho, Interval(Dyadic(j), Dyadic(j + L)), s.n);
    bool direct = c == s.ctx;
    bool reversed = c == s.ctx_inv;
    if (direct && reversed) {
      throw InvalidInput("special element: interval [" + std::to_string(j) + ", " + std::to_string(j + L) +
                         "] matches the context and its inverse");
    }
    if (direct || reversed) claims.emplace(j, direct ? Orientation::Preserving : Orientation::Reversing);
  }
  std::int64_t prev = std::numeric_limits<std::int64_t>::min();
  for (const auto& [j, o] : claims) {
    if (prev != std::numeric_limits<std::int64_t>::min() && j - prev < L) {
      throw InvalidInput("special element: overlapping matches at " + std::to_string(prev) + " and " +
                         std::to_string(j) + "; raise n");
    }
    prev = j;
  }
  Dyadic lo = Dyadic(j_lo);
  Dyadic hi = Dyadic(j_hi + L);
  std::vector<PLMap> parts;
  Dyadic at = lo;
  for (const auto& [j, o] : claims) {
    if (j < j_lo || j > j_hi) continue;
    Interval J(Dyadic(j), Dyadic(j + L));
    if (at < J.lo) parts.push_back(PLMap::identity({at, J.lo}));
    parts.push_back(isometry_conjugate(s.phi, J, o));
    at = J.hi;
  }
  if (at < hi) parts.push_back(PLMap::identity({at, hi}));
  return restrict(parts.size() == 1 ? parts.front() : glue(parts), W);
}

PLMap restrict_node(const Labelling& rho, const LazyHomeo::Node& node, const Interval& W) {
  return std::visit(
      [&](const auto& v) -> PLMap {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IdentityNode>) {
          return PLMap::identity(W);
        } else if constexpr (std::is_same_v<T, CellwiseNode>) {
          return restrict_cellwise(rho, v, W);
        } else if constexpr (std::is_same_v<T, ProductNode>) {
          PLMap acc = restrict_node(rho, *v.factors.front(), W);
          for (std::size_t i = 1; i < v.factors.size(); ++i) {
            acc = compose(acc, restrict_node(rho, *v.factors[i], acc.range()));
          }
          return acc;
        } else if constexpr (std::is_same_v<T, SpecialNode>) {
          return restrict_special(rho, v, W);
        } else if constexpr (std::is_same_v<T, TranslationNode>) {
          return PLMap::shift(W, v.d);
        } else if constexpr (std::is_same_v<T, CustomNode>) {
          PLMap out = v.restrict_fn(W);
          if (out.domain() != W) throw InternalError("custom element restricted to the wrong window");
          return out;
        } else {
          // preimage of W lies within spread/2 + 1 of it
          std::int64_t margin = node.spread / 2 + 1;
          Interval wide(W.lo - Dyadic(margin), W.hi + Dyadic(margin));
          PLMap inv = invert(restrict_node(rho, *v.inner, wide));
          if (!(inv.domain().lo <= W.lo && W.hi <= inv.domain().hi)) {
            throw InternalError("inverse restriction: spread bound violated");
          }
          return restrict(inv, W);
        }
      },
      node.v);
}

mpz_class floor_of(const Dyadic& x) { return x.floor(); }
mpz_class floor_of(const Rational& x) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return out;
}

Rational to_num(const Dyadic& d, const Rational*) { return d.to_rational(); }
Dyadic to_num(const Dyadic& d, const Dyadic*) { return d; }

template <class Num>
Num eval_node(const Labelling& rho, const LazyHomeo::Node& node, const Num& x) {
  return std::visit(
      [&](const auto& v) -> Num {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IdentityNode>) {
          return x;
        } else if constexpr (std::is_same_v<T, CellwiseNode>) {
          const bool zeta = v.family == Family::Zeta;
          Num shifted = zeta ? x : Num(x + to_num(Dyadic::from_parts(1, 1), static_cast<const Num*>(nullptr)));
          mpz_class k = floor_of(shifted);
          if (!k.fits_slong_p()) throw InvalidInput("point out of range");
          long kk = k.get_si();
          Letter l = rho.letter_at(zeta ? 2 * static_cast<std::int64_t>(kk) + 1 : 2 * static_cast<std::int64_t>(kk));
          const PLMap& m = l.inverse ? v.flipped : v.base;
          Num t = shifted - to_num(Dyadic(kk), static_cast<const Num*>(nullptr));
          Num y = m.evaluate(t);
          return Num(y + x - t);
        } else if constexpr (std::is_same_v<T, ProductNode>) {
          Num y = x;
          for (const auto& f : v.factors) y = eval_node(rho, *f, y);
          return y;
        } else if constexpr (std::is_same_v<T, TranslationNode>) {
          return Num(x + to_num(v.d, static_cast<const Num*>(nullptr)));
        } else {
          mpz_class k = floor_of(x);
          if (!k.fits_slong_p()) throw InvalidInput("point out of range");
          Interval cell(Dyadic(k.get_si()), Dyadic(k.get_si() + 1));
          return restrict_node(rho, node, cell).evaluate(x);
        }
      },
      node.v);
}

}  // namespace

// ---------------------------------------------------------------------------
// LazyHomeo

LazyHomeo LazyHomeo::identity(LabellingPtr rho) {
  if (!rho) throw InvalidInput("null labelling");
  LazyHomeo::Node n;
  n.v = IdentityNode{};
  n.label = "e";
  return {std::move(rho), make_node(std::move(n))};
}

LazyHomeo LazyHomeo::generator(LabellingPtr rho, GenSymbol g) {
  if (!rho) throw InvalidInput("null labelling");
  const PLMap& nu = h_generator(g.index);
  GenSymbol plain{g.family, g.index, false};
  NodePtr n = cellwise_node(g.family, nu, plain.to_string());
  if (g.inverted) n = inverse_node(*rho, n);
  return {std::move(rho), std::move(n)};
}

LazyHomeo LazyHomeo::from_word(LabellingPtr rho, const GroupWord& w) {
  LazyHomeo out = identity(rho);
  for (const auto& s : w.symbols()) out = out * generator(rho, s);
  return out;
}

LazyHomeo LazyHomeo::cellwise(LabellingPtr rho, Family family, const PLMap& f) {
  if (!rho) throw InvalidInput("null labelling");
  require_h_element(f);
  std::string label = std::string(family == Family::Zeta ? "lambda" : "pi") + "(" + map_label(f) + ")";
  return {std::move(rho), cellwise_node(family, f, std::move(label))};
}

LazyHomeo LazyHomeo::translation(LabellingPtr rho, const Dyadic& d) {
  if (!rho) throw InvalidInput("null labelling");
  if (!rho->period_letters()) throw InvalidInput("translations need a periodic labelling");
  LazyHomeo::Node n;
  n.v = TranslationNode{d};
  n.translation = true;
  n.label = "shift(" + d.to_string() + ")";
  return {std::move(rho), make_node(std::move(n))};
}

LazyHomeo LazyHomeo::custom(LabellingPtr rho, std::function<PLMap(const Interval&)> restrict_fn, std::int64_t radius,
                            std::int64_t spread, std::string label) {
  if (!rho) throw InvalidInput("null labelling");
  LazyHomeo::Node n;
  n.v = CustomNode{std::move(restrict_fn)};
  n.radius = radius;
  n.spread = spread;
  n.label = std::move(label);
  return {std::move(rho), make_node(std::move(n))};
}

LazyHomeo operator*(const LazyHomeo& g, const LazyHomeo& h) {
  if (g.rho_ != h.rho_) throw InvalidInput("elements over different labellings");
  auto is_id = [](const NodePtr& p) { return std::holds_alternative<IdentityNode>(p->v); };
  if (is_id(g.node_)) return h;
  if (is_id(h.node_)) return g;
  LazyHomeo::Node out;
  ProductNode prod;
  for (const NodePtr& p : {g.node_, h.node_}) {
    if (const auto* q = std::get_if<ProductNode>(&p->v)) {
      prod.factors.insert(prod.factors.end(), q->factors.begin(), q->factors.end());
    } else {
      prod.factors.push_back(p);
    }
  }
  for (const auto& f : prod.factors) {
    out.radius += f->radius + f->spread;
    out.spread += f->spread;
  }
  out.v = std::move(prod);
  out.translation = g.node_->translation || h.node_->translation;
  return {g.rho_, make_node(std::move(out))};
}

LazyHomeo LazyHomeo::inverse() const { return {rho_, inverse_node(*rho_, node_)}; }

LazyHomeo LazyHomeo::pow(int k) const {
  if (k < 0) return inverse().pow(-k);
  LazyHomeo out = identity(rho_);
  for (int i = 0; i < k; ++i) out = out * *this;
  return out;
}

Dyadic LazyHomeo::eval(const Dyadic& x) const { return eval_node(*rho_, *node_, x); }
Rational LazyHomeo::eval(const Rational& x) const {
  Rational y = eval_node(*rho_, *node_, x);
  y.canonicalize();
  return y;
}

std::int64_t LazyHomeo::context_radius() const { return node_->radius; }
std::int64_t LazyHomeo::spread() const { return node_->spread; }
bool LazyHomeo::has_translation() const { return node_->translation; }

std::string LazyHomeo::describe() const {
  if (const auto* p = std::get_if<ProductNode>(&node_->v)) {
    std::string out;
    for (const auto& f : p->factors) {
      if (!out.empty()) out += ' ';
      out += f->label.empty() ? "?" : f->label;
    }
    return out;
  }
  return node_->label;
}

LazyHomeo lambda_embed(LabellingPtr rho, const PLMap& f) { return LazyHomeo::cellwise(std::move(rho), Family::Zeta, f); }
LazyHomeo pi_embed(LabellingPtr rho, const PLMap& f) { return LazyHomeo::cellwise(std::move(rho), Family::Chi, f); }

LazyHomeo commutator(const LazyHomeo& g, const LazyHomeo& h) { return g.inverse() * h.inverse() * g * h; }

PLMap generator_cell_map(const Labelling& rho, GenSymbol g, const Interval& cell) {
  const bool zeta = g.family == Family::Zeta;
  Dyadic origin = zeta ? cell.lo : cell.lo + Dyadic::from_parts(1, 1);
  if (cell.length() != 1 || !origin.is_integer()) {
    throw InvalidInput("generator_cell_map: " + cell.to_string() + " is not a cell of " + g.to_string());
  }
  std::int64_t k = origin.floor_int();
  Letter l = rho.letter_at(zeta ? 2 * k + 1 : 2 * k);
  PLMap m = h_generator(g.index);
  if (l.inverse) m = flip_conjugate(m, unit());
  if (g.inverted) m = invert(m);
  return translate(m, cell.lo);
}

PLMap window_restrict(const LazyHomeo& h, const Interval& W) { return restrict_node(*h.labelling(), *h.node(), W); }

// ---------------------------------------------------------------------------
// triviality

std::vector<std::int64_t> representative_cells(const Labelling& rho, std::int64_t radius) {
  if (radius < 0) throw InvalidInput("context radius must be non-negative");
  const std::size_t width = static_cast<std::size_t>(2 * radius + 3);
  std::vector<std::int64_t> out;
  if (auto P = rho.period_letters()) {
    std::unordered_set<std::string> seen;
    for (std::int64_t m = 0; m < *P / 2; ++m) {
      if (seen.insert(rho.letters(2 * m - radius, width).key()).second) out.push_back(m);
    }
    return out;
  }
  for (const Factor& f : rho.factors(width)) {
    // start = 2m - radius
    if (((f.start - radius) % 2 + 2) % 2 == 0) out.push_back((f.start + radius) / 2);
  }
  return out;
}

namespace {

// representative cells cached per (labelling, radius); the weak pointer guards
// against address reuse
const std::vector<std::int64_t>& cached_cells(const LabellingPtr& rho, std::int64_t radius) {
  struct Entry {
    std::weak_ptr<const Labelling> owner;
    std::vector<std::int64_t> cells;
  };
  static std::mutex mutex;
  static std::map<std::pair<const Labelling*, std::int64_t>, std::shared_ptr<Entry>> cache;
  std::pair<const Labelling*, std::int64_t> key{rho.get(), radius};
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end() && it->second->owner.lock() == rho) return it->second->cells;
  }
  auto entry = std::make_shared<Entry>(Entry{rho, representative_cells(*rho, radius)});
  std::lock_guard lock(mutex);
  auto& slot = cache[key];
  if (!slot || slot->owner.lock() != rho) slot = entry;
  return slot->cells;
}

std::optional<Dyadic> moved_breakpoint(const PLMap& m) {
  for (std::size_t i = 0; i < m.breakpoints().size(); ++i) {
    if (m.breakpoints()[i] != m.values()[i]) return m.breakpoints()[i];
  }
  return std::nullopt;
}

}  // namespace

TrivialityResult is_trivial(const LazyHomeo& h) {
  const LabellingPtr& rho = h.labelling();
  if (std::holds_alternative<IdentityNode>(h.node()->v)) return {};
  if (h.has_translation()) {
    auto P = rho->period_letters();
    if (!P) throw InvalidInput("translation over a non-periodic labelling");
    // commutes with the period translation
    PLMap w = window_restrict(h, Interval(0, Dyadic(*P / 2)));
    if (auto x = moved_breakpoint(w)) return {false, x};
    return {};
  }
  for (std::int64_t m : cached_cells(rho, h.context_radius())) {
    PLMap w = window_restrict(h, Interval(Dyadic(m), Dyadic(m + 1)));
    if (auto x = moved_breakpoint(w)) return {false, x};
  }
  return {};
}

TrivialityResult is_trivial(LabellingPtr rho, const GroupWord& w) {
  return is_trivial(LazyHomeo::from_word(std::move(rho), w));
}

bool supports_disjoint(const LazyHomeo& g, const LazyHomeo& h) {
  if (g.labelling() != h.labelling()) throw InvalidInput("elements over different labellings");
  if (g.has_translation() || h.has_translation()) throw InvalidInput("supports_disjoint: translations unsupported");
  std::int64_t R = std::max(g.context_radius(), h.context_radius());
  for (std::int64_t m : cached_cells(g.labelling(), R)) {
    Interval cell(Dyadic(m), Dyadic(m + 1));
    auto a = moved_components(window_restrict(g, cell));
    auto b = moved_components(window_restrict(h, cell));
    for (const auto& x : a) {
      for (const auto& y : b) {
        if (x.lo < y.hi && y.lo < x.hi) return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// constructions

LazyHomeo special_element(LabellingPtr rho, const Interval& I, std::int64_t n, const PLMap& f) {
  if (!rho) throw InvalidInput("null labelling");
  if (!I.lo.is_integer() || !I.hi.is_integer()) throw InvalidInput("special element: I must have integer endpoints");
  if (n < 1) throw InvalidInput("special element: n must be positive");
  if (f.domain() != unit() || f.range() != unit() || !f.power2()) {
    throw InvalidInput("special element: f must be a power-of-two self-map of [0, 1]");
  }
  std::string label = "special(" + I.to_string() + ", " + std::to_string(n) + ")";
  NodePtr node = special_node(*rho, I, n, f, std::move(label));
  return LazyHomeo::custom(rho, [rho, node](const Interval& W) { return restrict_node(*rho, *node, W); },
                           node->radius, node->spread, node->label);
}

const PLMap& free_pair_map() {
  static const PLMap f = [] {
    auto q = [](long num, int e) { return Dyadic::from_parts(num, e); };
    PLMap m = glue({PLMap::identity({0, q(1, 4)}), dyadic_interval_map({q(1, 4), q(1, 3)}, {q(1, 4), q(29, 5)}),
                    dyadic_interval_map({q(1, 3), q(15, 4)}, {q(29, 5), q(15, 4)}), PLMap::identity({q(15, 4), 1})});
    if (m(q(1, 3)) != q(29, 5)) throw InternalError("free pair map");
    return m;
  }();
  return f;
}

FreePair free_pair(LabellingPtr rho) {
  return {lambda_embed(rho, free_pair_map()), pi_embed(rho, free_pair_map())};
}

PLMap edge_bump(const Dyadic& e) {
  if (e.sign() <= 0 || e > Dyadic::from_parts(1, 2)) throw InvalidInput("edge_bump: need 0 < e <= 1/4");
  PLMap left = dyadic_transporter(e.scaled(-2), e.half(), {0, e});
  PLMap right = isometry_conjugate(left, {Dyadic(1) - e, 1}, Orientation::Reversing);
  return glue({left, PLMap::identity({e, Dyadic(1) - e}), right});
}

bool CommutingChain::certified() const {
  for (int i = 0; i < 3; ++i) {
    if (!commutators_trivial[i] || !supports_disjoint[i]) return false;
  }
  return true;
}

namespace {

// largest power of two <= min(clearance, 1/8)
Dyadic clearance_of(const PLMap& f0, const char* name) {
  require_h_element(f0);
  auto hull = active_hull(f0);
  if (!hull) throw InvalidInput(std::string(name) + " is the identity");
  if (hull->lo.sign() <= 0 || hull->hi >= Dyadic(1)) {
    throw InvalidInput(std::string(name) + " is not the identity near 0 and 1");
  }
  Dyadic c = std::min(hull->lo, Dyadic(1) - hull->hi);
  Dyadic e = Dyadic::from_parts(1, 3);
  while (e > c) e = e.half();
  return e;
}

}  // namespace

CommutingChain commuting_chain(LabellingPtr rho, const PLMap& f0, const PLMap& g0) {
  Dyadic eps = clearance_of(f0, "f");
  Dyadic delta = clearance_of(g0, "g");
  CommutingChain c{lambda_embed(rho, f0), lambda_embed(rho, edge_bump(eps)), pi_embed(rho, edge_bump(delta)),
                   pi_embed(rho, g0), eps, delta};
  const LazyHomeo* seq[4] = {&c.f, &c.h1, &c.h2, &c.g};
  for (int i = 0; i < 3; ++i) {
    c.commutators_trivial[i] = is_trivial(commutator(*seq[i], *seq[i + 1])).trivial;
    c.supports_disjoint[i] = supports_disjoint(*seq[i], *seq[i + 1]);
  }
  return c;
}

// ---------------------------------------------------------------------------
// K_rho check

namespace {

// t -> 1 - m(1 - t) for m on [0, 1]
PLMap reflect_unit(const PLMap& m) {
  const auto& xs = m.breakpoints();
  const auto& ys = m.values();
  std::size_t k = xs.size();
  std::vector<Dyadic> nx(k), ny(k);
  for (std::size_t i = 0; i < k; ++i) {
    nx[k - 1 - i] = Dyadic(1) - xs[i];
    ny[k - 1 - i] = Dyadic(1) - ys[i];
  }
  return PLMap::from_points(std::move(nx), std::move(ny));
}

}  // namespace

KrhoReport krho_window_check(const LazyHomeo& h, std::int64_t k, const Interval& W) {
  if (k < 0) throw InvalidInput("krho: k must be non-negative");
  const Labelling& rho = *h.labelling();
  struct Rep {
    std::int64_t cell;
    PLMap map;
  };
  std::map<std::string, Rep> reps;
  KrhoReport out;
  std::int64_t lo = W.lo.ceil_int();
  std::int64_t hi = W.hi.floor_int();
  for (std::int64_t m = lo; m + 1 <= hi; ++m) {
    LWord ctx = rho.letters(2 * m + 1 - k, static_cast<std::size_t>(2 * k + 1));
    std::string key = ctx.key();
    std::string inv_key = formal_inverse(ctx).key();
    // displacement on the cell, as a map of [0, 1]
    PLMap local = translate(window_restrict(h, Interval(Dyadic(m), Dyadic(m + 1))), Dyadic(-m));
    ++out.cells_checked;
    if (auto it = reps.find(key); it != reps.end()) {
      if (it->second.map != local) {
        out.passed = false;
        out.cell_x = it->second.cell;
        out.cell_y = m;
        out.clause = "3.a";
        return out;
      }
    } else {
      reps.emplace(key, Rep{m, local});
    }
    if (auto it = reps.find(inv_key); it != reps.end() && inv_key != key) {
      if (reflect_unit(it->second.map) != local) {
        out.passed = false;
        out.cell_x = it->second.cell;
        out.cell_y = m;
        out.clause = "3.b";
        return out;
      }
    }
  }
  out.classes = static_cast<std::int64_t>(reps.size());
  return out;
}

// ---------------------------------------------------------------------------
// mapping a dyadic to zero

ToZeroResult map_dyadic_to_zero(LabellingPtr rho, const Dyadic& r, int max_length, std::uint64_t node_budget) {
  if (!rho) throw InvalidInput("null labelling");
  if (max_length < 0) throw InvalidInput("max_length must be non-negative");
  const Dyadic half = Dyadic::from_parts(1, 1);
  auto inside = [&](const Dyadic& x) { return -half < x && x < half; };

  std::vector<LazyHomeo> gens;
  for (int g = 0; g < 6; ++g) {
    for (bool inv : {false, true}) gens.push_back(LazyHomeo::generator(rho, GenSymbol::from_generator(g, inv)));
  }
  struct Visit {
    Dyadic x;
    std::int64_t parent;
    int symbol;
    int depth;
  };
  std::vector<Visit> nodes{{r, -1, -1, 0}};
  auto abs = [](const Dyadic& x) { return x.sign() < 0 ? -x : x; };
  auto worse = [&](std::size_t a, std::size_t b) {
    Dyadic da = abs(nodes[a].x), db = abs(nodes[b].x);
    if (da != db) return da > db;
    return nodes[a].depth > nodes[b].depth;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(worse)> open(worse);
  std::set<Dyadic> seen{r};
  open.push(0);
  std::optional<std::size_t> found;
  std::uint64_t expanded = 0;
  while (!open.empty()) {
    std::size_t i = open.top();
    open.pop();
    if (inside(nodes[i].x)) {
      found = i;
      break;
    }
    if (nodes[i].depth >= max_length) continue;
    if (++expanded > node_budget) break;
    for (int s = 0; s < 12; ++s) {
      Dyadic y = gens[static_cast<std::size_t>(s)].eval(nodes[i].x);
      if (!seen.insert(y).second) continue;
      nodes.push_back({y, static_cast<std::int64_t>(i), s, nodes[i].depth + 1});
      open.push(nodes.size() - 1);
    }
  }
  if (!found) {
    throw InvalidInput("map_dyadic_to_zero: no word of length <= " + std::to_string(max_length) +
                       " brings " + r.to_string() + " into (-1/2, 1/2) within the budget");
  }
  std::vector<GenSymbol> symbols;
  for (std::int64_t i = static_cast<std::int64_t>(*found); nodes[static_cast<std::size_t>(i)].parent >= 0;
       i = nodes[static_cast<std::size_t>(i)].parent) {
    int s = nodes[static_cast<std::size_t>(i)].symbol;
    symbols.push_back(GenSymbol::from_generator(s / 2, s % 2 == 1));
  }
  std::reverse(symbols.begin(), symbols.end());
  GroupWord word(symbols);

  // chi cell [-1/2, 1/2] in local coordinate u = x + 1/2, read at h = 0
  Dyadic x = nodes[*found].x;
  PLMap transporter = PLMap::identity(unit());
  if (!x.is_zero()) {
    Dyadic u = x + half;
    if (rho->letter_at(0).inverse) u = Dyadic(1) - u;
    transporter = dyadic_transporter(u, half, unit());
  }
  LazyHomeo g = LazyHomeo::from_word(rho, word);
  if (!x.is_zero()) g = g * pi_embed(rho, transporter);
  if (!g.eval(r).is_zero()) throw InternalError("map_dyadic_to_zero: result does not send r to 0");
  return {g, word, transporter, expanded};
}

std::vector<Rational> transition_points_window(const LazyHomeo& h, const Interval& W) {
  PLMap m = window_restrict(h, Interval(W.lo - Dyadic(1), W.hi + Dyadic(1)));
  Rational lo = W.lo.to_rational(), hi = W.hi.to_rational();
  std::set<Rational> out;
  for (const auto& c : moved_components(m)) {
    for (const Rational& e : {c.lo, c.hi}) {
      if (lo < e && e < hi) out.insert(e);
    }
  }
  return {out.begin(), out.end()};
}

}  // namespace lineorder
