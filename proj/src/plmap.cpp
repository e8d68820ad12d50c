#include "lineorder/plmap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace lineorder {

Interval::Interval(Dyadic lo_, Dyadic hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (!(lo < hi)) throw InvalidInput("empty interval [" + lo.to_string() + ", " + hi.to_string() + "]");
}

std::string Interval::to_string() const { return "[" + lo.to_string() + ", " + hi.to_string() + "]"; }

// ---------------------------------------------------------------------------
// construction

PLMap PLMap::from_points(std::vector<Dyadic> xs, std::vector<Dyadic> ys) {
  if (xs.size() != ys.size()) throw InvalidInput("PLMap: breakpoint and value lists differ in length");
  if (xs.size() < 2) throw InvalidInput("PLMap: need at least two breakpoints");
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (!(xs[i] < xs[i + 1])) throw InvalidInput("PLMap: breakpoints not strictly increasing at " + xs[i + 1].to_string());
    if (!(ys[i] < ys[i + 1])) throw InvalidInput("PLMap: values not strictly increasing at " + ys[i + 1].to_string());
  }
  return build(std::move(xs), std::move(ys));
}

PLMap PLMap::build(std::vector<Dyadic> xs, std::vector<Dyadic> ys) {
  PLMap f;
  f.xs_ = std::move(xs);
  f.ys_ = std::move(ys);
  f.canonicalize();
  f.compute_slopes();
  return f;
}

PLMap PLMap::identity(const Interval& domain) { return build({domain.lo, domain.hi}, {domain.lo, domain.hi}); }

PLMap PLMap::shift(const Interval& domain, const Dyadic& d) {
  return build({domain.lo, domain.hi}, {domain.lo + d, domain.hi + d});
}

void PLMap::canonicalize() {
  if (xs_.size() <= 2) return;
  std::vector<Dyadic> xs;
  std::vector<Dyadic> ys;
  xs.reserve(xs_.size());
  ys.reserve(ys_.size());
  xs.push_back(xs_[0]);
  ys.push_back(ys_[0]);
  for (std::size_t i = 1; i + 1 < xs_.size(); ++i) {
    const Dyadic& x0 = xs.back();
    const Dyadic& y0 = ys.back();
    // collinear iff (y1-y0)(x2-x1) == (y2-y1)(x1-x0)
    Dyadic lhs = (ys_[i] - y0) * (xs_[i + 1] - xs_[i]);
    Dyadic rhs = (ys_[i + 1] - ys_[i]) * (xs_[i] - x0);
    if (lhs == rhs) continue;
    xs.push_back(xs_[i]);
    ys.push_back(ys_[i]);
  }
  xs.push_back(xs_.back());
  ys.push_back(ys_.back());
  xs_ = std::move(xs);
  ys_ = std::move(ys);
}

void PLMap::compute_slopes() {
  slope_exp_.assign(pieces(), 0);
  power2_ = true;
  for (std::size_t i = 0; i < pieces(); ++i) {
    Rational s = slope(i);
    auto d = to_dyadic(s);
    std::optional<std::int64_t> k;
    if (d) k = log2_exact(*d);
    if (!k) {
      power2_ = false;
      slope_exp_.clear();
      return;
    }
    slope_exp_[i] = *k;
  }
}

Rational PLMap::slope(std::size_t i) const {
  Rational s = (ys_[i + 1] - ys_[i]).to_rational() / (xs_[i + 1] - xs_[i]).to_rational();
  return s;
}

std::size_t PLMap::piece_of(const Dyadic& x) const {
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  std::size_t idx = static_cast<std::size_t>(it - xs_.begin());
  if (idx == 0) return 0;
  return std::min(idx - 1, pieces() - 1);
}

Dyadic PLMap::eval_on_piece(std::size_t i, const Dyadic& x) const {
  if (power2_) return ys_[i] + (x - xs_[i]).scaled(slope_exp_[i]);
  Rational y = ys_[i].to_rational() + (x - xs_[i]).to_rational() * slope(i);
  auto d = to_dyadic(y);
  if (!d) throw InvalidInput("PLMap: image of " + x.to_string() + " is not dyadic");
  return *d;
}

Dyadic PLMap::evaluate(const Dyadic& x) const {
  if (x < xs_.front() || x > xs_.back()) {
    throw InvalidInput("PLMap: " + x.to_string() + " outside domain " + domain().to_string());
  }
  return eval_on_piece(piece_of(x), x);
}

Rational PLMap::evaluate(const Rational& x) const {
  if (compare(xs_.front(), x) > 0 || compare(xs_.back(), x) < 0) {
    throw InvalidInput("PLMap: " + x.get_str() + " outside domain " + domain().to_string());
  }
  std::size_t i = 0;
  while (i + 1 < pieces() && compare(xs_[i + 1], x) <= 0) ++i;
  return ys_[i].to_rational() + (x - xs_[i].to_rational()) * slope(i);
}

bool PLMap::is_identity() const { return xs_.size() == 2 && xs_ == ys_; }

// ---------------------------------------------------------------------------
// algebra

PLMap invert(const PLMap& f) {
  PLMap g;
  g.xs_ = f.ys_;
  g.ys_ = f.xs_;
  g.compute_slopes();
  return g;
}

namespace {

Dyadic preimage_on_piece(const PLMap& f, std::size_t i, const Dyadic& t) {
  const auto& xs = f.breakpoints();
  const auto& ys = f.values();
  if (f.power2()) return xs[i] + (t - ys[i]).scaled(-f.slope_exponent(i));
  Rational x = xs[i].to_rational() + (t - ys[i]).to_rational() / f.slope(i);
  auto d = to_dyadic(x);
  if (!d) throw InvalidInput("compose: breakpoint of the composite is not dyadic");
  return *d;
}

}  // namespace

PLMap compose(const PLMap& f, const PLMap& g) {
  if (f.ys_.front() != g.xs_.front() || f.ys_.back() != g.xs_.back()) {
    throw InvalidInput("compose: range " + f.range().to_string() + " != domain " + g.domain().to_string());
  }
  const auto& fx = f.xs_;
  const auto& fy = f.ys_;
  const auto& gx = g.xs_;
  const auto& gy = g.ys_;
  std::vector<Dyadic> xs;
  std::vector<Dyadic> ys;
  xs.reserve(fx.size() + gx.size());
  ys.reserve(fx.size() + gx.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < fy.size() && j < gx.size()) {
    auto c = fy[i] <=> gx[j];
    if (c == 0) {
      xs.push_back(fx[i]);
      ys.push_back(gy[j]);
      ++i;
      ++j;
    } else if (c < 0) {
      // fy[i] lies inside g-piece j-1
      xs.push_back(fx[i]);
      ys.push_back(g.eval_on_piece(j - 1, fy[i]));
      ++i;
    } else {
      // gx[j] lies inside f-piece i-1 (in the range)
      xs.push_back(preimage_on_piece(f, i - 1, gx[j]));
      ys.push_back(gy[j]);
      ++j;
    }
  }
  return PLMap::build(std::move(xs), std::move(ys));
}

Dyadic one_sided_slope(const PLMap& f, const Dyadic& x, Side side) {
  const auto& xs = f.breakpoints();
  if (x < xs.front() || x > xs.back()) throw InvalidInput("one_sided_slope: point outside domain");
  if (side == Side::Left && x == xs.front()) throw InvalidInput("one_sided_slope: no left piece at domain start");
  if (side == Side::Right && x == xs.back()) throw InvalidInput("one_sided_slope: no right piece at domain end");
  std::size_t i = f.piece_of(x);
  if (side == Side::Left && xs[i] == x) --i;
  auto d = to_dyadic(f.slope(i));
  if (!d) throw InvalidInput("one_sided_slope: slope is not dyadic");
  return *d;
}

PLMap flip_conjugate(const PLMap& f, const Interval& I) {
  if (f.domain() != I || f.range() != I) {
    throw InvalidInput("flip_conjugate: map is not a self-map of " + I.to_string());
  }
  Dyadic s = I.lo + I.hi;
  const auto& xs = f.breakpoints();
  const auto& ys = f.values();
  std::vector<Dyadic> nx(xs.size());
  std::vector<Dyadic> ny(ys.size());
  // x -> s - f(s - x) sends s - x_k to s - y_k
  for (std::size_t k = 0; k < xs.size(); ++k) {
    nx[xs.size() - 1 - k] = s - xs[k];
    ny[xs.size() - 1 - k] = s - ys[k];
  }
  return PLMap::from_points(std::move(nx), std::move(ny));
}

PLMap translate(const PLMap& f, const Dyadic& d) {
  std::vector<Dyadic> xs = f.breakpoints();
  std::vector<Dyadic> ys = f.values();
  for (auto& x : xs) x += d;
  for (auto& y : ys) y += d;
  return PLMap::from_points(std::move(xs), std::move(ys));
}

PLMap isometry_conjugate(const PLMap& f, const Interval& J, Orientation orientation) {
  Interval D = f.domain();
  if (D.length() != J.length()) throw InvalidInput("isometry_conjugate: length mismatch");
  if (f.range() != D) throw InvalidInput("isometry_conjugate: not a self-map");
  PLMap base = orientation == Orientation::Reversing ? flip_conjugate(f, D) : f;
  return translate(base, J.lo - D.lo);
}

PLMap restrict(const PLMap& f, const Interval& sub) {
  const auto& xs = f.breakpoints();
  if (sub.lo < xs.front() || sub.hi > xs.back()) {
    throw InvalidInput("restrict: " + sub.to_string() + " not inside " + f.domain().to_string());
  }
  std::vector<Dyadic> nx;
  std::vector<Dyadic> ny;
  nx.push_back(sub.lo);
  ny.push_back(f(sub.lo));
  auto first = std::upper_bound(xs.begin(), xs.end(), sub.lo);
  for (auto it = first; it != xs.end() && *it < sub.hi; ++it) {
    nx.push_back(*it);
    ny.push_back(f.values()[static_cast<std::size_t>(it - xs.begin())]);
  }
  nx.push_back(sub.hi);
  ny.push_back(f(sub.hi));
  return PLMap::from_points(std::move(nx), std::move(ny));
}

PLMap glue(const std::vector<PLMap>& parts) {
  if (parts.empty()) throw InvalidInput("glue: nothing to glue");
  std::vector<Dyadic> xs = parts[0].breakpoints();
  std::vector<Dyadic> ys = parts[0].values();
  for (std::size_t p = 1; p < parts.size(); ++p) {
    const auto& px = parts[p].breakpoints();
    const auto& py = parts[p].values();
    if (px.front() != xs.back() || py.front() != ys.back()) {
      throw InvalidInput("glue: parts do not abut at " + xs.back().to_string());
    }
    xs.insert(xs.end(), px.begin() + 1, px.end());
    ys.insert(ys.end(), py.begin() + 1, py.end());
  }
  return PLMap::from_points(std::move(xs), std::move(ys));
}

// ---------------------------------------------------------------------------
// fixed points and supports

std::vector<FixedRun> fixed_runs(const PLMap& f) {
  const auto& xs = f.breakpoints();
  const auto& ys = f.values();
  std::vector<FixedRun> raw;
  for (std::size_t i = 0; i < f.pieces(); ++i) {
    Dyadic d0 = ys[i] - xs[i];
    Dyadic d1 = ys[i + 1] - xs[i + 1];
    int s0 = d0.sign();
    int s1 = d1.sign();
    if (s0 == 0 && s1 == 0) {
      raw.push_back({xs[i].to_rational(), xs[i + 1].to_rational()});
    } else if (s0 == 0) {
      raw.push_back({xs[i].to_rational(), xs[i].to_rational()});
    } else if (s1 == 0) {
      raw.push_back({xs[i + 1].to_rational(), xs[i + 1].to_rational()});
    } else if (s0 != s1) {
      // displacement is affine on the piece and changes sign
      Rational a = d0.to_rational();
      Rational b = d1.to_rational();
      Rational z = xs[i].to_rational() + a * (xs[i + 1] - xs[i]).to_rational() / (a - b);
      raw.push_back({z, z});
    }
  }
  std::vector<FixedRun> merged;
  for (auto& r : raw) {
    if (!merged.empty() && r.lo <= merged.back().hi) {
      if (r.hi > merged.back().hi) merged.back().hi = r.hi;
    } else {
      merged.push_back(r);
    }
  }
  return merged;
}

std::vector<OpenInterval> moved_components(const PLMap& f) {
  Rational lo = f.breakpoints().front().to_rational();
  Rational hi = f.breakpoints().back().to_rational();
  std::vector<OpenInterval> out;
  Rational cursor = lo;
  for (const auto& run : fixed_runs(f)) {
    if (run.lo > cursor) out.push_back({cursor, run.lo});
    cursor = run.hi;
  }
  if (cursor < hi) out.push_back({cursor, hi});
  return out;
}

bool fixes_neighbourhood(const PLMap& f, const Dyadic& x) {
  Rational q = x.to_rational();
  for (const auto& run : fixed_runs(f)) {
    if (run.lo < q && q < run.hi) return true;
  }
  return false;
}

std::vector<OpenInterval> support_components(const PLMap& f) {
  if (f.domain() != f.range()) throw InvalidInput("support_components: domain differs from range");
  return moved_components(f);
}

std::vector<Rational> transition_points(const PLMap& f) {
  Rational lo = f.breakpoints().front().to_rational();
  Rational hi = f.breakpoints().back().to_rational();
  std::vector<Rational> out;
  auto push = [&](const Rational& p) {
    if (p <= lo || p >= hi) return;
    if (!out.empty() && out.back() == p) return;
    out.push_back(p);
  };
  for (const auto& c : moved_components(f)) {
    push(c.lo);
    push(c.hi);
  }
  return out;
}

std::optional<Interval> active_hull(const PLMap& f) {
  const auto& xs = f.breakpoints();
  const auto& ys = f.values();
  std::optional<std::size_t> first;
  std::size_t last = 0;
  for (std::size_t i = 0; i < f.pieces(); ++i) {
    bool ident = xs[i] == ys[i] && xs[i + 1] == ys[i + 1];
    if (ident) continue;
    if (!first) first = i;
    last = i;
  }
  if (!first) return std::nullopt;
  return Interval(xs[*first], xs[last + 1]);
}

// ---------------------------------------------------------------------------
// dyadic constructions

namespace {

std::vector<Dyadic> binary_digits(const Dyadic& length) {
  std::vector<Dyadic> out;
  const mpz_class& num = length.numerator();
  if (num <= 0) throw InvalidInput("binary_digits: non-positive length");
  auto bits = static_cast<std::int64_t>(mpz_sizeinbase(num.get_mpz_t(), 2));
  for (std::int64_t b = bits - 1; b >= 0; --b) {
    if (mpz_tstbit(num.get_mpz_t(), static_cast<mp_bitcnt_t>(b))) {
      out.push_back(Dyadic::from_parts(1, length.exponent() - b));
    }
  }
  return out;
}

void halve_largest(std::vector<Dyadic>& pieces) {
  auto it = std::max_element(pieces.begin(), pieces.end());  // leftmost maximum
  Dyadic h = it->half();
  *it = h;
  pieces.insert(it, h);
}

// floor(log2(x)) for x > 0
std::int64_t floor_log2(const Dyadic& x) {
  auto bits = static_cast<std::int64_t>(mpz_sizeinbase(x.numerator().get_mpz_t(), 2));
  return bits - 1 - x.exponent();
}

}  // namespace

PLMap dyadic_interval_map(const Interval& J, const Interval& I) {
  std::vector<Dyadic> src = binary_digits(J.length());
  std::vector<Dyadic> dst = binary_digits(I.length());
  while (src.size() < dst.size()) halve_largest(src);
  while (dst.size() < src.size()) halve_largest(dst);
  std::vector<Dyadic> xs{J.lo};
  std::vector<Dyadic> ys{I.lo};
  for (std::size_t k = 0; k < src.size(); ++k) {
    xs.push_back(xs.back() + src[k]);
    ys.push_back(ys.back() + dst[k]);
  }
  return PLMap::from_points(std::move(xs), std::move(ys));
}

PLMap dyadic_transporter(const Dyadic& u, const Dyadic& v, const Interval& S) {
  if (!(S.lo < u && u < S.hi) || !(S.lo < v && v < S.hi)) {
    throw InvalidInput("dyadic_transporter: points must be interior to " + S.to_string());
  }
  if (u == v) return PLMap::identity(S);
  Dyadic room = std::min(std::min(u, v) - S.lo, S.hi - std::max(u, v));
  Dyadic margin = Dyadic::from_parts(1, -floor_log2(room.half()));
  Dyadic a = S.lo + margin;
  Dyadic b = S.hi - margin;
  std::vector<PLMap> parts;
  parts.push_back(PLMap::identity({S.lo, a}));
  parts.push_back(dyadic_interval_map({a, u}, {a, v}));
  parts.push_back(dyadic_interval_map({u, b}, {v, b}));
  parts.push_back(PLMap::identity({b, S.hi}));
  return glue(parts);
}

// ---------------------------------------------------------------------------
// serialization

std::string to_json(const PLMap& f) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < f.breakpoints().size(); ++i) {
    arr.push_back({f.breakpoints()[i].to_string(), f.values()[i].to_string()});
  }
  return arr.dump();
}

PLMap plmap_from_json(const std::string& text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("PLMap JSON: ") + e.what());
  }
  if (!arr.is_array()) throw InvalidInput("PLMap JSON: expected an array of pairs");
  std::vector<Dyadic> xs;
  std::vector<Dyadic> ys;
  for (const auto& pair : arr) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
      throw InvalidInput("PLMap JSON: each entry must be [\"x\", \"y\"]");
    }
    xs.push_back(Dyadic::parse(pair[0].get<std::string>()));
    ys.push_back(Dyadic::parse(pair[1].get<std::string>()));
  }
  return PLMap::from_points(std::move(xs), std::move(ys));
}

std::string to_svg(const PLMap& f, const std::string& title) {
  const double size = 480.0;
  const double pad = 40.0;
  double x0 = f.domain().lo.to_double();
  double x1 = f.domain().hi.to_double();
  double y0 = f.range().lo.to_double();
  double y1 = f.range().hi.to_double();
  double lo = std::min(x0, y0);
  double hi = std::max(x1, y1);
  auto sx = [&](double v) { return pad + (v - lo) / (hi - lo) * size; };
  auto sy = [&](double v) { return pad + size - (v - lo) / (hi - lo) * size; };
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * pad << "\" height=\"" << size + 2 * pad
      << "\">\n";
  if (!title.empty()) out << "  <title>" << title << "</title>\n";
  out << "  <rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << size << "\" height=\"" << size
      << "\" fill=\"none\" stroke=\"#999\"/>\n";
  out << "  <line x1=\"" << sx(lo) << "\" y1=\"" << sy(lo) << "\" x2=\"" << sx(hi) << "\" y2=\"" << sy(hi)
      << "\" stroke=\"#ccc\" stroke-dasharray=\"4 4\"/>\n";
  out << "  <polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < f.breakpoints().size(); ++i) {
    out << sx(f.breakpoints()[i].to_double()) << "," << sy(f.values()[i].to_double()) << " ";
  }
  out << "\"/>\n";
  out << "  <text x=\"" << pad << "\" y=\"" << pad - 12 << "\" font-family=\"monospace\" font-size=\"12\">"
      << f.domain().to_string() << " -> " << f.range().to_string() << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace lineorder
