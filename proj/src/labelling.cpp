#include "lineorder/labelling.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace lineorder {

// ---------------------------------------------------------------------------
// letters and words

Letter Letter::parse(std::string_view token) {
  if (token == "a") return {Kind::A, false};
  if (token == "a'") return {Kind::A, true};
  if (token == "b") return {Kind::B, false};
  if (token == "b'") return {Kind::B, true};
  throw InvalidInput("unknown letter '" + std::string(token) + "' (expected a, a', b or b')");
}

std::string Letter::to_string() const {
  std::string s(1, kind == Kind::A ? 'a' : 'b');
  if (inverse) s += '\'';
  return s;
}

LWord LWord::parse(std::string_view text) {
  LWord w;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    Letter l = Letter::parse(token);
    if (!w.letters.empty() && w.letters.back().kind == l.kind) {
      throw InvalidInput("alternation broken at letter " + std::to_string(w.letters.size()) + " ('" + token + "')");
    }
    w.letters.push_back(l);
  }
  return w;
}

std::string LWord::key() const {
  std::string k(letters.size(), '\0');
  for (std::size_t i = 0; i < letters.size(); ++i) k[i] = static_cast<char>('0' + letters[i].code());
  return k;
}

std::string LWord::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (i) s += ' ';
    s += letters[i].to_string();
  }
  return s;
}

bool LWord::occurs_in(const LWord& text) const {
  if (letters.size() > text.letters.size()) return false;
  return std::search(text.letters.begin(), text.letters.end(), letters.begin(), letters.end()) != text.letters.end();
}

LWord formal_inverse(const LWord& w) {
  LWord out;
  out.letters.reserve(w.size());
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) out.letters.push_back(it->inverted());
  return out;
}

// ---------------------------------------------------------------------------
// base interface

std::optional<std::int64_t> Labelling::period() const {
  auto p = period_letters();
  if (!p) return std::nullopt;
  return *p / 2;
}

LWord Labelling::letters(std::int64_t h, std::size_t count) const {
  LWord w;
  w.letters.reserve(count);
  for (std::size_t i = 0; i < count; ++i) w.letters.push_back(letter_at(h + static_cast<std::int64_t>(i)));
  return w;
}

namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

// All length-k windows of text (which starts at half-index offset), keeping the
// first occurrence of each word.
void collect_factors(const LWord& text, std::int64_t offset, std::size_t k, std::map<std::string, Factor>& out) {
  if (text.size() < k) return;
  for (std::size_t i = 0; i + k <= text.size(); ++i) {
    LWord w;
    w.letters.assign(text.letters.begin() + static_cast<std::ptrdiff_t>(i),
                     text.letters.begin() + static_cast<std::ptrdiff_t>(i + k));
    std::string key = w.key();
    out.try_emplace(std::move(key), Factor{std::move(w), offset + static_cast<std::int64_t>(i)});
  }
}

std::vector<Factor> to_vector(std::map<std::string, Factor>&& m) {
  std::vector<Factor> out;
  out.reserve(m.size());
  for (auto& [key, f] : m) out.push_back(std::move(f));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// periodic

PeriodicLabelling::PeriodicLabelling(const LWord& word) {
  if (word.empty() || word.size() % 2 != 0) throw InvalidInput("periodic word must have positive even length");
  if (!word.starts_integer()) throw InvalidInput("periodic word must start with an a-letter");
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word.letters[i].kind != kind_at(static_cast<std::int64_t>(i))) {
      throw InvalidInput("alternation broken at letter " + std::to_string(i));
    }
  }
  std::size_t n = word.size();
  std::size_t minimal = n;
  for (std::size_t d = 2; d < n; d += 2) {
    if (n % d != 0) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = word.letters[i] == word.letters[i - d];
    if (ok) {
      minimal = d;
      break;
    }
  }
  word_.letters.assign(word.letters.begin(), word.letters.begin() + static_cast<std::ptrdiff_t>(minimal));
}

Letter PeriodicLabelling::letter_at(std::int64_t h) const {
  return word_.letters[static_cast<std::size_t>(floor_mod(h, static_cast<std::int64_t>(word_.size())))];
}

std::vector<Factor> PeriodicLabelling::factors(std::size_t k) const {
  if (k == 0) throw InvalidInput("factor length must be positive");
  std::map<std::string, Factor> out;
  auto p = static_cast<std::int64_t>(word_.size());
  for (std::int64_t h = 0; h < p; ++h) {
    LWord w = letters(h, k);
    std::string key = w.key();
    out.try_emplace(std::move(key), Factor{std::move(w), h});
  }
  return to_vector(std::move(out));
}

std::string PeriodicLabelling::describe() const { return "periodic(" + word_.to_string() + ")"; }

LabellingPtr periodic_from_word(const LWord& w) { return std::make_shared<PeriodicLabelling>(w); }

// ---------------------------------------------------------------------------
// recursive

RecursiveLabelling::RecursiveLabelling(Letter pad_a, Letter pad_b, int depth_hint) : pad_a_(pad_a), pad_b_(pad_b) {
  if (pad_a.kind != Letter::Kind::A || pad_b.kind != Letter::Kind::B) {
    throw InvalidInput("recursive pads must be an a-letter followed by a b-letter");
  }
  lengths_.push_back(2);
  starts_.push_back(0);
  // stop well before 3|W| + 2 overflows
  while (lengths_.back() < (std::int64_t{1} << 60) / 4) {
    std::int64_t len = lengths_.back();
    std::int64_t n = static_cast<std::int64_t>(lengths_.size()) - 1;
    starts_.push_back(n % 2 == 0 ? starts_.back() : starts_.back() - 2 * len - 2);
    lengths_.push_back(3 * len + 2);
  }
  blocks_.resize(lengths_.size());
  if (depth_hint > 0) block(std::min(depth_hint, max_depth()));
}

std::int64_t RecursiveLabelling::block_length(int n) const {
  if (n < 0 || n > max_depth()) throw InvalidInput("recursion depth out of range");
  return lengths_[static_cast<std::size_t>(n)];
}

std::int64_t RecursiveLabelling::block_start(int n) const {
  if (n < 0 || n > max_depth()) throw InvalidInput("recursion depth out of range");
  return starts_[static_cast<std::size_t>(n)];
}

Letter RecursiveLabelling::letter_in_block(int n, std::int64_t offset) const {
  bool invert = false;
  while (n > 0) {
    std::int64_t len = lengths_[static_cast<std::size_t>(n - 1)];
    if (offset < len) {
      // prefix copy
    } else if (offset == len) {
      return invert ? pad_a_.inverted() : pad_a_;
    } else if (offset <= 2 * len) {
      offset = len - 1 - (offset - len - 1);
      invert = !invert;
    } else if (offset == 2 * len + 1) {
      return invert ? pad_b_.inverted() : pad_b_;
    } else {
      offset -= 2 * len + 2;
    }
    --n;
  }
  Letter base = offset == 0 ? Letter::a() : Letter::b();
  return invert ? base.inverted() : base;
}

int RecursiveLabelling::depth_covering(std::int64_t lo, std::int64_t hi) const {
  for (std::size_t n = 0; n < lengths_.size(); ++n) {
    if (starts_[n] <= lo && hi < starts_[n] + lengths_[n]) return static_cast<int>(n);
  }
  throw InvalidInput("half-index beyond the recursive labelling's range");
}

Letter RecursiveLabelling::letter_at(std::int64_t h) const {
  int n = depth_covering(h, h);
  return letter_in_block(n, h - starts_[static_cast<std::size_t>(n)]);
}

const LWord& RecursiveLabelling::block(int n) const {
  if (n < 0 || n > max_depth()) throw InvalidInput("recursion depth out of range");
  if (lengths_[static_cast<std::size_t>(n)] > (std::int64_t{1} << 28)) {
    throw InvalidInput("block W_" + std::to_string(n) + " is too long to materialize");
  }
  const LWord* prev = n > 0 ? &block(n - 1) : nullptr;
  std::lock_guard<std::mutex> lock(mutex_);
  auto& slot = blocks_[static_cast<std::size_t>(n)];
  if (!slot) {
    auto w = std::make_unique<LWord>();
    if (!prev) {
      w->letters = {Letter::a(), Letter::b()};
    } else {
      LWord inv = formal_inverse(*prev);
      w->letters.reserve(static_cast<std::size_t>(lengths_[static_cast<std::size_t>(n)]));
      w->letters.insert(w->letters.end(), prev->letters.begin(), prev->letters.end());
      w->letters.push_back(pad_a_);
      w->letters.insert(w->letters.end(), inv.letters.begin(), inv.letters.end());
      w->letters.push_back(pad_b_);
      w->letters.insert(w->letters.end(), prev->letters.begin(), prev->letters.end());
    }
    slot = std::move(w);
  }
  return *slot;
}

LWord RecursiveLabelling::letters(std::int64_t h, std::size_t count) const {
  if (count == 0) return {};
  std::int64_t hi = h + static_cast<std::int64_t>(count) - 1;
  int n = depth_covering(h, hi);
  if (lengths_[static_cast<std::size_t>(n)] <= (std::int64_t{1} << 22)) {
    const LWord& b = block(n);
    auto off = static_cast<std::ptrdiff_t>(h - starts_[static_cast<std::size_t>(n)]);
    LWord w;
    w.letters.assign(b.letters.begin() + off, b.letters.begin() + off + static_cast<std::ptrdiff_t>(count));
    return w;
  }
  return Labelling::letters(h, count);
}

std::vector<Factor> RecursiveLabelling::factors(std::size_t k) const {
  if (k == 0) throw InvalidInput("factor length must be positive");
  int m0 = 0;
  while (lengths_[static_cast<std::size_t>(m0)] < static_cast<std::int64_t>(k)) ++m0;
  if (m0 + 3 > max_depth()) throw InvalidInput("factor length too large");
  std::map<std::string, Factor> stable;
  std::map<std::string, Factor> check;
  collect_factors(block(m0 + 2), starts_[static_cast<std::size_t>(m0 + 2)], k, stable);
  collect_factors(block(m0 + 3), starts_[static_cast<std::size_t>(m0 + 3)], k, check);
  if (stable.size() != check.size() ||
      !std::equal(stable.begin(), stable.end(), check.begin(),
                  [](const auto& x, const auto& y) { return x.first == y.first; })) {
    throw InternalError("factor sets of length " + std::to_string(k) + " did not stabilize at depth " +
                        std::to_string(m0 + 2));
  }
  return to_vector(std::move(stable));
}

std::string RecursiveLabelling::describe() const {
  return "recursive(pads " + pad_a_.to_string() + " " + pad_b_.to_string() + ")";
}

LabellingPtr quasi_periodic_recursive(Letter pad_a, Letter pad_b) {
  return std::make_shared<RecursiveLabelling>(pad_a, pad_b);
}

// ---------------------------------------------------------------------------
// mirrored

std::vector<Factor> MirroredLabelling::factors(std::size_t k) const {
  std::map<std::string, Factor> out;
  for (auto& f : base_->factors(k)) {
    LWord w = formal_inverse(f.word);
    std::int64_t start = -(f.start + static_cast<std::int64_t>(k) - 1);
    std::string key = w.key();
    out.try_emplace(std::move(key), Factor{std::move(w), start});
  }
  return to_vector(std::move(out));
}

std::string MirroredLabelling::describe() const { return "mirror(" + base_->describe() + ")"; }

// ---------------------------------------------------------------------------
// words of a labelling

std::int64_t half_index(const Dyadic& x) {
  Dyadic twice = x.scaled(1);
  if (!twice.is_integer()) throw InvalidInput(x.to_string() + " is not in (1/2)Z");
  return twice.floor_int();
}

LWord word_at(const Labelling& rho, const Dyadic& x, std::int64_t n) {
  if (n < 0) throw InvalidInput("word_at: n must be non-negative");
  std::int64_t centre = 2 * x.floor_int() + 1;
  return rho.letters(centre - n, static_cast<std::size_t>(2 * n + 1));
}

LWord word_on_interval(const Labelling& rho, const Interval& I, std::int64_t n) {
  if (n < 1) throw InvalidInput("word_on_interval: n must be positive");
  std::int64_t lo = half_index(I.lo) - n;
  std::int64_t hi = half_index(I.hi) + n;
  return rho.letters(lo, static_cast<std::size_t>(hi - lo + 1));
}

// ---------------------------------------------------------------------------
// axioms

namespace {

std::set<std::string> factor_keys(const Labelling& rho, std::size_t k) {
  std::set<std::string> out;
  for (const auto& f : rho.factors(k)) out.insert(f.word.key());
  return out;
}

}  // namespace

AxiomReport axiom_report(const Labelling& rho, std::size_t k) {
  if (k == 0) throw InvalidInput("axiom_report: k must be positive");
  AxiomReport report;
  // cache of factor lists by length
  std::map<std::size_t, std::vector<std::string>> by_length;
  auto keys_of = [&](std::size_t n) -> const std::vector<std::string>& {
    auto it = by_length.find(n);
    if (it == by_length.end()) {
      std::vector<std::string> keys;
      for (const auto& f : rho.factors(n)) keys.push_back(f.word.key());
      it = by_length.emplace(n, std::move(keys)).first;
    }
    return it->second;
  };
  auto all_contain = [&](std::size_t n, const std::string& key) {
    for (const auto& s : keys_of(n)) {
      if (s.find(key) == std::string::npos) return false;
    }
    return true;
  };
  const std::size_t cap = 4096;
  for (std::size_t len = 1; len <= k; ++len) {
    std::set<std::string> present;
    for (const auto& s : keys_of(len)) present.insert(s);
    for (const auto& f : rho.factors(len)) {
      AxiomEntry e;
      e.word = f.word;
      std::string key = f.word.key();
      e.inverse_present = present.count(formal_inverse(f.word).key()) > 0;
      // monotone in n: containing w at length n implies containing at n+1
      std::size_t lo = len;
      std::size_t hi = len;
      while (hi <= cap && !all_contain(hi, key)) {
        lo = hi + 1;
        hi = hi * 2;
      }
      if (hi > cap) {
        e.recurrence_bound = -1;
        report.recurrent = false;
      } else {
        while (lo < hi) {
          std::size_t mid = lo + (hi - lo) / 2;
          if (all_contain(mid, key)) {
            hi = mid;
          } else {
            lo = mid + 1;
          }
        }
        e.recurrence_bound = static_cast<std::int64_t>(lo);
      }
      if (!e.inverse_present) report.inverse_closed = false;
      report.entries.push_back(std::move(e));
    }
  }
  return report;
}

bool same_factors_up_to(const Labelling& x, const Labelling& y, std::size_t k) {
  for (std::size_t j = 1; j <= k; ++j) {
    if (factor_keys(x, j) != factor_keys(y, j)) return false;
  }
  return true;
}

LabellingPtr periodic_approximation(const Labelling& rho, std::size_t k) {
  if (k == 0) throw InvalidInput("periodic_approximation: k must be positive");
  std::unordered_set<std::string> target;
  for (const auto& f : rho.factors(k)) target.insert(f.word.key());
  // grow X = [0, end) until it carries every length-k factor
  std::unordered_set<std::string> seen;
  std::int64_t end = 0;
  std::string window;
  const std::int64_t limit = std::int64_t{1} << 26;
  while (seen.size() < target.size()) {
    if (end > limit) throw InternalError("periodic_approximation: block search exceeded its bound");
    window.push_back(static_cast<char>('0' + rho.letter_at(end).code()));
    ++end;
    if (window.size() > k) window.erase(window.begin());
    if (window.size() == k) {
      if (!target.count(window)) throw InternalError("periodic_approximation: unknown factor " + window);
      seen.insert(window);
    }
  }
  LWord head = rho.letters(0, k);
  // cut point: even, at or past the end of X, where the first k letters recur
  std::int64_t cut = end + (end % 2);
  while (rho.letters(cut, k) != head) {
    cut += 2;
    if (cut > limit) throw InternalError("periodic_approximation: recurrence search exceeded its bound");
  }
  auto sigma = periodic_from_word(rho.letters(0, static_cast<std::size_t>(cut)));
  if (!same_factors_up_to(rho, *sigma, k)) {
    throw InternalError("periodic_approximation: factor sets differ for k = " + std::to_string(k));
  }
  return sigma;
}

// ---------------------------------------------------------------------------
// file format

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

}  // namespace

LabellingPtr parse_labelling(std::string_view text) {
  std::map<std::string, std::pair<std::string, int>> fields;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    auto colon = t.find(':');
    if (colon == std::string::npos) throw InvalidInput("line " + std::to_string(lineno) + ": expected 'key: value'");
    std::string key = trim(std::string_view(t).substr(0, colon));
    std::string value = trim(std::string_view(t).substr(colon + 1));
    if (key != "type" && key != "word" && key != "pads" && key != "depth-hint") {
      throw InvalidInput("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (!fields.emplace(key, std::make_pair(value, lineno)).second) {
      throw InvalidInput("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  auto type = fields.find("type");
  if (type == fields.end()) throw InvalidInput("labelling file has no 'type:' line");
  auto at_line = [&](const std::string& key, const std::string& msg) {
    return InvalidInput("line " + std::to_string(fields.at(key).second) + ": " + msg);
  };
  if (type->second.first == "periodic") {
    if (!fields.count("word")) throw InvalidInput("periodic labelling needs a 'word:' line");
    if (fields.count("pads") || fields.count("depth-hint")) {
      throw InvalidInput("periodic labelling takes only 'word:'");
    }
    try {
      return periodic_from_word(LWord::parse(fields.at("word").first));
    } catch (const InvalidInput& e) {
      throw at_line("word", e.what());
    }
  }
  if (type->second.first == "recursive") {
    if (fields.count("word")) throw InvalidInput("recursive labelling takes 'pads:', not 'word:'");
    Letter pa = Letter::a();
    Letter pb = Letter::b();
    if (fields.count("pads")) {
      LWord pads;
      try {
        pads = LWord::parse(fields.at("pads").first);
      } catch (const InvalidInput& e) {
        throw at_line("pads", e.what());
      }
      if (pads.size() != 2 || pads.letters[0].kind != Letter::Kind::A) {
        throw at_line("pads", "expected an a-letter then a b-letter");
      }
      pa = pads.letters[0];
      pb = pads.letters[1];
    }
    int depth = 0;
    if (fields.count("depth-hint")) {
      const std::string& v = fields.at("depth-hint").first;
      try {
        std::size_t used = 0;
        depth = std::stoi(v, &used);
        if (used != v.size() || depth < 0 || depth > 16) throw std::invalid_argument(v);
      } catch (const std::exception&) {
        throw at_line("depth-hint", "expected an integer in 0..16");
      }
    }
    return std::make_shared<RecursiveLabelling>(pa, pb, depth);
  }
  throw at_line("type", "type must be 'periodic' or 'recursive'");
}

LabellingPtr load_labelling(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open labelling file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_labelling(buf.str());
}

}  // namespace lineorder
