#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lineorder/dyadic.hpp"
#include "lineorder/plmap.hpp"

namespace lineorder {

/// One of a, a^-1, b, b^-1. A-letters sit at integers, B-letters at
/// half-integers.
struct Letter {
  enum class Kind : std::uint8_t { A = 0, B = 1 };
  Kind kind = Kind::A;
  bool inverse = false;

  static Letter a() { return {Kind::A, false}; }
  static Letter b() { return {Kind::B, false}; }
  /// "a", "a'", "b", "b'".
  static Letter parse(std::string_view token);

  Letter inverted() const { return {kind, !inverse}; }
  /// 0..3, stable across runs.
  std::uint8_t code() const { return static_cast<std::uint8_t>(static_cast<int>(kind) | (inverse ? 2 : 0)); }
  std::string to_string() const;
  friend bool operator==(const Letter&, const Letter&) = default;
};

/// Kind of the letter at half-index h (position h/2).
inline Letter::Kind kind_at(std::int64_t h) { return (h % 2 == 0) ? Letter::Kind::A : Letter::Kind::B; }

/// Finite word of consecutive labelling letters. Kinds alternate; the first
/// letter's kind fixes the start parity.
struct LWord {
  std::vector<Letter> letters;

  /// Whitespace-separated tokens, e.g. "a b a' b'". Throws InvalidInput on
  /// unknown tokens or alternation breaks (with the offending index).
  static LWord parse(std::string_view text);

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  /// Starts at an integer position (first letter is an A-letter).
  bool starts_integer() const { return letters.empty() || letters.front().kind == Letter::Kind::A; }
  /// Compact key for hashing and ordering.
  std::string key() const;
  std::string to_string() const;
  /// Does this word occur as a factor of the other?
  bool occurs_in(const LWord& text) const;

  friend bool operator==(const LWord& x, const LWord& y) { return x.letters == y.letters; }
  friend bool operator<(const LWord& x, const LWord& y) { return x.key() < y.key(); }
};

/// Reverse and invert every letter.
LWord formal_inverse(const LWord& w);

/// A factor of a labelling with the half-index of one occurrence.
struct Factor {
  LWord word;
  std::int64_t start = 0;
};

/// rho: (1/2)Z -> {a, a^-1, b, b^-1}. Queries are by half-index h.
/// Implementations are immutable after construction apart from internal
/// caches, and are safe to query concurrently.
class Labelling {
 public:
  virtual ~Labelling() = default;
  virtual Letter letter_at(std::int64_t h) const = 0;
  /// Letters per period (even) for periodic labellings.
  virtual std::optional<std::int64_t> period_letters() const { return std::nullopt; }
  /// Every factor of length k, one witness each, ordered by key().
  virtual std::vector<Factor> factors(std::size_t k) const = 0;
  virtual std::string describe() const = 0;

  /// Real-line period p = letters / 2.
  std::optional<std::int64_t> period() const;
  /// Letters at half-indices [h, h + count).
  virtual LWord letters(std::int64_t h, std::size_t count) const;
};

using LabellingPtr = std::shared_ptr<const Labelling>;

/// Bi-infinite repetition of a word of even length starting at an A-letter.
/// The stored period is the minimal one.
class PeriodicLabelling final : public Labelling {
 public:
  explicit PeriodicLabelling(const LWord& word);
  Letter letter_at(std::int64_t h) const override;
  std::optional<std::int64_t> period_letters() const override {
    return static_cast<std::int64_t>(word_.size());
  }
  std::vector<Factor> factors(std::size_t k) const override;
  std::string describe() const override;
  const LWord& word() const { return word_; }

 private:
  LWord word_;
};

/// Quasi-periodic labelling from W_0 = a b, W_{n+1} = W_n A inv(W_n) B W_n,
/// with W_n anchored inside W_{n+1} at the prefix copy for even n and at the
/// suffix copy for odd n, so the blocks exhaust both directions.
class RecursiveLabelling final : public Labelling {
 public:
  explicit RecursiveLabelling(Letter pad_a = Letter::a(), Letter pad_b = Letter::b(), int depth_hint = 0);
  Letter letter_at(std::int64_t h) const override;
  std::vector<Factor> factors(std::size_t k) const override;
  std::string describe() const override;
  LWord letters(std::int64_t h, std::size_t count) const override;

  /// |W_n|.
  std::int64_t block_length(int n) const;
  /// Half-index of the first letter of W_n.
  std::int64_t block_start(int n) const;
  /// W_n, materialized and cached.
  const LWord& block(int n) const;
  int max_depth() const { return static_cast<int>(lengths_.size()) - 1; }
  Letter pad_a() const { return pad_a_; }
  Letter pad_b() const { return pad_b_; }

 private:
  Letter letter_in_block(int n, std::int64_t offset) const;
  int depth_covering(std::int64_t lo, std::int64_t hi) const;

  Letter pad_a_;
  Letter pad_b_;
  std::vector<std::int64_t> lengths_;
  std::vector<std::int64_t> starts_;
  mutable std::mutex mutex_;
  mutable std::vector<std::unique_ptr<LWord>> blocks_;
};

/// tau(x) = rho(-x)^-1.
class MirroredLabelling final : public Labelling {
 public:
  explicit MirroredLabelling(LabellingPtr base) : base_(std::move(base)) {}
  Letter letter_at(std::int64_t h) const override { return base_->letter_at(-h).inverted(); }
  std::optional<std::int64_t> period_letters() const override { return base_->period_letters(); }
  std::vector<Factor> factors(std::size_t k) const override;
  std::string describe() const override;

 private:
  LabellingPtr base_;
};

LabellingPtr periodic_from_word(const LWord& w);
LabellingPtr quasi_periodic_recursive(Letter pad_a = Letter::a(), Letter pad_b = Letter::b());

/// The 2n + 1 letters centred at floor(x) + 1/2.
LWord word_at(const Labelling& rho, const Dyadic& x, std::int64_t n);
/// Letters from lo - n/2 through hi + n/2 for an interval with endpoints in
/// (1/2)Z.
LWord word_on_interval(const Labelling& rho, const Interval& I, std::int64_t n);
/// Half-index of a point of (1/2)Z; throws InvalidInput otherwise.
std::int64_t half_index(const Dyadic& x);

/// For every factor w of length <= k: the least n such that every factor of
/// length n contains w, and whether formal_inverse(w) is a factor.
struct AxiomEntry {
  LWord word;
  std::int64_t recurrence_bound = 0;
  bool inverse_present = false;
};
struct AxiomReport {
  std::vector<AxiomEntry> entries;
  bool recurrent = true;
  bool inverse_closed = true;
};
AxiomReport axiom_report(const Labelling& rho, std::size_t k);

/// Periodic labelling sigma whose factors of every length <= k coincide with
/// those of rho. Built from a block starting at half-index 0 that contains
/// every length-k factor, cut where its first k letters recur at even offset.
LabellingPtr periodic_approximation(const Labelling& rho, std::size_t k);

/// Same factor sets for every length 1..k.
bool same_factors_up_to(const Labelling& x, const Labelling& y, std::size_t k);

/// Parses the labelling file format:
///   type: periodic | recursive
///   word: a b a' b'          (periodic)
///   pads: a b                (recursive)
///   depth-hint: N            (recursive, optional)
/// Blank lines and '#' comments are ignored.
LabellingPtr parse_labelling(std::string_view text);
LabellingPtr load_labelling(const std::string& path);

}  // namespace lineorder
