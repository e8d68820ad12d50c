#include "lineorder/dyadic.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <ostream>

namespace lineorder {

namespace {

mpz_class shifted_left(const mpz_class& value, std::int64_t bits) {
  mpz_class out;
  mpz_mul_2exp(out.get_mpz_t(), value.get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
  return out;
}

bool parse_integer(std::string_view text, mpz_class& out) {
  if (text.empty()) return false;
  std::size_t start = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (start == text.size()) return false;
  for (std::size_t i = start; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
  }
  std::string digits(text.substr(text[0] == '+' ? 1 : 0));
  return out.set_str(digits, 10) == 0;
}

}  // namespace

void Dyadic::normalize() {
  if (num_ == 0) {
    exp_ = 0;
    return;
  }
  if (exp_ < 0) {
    num_ = shifted_left(num_, -exp_);
    exp_ = 0;
    return;
  }
  if (exp_ == 0) return;
  auto zeros = static_cast<std::int64_t>(mpz_scan1(num_.get_mpz_t(), 0));
  auto drop = std::min(zeros, exp_);
  if (drop > 0) {
    mpz_fdiv_q_2exp(num_.get_mpz_t(), num_.get_mpz_t(), static_cast<mp_bitcnt_t>(drop));
    exp_ -= drop;
  }
}

Dyadic Dyadic::from_parts(mpz_class numerator, std::int64_t exponent) {
  Dyadic d;
  d.num_ = std::move(numerator);
  d.exp_ = exponent;
  d.normalize();
  return d;
}

Dyadic Dyadic::parse(std::string_view text) {
  auto fail = [&]() -> InvalidInput {
    return InvalidInput("not a dyadic rational: '" + std::string(text) + "'");
  };
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw fail();

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    mpz_class num;
    if (!parse_integer(text.substr(0, slash), num)) throw fail();
    auto den = text.substr(slash + 1);
    if (den.starts_with("2^")) {
      mpz_class e;
      if (!parse_integer(den.substr(2), e) || e < 0 || !e.fits_slong_p()) throw fail();
      return from_parts(num, e.get_si());
    }
    mpz_class q;
    if (!parse_integer(den, q) || q <= 0) throw fail();
    if (mpz_popcount(q.get_mpz_t()) != 1) throw fail();
    auto e = static_cast<std::int64_t>(mpz_scan1(q.get_mpz_t(), 0));
    return from_parts(num, e);
  }

  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole.remove_prefix(1);
    if (whole.empty() && frac.empty()) throw fail();
    for (char c : frac) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw fail();
    }
    mpz_class int_part = 0;
    if (!whole.empty() && !parse_integer(whole, int_part)) throw fail();
    mpz_class frac_part = 0;
    if (!frac.empty()) frac_part.set_str(std::string(frac), 10);
    // value = frac_part / 10^d = frac_part / (2^d 5^d)
    auto d = static_cast<unsigned long>(frac.size());
    mpz_class five_d;
    mpz_ui_pow_ui(five_d.get_mpz_t(), 5, d);
    if (!mpz_divisible_p(frac_part.get_mpz_t(), five_d.get_mpz_t())) throw fail();
    mpz_class odd_part = frac_part / five_d;
    Dyadic value = Dyadic(int_part) + from_parts(odd_part, static_cast<std::int64_t>(d));
    return negative ? -value : value;
  }

  mpz_class num;
  if (!parse_integer(text, num)) throw fail();
  return Dyadic(num);
}

Dyadic Dyadic::operator-() const {
  Dyadic d = *this;
  d.num_ = -d.num_;
  return d;
}

Dyadic operator+(const Dyadic& x, const Dyadic& y) {
  if (x.exp_ == y.exp_) return Dyadic::from_parts(x.num_ + y.num_, x.exp_);
  if (x.exp_ > y.exp_) return Dyadic::from_parts(x.num_ + shifted_left(y.num_, x.exp_ - y.exp_), x.exp_);
  return Dyadic::from_parts(shifted_left(x.num_, y.exp_ - x.exp_) + y.num_, y.exp_);
}

Dyadic operator-(const Dyadic& x, const Dyadic& y) { return x + (-y); }

Dyadic operator*(const Dyadic& x, const Dyadic& y) {
  return Dyadic::from_parts(x.num_ * y.num_, x.exp_ + y.exp_);
}

Dyadic Dyadic::scaled(std::int64_t k) const { return from_parts(num_, exp_ - k); }

std::strong_ordering operator<=>(const Dyadic& x, const Dyadic& y) {
  int c;
  if (x.exp_ == y.exp_) {
    c = cmp(x.num_, y.num_);
  } else if (x.exp_ > y.exp_) {
    c = cmp(x.num_, shifted_left(y.num_, x.exp_ - y.exp_));
  } else {
    c = cmp(shifted_left(x.num_, y.exp_ - x.exp_), y.num_);
  }
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

mpz_class Dyadic::floor() const {
  if (exp_ == 0) return num_;
  mpz_class q;
  mpz_fdiv_q_2exp(q.get_mpz_t(), num_.get_mpz_t(), static_cast<mp_bitcnt_t>(exp_));
  return q;
}

std::int64_t Dyadic::floor_int() const {
  mpz_class f = floor();
  if (!f.fits_slong_p()) throw InvalidInput("coordinate out of machine range: " + to_string());
  return f.get_si();
}

std::int64_t Dyadic::ceil_int() const {
  std::int64_t f = floor_int();
  return is_integer() ? f : f + 1;
}

Rational Dyadic::to_rational() const {
  Rational q(num_);
  if (exp_ > 0) mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(exp_));
  return q;
}

double Dyadic::to_double() const { return to_rational().get_d(); }

std::string Dyadic::to_string() const {
  if (exp_ == 0) return num_.get_str();
  return num_.get_str() + "/2^" + std::to_string(exp_);
}

std::optional<std::int64_t> log2_exact(const Dyadic& x) {
  if (x.sign() <= 0) throw InvalidInput("log2_exact of non-positive value " + x.to_string());
  if (mpz_popcount(x.numerator().get_mpz_t()) != 1) return std::nullopt;
  auto bit = static_cast<std::int64_t>(mpz_scan1(x.numerator().get_mpz_t(), 0));
  return bit - x.exponent();
}

std::optional<Dyadic> to_dyadic(const Rational& q) {
  const mpz_class& den = q.get_den();
  if (mpz_popcount(den.get_mpz_t()) != 1) return std::nullopt;
  auto e = static_cast<std::int64_t>(mpz_scan1(den.get_mpz_t(), 0));
  return Dyadic::from_parts(q.get_num(), e);
}

int compare(const Dyadic& x, const Rational& q) { return cmp(x.to_rational(), q); }

std::string to_string(const Rational& q) {
  if (auto d = to_dyadic(q)) return d->to_string();
  return q.get_str();
}

std::ostream& operator<<(std::ostream& os, const Dyadic& x) { return os << x.to_string(); }

}  // namespace lineorder
