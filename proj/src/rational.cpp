#include "quanta/rational.hpp"

#include <cctype>
#include <ostream>

#include "quanta/error.hpp"

namespace quanta {

std::string to_string(const Rational& value) {
  Rational v = value;
  v.canonicalize();
  return v.get_num().get_str() + "/" + v.get_den().get_str();
}

std::string to_string(const Integer& value) { return value.get_str(); }

namespace {

bool is_integer_literal(std::string_view text) {
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
  if (i == text.size()) return false;
  for (; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
  }
  return true;
}

Integer integer_from(std::string_view text) {
  if (!is_integer_literal(text)) {
    throw Error(ErrorCode::Schema, "malformed integer '" + std::string(text) + "'");
  }
  std::string digits(text[0] == '+' ? text.substr(1) : text);
  return Integer(digits, 10);
}

}  // namespace

Integer parse_integer(std::string_view text) { return integer_from(text); }

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(integer_from(text));
  Integer num = integer_from(text.substr(0, slash));
  Integer den = integer_from(text.substr(slash + 1));
  if (den == 0) throw Error(ErrorCode::Schema, "zero denominator in '" + std::string(text) + "'");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Integer floor(const Rational& value) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return q;
}

Integer ceil(const Rational& value) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return q;
}

Rational abs(const Rational& value) { return value < 0 ? Rational(-value) : value; }
Integer abs(const Integer& value) { return value < 0 ? Integer(-value) : value; }

const Rational& ExtValue::rational() const {
  if (kind_ != Kind::Finite) {
    throw Error(ErrorCode::InvalidArgument, "value " + to_string() + " is not finite");
  }
  return value_;
}

ExtValue ExtValue::operator-() const {
  switch (kind_) {
    case Kind::Finite: return ExtValue(Rational(-value_));
    case Kind::PlusInfinity: return minus_infinity();
    case Kind::MinusInfinity: return plus_infinity();
    case Kind::Bottom: return bottom();
  }
  return bottom();
}

ExtValue operator+(const ExtValue& a, const ExtValue& b) {
  using K = ExtValue::Kind;
  if (a.is_bottom() || b.is_bottom()) {
    throw Error(ErrorCode::InvalidArgument, "cannot add the silent value");
  }
  if (a.is_finite() && b.is_finite()) return ExtValue(Rational(a.value_ + b.value_));
  if ((a.kind_ == K::PlusInfinity && b.kind_ == K::MinusInfinity) ||
      (a.kind_ == K::MinusInfinity && b.kind_ == K::PlusInfinity)) {
    throw Error(ErrorCode::UndefinedExpected, "+inf + -inf is undefined");
  }
  return a.is_infinite() ? a : b;
}

bool operator==(const ExtValue& a, const ExtValue& b) {
  if (a.kind_ != b.kind_) return false;
  return a.kind_ != ExtValue::Kind::Finite || a.value_ == b.value_;
}

std::partial_ordering operator<=>(const ExtValue& a, const ExtValue& b) {
  using K = ExtValue::Kind;
  if (a.is_bottom() || b.is_bottom()) return std::partial_ordering::unordered;
  auto rank = [](K k) { return k == K::MinusInfinity ? 0 : k == K::Finite ? 1 : 2; };
  if (rank(a.kind_) != rank(b.kind_)) return rank(a.kind_) <=> rank(b.kind_);
  if (a.kind_ != K::Finite) return std::partial_ordering::equivalent;
  int c = cmp(a.value_, b.value_);
  return c < 0 ? std::partial_ordering::less
       : c > 0 ? std::partial_ordering::greater
               : std::partial_ordering::equivalent;
}

std::string ExtValue::to_string() const {
  switch (kind_) {
    case Kind::Finite: return quanta::to_string(value_);
    case Kind::PlusInfinity: return "+inf";
    case Kind::MinusInfinity: return "-inf";
    case Kind::Bottom: return "bottom";
  }
  return "bottom";
}

ExtValue ExtValue::parse(std::string_view text) {
  if (text == "+inf" || text == "inf") return plus_infinity();
  if (text == "-inf") return minus_infinity();
  if (text == "bottom") return bottom();
  return ExtValue(parse_rational(text));
}

std::ostream& operator<<(std::ostream& os, const ExtValue& value) {
  return os << value.to_string();
}

}  // namespace quanta
