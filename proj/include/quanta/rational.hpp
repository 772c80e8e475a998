#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace quanta {

using Integer = mpz_class;
using Rational = mpq_class;

/// Always "p/q", also for integers ("2/1").
std::string to_string(const Rational& value);
std::string to_string(const Integer& value);

/// Accepts "p/q" or a plain integer. Throws Error(Schema) on malformed input.
Rational parse_rational(std::string_view text);
Integer parse_integer(std::string_view text);

Integer floor(const Rational& value);
Integer ceil(const Rational& value);
Rational abs(const Rational& value);
Integer abs(const Integer& value);

/// Extended value: a rational, one of the two infinities, or the silent marker.
class ExtValue {
 public:
  enum class Kind : std::uint8_t { MinusInfinity, Finite, PlusInfinity, Bottom };

  ExtValue() = default;
  ExtValue(const Rational& value) : kind_(Kind::Finite), value_(value) {}
  ExtValue(const Integer& value) : kind_(Kind::Finite), value_(value) {}
  ExtValue(long value) : kind_(Kind::Finite), value_(value) {}
  ExtValue(int value) : kind_(Kind::Finite), value_(value) {}

  static ExtValue plus_infinity() { return ExtValue(Kind::PlusInfinity); }
  static ExtValue minus_infinity() { return ExtValue(Kind::MinusInfinity); }
  static ExtValue bottom() { return ExtValue(Kind::Bottom); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_bottom() const { return kind_ == Kind::Bottom; }
  bool is_infinite() const {
    return kind_ == Kind::PlusInfinity || kind_ == Kind::MinusInfinity;
  }
  /// Throws Error(InvalidArgument) unless finite.
  const Rational& rational() const;

  ExtValue operator-() const;
  /// Sum with the usual conventions; +inf + -inf and Bottom operands throw.
  friend ExtValue operator+(const ExtValue& a, const ExtValue& b);
  friend bool operator==(const ExtValue& a, const ExtValue& b);
  /// Bottom is unordered with respect to everything, including itself.
  friend std::partial_ordering operator<=>(const ExtValue& a, const ExtValue& b);

  /// "p/q", "+inf", "-inf" or "bottom".
  std::string to_string() const;
  static ExtValue parse(std::string_view text);

 private:
  explicit ExtValue(Kind kind) : kind_(kind) {}

  Kind kind_ = Kind::Bottom;
  Rational value_;
};

std::ostream& operator<<(std::ostream& os, const ExtValue& value);

}  // namespace quanta
