#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace solar {

/// Exact fixed-point number with six fractional digits.
///
/// Currency values are carried at full precision through intermediate
/// computation and only rounded to cents (half away from zero) when a final
/// answer is produced. Rates such as 0.396 are represented exactly.
class Decimal {
 public:
  static constexpr int kScaleDigits = 6;
  static constexpr std::int64_t kScale = 1'000'000;

  constexpr Decimal() = default;

  static constexpr Decimal from_units(std::int64_t units) {
    Decimal d;
    d.units_ = units;
    return d;
  }
  static constexpr Decimal from_integer(std::int64_t whole) { return from_units(whole * kScale); }

  /// Parses `[-+]digits[.digits]`; at most six fractional digits. Thousands
  /// separators are not accepted here (see parse_currency for `$1,234`).
  static std::optional<Decimal> parse(std::string_view text);
  /// Throws solar::Error(InvalidArgument) on malformed input.
  static Decimal parse_or_throw(std::string_view text);

  constexpr std::int64_t units() const { return units_; }

  /// Canonical text: trailing fractional zeros stripped, but never fewer than
  /// two fractional digits ("236422.00", "0.396").
  std::string to_string() const;

  Decimal round_cents() const;
  bool is_negative() const { return units_ < 0; }
  bool is_zero() const { return units_ == 0; }
  Decimal abs() const { return units_ < 0 ? from_units(-units_) : *this; }

  friend constexpr Decimal operator+(Decimal a, Decimal b) { return from_units(a.units_ + b.units_); }
  friend constexpr Decimal operator-(Decimal a, Decimal b) { return from_units(a.units_ - b.units_); }
  friend constexpr Decimal operator-(Decimal a) { return from_units(-a.units_); }
  /// Product rounded half away from zero at the sixth fractional digit.
  friend Decimal operator*(Decimal a, Decimal b);
  Decimal& operator+=(Decimal other) {
    units_ += other.units_;
    return *this;
  }
  Decimal& operator-=(Decimal other) {
    units_ -= other.units_;
    return *this;
  }

  friend constexpr auto operator<=>(Decimal, Decimal) = default;
  friend constexpr bool operator==(Decimal, Decimal) = default;

 private:
  std::int64_t units_ = 0;
};

/// Parses amounts as written in narratives: "$236,422", "$1200", "$2,767.50".
std::optional<Decimal> parse_currency(std::string_view text);

}  // namespace solar
