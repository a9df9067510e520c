#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "solar/decimal.hpp"

namespace solar {

enum class Datatype { Decimal, Integer, Date, Boolean, Text };

std::string_view to_string(Datatype type);
std::optional<Datatype> parse_datatype(std::string_view text);

/// Calendar day, ISO-8601 (`YYYY-MM-DD`).
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  static std::optional<Date> parse(std::string_view text);
  static bool is_valid(int year, int month, int day);
  std::string to_string() const;

  friend auto operator<=>(const Date&, const Date&) = default;
};

class Literal {
 public:
  using Value = std::variant<Decimal, std::int64_t, Date, bool, std::string>;

  static Literal decimal(Decimal v) { return Literal(Value(std::in_place_index<0>, v)); }
  static Literal integer(std::int64_t v) { return Literal(Value(std::in_place_index<1>, v)); }
  static Literal date(Date v) { return Literal(Value(std::in_place_index<2>, v)); }
  static Literal boolean(bool v) { return Literal(Value(std::in_place_index<3>, v)); }
  static Literal text(std::string v) { return Literal(Value(std::in_place_index<4>, std::move(v))); }

  Datatype type() const { return static_cast<Datatype>(value_.index()); }
  const Value& value() const { return value_; }

  const Decimal* as_decimal() const { return std::get_if<0>(&value_); }
  const std::int64_t* as_integer() const { return std::get_if<1>(&value_); }
  const Date* as_date() const { return std::get_if<2>(&value_); }
  const bool* as_boolean() const { return std::get_if<3>(&value_); }
  const std::string* as_text() const { return std::get_if<4>(&value_); }

  /// Numeric view over Decimal and Integer literals.
  std::optional<Decimal> numeric() const;

  /// Lexical form without type tag ("236422.00", "65", "1998-02-03", "true").
  std::string lexical() const;

  /// Infers a literal from its lexical form: Integer, Decimal, Date, Boolean,
  /// falling back to Text.
  static Literal from_lexical(std::string_view text);

  friend auto operator<=>(const Literal&, const Literal&) = default;
  friend bool operator==(const Literal&, const Literal&) = default;

 private:
  explicit Literal(Value v) : value_(std::move(v)) {}
  Value value_;
};

struct IndividualRef {
  std::string name;
  friend auto operator<=>(const IndividualRef&, const IndividualRef&) = default;
};

/// Assertion argument or variable binding: an individual or a literal.
using Arg = std::variant<IndividualRef, Literal>;

std::string to_display(const Arg& arg);

/// Orders two literals under comparison semantics: numbers compare by value
/// across Decimal/Integer; otherwise only same-typed literals are ordered.
std::optional<std::strong_ordering> compare_values(const Literal& a, const Literal& b);

}  // namespace solar
