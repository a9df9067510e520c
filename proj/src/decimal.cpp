#include "solar/decimal.hpp"

#include <cctype>
#include <limits>

#include "solar/error.hpp"

namespace solar {

std::optional<Decimal> Decimal::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  std::size_t i = 0;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    ++i;
  }
  constexpr std::int64_t kMaxWhole = std::numeric_limits<std::int64_t>::max() / kScale - 1;
  std::int64_t whole = 0;
  std::size_t whole_digits = 0;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
    whole = whole * 10 + (text[i] - '0');
    if (whole > kMaxWhole) return std::nullopt;
    ++whole_digits;
  }
  std::int64_t frac = 0;
  int frac_digits = 0;
  if (i < text.size() && text[i] == '.') {
    ++i;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      if (++frac_digits > kScaleDigits) return std::nullopt;
      frac = frac * 10 + (text[i] - '0');
    }
    if (frac_digits == 0) return std::nullopt;
  }
  if (i != text.size() || whole_digits == 0) return std::nullopt;
  for (int k = frac_digits; k < kScaleDigits; ++k) frac *= 10;
  std::int64_t units = whole * kScale + frac;
  return from_units(negative ? -units : units);
}

Decimal Decimal::parse_or_throw(std::string_view text) {
  if (auto d = parse(text)) return *d;
  throw Error(ErrorCode::InvalidArgument, "not a decimal: '" + std::string(text) + "'");
}

std::string Decimal::to_string() const {
  std::uint64_t magnitude = units_ < 0 ? static_cast<std::uint64_t>(-(units_ + 1)) + 1
                                       : static_cast<std::uint64_t>(units_);
  std::string out = units_ < 0 ? "-" : "";
  out += std::to_string(magnitude / kScale);
  std::string frac = std::to_string(magnitude % kScale);
  frac.insert(0, kScaleDigits - frac.size(), '0');
  while (frac.size() > 2 && frac.back() == '0') frac.pop_back();
  return out + "." + frac;
}

Decimal Decimal::round_cents() const {
  constexpr std::int64_t kCent = kScale / 100;
  std::int64_t magnitude = units_ < 0 ? -units_ : units_;
  std::int64_t rounded = (magnitude + kCent / 2) / kCent * kCent;
  return from_units(units_ < 0 ? -rounded : rounded);
}

Decimal operator*(Decimal a, Decimal b) {
  __int128 product = static_cast<__int128>(a.units_) * b.units_;
  bool negative = product < 0;
  if (negative) product = -product;
  product = (product + Decimal::kScale / 2) / Decimal::kScale;
  auto units = static_cast<std::int64_t>(product);
  return Decimal::from_units(negative ? -units : units);
}

std::optional<Decimal> parse_currency(std::string_view text) {
  if (!text.empty() && text.front() == '$') text.remove_prefix(1);
  std::string_view whole = text.substr(0, text.find('.'));
  if (whole.find(',') == std::string_view::npos) return Decimal::parse(text);
  // Thousands separators must split the whole part into groups of three.
  std::size_t first = whole.find(',');
  if (first == 0 || first > 3) return std::nullopt;
  for (std::size_t i = first; i < whole.size(); i += 4) {
    if (whole[i] != ',' || i + 4 > whole.size()) return std::nullopt;
    for (std::size_t k = 1; k <= 3; ++k)
      if (!std::isdigit(static_cast<unsigned char>(whole[i + k]))) return std::nullopt;
  }
  std::string cleaned;
  for (char c : text)
    if (c != ',') cleaned.push_back(c);
  return Decimal::parse(cleaned);
}

}  // namespace solar
