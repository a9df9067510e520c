#include "solar/literal.hpp"

#include <cctype>
#include <charconv>

namespace solar {

std::string_view to_string(Datatype type) {
  switch (type) {
    case Datatype::Decimal: return "Decimal";
    case Datatype::Integer: return "Integer";
    case Datatype::Date: return "Date";
    case Datatype::Boolean: return "Boolean";
    case Datatype::Text: return "Text";
  }
  return "Text";
}

std::optional<Datatype> parse_datatype(std::string_view text) {
  if (text == "Decimal") return Datatype::Decimal;
  if (text == "Integer") return Datatype::Integer;
  if (text == "Date") return Datatype::Date;
  if (text == "Boolean") return Datatype::Boolean;
  if (text == "Text") return Datatype::Text;
  return std::nullopt;
}

bool Date::is_valid(int year, int month, int day) {
  if (year < 1 || year > 9999 || month < 1 || month > 12 || day < 1) return false;
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  int limit = kDays[month - 1] + (month == 2 && leap ? 1 : 0);
  return day <= limit;
}

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  auto y = field(0, 4), m = field(5, 2), d = field(8, 2);
  if (!y || !m || !d || !is_valid(*y, *m, *d)) return std::nullopt;
  return Date{*y, *m, *d};
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::optional<Decimal> Literal::numeric() const {
  if (auto d = as_decimal()) return *d;
  if (auto i = as_integer()) return Decimal::from_integer(*i);
  return std::nullopt;
}

std::string Literal::lexical() const {
  switch (type()) {
    case Datatype::Decimal: return as_decimal()->to_string();
    case Datatype::Integer: return std::to_string(*as_integer());
    case Datatype::Date: return as_date()->to_string();
    case Datatype::Boolean: return *as_boolean() ? "true" : "false";
    case Datatype::Text: return *as_text();
  }
  return {};
}

Literal Literal::from_lexical(std::string_view text) {
  if (text == "true") return boolean(true);
  if (text == "false") return boolean(false);
  if (auto d = Date::parse(text)) return date(*d);
  if (!text.empty() && text.find('.') == std::string_view::npos) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc() && ptr == text.data() + text.size() && text.front() != '+') return integer(v);
  }
  if (text.find('.') != std::string_view::npos) {
    if (auto d = Decimal::parse(text)) return decimal(*d);
  }
  return Literal::text(std::string(text));
}

std::string to_display(const Arg& arg) {
  if (auto ind = std::get_if<IndividualRef>(&arg)) return ind->name;
  const auto& lit = std::get<Literal>(arg);
  if (lit.type() == Datatype::Text) return "\"" + *lit.as_text() + "\"";
  return lit.lexical();
}

std::optional<std::strong_ordering> compare_values(const Literal& a, const Literal& b) {
  auto na = a.numeric();
  auto nb = b.numeric();
  if (na && nb) return *na <=> *nb;
  if (a.type() != b.type()) return std::nullopt;
  return a <=> b;
}

}  // namespace solar
