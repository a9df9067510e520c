#include <cctype>
#include <charconv>
#include <optional>

#include "solar/rule.hpp"

namespace solar {
namespace {

enum class Tok {
  Ident,
  Number,
  DateLit,
  String,
  Quoted,
  LParen,
  RParen,
  Comma,
  Amp,
  Bang,
  Dot,
  Arrow,
  Op,
  End,
  Invalid,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Invalid: return "invalid character '" + t.text + "'";
    case Tok::String: return "string literal";
    default: return "'" + t.text + "'";
  }
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    if (is_ident_start(c)) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance();
      t.kind = Tok::Ident;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (is_digit(c) || (c == '-' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
      return lex_number(t);
    }
    if (c == '"') return lex_quoted(t, '"', Tok::String);
    if (c == '\'') return lex_quoted(t, '\'', Tok::Quoted);
    auto single = [&](Tok kind) {
      t.kind = kind;
      t.text = std::string(1, c);
      advance();
      return t;
    };
    switch (c) {
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case ',': return single(Tok::Comma);
      case '&': return single(Tok::Amp);
      case '.': return single(Tok::Dot);
      case '!':
        if (peek(1) == '=') return two(t, Tok::Op);
        return single(Tok::Bang);
      case '=':
        if (peek(1) == '=') return two(t, Tok::Op);
        break;
      case '<':
        if (peek(1) == '-') return two(t, Tok::Arrow);
        if (peek(1) == '=') return two(t, Tok::Op);
        return single(Tok::Op);
      case '>':
        if (peek(1) == '=') return two(t, Tok::Op);
        return single(Tok::Op);
      default: break;
    }
    t.kind = Tok::Invalid;
    t.text = std::string(1, c);
    return t;
  }

 private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Token two(Token t, Tok kind) {
    t.kind = kind;
    t.text = std::string(src_.substr(pos_, 2));
    advance();
    advance();
    return t;
  }

  Token lex_number(Token t) {
    std::size_t start = pos_;
    if (src_[pos_] == '-') advance();
    while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
    // YYYY-MM-DD
    if (src_[start] != '-' && pos_ - start == 4 && peek(0) == '-' && is_digit(peek(1)) &&
        is_digit(peek(2)) && peek(3) == '-' && is_digit(peek(4)) && is_digit(peek(5))) {
      for (int i = 0; i < 6; ++i) advance();
      t.kind = Tok::DateLit;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (peek(0) == '.' && is_digit(peek(1))) {
      advance();
      while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
    }
    t.kind = Tok::Number;
    t.text = std::string(src_.substr(start, pos_ - start));
    return t;
  }

  Token lex_quoted(Token t, char quote, Tok kind) {
    advance();
    std::string value;
    while (pos_ < src_.size() && src_[pos_] != quote) {
      if (src_[pos_] == '\n') break;
      if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) {
        advance();
        value.push_back(src_[pos_] == 'n' ? '\n' : src_[pos_]);
        advance();
        continue;
      }
      value.push_back(src_[pos_]);
      advance();
    }
    if (pos_ >= src_.size() || src_[pos_] != quote) {
      t.kind = Tok::Invalid;
      t.text = std::string(1, quote);
      return t;
    }
    advance();
    t.kind = kind;
    t.text = std::move(value);
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { current_ = lexer_.next(); }

  bool at_end() const { return current_.kind == Tok::End; }

  Rule rule() {
    Rule r;
    r.head = atom();
    expect(Tok::Arrow, "'<-'");
    if (current_.kind == Tok::Dot) {
      throw ParseError(ErrorCode::EmptyBody, current_.line, current_.column, {"body literal"},
                       "rule '" + r.head.predicate + "' has an empty body");
    }
    r.body.push_back(literal());
    while (current_.kind == Tok::Amp) {
      take();
      r.body.push_back(literal());
    }
    if (current_.kind != Tok::Dot) fail({"'&'", "'.'"});
    take();
    return r;
  }

  void expect_end() {
    if (!at_end()) fail({"end of input"});
  }

 private:
  Token take() {
    Token t = std::move(current_);
    current_ = lexer_.next();
    return t;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    std::string msg = "unexpected " + describe(current_) + ", expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += " or ";
      msg += expected[i];
    }
    throw ParseError(ErrorCode::ParseError, current_.line, current_.column, std::move(expected), msg);
  }

  Token expect(Tok kind, const char* what) {
    if (current_.kind != kind) fail({what});
    return take();
  }

  BodyLiteral literal() {
    if (current_.kind == Tok::Bang) {
      take();
      return Negation{atom()};
    }
    if (current_.kind == Tok::Ident) {
      Token ident = take();
      if (current_.kind == Tok::LParen) return atom_after(std::move(ident));
      Term lhs = ident_term(ident);
      return comparison_after(std::move(lhs));
    }
    if (!starts_term()) fail({"'!'", "predicate", "term"});
    Term lhs = term();
    return comparison_after(std::move(lhs));
  }

  Comparison comparison_after(Term lhs) {
    if (current_.kind != Tok::Op) fail({"'('", "comparison operator"});
    Token op = take();
    Comparison c;
    c.lhs = std::move(lhs);
    c.op = parse_op(op.text);
    c.rhs = term();
    return c;
  }

  static CompareOp parse_op(const std::string& s) {
    if (s == "==") return CompareOp::Eq;
    if (s == "!=") return CompareOp::Ne;
    if (s == "<") return CompareOp::Lt;
    if (s == "<=") return CompareOp::Le;
    if (s == ">") return CompareOp::Gt;
    return CompareOp::Ge;
  }

  Atom atom() {
    if (current_.kind != Tok::Ident) fail({"predicate"});
    Token name = take();
    if (current_.kind != Tok::LParen) fail({"'('"});
    return atom_after(std::move(name));
  }

  Atom atom_after(Token name) {
    Atom a;
    a.predicate = std::move(name.text);
    expect(Tok::LParen, "'('");
    if (current_.kind == Tok::RParen) {
      take();
      return a;
    }
    a.terms.push_back(term());
    while (current_.kind == Tok::Comma) {
      take();
      a.terms.push_back(term());
    }
    if (current_.kind != Tok::RParen) fail({"','", "')'"});
    take();
    return a;
  }

  bool starts_term() const {
    switch (current_.kind) {
      case Tok::Ident:
      case Tok::Number:
      case Tok::DateLit:
      case Tok::String:
      case Tok::Quoted: return true;
      default: return false;
    }
  }

  Term term() {
    if (!starts_term()) fail({"term"});
    Token t = take();
    switch (t.kind) {
      case Tok::Ident: return ident_term(t);
      case Tok::Number: return number_term(t);
      case Tok::DateLit: {
        auto d = Date::parse(t.text);
        if (!d) {
          throw ParseError(ErrorCode::ParseError, t.line, t.column, {"valid calendar date"},
                           "invalid date '" + t.text + "'");
        }
        return Literal::date(*d);
      }
      case Tok::String: return Literal::text(t.text);
      case Tok::Quoted: return IndividualRef{t.text};
      default: fail({"term"});
    }
  }

  static Term ident_term(const Token& t) {
    if (t.text == "true") return Literal::boolean(true);
    if (t.text == "false") return Literal::boolean(false);
    char c = t.text.front();
    if (c == '_' || std::isupper(static_cast<unsigned char>(c))) return Variable{t.text};
    return IndividualRef{t.text};
  }

  static Term number_term(const Token& t) {
    if (t.text.find('.') != std::string::npos) {
      if (auto d = Decimal::parse(t.text)) return Literal::decimal(*d);
    } else {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (ec == std::errc() && ptr == t.text.data() + t.text.size()) return Literal::integer(v);
    }
    throw ParseError(ErrorCode::ParseError, t.line, t.column, {"number"},
                     "numeric literal out of range: " + t.text);
  }

  Lexer lexer_;
  Token current_;
};

bool is_bare_constant(const std::string& name) {
  if (name.empty() || !std::islower(static_cast<unsigned char>(name.front()))) return false;
  if (name == "true" || name == "false") return false;
  for (char c : name)
    if (!is_ident_char(c)) return false;
  return true;
}

std::string escape(const std::string& s, char quote) {
  std::string out;
  for (char c : s) {
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == quote || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

ParseError::ParseError(ErrorCode code, int line, int column, std::vector<std::string> expected,
                       const std::string& message)
    : Error(code, std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

Rule parse_rule(std::string_view text) {
  Parser p(text);
  Rule r = p.rule();
  p.expect_end();
  return r;
}

std::vector<Rule> parse_rules(std::string_view text, std::string_view id_prefix) {
  Parser p(text);
  std::vector<Rule> rules;
  while (!p.at_end()) {
    Rule r = p.rule();
    r.id = std::string(id_prefix) + std::to_string(rules.size() + 1);
    rules.push_back(std::move(r));
  }
  return rules;
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "==";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "==";
}

std::string print_term(const Term& term) {
  if (auto v = std::get_if<Variable>(&term)) return v->name;
  if (auto i = std::get_if<IndividualRef>(&term)) {
    return is_bare_constant(i->name) ? i->name : "'" + escape(i->name, '\'') + "'";
  }
  const auto& lit = std::get<Literal>(term);
  if (auto s = lit.as_text()) return "\"" + escape(*s, '"') + "\"";
  return lit.lexical();
}

std::string print_atom(const Atom& atom) {
  std::string out = atom.predicate + "(";
  for (std::size_t i = 0; i < atom.terms.size(); ++i) {
    if (i) out += ", ";
    out += print_term(atom.terms[i]);
  }
  return out + ")";
}

std::string print_literal(const BodyLiteral& literal) {
  if (auto a = std::get_if<Atom>(&literal)) return print_atom(*a);
  if (auto n = std::get_if<Negation>(&literal)) return "!" + print_atom(n->atom);
  const auto& c = std::get<Comparison>(literal);
  return print_term(c.lhs) + " " + std::string(to_string(c.op)) + " " + print_term(c.rhs);
}

std::string print_rule(const Rule& rule) {
  std::string out = print_atom(rule.head) + " <- ";
  for (std::size_t i = 0; i < rule.body.size(); ++i) {
    if (i) out += " & ";
    out += print_literal(rule.body[i]);
  }
  return out + ".";
}

}  // namespace solar
