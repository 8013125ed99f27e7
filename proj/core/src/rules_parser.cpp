#include <cctype>
#include <set>

#include "builtin_packs.hpp"
#include "fatigue/rules.hpp"

namespace fatigue {

namespace {

enum class Tok { name, var, lparen, rparen, comma, colon, end };

struct Token {
  Tok kind;
  std::string_view text;
  SourceLocation loc;
};

bool name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string describe(const Token& t) {
  if (t.kind == Tok::end) return "end of input";
  return "'" + std::string(t.text) + "'";
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    for (;;) {
      skip_blank();
      const SourceLocation loc{line_, column_};
      if (pos_ >= text_.size()) {
        out.push_back({Tok::end, {}, loc});
        return out;
      }
      const char c = text_[pos_];
      if (name_char(c)) {
        out.push_back({Tok::name, take_name(), loc});
      } else if (c == '?') {
        advance();
        if (pos_ >= text_.size() || !name_char(text_[pos_])) {
          throw SyntaxError({line_, column_}, "variable name after '?'", "'?'");
        }
        out.push_back({Tok::var, take_name(), loc});
      } else {
        Tok kind{};
        switch (c) {
          case '(': kind = Tok::lparen; break;
          case ')': kind = Tok::rparen; break;
          case ',': kind = Tok::comma; break;
          case ':': kind = Tok::colon; break;
          default:
            throw SyntaxError(loc, "token", "unexpected character '" + std::string(1, c) + "'");
        }
        out.push_back({kind, text_.substr(pos_, 1), loc});
        advance();
      }
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view take_name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && name_char(text_[pos_])) advance();
    return text_.substr(start, pos_ - start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const Taxonomy& taxonomy) : tokens_(std::move(tokens)), taxonomy_(taxonomy) {}

  RulePack parse() {
    RulePack pack;
    std::set<std::string, std::less<>> names;
    while (peek().kind != Tok::end) {
      Rule r = parse_rule();
      if (!names.insert(r.name).second) throw DuplicateRuleName(r.name, name_loc_);
      pack.rules.push_back(std::move(r));
    }
    return pack;
  }

 private:
  struct ClassRef {
    std::string_view label;
    SourceLocation loc;
  };

  const Token& peek() const { return tokens_[index_]; }
  const Token& next() { return tokens_[index_ < tokens_.size() - 1 ? index_++ : index_]; }

  bool at_keyword(std::string_view kw) const { return peek().kind == Tok::name && peek().text == kw; }

  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) throw SyntaxError(peek().loc, what, describe(peek()));
    return next();
  }

  void expect_keyword(std::string_view kw, const std::string& what) {
    if (!at_keyword(kw)) throw SyntaxError(peek().loc, what, describe(peek()));
    next();
  }

  Rule parse_rule() {
    expect_keyword("rule", "'rule'");
    Rule r;
    r.location = tokens_[index_ - 1].loc;
    const Token& name = expect(Tok::name, "rule name");
    r.name = std::string(name.text);
    name_loc_ = name.loc;
    expect(Tok::colon, "':'");
    expect_keyword("when", "'when'");

    std::vector<ClassRef> classes;
    std::optional<SourceLocation> anchor_loc;
    for (;;) {
      if (at_keyword("instance")) {
        const SourceLocation loc = next().loc;
        if (anchor_loc) throw SyntaxError(loc, "'exists' (a rule has exactly one instance atom)", "'instance'");
        anchor_loc = loc;
        expect(Tok::lparen, "'('");
        r.variable = std::string(expect(Tok::var, "variable").text);
        expect(Tok::comma, "','");
        const Token& cls = expect(Tok::name, "class name");
        r.anchor_class = std::string(cls.text);
        classes.push_back({cls.text, cls.loc});
        expect(Tok::rparen, "')'");
      } else if (at_keyword("exists")) {
        next();
        expect(Tok::lparen, "'('");
        const Token& cls = expect(Tok::name, "class name");
        r.required_classes.emplace_back(cls.text);
        classes.push_back({cls.text, cls.loc});
        expect(Tok::rparen, "')'");
      } else {
        throw SyntaxError(peek().loc, "'instance' or 'exists'", describe(peek()));
      }
      if (peek().kind == Tok::comma) {
        next();
        continue;
      }
      if (!at_keyword("then")) throw SyntaxError(peek().loc, "',' or 'then'", describe(peek()));
      break;
    }
    const SourceLocation then_loc = next().loc;
    if (!anchor_loc) throw SyntaxError(then_loc, "an instance(?x, Class) atom before 'then'", "'then'");

    expect_keyword("classify", "'classify'");
    expect(Tok::lparen, "'('");
    const Token& var = expect(Tok::var, "variable");
    if (var.text != r.variable) throw SyntaxError(var.loc, "?" + r.variable, "'?" + std::string(var.text) + "'");
    expect(Tok::comma, "','");
    const Token& out = expect(Tok::name, "class name");
    r.conclusion_class = std::string(out.text);
    classes.push_back({out.text, out.loc});
    expect(Tok::rparen, "')'");

    for (const auto& c : classes) {
      if (!taxonomy_.contains(c.label)) throw UnknownClass(std::string(c.label), r.name, c.loc);
    }
    return r;
  }

  std::vector<Token> tokens_;
  const Taxonomy& taxonomy_;
  std::size_t index_ = 0;
  SourceLocation name_loc_;
};

}  // namespace

const Rule* RulePack::find(std::string_view name) const noexcept {
  for (const auto& r : rules) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

RulePack parse_rules(std::string_view text, const Taxonomy& taxonomy) {
  return Parser(Lexer(text).tokenize(), taxonomy).parse();
}

std::string_view table1_pack_text(bool verbatim) noexcept {
  return verbatim ? detail::kTable1Verbatim : detail::kTable1Corrected;
}

const RulePack& table1_pack(bool verbatim) {
  static const RulePack corrected = parse_rules(detail::kTable1Corrected);
  static const RulePack as_printed = parse_rules(detail::kTable1Verbatim);
  return verbatim ? as_printed : corrected;
}

}  // namespace fatigue
