#include <cctype>
#include <charconv>
#include <string>
#include <vector>

#include "spinevm/prim.hpp"
#include "spinevm/term.hpp"

namespace spinevm {
namespace {

enum class Tok {
  End,
  Ident,
  Int,
  Backslash,
  Colon,
  Dot,
  Equals,
  LParen,
  RParen,
  Quote,
  Bang,
  Star,
  Question,
  Percent,
  Hash,
  KwLetrec,
  KwIn,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t value = 0;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          advance();
        }
        t.text = std::string(src_.substr(start, pos_ - start));
        t.kind = t.text == "letrec" ? Tok::KwLetrec : t.text == "in" ? Tok::KwIn : Tok::Ident;
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && pos_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        std::size_t start = pos_;
        advance();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        auto digits = src_.substr(start, pos_ - start);
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), t.value);
        if (ec != std::errc()) throw SyntaxError("integer out of range", t.line, t.column);
        t.kind = Tok::Int;
      } else {
        switch (c) {
          case '\\': t.kind = Tok::Backslash; break;
          case ':': t.kind = Tok::Colon; break;
          case '.': t.kind = Tok::Dot; break;
          case '=': t.kind = Tok::Equals; break;
          case '(': t.kind = Tok::LParen; break;
          case ')': t.kind = Tok::RParen; break;
          case '\'': t.kind = Tok::Quote; break;
          case '!': t.kind = Tok::Bang; break;
          case '*': t.kind = Tok::Star; break;
          case '?': t.kind = Tok::Question; break;
          case '%': t.kind = Tok::Percent; break;
          case '#': t.kind = Tok::Hash; break;
          default:
            throw SyntaxError(std::string("unexpected character '") + c + "'", t.line, t.column);
        }
        advance();
      }
      out.push_back(std::move(t));
    }
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      if (std::isspace(static_cast<unsigned char>(src_[pos_]))) {
        advance();
      } else if (src_.substr(pos_, 2) == "--") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  TermPtr run() {
    TermPtr t = term();
    if (peek().kind != Tok::End) fail("unexpected trailing input");
    return t;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> scope_;  // innermost last

  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, peek().line, peek().column);
  }

  Token expect(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what);
    return next();
  }

  std::string binder_name() {
    Token t = expect(Tok::Ident, "binder name");
    if (t.text == "Int" || find_prim(t.text)) {
      throw SyntaxError("reserved name '" + t.text + "' cannot be bound", t.line, t.column);
    }
    return t.text;
  }

  TermPtr term() {
    if (peek().kind == Tok::Backslash) {
      next();
      std::string name = binder_name();
      expect(Tok::Colon, "':'");
      TermPtr annot = term();
      expect(Tok::Dot, "'.'");
      scope_.push_back(name);
      TermPtr body = term();
      scope_.pop_back();
      return lambda(std::move(name), std::move(annot), std::move(body));
    }
    if (peek().kind == Tok::KwLetrec) {
      next();
      std::string name = binder_name();
      expect(Tok::Colon, "':'");
      TermPtr annot = term();
      expect(Tok::Equals, "'='");
      scope_.push_back(name);
      TermPtr rhs = term();
      expect(Tok::KwIn, "'in'");
      TermPtr body = term();
      scope_.pop_back();
      return letrec(std::move(name), std::move(annot), std::move(rhs), std::move(body));
    }
    return app();
  }

  bool starts_atom() const {
    switch (peek().kind) {
      case Tok::Ident:
      case Tok::Int:
      case Tok::LParen:
      case Tok::Quote:
      case Tok::Bang:
      case Tok::Star:
      case Tok::Question:
      case Tok::Percent:
      case Tok::Hash:
        return true;
      default:
        return false;
    }
  }

  TermPtr app() {
    TermPtr t = atom();
    for (;;) {
      if (starts_atom()) {
        t = apply(std::move(t), atom());
      } else if (peek().kind == Tok::Backslash || peek().kind == Tok::KwLetrec) {
        t = apply(std::move(t), term());
      } else {
        return t;
      }
    }
  }

  std::size_t resolve() {
    if (peek().kind == Tok::Hash) {
      next();
      Token n = expect(Tok::Int, "index after '#'");
      if (n.value < 0) throw SyntaxError("negative index", n.line, n.column);
      return static_cast<std::size_t>(n.value);
    }
    Token t = expect(Tok::Ident, "name");
    for (std::size_t i = scope_.size(); i-- > 0;) {
      if (scope_[i] == t.text && t.text != "_") return scope_.size() - 1 - i;
    }
    throw UnboundName(t.text);
  }

  TermPtr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::LParen: {
        next();
        TermPtr inner = term();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Star:
        next();
        return star();
      case Tok::Question:
        next();
        expect(Tok::Colon, "':' after '?'");
        return hole(atom());
      case Tok::Int: {
        std::int64_t v = next().value;
        return int_lit(v);
      }
      case Tok::Percent: {
        next();
        CtorTag tag;
        if (peek().kind == Tok::Int) {
          tag = CtorTag::int_lit(next().value);
        } else {
          tag = CtorTag::named(expect(Tok::Ident, "constructor name").text);
        }
        TermPtr payload;
        if (peek().kind == Tok::Colon) {
          next();
          payload = atom();
        }
        return ctor(std::move(tag), std::move(payload));
      }
      case Tok::Quote:
        next();
        return var_t(resolve());
      case Tok::Bang:
        next();
        return dtor(resolve());
      case Tok::Hash:
        return var(resolve());
      case Tok::Ident: {
        if (t.text == "Int") {
          next();
          return int_type();
        }
        if (const PrimDef* p = find_prim(t.text)) {
          next();
          TermPtr annot = p->annot;
          if (peek().kind == Tok::Colon) {
            next();
            annot = atom();
          }
          return prim(p->tag, std::move(annot));
        }
        return var(resolve());
      }
      default:
        fail("expected a term");
    }
  }
};

}  // namespace

TermPtr parse(std::string_view source) { return Parser(Lexer(source).run()).run(); }

}  // namespace spinevm
