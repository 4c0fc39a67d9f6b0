#include "slent/parser.hpp"

#include <cctype>
#include <optional>
#include <vector>

namespace slent {

namespace {

enum class Tok {
  Ident,
  Nat,
  KwEmp,
  KwArr,
  KwLs,
  KwDll,
  KwEx,
  KwTrue,
  KwFalse,
  Turnstile,  // |-
  Arrow,      // ->
  LParen,
  RParen,
  Comma,
  Dot,
  Star,
  Amp,
  Plus,
  Eq,
  Neq,
  Lt,
  Le,
  Gt,
  Ge,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::uint64_t value = 0;
  int line = 1;
  int column = 1;
};

class Lexer {
public:
  explicit Lexer(const std::string &src) : src_(src) {}

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    t.column = col_;
    if (pos_ >= src_.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string id;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        id += src_[pos_];
        bump();
      }
      t.text = id;
      if (id == "Emp") t.kind = Tok::KwEmp;
      else if (id == "Arr") t.kind = Tok::KwArr;
      else if (id == "ls") t.kind = Tok::KwLs;
      else if (id == "dll") t.kind = Tok::KwDll;
      else if (id == "Ex") t.kind = Tok::KwEx;
      else if (id == "true") t.kind = Tok::KwTrue;
      else if (id == "false") t.kind = Tok::KwFalse;
      else t.kind = Tok::Ident;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::uint64_t v = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        v = v * 10 + (src_[pos_] - '0');
        bump();
      }
      t.kind = Tok::Nat;
      t.value = v;
      return t;
    }
    auto two = [&](char a, char b) {
      return c == a && pos_ + 1 < src_.size() && src_[pos_ + 1] == b;
    };
    if (two('|', '-')) { bump(); bump(); t.kind = Tok::Turnstile; return t; }
    if (two('-', '>')) { bump(); bump(); t.kind = Tok::Arrow; return t; }
    if (two('!', '=')) { bump(); bump(); t.kind = Tok::Neq; return t; }
    if (two('<', '=')) { bump(); bump(); t.kind = Tok::Le; return t; }
    if (two('>', '=')) { bump(); bump(); t.kind = Tok::Ge; return t; }
    switch (c) {
      case '(': bump(); t.kind = Tok::LParen; return t;
      case ')': bump(); t.kind = Tok::RParen; return t;
      case ',': bump(); t.kind = Tok::Comma; return t;
      case '.': bump(); t.kind = Tok::Dot; return t;
      case '*': bump(); t.kind = Tok::Star; return t;
      case '&': bump(); t.kind = Tok::Amp; return t;
      case '+': bump(); t.kind = Tok::Plus; return t;
      case '=': bump(); t.kind = Tok::Eq; return t;
      case '<': bump(); t.kind = Tok::Lt; return t;
      case '>': bump(); t.kind = Tok::Gt; return t;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
    }
  }

private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) bump();
  }
  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  const std::string &src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
public:
  Parser(const std::string &src, const ParseOptions &opts) : lex_(src), opts_(opts) {
    tok_ = lex_.next();
  }

  Entailment entailment() {
    Entailment e;
    e.antecedent = sheap();
    expect(Tok::Turnstile, "'|-'");
    if (tok_.kind != Tok::End) {
      e.succedents.push_back(sheap());
      while (tok_.kind == Tok::Comma) {
        advance();
        e.succedents.push_back(sheap());
      }
    }
    expect(Tok::End, "end of input");
    return e;
  }

private:
  void advance() { tok_ = lex_.next(); }

  void expect(Tok k, const char *what) {
    if (tok_.kind != k)
      throw ParseError(std::string("expected ") + what, tok_.line, tok_.column);
    if (k != Tok::End) advance();
  }

  [[noreturn]] void fail(const std::string &msg) {
    throw ParseError(msg, tok_.line, tok_.column);
  }

  Term factor() {
    if (tok_.kind == Tok::Ident) {
      Term t = Term::var(tok_.text);
      advance();
      return t;
    }
    if (tok_.kind == Tok::Nat) {
      Term t = Term::nat(tok_.value);
      advance();
      return t;
    }
    fail("expected a term");
  }

  Term term() {
    Term t = factor();
    while (tok_.kind == Tok::Plus) {
      advance();
      t = Term::sum(t, factor());
    }
    return t;
  }

  bool is_cmp(Tok k) const {
    return k == Tok::Eq || k == Tok::Neq || k == Tok::Lt || k == Tok::Le || k == Tok::Gt ||
           k == Tok::Ge;
  }

  PureFormula cmp_atom(Term l) {
    Tok op = tok_.kind;
    advance();
    Term r = term();
    switch (op) {
      case Tok::Eq: return PureFormula::eq(l, r);
      case Tok::Neq: return PureFormula::neq(l, r);
      case Tok::Lt: return PureFormula::lt(l, r);
      case Tok::Le: return PureFormula::le(l, r);
      case Tok::Gt: return PureFormula::lt(r, l);
      case Tok::Ge: return PureFormula::le(r, l);
      default: fail("expected a comparison operator");
    }
  }

  SpatialAtom points_to_atom(Term addr) {
    Token at = tok_;
    expect(Tok::LParen, "'('");
    std::vector<Term> values;
    values.push_back(term());
    while (tok_.kind == Tok::Comma) {
      advance();
      values.push_back(term());
    }
    expect(Tok::RParen, "')'");
    if (values.size() != opts_.pt)
      throw ParseError("'->' takes " + std::to_string(opts_.pt) + " value(s) with pt=" +
                           std::to_string(opts_.pt) + ", got " + std::to_string(values.size()),
                       at.line, at.column);
    return SpatialAtom::points_to(std::move(addr), std::move(values));
  }

  SpatialAtom satom() {
    switch (tok_.kind) {
      case Tok::KwEmp:
        advance();
        return SpatialAtom::emp();
      case Tok::KwArr: {
        advance();
        expect(Tok::LParen, "'('");
        Term lo = term();
        expect(Tok::Comma, "','");
        Term hi = term();
        expect(Tok::RParen, "')'");
        return SpatialAtom::arr(lo, hi);
      }
      case Tok::KwLs: {
        Token at = tok_;
        if (opts_.pt != 2)
          throw ParseError("ls requires pt=2", at.line, at.column);
        advance();
        expect(Tok::LParen, "'('");
        Term a = term();
        expect(Tok::Comma, "','");
        Term b = term();
        expect(Tok::RParen, "')'");
        return SpatialAtom::ls(a, b);
      }
      case Tok::KwDll: {
        Token at = tok_;
        if (opts_.pt != 2)
          throw ParseError("dll requires pt=2", at.line, at.column);
        advance();
        expect(Tok::LParen, "'('");
        Term a = term();
        expect(Tok::Comma, "','");
        Term b = term();
        expect(Tok::Comma, "','");
        Term c = term();
        expect(Tok::Comma, "','");
        Term d = term();
        expect(Tok::RParen, "')'");
        return SpatialAtom::dll(a, b, c, d);
      }
      default: {
        Term addr = term();
        if (tok_.kind != Tok::Arrow) fail("expected '->' after address term");
        advance();
        return points_to_atom(std::move(addr));
      }
    }
  }

  SymbolicHeap sheap() {
    SymbolicHeap h;
    if (tok_.kind == Tok::KwEx) {
      advance();
      if (tok_.kind != Tok::Ident) fail("expected a bound variable after 'Ex'");
      while (tok_.kind == Tok::Ident) {
        for (const auto &v : h.bound_vars)
          if (v == tok_.text)
            throw ParseError("duplicate bound variable '" + tok_.text + "'", tok_.line,
                             tok_.column);
        h.bound_vars.push_back(tok_.text);
        advance();
      }
      expect(Tok::Dot, "'.'");
    }
    std::vector<PureFormula> pure_atoms;
    for (;;) {
      if (tok_.kind == Tok::KwTrue || tok_.kind == Tok::KwFalse) {
        pure_atoms.push_back(tok_.kind == Tok::KwTrue ? PureFormula::truth()
                                                      : PureFormula::falsity());
        advance();
        expect(Tok::Amp, "'&' (a spatial part must follow the pure part)");
        continue;
      }
      if (tok_.kind == Tok::KwEmp || tok_.kind == Tok::KwArr || tok_.kind == Tok::KwLs ||
          tok_.kind == Tok::KwDll) {
        break;
      }
      // A term either begins a comparison (pure atom) or a points-to atom.
      Term t = term();
      if (is_cmp(tok_.kind)) {
        pure_atoms.push_back(cmp_atom(t));
        expect(Tok::Amp, "'&' (a spatial part must follow the pure part)");
        continue;
      }
      if (tok_.kind == Tok::Arrow) {
        advance();
        h.spatial.push_back(points_to_atom(std::move(t)));
        while (tok_.kind == Tok::Star) {
          advance();
          h.spatial.push_back(satom());
        }
        h.pure = PureFormula::conj(std::move(pure_atoms));
        return h;
      }
      fail("expected a comparison or '->'");
    }
    h.spatial.push_back(satom());
    while (tok_.kind == Tok::Star) {
      advance();
      h.spatial.push_back(satom());
    }
    h.pure = PureFormula::conj(std::move(pure_atoms));
    return h;
  }

  Lexer lex_;
  ParseOptions opts_;
  Token tok_;
};

}  // namespace

Entailment parse_entailment(const std::string &text, const ParseOptions &opts) {
  Parser p(text, opts);
  return p.entailment();
}

}  // namespace slent
