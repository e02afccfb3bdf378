// Hand-rolled recursive-descent parser for the conjunction fragment, plus the
// canonical printer used for digests and round-trip checks.

#include "stmon/stl/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "stmon/format.hpp"

namespace stmon::stl {

namespace {

enum class Tok {
  End, Ident, Number, AndAnd, Amp, Pipe, LParen, RParen, LBracket, RBracket,
  Comma, Star, Plus, Minus, Le, Ge
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double num = 0.0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string &src) : src_(src) { advance(); }

  const Token &peek() const { return cur_; }

  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) bump();
    cur_ = Token{};
    cur_.line = line_;
    cur_.col = col_;
    if (pos_ >= src_.size()) return;
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t s = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        bump();
      cur_.kind = Tok::Ident;
      cur_.text = src_.substr(s, pos_ - s);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      double v = 0.0;
      const char *first = src_.data() + pos_;
      const char *last = src_.data() + src_.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc()) throw ParseError("malformed number", line_, col_);
      cur_.kind = Tok::Number;
      cur_.num = v;
      while (src_.data() + pos_ != ptr) bump();
      return;
    }
    switch (c) {
      case '&':
        bump();
        if (pos_ < src_.size() && src_[pos_] == '&') { bump(); cur_.kind = Tok::AndAnd; }
        else cur_.kind = Tok::Amp;
        return;
      case '|': bump(); cur_.kind = Tok::Pipe; return;
      case '(': bump(); cur_.kind = Tok::LParen; return;
      case ')': bump(); cur_.kind = Tok::RParen; return;
      case '[': bump(); cur_.kind = Tok::LBracket; return;
      case ']': bump(); cur_.kind = Tok::RBracket; return;
      case ',': bump(); cur_.kind = Tok::Comma; return;
      case '*': bump(); cur_.kind = Tok::Star; return;
      case '+': bump(); cur_.kind = Tok::Plus; return;
      case '-': bump(); cur_.kind = Tok::Minus; return;
      case '<':
        bump();
        if (pos_ < src_.size() && src_[pos_] == '=') { bump(); cur_.kind = Tok::Le; return; }
        throw ParseError("expected '<='", line_, col_);
      case '>':
        bump();
        if (pos_ < src_.size() && src_[pos_] == '=') { bump(); cur_.kind = Tok::Ge; return; }
        throw ParseError("expected '>='", line_, col_);
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
    }
  }

  void bump() {
    if (src_[pos_] == '\n') { ++line_; col_ = 1; }
    else ++col_;
    ++pos_;
  }

  const std::string &src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token cur_;
};

class Parser {
 public:
  Parser(const std::string &text, int dim, const SymbolTable &syms)
      : lex_(text), dim_(dim), syms_(syms) {}

  StlSpec run() {
    StlSpec spec;
    spec.state_dim = dim_;
    parse_clause(spec);
    while (lex_.peek().kind == Tok::AndAnd) {
      lex_.take();
      parse_clause(spec);
    }
    if (lex_.peek().kind != Tok::End)
      throw ParseError("trailing input after formula", lex_.peek().line, lex_.peek().col);
    std::stable_sort(spec.subs.begin(), spec.subs.end(),
                     [](const SubFormula &x, const SubFormula &y) { return x.a < y.a; });
    if (spec.count() > IndexSet::kMaxIndices)
      throw ParseError("too many conjuncts", 1, 1);
    spec.horizon = 0;
    for (const SubFormula &f : spec.subs) spec.horizon = std::max(spec.horizon, f.b);
    return spec;
  }

 private:
  [[noreturn]] void fail(const std::string &msg) {
    throw ParseError(msg, lex_.peek().line, lex_.peek().col);
  }

  Token expect(Tok k, const char *what) {
    if (lex_.peek().kind != k) fail(std::string("expected ") + what);
    return lex_.take();
  }

  bool peek_ident(const char *name) const {
    return lex_.peek().kind == Tok::Ident && lex_.peek().text == name;
  }

  std::pair<int, int> parse_window() {
    expect(Tok::LBracket, "'['");
    Token a = expect(Tok::Number, "window start");
    expect(Tok::Comma, "','");
    Token b = expect(Tok::Number, "window end");
    expect(Tok::RBracket, "']'");
    auto as_int = [this](const Token &t) {
      double r = std::round(t.num);
      if (std::fabs(t.num - r) > 0 || t.num < 0)
        throw ParseError("window bounds must be non-negative integers", t.line, t.col);
      return static_cast<int>(r);
    };
    int ia = as_int(a), ib = as_int(b);
    if (ia > ib) throw ParseError("window start exceeds end", a.line, a.col);
    return {ia, ib};
  }

  void parse_clause(StlSpec &spec) {
    if ((peek_ident("G") || peek_ident("F"))) {
      Token op = lex_.take();
      auto [a, b] = parse_window();
      geom::Region r = parse_region_operand();
      if (op.text == "G") {
        spec.subs.push_back({Op::Globally, a, b, std::move(r), geom::Region::empty(dim_)});
      } else {
        spec.subs.push_back({Op::Until, a, b, geom::Region::full(dim_), std::move(r)});
      }
      return;
    }
    geom::Region left = parse_region_operand();
    if (peek_ident("U")) {
      lex_.take();
      auto [a, b] = parse_window();
      geom::Region right = parse_region_operand();
      spec.subs.push_back({Op::Until, a, b, std::move(left), std::move(right)});
      return;
    }
    if (peek_ident("origU")) {
      lex_.take();
      auto [a, b] = parse_window();
      geom::Region right = parse_region_operand();
      spec.subs.push_back({Op::Globally, 0, a, left, geom::Region::empty(dim_)});
      spec.subs.push_back({Op::Until, a, b, std::move(left), std::move(right)});
      return;
    }
    fail("expected 'U' or 'origU' after region");
  }

  // A clause operand: either a single primitive or a parenthesized expression.
  geom::Region parse_region_operand() {
    Token at = lex_.peek();
    geom::Region r = at.kind == Tok::LParen ? parse_region_factor() : parse_region_primary();
    if (r.is_empty()) throw ParseError("region is empty", at.line, at.col);
    return r;
  }

  geom::Region parse_region_expr() {
    geom::Region r = parse_region_term();
    while (lex_.peek().kind == Tok::Pipe) {
      lex_.take();
      r = geom::region_union(r, parse_region_term());
    }
    return r;
  }

  geom::Region parse_region_term() {
    geom::Region r = parse_region_factor();
    while (lex_.peek().kind == Tok::Amp) {
      lex_.take();
      r = geom::region_intersect(r, parse_region_factor());
    }
    return r;
  }

  geom::Region parse_region_factor() {
    if (lex_.peek().kind == Tok::LParen) {
      lex_.take();
      geom::Region r = parse_region_expr();
      expect(Tok::RParen, "')'");
      return r;
    }
    return parse_region_primary();
  }

  geom::Region parse_region_primary() {
    const Token &t = lex_.peek();
    if (t.kind == Tok::Ident) {
      if (t.text == "TRUE") {
        lex_.take();
        return geom::Region::full(dim_);
      }
      auto reg = syms_.regions.find(t.text);
      if (reg != syms_.regions.end()) {
        if (reg->second.dim != dim_)
          throw ParseError("region '" + t.text + "' has the wrong dimension", t.line, t.col);
        lex_.take();
        return reg->second;
      }
      auto var = syms_.variables.find(t.text);
      if (var == syms_.variables.end())
        throw ParseError("unknown region or variable '" + t.text + "'", t.line, t.col);
      // Either `var in [lo,hi]` or a linear inequality starting with this variable.
      Token name = lex_.take();
      if (peek_ident("in")) {
        lex_.take();
        expect(Tok::LBracket, "'['");
        double lo = parse_signed_number();
        expect(Tok::Comma, "','");
        double hi = parse_signed_number();
        expect(Tok::RBracket, "']'");
        geom::Vec e(static_cast<std::size_t>(dim_), 0.0);
        e[static_cast<std::size_t>(var->second)] = 1.0;
        geom::ConvexPolytope p{dim_, {}};
        p.facets.push_back({e, hi});
        for (double &v : e) v = -v;
        p.facets.push_back({e, -lo});
        return geom::Region::from_parts(dim_, {std::move(p)});
      }
      return parse_inequality_from(1.0, var->second, name);
    }
    if (t.kind == Tok::Number || t.kind == Tok::Minus) return parse_inequality();
    fail("expected a region");
  }

  double parse_signed_number() {
    bool negate = false;
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      negate = true;
    }
    Token t = expect(Tok::Number, "a number");
    return negate ? -t.num : t.num;
  }

  // One linear term: [coef '*'] var. Returns its coefficient and coordinate.
  std::pair<double, int> parse_term() {
    double coef = 1.0;
    if (lex_.peek().kind == Tok::Number) {
      coef = lex_.take().num;
      expect(Tok::Star, "'*'");
    }
    Token name = expect(Tok::Ident, "a variable");
    auto var = syms_.variables.find(name.text);
    if (var == syms_.variables.end())
      throw ParseError("unknown variable '" + name.text + "'", name.line, name.col);
    return {coef, var->second};
  }

  geom::Region parse_inequality() {
    double sign = 1.0;
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      sign = -1.0;
    }
    auto [coef, coord] = parse_term();
    Token anchor = lex_.peek();
    return parse_inequality_from(sign * coef, coord, anchor);
  }

  geom::Region parse_inequality_from(double coef0, int coord0, const Token &anchor) {
    geom::Vec a(static_cast<std::size_t>(dim_), 0.0);
    a[static_cast<std::size_t>(coord0)] += coef0;
    while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
      double sign = lex_.take().kind == Tok::Plus ? 1.0 : -1.0;
      auto [coef, coord] = parse_term();
      a[static_cast<std::size_t>(coord)] += sign * coef;
    }
    Tok cmp = lex_.peek().kind;
    if (cmp != Tok::Le && cmp != Tok::Ge)
      throw ParseError("expected '<=' or '>=' in inequality", anchor.line, anchor.col);
    lex_.take();
    double d = parse_signed_number();
    if (cmp == Tok::Ge) {
      for (double &v : a) v = -v;
      d = -d;
    }
    geom::ConvexPolytope p{dim_, {{std::move(a), d}}};
    return geom::Region::from_parts(dim_, {std::move(p)});
  }

  Lexer lex_;
  int dim_;
  const SymbolTable &syms_;
};

std::string print_region(const geom::Region &r) {
  std::string s;
  for (std::size_t pi = 0; pi < r.parts.size(); ++pi) {
    if (pi) s += " | ";
    const geom::ConvexPolytope &p = r.parts[pi];
    if (p.facets.empty()) {
      s += "TRUE";
      continue;
    }
    for (std::size_t fi = 0; fi < p.facets.size(); ++fi) {
      if (fi) s += " & ";
      const geom::Halfspace &h = p.facets[fi];
      bool any = false;
      for (std::size_t j = 0; j < h.normal.size(); ++j) {
        if (h.normal[j] == 0.0) continue;
        double c = h.normal[j];
        if (any) {
          s += c < 0 ? " - " : " + ";
          c = std::fabs(c);
        }
        s += format_double(c) + "*x" + std::to_string(j + 1);
        any = true;
      }
      if (!any) s += "0*x1";  // degenerate stored row; parses back to the same facet
      s += " <= " + format_double(h.offset);
    }
  }
  return s;
}

}  // namespace

SymbolTable default_symbols(int state_dim) {
  SymbolTable t;
  for (int i = 0; i < state_dim; ++i) t.variables["x" + std::to_string(i + 1)] = i;
  t.variables["x"] = 0;
  t.variables["z"] = 0;
  if (state_dim >= 2) {
    t.variables["y"] = 1;
    t.variables["v"] = 1;
  }
  if (state_dim >= 3) t.variables["vx"] = 2;
  if (state_dim >= 4) t.variables["vy"] = 3;
  return t;
}

StlSpec parse_spec(const std::string &text, int state_dim, const SymbolTable &symbols) {
  if (state_dim < 1) throw Error("state dimension must be positive");
  return Parser(text, state_dim, symbols).run();
}

StlSpec parse_spec(const std::string &text, int state_dim) {
  return parse_spec(text, state_dim, default_symbols(state_dim));
}

std::string print_spec(const StlSpec &spec) {
  std::string s;
  for (int i = 1; i <= spec.count(); ++i) {
    if (i > 1) s += " && ";
    const SubFormula &f = spec.sub(i);
    const std::string win = "[" + std::to_string(f.a) + "," + std::to_string(f.b) + "]";
    if (f.op == Op::Globally) {
      s += "G" + win + " (" + print_region(f.h1) + ")";
    } else if (f.h1.parts.size() == 1 && f.h1.parts[0].facets.empty()) {
      s += "F" + win + " (" + print_region(f.h2) + ")";
    } else {
      s += "(" + print_region(f.h1) + ") U" + win + " (" + print_region(f.h2) + ")";
    }
  }
  return s;
}

std::uint64_t spec_content_hash(const StlSpec &spec) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  for (char c : print_spec(spec)) mix(static_cast<unsigned char>(c));
  mix(static_cast<std::uint64_t>(spec.state_dim));
  mix(static_cast<std::uint64_t>(spec.horizon));
  return h;
}

namespace {

bool region_same(const geom::Region &a, const geom::Region &b) {
  if (a.dim != b.dim || a.parts.size() != b.parts.size()) return false;
  for (std::size_t i = 0; i < a.parts.size(); ++i) {
    const auto &pa = a.parts[i], &pb = b.parts[i];
    if (pa.facets.size() != pb.facets.size()) return false;
    for (std::size_t j = 0; j < pa.facets.size(); ++j) {
      if (pa.facets[j].normal != pb.facets[j].normal) return false;
      if (pa.facets[j].offset != pb.facets[j].offset) return false;
    }
  }
  return true;
}

}  // namespace

bool spec_equal(const StlSpec &a, const StlSpec &b) {
  if (a.state_dim != b.state_dim || a.horizon != b.horizon || a.count() != b.count())
    return false;
  for (int i = 1; i <= a.count(); ++i) {
    const SubFormula &fa = a.sub(i), &fb = b.sub(i);
    if (fa.op != fb.op || fa.a != fb.a || fa.b != fb.b) return false;
    if (!region_same(fa.h1, fb.h1) || !region_same(fa.h2, fb.h2)) return false;
  }
  return true;
}

}  // namespace stmon::stl
