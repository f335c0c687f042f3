#include "spf/parse.hpp"

#include <cctype>

#include "spf/error.hpp"

namespace spf {

namespace {

bool identStart(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
bool identChar(char c) {
  return std::isalnum((unsigned char)c) || c == '_' || c == '.';
}

} // namespace

Parser::Parser(std::string text, std::string stage)
    : text_(std::move(text)), stage_(std::move(stage)) {
  static const char *multi[] = {"->", "<=", ">=", "==", "!=", "&&", "||"};
  size_t i = 0, n = text_.size();
  while (i < n) {
    char c = text_[i];
    if (std::isspace((unsigned char)c)) {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < n && text_[i] != '\n') ++i;
      continue;
    }
    Token t;
    t.pos = i;
    if (identStart(c)) {
      size_t j = i;
      while (j < n && identChar(text_[j])) ++j;
      while (j < n && text_[j] == '\'') ++j;
      t.kind = Token::Ident;
      t.text = text_.substr(i, j - i);
      i = j;
    } else if (std::isdigit((unsigned char)c)) {
      size_t j = i;
      while (j < n && std::isdigit((unsigned char)text_[j])) ++j;
      t.kind = Token::Int;
      t.text = text_.substr(i, j - i);
      t.value = std::stoll(t.text);
      i = j;
    } else {
      t.kind = Token::Sym;
      bool found = false;
      for (auto *m : multi)
        if (text_.compare(i, 2, m) == 0) {
          t.text = m;
          i += 2;
          found = true;
          break;
        }
      if (!found) {
        if (std::string("{}[](),;:|<>=+-*/!%").find(c) == std::string::npos)
          throw Error(stage_, std::string("unexpected character '") + c + "' at offset " +
                                  std::to_string(i));
        t.text = std::string(1, c);
        ++i;
      }
    }
    toks_.push_back(t);
  }
  Token end;
  end.pos = n;
  toks_.push_back(end);
}

const Token &Parser::peek(size_t k) const {
  size_t i = std::min(cur_ + k, toks_.size() - 1);
  return toks_[i];
}

Token Parser::next() {
  Token t = peek();
  if (cur_ < toks_.size() - 1) ++cur_;
  return t;
}

bool Parser::isSym(const std::string &s, size_t k) const {
  return peek(k).kind == Token::Sym && peek(k).text == s;
}

bool Parser::isIdent(const std::string &s, size_t k) const {
  return peek(k).kind == Token::Ident && peek(k).text == s;
}

bool Parser::accept(const std::string &sym) {
  if (!isSym(sym)) return false;
  next();
  return true;
}

bool Parser::acceptIdent(const std::string &word) {
  if (!isIdent(word)) return false;
  next();
  return true;
}

void Parser::expect(const std::string &sym) {
  if (!accept(sym)) fail("expected '" + sym + "'");
}

void Parser::expectIdent(const std::string &word) {
  if (!acceptIdent(word)) fail("expected '" + word + "'");
}

std::string Parser::ident() {
  if (peek().kind != Token::Ident) fail("expected identifier");
  return next().text;
}

int64_t Parser::integer() {
  bool neg = accept("-");
  if (peek().kind != Token::Int) fail("expected integer");
  int64_t v = next().value;
  return neg ? -v : v;
}

void Parser::fail(const std::string &msg) const {
  const Token &t = peek();
  std::string near = t.kind == Token::End ? "end of input" : "'" + t.text + "'";
  throw Error(stage_, msg + " near " + near + " (offset " + std::to_string(t.pos) + ")");
}

AffineExpr Parser::affine() {
  AffineExpr e;
  if (accept("-"))
    e = -term();
  else
    e = term();
  while (true) {
    if (accept("+"))
      e += term();
    else if (accept("-"))
      e -= term();
    else
      break;
  }
  return e;
}

AffineExpr Parser::term() {
  AffineExpr e = factor();
  while (accept("*")) {
    AffineExpr f = factor();
    if (f.isConstant())
      e = e * f.constant();
    else if (e.isConstant())
      e = f * e.constant();
    else
      fail("nonlinear product in affine expression");
  }
  return e;
}

AffineExpr Parser::factor() {
  if (accept("-")) return -factor();
  if (accept("(")) {
    AffineExpr e = affine();
    expect(")");
    return e;
  }
  if (peek().kind == Token::Int) return AffineExpr(next().value);
  if (peek().kind == Token::Ident) {
    std::string n = next().text;
    if (accept("(")) {
      std::vector<AffineExpr> args;
      if (!isSym(")")) {
        args.push_back(affine());
        while (accept(",")) args.push_back(affine());
      }
      expect(")");
      return AffineExpr::app(n, std::move(args));
    }
    return AffineExpr::var(n);
  }
  fail("expected expression");
}

namespace {
bool relop(const Parser &p, RelOp &op) {
  const Token &t = p.peek();
  if (t.kind != Token::Sym) return false;
  if (t.text == "<") op = RelOp::LT;
  else if (t.text == "<=") op = RelOp::LE;
  else if (t.text == "=" || t.text == "==") op = RelOp::EQ;
  else if (t.text == "!=") op = RelOp::NE;
  else if (t.text == ">=") op = RelOp::GE;
  else if (t.text == ">") op = RelOp::GT;
  else return false;
  return true;
}
} // namespace

std::vector<Comparison> Parser::chain() {
  std::vector<Comparison> out;
  AffineExpr lhs = affine();
  RelOp op;
  if (!relop(*this, op)) fail("expected comparison operator");
  while (relop(*this, op)) {
    next();
    AffineExpr rhs = affine();
    out.push_back(Comparison{lhs, op, rhs});
    lhs = rhs;
  }
  return out;
}

std::vector<Comparison> Parser::conjunction() {
  std::vector<Comparison> out;
  do {
    auto c = chain();
    out.insert(out.end(), c.begin(), c.end());
  } while (acceptIdent("and") || accept("&&"));
  return out;
}

std::vector<Constraint> Parser::constraints() {
  std::vector<Constraint> out;
  for (auto &c : conjunction()) out.push_back(toConstraint(c, stage_));
  return out;
}

Constraint toConstraint(const Comparison &c, const std::string &stage) {
  switch (c.op) {
  case RelOp::LT: return Constraint::lt(c.lhs, c.rhs);
  case RelOp::LE: return Constraint::le(c.lhs, c.rhs);
  case RelOp::EQ: return Constraint::eq(c.lhs, c.rhs);
  case RelOp::GE: return Constraint::ge(c.lhs, c.rhs);
  case RelOp::GT: return Constraint::gt(c.lhs, c.rhs);
  case RelOp::NE: break;
  }
  throw Error(stage, "'!=' is not allowed in a Presburger constraint");
}

namespace {

std::vector<VarId> parseTuple(Parser &p) {
  std::vector<VarId> t;
  p.expect("[");
  if (!p.isSym("]")) {
    t.push_back(VarId{p.ident(), VarKind::Computation});
    while (p.accept(",")) t.push_back(VarId{p.ident(), VarKind::Computation});
  }
  p.expect("]");
  return t;
}

Conjunct parseConj(Parser &p);

void parseItem(Parser &p, Conjunct &c) {
  if (p.acceptIdent("true")) return;
  if (p.acceptIdent("false")) {
    c.constraints.push_back(Constraint(AffineExpr(-1), Constraint::GE));
    return;
  }
  if (p.isSym("(")) {
    size_t mark = p.save();
    try {
      p.next();
      Conjunct inner = parseConj(p);
      p.expect(")");
      if (p.isIdent("and") || p.isSym("&&") || p.isIdent("or") || p.isSym("}") ||
          p.isSym(")") || p.atEnd()) {
        for (auto &k : inner.constraints) c.constraints.push_back(k);
        c.locals.insert(c.locals.end(), inner.locals.begin(), inner.locals.end());
        return;
      }
    } catch (const Error &) {
    }
    p.restore(mark);
  }
  for (auto &k : p.chain()) c.constraints.push_back(toConstraint(k, "parse"));
}

Conjunct parseConj(Parser &p) {
  Conjunct c;
  if (p.acceptIdent("exists")) {
    bool paren = p.accept("(");
    c.locals.push_back(p.ident());
    while (p.accept(",")) c.locals.push_back(p.ident());
    p.expect(":");
    Conjunct inner = parseConj(p);
    if (paren) p.expect(")");
    for (auto &k : inner.constraints) c.constraints.push_back(k);
    c.locals.insert(c.locals.end(), inner.locals.begin(), inner.locals.end());
    return c;
  }
  parseItem(p, c);
  while (p.acceptIdent("and") || p.accept("&&")) parseItem(p, c);
  return c;
}

std::vector<Conjunct> parseBody(Parser &p) {
  std::vector<Conjunct> ds;
  if (!(p.accept("|") || p.accept(":"))) {
    ds.push_back(Conjunct{});
    return ds;
  }
  do {
    Conjunct c = simplify(parseConj(p));
    if (!c.isObviouslyEmpty()) ds.push_back(c);
  } while (p.acceptIdent("or") || p.accept("||"));
  return ds;
}

} // namespace

PresburgerSet parseSet(const std::string &text) {
  Parser p(text, "parse");
  p.expect("{");
  PresburgerSet s;
  s.tuple = parseTuple(p);
  if (p.isSym("->")) p.fail("expected a set, found a relation");
  s.disjuncts = parseBody(p);
  p.expect("}");
  if (!p.atEnd()) p.fail("trailing input");
  return s;
}

PresburgerRelation parseRelation(const std::string &text) {
  Parser p(text, "parse");
  p.expect("{");
  PresburgerRelation r;
  r.input = parseTuple(p);
  p.expect("->");
  r.output = parseTuple(p);
  r.disjuncts = parseBody(p);
  p.expect("}");
  if (!p.atEnd()) p.fail("trailing input");
  return r;
}

AffineExpr parseAffine(const std::string &text) {
  Parser p(text, "parse");
  AffineExpr e = p.affine();
  if (!p.atEnd()) p.fail("trailing input");
  return e;
}

std::vector<Constraint> parseConstraints(const std::string &text) {
  Parser p(text, "parse");
  auto cs = p.constraints();
  if (!p.atEnd()) p.fail("trailing input");
  return cs;
}

} // namespace spf
