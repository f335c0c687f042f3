#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spf/affine.hpp"
#include "spf/set.hpp"

namespace spf {

struct Token {
  enum Kind { Ident, Int, Sym, End };
  Kind kind = End;
  std::string text;
  int64_t value = 0;
  size_t pos = 0;
};

enum class RelOp { LT, LE, EQ, NE, GE, GT };

struct Comparison {
  AffineExpr lhs;
  RelOp op;
  AffineExpr rhs;
};

/// Recursive-descent helper shared by the set notation, the layout DSL and
/// the contraction grammar. `#` starts a comment running to end of line.
class Parser {
public:
  Parser(std::string text, std::string stage);

  const Token &peek(size_t k = 0) const;
  Token next();
  bool isSym(const std::string &s, size_t k = 0) const;
  bool isIdent(const std::string &s, size_t k = 0) const;
  bool accept(const std::string &sym);
  bool acceptIdent(const std::string &word);
  void expect(const std::string &sym);
  void expectIdent(const std::string &word);
  std::string ident();
  int64_t integer();
  bool atEnd() const { return peek().kind == Token::End; }
  size_t save() const { return cur_; }
  void restore(size_t p) { cur_ = p; }
  [[noreturn]] void fail(const std::string &msg) const;

  AffineExpr affine();
  std::vector<Comparison> chain();
  /// Chains joined by `and`; `!=` only when allowNe.
  std::vector<Comparison> conjunction();
  std::vector<Constraint> constraints();

private:
  AffineExpr term();
  AffineExpr factor();
  std::string text_;
  std::string stage_;
  std::vector<Token> toks_;
  size_t cur_ = 0;
};

/// Convert a comparison into canonical constraints; throws on `!=`.
Constraint toConstraint(const Comparison &c, const std::string &stage);

PresburgerSet parseSet(const std::string &text);
PresburgerRelation parseRelation(const std::string &text);
AffineExpr parseAffine(const std::string &text);
std::vector<Constraint> parseConstraints(const std::string &text);

} // namespace spf
