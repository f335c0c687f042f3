#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spf/affine.hpp"

namespace spf {

/// Quantifier-free formula over linear integer atoms whose terms may be UF
/// applications. Atoms are `expr = 0`, `expr >= 0` or `expr != 0`.
struct Formula {
  enum Kind { True, False, Eq, Ge, Ne, And, Or };
  Kind kind = True;
  AffineExpr expr;
  std::vector<Formula> kids;

  static Formula truth() { return Formula{}; }
  static Formula falsity() { return Formula{False, {}, {}}; }
  static Formula atom(Kind k, AffineExpr e);
  static Formula of(const Constraint &c);
  static Formula eq(const AffineExpr &a, const AffineExpr &b) { return atom(Eq, a - b); }
  static Formula ne(const AffineExpr &a, const AffineExpr &b) { return atom(Ne, a - b); }
  static Formula ge(const AffineExpr &a, const AffineExpr &b) { return atom(Ge, a - b); }
  static Formula le(const AffineExpr &a, const AffineExpr &b) { return atom(Ge, b - a); }
  static Formula gt(const AffineExpr &a, const AffineExpr &b) { return atom(Ge, a - b - 1); }
  static Formula lt(const AffineExpr &a, const AffineExpr &b) { return atom(Ge, b - a - 1); }
  static Formula conj(std::vector<Formula> fs);
  static Formula disj(std::vector<Formula> fs);
  /// Negation, pushed down to the atoms immediately.
  static Formula neg(Formula f);
  static Formula implies(Formula a, Formula b) { return disj({neg(std::move(a)), std::move(b)}); }

  bool isAtom() const { return kind == Eq || kind == Ge || kind == Ne; }
  Formula substitute(const std::map<std::string, AffineExpr> &s) const;
  Formula renameVars(const std::map<std::string, std::string> &m) const;
  Formula renameUfs(const std::map<std::string, std::string> &m) const;
  void collectVars(std::set<std::string> &out) const;
  void collectApps(std::vector<Atom> &out) const;
  bool holds(const Env &env) const;
  std::string str() const;
};

enum class Verdict { Sat, Unsat, Unknown };
const char *verdictName(Verdict v);

struct SolverOptions {
  int nodeBudget = 10000;
};

struct SolveResult {
  Verdict verdict = Verdict::Unknown;
  int nodes = 0;
  /// Variable values of a model when sat (UF applications excluded).
  std::map<std::string, int64_t> model;
};

/// Decide the conjunction of `fs`. UF applications are purified into fresh
/// variables with functional-consistency clauses; the resulting linear
/// problem is searched lazily (simplex over rationals, case splits on
/// violated disjunctions, branch and bound for integrality).
SolveResult solve(const std::vector<Formula> &fs, const SolverOptions &opt = {});

/// SMT-LIB2 text of the same query: declare-fun per variable and UF,
/// one assert per formula, check-sat.
std::string toSmtLib(const std::vector<Formula> &fs, const std::string &comment = "");

} // namespace spf
