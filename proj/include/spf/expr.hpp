#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "spf/affine.hpp"

namespace spf {

class Parser;

/// Integer expression tree used by generated code and layout value
/// addressing. Unlike AffineExpr it may be nonlinear.
struct Expr {
  enum Op {
    Const, Var, Load, Add, Sub, Mul, Div, FloorDiv, CeilDiv, Min, Max,
    Lt, Le, Eq, Ne, Ge, Gt, And, Or
  };
  Op op = Const;
  int64_t value = 0;
  std::string name; // Var name or Load array
  std::vector<Expr> kids;

  static Expr cnst(int64_t v);
  static Expr var(const std::string &n);
  static Expr load(const std::string &array, Expr index);
  static Expr bin(Op op, Expr a, Expr b);
  static Expr minOf(std::vector<Expr> xs);
  static Expr maxOf(std::vector<Expr> xs);
  static Expr all(std::vector<Expr> conds);
  static Expr fromAffine(const AffineExpr &e);

  bool isConst(int64_t v) const { return op == Const && value == v; }
  bool operator==(const Expr &o) const;

  Expr substitute(const std::map<std::string, Expr> &s) const;
  Expr renamed(const std::map<std::string, std::string> &vars,
               const std::map<std::string, std::string> &arrays) const;
  void collectVars(std::set<std::string> &out) const;
  void collectArrays(std::set<std::string> &out) const;
  int countVar(const std::string &v) const;

  using VarFn = std::function<int64_t(const std::string &)>;
  using LoadFn = std::function<int64_t(const std::string &, int64_t)>;
  int64_t eval(const VarFn &var, const LoadFn &load) const;

  /// C source text; `.` in names becomes `_`.
  std::string c() const;
};

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);

std::string mangle(const std::string &name);

/// General arithmetic with `name[expr]` and `name(expr)` loads.
Expr parseExpr(Parser &p);
Expr parseExpr(const std::string &text);

} // namespace spf
