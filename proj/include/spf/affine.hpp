#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace spf {

enum class VarKind { Computation, Layout, Reduced, Parameter, Quantified };

const char *kindName(VarKind k);

struct VarId {
  std::string name;
  VarKind kind = VarKind::Computation;

  bool operator==(const VarId &o) const { return name == o.name; }
};

class AffineExpr;

/// A variable reference or an uninterpreted-function application.
struct Atom {
  std::string name;
  bool uf = false;
  std::vector<AffineExpr> args;

  static Atom var(std::string n) { return Atom{std::move(n), false, {}}; }
};

int compare(const Atom &a, const Atom &b);
int compare(const AffineExpr &a, const AffineExpr &b);
inline bool operator<(const Atom &a, const Atom &b) { return compare(a, b) < 0; }
inline bool operator==(const Atom &a, const Atom &b) { return compare(a, b) == 0; }

struct Term {
  Atom atom;
  int64_t coef;
};

/// Values used when evaluating expressions with concrete UF tables.
struct Env {
  std::map<std::string, int64_t> vals;
  std::map<std::string, std::vector<int64_t>> arrays;
  /// Fallback for UFs of arity != 1 or names missing from `arrays`.
  std::function<std::optional<int64_t>(const std::string &,
                                       const std::vector<int64_t> &)>
      ufHook;

  int64_t value(const std::string &name) const;
  int64_t apply(const std::string &uf, const std::vector<int64_t> &args) const;
};

/// Sum of coefficient*atom terms plus a constant. Always kept normalized:
/// terms sorted by atom, merged, no zero coefficients.
class AffineExpr {
public:
  AffineExpr() = default;
  AffineExpr(int64_t c) : constant_(c) {}

  static AffineExpr var(const std::string &name, int64_t coef = 1);
  static AffineExpr app(const std::string &uf, std::vector<AffineExpr> args,
                        int64_t coef = 1);
  static AffineExpr atom(const Atom &a, int64_t coef = 1);

  const std::vector<Term> &terms() const { return terms_; }
  int64_t constant() const { return constant_; }
  bool isConstant() const { return terms_.empty(); }
  bool isZero() const { return terms_.empty() && constant_ == 0; }
  /// The expression is exactly one variable with coefficient 1.
  std::optional<std::string> asVar() const;

  AffineExpr operator+(const AffineExpr &o) const;
  AffineExpr operator-(const AffineExpr &o) const;
  AffineExpr operator-() const { return *this * -1; }
  AffineExpr operator*(int64_t k) const;
  AffineExpr &operator+=(const AffineExpr &o) { return *this = *this + o; }
  AffineExpr &operator-=(const AffineExpr &o) { return *this = *this - o; }
  bool operator==(const AffineExpr &o) const { return compare(*this, o) == 0; }
  bool operator!=(const AffineExpr &o) const { return !(*this == o); }
  bool operator<(const AffineExpr &o) const { return compare(*this, o) < 0; }

  /// Coefficient of `v` outside of UF arguments.
  int64_t coeff(const std::string &v) const;
  /// Expression without the linear `v` term.
  AffineExpr without(const std::string &v) const;
  /// True if `v` occurs anywhere, including inside UF arguments.
  bool mentions(const std::string &v) const;
  /// True if `v` occurs inside some UF argument.
  bool mentionsInUf(const std::string &v) const;
  bool hasUf() const;

  /// All variable names (not UF symbols), including those inside UF args.
  void collectVars(std::set<std::string> &out) const;
  std::set<std::string> vars() const;
  /// UF applications, innermost first, deduplicated.
  void collectApps(std::vector<Atom> &out) const;

  AffineExpr substitute(const std::map<std::string, AffineExpr> &s) const;
  AffineExpr renameVars(const std::map<std::string, std::string> &m) const;
  AffineExpr renameUfs(const std::map<std::string, std::string> &m) const;
  /// Replace whole UF applications (matched structurally) by expressions.
  AffineExpr replaceApps(const std::map<Atom, AffineExpr> &m) const;

  int64_t evaluate(const Env &env) const;
  std::string str() const;

  /// gcd of all term coefficients (0 for constant expressions).
  int64_t coeffGcd() const;

private:
  void normalize();
  std::vector<Term> terms_;
  int64_t constant_ = 0;
};

std::string atomStr(const Atom &a);

/// expr = 0 or expr >= 0.
struct Constraint {
  enum Kind { EQ, GE };
  AffineExpr expr;
  Kind kind = GE;

  Constraint() = default;
  Constraint(AffineExpr e, Kind k) : expr(std::move(e)), kind(k) { normalize(); }

  static Constraint eq(const AffineExpr &l, const AffineExpr &r) {
    return Constraint(l - r, EQ);
  }
  static Constraint ge(const AffineExpr &l, const AffineExpr &r) {
    return Constraint(l - r, GE);
  }
  static Constraint le(const AffineExpr &l, const AffineExpr &r) {
    return Constraint(r - l, GE);
  }
  static Constraint lt(const AffineExpr &l, const AffineExpr &r) {
    return Constraint(r - l - 1, GE);
  }
  static Constraint gt(const AffineExpr &l, const AffineExpr &r) {
    return Constraint(l - r - 1, GE);
  }

  bool isTautology() const;
  bool isContradiction() const;
  bool holds(const Env &env) const;
  Constraint substitute(const std::map<std::string, AffineExpr> &s) const {
    return Constraint(expr.substitute(s), kind);
  }
  Constraint renameVars(const std::map<std::string, std::string> &m) const {
    return Constraint(expr.renameVars(m), kind);
  }
  Constraint renameUfs(const std::map<std::string, std::string> &m) const {
    return Constraint(expr.renameUfs(m), kind);
  }
  bool operator==(const Constraint &o) const {
    return kind == o.kind && expr == o.expr;
  }
  bool operator<(const Constraint &o) const {
    if (kind != o.kind) return kind < o.kind;
    return expr < o.expr;
  }
  std::string str() const;

private:
  void normalize();
};

} // namespace spf
