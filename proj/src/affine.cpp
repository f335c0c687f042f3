#include "spf/affine.hpp"

#include <algorithm>
#include <sstream>

#include "spf/error.hpp"
#include "spf/rational.hpp"

namespace spf {

const char *kindName(VarKind k) {
  switch (k) {
  case VarKind::Computation: return "computation";
  case VarKind::Layout: return "layout";
  case VarKind::Reduced: return "reduced";
  case VarKind::Parameter: return "parameter";
  case VarKind::Quantified: return "quantified";
  }
  return "?";
}

int compare(const Atom &a, const Atom &b) {
  if (a.uf != b.uf) return a.uf ? 1 : -1;
  if (int c = a.name.compare(b.name)) return c < 0 ? -1 : 1;
  if (a.args.size() != b.args.size())
    return a.args.size() < b.args.size() ? -1 : 1;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (int c = compare(a.args[i], b.args[i])) return c;
  return 0;
}

int compare(const AffineExpr &a, const AffineExpr &b) {
  const auto &ta = a.terms(), &tb = b.terms();
  size_t n = std::min(ta.size(), tb.size());
  for (size_t i = 0; i < n; ++i) {
    if (int c = compare(ta[i].atom, tb[i].atom)) return c;
    if (ta[i].coef != tb[i].coef) return ta[i].coef < tb[i].coef ? -1 : 1;
  }
  if (ta.size() != tb.size()) return ta.size() < tb.size() ? -1 : 1;
  if (a.constant() != b.constant()) return a.constant() < b.constant() ? -1 : 1;
  return 0;
}

int64_t Env::value(const std::string &name) const {
  auto it = vals.find(name);
  if (it == vals.end()) throw Error("eval", "no value for '" + name + "'");
  return it->second;
}

int64_t Env::apply(const std::string &uf, const std::vector<int64_t> &args) const {
  auto it = arrays.find(uf);
  if (it != arrays.end() && args.size() == 1) {
    int64_t a = args[0];
    if (a < 0 || a >= (int64_t)it->second.size())
      throw Error("eval", "table lookup out of range: " + uf + "(" +
                              std::to_string(a) + ")");
    return it->second[a];
  }
  if (ufHook)
    if (auto v = ufHook(uf, args)) return *v;
  throw Error("eval", "no table for uninterpreted function '" + uf + "'");
}

AffineExpr AffineExpr::var(const std::string &name, int64_t coef) {
  return atom(Atom::var(name), coef);
}

AffineExpr AffineExpr::app(const std::string &uf, std::vector<AffineExpr> args,
                           int64_t coef) {
  Atom a;
  a.name = uf;
  a.uf = true;
  a.args = std::move(args);
  return atom(a, coef);
}

AffineExpr AffineExpr::atom(const Atom &a, int64_t coef) {
  AffineExpr e;
  if (coef != 0) e.terms_.push_back(Term{a, coef});
  return e;
}

std::optional<std::string> AffineExpr::asVar() const {
  if (constant_ == 0 && terms_.size() == 1 && terms_[0].coef == 1 &&
      !terms_[0].atom.uf)
    return terms_[0].atom.name;
  return std::nullopt;
}

void AffineExpr::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term &x, const Term &y) { return compare(x.atom, y.atom) < 0; });
  std::vector<Term> out;
  for (auto &t : terms_) {
    if (!out.empty() && compare(out.back().atom, t.atom) == 0)
      out.back().coef += t.coef;
    else
      out.push_back(t);
  }
  out.erase(std::remove_if(out.begin(), out.end(),
                           [](const Term &t) { return t.coef == 0; }),
            out.end());
  terms_ = std::move(out);
}

AffineExpr AffineExpr::operator+(const AffineExpr &o) const {
  AffineExpr r = *this;
  r.constant_ += o.constant_;
  r.terms_.insert(r.terms_.end(), o.terms_.begin(), o.terms_.end());
  r.normalize();
  return r;
}

AffineExpr AffineExpr::operator-(const AffineExpr &o) const { return *this + o * -1; }

AffineExpr AffineExpr::operator*(int64_t k) const {
  AffineExpr r;
  if (k == 0) return r;
  r.constant_ = constant_ * k;
  r.terms_ = terms_;
  for (auto &t : r.terms_) t.coef *= k;
  return r;
}

int64_t AffineExpr::coeff(const std::string &v) const {
  for (auto &t : terms_)
    if (!t.atom.uf && t.atom.name == v) return t.coef;
  return 0;
}

AffineExpr AffineExpr::without(const std::string &v) const {
  AffineExpr r = *this;
  r.terms_.erase(std::remove_if(r.terms_.begin(), r.terms_.end(),
                                [&](const Term &t) {
                                  return !t.atom.uf && t.atom.name == v;
                                }),
                 r.terms_.end());
  return r;
}

bool AffineExpr::mentions(const std::string &v) const {
  for (auto &t : terms_) {
    if (!t.atom.uf && t.atom.name == v) return true;
    for (auto &a : t.atom.args)
      if (a.mentions(v)) return true;
  }
  return false;
}

bool AffineExpr::mentionsInUf(const std::string &v) const {
  for (auto &t : terms_)
    for (auto &a : t.atom.args)
      if (a.mentions(v)) return true;
  return false;
}

bool AffineExpr::hasUf() const {
  for (auto &t : terms_)
    if (t.atom.uf) return true;
  return false;
}

void AffineExpr::collectVars(std::set<std::string> &out) const {
  for (auto &t : terms_) {
    if (!t.atom.uf) out.insert(t.atom.name);
    for (auto &a : t.atom.args) a.collectVars(out);
  }
}

std::set<std::string> AffineExpr::vars() const {
  std::set<std::string> s;
  collectVars(s);
  return s;
}

void AffineExpr::collectApps(std::vector<Atom> &out) const {
  for (auto &t : terms_) {
    if (!t.atom.uf) continue;
    for (auto &a : t.atom.args) a.collectApps(out);
    bool seen = false;
    for (auto &o : out)
      if (compare(o, t.atom) == 0) seen = true;
    if (!seen) out.push_back(t.atom);
  }
}

AffineExpr AffineExpr::substitute(const std::map<std::string, AffineExpr> &s) const {
  AffineExpr r(constant_);
  for (auto &t : terms_) {
    if (!t.atom.uf) {
      auto it = s.find(t.atom.name);
      if (it != s.end()) {
        r += it->second * t.coef;
        continue;
      }
      r += AffineExpr::atom(t.atom, t.coef);
      continue;
    }
    Atom a = t.atom;
    for (auto &arg : a.args) arg = arg.substitute(s);
    r += AffineExpr::atom(a, t.coef);
  }
  return r;
}

AffineExpr AffineExpr::renameVars(const std::map<std::string, std::string> &m) const {
  std::map<std::string, AffineExpr> s;
  for (auto &[k, v] : m) s[k] = AffineExpr::var(v);
  return substitute(s);
}

AffineExpr AffineExpr::renameUfs(const std::map<std::string, std::string> &m) const {
  AffineExpr r(constant_);
  for (auto &t : terms_) {
    Atom a = t.atom;
    if (a.uf) {
      auto it = m.find(a.name);
      if (it != m.end()) a.name = it->second;
      for (auto &arg : a.args) arg = arg.renameUfs(m);
    }
    r += AffineExpr::atom(a, t.coef);
  }
  return r;
}

AffineExpr AffineExpr::replaceApps(const std::map<Atom, AffineExpr> &m) const {
  AffineExpr r(constant_);
  for (auto &t : terms_) {
    if (!t.atom.uf) {
      r += AffineExpr::atom(t.atom, t.coef);
      continue;
    }
    Atom a = t.atom;
    for (auto &arg : a.args) arg = arg.replaceApps(m);
    auto it = m.find(a);
    if (it != m.end())
      r += it->second * t.coef;
    else
      r += AffineExpr::atom(a, t.coef);
  }
  return r;
}

int64_t AffineExpr::evaluate(const Env &env) const {
  int64_t v = constant_;
  for (auto &t : terms_) {
    int64_t x;
    if (!t.atom.uf) {
      x = env.value(t.atom.name);
    } else {
      std::vector<int64_t> args;
      for (auto &a : t.atom.args) args.push_back(a.evaluate(env));
      x = env.apply(t.atom.name, args);
    }
    v += t.coef * x;
  }
  return v;
}

int64_t AffineExpr::coeffGcd() const {
  int64_t g = 0;
  for (auto &t : terms_) g = gcd64(g, t.coef);
  return g;
}

std::string atomStr(const Atom &a) {
  if (!a.uf) return a.name;
  std::string s = a.name + "(";
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ", ";
    s += a.args[i].str();
  }
  return s + ")";
}

std::string AffineExpr::str() const {
  std::ostringstream os;
  bool first = true;
  for (auto &t : terms_) {
    int64_t c = t.coef;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    int64_t a = c < 0 ? -c : c;
    if (a != 1) os << a << "*";
    os << atomStr(t.atom);
    first = false;
  }
  if (first) {
    os << constant_;
  } else if (constant_ != 0) {
    os << (constant_ < 0 ? " - " : " + ") << (constant_ < 0 ? -constant_ : constant_);
  }
  return os.str();
}

void Constraint::normalize() {
  int64_t g = expr.coeffGcd();
  if (g == 0) return;
  if (kind == EQ) {
    if (expr.constant() % g != 0) {
      expr = AffineExpr(-1);
      kind = GE;
      return;
    }
    AffineExpr r(expr.constant() / g);
    for (auto &t : expr.terms()) r += AffineExpr::atom(t.atom, t.coef / g);
    if (r.terms().front().coef < 0) r = -r;
    expr = r;
  } else if (g > 1) {
    AffineExpr r(floorDiv(expr.constant(), g));
    for (auto &t : expr.terms()) r += AffineExpr::atom(t.atom, t.coef / g);
    expr = r;
  }
}

bool Constraint::isTautology() const {
  if (!expr.isConstant()) return false;
  return kind == EQ ? expr.constant() == 0 : expr.constant() >= 0;
}

bool Constraint::isContradiction() const {
  if (!expr.isConstant()) return false;
  return kind == EQ ? expr.constant() != 0 : expr.constant() < 0;
}

bool Constraint::holds(const Env &env) const {
  int64_t v = expr.evaluate(env);
  return kind == EQ ? v == 0 : v >= 0;
}

std::string Constraint::str() const {
  // Split into positive and negative sides so that "i - A.idx(pA) = 0"
  // prints as "i = A.idx(pA)".
  AffineExpr pos, neg;
  for (auto &t : expr.terms()) {
    if (t.coef > 0)
      pos += AffineExpr::atom(t.atom, t.coef);
    else
      neg += AffineExpr::atom(t.atom, -t.coef);
  }
  int64_t c = expr.constant();
  if (kind == GE) {
    // pos + c >= neg
    if (pos.isConstant() && !neg.isConstant()) {
      // c >= neg  ->  neg <= c
      return neg.str() + " <= " + AffineExpr(c).str();
    }
    if (c > 0) return (neg + AffineExpr(-c)).str() + " <= " + pos.str();
    return pos.str() + " >= " + (neg + AffineExpr(-c)).str();
  }
  if (c >= 0) {
    pos += AffineExpr(c);
  } else {
    neg += AffineExpr(-c);
  }
  if (pos.isConstant() && !neg.isConstant()) std::swap(pos, neg);
  return pos.str() + " = " + neg.str();
}

} // namespace spf
