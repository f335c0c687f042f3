#include "spf/solver.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>

#include "spf/error.hpp"
#include "spf/rational.hpp"
#include "spf/set.hpp"

namespace spf {

const char *verdictName(Verdict v) {
  switch (v) {
  case Verdict::Sat: return "sat";
  case Verdict::Unsat: return "unsat";
  case Verdict::Unknown: return "unknown";
  }
  return "?";
}

Formula Formula::atom(Kind k, AffineExpr e) {
  if (e.isConstant()) {
    int64_t c = e.constant();
    bool v = k == Eq ? c == 0 : k == Ge ? c >= 0 : c != 0;
    return v ? truth() : falsity();
  }
  Formula f;
  f.kind = k;
  if (k == Ne) {
    Constraint c(e, Constraint::EQ);
    if (c.isContradiction()) return truth();
    f.expr = c.expr;
  } else {
    Constraint c(e, k == Eq ? Constraint::EQ : Constraint::GE);
    if (c.isContradiction()) return falsity();
    if (c.isTautology()) return truth();
    f.expr = c.expr;
  }
  return f;
}

Formula Formula::of(const Constraint &c) {
  return atom(c.kind == Constraint::EQ ? Eq : Ge, c.expr);
}

Formula Formula::conj(std::vector<Formula> fs) {
  Formula r;
  r.kind = And;
  for (auto &f : fs) {
    if (f.kind == True) continue;
    if (f.kind == False) return falsity();
    if (f.kind == And)
      for (auto &k : f.kids) r.kids.push_back(std::move(k));
    else
      r.kids.push_back(std::move(f));
  }
  if (r.kids.empty()) return truth();
  if (r.kids.size() == 1) return std::move(r.kids[0]);
  return r;
}

Formula Formula::disj(std::vector<Formula> fs) {
  Formula r;
  r.kind = Or;
  for (auto &f : fs) {
    if (f.kind == False) continue;
    if (f.kind == True) return truth();
    if (f.kind == Or)
      for (auto &k : f.kids) r.kids.push_back(std::move(k));
    else
      r.kids.push_back(std::move(f));
  }
  if (r.kids.empty()) return falsity();
  if (r.kids.size() == 1) return std::move(r.kids[0]);
  return r;
}

Formula Formula::neg(Formula f) {
  switch (f.kind) {
  case True: return falsity();
  case False: return truth();
  case Eq: return atom(Ne, f.expr);
  case Ne: return atom(Eq, f.expr);
  case Ge: return atom(Ge, -f.expr - 1);
  case And: {
    std::vector<Formula> ks;
    for (auto &k : f.kids) ks.push_back(neg(std::move(k)));
    return disj(std::move(ks));
  }
  case Or: {
    std::vector<Formula> ks;
    for (auto &k : f.kids) ks.push_back(neg(std::move(k)));
    return conj(std::move(ks));
  }
  }
  return f;
}

namespace {
template <class F> Formula rebuild(const Formula &f, const F &onExpr) {
  if (f.isAtom()) return Formula::atom(f.kind, onExpr(f.expr));
  if (f.kind == Formula::And || f.kind == Formula::Or) {
    std::vector<Formula> ks;
    for (auto &k : f.kids) ks.push_back(rebuild(k, onExpr));
    return f.kind == Formula::And ? Formula::conj(std::move(ks)) : Formula::disj(std::move(ks));
  }
  return f;
}
} // namespace

Formula Formula::substitute(const std::map<std::string, AffineExpr> &s) const {
  return rebuild(*this, [&](const AffineExpr &e) { return e.substitute(s); });
}

Formula Formula::renameVars(const std::map<std::string, std::string> &m) const {
  return rebuild(*this, [&](const AffineExpr &e) { return e.renameVars(m); });
}

Formula Formula::renameUfs(const std::map<std::string, std::string> &m) const {
  return rebuild(*this, [&](const AffineExpr &e) { return e.renameUfs(m); });
}

void Formula::collectVars(std::set<std::string> &out) const {
  if (isAtom()) expr.collectVars(out);
  for (auto &k : kids) k.collectVars(out);
}

void Formula::collectApps(std::vector<Atom> &out) const {
  if (isAtom()) expr.collectApps(out);
  for (auto &k : kids) k.collectApps(out);
}

bool Formula::holds(const Env &env) const {
  switch (kind) {
  case True: return true;
  case False: return false;
  case Eq: return expr.evaluate(env) == 0;
  case Ge: return expr.evaluate(env) >= 0;
  case Ne: return expr.evaluate(env) != 0;
  case And:
    for (auto &k : kids)
      if (!k.holds(env)) return false;
    return true;
  case Or:
    for (auto &k : kids)
      if (k.holds(env)) return true;
    return false;
  }
  return false;
}

std::string Formula::str() const {
  switch (kind) {
  case True: return "true";
  case False: return "false";
  case Eq: return Constraint(expr, Constraint::EQ).str();
  case Ge: return Constraint(expr, Constraint::GE).str();
  case Ne: {
    std::string s = Constraint(expr, Constraint::EQ).str();
    auto p = s.find(" = ");
    return s.substr(0, p) + " != " + s.substr(p + 3);
  }
  case And:
  case Or: {
    std::string s = "(";
    for (size_t i = 0; i < kids.size(); ++i) {
      if (i) s += kind == And ? " and " : " or ";
      s += kids[i].str();
    }
    return s + ")";
  }
  }
  return "?";
}

// ---------------------------------------------------------------------------

namespace {

struct BudgetExceeded {};

/// Bounded general simplex (Dutertre and de Moura) with Bland's rule.
class Simplex {
public:
  explicit Simplex(int nvars) : n_(nvars), lo_(nvars), hi_(nvars), val_(nvars), rowOf_(nvars, -1) {}

  /// Adds slack = sum(coef*x) with the given bounds.
  void addRow(const std::vector<std::pair<int, int64_t>> &coefs, std::optional<Rational> lo,
              std::optional<Rational> hi) {
    int s = (int)lo_.size();
    lo_.push_back(lo);
    hi_.push_back(hi);
    rowOf_.push_back((int)rows_.size());
    Rational v;
    for (auto &r : rows_) r.resize(lo_.size());
    std::vector<Rational> row(lo_.size());
    for (auto [x, a] : coefs) {
      if (rowOf_[x] < 0) {
        row[x] += Rational(a);
      } else {
        // x is basic: substitute its row
        auto &xr = rows_[rowOf_[x]];
        for (size_t j = 0; j < xr.size(); ++j)
          if (xr[j].sign()) row[j] += xr[j] * Rational(a);
      }
      v += val_[x] * Rational(a);
    }
    val_.push_back(v);
    rows_.push_back(std::move(row));
    basic_.push_back(s);
  }

  bool check() {
    const int N = (int)lo_.size();
    for (;;) {
      int bi = -1;
      bool below = false;
      for (int v = 0; v < N; ++v) {
        if (rowOf_[v] < 0) continue;
        if (lo_[v] && val_[v] < *lo_[v]) {
          bi = v;
          below = true;
          break;
        }
        if (hi_[v] && val_[v] > *hi_[v]) {
          bi = v;
          break;
        }
      }
      if (bi < 0) return true;
      auto &row = rows_[rowOf_[bi]];
      int bj = -1;
      for (int j = 0; j < N; ++j) {
        if (rowOf_[j] >= 0) continue;
        int a = row[j].sign();
        if (!a) continue;
        bool canUp = !hi_[j] || val_[j] < *hi_[j];
        bool canDown = !lo_[j] || val_[j] > *lo_[j];
        if (below ? ((a > 0 && canUp) || (a < 0 && canDown))
                  : ((a < 0 && canUp) || (a > 0 && canDown))) {
          bj = j;
          break;
        }
      }
      if (bj < 0) return false;
      pivotAndUpdate(bi, bj, below ? *lo_[bi] : *hi_[bi]);
    }
  }

  const Rational &value(int x) const { return val_[x]; }

private:
  void pivotAndUpdate(int xi, int xj, const Rational &v) {
    const int N = (int)lo_.size();
    int r = rowOf_[xi];
    Rational a = rows_[r][xj];
    Rational theta = (v - val_[xi]) / a;
    val_[xi] = v;
    val_[xj] += theta;
    for (size_t k = 0; k < rows_.size(); ++k)
      if ((int)k != r && rows_[k][xj].sign()) val_[basic_[k]] += rows_[k][xj] * theta;
    // xi = a*xj + rest  ->  xj = xi/a - rest/a
    std::vector<Rational> nr(N);
    Rational inv = Rational(1) / a;
    for (int j = 0; j < N; ++j)
      if (j != xj && rows_[r][j].sign()) nr[j] = -(rows_[r][j] * inv);
    nr[xi] = inv;
    rows_[r] = nr;
    basic_[r] = xj;
    rowOf_[xj] = r;
    rowOf_[xi] = -1;
    for (size_t k = 0; k < rows_.size(); ++k) {
      if ((int)k == r) continue;
      Rational c = rows_[k][xj];
      if (!c.sign()) continue;
      rows_[k][xj] = Rational(0);
      for (int j = 0; j < N; ++j)
        if (nr[j].sign()) rows_[k][j] += c * nr[j];
    }
  }

  int n_;
  std::vector<std::optional<Rational>> lo_, hi_;
  std::vector<Rational> val_;
  std::vector<int> rowOf_;
  std::vector<std::vector<Rational>> rows_;
  std::vector<int> basic_;
};

struct LinAtom {
  std::vector<std::pair<int, int64_t>> coefs;
  int64_t c = 0;
  bool eq = false;
};

struct Tree {
  enum K { T, F, A, And, Or } k = T;
  int atom = -1;
  std::vector<Tree> kids;
};

class Search {
public:
  Search(int nvars, int budget) : n_(nvars), budget_(budget) {}

  std::vector<LinAtom> atoms;
  int nodes = 0;
  std::vector<Rational> model;

  Verdict run(const Tree &root) {
    std::vector<int> as;
    std::vector<const Tree *> ors;
    if (!expand(root, as, ors)) return Verdict::Unsat;
    return rec(as, ors) ? Verdict::Sat : Verdict::Unsat;
  }

private:
  bool expand(const Tree &t, std::vector<int> &as, std::vector<const Tree *> &ors) {
    switch (t.k) {
    case Tree::T: return true;
    case Tree::F: return false;
    case Tree::A: as.push_back(t.atom); return true;
    case Tree::And:
      for (auto &k : t.kids)
        if (!expand(k, as, ors)) return false;
      return true;
    case Tree::Or: ors.push_back(&t); return true;
    }
    return true;
  }

  bool holds(const Tree &t, const std::vector<Rational> &m) const {
    switch (t.k) {
    case Tree::T: return true;
    case Tree::F: return false;
    case Tree::A: {
      const LinAtom &a = atoms[t.atom];
      Rational v(a.c);
      for (auto [x, c] : a.coefs) v += m[x] * Rational(c);
      return a.eq ? v.sign() == 0 : v.sign() >= 0;
    }
    case Tree::And:
      for (auto &k : t.kids)
        if (!holds(k, m)) return false;
      return true;
    case Tree::Or:
      for (auto &k : t.kids)
        if (holds(k, m)) return true;
      return false;
    }
    return false;
  }

  bool rec(const std::vector<int> &as, const std::vector<const Tree *> &ors) {
    if (++nodes > budget_) throw BudgetExceeded{};
    Simplex sx(n_);
    for (int id : as) {
      const LinAtom &a = atoms[id];
      Rational b(-a.c);
      sx.addRow(a.coefs, b, a.eq ? std::optional<Rational>(b) : std::nullopt);
    }
    if (!sx.check()) return false;
    std::vector<Rational> m(n_);
    for (int x = 0; x < n_; ++x) m[x] = sx.value(x);

    for (size_t i = 0; i < ors.size(); ++i) {
      if (holds(*ors[i], m)) continue;
      for (auto &kid : ors[i]->kids) {
        std::vector<int> as2 = as;
        std::vector<const Tree *> ors2;
        for (size_t j = 0; j < ors.size(); ++j)
          if (j != i) ors2.push_back(ors[j]);
        if (!expand(kid, as2, ors2)) continue;
        if (rec(as2, ors2)) return true;
      }
      return false;
    }
    for (int x = 0; x < n_; ++x) {
      if (m[x].isInteger()) continue;
      int64_t f = m[x].floor();
      LinAtom down{{{x, -1}}, f, false}; // f - x >= 0
      LinAtom up{{{x, 1}}, -(f + 1), false}; // x - (f+1) >= 0
      for (auto &na : {down, up}) {
        atoms.push_back(na);
        std::vector<int> as2 = as;
        as2.push_back((int)atoms.size() - 1);
        if (rec(as2, ors)) return true;
      }
      return false;
    }
    model = m;
    return true;
  }

  int n_;
  int budget_;
};

/// Variable elimination record: var = expr, applied in reverse for models.
struct Elim {
  std::string var;
  AffineExpr expr;
};

bool topLevelUnitEq(const Formula &f, std::string &var, AffineExpr &val) {
  if (f.kind != Formula::Eq) return false;
  for (auto &t : f.expr.terms()) {
    if (t.atom.uf || (t.coef != 1 && t.coef != -1)) continue;
    if (f.expr.mentionsInUf(t.atom.name)) continue;
    var = t.atom.name;
    val = f.expr.without(var) * (-t.coef);
    return true;
  }
  return false;
}

} // namespace

SolveResult solve(const std::vector<Formula> &input, const SolverOptions &opt) {
  SolveResult res;
  // Purify UF applications, innermost first.
  std::vector<Atom> apps;
  for (auto &f : input) f.collectApps(apps);
  std::set<std::string> taken;
  for (auto &f : input) f.collectVars(taken);
  std::map<Atom, AffineExpr> purified;
  struct App {
    std::string sym;
    std::vector<AffineExpr> args;
    AffineExpr var;
  };
  std::vector<App> recs;
  int counter = 0;
  for (auto &a : apps) {
    Atom key = a;
    for (auto &arg : key.args) arg = arg.replaceApps(purified);
    if (purified.count(key)) continue;
    std::string v = freshName("!u" + std::to_string(counter++), taken);
    taken.insert(v);
    purified[key] = AffineExpr::var(v);
    recs.push_back(App{key.name, key.args, AffineExpr::var(v)});
  }
  std::vector<Formula> fs;
  for (auto &f : input)
    fs.push_back(rebuild(f, [&](const AffineExpr &e) { return e.replaceApps(purified); }));
  for (size_t i = 0; i < recs.size(); ++i)
    for (size_t j = i + 1; j < recs.size(); ++j) {
      if (recs[i].sym != recs[j].sym || recs[i].args.size() != recs[j].args.size()) continue;
      std::vector<Formula> cl;
      for (size_t k = 0; k < recs[i].args.size(); ++k)
        cl.push_back(Formula::ne(recs[i].args[k], recs[j].args[k]));
      cl.push_back(Formula::eq(recs[i].var, recs[j].var));
      fs.push_back(Formula::disj(std::move(cl)));
    }
  Formula all = Formula::conj(fs);

  // Eliminate variables fixed by top-level unit equalities.
  std::vector<Elim> elims;
  for (bool changed = true; changed;) {
    changed = false;
    if (all.kind == Formula::False) break;
    std::vector<const Formula *> tops;
    if (all.kind == Formula::And)
      for (auto &k : all.kids) tops.push_back(&k);
    else
      tops.push_back(&all);
    for (auto *t : tops) {
      std::string v;
      AffineExpr e;
      if (topLevelUnitEq(*t, v, e)) {
        elims.push_back({v, e});
        all = all.substitute({{v, e}});
        changed = true;
        break;
      }
    }
  }
  if (all.kind == Formula::False) {
    res.verdict = Verdict::Unsat;
    return res;
  }

  std::set<std::string> vs;
  all.collectVars(vs);
  std::vector<std::string> names(vs.begin(), vs.end());
  std::map<std::string, int> idx;
  for (size_t i = 0; i < names.size(); ++i) idx[names[i]] = (int)i;

  Search search((int)names.size(), opt.nodeBudget);
  std::function<Tree(const Formula &)> conv = [&](const Formula &f) -> Tree {
    Tree t;
    switch (f.kind) {
    case Formula::True: t.k = Tree::T; break;
    case Formula::False: t.k = Tree::F; break;
    case Formula::Eq:
    case Formula::Ge: {
      LinAtom a;
      a.eq = f.kind == Formula::Eq;
      a.c = f.expr.constant();
      for (auto &term : f.expr.terms()) a.coefs.push_back({idx.at(term.atom.name), term.coef});
      search.atoms.push_back(a);
      t.k = Tree::A;
      t.atom = (int)search.atoms.size() - 1;
      break;
    }
    case Formula::Ne: {
      t.k = Tree::Or;
      t.kids.push_back(conv(Formula::atom(Formula::Ge, f.expr - 1)));
      t.kids.push_back(conv(Formula::atom(Formula::Ge, -f.expr - 1)));
      break;
    }
    case Formula::And:
    case Formula::Or:
      t.k = f.kind == Formula::And ? Tree::And : Tree::Or;
      for (auto &k : f.kids) t.kids.push_back(conv(k));
      break;
    }
    return t;
  };
  Tree root = conv(all);
  try {
    res.verdict = search.run(root);
  } catch (const BudgetExceeded &) {
    res.verdict = Verdict::Unknown;
  } catch (const Overflow &) {
    res.verdict = Verdict::Unknown;
  }
  res.nodes = search.nodes;
  if (res.verdict == Verdict::Sat) {
    Env env;
    for (size_t i = 0; i < names.size(); ++i)
      env.vals[names[i]] = search.model.empty() ? 0 : search.model[i].floor();
    for (auto it = elims.rbegin(); it != elims.rend(); ++it) {
      std::set<std::string> need;
      it->expr.collectVars(need);
      for (auto &n : need)
        if (!env.vals.count(n)) env.vals[n] = 0;
      env.vals[it->var] = it->expr.evaluate(env);
    }
    for (auto &[k, v] : env.vals)
      if (k[0] != '!') res.model[k] = v;
  }
  return res;
}

// ---------------------------------------------------------------------------

namespace {

std::string smtInt(int64_t c) {
  return c < 0 ? "(- " + std::to_string(-c) + ")" : std::to_string(c);
}

std::string smtExpr(const AffineExpr &e);

std::string smtAtom(const Atom &a) {
  if (!a.uf) return "|" + a.name + "|";
  std::string s = "(|" + a.name + "|";
  for (auto &x : a.args) s += " " + smtExpr(x);
  return s + ")";
}

std::string smtExpr(const AffineExpr &e) {
  std::vector<std::string> parts;
  for (auto &t : e.terms())
    parts.push_back(t.coef == 1 ? smtAtom(t.atom)
                                : "(* " + smtInt(t.coef) + " " + smtAtom(t.atom) + ")");
  if (e.constant() != 0 || parts.empty()) parts.push_back(smtInt(e.constant()));
  if (parts.size() == 1) return parts[0];
  std::string s = "(+";
  for (auto &p : parts) s += " " + p;
  return s + ")";
}

std::string smtFormula(const Formula &f) {
  switch (f.kind) {
  case Formula::True: return "true";
  case Formula::False: return "false";
  case Formula::Eq: return "(= " + smtExpr(f.expr) + " 0)";
  case Formula::Ge: return "(>= " + smtExpr(f.expr) + " 0)";
  case Formula::Ne: return "(not (= " + smtExpr(f.expr) + " 0))";
  case Formula::And:
  case Formula::Or: {
    std::string s = f.kind == Formula::And ? "(and" : "(or";
    for (auto &k : f.kids) s += " " + smtFormula(k);
    return s + ")";
  }
  }
  return "true";
}

void collectSyms(const AffineExpr &e, std::map<std::string, size_t> &ufs) {
  for (auto &t : e.terms())
    if (t.atom.uf) {
      ufs[t.atom.name] = t.atom.args.size();
      for (auto &a : t.atom.args) collectSyms(a, ufs);
    }
}

void collectSyms(const Formula &f, std::map<std::string, size_t> &ufs) {
  if (f.isAtom()) collectSyms(f.expr, ufs);
  for (auto &k : f.kids) collectSyms(k, ufs);
}

} // namespace

std::string toSmtLib(const std::vector<Formula> &fs, const std::string &comment) {
  std::ostringstream os;
  if (!comment.empty()) {
    std::istringstream in(comment);
    std::string line;
    while (std::getline(in, line)) os << "; " << line << "\n";
  }
  os << "(set-logic QF_UFLIA)\n";
  std::set<std::string> vars;
  std::map<std::string, size_t> ufs;
  for (auto &f : fs) {
    f.collectVars(vars);
    collectSyms(f, ufs);
  }
  for (auto &v : vars) os << "(declare-fun |" << v << "| () Int)\n";
  for (auto &[u, n] : ufs) {
    os << "(declare-fun |" << u << "| (";
    for (size_t i = 0; i < n; ++i) os << (i ? " " : "") << "Int";
    os << ") Int)\n";
  }
  for (auto &f : fs) os << "(assert " << smtFormula(f) << ")\n";
  os << "(check-sat)\n";
  return os.str();
}

} // namespace spf
