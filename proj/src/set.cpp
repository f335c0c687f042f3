#include "spf/set.hpp"

#include <algorithm>
#include <sstream>

#include "spf/error.hpp"
#include "spf/rational.hpp"

namespace spf {

std::string freshName(const std::string &base, const std::set<std::string> &taken) {
  if (!taken.count(base)) return base;
  for (int k = 1;; ++k) {
    std::string n = base + "_" + std::to_string(k);
    if (!taken.count(n)) return n;
  }
}

void Conjunct::add(const Constraint &c) {
  if (c.isTautology()) return;
  for (auto &o : constraints)
    if (o == c) return;
  constraints.push_back(c);
}

bool Conjunct::isObviouslyEmpty() const {
  for (auto &c : constraints)
    if (c.isContradiction()) return true;
  return false;
}

std::set<std::string> Conjunct::mentionedVars() const {
  std::set<std::string> s;
  for (auto &c : constraints) c.expr.collectVars(s);
  return s;
}

Conjunct Conjunct::renameVars(const std::map<std::string, std::string> &m) const {
  Conjunct r;
  for (auto &c : constraints) r.add(c.renameVars(m));
  for (auto &l : locals) {
    auto it = m.find(l);
    r.locals.push_back(it == m.end() ? l : it->second);
  }
  return r;
}

Conjunct Conjunct::renameUfs(const std::map<std::string, std::string> &m) const {
  Conjunct r;
  for (auto &c : constraints) r.add(c.renameUfs(m));
  r.locals = locals;
  return r;
}

Conjunct Conjunct::substitute(const std::map<std::string, AffineExpr> &s) const {
  Conjunct r;
  for (auto &c : constraints) r.add(c.substitute(s));
  r.locals = locals;
  return r;
}

bool Conjunct::holds(const Env &env) const {
  for (auto &c : constraints)
    if (!c.holds(env)) return false;
  return true;
}

namespace {

bool eliminateByEquality(Conjunct &c, const std::string &x) {
  for (size_t k = 0; k < c.constraints.size(); ++k) {
    const Constraint &con = c.constraints[k];
    if (con.kind != Constraint::EQ) continue;
    int64_t a = con.expr.coeff(x);
    if (a != 1 && a != -1) continue;
    if (con.expr.mentionsInUf(x)) continue;
    // a*x + rest = 0  ->  x = -rest/a
    AffineExpr val = con.expr.without(x) * (-a);
    std::map<std::string, AffineExpr> s{{x, val}};
    Conjunct r;
    r.locals = c.locals;
    for (size_t j = 0; j < c.constraints.size(); ++j)
      if (j != k) r.add(c.constraints[j].substitute(s));
    c = r;
    return true;
  }
  return false;
}

} // namespace

Conjunct simplify(const Conjunct &in) {
  Conjunct c;
  c.locals = in.locals;
  for (auto &k : in.constraints) c.add(k);
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < c.locals.size(); ++i) {
      std::string x = c.locals[i];
      bool used = false;
      for (auto &k : c.constraints)
        if (k.expr.mentions(x)) used = true;
      if (!used || eliminateByEquality(c, x)) {
        c.locals.erase(c.locals.begin() + i);
        changed = true;
        break;
      }
    }
  }
  if (c.isObviouslyEmpty()) {
    Conjunct e;
    e.constraints.push_back(Constraint(AffineExpr(-1), Constraint::GE));
    return e;
  }
  return c;
}

PresburgerSet::PresburgerSet(std::vector<VarId> t) : tuple(std::move(t)) {}

PresburgerSet PresburgerSet::universe(std::vector<VarId> t) {
  PresburgerSet s(std::move(t));
  s.disjuncts.push_back(Conjunct{});
  return s;
}

PresburgerSet PresburgerSet::empty(std::vector<VarId> t) {
  return PresburgerSet(std::move(t));
}

bool PresburgerSet::hasVar(const std::string &n) const { return findVar(n) != nullptr; }

const VarId *PresburgerSet::findVar(const std::string &n) const {
  for (auto &v : tuple)
    if (v.name == n) return &v;
  return nullptr;
}

std::vector<std::string> PresburgerSet::names() const {
  std::vector<std::string> r;
  for (auto &v : tuple) r.push_back(v.name);
  return r;
}

std::set<std::string> PresburgerSet::parameters() const {
  std::set<std::string> p;
  for (auto &d : disjuncts) {
    auto m = d.mentionedVars();
    for (auto &l : d.locals) m.erase(l);
    for (auto &v : tuple) m.erase(v.name);
    p.insert(m.begin(), m.end());
  }
  return p;
}

const Conjunct &PresburgerSet::conjunct(const char *op) const {
  if (disjuncts.size() != 1)
    throw Error("presburger", std::string(op) + " requires a single conjunct, got " +
                                  std::to_string(disjuncts.size()));
  return disjuncts[0];
}

namespace {
std::string tupleStr(const std::vector<VarId> &t) {
  std::string s = "[";
  for (size_t i = 0; i < t.size(); ++i) {
    if (i) s += ", ";
    s += t[i].name;
  }
  return s + "]";
}

std::string conjStr(const Conjunct &c) {
  std::string s;
  if (!c.locals.empty()) {
    s += "exists ";
    for (size_t i = 0; i < c.locals.size(); ++i) {
      if (i) s += ", ";
      s += c.locals[i];
    }
    s += ": ";
  }
  if (c.constraints.empty()) return s + "true";
  for (size_t i = 0; i < c.constraints.size(); ++i) {
    if (i) s += " and ";
    s += c.constraints[i].str();
  }
  return s;
}

std::string bodyStr(const std::vector<Conjunct> &ds) {
  if (ds.empty()) return " | false";
  if (ds.size() == 1 && ds[0].constraints.empty() && ds[0].locals.empty()) return "";
  if (ds.size() == 1) return " | " + conjStr(ds[0]);
  std::string s = " | ";
  for (size_t i = 0; i < ds.size(); ++i) {
    if (i) s += " or ";
    s += "(" + conjStr(ds[i]) + ")";
  }
  return s;
}
} // namespace

std::string PresburgerSet::str() const {
  return "{ " + tupleStr(tuple) + bodyStr(disjuncts) + " }";
}

bool PresburgerSet::operator==(const PresburgerSet &o) const {
  if (names() != o.names() || disjuncts.size() != o.disjuncts.size()) return false;
  for (size_t i = 0; i < disjuncts.size(); ++i) {
    auto a = disjuncts[i].constraints, b = o.disjuncts[i].constraints;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (!(a == b) || disjuncts[i].locals != o.disjuncts[i].locals) return false;
  }
  return true;
}

PresburgerRelation PresburgerRelation::universe(std::vector<VarId> in,
                                                std::vector<VarId> out) {
  PresburgerRelation r;
  r.input = std::move(in);
  r.output = std::move(out);
  r.disjuncts.push_back(Conjunct{});
  return r;
}

PresburgerSet PresburgerRelation::asSet() const {
  PresburgerSet s;
  s.tuple = input;
  s.tuple.insert(s.tuple.end(), output.begin(), output.end());
  s.disjuncts = disjuncts;
  return s;
}

std::set<std::string> PresburgerRelation::parameters() const { return asSet().parameters(); }

std::string PresburgerRelation::str() const {
  return "{ " + tupleStr(input) + " -> " + tupleStr(output) + bodyStr(disjuncts) + " }";
}

namespace {

std::set<std::string> allNames(const std::vector<VarId> &t, const std::vector<Conjunct> &ds) {
  std::set<std::string> s;
  for (auto &v : t) s.insert(v.name);
  for (auto &d : ds) {
    auto m = d.mentionedVars();
    s.insert(m.begin(), m.end());
    s.insert(d.locals.begin(), d.locals.end());
  }
  return s;
}

/// Rename the locals of `c` away from `taken`, adding the new names to it.
Conjunct freshenLocals(const Conjunct &c, std::set<std::string> &taken) {
  std::map<std::string, std::string> m;
  for (auto &l : c.locals) {
    std::string n = freshName(l, taken);
    taken.insert(n);
    if (n != l) m[l] = n;
  }
  return m.empty() ? c : c.renameVars(m);
}

Conjunct conjoin(const Conjunct &a, const Conjunct &b) {
  Conjunct r = a;
  for (auto &k : b.constraints) r.add(k);
  r.locals.insert(r.locals.end(), b.locals.begin(), b.locals.end());
  return r;
}

} // namespace

PresburgerSet intersect(const PresburgerSet &a, const PresburgerSet &b) {
  PresburgerSet r;
  r.tuple = a.tuple;
  for (auto &v : b.tuple) {
    const VarId *w = a.findVar(v.name);
    if (!w) {
      r.tuple.push_back(v);
    } else if (w->kind != v.kind) {
      throw Error("presburger", "intersect: variable '" + v.name +
                                    "' has conflicting kinds " + kindName(w->kind) +
                                    " and " + kindName(v.kind));
    }
  }
  std::set<std::string> taken = allNames(a.tuple, a.disjuncts);
  for (auto &v : b.tuple) taken.insert(v.name);
  for (auto &da : a.disjuncts)
    for (auto &db : b.disjuncts) {
      std::set<std::string> t = taken;
      for (auto &k : db.constraints) k.expr.collectVars(t);
      Conjunct c = conjoin(da, freshenLocals(db, t));
      if (!c.isObviouslyEmpty()) r.disjuncts.push_back(simplify(c));
    }
  return r;
}

PresburgerRelation compose(const PresburgerRelation &outer, const PresburgerRelation &inner) {
  if (inner.output.size() != outer.input.size())
    throw Error("presburger", "compose: arity mismatch " +
                                  std::to_string(inner.output.size()) + " vs " +
                                  std::to_string(outer.input.size()));
  for (auto &x : inner.input)
    for (auto &z : outer.output)
      if (x.name == z.name)
        throw Error("presburger", "compose: name '" + x.name +
                                      "' occurs in both the domain and the range");
  std::set<std::string> taken = allNames(inner.input, inner.disjuncts);
  auto on = allNames(outer.output, outer.disjuncts);
  taken.insert(on.begin(), on.end());
  for (auto &v : inner.output) taken.insert(v.name);
  for (auto &v : outer.input) taken.insert(v.name);

  std::map<std::string, std::string> rin, rout;
  std::vector<std::string> mediators;
  for (size_t k = 0; k < inner.output.size(); ++k) {
    std::string m = freshName("m_" + inner.output[k].name, taken);
    taken.insert(m);
    mediators.push_back(m);
    rin[inner.output[k].name] = m;
    rout[outer.input[k].name] = m;
  }
  PresburgerRelation r;
  r.input = inner.input;
  r.output = outer.output;
  for (auto &di : inner.disjuncts)
    for (auto &dx : outer.disjuncts) {
      std::set<std::string> t = taken;
      Conjunct a = freshenLocals(di.renameVars(rin), t);
      Conjunct b = freshenLocals(dx.renameVars(rout), t);
      Conjunct c = conjoin(a, b);
      c.locals.insert(c.locals.end(), mediators.begin(), mediators.end());
      c = simplify(c);
      if (!c.isObviouslyEmpty()) r.disjuncts.push_back(c);
    }
  return r;
}

PresburgerRelation inverse(const PresburgerRelation &r) {
  PresburgerRelation s = r;
  std::swap(s.input, s.output);
  return s;
}

PresburgerSet range_keep(const PresburgerRelation &r, bool project) {
  if (!project) return r.asSet();
  PresburgerSet s;
  s.tuple = r.output;
  for (auto &d : r.disjuncts) {
    Conjunct c = d;
    for (auto &v : r.input) c.locals.push_back(v.name);
    c = simplify(c);
    if (!c.isObviouslyEmpty()) s.disjuncts.push_back(c);
  }
  return s;
}

PresburgerSet apply(const PresburgerSet &s, const PresburgerRelation &r) {
  if (s.tuple.size() != r.input.size())
    throw Error("presburger", "apply: arity mismatch");
  PresburgerRelation dom;
  dom.output = s.tuple;
  dom.disjuncts = s.disjuncts;
  PresburgerRelation c = compose(r, dom);
  return range_keep(c, true);
}

PresburgerSet reorder(const PresburgerSet &s, const std::vector<std::string> &order) {
  if (order.size() != s.tuple.size())
    throw Error("presburger", "reorder: order is not a permutation of the tuple");
  PresburgerSet r = s;
  r.tuple.clear();
  for (auto &n : order) {
    const VarId *v = s.findVar(n);
    if (!v) throw Error("presburger", "reorder: unknown variable '" + n + "'");
    r.tuple.push_back(*v);
  }
  return r;
}

} // namespace spf
