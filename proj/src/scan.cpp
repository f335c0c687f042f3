#include "spf/scan.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "spf/error.hpp"
#include "spf/solver.hpp"

namespace spf {

std::vector<Constraint> LevelScan::boundConstraints() const {
  std::vector<Constraint> r;
  AffineExpr v = AffineExpr::var(var);
  if (isAssign) r.push_back(Constraint::eq(v, value));
  for (auto &b : lower) r.push_back(Constraint::ge(v * b.coef, b.expr));
  for (auto &b : upper) r.push_back(Constraint::le(v * b.coef, b.expr));
  return r;
}

int ScanResult::position(const std::string &v) const {
  for (size_t i = 0; i < order.size(); ++i)
    if (order[i] == v) return (int)i;
  return -1;
}

std::string ScanResult::str() const {
  std::ostringstream os;
  for (auto &c : preconditions) os << "  (params) " << c.str() << "\n";
  for (auto &l : levels) {
    os << "  " << l.var << ": ";
    if (l.isAssign) {
      os << l.var << " = " << l.value.str();
    } else {
      std::string sep;
      for (auto &b : l.lower) {
        os << sep << (b.coef == 1 ? "" : std::to_string(b.coef) + "*") << l.var
           << " >= " << b.expr.str();
        sep = ", ";
      }
      for (auto &b : l.upper) {
        os << sep << (b.coef == 1 ? "" : std::to_string(b.coef) + "*") << l.var
           << " <= " << b.expr.str();
        sep = ", ";
      }
    }
    for (auto &f : l.finds) os << "; find " << atomStr(f.app) << " = " << f.key.str();
    for (auto &c : l.conditions) os << "; if " << c.str();
    os << "\n";
  }
  return os.str();
}

namespace {

struct Item {
  Constraint c;
  bool derived;
};

int levelOf(const Constraint &c, const std::map<std::string, int> &pos) {
  std::set<std::string> vs;
  c.expr.collectVars(vs);
  int l = -1;
  for (auto &v : vs) {
    auto it = pos.find(v);
    if (it != pos.end()) l = std::max(l, it->second);
  }
  return l;
}

/// v occurs linearly (coefficient != 0) and nowhere inside a UF argument.
bool isBoundOn(const Constraint &c, const std::string &v) {
  return c.expr.coeff(v) != 0 && !c.expr.mentionsInUf(v);
}

bool asFind(const Constraint &c, const std::string &v, FindCond &out) {
  if (c.kind != Constraint::EQ || c.expr.coeff(v) != 0) return false;
  const Term *hit = nullptr;
  for (auto &t : c.expr.terms()) {
    if (!t.atom.uf) continue;
    bool m = false;
    for (auto &a : t.atom.args)
      if (a.mentions(v)) m = true;
    if (!m) continue;
    if (hit) return false;
    hit = &t;
  }
  if (!hit || (hit->coef != 1 && hit->coef != -1)) return false;
  // no nested use of v deeper than the single application
  AffineExpr rest = c.expr - AffineExpr::atom(hit->atom, hit->coef);
  if (rest.mentions(v)) return false;
  out.app = hit->atom;
  out.key = rest * (-hit->coef);
  return true;
}

bool implied(const std::vector<Formula> &ctx, const Constraint &c) {
  std::vector<Formula> q = ctx;
  q.push_back(Formula::neg(Formula::of(c)));
  SolverOptions o;
  o.nodeBudget = 2000;
  return solve(q, o).verdict == Verdict::Unsat;
}

} // namespace

ScanResult project_scan(const PresburgerSet &s, const std::vector<std::string> &order,
                        const ScanOptions &opt) {
  const Conjunct c = simplify(s.conjunct("project_scan"));
  if (!c.locals.empty())
    throw Error("scan", "existential variable '" + c.locals[0] + "' remains in the space");
  if (order.size() != s.tuple.size())
    throw Error("scan", "loop order must list every tuple variable exactly once");
  std::map<std::string, int> pos;
  for (size_t i = 0; i < order.size(); ++i) {
    if (!s.hasVar(order[i]))
      throw Error("scan", "loop order names unknown variable '" + order[i] + "'");
    if (!pos.emplace(order[i], (int)i).second)
      throw Error("scan", "loop order repeats '" + order[i] + "'");
  }

  ScanResult res;
  res.order = order;
  res.levels.resize(order.size());
  std::vector<Item> work;
  for (auto &k : c.constraints) work.push_back({k, false});

  for (int L = (int)order.size() - 1; L >= 0; --L) {
    const std::string &v = order[L];
    LevelScan &ls = res.levels[L];
    ls.var = v;
    std::vector<Item> here, rest;
    for (auto &it : work) (levelOf(it.c, pos) == L ? here : rest).push_back(it);
    work = rest;
    for (auto &it : here)
      if (!it.derived) ls.primary.push_back(it.c);

    // Degenerate loop: a unit equality on v.
    int assignIdx = -1;
    for (size_t k = 0; k < here.size() && assignIdx < 0; ++k) {
      auto &it = here[k];
      if (it.derived || it.c.kind != Constraint::EQ || !isBoundOn(it.c, v)) continue;
      int64_t a = it.c.expr.coeff(v);
      if (a == 1 || a == -1) assignIdx = (int)k;
    }
    if (assignIdx >= 0) {
      const Constraint &eq = here[assignIdx].c;
      int64_t a = eq.expr.coeff(v);
      ls.isAssign = true;
      ls.value = eq.expr.without(v) * (-a);
      std::map<std::string, AffineExpr> sub{{v, ls.value}};
      for (size_t k = 0; k < here.size(); ++k) {
        if ((int)k == assignIdx) continue;
        if (!here[k].derived) ls.conditions.push_back(here[k].c);
        Constraint d = here[k].c.substitute(sub);
        if (!d.isTautology()) work.push_back({d, true});
      }
      continue;
    }

    std::vector<Item> lowers, uppers;
    for (auto &it : here) {
      Constraint k = it.c;
      if (isBoundOn(k, v)) {
        std::vector<Constraint> parts;
        if (k.kind == Constraint::EQ) {
          parts.push_back(Constraint(k.expr, Constraint::GE));
          parts.push_back(Constraint(-k.expr, Constraint::GE));
        } else {
          parts.push_back(k);
        }
        for (auto &p : parts)
          (p.expr.coeff(v) > 0 ? lowers : uppers).push_back({p, it.derived});
        continue;
      }
      if (it.derived) continue;
      FindCond f;
      if (asFind(k, v, f))
        ls.finds.push_back(f);
      else
        ls.conditions.push_back(k);
    }
    // Derived bounds that carry UF terms only help when no primary bound exists.
    auto filter = [&](std::vector<Item> &bs) {
      bool primary = false;
      for (auto &b : bs)
        if (!b.derived) primary = true;
      std::vector<Item> keep;
      for (auto &b : bs)
        if (!b.derived || !b.c.expr.hasUf() || !primary) keep.push_back(b);
      bs = keep;
    };
    filter(lowers);
    filter(uppers);
    for (auto &lo : lowers) {
      int64_t a = lo.c.expr.coeff(v);
      ls.lower.push_back({lo.c.expr.without(v) * -1, a});
    }
    for (auto &up : uppers) {
      int64_t a = -up.c.expr.coeff(v);
      ls.upper.push_back({up.c.expr.without(v), a});
    }
    // Fourier-Motzkin step with UF applications of outer variables opaque.
    for (size_t i = 0; i < ls.lower.size(); ++i)
      for (size_t j = 0; j < ls.upper.size(); ++j) {
        auto &lb = ls.lower[i];
        auto &ub = ls.upper[j];
        Constraint d(ub.expr * lb.coef - lb.expr * ub.coef, Constraint::GE);
        if (!d.isTautology()) work.push_back({d, true});
      }
  }
  for (auto &it : work)
    if (!it.derived) res.preconditions.push_back(it.c);

  for (auto &ls : res.levels) {
    if (ls.isAssign) continue;
    if (ls.lower.empty() || ls.upper.empty())
      throw Error("scan", "illegal loop order: '" + ls.var + "' has no " +
                              (ls.lower.empty() ? "lower" : "upper") +
                              " bound from the variables outside it");
  }

  if (opt.pruneRedundant) {
    std::vector<Formula> ctx;
    for (auto &p : res.preconditions) ctx.push_back(Formula::of(p));
    for (auto &ls : res.levels) {
      AffineExpr v = AffineExpr::var(ls.var);
      auto pruneSide = [&](std::vector<Bound> &bs, bool lower) {
        for (size_t i = 0; bs.size() > 1 && i < bs.size();) {
          std::vector<Formula> q = ctx;
          for (size_t j = 0; j < bs.size(); ++j)
            if (j != i)
              q.push_back(Formula::of(lower ? Constraint::ge(v * bs[j].coef, bs[j].expr)
                                            : Constraint::le(v * bs[j].coef, bs[j].expr)));
          Constraint me = lower ? Constraint::ge(v * bs[i].coef, bs[i].expr)
                                : Constraint::le(v * bs[i].coef, bs[i].expr);
          if (implied(q, me))
            bs.erase(bs.begin() + i);
          else
            ++i;
        }
      };
      if (!ls.isAssign) {
        std::vector<Formula> withUp = ctx;
        for (auto &b : ls.upper) withUp.push_back(Formula::of(Constraint::le(v * b.coef, b.expr)));
        std::swap(ctx, withUp);
        pruneSide(ls.lower, true);
        std::swap(ctx, withUp);
        std::vector<Formula> withLo = ctx;
        for (auto &b : ls.lower) withLo.push_back(Formula::of(Constraint::ge(v * b.coef, b.expr)));
        std::swap(ctx, withLo);
        pruneSide(ls.upper, false);
        std::swap(ctx, withLo);
      }
      for (auto &k : ls.boundConstraints()) ctx.push_back(Formula::of(k));
      for (size_t i = 0; i < ls.conditions.size();) {
        if (implied(ctx, ls.conditions[i])) {
          ls.conditions.erase(ls.conditions.begin() + i);
        } else {
          ctx.push_back(Formula::of(ls.conditions[i]));
          ++i;
        }
      }
      for (auto &f : ls.finds) ctx.push_back(Formula::of(f.constraint()));
    }
  }
  return res;
}

} // namespace spf
