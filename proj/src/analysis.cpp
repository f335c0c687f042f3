#include "spf/analysis.hpp"

#include <algorithm>
#include <set>

#include "spf/error.hpp"
#include "spf/solver.hpp"
#include "spf/synth.hpp"

namespace spf {

const char *tagName(LoopTag t) {
  switch (t) {
  case LoopTag::None: return "none";
  case LoopTag::Parallel: return "parallel";
  case LoopTag::Reduction: return "reduction";
  case LoopTag::Serial: return "serial";
  }
  return "?";
}

std::vector<LoopTag> mark_parallel(const ExtendedIterationSpace &is, const ScanResult &scan,
                                   int nodeBudget) {
  std::vector<LoopTag> tags(scan.levels.size(), LoopTag::None);
  const auto &cs = is.space.conjunct("mark_parallel").constraints;
  auto pr = prime_map(is);
  std::vector<Formula> base;
  for (auto &c : cs) {
    base.push_back(Formula::of(c));
    base.push_back(Formula::of(c.substitute(pr)));
  }
  for (auto &f : pair_properties(is, cs)) base.push_back(f);
  auto same = [&](const std::string &v) {
    return Formula::eq(AffineExpr::var(v), AffineExpr::var(v).substitute(pr));
  };
  if (is.expr)
    for (auto &i : is.expr->output.indices) base.push_back(same(i));
  SolverOptions so;
  so.nodeBudget = nodeBudget;
  auto verdict = [&](const std::vector<Formula> &fs) {
    try {
      return solve(fs, so).verdict;
    } catch (const Error &) {
      return Verdict::Unknown;
    }
  };

  std::vector<Formula> outer;
  for (size_t L = 0; L < scan.levels.size(); ++L) {
    const LevelScan &lv = scan.levels[L];
    if (lv.isAssign) continue;
    if (!is.expr) {
      // opaque statement: writes unknown
      tags[L] = LoopTag::Serial;
      continue;
    }
    std::vector<Formula> fs = base;
    fs.insert(fs.end(), outer.begin(), outer.end());
    fs.push_back(Formula::lt(AffineExpr::var(lv.var), AffineExpr::var(lv.var).substitute(pr)));
    Verdict v = verdict(fs);
    if (v == Verdict::Unsat) {
      tags[L] = LoopTag::Parallel;
    } else if (v == Verdict::Sat) {
      for (auto &c : is.expr->contractionIndices) fs.push_back(same(c));
      tags[L] = verdict(fs) == Verdict::Unsat ? LoopTag::Reduction : LoopTag::Serial;
    } else {
      tags[L] = LoopTag::Serial;
    }
    outer.push_back(same(lv.var));
  }
  return tags;
}

Transformation tile_transform(const ExtendedIterationSpace &is, const std::string &var,
                              int64_t size) {
  if (size < 1) throw Error("transform", "tile size must be positive");
  if (!is.space.hasVar(var)) throw Error("transform", "cannot tile unknown variable '" + var + "'");
  std::set<std::string> taken;
  for (auto &v : is.space.tuple) taken.insert(v.name);
  for (auto &p : is.space.parameters()) taken.insert(p);
  std::string tv = freshName("t" + var, taken);
  Transformation t;
  t.name = "tile " + var + " by " + std::to_string(size);
  t.relation.input = is.space.tuple;
  Conjunct c;
  for (auto &v : is.space.tuple) {
    VarId o{v.name + "#o", v.kind};
    if (v.name == var) {
      t.relation.output.push_back({tv + "#o", VarKind::Computation});
      AffineExpr x = AffineExpr::var(o.name), tx = AffineExpr::var(tv + "#o");
      c.add(Constraint::ge(x, tx * size));
      c.add(Constraint::le(x, tx * size + (size - 1)));
    }
    t.relation.output.push_back(o);
    c.add(Constraint::eq(AffineExpr::var(o.name), AffineExpr::var(v.name)));
  }
  t.relation.disjuncts.push_back(c);
  for (auto &v : is.order) {
    if (v == var) t.order.push_back(tv);
    t.order.push_back(v);
  }
  return t;
}

ExtendedIterationSpace apply_transform(const ExtendedIterationSpace &is, const Transformation &t) {
  PresburgerSet img = apply(is.space, t.relation);
  // strip the output marker used to keep the two tuples apart
  std::map<std::string, std::string> back;
  for (auto &v : img.tuple) {
    std::string n = v.name;
    if (n.size() > 2 && n.compare(n.size() - 2, 2, "#o") == 0) n = n.substr(0, n.size() - 2);
    back[v.name] = n;
    v.name = n;
  }
  for (auto &d : img.disjuncts) d = d.renameVars(back);
  ExtendedIterationSpace r = is;
  r.space = img;
  r.order = t.order;
  std::set<std::string> want, got(r.order.begin(), r.order.end());
  for (auto &v : img.tuple) want.insert(v.name);
  if (want != got) throw Error("transform", t.name + ": order does not match the new tuple");
  return r;
}

ExtendedIterationSpace permute(const ExtendedIterationSpace &is,
                               const std::vector<std::string> &vars) {
  std::vector<size_t> slots;
  std::set<std::string> seen;
  for (auto &v : vars) {
    auto it = std::find(is.order.begin(), is.order.end(), v);
    if (it == is.order.end()) throw Error("transform", "cannot permute unknown loop '" + v + "'");
    if (!seen.insert(v).second) throw Error("transform", "loop '" + v + "' listed twice");
    slots.push_back(it - is.order.begin());
  }
  std::sort(slots.begin(), slots.end());
  std::vector<std::string> seq = is.order;
  for (size_t k = 0; k < slots.size(); ++k) seq[slots[k]] = vars[k];
  ExtendedIterationSpace r = is;
  r.order = settle_order(is, seq);
  return r;
}

std::optional<TileGuard> tile_guard(const ExtendedIterationSpace &is, const ScanResult &scan,
                                    const std::string &tileVar) {
  int lt = scan.position(tileVar);
  if (lt < 0) return std::nullopt;
  for (size_t k = lt + 1; k < scan.levels.size(); ++k) {
    const LevelScan &lv = scan.levels[k];
    if (lv.isAssign || lv.finds.empty()) continue;
    bool tiled = false;
    for (auto &b : lv.lower) tiled |= b.expr.mentions(tileVar);
    for (auto &b : lv.upper) tiled |= b.expr.mentions(tileVar);
    if (!tiled) continue;
    for (auto &fc : lv.finds) {
      if (fc.app.args.size() != 1 || fc.app.args[0] != AffineExpr::var(lv.var)) continue;
      bool invariant = true;
      for (auto &v : fc.key.vars())
        if (scan.position(v) >= lt) invariant = false;
      if (!invariant) continue;
      const IndexArrayProperty *mono = nullptr;
      for (auto &p : is.properties)
        if (p.uf == fc.app.name && !p.guardsLayout &&
            (p.flavor == Flavor::Monotone || p.flavor == Flavor::StrictMonotone))
          mono = &p;
      if (!mono) continue;
      bool increasing = mono->conclusion[0].expr.coeff("f'") > 0;
      std::vector<Expr> los, his;
      for (auto &b : lv.lower)
        los.push_back(b.coef == 1 ? Expr::fromAffine(b.expr)
                                  : Expr::bin(Expr::CeilDiv, Expr::fromAffine(b.expr),
                                              Expr::cnst(b.coef)));
      for (auto &b : lv.upper)
        his.push_back(b.coef == 1 ? Expr::fromAffine(b.expr + 1)
                                  : Expr::bin(Expr::FloorDiv, Expr::fromAffine(b.expr),
                                              Expr::cnst(b.coef)) +
                                        Expr::cnst(1));
      Expr lo = Expr::maxOf(los), hi = Expr::minOf(his) - Expr::cnst(1);
      Expr key = Expr::fromAffine(fc.key);
      Expr flo = Expr::load(fc.app.name, lo), fhi = Expr::load(fc.app.name, hi);
      TileGuard g;
      g.tileVar = tileVar;
      g.pointVar = lv.var;
      if (increasing)
        g.conds = {Expr::bin(Expr::Le, flo, key), Expr::bin(Expr::Ge, fhi, key)};
      else
        g.conds = {Expr::bin(Expr::Ge, flo, key), Expr::bin(Expr::Le, fhi, key)};
      return g;
    }
  }
  return std::nullopt;
}

} // namespace spf
