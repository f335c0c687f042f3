#include "spf/compose.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "spf/error.hpp"
#include "spf/parse.hpp"

namespace spf {

std::vector<std::string> BoundLayout::ownPhysical() const {
  std::vector<std::string> r;
  std::string prefix = "p" + tensor;
  for (auto &p : spec.physical)
    if (p.rfind(prefix, 0) == 0) r.push_back(p);
  return r;
}

ShareDecl parse_share(const std::string &text) {
  Parser p(text, "share");
  ShareDecl d;
  std::string pair = p.ident();
  auto dot = pair.find('.');
  if (dot == std::string::npos) p.fail("expected FROM.TO=levels:N");
  d.from = pair.substr(0, dot);
  d.to = pair.substr(dot + 1);
  p.expect("=");
  p.expectIdent("levels");
  p.expect(":");
  d.levels = (int)p.integer();
  if (!p.atEnd()) p.fail("trailing input");
  if (d.levels < 1) throw Error("share", "levels must be positive");
  return d;
}

namespace {

std::string qualifyPhysical(const std::string &tensor, const std::string &p, bool single) {
  if (single) return "p" + tensor;
  std::string suffix = p.rfind("p_", 0) == 0 ? p.substr(2) : p;
  return "p" + tensor + "_" + suffix;
}

} // namespace

BoundLayout bind(const std::string &tensor, const LayoutSpec &spec, const BoundLayout *shareWith,
                 int levels) {
  BoundLayout b;
  b.tensor = tensor;
  b.spec = spec;
  if (spec.dense) {
    if (shareWith) throw Error("compose", "dense tensor " + tensor + " cannot share structure");
    return b;
  }
  std::set<std::string> sharedPhys;
  if (shareWith) {
    if (levels > (int)spec.physical.size() || levels > (int)shareWith->spec.physical.size())
      throw Error("compose", "cannot share " + std::to_string(levels) + " levels between " +
                                 shareWith->tensor + " and " + tensor);
    b.sharedWith = shareWith->tensor;
    for (int l = 0; l < levels; ++l) {
      const std::string &p = spec.physical[l];
      auto it = shareWith->rename.find(p);
      if (it == shareWith->rename.end())
        throw Error("compose", "layout of " + shareWith->tensor + " has no level variable '" +
                                   p + "' to share");
      b.rename[p] = it->second;
      sharedPhys.insert(p);
    }
  }
  bool single = spec.physical.size() == 1;
  for (auto &p : spec.physical)
    if (!b.rename.count(p)) b.rename[p] = qualifyPhysical(tensor, p, single);

  const auto &cs = spec.relation.disjuncts.at(0).constraints;
  for (auto &f : spec.fields) {
    bool shared = false;
    if (shareWith && f.role != FieldDecl::Value && shareWith->spec.field(shareWith->rename.count(f.name) ? shareWith->rename.at(f.name) : "")) {
      bool used = false, onlyShared = true;
      for (auto &c : cs) {
        bool mentions = false;
        std::vector<Atom> apps;
        c.expr.collectApps(apps);
        for (auto &a : apps)
          if (a.name == f.name) mentions = true;
        if (c.expr.mentions(f.name)) mentions = true;
        if (!mentions) continue;
        used = true;
        for (auto &v : c.expr.vars())
          if (std::find(spec.physical.begin(), spec.physical.end(), v) != spec.physical.end() &&
              !sharedPhys.count(v))
            onlyShared = false;
      }
      shared = used && onlyShared;
    }
    b.rename[f.name] = shared ? shareWith->rename.at(f.name) : tensor + "." + f.name;
  }

  std::map<std::string, std::string> vars, ufs, arrays;
  for (auto &p : spec.physical) {
    vars[p] = b.rename[p];
    vars[p + "'"] = b.rename[p] + "'";
  }
  for (auto &f : spec.fields) {
    if (f.role == FieldDecl::Scalar) vars[f.name] = b.rename[f.name];
    if (f.role == FieldDecl::Index) ufs[f.name] = b.rename[f.name];
    if (f.role != FieldDecl::Scalar) arrays[f.name] = b.rename[f.name];
  }
  LayoutSpec &s = b.spec;
  for (auto &p : s.physical) p = b.rename[p];
  for (auto &v : s.relation.input) {
    v.name = b.rename[v.name];
    v.kind = VarKind::Layout;
  }
  for (auto &d : s.relation.disjuncts) d = d.renameVars(vars).renameUfs(ufs);
  s.value = s.value.renamed(vars, arrays);
  for (auto &f : s.fields) f.name = b.rename[f.name];
  for (auto &p : s.properties) {
    p.uf = b.rename[p.uf];
    for (auto &g : p.guard) g = g.renameVars(vars).renameUfs(ufs);
    for (auto &c : p.conclusion) c = c.renameVars(vars).renameUfs(ufs);
    if (p.canonicalArg) p.canonicalArg = b.rename[*p.canonicalArg];
  }
  return b;
}

PresburgerRelation layout_to_computation(const BoundLayout &b, const AccessMap &a) {
  if (a.map.output.size() != b.spec.logical.size())
    throw Error("compose", "tensor " + b.tensor + " has order " +
                               std::to_string(a.map.output.size()) + " but layout " +
                               b.spec.name + " has " + std::to_string(b.spec.logical.size()) +
                               " logical dimensions");
  return compose(inverse(a.map), b.spec.relation);
}

const BoundLayout *ExtendedIterationSpace::layoutOf(const std::string &tensor) const {
  for (auto &l : layouts)
    if (l.tensor == tensor) return &l;
  return nullptr;
}

std::vector<AffineExpr> ExtendedIterationSpace::coordinates(const std::string &tensor) const {
  std::vector<AffineExpr> r;
  if (!expr) return r;
  const TensorAccess *t = expr->tensor(tensor);
  if (!t) throw Error("compose", "unknown tensor '" + tensor + "'");
  for (auto &i : t->indices) r.push_back(AffineExpr::var(i));
  return r;
}

Expr ExtendedIterationSpace::valueAccess(const std::string &tensor) const {
  const BoundLayout *b = layoutOf(tensor);
  if (!b) throw Error("compose", "no layout bound for '" + tensor + "'");
  if (!b->dense()) return b->spec.value;
  const TensorAccess *t = expr->tensor(tensor);
  if (t->indices.empty()) return Expr::load(tensor, Expr::cnst(0));
  Expr idx = Expr::var(t->indices[0]);
  for (size_t k = 1; k < t->indices.size(); ++k)
    idx = idx * Expr::var(tensor + ".dim" + std::to_string(k)) + Expr::var(t->indices[k]);
  return Expr::load(tensor, idx);
}

std::vector<std::string> ExtendedIterationSpace::layoutVars() const {
  std::vector<std::string> r;
  for (auto &v : space.tuple)
    if (v.kind == VarKind::Layout) r.push_back(v.name);
  return r;
}

std::vector<std::string> ExtendedIterationSpace::computationVars() const {
  std::vector<std::string> r;
  for (auto &v : space.tuple)
    if (v.kind != VarKind::Layout) r.push_back(v.name);
  return r;
}

bool ExtendedIterationSpace::isComputation(const std::string &v) const {
  const VarId *x = space.findVar(v);
  return x && x->kind != VarKind::Layout;
}

std::string ExtendedIterationSpace::str() const {
  std::ostringstream os;
  os << space.str() << "\norder: ";
  for (size_t i = 0; i < order.size(); ++i) os << (i ? ", " : "") << order[i];
  os << "\n";
  return os.str();
}

namespace {

/// Physical variables of `b` in the equality defining logical position k.
std::vector<std::string> definers(const BoundLayout &b, size_t k) {
  const std::string &g = b.spec.logical.at(k);
  std::vector<std::string> r;
  for (auto &c : b.spec.relation.disjuncts.at(0).constraints) {
    if (c.kind != Constraint::EQ) continue;
    int64_t a = c.expr.coeff(g);
    if (a != 1 && a != -1) continue;
    for (auto &p : b.spec.physical)
      if (c.expr.mentions(p)) r.push_back(p);
    return r;
  }
  return r;
}

std::vector<std::string> defaultOrder(const ContractionExpr &e,
                                      const std::vector<BoundLayout> &layouts,
                                      const std::vector<std::string> &compOrder) {
  std::vector<std::string> order;
  std::set<std::string> placed;
  auto place = [&](const std::string &v) {
    if (placed.insert(v).second) order.push_back(v);
  };
  std::vector<const BoundLayout *> sparse;
  for (auto &t : e.inputs)
    for (auto &b : layouts)
      if (b.tensor == t.name && !b.dense()) sparse.push_back(&b);
  for (auto &b : layouts)
    if (b.tensor == e.output.name && !b.dense()) sparse.push_back(&b);

  if (compOrder.empty()) {
    for (auto *b : sparse) {
      const TensorAccess *t = e.tensor(b->tensor);
      for (auto &p : b->spec.physical) {
        place(p);
        for (size_t k = 0; k < t->indices.size(); ++k) {
          if (placed.count(t->indices[k])) continue;
          auto ds = definers(*b, k);
          bool ready = std::all_of(ds.begin(), ds.end(),
                                   [&](const std::string &d) { return placed.count(d) > 0; });
          if (ready) place(t->indices[k]);
        }
      }
    }
    for (auto &c : e.indices()) place(c);
    return order;
  }
  for (auto &c : compOrder) {
    if (placed.count(c)) continue;
    for (auto *b : sparse) {
      const TensorAccess *t = e.tensor(b->tensor);
      auto it = std::find(t->indices.begin(), t->indices.end(), c);
      if (it == t->indices.end()) continue;
      auto ds = definers(*b, it - t->indices.begin());
      size_t last = 0;
      for (size_t i = 0; i < b->spec.physical.size(); ++i)
        if (std::find(ds.begin(), ds.end(), b->spec.physical[i]) != ds.end()) last = i + 1;
      for (size_t i = 0; i < last; ++i) place(b->spec.physical[i]);
      break;
    }
    place(c);
  }
  for (auto *b : sparse)
    for (auto &p : b->spec.physical) place(p);
  return order;
}

} // namespace

ExtendedIterationSpace combine(const ContractionExpr &e, std::vector<BoundLayout> layouts,
                               const std::vector<std::string> &order,
                               const std::vector<Constraint> &bounds) {
  ExtendedIterationSpace is;
  is.expr = e;
  for (auto *t : e.tensors()) {
    auto it = std::find_if(layouts.begin(), layouts.end(),
                           [&](const BoundLayout &b) { return b.tensor == t->name; });
    if (it == layouts.end()) throw Error("compose", "tensor " + t->name + " has no layout");
    is.layouts.push_back(*it);
  }
  for (auto &b : layouts)
    if (!e.tensor(b.tensor))
      throw Error("compose", "layout given for unknown tensor '" + b.tensor + "'");

  const BoundLayout &out = is.layouts[0];
  if (!out.dense()) {
    for (auto &f : out.spec.fields)
      if (f.role == FieldDecl::Index && f.name.rfind(out.tensor + ".", 0) == 0)
        throw Error("compose", "sparse output " + out.tensor +
                                   " must share its index arrays with an input (--share)");
  }

  auto maps = access_maps(e);
  std::vector<Constraint> all = bounds;
  std::set<std::string> sparseIdx;
  std::optional<PresburgerSet> acc;
  for (size_t n = 0; n < is.layouts.size(); ++n) {
    const BoundLayout &b = is.layouts[n];
    if (b.dense()) {
      const TensorAccess *t = e.tensor(b.tensor);
      if (!b.spec.logical.empty() && b.spec.logical.size() != t->indices.size())
        throw Error("compose", "tensor " + b.tensor + " has order " +
                                   std::to_string(t->indices.size()) +
                                   " but its dense layout has " +
                                   std::to_string(b.spec.logical.size()));
      continue;
    }
    PresburgerSet r = range_keep(layout_to_computation(b, maps[n]));
    acc = acc ? intersect(*acc, r) : r;
    for (auto &i : e.tensor(b.tensor)->indices) sparseIdx.insert(i);
  }
  for (auto &c : e.indices()) {
    if (sparseIdx.count(c) || e.extents.count(c)) continue;
    bool done = false;
    for (size_t n = 1; n <= is.layouts.size() && !done; ++n) {
      const BoundLayout &b = is.layouts[n % is.layouts.size()];
      const TensorAccess *t = e.tensor(b.tensor);
      for (size_t k = 0; k < t->indices.size() && !done; ++k)
        if (t->indices[k] == c) {
          all.push_back(Constraint::ge(AffineExpr::var(c), 0));
          all.push_back(Constraint::lt(AffineExpr::var(c),
                                       AffineExpr::var(b.tensor + ".dim" + std::to_string(k))));
          done = true;
        }
    }
  }
  PresburgerSet dense = dense_space(e, all);
  PresburgerSet s = acc ? intersect(*acc, dense) : dense;

  std::vector<std::string> tupleOrder;
  for (auto &v : s.tuple)
    if (v.kind == VarKind::Layout) tupleOrder.push_back(v.name);
  for (auto &v : s.tuple)
    if (v.kind != VarKind::Layout) tupleOrder.push_back(v.name);
  is.space = reorder(s, tupleOrder);

  auto compList = e.indices();
  std::set<std::string> comp(compList.begin(), compList.end());
  bool compOnly = !order.empty() && std::all_of(order.begin(), order.end(), [&](auto &v) {
    return comp.count(v) > 0;
  });
  if (order.empty() || (compOnly && order.size() < tupleOrder.size())) {
    if (compOnly && order.size() != comp.size())
      throw Error("compose", "order must list every computation index or every variable");
    is.order = defaultOrder(e, is.layouts, compOnly ? order : std::vector<std::string>{});
  } else {
    is.order = order;
  }
  std::set<std::string> want(tupleOrder.begin(), tupleOrder.end());
  std::set<std::string> got(is.order.begin(), is.order.end());
  if (want != got || got.size() != is.order.size()) {
    std::string list;
    for (auto &v : tupleOrder) list += (list.empty() ? "" : ",") + v;
    throw Error("compose", "loop order must be a permutation of " + list);
  }

  std::set<std::string> seen;
  for (auto &b : is.layouts)
    for (auto &p : b.spec.properties)
      if (seen.insert(p.str()).second) is.properties.push_back(p);
  return is;
}

} // namespace spf

namespace spf {

std::vector<std::string> settle_order(const ExtendedIterationSpace &is,
                                      const std::vector<std::string> &seq) {
  if (!is.expr) return seq;
  const ContractionExpr &e = *is.expr;
  // alternative definer sets per computation index
  std::map<std::string, std::vector<std::vector<std::string>>> defs;
  for (auto &b : is.layouts) {
    if (b.dense()) continue;
    const TensorAccess *t = e.tensor(b.tensor);
    for (size_t k = 0; k < t->indices.size(); ++k) defs[t->indices[k]].push_back(definers(b, k));
  }
  std::vector<std::string> out;
  std::set<std::string> placed;
  auto ready = [&](const std::string &c) {
    for (auto &ds : defs[c])
      if (std::all_of(ds.begin(), ds.end(), [&](auto &d) { return placed.count(d) > 0; }))
        return true;
    return false;
  };
  auto waits = [&](const std::string &v) {
    return is.isComputation(v) && defs.count(v) && !ready(v);
  };
  auto flush = [&]() {
    for (bool again = true; again;) {
      again = false;
      for (auto &c : seq)
        if (!placed.count(c) && is.isComputation(c) && defs.count(c) && ready(c)) {
          placed.insert(c);
          out.push_back(c);
          again = true;
        }
    }
  };
  flush();
  for (auto &v : seq) {
    if (placed.count(v) || waits(v)) continue;
    placed.insert(v);
    out.push_back(v);
    flush();
  }
  for (auto &v : seq)
    if (!placed.count(v)) out.push_back(v);
  return out;
}

} // namespace spf
