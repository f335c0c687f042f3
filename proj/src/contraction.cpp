#include "spf/contraction.hpp"

#include <algorithm>
#include <set>

#include "spf/error.hpp"
#include "spf/parse.hpp"

namespace spf {

std::vector<const TensorAccess *> ContractionExpr::tensors() const {
  std::vector<const TensorAccess *> r{&output};
  for (auto &t : inputs) r.push_back(&t);
  return r;
}

const TensorAccess *ContractionExpr::tensor(const std::string &name) const {
  for (auto *t : tensors())
    if (t->name == name) return t;
  return nullptr;
}

std::vector<std::string> ContractionExpr::indices() const {
  std::vector<std::string> r = freeIndices;
  r.insert(r.end(), contractionIndices.begin(), contractionIndices.end());
  return r;
}

namespace {
std::string accessStr(const TensorAccess &t) {
  std::string s = t.name + "(";
  for (size_t i = 0; i < t.indices.size(); ++i) s += (i ? "," : "") + t.indices[i];
  return s + ")";
}
} // namespace

std::string ContractionExpr::str() const {
  std::string s = accessStr(output) + " = ";
  for (size_t i = 0; i < inputs.size(); ++i) s += (i ? " * " : "") + accessStr(inputs[i]);
  return s;
}

ContractionExpr parse_contraction(const std::string &text) {
  Parser p(text, "contraction");
  auto access = [&](bool allowEmpty) {
    TensorAccess t;
    t.name = p.ident();
    if (t.name.find('.') != std::string::npos)
      p.fail("tensor name '" + t.name + "' may not contain '.'");
    if (!p.accept("(")) {
      if (allowEmpty) return t;
      p.fail("expected '(' after " + t.name);
    }
    if (!p.isSym(")")) {
      t.indices.push_back(p.ident());
      while (p.accept(",")) t.indices.push_back(p.ident());
    }
    p.expect(")");
    if (t.indices.empty() && !allowEmpty) p.fail("input tensor " + t.name + " has no indices");
    return t;
  };
  ContractionExpr e;
  e.output = access(true);
  p.expect("=");
  e.inputs.push_back(access(false));
  while (!p.atEnd()) {
    if (p.isSym("+") || p.isSym("-"))
      throw Error("contraction", "additions are not supported; only products of tensors");
    p.expect("*");
    e.inputs.push_back(access(false));
  }
  std::set<std::string> names{e.output.name};
  for (auto &t : e.inputs)
    if (!names.insert(t.name).second)
      throw Error("contraction", "tensor '" + t.name + "' appears more than once");
  std::set<std::string> inIdx;
  for (auto &t : e.inputs)
    for (auto &i : t.indices) {
      if (!inIdx.count(i) && std::find(e.output.indices.begin(), e.output.indices.end(), i) ==
                                 e.output.indices.end() &&
          std::find(e.contractionIndices.begin(), e.contractionIndices.end(), i) ==
              e.contractionIndices.end())
        e.contractionIndices.push_back(i);
      inIdx.insert(i);
    }
  for (auto &i : e.output.indices) {
    if (!inIdx.count(i))
      throw Error("contraction", "output index '" + i + "' does not appear in any input");
    if (std::find(e.freeIndices.begin(), e.freeIndices.end(), i) != e.freeIndices.end())
      throw Error("contraction", "output index '" + i + "' is repeated");
    e.freeIndices.push_back(i);
  }
  return e;
}

std::vector<AccessMap> access_maps(const ContractionExpr &e, const std::vector<std::string> &order) {
  std::vector<std::string> idx = order.empty() ? e.indices() : order;
  std::vector<VarId> in;
  for (auto &i : idx) in.push_back({i, VarKind::Computation});
  std::vector<AccessMap> out;
  for (auto *t : e.tensors()) {
    std::vector<VarId> g;
    for (size_t k = 0; k < t->indices.size(); ++k)
      g.push_back({"g_" + std::to_string(k), VarKind::Computation});
    AccessMap m{t->name, PresburgerRelation::universe(in, g)};
    for (size_t k = 0; k < t->indices.size(); ++k) {
      if (std::find(idx.begin(), idx.end(), t->indices[k]) == idx.end())
        throw Error("contraction", "order does not list index '" + t->indices[k] + "'");
      m.map.disjuncts[0].add(
          Constraint::eq(AffineExpr::var(g[k].name), AffineExpr::var(t->indices[k])));
    }
    out.push_back(m);
  }
  return out;
}

PresburgerSet dense_space(const ContractionExpr &e, const std::vector<Constraint> &bounds,
                          const std::vector<std::string> &order) {
  std::vector<std::string> idx = order.empty() ? e.indices() : order;
  std::vector<VarId> t;
  for (auto &i : idx) t.push_back({i, VarKind::Computation});
  PresburgerSet s = PresburgerSet::universe(t);
  for (auto &i : idx) {
    auto it = e.extents.find(i);
    if (it == e.extents.end()) continue;
    s.disjuncts[0].add(Constraint::ge(AffineExpr::var(i), 0));
    s.disjuncts[0].add(Constraint::lt(AffineExpr::var(i), it->second));
  }
  for (auto &c : bounds) s.disjuncts[0].add(c);
  return s;
}

} // namespace spf
