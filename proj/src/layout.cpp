#include "spf/layout.hpp"

#include <algorithm>
#include <sstream>

#include "spf/error.hpp"
#include "spf/parse.hpp"

namespace spf {

const char *flavorName(Flavor f) {
  switch (f) {
  case Flavor::Range: return "range";
  case Flavor::Injective: return "injectivity";
  case Flavor::Monotone: return "monotonicity";
  case Flavor::StrictMonotone: return "strict-monotonicity";
  case Flavor::Periodic: return "periodic-monotonicity";
  case Flavor::Covary: return "covary-monotonicity";
  case Flavor::Other: return "other";
  }
  return "?";
}

namespace {

std::string joinAtoms(const std::vector<Formula> &fs) {
  if (fs.empty()) return "true";
  std::string s;
  for (size_t i = 0; i < fs.size(); ++i) {
    if (i) s += " and ";
    s += fs[i].str();
  }
  return s;
}

bool isPrimed(const std::string &n) { return !n.empty() && n.back() == '\''; }
std::string unprime(const std::string &n) { return isPrimed(n) ? n.substr(0, n.size() - 1) : n; }

Formula fromComparison(const Comparison &c) {
  switch (c.op) {
  case RelOp::LT: return Formula::lt(c.lhs, c.rhs);
  case RelOp::LE: return Formula::le(c.lhs, c.rhs);
  case RelOp::EQ: return Formula::eq(c.lhs, c.rhs);
  case RelOp::NE: return Formula::ne(c.lhs, c.rhs);
  case RelOp::GE: return Formula::ge(c.lhs, c.rhs);
  case RelOp::GT: return Formula::gt(c.lhs, c.rhs);
  }
  return Formula::truth();
}

std::vector<Formula> atomList(Parser &p) {
  std::vector<Formula> out;
  if (p.acceptIdent("true")) return out;
  for (auto &c : p.conjunction()) {
    Formula f = fromComparison(c);
    if (f.kind != Formula::True) out.push_back(f);
  }
  return out;
}

std::vector<Formula> group(Parser &p) {
  if (p.accept("(")) {
    auto r = atomList(p);
    p.expect(")");
    return r;
  }
  return atomList(p);
}

} // namespace

std::string IndexArrayProperty::str() const {
  return uf + ": (" + joinAtoms(guard) + ") -> (" + joinAtoms(conclusion) + ")";
}

std::vector<Formula> instantiate_property(const IndexArrayProperty &prop,
                                          const std::map<std::string, AffineExpr> &inst1,
                                          const std::map<std::string, AffineExpr> &inst2) {
  auto one = [&](const std::map<std::string, AffineExpr> &x,
                 const std::map<std::string, AffineExpr> &y) {
    std::set<std::string> names;
    for (auto &f : prop.guard) f.collectVars(names);
    for (auto &f : prop.conclusion) f.collectVars(names);
    std::map<std::string, AffineExpr> sub;
    auto bind = [&](const std::string &n) {
      const auto &src = isPrimed(n) ? y : x;
      std::string base = unprime(n);
      if (base == "f") {
        auto it = src.find("a");
        if (it == src.end())
          throw Error("layout", "unbound placeholder 'a' instantiating " + prop.uf);
        sub[n] = AffineExpr::app(prop.uf, {it->second});
        return;
      }
      auto it = src.find(base);
      if (it == src.end())
        throw Error("layout", "unbound placeholder '" + n + "' instantiating " + prop.uf);
      sub[n] = it->second;
    };
    for (auto &n : names) bind(n);
    std::vector<Formula> g, c;
    for (auto &f : prop.guard) g.push_back(f.substitute(sub));
    for (auto &f : prop.conclusion) c.push_back(f.substitute(sub));
    return Formula::implies(Formula::conj(g), Formula::conj(c));
  };
  return {one(inst1, inst2), one(inst2, inst1)};
}

const FieldDecl *LayoutSpec::field(const std::string &n) const {
  for (auto &f : fields)
    if (f.name == n) return &f;
  return nullptr;
}

std::string LayoutSpec::valueArray() const {
  for (auto &f : fields)
    if (f.role == FieldDecl::Value) return f.name;
  return "";
}

std::vector<const IndexArrayProperty *> LayoutSpec::propertiesOf(const std::string &uf) const {
  std::vector<const IndexArrayProperty *> r;
  for (auto &p : properties)
    if (p.uf == uf) r.push_back(&p);
  return r;
}

void finalize_layout(LayoutSpec &l) {
  std::set<std::string> phys(l.physical.begin(), l.physical.end());
  // the argument each UF receives in the relation
  std::map<std::string, std::set<std::string>> argsOf;
  if (!l.relation.disjuncts.empty())
    for (auto &c : l.relation.disjuncts[0].constraints) {
      std::vector<Atom> apps;
      c.expr.collectApps(apps);
      for (auto &a : apps) {
        std::string key = a.args.size() == 1 ? a.args[0].str() : "";
        argsOf[a.name].insert(key);
      }
    }
  for (auto &p : l.properties) {
    const FieldDecl *fd = l.field(p.uf);
    if (!fd || fd->role != FieldDecl::Index)
      throw Error("layout", "property references unknown index array '" + p.uf + "'");
    p.canonicalArg.reset();
    auto it = argsOf.find(p.uf);
    if (it != argsOf.end() && it->second.size() == 1) {
      const std::string &arg = *it->second.begin();
      if (phys.count(arg)) p.canonicalArg = arg;
    }
    std::set<std::string> gv;
    std::vector<Atom> gapps;
    for (auto &f : p.guard) {
      f.collectVars(gv);
      f.collectApps(gapps);
    }
    p.guardsLayout = false;
    for (auto &v : gv)
      if (phys.count(unprime(v))) p.guardsLayout = true;
    std::set<std::string> all = gv;
    for (auto &f : p.conclusion) f.collectVars(all);
    for (auto &v : all) {
      std::string b = unprime(v);
      if (b != "a" && b != "f" && !phys.count(b) && !l.field(b))
        throw Error("layout", "property on " + p.uf + " mentions unknown name '" + v + "'");
    }
    AffineExpr aLt = AffineExpr::var("a'") - AffineExpr::var("a") - 1;
    bool hasALt = false;
    for (auto &f : p.guard)
      if (f.kind == Formula::Ge && f.expr == aLt) hasALt = true;
    AffineExpr fd1 = AffineExpr::var("f'") - AffineExpr::var("f");
    auto concl = [&](Formula::Kind k, const AffineExpr &e) {
      return p.conclusion.size() == 1 && p.conclusion[0].kind == k &&
             (p.conclusion[0].expr == e);
    };
    if (p.guard.empty()) {
      p.flavor = Flavor::Range;
    } else if (!gapps.empty()) {
      bool ok = hasALt && p.guard.size() == 2;
      for (auto &a : gapps)
        if (a.args.size() != 1) ok = false;
      if (!ok)
        throw Error("layout", "unsupported co-vary guard on " + p.uf +
                                  ": only 'a < a' and g(a) = g(a')' is understood");
      p.flavor = Flavor::Covary;
    } else if (p.guardsLayout) {
      p.flavor = Flavor::Periodic;
    } else if (hasALt && p.guard.size() == 1) {
      if (concl(Formula::Ne, fd1) || concl(Formula::Ne, -fd1))
        p.flavor = Flavor::Injective;
      else if (concl(Formula::Ge, fd1 - 1) || concl(Formula::Ge, -fd1 - 1))
        p.flavor = Flavor::StrictMonotone;
      else if (concl(Formula::Ge, fd1) || concl(Formula::Ge, -fd1))
        p.flavor = Flavor::Monotone;
      else
        p.flavor = Flavor::Other;
    } else {
      p.flavor = Flavor::Other;
    }
  }
}

namespace {

LayoutSpec parseOne(Parser &p) {
  LayoutSpec l;
  p.expectIdent("layout");
  l.name = p.ident();
  p.expect("{");
  std::vector<Constraint> rel;
  bool haveRel = false, haveValue = false;
  auto idList = [&]() {
    std::vector<std::string> v;
    v.push_back(p.ident());
    while (p.accept(",")) v.push_back(p.ident());
    p.expect(";");
    return v;
  };
  while (!p.accept("}")) {
    if (p.acceptIdent("physical")) {
      l.physical = idList();
    } else if (p.acceptIdent("logical")) {
      l.logical = idList();
    } else if (p.acceptIdent("arrays")) {
      do {
        FieldDecl f;
        f.name = p.ident();
        p.expect(":");
        std::string role = p.ident();
        if (role == "index")
          f.role = FieldDecl::Index;
        else if (role == "value")
          f.role = FieldDecl::Value;
        else
          p.fail("array role must be 'index' or 'value'");
        l.fields.push_back(f);
      } while (p.accept(","));
      p.expect(";");
    } else if (p.acceptIdent("scalar")) {
      for (auto &n : idList()) l.fields.push_back({n, FieldDecl::Scalar});
    } else if (p.acceptIdent("relation")) {
      p.expect("{");
      if (!p.isSym("}")) rel = p.constraints();
      p.expect("}");
      p.accept(";");
      haveRel = true;
    } else if (p.acceptIdent("value")) {
      l.value = parseExpr(p);
      p.expect(";");
      haveValue = true;
    } else if (p.acceptIdent("property")) {
      IndexArrayProperty prop;
      prop.uf = p.ident();
      p.expect(":");
      auto first = group(p);
      if (p.accept("->")) {
        prop.guard = first;
        prop.conclusion = group(p);
      } else {
        prop.conclusion = first;
      }
      p.expect(";");
      l.properties.push_back(prop);
    } else if (p.acceptIdent("dense")) {
      p.expect(";");
      l.dense = true;
    } else {
      p.fail("unknown layout item '" + p.peek().text + "'");
    }
  }
  p.accept(";");
  if (!haveRel && !l.dense) throw Error("layout", "layout " + l.name + " has no relation");
  if (!haveValue && !l.dense) throw Error("layout", "layout " + l.name + " has no value expression");

  std::set<std::string> known;
  for (auto &n : l.physical) known.insert(n);
  for (auto &n : l.logical) {
    if (known.count(n))
      throw Error("layout", "'" + n + "' is both physical and logical in " + l.name);
    known.insert(n);
  }
  for (auto &f : l.fields) known.insert(f.name);
  for (auto &c : rel) {
    std::vector<Atom> apps;
    c.expr.collectApps(apps);
    for (auto &a : apps) {
      const FieldDecl *fd = l.field(a.name);
      if (!fd || fd->role != FieldDecl::Index)
        throw Error("layout", "'" + a.name + "' is used as an index array but not declared");
    }
    for (auto &v : c.expr.vars())
      if (!known.count(v))
        throw Error("layout", "unknown name '" + v + "' in relation of " + l.name);
  }
  for (auto &g : l.logical) {
    bool defined = false;
    for (auto &c : rel)
      if (c.kind == Constraint::EQ && (c.expr.coeff(g) == 1 || c.expr.coeff(g) == -1))
        defined = true;
    if (!defined)
      throw Error("layout", "logical '" + g + "' of " + l.name + " is not defined by an equality");
  }
  std::vector<VarId> in, out;
  for (auto &n : l.physical) in.push_back({n, VarKind::Layout});
  for (auto &n : l.logical) out.push_back({n, VarKind::Computation});
  l.relation = PresburgerRelation::universe(in, out);
  for (auto &c : rel) l.relation.disjuncts[0].add(c);
  if (haveValue) {
    std::set<std::string> vs, arrs;
    l.value.collectVars(vs);
    l.value.collectArrays(arrs);
    for (auto &v : vs)
      if (std::find(l.physical.begin(), l.physical.end(), v) == l.physical.end()) {
        const FieldDecl *fd = l.field(v);
        if (!fd || fd->role != FieldDecl::Scalar)
          throw Error("layout", "value expression of " + l.name + " uses '" + v + "'");
      }
    for (auto &a : arrs)
      if (!l.field(a)) throw Error("layout", "value expression reads undeclared '" + a + "'");
  }
  finalize_layout(l);
  return l;
}

} // namespace

std::vector<LayoutSpec> parse_layouts(const std::string &text) {
  Parser p(text, "layout");
  std::vector<LayoutSpec> out;
  while (!p.atEnd()) out.push_back(parseOne(p));
  return out;
}

LayoutSpec parse_layout(const std::string &text) {
  auto v = parse_layouts(text);
  if (v.size() != 1) throw Error("layout", "expected exactly one layout");
  return v[0];
}

IndexArrayProperty parse_property(const std::string &text) {
  Parser p(text, "property");
  IndexArrayProperty prop;
  prop.uf = p.ident();
  p.expect(":");
  auto first = group(p);
  if (p.accept("->")) {
    prop.guard = first;
    prop.conclusion = group(p);
  } else {
    prop.conclusion = first;
  }
  p.accept(";");
  if (!p.atEnd()) p.fail("trailing input");
  LayoutSpec l;
  l.fields.push_back({prop.uf, FieldDecl::Index});
  l.properties.push_back(prop);
  finalize_layout(l);
  return l.properties[0];
}

std::string print_layout(const LayoutSpec &l) {
  std::ostringstream os;
  auto list = [&](const std::vector<std::string> &v) {
    for (size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  };
  os << "layout " << l.name << " {\n";
  if (!l.physical.empty()) {
    os << "  physical ";
    list(l.physical);
    os << ";\n";
  }
  os << "  logical ";
  list(l.logical);
  os << ";\n";
  std::vector<std::string> scalars;
  std::string sep;
  bool anyArr = false;
  for (auto &f : l.fields) {
    if (f.role == FieldDecl::Scalar) {
      scalars.push_back(f.name);
      continue;
    }
    if (!anyArr) os << "  arrays ";
    os << sep << f.name << ": " << (f.role == FieldDecl::Index ? "index" : "value");
    sep = ", ";
    anyArr = true;
  }
  if (anyArr) os << ";\n";
  if (!scalars.empty()) {
    os << "  scalar ";
    list(scalars);
    os << ";\n";
  }
  if (l.dense) {
    os << "  dense;\n";
  } else {
    os << "  relation { ";
    auto &cs = l.relation.disjuncts.at(0).constraints;
    for (size_t i = 0; i < cs.size(); ++i) os << (i ? " and " : "") << cs[i].str();
    os << " };\n";
    os << "  value " << l.value.c() << ";\n";
  }
  for (auto &p : l.properties) os << "  property " << p.str() << ";\n";
  os << "}\n";
  return os.str();
}

} // namespace spf
