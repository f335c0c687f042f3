#include "spf/ast.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "spf/error.hpp"

namespace spf {

Node Node::block(std::vector<Node> body) {
  Node n;
  n.kind = Block;
  n.body = std::move(body);
  return n;
}

Node Node::assign(const std::string &var, Expr value, bool declare) {
  Node n;
  n.kind = Assign;
  n.var = var;
  n.value = std::move(value);
  n.declare = declare;
  return n;
}

Node Node::ifThen(Expr cond, std::vector<Node> body) {
  Node n;
  n.kind = If;
  n.cond = std::move(cond);
  n.body = std::move(body);
  return n;
}

namespace {

Node simple(Node::Kind k, const std::string &var, int step = 1) {
  Node n;
  n.kind = k;
  n.var = var;
  n.step = step;
  return n;
}

/// Positive terms on the left, negative ones on the right.
Expr constraintExpr(const Constraint &c) {
  AffineExpr pos, neg;
  for (auto &t : c.expr.terms()) {
    if (t.coef > 0) pos += AffineExpr::atom(t.atom, t.coef);
    else neg += AffineExpr::atom(t.atom, -t.coef);
  }
  if (c.expr.constant() > 0) pos += AffineExpr(c.expr.constant());
  else neg += AffineExpr(-c.expr.constant());
  return Expr::bin(c.kind == Constraint::EQ ? Expr::Eq : Expr::Ge, Expr::fromAffine(pos),
                   Expr::fromAffine(neg));
}

Expr findApp(const FindCond &f) { return Expr::fromAffine(AffineExpr::atom(f.app)); }

/// key == F[var], or F[var] == key when the key is loop invariant.
Expr findEq(const FindCond &f, const ScanResult &scan) {
  bool invariant = true;
  for (auto &v : f.key.vars())
    if (scan.position(v) >= 0) invariant = false;
  if (invariant) return Expr::bin(Expr::Eq, findApp(f), Expr::fromAffine(f.key));
  return Expr::bin(Expr::Eq, Expr::fromAffine(f.key), findApp(f));
}

Expr lowerExpr(const LevelScan &l) {
  std::vector<Expr> xs;
  for (auto &b : l.lower) {
    Expr e = Expr::fromAffine(b.expr);
    xs.push_back(b.coef == 1 ? e : Expr::bin(Expr::CeilDiv, e, Expr::cnst(b.coef)));
  }
  return Expr::maxOf(xs);
}

Expr upperCond(const LevelScan &l) {
  Expr v = Expr::var(l.var);
  bool unit = std::all_of(l.upper.begin(), l.upper.end(), [](const Bound &b) { return b.coef == 1; });
  if (unit) {
    std::vector<Expr> xs;
    for (auto &b : l.upper) xs.push_back(Expr::fromAffine(b.expr + AffineExpr(1)));
    return Expr::bin(Expr::Lt, v, Expr::minOf(xs));
  }
  std::vector<Expr> cs;
  for (auto &b : l.upper)
    cs.push_back(Expr::bin(Expr::Lt, b.coef == 1 ? v : Expr::bin(Expr::Mul, Expr::cnst(b.coef), v),
                           Expr::fromAffine(b.expr + AffineExpr(1))));
  return Expr::all(cs);
}

} // namespace

namespace {

struct Builder {
  const ExtendedIterationSpace &is;
  const ScanResult &scan;
  const std::vector<FindPlan> &plans;
  const std::vector<LoopTag> &tags;
  const AstOptions &opt;
  int pragmaLevel = -1;
  std::string reductionClause;

  static std::string stateName(const FindPlan &p) { return p.multi ? "s_" + p.var : p.var; }
  static std::string hashName(const FindPlan &p) { return "hash_" + p.var; }
  static std::string chainName(const FindPlan &p) { return "next_" + p.var; }

  /// var < hi + 1 (increasing) or var >= lo.
  static Expr inRange(const FindPlan &p, const std::string &v) {
    if (p.dir == Direction::Increasing)
      return Expr::bin(Expr::Lt, Expr::var(v), Expr::fromAffine(p.hi + AffineExpr(1)));
    return Expr::bin(Expr::Ge, Expr::var(v), Expr::fromAffine(p.lo));
  }

  /// Stop condition with find(var) read at position `v`.
  static Expr stopAt(const FindPlan &p, const std::string &v) {
    Expr f = findApp(p.find).substitute({{p.var, Expr::var(v)}});
    return Expr::bin(p.stopGreater ? Expr::Gt : Expr::Lt, Expr::fromAffine(p.find.key), f);
  }

  Expr eqAt(const FindPlan &p, const std::string &v) {
    return findEq(p.find, scan).substitute({{p.var, Expr::var(v)}});
  }

  Node statement() const {
    if (!is.expr) return simple(Node::Call, is.statement.empty() ? "S0" : is.statement);
    Node n;
    n.kind = Node::Accumulate;
    n.target = is.valueAccess(is.expr->output.name);
    n.scalarTarget = is.expr->output.indices.empty();
    for (auto &in : is.expr->inputs) n.factors.push_back(is.valueAccess(in.name));
    return n;
  }

  std::vector<Node> level(int k) {
    std::vector<Node> out;
    std::vector<std::string> built;
    for (auto &p : plans)
      if (p.tmpl == FindTemplate::HashMap && p.initLevel == k) {
        Node h = simple(Node::HashBuild, hashName(p));
        h.pos = p.var;
        h.lo = Expr::fromAffine(p.lo);
        h.hi = Expr::fromAffine(p.hi + AffineExpr(1));
        h.value = Expr::fromAffine(p.hi - p.lo + AffineExpr(1));
        h.key = findApp(p.find);
        if (p.multi) h.next = chainName(p);
        out.push_back(h);
        built.push_back(h.var);
      }
    for (auto &p : plans)
      if (p.tmpl == FindTemplate::SeqIter && p.initLevel == k) {
        Node s = Node::assign(stateName(p), Expr::fromAffine(p.dir == Direction::Increasing ? p.lo : p.hi));
        s.stateful = true;
        out.push_back(s);
      }
    if (k == (int)scan.levels.size()) out.push_back(statement());
    else for (auto &n : loop(k)) out.push_back(std::move(n));
    for (auto &h : built) {
      Node f = simple(Node::HashFree, h);
      for (auto &p : plans)
        if (hashName(p) == h && p.multi) f.next = chainName(p);
      out.push_back(f);
    }
    return out;
  }

  std::vector<Node> wrap(std::vector<Expr> conds, std::vector<Node> body) {
    if (conds.empty()) return body;
    return {Node::ifThen(Expr::all(conds), std::move(body))};
  }

  std::vector<Node> loop(int k) {
    const LevelScan &l = scan.levels[k];
    const FindPlan &p = plans[k];
    std::vector<Expr> conds;
    for (auto &c : l.conditions) conds.push_back(constraintExpr(c));
    if (l.isAssign) {
      std::vector<Node> out{Node::assign(l.var, Expr::fromAffine(l.value))};
      for (auto &n : wrap(conds, level(k + 1))) out.push_back(std::move(n));
      return out;
    }
    std::vector<Expr> findConds;
    if (p.tmpl == FindTemplate::None || p.tmpl == FindTemplate::Fallback) {
      for (auto &f : l.finds) findConds.push_back(findEq(f, scan));
    } else {
      for (auto &f : p.extraFinds) findConds.push_back(findEq(f, scan));
    }
    conds.insert(conds.begin(), findConds.begin(), findConds.end());
    std::vector<Node> inner = wrap(conds, level(k + 1));

    const std::string &v = l.var;
    int step = p.dir == Direction::Increasing ? 1 : -1;
    switch (p.tmpl) {
    case FindTemplate::None:
    case FindTemplate::Fallback: {
      Node f;
      f.kind = Node::For;
      f.var = v;
      f.init = lowerExpr(l);
      f.cond = upperCond(l);
      if (std::find(opt.tileVars.begin(), opt.tileVars.end(), v) != opt.tileVars.end()) {
        inner.insert(inner.begin(), simple(Node::Count, "tiles"));
        auto g = opt.guards.find(v);
        if (g != opt.guards.end() && !g->second.conds.empty())
          inner = {Node::ifThen(Expr::all(g->second.conds), std::move(inner))};
      }
      if (k == pragmaLevel) f.pragma = opt.pragma + reductionClause;
      f.body = std::move(inner);
      return {f};
    }
    case FindTemplate::SeqIter: {
      std::string s = stateName(p);
      Node w;
      w.kind = Node::While;
      w.cond = Expr::bin(Expr::And, inRange(p, s), stopAt(p, s));
      w.body = {simple(Node::Advance, s, step)};
      if (!p.multi) {
        inner.push_back(simple(Node::Advance, v, step));
        return {w, Node::ifThen(Expr::bin(Expr::And, inRange(p, v), eqAt(p, v)), std::move(inner))};
      }
      Node f;
      f.kind = Node::For;
      f.var = v;
      f.init = Expr::var(s);
      f.cond = Expr::bin(Expr::And, inRange(p, v), eqAt(p, v));
      f.step = step;
      f.body = std::move(inner);
      return {w, f};
    }
    case FindTemplate::HashMap: {
      Expr found = Expr::bin(Expr::Ne, Expr::var(v), Expr::cnst(-1));
      if (!p.multi) {
        Node a = Node::assign(v, Expr::fromAffine(p.find.key));
        a.probe = hashName(p);
        return {a, Node::ifThen(found, std::move(inner))};
      }
      Node f;
      f.kind = Node::For;
      f.var = v;
      f.init = Expr::fromAffine(p.find.key);
      f.probe = hashName(p);
      f.cond = found;
      f.step = 0;
      f.next = chainName(p);
      f.body = std::move(inner);
      return {f};
    }
    }
    return {};
  }

  void choosePragma() {
    if (!opt.parallel || !is.expr) return;
    int k0 = -1;
    for (size_t k = 0; k < scan.levels.size(); ++k)
      if (!scan.levels[k].isAssign) {
        k0 = (int)k;
        break;
      }
    if (k0 < 0 || plans[k0].tmpl != FindTemplate::None) return;
    for (auto &p : plans)
      if (p.tmpl == FindTemplate::SeqIter && p.initLevel <= k0) return;
    if (tags[k0] == LoopTag::Parallel) {
      pragmaLevel = k0;
    } else if (tags[k0] == LoopTag::Reduction && opt.reductionPragma &&
               is.expr->output.indices.empty()) {
      pragmaLevel = k0;
      reductionClause = " reduction(+:" + mangle(is.expr->output.name) + "[0:1])";
    }
  }
};

void forExprs(Node &n, const std::function<void(Expr &)> &f) {
  for (Expr *e : {&n.init, &n.cond, &n.value, &n.target, &n.lo, &n.hi, &n.key}) f(*e);
  for (auto &e : n.factors) f(e);
  for (auto &c : n.body) forExprs(c, f);
}

int uses(const Node &n, const std::string &v) {
  int c = 0;
  for (const Expr *e : {&n.init, &n.cond, &n.value, &n.target, &n.lo, &n.hi, &n.key})
    c += e->countVar(v);
  for (auto &e : n.factors) c += e.countVar(v);
  if (n.kind == Node::Advance && n.var == v) ++c;
  for (auto &k : n.body) c += uses(k, v);
  return c;
}

bool removable(const Node &n) {
  return n.kind == Node::Assign && !n.stateful && n.probe.empty();
}

/// Uses of v inside statements reached without entering a loop.
int statementUses(const Node &n, const std::string &v) {
  if (n.kind == Node::Accumulate) return uses(n, v);
  if (n.kind == Node::If || n.kind == Node::Block) {
    int c = 0;
    for (auto &k : n.body) c += statementUses(k, v);
    return c;
  }
  return 0;
}

void simplify(std::vector<Node> &block, bool inlineAssigns) {
  for (size_t i = 0; i < block.size();) {
    Node &n = block[i];
    bool single = false;
    if (inlineAssigns && removable(n)) {
      int all = 0, stmt = 0;
      for (size_t j = i + 1; j < block.size(); ++j) {
        all += uses(block[j], n.var);
        stmt += statementUses(block[j], n.var);
      }
      single = all == 1 && stmt == 1;
    }
    if (inlineAssigns && removable(n) &&
        (single || n.value.op == Expr::Var || n.value.op == Expr::Const)) {
      std::map<std::string, Expr> m{{n.var, n.value}};
      for (size_t j = i + 1; j < block.size(); ++j)
        forExprs(block[j], [&](Expr &e) { e = e.substitute(m); });
      block.erase(block.begin() + i);
      continue;
    }
    ++i;
  }
  for (auto &n : block) simplify(n.body, inlineAssigns);
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = block.size(); i-- > 0;) {
      if (!removable(block[i])) continue;
      int c = 0;
      for (size_t j = i + 1; j < block.size(); ++j) c += uses(block[j], block[i].var);
      if (c == 0) {
        block.erase(block.begin() + i);
        changed = true;
      }
    }
  }
}

void collect(const Node &n, std::set<std::string> &vars, std::set<std::string> &arrays,
             std::set<std::string> &locals, bool &hash, std::vector<std::string> &calls) {
  for (const Expr *e : {&n.init, &n.cond, &n.value, &n.target, &n.lo, &n.hi, &n.key}) {
    e->collectVars(vars);
    e->collectArrays(arrays);
  }
  for (auto &e : n.factors) {
    e.collectVars(vars);
    e.collectArrays(arrays);
  }
  switch (n.kind) {
  case Node::For:
  case Node::Assign: locals.insert(n.var); break;
  case Node::HashBuild: locals.insert(n.pos); break;
  case Node::Call:
    if (std::find(calls.begin(), calls.end(), n.var) == calls.end()) calls.push_back(n.var);
    break;
  default: break;
  }
  if (n.kind == Node::HashBuild || !n.probe.empty()) hash = true;
  for (auto &k : n.body) collect(k, vars, arrays, locals, hash, calls);
}

} // namespace

Ast build_ast(const ExtendedIterationSpace &is, const ScanResult &scan,
              const std::vector<FindPlan> &plans, const std::vector<LoopTag> &tags,
              const AstOptions &opt) {
  if (plans.size() != scan.levels.size() || tags.size() != scan.levels.size())
    throw Error("codegen", "plans and tags must cover every loop level");
  Builder b{is, scan, plans, tags, opt, -1, ""};
  b.choosePragma();
  std::vector<Node> body = b.level(0);
  if (!scan.preconditions.empty()) {
    std::vector<Expr> pre;
    for (auto &c : scan.preconditions) pre.push_back(constraintExpr(c));
    body = {Node::ifThen(Expr::all(pre), std::move(body))};
  }
  simplify(body, opt.inlineAssigns);

  Ast ast;
  ast.name = opt.name;
  ast.body = Node::block(std::move(body));
  std::set<std::string> vars, arrays, locals;
  collect(ast.body, vars, arrays, locals, ast.usesHash, ast.calls);

  std::set<std::string> outputs, values;
  if (is.expr) {
    is.valueAccess(is.expr->output.name).collectArrays(outputs);
    for (auto &in : is.expr->inputs) {
      Expr v = is.valueAccess(in.name);
      if (v.op == Expr::Load) values.insert(v.name);
    }
  }
  auto roleOf = [&](const std::string &a) {
    if (outputs.count(a)) return Param::OutputArray;
    if (values.count(a)) return Param::ValueArray;
    return Param::IndexArray;
  };
  std::set<std::string> done;
  auto add = [&](const std::string &name) {
    if (done.count(name)) return;
    if (arrays.count(name)) ast.params.push_back({name, roleOf(name)});
    else if (vars.count(name) && !locals.count(name)) ast.params.push_back({name, Param::Scalar});
    else return;
    done.insert(name);
  };
  for (auto &l : is.layouts) {
    if (l.dense()) {
      add(l.tensor);
      for (int d = 0; d < 8; ++d) add(l.tensor + ".dim" + std::to_string(d));
      continue;
    }
    for (auto &f : l.spec.fields)
      if (l.sharedWith.empty() || f.name.rfind(l.tensor + ".", 0) == 0) add(f.name);
  }
  for (auto &a : arrays) add(a);
  for (auto &v : vars) add(v);
  return ast;
}

std::string dump_ast(const Node &n, int indent) {
  std::ostringstream os;
  std::string pad(indent * 2, ' ');
  auto kids = [&] {
    for (auto &k : n.body) os << dump_ast(k, indent + 1);
  };
  switch (n.kind) {
  case Node::Block: os << pad << "block\n"; break;
  case Node::For:
    os << pad << "for " << n.var << " = " << (n.probe.empty() ? "" : n.probe + "?") << n.init.c()
       << "; " << n.cond.c() << "; "
       << (n.step == 0 ? n.next + "[" + n.var + "]" : std::to_string(n.step));
    if (!n.pragma.empty()) os << "  [" << n.pragma << "]";
    os << "\n";
    break;
  case Node::While: os << pad << "while " << n.cond.c() << "\n"; break;
  case Node::If: os << pad << "if " << n.cond.c() << "\n"; break;
  case Node::Assign:
    os << pad << n.var << " = " << (n.probe.empty() ? "" : n.probe + "?") << n.value.c() << "\n";
    break;
  case Node::Advance: os << pad << n.var << " += " << n.step << "\n"; break;
  case Node::Accumulate: {
    os << pad << n.target.c() << " +=";
    for (auto &f : n.factors) os << " " << f.c();
    os << "\n";
    break;
  }
  case Node::Call: os << pad << n.var << "()\n"; break;
  case Node::Count: os << pad << "count " << n.var << "\n"; break;
  case Node::HashBuild:
    os << pad << "hash " << n.var << " for " << n.pos << " in [" << n.lo.c() << ", " << n.hi.c()
       << "): " << n.key.c() << (n.next.empty() ? "" : " chain " + n.next) << "\n";
    break;
  case Node::HashFree: os << pad << "free " << n.var << "\n"; break;
  }
  kids();
  return os.str();
}

} // namespace spf
