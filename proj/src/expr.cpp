#include "spf/expr.hpp"

#include "spf/error.hpp"
#include "spf/parse.hpp"
#include "spf/rational.hpp"

namespace spf {

std::string mangle(const std::string &name) {
  std::string s = name;
  for (auto &ch : s)
    if (ch == '.') ch = '_';
  return s;
}

Expr Expr::cnst(int64_t v) {
  Expr e;
  e.op = Const;
  e.value = v;
  return e;
}

Expr Expr::var(const std::string &n) {
  Expr e;
  e.op = Var;
  e.name = n;
  return e;
}

Expr Expr::load(const std::string &array, Expr index) {
  Expr e;
  e.op = Load;
  e.name = array;
  e.kids.push_back(std::move(index));
  return e;
}

Expr Expr::bin(Op op, Expr a, Expr b) {
  if (a.op == Const && b.op == Const) {
    int64_t x = a.value, y = b.value;
    switch (op) {
    case Add: return cnst(x + y);
    case Sub: return cnst(x - y);
    case Mul: return cnst(x * y);
    case Div: if (y) return cnst(x / y); break;
    case FloorDiv: if (y) return cnst(floorDiv(x, y)); break;
    case CeilDiv: if (y) return cnst(ceilDiv(x, y)); break;
    case Min: return cnst(std::min(x, y));
    case Max: return cnst(std::max(x, y));
    default: break;
    }
  }
  if (op == Add) {
    if (a.isConst(0)) return b;
    if (b.isConst(0)) return a;
    if (b.op == Const && b.value < 0) return bin(Sub, a, cnst(-b.value));
  }
  if (op == Sub) {
    if (b.isConst(0)) return a;
    if (b.op == Const && b.value < 0) return bin(Add, a, cnst(-b.value));
  }
  if (op == Mul) {
    if (a.isConst(1)) return b;
    if (b.isConst(1)) return a;
  }
  if ((op == FloorDiv || op == CeilDiv || op == Div) && b.isConst(1)) return a;
  if (op == And) {
    if (a.isConst(1)) return b;
    if (b.isConst(1)) return a;
  }
  Expr e;
  e.op = op;
  e.kids.push_back(std::move(a));
  e.kids.push_back(std::move(b));
  return e;
}

Expr Expr::minOf(std::vector<Expr> xs) {
  if (xs.empty()) throw Error("codegen", "min of nothing");
  Expr r = xs[0];
  for (size_t i = 1; i < xs.size(); ++i) r = bin(Min, r, xs[i]);
  return r;
}

Expr Expr::maxOf(std::vector<Expr> xs) {
  if (xs.empty()) throw Error("codegen", "max of nothing");
  Expr r = xs[0];
  for (size_t i = 1; i < xs.size(); ++i) r = bin(Max, r, xs[i]);
  return r;
}

Expr Expr::all(std::vector<Expr> conds) {
  Expr r = cnst(1);
  for (auto &c : conds) r = bin(And, r, c);
  return r;
}

Expr Expr::fromAffine(const AffineExpr &e) {
  Expr r = cnst(0);
  bool first = true;
  for (auto &t : e.terms()) {
    Expr x;
    if (!t.atom.uf) {
      x = var(t.atom.name);
    } else {
      if (t.atom.args.size() != 1)
        throw Error("codegen", "cannot load from '" + t.atom.name + "' with " +
                                   std::to_string(t.atom.args.size()) + " arguments");
      x = load(t.atom.name, fromAffine(t.atom.args[0]));
    }
    int64_t c = t.coef;
    if (first) {
      r = c == 1 ? x : (c == -1 ? bin(Sub, cnst(0), x) : bin(Mul, cnst(c), x));
      first = false;
    } else if (c > 0) {
      r = bin(Add, r, c == 1 ? x : bin(Mul, cnst(c), x));
    } else {
      r = bin(Sub, r, c == -1 ? x : bin(Mul, cnst(-c), x));
    }
  }
  if (first) return cnst(e.constant());
  return bin(Add, r, cnst(e.constant()));
}

bool Expr::operator==(const Expr &o) const {
  return op == o.op && value == o.value && name == o.name && kids == o.kids;
}

Expr Expr::substitute(const std::map<std::string, Expr> &s) const {
  if (op == Var) {
    auto it = s.find(name);
    return it == s.end() ? *this : it->second;
  }
  if (kids.empty()) return *this;
  if (op == Load) return load(name, kids[0].substitute(s));
  return bin(op, kids[0].substitute(s), kids[1].substitute(s));
}

Expr Expr::renamed(const std::map<std::string, std::string> &vars,
                   const std::map<std::string, std::string> &arrays) const {
  Expr r = *this;
  if (op == Var) {
    auto it = vars.find(name);
    if (it != vars.end()) r.name = it->second;
  } else if (op == Load) {
    auto it = arrays.find(name);
    if (it != arrays.end()) r.name = it->second;
  }
  for (auto &k : r.kids) k = k.renamed(vars, arrays);
  return r;
}

void Expr::collectVars(std::set<std::string> &out) const {
  if (op == Var) out.insert(name);
  for (auto &k : kids) k.collectVars(out);
}

void Expr::collectArrays(std::set<std::string> &out) const {
  if (op == Load) out.insert(name);
  for (auto &k : kids) k.collectArrays(out);
}

int Expr::countVar(const std::string &v) const {
  int n = op == Var && name == v ? 1 : 0;
  for (auto &k : kids) n += k.countVar(v);
  return n;
}

int64_t Expr::eval(const VarFn &varFn, const LoadFn &loadFn) const {
  switch (op) {
  case Const: return value;
  case Var: return varFn(name);
  case Load: return loadFn(name, kids[0].eval(varFn, loadFn));
  case And: return kids[0].eval(varFn, loadFn) && kids[1].eval(varFn, loadFn);
  case Or: return kids[0].eval(varFn, loadFn) || kids[1].eval(varFn, loadFn);
  default: break;
  }
  int64_t a = kids[0].eval(varFn, loadFn), b = kids[1].eval(varFn, loadFn);
  switch (op) {
  case Add: return a + b;
  case Sub: return a - b;
  case Mul: return a * b;
  case Div:
    if (!b) throw Error("eval", "division by zero");
    return a / b;
  case FloorDiv:
    if (!b) throw Error("eval", "division by zero");
    return floorDiv(a, b);
  case CeilDiv:
    if (!b) throw Error("eval", "division by zero");
    return ceilDiv(a, b);
  case Min: return std::min(a, b);
  case Max: return std::max(a, b);
  case Lt: return a < b;
  case Le: return a <= b;
  case Eq: return a == b;
  case Ne: return a != b;
  case Ge: return a >= b;
  case Gt: return a > b;
  default: break;
  }
  return 0;
}

namespace {

int prec(Expr::Op op) {
  switch (op) {
  case Expr::Or: return 1;
  case Expr::And: return 2;
  case Expr::Eq:
  case Expr::Ne: return 3;
  case Expr::Lt:
  case Expr::Le:
  case Expr::Ge:
  case Expr::Gt: return 4;
  case Expr::Add:
  case Expr::Sub: return 5;
  case Expr::Mul:
  case Expr::Div: return 6;
  default: return 7;
  }
}

const char *sym(Expr::Op op) {
  switch (op) {
  case Expr::Or: return " || ";
  case Expr::And: return " && ";
  case Expr::Eq: return " == ";
  case Expr::Ne: return " != ";
  case Expr::Lt: return " < ";
  case Expr::Le: return " <= ";
  case Expr::Ge: return " >= ";
  case Expr::Gt: return " > ";
  case Expr::Add: return " + ";
  case Expr::Sub: return " - ";
  case Expr::Mul: return " * ";
  case Expr::Div: return " / ";
  default: return "?";
  }
}

} // namespace

std::string Expr::c() const {
  switch (op) {
  case Const: return value < 0 ? "(" + std::to_string(value) + ")" : std::to_string(value);
  case Var: return mangle(name);
  case Load: return mangle(name) + "[" + kids[0].c() + "]";
  case FloorDiv: return "floord(" + kids[0].c() + ", " + kids[1].c() + ")";
  case CeilDiv: return "ceild(" + kids[0].c() + ", " + kids[1].c() + ")";
  case Min: return "min(" + kids[0].c() + ", " + kids[1].c() + ")";
  case Max: return "max(" + kids[0].c() + ", " + kids[1].c() + ")";
  default: break;
  }
  int p = prec(op);
  std::string l = kids[0].c(), r = kids[1].c();
  bool cmp = op >= Lt && op <= Gt;
  if (cmp && kids[1].op == Const) r = std::to_string(kids[1].value);
  if (prec(kids[0].op) < p) l = "(" + l + ")";
  bool rightStrict = op == Sub || op == Div;
  if (prec(kids[1].op) < p || (rightStrict && prec(kids[1].op) == p)) r = "(" + r + ")";
  return l + sym(op) + r;
}

Expr operator+(Expr a, Expr b) { return Expr::bin(Expr::Add, std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return Expr::bin(Expr::Sub, std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::bin(Expr::Mul, std::move(a), std::move(b)); }

namespace {

Expr parseSum(Parser &p);

Expr parsePrimary(Parser &p) {
  if (p.accept("-")) return Expr::bin(Expr::Sub, Expr::cnst(0), parsePrimary(p));
  if (p.accept("(")) {
    Expr e = parseSum(p);
    p.expect(")");
    return e;
  }
  if (p.peek().kind == Token::Int) return Expr::cnst(p.next().value);
  std::string n = p.ident();
  if (p.accept("[")) {
    Expr idx = parseSum(p);
    p.expect("]");
    return Expr::load(n, idx);
  }
  if (p.accept("(")) {
    Expr idx = parseSum(p);
    p.expect(")");
    return Expr::load(n, idx);
  }
  return Expr::var(n);
}

Expr parseProduct(Parser &p) {
  Expr e = parsePrimary(p);
  for (;;) {
    if (p.accept("*"))
      e = Expr::bin(Expr::Mul, e, parsePrimary(p));
    else if (p.accept("/"))
      e = Expr::bin(Expr::Div, e, parsePrimary(p));
    else
      return e;
  }
}

Expr parseSum(Parser &p) {
  Expr e = parseProduct(p);
  for (;;) {
    if (p.accept("+"))
      e = Expr::bin(Expr::Add, e, parseProduct(p));
    else if (p.accept("-"))
      e = Expr::bin(Expr::Sub, e, parseProduct(p));
    else
      return e;
  }
}

} // namespace

Expr parseExpr(Parser &p) { return parseSum(p); }

Expr parseExpr(const std::string &text) {
  Parser p(text, "parse");
  Expr e = parseSum(p);
  if (!p.atEnd()) p.fail("trailing input");
  return e;
}

} // namespace spf
