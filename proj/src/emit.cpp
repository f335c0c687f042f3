#include "spf/emit.hpp"

#include <cctype>
#include <sstream>

#include "spf/error.hpp"

namespace spf {

ValueType parse_value_type(const std::string &s) {
  if (s == "f64" || s == "double") return ValueType::F64;
  if (s == "f32" || s == "float") return ValueType::F32;
  if (s == "i64" || s == "int64") return ValueType::I64;
  throw Error("codegen", "unknown value type '" + s + "' (expected f64, f32 or i64)");
}

const char *cType(ValueType t) {
  switch (t) {
  case ValueType::F64: return "double";
  case ValueType::F32: return "float";
  case ValueType::I64: return "int64_t";
  }
  return "double";
}

namespace {

const char *kHelpers = R"(#include <stdint.h>
#include <stdlib.h>

static inline int64_t min(int64_t a, int64_t b) { return a < b ? a : b; }
static inline int64_t max(int64_t a, int64_t b) { return a > b ? a : b; }
static inline int64_t floord(int64_t a, int64_t b) { return a / b - (a % b != 0 && ((a < 0) != (b < 0))); }
static inline int64_t ceild(int64_t a, int64_t b) { return -floord(-a, b); }
)";

const char *kHash = R"(
typedef struct { int64_t *keys, *vals, mask; } spf_hash_t;

static void spf_hash_init(spf_hash_t *h, int64_t n) {
  int64_t cap = 16;
  while (cap < 2 * n) cap <<= 1;
  h->keys = (int64_t *)malloc(sizeof(int64_t) * cap);
  h->vals = (int64_t *)malloc(sizeof(int64_t) * cap);
  h->mask = cap - 1;
  for (int64_t s = 0; s < cap; ++s) h->keys[s] = INT64_MIN;
}
static int64_t spf_hash_slot(const spf_hash_t *h, int64_t k) {
  int64_t s = (int64_t)(((uint64_t)k * 0x9E3779B97F4A7C15ull) >> 17) & h->mask;
  while (h->keys[s] != INT64_MIN && h->keys[s] != k) s = (s + 1) & h->mask;
  return s;
}
static void spf_hash_set(spf_hash_t *h, int64_t k, int64_t v) {
  int64_t s = spf_hash_slot(h, k);
  h->keys[s] = k;
  h->vals[s] = v;
}
static int64_t spf_hash_find(const spf_hash_t *h, int64_t k) {
  int64_t s = spf_hash_slot(h, k);
  return h->keys[s] == k ? h->vals[s] : -1;
}
static void spf_hash_free(spf_hash_t *h) {
  free(h->keys);
  free(h->vals);
}
)";

bool isSimple(const Node &n) {
  switch (n.kind) {
  case Node::Assign:
  case Node::Advance:
  case Node::Accumulate:
  case Node::Call: return true;
  default: return false;
  }
}

struct Printer {
  const EmitConfig &cfg;
  std::ostringstream os;
  int depth = 1;

  std::string pad() const { return std::string(depth * cfg.indent, ' '); }
  void line(const std::string &s) { os << pad() << s << "\n"; }

  static std::string stepText(const Node &n) {
    std::string v = mangle(n.var);
    if (n.step == 0) return v + " = " + mangle(n.next) + "[" + v + "]";
    return (n.step > 0 ? "++" : "--") + v;
  }

  static std::string probeText(const std::string &hash, const Expr &key) {
    return "spf_hash_find(&" + mangle(hash) + ", " + key.c() + ")";
  }

  std::string simpleText(const Node &n) const {
    switch (n.kind) {
    case Node::Assign: {
      std::string rhs = n.probe.empty() ? n.value.c() : probeText(n.probe, n.value);
      return std::string(n.declare ? "int64_t " : "") + mangle(n.var) + " = " + rhs + ";";
    }
    case Node::Advance: return (n.step > 0 ? "++" : "--") + mangle(n.var) + ";";
    case Node::Accumulate: {
      std::string t = n.scalarTarget && n.target.op == Expr::Load ? "*" + mangle(n.target.name)
                                                                  : n.target.c();
      std::string rhs;
      for (auto &f : n.factors) rhs += (rhs.empty() ? "" : " * ") + f.c();
      return t + " += " + (rhs.empty() ? "1" : rhs) + ";";
    }
    case Node::Call: return n.var + "();";
    default: return "";
    }
  }

  /// Header text followed by the body, braced unless it is one simple statement.
  void compound(const std::string &head, const std::vector<Node> &body) {
    std::vector<const Node *> kids;
    for (auto &k : body)
      if (k.kind != Node::Count) kids.push_back(&k);
    if (kids.size() == 1 && isSimple(*kids[0])) {
      line(head + " " + simpleText(*kids[0]));
      return;
    }
    line(head + " {");
    ++depth;
    for (auto *k : kids) node(*k);
    --depth;
    line("}");
  }

  void node(const Node &n) {
    switch (n.kind) {
    case Node::Block:
      for (auto &k : n.body) node(k);
      break;
    case Node::For: {
      if (!n.pragma.empty()) os << n.pragma << "\n";
      std::string v = mangle(n.var);
      std::string init = n.probe.empty() ? n.init.c() : probeText(n.probe, n.init);
      compound("for (int64_t " + v + " = " + init + "; " + n.cond.c() + "; " + stepText(n) + ")",
               n.body);
      break;
    }
    case Node::While: compound("while (" + n.cond.c() + ")", n.body); break;
    case Node::If: compound("if (" + n.cond.c() + ")", n.body); break;
    case Node::Count: break;
    case Node::HashBuild: hashBuild(n); break;
    case Node::HashFree:
      line("spf_hash_free(&" + mangle(n.var) + ");");
      if (!n.next.empty()) line("free(" + mangle(n.next) + ");");
      break;
    default: line(simpleText(n)); break;
    }
  }

  void hashBuild(const Node &n) {
    std::string h = mangle(n.var), p = mangle(n.pos), key = n.key.c();
    line("spf_hash_t " + h + ";");
    line("spf_hash_init(&" + h + ", " + n.value.c() + ");");
    Expr end = n.hi;
    if (n.next.empty()) {
      line("for (int64_t " + p + " = " + n.lo.c() + "; " + p + " < " + end.c() + "; ++" + p +
           ") spf_hash_set(&" + h + ", " + key + ", " + p + ");");
      return;
    }
    std::string nx = mangle(n.next);
    line("int64_t *" + nx + " = (int64_t *)malloc(sizeof(int64_t) * (" + end.c() + " > 0 ? " +
         end.c() + " : 1));");
    line("for (int64_t " + p + " = " + Expr::bin(Expr::Sub, n.hi, Expr::cnst(1)).c() + "; " + p + " >= " + n.lo.c() + "; --" + p + ") {");
    ++depth;
    line(nx + "[" + p + "] = spf_hash_find(&" + h + ", " + key + ");");
    line("spf_hash_set(&" + h + ", " + key + ", " + p + ");");
    --depth;
    line("}");
  }
};

} // namespace

std::string signature(const Ast &ast, const EmitConfig &cfg) {
  std::string s = "void " + ast.name + "(";
  std::string vt = cType(cfg.value);
  bool first = true;
  for (auto &p : ast.params) {
    if (!first) s += ", ";
    first = false;
    std::string n = mangle(p.name);
    switch (p.role) {
    case Param::IndexArray: s += "const int64_t *" + n; break;
    case Param::ValueArray: s += "const " + vt + " *" + n; break;
    case Param::OutputArray: s += vt + " *" + n; break;
    case Param::Scalar: s += "int64_t " + n; break;
    }
  }
  if (first) s += "void";
  return s + ")";
}

std::string emit_c(const Ast &ast, const EmitConfig &cfg) {
  std::ostringstream os;
  if (cfg.prelude) {
    os << kHelpers;
    if (ast.usesHash) os << kHash;
    if (!ast.calls.empty()) os << "\n";
    for (auto &c : ast.calls) os << "void " << c << "(void);\n";
    os << "\n";
  }
  Printer p{cfg, {}, 1};
  p.node(ast.body);
  os << signature(ast, cfg) << " {\n" << p.os.str() << "}\n";
  return os.str();
}

std::string emit_header(const Ast &ast, const EmitConfig &cfg) {
  return "#pragma once\n\n#include <stdint.h>\n\n" + signature(ast, cfg) + ";\n";
}

std::string squash(const std::string &code) {
  std::string out;
  for (char c : code)
    if (!std::isspace((unsigned char)c)) out += c;
  return out;
}

} // namespace spf
