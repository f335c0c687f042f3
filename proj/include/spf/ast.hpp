#pragma once

#include <map>
#include <string>
#include <vector>

#include "spf/analysis.hpp"
#include "spf/compose.hpp"
#include "spf/expr.hpp"
#include "spf/scan.hpp"
#include "spf/synth.hpp"

namespace spf {

/// Loop-level program shared by the C emitter and the interpreter.
struct Node {
  enum Kind {
    Block,
    For,        // var = init; cond; step (+1, -1, or var = next[var])
    While,      // while (cond) body
    If,         // if (cond) body
    Assign,     // [int64_t] var = value
    Advance,    // var += step; counted as a state advance
    Accumulate, // target += factors[0] * factors[1] * ...
    Call,       // var();
    Count,      // bump counter `var`; no C output
    HashBuild,  // hash `var` of `value` entries: for p in [lo, hi): key -> p (chain `next` if set)
    HashFree,
  };
  Kind kind = Block;
  std::string var;
  Expr init, cond, value;
  int step = 1;
  /// For: chain array used as the step. HashBuild: chain array to fill.
  std::string next;
  /// For/Assign: the value is a probe of this hash with key `init`/`value`.
  std::string probe;
  /// Assign: declares the variable. Stateful assigns are never inlined.
  bool declare = true, stateful = false;
  std::string pragma;
  /// Accumulate.
  Expr target;
  std::vector<Expr> factors;
  bool scalarTarget = false;
  /// HashBuild: position var, half-open range and key.
  std::string pos;
  Expr lo, hi, key;
  std::vector<Node> body;

  static Node block(std::vector<Node> body = {});
  static Node assign(const std::string &var, Expr value, bool declare = true);
  static Node ifThen(Expr cond, std::vector<Node> body);
};

struct Param {
  enum Role { IndexArray, ValueArray, OutputArray, Scalar };
  std::string name; // qualified, e.g. A.rowPtr
  Role role = Scalar;
};

struct Ast {
  std::string name = "kernel";
  std::vector<Param> params;
  Node body;
  bool usesHash = false;
  std::vector<std::string> calls;
};

struct AstOptions {
  std::string name = "kernel";
  bool parallel = true;
  bool reductionPragma = false;
  std::string pragma = "#pragma omp parallel for schedule(dynamic,32)";
  /// Tile loops: a `tiles` count is placed in their body, behind the guard
  /// when one is given.
  std::vector<std::string> tileVars;
  std::map<std::string, TileGuard> guards;
  bool inlineAssigns = true;
};

Ast build_ast(const ExtendedIterationSpace &is, const ScanResult &scan,
              const std::vector<FindPlan> &plans, const std::vector<LoopTag> &tags,
              const AstOptions &opt = {});

/// Indented pseudo-C dump, one node per line.
std::string dump_ast(const Node &n, int indent = 0);

} // namespace spf
