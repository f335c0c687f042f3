#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spf/ast.hpp"

namespace spf {

/// Concrete arrays and scalars keyed by qualified name (A.rowPtr, y, n).
struct Instance {
  std::map<std::string, std::vector<int64_t>> ints;
  std::map<std::string, std::vector<double>> reals;
  std::map<std::string, int64_t> scalars;

  /// `array A.idx = [1, 4]`, `real A.val = [..]`, `scalar A.len = 2`, one per line.
  std::string str() const;
  static Instance parse(const std::string &text);
};

struct Counters {
  int64_t statements = 0;
  /// Moves of a SeqIter position, including the one after a match.
  int64_t advances = 0;
  int64_t probes = 0;
  int64_t tiles = 0;
  /// Body executions per loop variable.
  std::map<std::string, int64_t> iterations;
  std::map<std::string, int64_t> calls;
};

/// Runs the kernel on `inst`, accumulating into its output arrays.
/// Out-of-range reads or writes throw.
Counters interpret(const Ast &ast, Instance &inst, int64_t stepLimit = 200000000);

} // namespace spf
