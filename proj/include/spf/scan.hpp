#pragma once

#include <string>
#include <vector>

#include "spf/affine.hpp"
#include "spf/set.hpp"

namespace spf {

/// coef*var >= expr (lower) or coef*var <= expr (upper), coef > 0.
struct Bound {
  AffineExpr expr;
  int64_t coef = 1;
};

/// app == key, where app is a UF application over the level variable and
/// key does not mention it.
struct FindCond {
  Atom app;
  AffineExpr key;
  Constraint constraint() const {
    return Constraint::eq(AffineExpr::atom(app), key);
  }
};

struct LevelScan {
  std::string var;
  bool isAssign = false;
  AffineExpr value; // when isAssign
  std::vector<Bound> lower, upper;
  std::vector<Constraint> conditions;
  std::vector<FindCond> finds;
  /// Every non-derived constraint whose innermost variable is `var`.
  std::vector<Constraint> primary;

  std::vector<Constraint> boundConstraints() const;
};

struct ScanResult {
  std::vector<std::string> order;
  std::vector<LevelScan> levels;
  /// Constraints over parameters only.
  std::vector<Constraint> preconditions;

  int position(const std::string &v) const;
  std::string str() const;
};

struct ScanOptions {
  /// Drop bounds and conditions implied by the enclosing context.
  bool pruneRedundant = true;
};

/// Per-variable bounds and conditions for nested iteration in `order`.
ScanResult project_scan(const PresburgerSet &s, const std::vector<std::string> &order,
                        const ScanOptions &opt = {});

} // namespace spf
