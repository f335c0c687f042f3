#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spf/contraction.hpp"
#include "spf/expr.hpp"
#include "spf/layout.hpp"

namespace spf {

/// A layout specialized to one tensor: every name qualified (colIdx ->
/// A.colIdx, p_j -> pA_j), except where shared with another tensor.
struct BoundLayout {
  std::string tensor;
  LayoutSpec spec;
  std::map<std::string, std::string> rename;
  /// Tensor whose arrays and physical variables are reused, if any.
  std::string sharedWith;

  bool dense() const { return spec.dense; }
  /// Physical variables owned by this tensor (shared ones excluded).
  std::vector<std::string> ownPhysical() const;
};

struct ShareDecl {
  std::string from, to;
  int levels = 0;
};

/// Parses "A.C=levels:2".
ShareDecl parse_share(const std::string &text);

BoundLayout bind(const std::string &tensor, const LayoutSpec &spec,
                 const BoundLayout *shareWith = nullptr, int levels = 0);

/// Q: physical -> computation tuple for one sparse tensor.
PresburgerRelation layout_to_computation(const BoundLayout &b, const AccessMap &a);

struct ExtendedIterationSpace {
  PresburgerSet space;
  std::vector<std::string> order;
  std::optional<ContractionExpr> expr;
  std::vector<BoundLayout> layouts; // output first, then inputs
  std::vector<IndexArrayProperty> properties;
  /// Statement for spaces not built from a contraction.
  std::string statement;

  const BoundLayout *layoutOf(const std::string &tensor) const;
  /// Element of `tensor` touched by one statement instance.
  Expr valueAccess(const std::string &tensor) const;
  /// Logical coordinates of `tensor` as affine expressions of the tuple.
  std::vector<AffineExpr> coordinates(const std::string &tensor) const;
  std::vector<std::string> layoutVars() const;
  std::vector<std::string> computationVars() const;
  bool isComputation(const std::string &v) const;
  std::string str() const;
};

/// Intersect the ranges of every Q with the dense space, keeping layout
/// variables as set variables. `order` may list every tuple variable, only
/// the computation indices (layout variables are then placed before the
/// indices they define), or nothing (default order).
ExtendedIterationSpace combine(const ContractionExpr &e, std::vector<BoundLayout> layouts,
                               const std::vector<std::string> &order = {},
                               const std::vector<Constraint> &bounds = {});

/// Loop order from a rough sequence: each computation index defined by a
/// sparse layout moves right after the layout variables defining it; other
/// variables keep their relative order.
std::vector<std::string> settle_order(const ExtendedIterationSpace &is,
                                      const std::vector<std::string> &seq);

} // namespace spf
