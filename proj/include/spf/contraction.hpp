#pragma once

#include <map>
#include <string>
#include <vector>

#include "spf/set.hpp"

namespace spf {

struct TensorAccess {
  std::string name;
  std::vector<std::string> indices;
};

/// out(idx*) = in1(idx+) * in2(idx+) * ...
struct ContractionExpr {
  TensorAccess output;
  std::vector<TensorAccess> inputs;
  /// Optional symbolic extents, index -> exclusive upper bound.
  std::map<std::string, AffineExpr> extents;
  std::vector<std::string> freeIndices;        // output order
  std::vector<std::string> contractionIndices; // first appearance order

  /// Output first, then inputs.
  std::vector<const TensorAccess *> tensors() const;
  const TensorAccess *tensor(const std::string &name) const;
  bool isOutput(const std::string &name) const { return output.name == name; }
  /// Free indices then contraction indices.
  std::vector<std::string> indices() const;
  std::string str() const;
};

struct AccessMap {
  std::string tensor;
  PresburgerRelation map; // [I] -> [g_0, ...]
};

ContractionExpr parse_contraction(const std::string &text);

/// One map per tensor, output first. `order` fixes the computation tuple;
/// empty means free indices then contraction indices.
std::vector<AccessMap> access_maps(const ContractionExpr &e,
                                   const std::vector<std::string> &order = {});

/// Box over the computation indices from `e.extents`, intersected with the
/// optional user constraints.
PresburgerSet dense_space(const ContractionExpr &e, const std::vector<Constraint> &bounds = {},
                          const std::vector<std::string> &order = {});

} // namespace spf
