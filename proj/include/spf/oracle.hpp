#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "spf/ast.hpp"
#include "spf/compose.hpp"
#include "spf/interp.hpp"

namespace spf {

/// Coordinate-keyed tensor contents, independent of any layout.
struct Logical {
  std::vector<int64_t> dims;
  std::map<std::vector<int64_t>, double> nz;

  double at(const std::vector<int64_t> &c) const;
  int64_t nnz() const { return (int64_t)nz.size(); }
};

/// Every stored element of a bound layout: its coordinates and the index
/// into its value array. Walks the structure level by level.
struct StoredElement {
  std::vector<int64_t> coords;
  int64_t valueIndex = 0;
};
std::vector<StoredElement> stored(const BoundLayout &b, const Instance &inst);

/// Fill the arrays and scalars of `b` so that it represents `t`.
void encode(const BoundLayout &b, const Logical &t, Instance &inst, std::mt19937_64 &rng);
/// Contents of the value array as seen through the layout. Duplicate
/// coordinates add up.
Logical decode(const BoundLayout &b, const Instance &inst, const std::vector<int64_t> &dims);

/// Straight loops over the full index space.
Logical dense_contract(const ContractionExpr &e, const std::map<std::string, Logical> &inputs,
                       const std::map<std::string, int64_t> &extents);

struct GenOptions {
  int64_t maxExtent = 32;
  double minDensity = 0.1, maxDensity = 0.5;
};

struct Problem {
  std::map<std::string, int64_t> extents;
  double density = 0;
  /// Inputs only.
  std::map<std::string, Logical> tensors;
  Instance inst;
};

/// Random extents and contents for every input, output arrays zeroed.
Problem gen_problem(const ExtendedIterationSpace &is, uint64_t seed, const GenOptions &opt = {});

struct DiffResult {
  bool ok = true;
  std::string message;
  Counters counters;
  Problem problem;
};

/// Interpret `ast` on a generated problem and compare the output against
/// dense_contract.
DiffResult differential_test(const ExtendedIterationSpace &is, const Ast &ast, uint64_t seed,
                             const GenOptions &opt = {});

} // namespace spf
