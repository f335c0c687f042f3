#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spf/compose.hpp"
#include "spf/expr.hpp"
#include "spf/scan.hpp"

namespace spf {

enum class LoopTag { None, Parallel, Reduction, Serial };
const char *tagName(LoopTag t);

/// One tag per scan level (None for assigned levels). Iterations of a
/// parallel level never write the same output element; a reduction level
/// only does so through differing contraction indices.
std::vector<LoopTag> mark_parallel(const ExtendedIterationSpace &is, const ScanResult &scan,
                                   int nodeBudget = 10000);

struct Transformation {
  std::string name;
  PresburgerRelation relation;
  /// Loop order of the new tuple.
  std::vector<std::string> order;
};

/// [.., v, ..] -> [.., tv, v, ..] with size*tv <= v < size*(tv+1).
Transformation tile_transform(const ExtendedIterationSpace &is, const std::string &var,
                              int64_t size);
ExtendedIterationSpace apply_transform(const ExtendedIterationSpace &is, const Transformation &t);
/// Reorder `vars` among the slots they occupy in the current order.
ExtendedIterationSpace permute(const ExtendedIterationSpace &is,
                               const std::vector<std::string> &vars);

/// f(lo) <= k && f(hi) >= k (swapped for decreasing f) on the points of
/// one tile, where f(point) = k is a find inside the tile.
struct TileGuard {
  std::string tileVar, pointVar;
  std::vector<Expr> conds;
};
std::optional<TileGuard> tile_guard(const ExtendedIterationSpace &is, const ScanResult &scan,
                                    const std::string &tileVar);

} // namespace spf
