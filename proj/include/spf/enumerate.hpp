#pragma once

#include <map>
#include <utility>
#include <vector>

#include "spf/affine.hpp"
#include "spf/set.hpp"

namespace spf {

/// Inclusive integer interval per variable.
using Box = std::map<std::string, std::pair<int64_t, int64_t>>;

/// Brute-force membership over `box`. Parameters come from env.vals, UFs
/// from env.arrays. Locals missing from the box range over `localRange`.
/// Tuples are returned in lexicographic order of s.tuple.
std::vector<std::vector<int64_t>> enumerate(const PresburgerSet &s, const Box &box,
                                            const Env &env,
                                            std::pair<int64_t, int64_t> localRange = {0, 0});

/// Pairs (in, out) of a relation, same conventions.
std::vector<std::pair<std::vector<int64_t>, std::vector<int64_t>>>
enumerate(const PresburgerRelation &r, const Box &box, const Env &env,
          std::pair<int64_t, int64_t> localRange = {0, 0});

} // namespace spf
