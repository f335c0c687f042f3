#pragma once

#include <map>
#include <string>
#include <vector>

#include "spf/affine.hpp"

namespace spf {

struct Conjunct {
  std::vector<Constraint> constraints;
  std::vector<std::string> locals;

  void add(const Constraint &c);
  bool isObviouslyEmpty() const;
  std::set<std::string> mentionedVars() const;
  Conjunct renameVars(const std::map<std::string, std::string> &m) const;
  Conjunct renameUfs(const std::map<std::string, std::string> &m) const;
  Conjunct substitute(const std::map<std::string, AffineExpr> &s) const;
  bool holds(const Env &env) const;
};

/// Eliminate locals fixed by a unit-coefficient equality and drop duplicate
/// or trivially true constraints. Other locals stay existential.
Conjunct simplify(const Conjunct &c);

class PresburgerSet {
public:
  PresburgerSet() = default;
  explicit PresburgerSet(std::vector<VarId> tuple);
  static PresburgerSet universe(std::vector<VarId> tuple);
  static PresburgerSet empty(std::vector<VarId> tuple);

  std::vector<VarId> tuple;
  std::vector<Conjunct> disjuncts;

  bool isEmptyList() const { return disjuncts.empty(); }
  bool hasVar(const std::string &n) const;
  const VarId *findVar(const std::string &n) const;
  std::vector<std::string> names() const;
  /// Names that are neither tuple vars nor locals.
  std::set<std::string> parameters() const;
  /// Single conjunct or an error naming `op`.
  const Conjunct &conjunct(const char *op) const;
  std::string str() const;
  bool operator==(const PresburgerSet &o) const;
};

class PresburgerRelation {
public:
  std::vector<VarId> input;
  std::vector<VarId> output;
  std::vector<Conjunct> disjuncts;

  static PresburgerRelation universe(std::vector<VarId> in, std::vector<VarId> out);
  PresburgerSet asSet() const;
  std::set<std::string> parameters() const;
  std::string str() const;
};

PresburgerSet intersect(const PresburgerSet &a, const PresburgerSet &b);
PresburgerRelation compose(const PresburgerRelation &outer,
                           const PresburgerRelation &inner);
PresburgerRelation inverse(const PresburgerRelation &r);
/// Set over input ++ output (input vars kept as set variables), or with
/// `project` set, over output only with the inputs existentially bound.
PresburgerSet range_keep(const PresburgerRelation &r, bool project = false);
/// Image of `s` under `r` (r.input must name-match s.tuple).
PresburgerSet apply(const PresburgerSet &s, const PresburgerRelation &r);
/// Reorder the tuple of a set; `order` must be a permutation.
PresburgerSet reorder(const PresburgerSet &s, const std::vector<std::string> &order);

/// Fresh-name helper shared by the set operations.
std::string freshName(const std::string &base, const std::set<std::string> &taken);

} // namespace spf
