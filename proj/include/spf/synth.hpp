#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spf/compose.hpp"
#include "spf/scan.hpp"
#include "spf/solver.hpp"

namespace spf {

enum class FindTemplate { None, SeqIter, HashMap, Fallback };
enum class Direction { Increasing, Decreasing };
enum class FindPolicy { Auto, SeqIter, HashMap, Loop };

const char *templateName(FindTemplate t);
const char *directionName(Direction d);
FindPolicy parse_find_policy(const std::string &s);

struct FindPlan {
  std::string var;
  FindTemplate tmpl = FindTemplate::None;
  Direction dir = Direction::Increasing;
  FindCond find;
  /// Other find conditions of the level, checked in the body.
  std::vector<FindCond> extraFinds;
  /// SeqIter: advance while this holds. Over the key and find(var).
  std::optional<Constraint> stop;
  /// stop is key > find(var) (else key < find(var)).
  bool stopGreater = true;
  std::vector<std::string> state;
  bool multi = false;
  /// Inclusive range of var (SeqIter/HashMap).
  AffineExpr lo, hi;
  /// Level index the state init or hash build is placed in front of.
  int initLevel = -1;
  std::string note;

  std::string str() const;
};

/// A named group of clauses of a find theory.
struct TheoryComponent {
  std::string tag;
  std::vector<Formula> clauses;
};

/// Everything the theory of one find loop is built from.
struct FindSite {
  const ExtendedIterationSpace *is = nullptr;
  const ScanResult *scan = nullptr;
  int level = -1;
  FindCond find;
  /// Enclosing loops that may run more than once per outer iteration,
  /// outermost first.
  std::vector<std::string> iterators;
  /// Enclosing assigned indices defined by one loop variable that also
  /// defines other coordinates.
  std::vector<std::string> reduced;
  /// Exactly one unit lower and upper bound and find(var) takes var itself.
  bool simple = false;
  AffineExpr lo, hi;

  const std::string &var() const;
};

/// `plans` covers the levels before `level`.
FindSite make_site(const ExtendedIterationSpace &is, const ScanResult &scan, int level,
                   const std::vector<FindPlan> &plans);

/// v -> v' for every tuple variable.
std::map<std::string, AffineExpr> prime_map(const ExtendedIterationSpace &is);
/// Properties of every index array used in `cs`, instantiated for each pair
/// of uses, one from the unprimed and one from the primed instance.
std::vector<Formula> pair_properties(const ExtendedIterationSpace &is,
                                     const std::vector<Constraint> &cs);

/// Iteration order, bounds, context, the match itself, properties of the
/// context arrays and of the searched array, in that order.
std::vector<TheoryComponent> build_components(const FindSite &site);
/// j = j' for every j in the state set.
TheoryComponent same_state(const std::vector<std::string> &state);

struct QueryRecord {
  std::string loop, name;
  std::vector<Formula> clauses;
  Verdict verdict = Verdict::Unknown;
};

struct SynthOptions {
  FindPolicy policy = FindPolicy::Auto;
  int nodeBudget = 10000;
  /// Record every query (for --dump-smt).
  bool record = false;
};

class Synthesizer {
public:
  Synthesizer(const FindSite &site, const SynthOptions &opt, std::vector<QueryRecord> *log);

  /// Both SeqIter assumptions plus exclusivity (single match) or
  /// contiguity (multi match) for the given arguments.
  bool check_seqiter(Direction dir, const Constraint &stop, const std::vector<std::string> &state,
                     bool multi);
  /// Applicability and multi_match.
  std::optional<bool> check_hashmap();
  /// Greedy shrink of `candidates`; nullopt if the full set fails.
  std::optional<std::vector<std::string>> determine_state_indices(
      Direction dir, const Constraint &stop, bool multi,
      const std::vector<std::string> &candidates);
  FindPlan synthesize();

  /// key > find (increasing scan) or key < find.
  Constraint stopCondition(bool greater) const;

private:
  Verdict run(const std::string &name, std::vector<Formula> fs);
  std::vector<Formula> context() const;
  const FindSite &site_;
  SynthOptions opt_;
  std::vector<QueryRecord> *log_;
  std::vector<TheoryComponent> comps_;
  std::map<std::string, bool> cache_;
};

struct SynthResult {
  /// One entry per scan level; tmpl None for plain loops and assigns.
  std::vector<FindPlan> plans;
  std::vector<QueryRecord> queries;
};

SynthResult synthesize_all(const ExtendedIterationSpace &is, const ScanResult &scan,
                           const SynthOptions &opt = {});

/// SMT-LIB2 files, one per recorded query, named <prefix><n>_<loop>_<name>.smt2.
std::vector<std::string> dump_queries(const std::vector<QueryRecord> &qs, const std::string &dir,
                                      const std::string &prefix);

} // namespace spf
