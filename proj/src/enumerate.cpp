#include "spf/enumerate.hpp"

#include <functional>
#include <optional>
#include <set>

#include "spf/error.hpp"

namespace spf {

namespace {

/// Evaluate the constraints that just became closed. A failed table lookup
/// only matters when every other closed constraint holds.
bool check(const std::vector<const Constraint *> &cs, const Env &env) {
  std::optional<Error> err;
  for (auto *c : cs) {
    try {
      if (!c->holds(env)) return false;
    } catch (const Error &e) {
      if (!err) err = e;
    }
  }
  if (err) throw *err;
  return true;
}

void members(const Conjunct &c, const std::vector<std::string> &vars, const Box &box,
             std::pair<int64_t, int64_t> localRange, Env env, size_t nTuple,
             std::vector<std::vector<int64_t>> &out) {
  std::map<std::string, size_t> pos;
  for (size_t i = 0; i < vars.size(); ++i) pos[vars[i]] = i;
  std::vector<std::vector<const Constraint *>> at(vars.size() + 1);
  for (auto &k : c.constraints) {
    size_t lvl = 0;
    for (auto &v : k.expr.vars()) {
      auto it = pos.find(v);
      if (it != pos.end()) lvl = std::max(lvl, it->second + 1);
    }
    at[lvl].push_back(&k);
  }
  if (!check(at[0], env)) return;
  std::vector<std::pair<int64_t, int64_t>> range(vars.size());
  for (size_t i = 0; i < vars.size(); ++i) {
    auto it = box.find(vars[i]);
    if (it != box.end())
      range[i] = it->second;
    else if (i >= nTuple)
      range[i] = localRange;
    else
      throw Error("enumerate", "no box for variable '" + vars[i] + "'");
  }
  std::vector<int64_t> cur(vars.size());
  std::set<std::vector<int64_t>> seen;
  std::function<void(size_t)> rec = [&](size_t d) {
    if (d == vars.size()) {
      std::vector<int64_t> t(cur.begin(), cur.begin() + nTuple);
      if (seen.insert(t).second) out.push_back(t);
      return;
    }
    for (int64_t x = range[d].first; x <= range[d].second; ++x) {
      cur[d] = x;
      env.vals[vars[d]] = x;
      if (check(at[d + 1], env)) rec(d + 1);
    }
    env.vals.erase(vars[d]);
  };
  rec(0);
}

} // namespace

std::vector<std::vector<int64_t>> enumerate(const PresburgerSet &s, const Box &box,
                                            const Env &env,
                                            std::pair<int64_t, int64_t> localRange) {
  std::set<std::vector<int64_t>> all;
  for (auto &c : s.disjuncts) {
    std::vector<std::string> vars = s.names();
    for (auto &l : c.locals) vars.push_back(l);
    std::vector<std::vector<int64_t>> part;
    members(c, vars, box, localRange, env, s.tuple.size(), part);
    all.insert(part.begin(), part.end());
  }
  return {all.begin(), all.end()};
}

std::vector<std::pair<std::vector<int64_t>, std::vector<int64_t>>>
enumerate(const PresburgerRelation &r, const Box &box, const Env &env,
          std::pair<int64_t, int64_t> localRange) {
  auto pts = enumerate(r.asSet(), box, env, localRange);
  std::vector<std::pair<std::vector<int64_t>, std::vector<int64_t>>> out;
  size_t n = r.input.size();
  for (auto &p : pts)
    out.push_back({std::vector<int64_t>(p.begin(), p.begin() + n),
                   std::vector<int64_t>(p.begin() + n, p.end())});
  return out;
}

} // namespace spf
