#include <random>

#include "doctest.h"
#include "golden_jobs.hpp"
#include "spf/enumerate.hpp"
#include "spf/interp.hpp"

using namespace spf;
using namespace spf::testing;

namespace {

struct Family {
  const char *name;
  std::vector<int64_t> step; // extents are multiples of these
  bool lowerOnly = false;
  int64_t fixed = 0;
};

const std::vector<Family> &families() {
  static const std::vector<Family> fs = {
      {"SV", {1}},          {"CSR", {1, 1}},        {"DCSR", {1, 1}},
      {"COO", {1, 1}},      {"BCSR(2,2)", {2, 2}},  {"BCSR(2,3)", {2, 3}},
      {"LowerTri", {1, 1}, true}, {"WarpMMA16x16", {1, 1}, false, 16}, {"CSF(3)", {1, 1, 1}},
  };
  return fs;
}

Logical randomTensor(const Family &f, std::mt19937_64 &rng) {
  Logical t;
  for (auto s : f.step) t.dims.push_back(f.fixed ? f.fixed : s * std::uniform_int_distribution<int64_t>(1, 4)(rng));
  if (f.lowerOnly) t.dims[1] = t.dims[0];
  if (f.fixed) {
    // the warp fragment keeps exactly one column of each pair per row
    for (int64_t i = 0; i < t.dims[0]; ++i)
      for (int64_t j = 0; j < t.dims[1]; j += 2)
        t.nz[{i, j + std::uniform_int_distribution<int64_t>(0, 1)(rng)}] =
            std::uniform_int_distribution<int>(1, 9)(rng);
    return t;
  }
  std::vector<int64_t> c(t.dims.size(), 0);
  std::bernoulli_distribution keep(0.4);
  std::uniform_int_distribution<int> val(1, 9);
  while (true) {
    bool ok = !f.lowerOnly || c[1] <= c[0];
    if (ok && keep(rng)) t.nz[c] = val(rng);
    size_t k = 0;
    while (k < c.size() && ++c[k] == t.dims[k]) c[k++] = 0;
    if (k == c.size()) break;
  }
  return t;
}

Env envOf(const Instance &inst) {
  Env env;
  for (auto &[k, v] : inst.scalars) env.vals[k] = v;
  for (auto &[k, v] : inst.ints) env.arrays[k] = v;
  return env;
}

bool sameContents(const Logical &a, const Logical &b) {
  if (a.dims != b.dims) return false;
  for (auto &[c, v] : a.nz)
    if (b.at(c) != v) return false;
  for (auto &[c, v] : b.nz)
    if (a.at(c) != v) return false;
  return true;
}

} // namespace

TEST_CASE("encode then decode returns the tensor") {
  std::mt19937_64 rng(5);
  for (auto &f : families())
    for (int trial = 0; trial < 25; ++trial) {
      CAPTURE(std::string(f.name));
      CAPTURE(trial);
      BoundLayout b = spf::bind("A", builtin(f.name));
      Logical t = randomTensor(f, rng);
      Instance inst;
      encode(b, t, inst, rng);
      CHECK(sameContents(decode(b, inst, t.dims), t));
      // stored() and the value array give the same contents
      Logical viaStored;
      viaStored.dims = t.dims;
      for (auto &e : stored(b, inst)) viaStored.nz[e.coords] += inst.reals.at(b.spec.valueArray())[e.valueIndex];
      CHECK(sameContents(viaStored, t));
    }
}

TEST_CASE("stored elements match the layout relation") {
  std::mt19937_64 rng(9);
  for (auto &f : families()) {
    if (f.fixed) continue; // 16x16 boxes make brute force slow
    for (int trial = 0; trial < 6; ++trial) {
      CAPTURE(std::string(f.name));
      BoundLayout b = spf::bind("A", builtin(f.name));
      Logical t = randomTensor(f, rng);
      Instance inst;
      encode(b, t, inst, rng);
      int64_t span = 0;
      for (auto &[k, v] : inst.ints) span = std::max<int64_t>(span, (int64_t)v.size());
      for (auto d : t.dims) span = std::max(span, d);
      Box box;
      for (auto &v : b.spec.relation.input) box[v.name] = {0, span};
      for (auto &v : b.spec.relation.output) box[v.name] = {0, span};
      std::set<std::vector<int64_t>> fromRelation, fromStored;
      for (auto &[in, out] : enumerate(b.spec.relation, box, envOf(inst))) fromRelation.insert(out);
      for (auto &e : stored(b, inst)) fromStored.insert(e.coords);
      CHECK(fromRelation == fromStored);
    }
  }
}

TEST_CASE("generated instances satisfy the declared properties") {
  std::mt19937_64 rng(13);
  for (auto &f : families()) {
    if (f.fixed) continue;
    for (int trial = 0; trial < 6; ++trial) {
      CAPTURE(std::string(f.name));
      BoundLayout b = spf::bind("A", builtin(f.name));
      Logical t = randomTensor(f, rng);
      Instance inst;
      encode(b, t, inst, rng);
      Env env = envOf(inst);
      int64_t span = 0;
      for (auto &[k, v] : inst.ints) span = std::max<int64_t>(span, (int64_t)v.size());
      for (auto d : t.dims) span = std::max(span, d);
      Box box;
      for (auto &v : b.spec.relation.input) box[v.name] = {0, span};
      for (auto &v : b.spec.relation.output) box[v.name] = {0, span};
      auto tuples = enumerate(b.spec.relation, box, env);
      for (auto &prop : b.spec.properties) {
        if (!prop.canonicalArg) continue;
        const auto &in = b.spec.relation.input;
        size_t argPos = 0;
        while (argPos < in.size() && in[argPos].name != *prop.canonicalArg) ++argPos;
        REQUIRE(argPos < in.size());
        const auto &arr = inst.ints.at(prop.uf);
        for (auto &[p1, o1] : tuples)
          for (auto &[p2, o2] : tuples) {
            Env e = env;
            for (size_t k = 0; k < in.size(); ++k) {
              e.vals[in[k].name] = p1[k];
              e.vals[in[k].name + "'"] = p2[k];
            }
            e.vals["a"] = p1[argPos];
            e.vals["a'"] = p2[argPos];
            e.vals["f"] = arr.at(p1[argPos]);
            e.vals["f'"] = arr.at(p2[argPos]);
            bool guard = true;
            for (auto &g : prop.guard) guard = guard && g.holds(e);
            if (!guard) continue;
            for (auto &c : prop.conclusion) CHECK(c.holds(e));
          }
      }
    }
  }
}

TEST_CASE("dense reference contraction") {
  ContractionExpr e = parse_contraction("y(i) = A(i,j) * x(j)");
  Logical a{{2, 3}, {{{0, 0}, 5}, {{0, 2}, 7}, {{1, 1}, 9}}};
  Logical x{{3}, {{{0}, 1}, {{1}, 2}, {{2}, 3}}};
  Logical y = dense_contract(e, {{"A", a}, {"x", x}}, {{"i", 2}, {"j", 3}});
  CHECK(y.at({0}) == 26);
  CHECK(y.at({1}) == 18);
}

TEST_CASE("generated problems stay inside the requested ranges") {
  Compiled c = compile(selftestJob("spmv_bcsr"));
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    Problem p = gen_problem(c.is, seed);
    CHECK(p.density >= 0.1);
    CHECK(p.density <= 0.5);
    for (auto &[k, n] : p.extents) {
      CHECK(n >= 1);
      CHECK(n <= 32);
      CHECK(n % 8 == 0);
    }
  }
}

namespace {

bool mutateFirst(Node &n, Node::Kind kind, const std::function<void(Node &)> &fn) {
  if (n.kind == kind) {
    fn(n);
    return true;
  }
  for (auto &k : n.body)
    if (mutateFirst(k, kind, fn)) return true;
  return false;
}

int caught(const Compiled &c, const Ast &ast) {
  int bad = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    try {
      if (!differential_test(c.is, ast, seed).ok) ++bad;
    } catch (std::exception &) {
      ++bad;
    }
  }
  return bad;
}

} // namespace

TEST_CASE("the oracle catches broken kernels") {
  Compiled c = compile(selftestJob("dot_seqiter"));
  REQUIRE(caught(c, c.ast) == 0);

  Ast squared = c.ast; // A * A * B
  REQUIRE(mutateFirst(squared.body, Node::Accumulate, [](Node &n) { n.factors.push_back(n.factors[0]); }));
  CHECK(caught(c, squared) > 0);

  Ast noAdvance = c.ast; // the scan never moves past a mismatch
  REQUIRE(mutateFirst(noAdvance.body, Node::While, [](Node &n) { n.cond = Expr::cnst(0); }));
  CHECK(caught(c, noAdvance) > 0);

  Compiled csr = compile(selftestJob("spmv_csr"));
  Ast shortRows = csr.ast; // drops the last row
  REQUIRE(mutateFirst(shortRows.body, Node::For, [](Node &n) { n.cond.kids[1] = n.cond.kids[1] - Expr::cnst(1); }));
  CHECK(caught(csr, shortRows) > 0);
}
