#include <filesystem>

#include "doctest.h"
#include "golden_jobs.hpp"
#include "spf/analysis.hpp"
#include "spf/enumerate.hpp"
#include "spf/synth.hpp"

using namespace spf;
using namespace spf::testing;

namespace {

const FindPlan &planOf(const Compiled &c, const std::string &v) {
  for (auto &p : c.synth.plans)
    if (p.var == v) return p;
  throw Error("test", "no plan for " + v);
}

LoopTag tagOf(const Compiled &c, const std::string &v) { return c.tags.at(c.scan.position(v)); }

JobSpec dotJob(FindPolicy p, const std::string &bLayout = "SV") {
  JobSpec j;
  j.expr = "v = A(i) * B(i)";
  j.layouts = {{"A", "SV"}, {"B", bLayout}};
  j.find = p;
  return j;
}

} // namespace

TEST_CASE("sorted dot product gets an increasing SeqIter without state") {
  Compiled c = compile(dotJob(FindPolicy::Auto));
  const FindPlan &p = planOf(c, "pB");
  CHECK(p.tmpl == FindTemplate::SeqIter);
  CHECK(p.dir == Direction::Increasing);
  CHECK(p.state.empty());
  CHECK_FALSE(p.multi);
  CHECK(p.stopGreater);
  CHECK(planOf(c, "pA").tmpl == FindTemplate::None);
  for (auto &q : c.synth.queries) CHECK(q.verdict != Verdict::Unknown);
}

TEST_CASE("find policy overrides the template") {
  CHECK(planOf(compile(dotJob(FindPolicy::HashMap)), "pB").tmpl == FindTemplate::HashMap);
  CHECK(planOf(compile(dotJob(FindPolicy::Loop)), "pB").tmpl == FindTemplate::Fallback);
}

TEST_CASE("unordered unique indices fall back to a hash map") {
  JobSpec j = dotJob(FindPolicy::Auto, "SVUnsorted");
  j.extraLayouts = parse_layouts(slurp(std::string(SPF_SOURCE_DIR) + "/tests/data/vectors.layout"));
  Compiled c = compile(j);
  CHECK(planOf(c, "pB").tmpl == FindTemplate::HashMap);
  CHECK_FALSE(planOf(c, "pB").multi);
}

TEST_CASE("SeqIter is rejected without a sorted outer scan") {
  JobSpec j;
  j.expr = "v = A(i) * B(i)";
  j.extraLayouts = parse_layouts(slurp(std::string(SPF_SOURCE_DIR) + "/tests/data/vectors.layout"));
  j.layouts = {{"A", "SVUnsorted"}, {"B", "SV"}};
  Compiled c = compile(j);
  CHECK(planOf(c, "pB").tmpl != FindTemplate::SeqIter);
}

TEST_CASE("COO duplicate rows need a multi-match search") {
  JobSpec j;
  j.expr = "C(i,j) = A(i,k) * B(k,j)";
  j.layouts = {{"A", "CSR"}, {"B", "COO"}};
  Compiled c = compile(j);
  bool sawMulti = false;
  for (auto &p : c.synth.plans)
    if (p.tmpl == FindTemplate::SeqIter || p.tmpl == FindTemplate::HashMap) sawMulti |= p.multi;
  CHECK(sawMulti);
}

TEST_CASE("parallel and reduction tags") {
  Compiled csr = compile(selftestJob("spmv_csr"));
  CHECK(tagOf(csr, "pA_i") == LoopTag::Parallel);
  CHECK(tagOf(csr, "pA_j") == LoopTag::Reduction);
  Compiled coo = compile(selftestJob("spmv_coo"));
  CHECK(tagOf(coo, "pA") != LoopTag::Parallel);
  Compiled dot = compile(selftestJob("dot_seqiter"));
  CHECK(tagOf(dot, "pA") == LoopTag::Reduction);
}

TEST_CASE("tiling adds a tile loop and a guard") {
  JobSpec j = selftestJob("tiled_find");
  Compiled c = compile(j);
  CHECK(c.tileVars == std::vector<std::string>{"ti"});
  CHECK(c.scan.position("ti") < c.scan.position("i"));
  REQUIRE(c.guards.count("ti"));
  CHECK(c.guards.at("ti").conds.size() == 2);
  j.tileGuards = false;
  CHECK(compile(j).guards.empty());
}

TEST_CASE("tile transform keeps every point exactly once") {
  JobSpec j;
  j.space = "{[i] : 0 <= i < n}";
  Compiled base = compile(j);
  Transformation t = tile_transform(base.is, "i", 4);
  ExtendedIterationSpace tiled = apply_transform(base.is, t);
  Env env;
  env.vals["n"] = 10;
  auto pts = enumerate(tiled.space, {{"ti", {-2, 5}}, {"i", {-2, 12}}}, env);
  REQUIRE(pts.size() == 10);
  for (auto &p : pts) CHECK(p[0] == p[1] / 4);
}

TEST_CASE("query dump writes one SMT-LIB file per query") {
  Compiled c = compile(dotJob(FindPolicy::Auto));
  auto dir = std::filesystem::temp_directory_path() / "spf_synth_dump";
  std::filesystem::remove_all(dir);
  auto files = dump_queries(c.synth.queries, dir.string(), "dot_");
  CHECK(files.size() == c.synth.queries.size());
  for (auto &f : files) CHECK(slurp(f).find("(check-sat)") != std::string::npos);
}
