// Acceptance checks, one line per criterion. Exit status 1 if any fails.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>

#include "golden_jobs.hpp"
#include "spf/interp.hpp"
#include "spf/oracle.hpp"
#include "spf/solver.hpp"

using namespace spf;
using namespace spf::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string &why) {
    if (ok) detail = why;
    ok = false;
  }
};

double secondsSince(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome goldens() {
  Outcome o;
  for (auto &g : goldenCases()) {
    std::string want = slurp(goldenPath(g.file));
    std::string got = compile(g.job).source;
    if (squash(want) != squash(got)) o.fail(g.file + " differs");
  }
  if (o.ok) o.detail = "6 kernels match";
  return o;
}

Outcome differential() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  int kernels = 0, trials = 0;
  for (const char *suite : {"spmv", "spmspv", "spmspm", "ttm"})
    for (auto &l : run_selftest(suite, 1, 100)) {
      ++kernels;
      trials += l.trials;
      if (l.trials != 100) o.fail(l.kernel + " ran " + std::to_string(l.trials) + " trials");
      if (l.failures) o.fail(l.kernel + ": " + l.firstFailure);
    }
  double s = secondsSince(t0);
  if (s >= 120) o.fail("took " + std::to_string(s) + " s");
  if (o.ok)
    o.detail = std::to_string(kernels) + " kernels, " + std::to_string(trials) + " trials, " +
               std::to_string((int)s) + " s";
  return o;
}

Outcome counters() {
  Outcome o;
  Compiled seq = compile(selftestJob("dot_seqiter"));
  Compiled loop = compile(selftestJob("dot_loop"));
  Compiled hash = compile(selftestJob("spmspv_hashmap"));
  int64_t worstSlack = INT64_MAX;
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    std::string at = " (seed " + std::to_string(seed) + ")";
    DiffResult a = differential_test(seq.is, seq.ast, seed);
    int64_t an = a.problem.tensors.at("A").nnz(), bn = a.problem.tensors.at("B").nnz();
    if (!a.ok) o.fail("dot_seqiter wrong" + at);
    if (a.counters.advances > an + bn)
      o.fail("pB advanced " + std::to_string(a.counters.advances) + " times" + at);
    worstSlack = std::min(worstSlack, an + bn - a.counters.advances);

    DiffResult b = differential_test(loop.is, loop.ast, seed);
    an = b.problem.tensors.at("A").nnz(), bn = b.problem.tensors.at("B").nnz();
    int64_t visits = b.counters.iterations["pB"];
    if (!b.ok) o.fail("dot_loop wrong" + at);
    if (visits != an * bn) o.fail("fallback visited " + std::to_string(visits) + at);

    DiffResult c = differential_test(hash.is, hash.ast, seed);
    an = c.problem.tensors.at("A").nnz();
    if (!c.ok) o.fail("spmspv_hashmap wrong" + at);
    if (c.counters.probes > an) o.fail("probes " + std::to_string(c.counters.probes) + at);
  }
  if (o.ok) o.detail = "100 seeds, min advance slack " + std::to_string(worstSlack);
  return o;
}

const FindPlan *planOf(const Compiled &c, const std::string &var) {
  for (auto &p : c.synth.plans)
    if (p.var == var) return &p;
  return nullptr;
}

Outcome threeWayPlans() {
  Outcome o;
  Compiled c = compile(selftestJob("three_way"));
  const FindPlan *a = planOf(c, "pA"), *b = planOf(c, "pB"), *h = planOf(c, "pC");
  int pa = c.scan.position("pA");
  if (!a || pa < 0 || c.scan.levels[pa].isAssign || a->tmpl != FindTemplate::None)
    o.fail("pA is not a plain loop");
  if (!b || b->tmpl != FindTemplate::SeqIter || b->dir != Direction::Decreasing)
    o.fail("pB is not a decreasing SeqIter");
  if (!h || h->tmpl != FindTemplate::HashMap) o.fail("pC is not a HashMap");
  if (o.ok) o.detail = "pA loop, pB seqiter decreasing, pC hashmap";
  return o;
}

LoopTag tagOf(const Compiled &c, const std::string &var) {
  int p = c.scan.position(var);
  return p < 0 ? LoopTag::None : c.tags[p];
}

Outcome parallelTags() {
  Outcome o;
  JobSpec csr = selftestJob("spmv_csr");
  Compiled c = compile(csr);
  if (tagOf(c, "pA_i") != LoopTag::Parallel) o.fail("CSR outer loop not parallel");
  if (tagOf(c, "pA_j") != LoopTag::Reduction) o.fail("CSR inner loop not a reduction");

  JobSpec dcsr = selftestJob("spmv_dcsr");
  Compiled with = compile(dcsr);
  LayoutSpec bare = builtin("DCSR", {});
  bare.name = "DCSRUnordered";
  std::erase_if(bare.properties, [](const IndexArrayProperty &p) { return p.uf == "rowIdx"; });
  dcsr.extraLayouts.push_back(bare);
  dcsr.layouts["A"] = "DCSRUnordered";
  Compiled without = compile(dcsr);
  if (tagOf(with, "pA_i") != LoopTag::Parallel) o.fail("DCSR outer loop not parallel with the property");
  if (tagOf(without, "pA_i") == LoopTag::Parallel) o.fail("DCSR outer loop parallel without the property");
  if (o.ok)
    o.detail = std::string("csr ") + tagName(tagOf(c, "pA_i")) + "/" + tagName(tagOf(c, "pA_j")) +
               ", dcsr " + tagName(tagOf(with, "pA_i")) + " vs " + tagName(tagOf(without, "pA_i"));
  return o;
}

Outcome tileGuard() {
  Outcome o;
  JobSpec j = selftestJob("tiled_find");
  Compiled guarded = compile(j);
  j.tileGuards = false;
  Compiled plain = compile(j);
  Instance inst;
  inst.scalars["n"] = 64;
  inst.ints["f"].resize(64);
  for (int64_t i = 0; i < 64; ++i) inst.ints["f"][i] = 3 * i + 1;
  std::string detail;
  for (int64_t pos : {0, 21, 37, 63}) {
    inst.scalars["k"] = inst.ints["f"][pos];
    Instance a = inst, b = inst;
    Counters g = interpret(guarded.ast, a), p = interpret(plain.ast, b);
    std::string at = " (k at " + std::to_string(pos) + ")";
    if (g.tiles > 2) o.fail("guarded run entered " + std::to_string(g.tiles) + " tiles" + at);
    if (p.tiles != 8) o.fail("unguarded run entered " + std::to_string(p.tiles) + " tiles" + at);
    if (g.calls["S0"] != 1 || p.calls["S0"] != 1) o.fail("S0 not run exactly once" + at);
    if (pos == 37)
      detail = "tiles " + std::to_string(g.tiles) + " vs " + std::to_string(p.tiles) + ", S0 once";
  }
  if (o.ok) o.detail = detail;
  return o;
}

// Random formulas over x, y, z and a unary f, all values in [-2, 2].
struct QueryGen {
  std::mt19937_64 rng;
  std::vector<AffineExpr> pool;

  explicit QueryGen(uint64_t seed) : rng(seed) {
    auto v = [](const char *n) { return AffineExpr::var(n); };
    pool = {v("x"), v("y"), v("z")};
    for (AffineExpr arg : {v("x"), v("y"), v("z"), v("x") + 1, v("y") - 1})
      pool.push_back(AffineExpr::app("f", {arg}));
  }
  int64_t pick(int64_t lo, int64_t hi) { return std::uniform_int_distribution<int64_t>(lo, hi)(rng); }

  Formula atom(const std::vector<AffineExpr> &terms) {
    AffineExpr e = pick(-3, 3);
    for (int n = (int)pick(1, 3); n > 0; --n) {
      int64_t c = pick(-2, 2);
      e += terms[pick(0, (int64_t)terms.size() - 1)] * (c ? c : 1);
    }
    static const Formula::Kind kinds[] = {Formula::Eq, Formula::Ge, Formula::Ne};
    return Formula::atom(kinds[pick(0, 2)], e);
  }

  std::vector<Formula> query() {
    // three variables plus at most three applications keep the search small
    std::vector<AffineExpr> terms(pool.begin(), pool.begin() + 3);
    std::vector<size_t> apps = {3, 4, 5, 6, 7};
    std::shuffle(apps.begin(), apps.end(), rng);
    for (int i = 0, n = (int)pick(1, 3); i < n; ++i) terms.push_back(pool[apps[i]]);
    std::vector<Formula> fs;
    for (int n = (int)pick(2, 5); n > 0; --n)
      fs.push_back(pick(0, 2) ? atom(terms) : Formula::disj({atom(terms), atom(terms)}));
    for (auto &t : terms) {
      fs.push_back(Formula::ge(t, -2));
      fs.push_back(Formula::le(t, 2));
    }
    return fs;
  }
};

/// Every assignment of x, y, z and of f at the arguments actually used.
bool exhaustiveSat(const std::vector<Formula> &fs) {
  std::vector<Atom> apps;
  for (auto &f : fs) f.collectApps(apps);
  Env env;
  std::map<int64_t, int64_t> table;
  env.ufHook = [&](const std::string &, const std::vector<int64_t> &a) -> std::optional<int64_t> {
    auto it = table.find(a[0]);
    if (it == table.end()) return std::nullopt;
    return it->second;
  };
  for (int64_t x = -2; x <= 2; ++x)
    for (int64_t y = -2; y <= 2; ++y)
      for (int64_t z = -2; z <= 2; ++z) {
        env.vals = {{"x", x}, {"y", y}, {"z", z}};
        std::set<int64_t> args;
        for (auto &a : apps) args.insert(a.args[0].evaluate(env));
        std::vector<int64_t> keys(args.begin(), args.end());
        std::vector<int64_t> vals(keys.size(), -2);
        while (true) {
          table.clear();
          for (size_t i = 0; i < keys.size(); ++i) table[keys[i]] = vals[i];
          bool all = true;
          for (auto &f : fs)
            if (!f.holds(env)) {
              all = false;
              break;
            }
          if (all) return true;
          size_t i = 0;
          while (i < vals.size() && vals[i] == 2) vals[i++] = -2;
          if (i == vals.size()) break;
          ++vals[i];
        }
      }
  return false;
}

Outcome solverAgreement() {
  Outcome o;
  QueryGen gen(2024);
  int sat = 0, unsat = 0;
  for (int q = 0; q < 1000; ++q) {
    auto fs = gen.query();
    Verdict v = solve(fs, SolverOptions{200000}).verdict;
    bool truth = exhaustiveSat(fs);
    if (v == Verdict::Unknown) {
      o.fail("query " + std::to_string(q) + " unknown");
      continue;
    }
    if ((v == Verdict::Sat) != truth) {
      std::string text;
      for (auto &f : fs) text += f.str() + "; ";
      o.fail("query " + std::to_string(q) + " says " + verdictName(v) + ": " + text);
    }
    (truth ? sat : unsat)++;
  }

  // the sorted dot product: must-match and exclusivity with an empty state set
  Compiled dot = compile(selftestJob("dot_seqiter"));
  fs::path dir = fs::temp_directory_path() / "spf_acceptance_smt";
  fs::remove_all(dir);
  auto files = dump_queries(dot.synth.queries, dir.string(), "dot_");
  std::vector<std::string> picked;
  for (size_t i = 0; i < dot.synth.queries.size(); ++i) {
    const QueryRecord &r = dot.synth.queries[i];
    if (r.name != "seqiter.inc.gt.must.S{}" && r.name != "seqiter.inc.gt.excl.S{}") continue;
    if (r.verdict != Verdict::Unsat) o.fail(r.name + " recorded " + verdictName(r.verdict));
    if (solve(r.clauses, SolverOptions{200000}).verdict != Verdict::Unsat) o.fail(r.name + " not unsat on re-solve");
    if (slurp(files[i]).find("(check-sat)") == std::string::npos) o.fail(files[i] + " is not SMT-LIB");
    picked.push_back(files[i]);
  }
  if (picked.size() != 2) o.fail("expected two sorted-dot obligations, found " + std::to_string(picked.size()));
  std::string crossCheck = "no external solver";
  if (o.ok && std::system("python3 -c 'import z3' >/dev/null 2>&1") == 0) {
    std::string cmd = "python3 " + std::string(SPF_SOURCE_DIR) + "/tools/check_smt.py --expect unsat";
    for (auto &f : picked) cmd += " '" + f + "'";
    cmd += " >/dev/null";
    if (std::system(cmd.c_str()) != 0) o.fail("z3 disagrees on the sorted-dot obligations");
    crossCheck = "z3 agrees";
  }
  if (o.ok)
    o.detail = std::to_string(sat) + " sat, " + std::to_string(unsat) + " unsat; obligations unsat, " + crossCheck;
  return o;
}

Outcome codegenTime() {
  Outcome o;
  double worst = 0;
  std::string slowest;
  int n = 0;
  for (auto &l : run_selftest("all", 1, 0)) {
    ++n;
    if (l.millis > worst) worst = l.millis, slowest = l.kernel;
    if (l.millis >= 2000) o.fail(l.kernel + " took " + std::to_string(l.millis) + " ms");
  }
  if (o.ok) o.detail = std::to_string(n) + " kernels, slowest " + slowest + " " + std::to_string((int)worst) + " ms";
  return o;
}

} // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"golden kernels", goldens},       {"differential", differential},
      {"counters", counters},            {"three-way plans", threeWayPlans},
      {"parallel tags", parallelTags},   {"tile guard", tileGuard},
      {"solver agreement", solverAgreement}, {"codegen time", codegenTime},
  };
  int failed = 0, i = 0;
  for (auto &[name, run] : criteria) {
    ++i;
    Outcome o;
    try {
      o = run();
    } catch (std::exception &e) {
      o.fail(std::string("exception: ") + e.what());
    }
    if (!o.ok) ++failed;
    std::cout << (o.ok ? "PASS" : "FAIL") << " " << i << " " << name << ": " << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
