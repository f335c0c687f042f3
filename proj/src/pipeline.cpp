#include "spf/pipeline.hpp"

#include <chrono>
#include "json.hpp"
#include <sstream>

#include "spf/error.hpp"
#include "spf/parse.hpp"

namespace spf {

LayoutSpec resolve_layout(const JobSpec &job, const std::string &ref) {
  for (auto &l : job.extraLayouts)
    if (l.name == ref) return l;
  return builtin(ref);
}

namespace {

ExtendedIterationSpace buildSpace(const JobSpec &job) {
  if (!job.space.empty()) {
    if (!job.expr.empty()) throw Error("job", "give either a contraction or a custom space, not both");
    ExtendedIterationSpace is;
    is.space = parseSet(job.space);
    if (job.order.empty())
      for (auto &v : is.space.tuple) is.order.push_back(v.name);
    else
      is.order = job.order;
    is.statement = job.statement;
    for (auto &p : job.properties) is.properties.push_back(parse_property(p));
    return is;
  }
  if (job.expr.empty()) throw Error("job", "no contraction given");
  ContractionExpr e = parse_contraction(job.expr);
  for (auto &[t, _] : job.layouts)
    if (!e.tensor(t)) throw Error("job", "layout given for unknown tensor '" + t + "'");
  std::map<std::string, BoundLayout> bound;
  std::vector<std::string> pending;
  for (auto *t : e.tensors()) pending.push_back(t->name);
  // tensors that borrow structure are bound after their source
  while (!pending.empty()) {
    bool progress = false;
    for (auto it = pending.begin(); it != pending.end();) {
      const ShareDecl *share = nullptr;
      for (auto &d : job.shares)
        if (d.to == *it) share = &d;
      if (share && !bound.count(share->from)) {
        if (!e.tensor(share->from)) throw Error("job", "cannot share with unknown tensor '" + share->from + "'");
        ++it;
        continue;
      }
      auto ref = job.layouts.count(*it) ? job.layouts.at(*it) : std::string("Dense");
      bound.emplace(*it, spf::bind(*it, resolve_layout(job, ref), share ? &bound.at(share->from) : nullptr,
                                   share ? share->levels : 0));
      it = pending.erase(it);
      progress = true;
    }
    if (!progress) throw Error("job", "circular sharing declarations");
  }
  std::vector<BoundLayout> ls;
  for (auto *t : e.tensors()) ls.push_back(bound.at(t->name));
  return combine(e, ls, job.order);
}

} // namespace

Compiled compile(const JobSpec &job) {
  auto t0 = std::chrono::steady_clock::now();
  Compiled c;
  c.job = job;
  c.is = buildSpace(job);
  for (auto &[var, size] : job.tiles) {
    std::set<std::string> before(c.is.order.begin(), c.is.order.end());
    c.is = apply_transform(c.is, tile_transform(c.is, var, size));
    for (auto &v : c.is.order)
      if (!before.count(v)) c.tileVars.push_back(v);
  }
  if (!job.permute.empty()) c.is = permute(c.is, job.permute);
  c.scan = project_scan(c.is.space, c.is.order);
  SynthOptions so;
  so.policy = job.find;
  so.nodeBudget = job.nodeBudget;
  so.record = true;
  c.synth = synthesize_all(c.is, c.scan, so);
  c.tags = mark_parallel(c.is, c.scan, job.nodeBudget);
  if (job.tileGuards)
    for (auto &tv : c.tileVars)
      if (auto g = tile_guard(c.is, c.scan, tv)) c.guards[tv] = *g;
  AstOptions ao;
  ao.name = job.name;
  ao.parallel = job.parallel;
  ao.reductionPragma = job.reductionPragma;
  ao.tileVars = c.tileVars;
  ao.guards = c.guards;
  c.ast = build_ast(c.is, c.scan, c.synth.plans, c.tags, ao);
  c.source = emit_c(c.ast, job.emit);
  c.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

std::string Compiled::report() const {
  std::ostringstream os;
  os << "kernel " << job.name << "\n";
  if (is.expr) os << "contraction: " << is.expr->str() << "\n";
  os << "iteration space: " << is.space.str() << "\n";
  os << "loops:\n";
  for (size_t k = 0; k < scan.levels.size(); ++k) {
    const LevelScan &l = scan.levels[k];
    const FindPlan &p = synth.plans[k];
    if (l.isAssign) {
      os << "  " << l.var << ": assign " << l.var << " = " << l.value.str() << "\n";
      continue;
    }
    if (p.tmpl == FindTemplate::None) os << "  " << l.var << ": loop";
    else os << "  " << p.str();
    os << ", " << tagName(tags[k]) << "\n";
  }
  for (auto &[tv, g] : guards) {
    os << "  guard " << tv << ":";
    for (auto &e : g.conds) os << " " << e.c();
    os << "\n";
  }
  os << "solver queries: " << synth.queries.size() << "\n";
  std::ostringstream ms;
  ms.precision(3);
  ms << std::fixed << millis;
  os << "codegen time: " << ms.str() << " ms\n";
  return os.str();
}

std::string Compiled::plan_json() const {
  using nlohmann::json;
  json j;
  j["kernel"] = job.name;
  j["order"] = scan.order;
  json loops = json::array();
  for (size_t k = 0; k < scan.levels.size(); ++k) {
    const LevelScan &l = scan.levels[k];
    const FindPlan &p = synth.plans[k];
    json e;
    e["var"] = l.var;
    if (l.isAssign) {
      e["kind"] = "assign";
      e["value"] = l.value.str();
    } else {
      e["kind"] = p.tmpl == FindTemplate::None ? "loop" : "find";
      e["tag"] = tagName(tags[k]);
      if (p.tmpl != FindTemplate::None) {
        e["template"] = templateName(p.tmpl);
        e["direction"] = directionName(p.dir);
        e["state"] = p.state;
        e["multi"] = p.multi;
        e["find"] = p.find.constraint().str();
        e["initLevel"] = p.initLevel;
      }
    }
    loops.push_back(e);
  }
  j["loops"] = loops;
  json gs = json::object();
  for (auto &[tv, g] : guards) {
    json cs = json::array();
    for (auto &e : g.conds) cs.push_back(e.c());
    gs[tv] = cs;
  }
  j["guards"] = gs;
  j["queries"] = synth.queries.size();
  j["codegen_ms"] = millis;
  return j.dump(2) + "\n";
}

namespace {

const char *kMixedVectorLayouts = R"(
layout SVDec {
  physical p_i;
  logical g_i;
  arrays idx: index, val: value;
  scalar len;
  relation { 0 <= p_i < len and g_i = idx(p_i) };
  value val[p_i];
  property idx: (a < a') -> (f > f');
}
layout SVUnsorted {
  physical p_i;
  logical g_i;
  arrays idx: index, val: value;
  scalar len;
  relation { 0 <= p_i < len and g_i = idx(p_i) };
  value val[p_i];
  property idx: (a < a') -> (f != f');
}
)";

JobSpec job(const std::string &name, const std::string &expr,
            std::map<std::string, std::string> layouts, FindPolicy find = FindPolicy::Auto) {
  JobSpec j;
  j.name = name;
  j.expr = expr;
  j.layouts = std::move(layouts);
  j.find = find;
  return j;
}

} // namespace

std::vector<std::string> selftest_suites() { return {"dot", "spmv", "spmspv", "spmspm", "ttm", "mixed", "all"}; }

std::vector<std::pair<std::string, JobSpec>> selftest_jobs(const std::string &suite) {
  std::vector<std::pair<std::string, JobSpec>> out;
  auto add = [&](JobSpec j) { out.emplace_back(j.name, std::move(j)); };
  bool all = suite == "all";
  bool known = false;
  if (all || suite == "dot") {
    known = true;
    const char *dot = "v() = A(i) * B(i)";
    add(job("dot_seqiter", dot, {{"A", "SV"}, {"B", "SV"}}));
    add(job("dot_hashmap", dot, {{"A", "SV"}, {"B", "SV"}}, FindPolicy::HashMap));
    add(job("dot_loop", dot, {{"A", "SV"}, {"B", "SV"}}, FindPolicy::Loop));
  }
  if (all || suite == "spmv") {
    known = true;
    const char *spmv = "y(i) = A(i,j) * x(j)";
    add(job("spmv_csr", spmv, {{"A", "CSR"}}));
    add(job("spmv_lowertri", spmv, {{"A", "LowerTri"}}));
    add(job("spmv_bcsr", spmv, {{"A", "BCSR(8,8)"}}));
    add(job("spmv_dcsr", spmv, {{"A", "DCSR"}}));
    add(job("spmv_coo", spmv, {{"A", "COO"}}));
  }
  if (all || suite == "spmspv") {
    known = true;
    const char *spmspv = "y(i) = A(i,j) * x(j)";
    add(job("spmspv_seqiter", spmspv, {{"A", "CSR"}, {"x", "SV"}}));
    add(job("spmspv_hashmap", spmspv, {{"A", "CSR"}, {"x", "SV"}}, FindPolicy::HashMap));
  }
  if (all || suite == "spmspm") {
    known = true;
    const char *spmspm = "C(i,j) = A(i,k) * B(k,j)";
    for (const char *a : {"COO", "CSR", "DCSR"})
      for (const char *b : {"COO", "CSR", "DCSR"}) {
        std::string n = std::string("spmspm_") + a + "_" + b;
        for (auto &ch : n) ch = (char)std::tolower((unsigned char)ch);
        add(job(n, spmspm, {{"A", a}, {"B", b}}));
      }
    add(job("spmspm_bcsr_bcsr", spmspm, {{"A", "BCSR(8,8)"}, {"B", "BCSR(8,8)"}}));
  }
  if (all || suite == "ttm") {
    known = true;
    JobSpec j = job("ttm_csf", "C(i,j,r) = A(i,j,k) * B(k,r)", {{"A", "CSF(3)"}, {"C", "CSF(3,1)"}});
    j.shares.push_back(parse_share("A.C=levels:2"));
    add(j);
  }
  if (all || suite == "mixed") {
    known = true;
    JobSpec j = job("three_way", "v() = A(i) * B(i) * C(i)", {{"A", "SV"}, {"B", "SVDec"}, {"C", "SVUnsorted"}});
    j.extraLayouts = parse_layouts(kMixedVectorLayouts);
    add(j);
    JobSpec t;
    t.name = "tiled_find";
    t.space = "{[i] : 0 <= i < n and f(i) = k}";
    t.properties = {"f: (a < a') -> (f < f')"};
    t.tiles = {{"i", 8}};
    t.find = FindPolicy::Loop;
    add(t);
  }
  if (!known) throw Error("selftest", "unknown suite '" + suite + "'");
  return out;
}

std::vector<SelftestLine> run_selftest(const std::string &suite, uint64_t seed, int trials) {
  std::vector<SelftestLine> lines;
  for (auto &[name, j] : selftest_jobs(suite)) {
    SelftestLine l;
    l.kernel = name;
    Compiled c = compile(j);
    l.millis = c.millis;
    if (c.is.expr)
      for (int t = 0; t < trials; ++t) {
        uint64_t s = seed + (uint64_t)t;
        ++l.trials;
        DiffResult r = differential_test(c.is, c.ast, s);
        if (r.ok) continue;
        ++l.failures;
        if (l.firstFailure.empty()) {
          // shrink the instance while it still fails
          GenOptions g;
          std::string msg = r.message;
          for (int64_t e = g.maxExtent / 2; e >= 1; e /= 2) {
            GenOptions smaller = g;
            smaller.maxExtent = e;
            DiffResult rs = differential_test(c.is, c.ast, s, smaller);
            if (rs.ok) break;
            g = smaller;
            msg = rs.message;
          }
          l.firstFailure = msg + " (max extent " + std::to_string(g.maxExtent) + ")";
        }
      }
    lines.push_back(l);
  }
  return lines;
}

} // namespace spf
