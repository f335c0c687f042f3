// spf-contract: sparse contraction to C.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "spf/error.hpp"
#include "spf/interp.hpp"
#include "spf/pipeline.hpp"

namespace fs = std::filesystem;
using namespace spf;

namespace {

std::string slurp(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path &path, const std::string &text) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write " + path.string());
  out << text;
}

std::vector<std::string> splitList(const std::string &s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

/// T=name, T=file.layout#Name or T=file.layout (single layout in file).
void addLayout(JobSpec &job, const std::string &arg) {
  auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0) throw Error("cli", "--layout expects T=<name|file#layout>, got '" + arg + "'");
  std::string tensor = arg.substr(0, eq), ref = arg.substr(eq + 1);
  auto hash = ref.find('#');
  std::string file = hash == std::string::npos ? ref : ref.substr(0, hash);
  if (hash != std::string::npos || (!isBuiltinName(ref) && fs::exists(file))) {
    auto specs = parse_layouts(slurp(file));
    std::string want = hash == std::string::npos ? "" : ref.substr(hash + 1);
    if (want.empty()) {
      if (specs.size() != 1) throw Error("cli", file + " holds several layouts; pick one with " + file + "#NAME");
      want = specs[0].name;
    }
    bool found = false;
    for (auto &s : specs)
      if (s.name == want) found = true;
    if (!found) throw Error("cli", "no layout '" + want + "' in " + file);
    for (auto &s : specs) {
      bool dup = false;
      for (auto &e : job.extraLayouts)
        if (e.name == s.name) dup = true;
      if (!dup) job.extraLayouts.push_back(s);
    }
    ref = want;
  }
  job.layouts[tensor] = ref;
}

int selftest(const std::string &suite, uint64_t seed, int trials) {
  int bad = 0;
  for (auto &l : run_selftest(suite, seed, trials)) {
    bool slow = l.millis >= 2000;
    bool ok = l.failures == 0 && !slow;
    if (!ok) ++bad;
    std::cout << (ok ? "ok   " : "FAIL ") << l.kernel << "  codegen " << l.millis << " ms";
    if (l.trials) std::cout << "  " << l.trials - l.failures << "/" << l.trials << " trials";
    if (slow) std::cout << "  (codegen over 2 s)";
    std::cout << "\n";
    if (!l.firstFailure.empty()) std::cout << "     " << l.firstFailure << "\n";
  }
  return bad ? 1 : 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Generate C kernels for sparse tensor contractions"};
  JobSpec job;
  std::vector<std::string> layouts, shares, tiles;
  std::string order, permuteList, find = "auto", emit = "c", outDir, dumpSmt, suite, runFile,
                              valueType = "f64";
  bool dumpSets = false, noParallel = false, noPrelude = false, noGuard = false;
  uint64_t seed = 1;
  int trials = 100;
  app.add_option("contraction", job.expr, "e.g. \"y(i) = A(i,j) * x(j)\"");
  app.add_option("--layout", layouts, "T=<builtin|file#layout>, repeatable");
  app.add_option("--share", shares, "FROM.TO=levels:N, repeatable");
  app.add_option("--order", order, "loop order, comma separated");
  app.add_option("--tile", tiles, "var=size, repeatable");
  app.add_option("--permute", permuteList, "variables to reorder among their slots");
  app.add_option("--find", find, "auto, seqiter, hashmap or loop");
  app.add_option("--emit", emit, "c, h, ast, plan or none");
  app.add_option("--name", job.name, "kernel function name");
  app.add_option("--out-dir", outDir, "write <name>.c, .h, .plan.json and .report.txt here");
  app.add_flag("--no-prelude", noPrelude, "emit only the kernel function");
  app.add_option("--value-type", valueType, "f64, f32 or i64");
  app.add_flag("--dump-sets", dumpSets, "print the iteration space and loop bounds");
  app.add_option("--dump-smt", dumpSmt, "write every solver query as SMT-LIB2 into this directory");
  app.add_option("--selftest", suite, "run a differential suite (dot, spmv, spmspv, spmspm, ttm, mixed, all)");
  app.add_option("--seed", seed, "first seed");
  app.add_option("--trials", trials, "instances per kernel");
  app.add_flag("--no-parallel", noParallel, "no OpenMP pragma");
  app.add_flag("--reduction-pragma", job.reductionPragma, "allow a pragma on scalar reductions");
  app.add_flag("--no-guard", noGuard, "no tile guards");
  app.add_option("--space", job.space, "custom iteration space instead of a contraction");
  app.add_option("--statement", job.statement, "statement name for --space");
  app.add_option("--property", job.properties, "\"uf: (guard) -> (conclusion)\" for --space, repeatable");
  app.add_option("--budget", job.nodeBudget, "solver node budget per query");
  app.add_option("--run", runFile, "interpret the kernel on an instance file and print the outputs");
  CLI11_PARSE(app, argc, argv);

  try {
    if (!suite.empty()) return selftest(suite, seed, trials);
    for (auto &l : layouts) addLayout(job, l);
    for (auto &s : shares) job.shares.push_back(parse_share(s));
    job.order = splitList(order);
    for (auto &t : tiles) {
      auto eq = t.find('=');
      if (eq == std::string::npos) throw Error("cli", "--tile expects var=size, got '" + t + "'");
      try {
        job.tiles.push_back({t.substr(0, eq), std::stoll(t.substr(eq + 1))});
      } catch (std::logic_error &) {
        throw Error("cli", "bad tile size in '" + t + "'");
      }
    }
    job.permute = splitList(permuteList);
    job.find = parse_find_policy(find);
    job.parallel = !noParallel;
    job.tileGuards = !noGuard;
    job.emit.prelude = !noPrelude;
    job.emit.value = parse_value_type(valueType);

    Compiled c = compile(job);
    if (dumpSets) std::cout << c.is.str() << c.scan.str();
    if (!dumpSmt.empty()) {
      fs::create_directories(dumpSmt);
      auto files = dump_queries(c.synth.queries, dumpSmt, job.name + "_");
      std::cerr << "wrote " << files.size() << " queries to " << dumpSmt << "\n";
    }
    if (!outDir.empty()) {
      fs::create_directories(outDir);
      fs::path d(outDir);
      spit(d / (job.name + ".c"), c.source);
      spit(d / (job.name + ".h"), emit_header(c.ast, job.emit));
      spit(d / (job.name + ".plan.json"), c.plan_json());
      spit(d / (job.name + ".report.txt"), c.report());
    } else if (emit == "c") {
      std::cout << c.source;
    } else if (emit == "h") {
      std::cout << emit_header(c.ast, job.emit);
    } else if (emit == "ast") {
      std::cout << dump_ast(c.ast.body);
    } else if (emit == "plan") {
      std::cout << c.plan_json();
    } else if (emit != "none") {
      throw Error("cli", "unknown --emit '" + emit + "'");
    }
    std::cerr << c.report();
    if (!runFile.empty()) {
      Instance inst = Instance::parse(slurp(runFile));
      Counters k = interpret(c.ast, inst);
      if (c.is.expr) {
        for (auto &p : c.ast.params)
          if (p.role == Param::OutputArray) {
            std::cout << p.name << " = [";
            auto &v = inst.reals[p.name];
            for (size_t i = 0; i < v.size(); ++i) std::cout << (i ? ", " : "") << v[i];
            std::cout << "]\n";
          }
      }
      std::cout << "statements " << k.statements << ", advances " << k.advances << ", probes "
                << k.probes << ", tiles " << k.tiles << "\n";
    }
  } catch (std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
