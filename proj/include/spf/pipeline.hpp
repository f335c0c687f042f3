#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "spf/analysis.hpp"
#include "spf/ast.hpp"
#include "spf/compose.hpp"
#include "spf/emit.hpp"
#include "spf/oracle.hpp"
#include "spf/scan.hpp"
#include "spf/synth.hpp"

namespace spf {

struct JobSpec {
  std::string name = "kernel";
  /// Contraction text; empty when `space` is given.
  std::string expr;
  /// tensor -> builtin name ("BCSR(8,8)") or the name of a layout in `extraLayouts`.
  std::map<std::string, std::string> layouts;
  std::vector<LayoutSpec> extraLayouts;
  std::vector<ShareDecl> shares;
  std::vector<std::string> order;
  std::vector<std::pair<std::string, int64_t>> tiles;
  std::vector<std::string> permute;
  FindPolicy find = FindPolicy::Auto;
  /// Custom iteration space with one opaque statement.
  std::string space, statement = "S0";
  std::vector<std::string> properties;
  bool parallel = true, reductionPragma = false, tileGuards = true;
  int nodeBudget = 10000;
  EmitConfig emit;
};

struct Compiled {
  JobSpec job;
  ExtendedIterationSpace is;
  ScanResult scan;
  SynthResult synth;
  std::vector<LoopTag> tags;
  std::vector<std::string> tileVars;
  std::map<std::string, TileGuard> guards;
  Ast ast;
  std::string source;
  /// Parse to emitted source.
  double millis = 0;

  std::string report() const;
  std::string plan_json() const;
};

/// Resolves a layout reference against the job's extra layouts, then the builtins.
LayoutSpec resolve_layout(const JobSpec &job, const std::string &ref);
Compiled compile(const JobSpec &job);

/// Named kernels grouped by suite (dot, spmv, spmspv, spmspm, ttm, mixed).
std::vector<std::pair<std::string, JobSpec>> selftest_jobs(const std::string &suite);
std::vector<std::string> selftest_suites();

struct SelftestLine {
  std::string kernel;
  double millis = 0;
  int trials = 0, failures = 0;
  std::string firstFailure;
};

/// Differential check of every kernel of a suite; `trials` == 0 only compiles.
std::vector<SelftestLine> run_selftest(const std::string &suite, uint64_t seed, int trials);

} // namespace spf
