#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spf/error.hpp"
#include "spf/pipeline.hpp"

namespace spf::testing {

inline std::string slurp(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline JobSpec selftestJob(const std::string &name) {
  for (auto &[k, j] : selftest_jobs("all"))
    if (k == name) return j;
  throw Error("test", "no selftest kernel " + name);
}

struct GoldenCase {
  std::string file;
  JobSpec job;
};

/// Jobs behind tests/golden/*.c, all emitted without the prelude.
inline std::vector<GoldenCase> goldenCases() {
  auto dot = [](FindPolicy p) {
    JobSpec j;
    j.name = "dot";
    j.expr = "v() = A(i) * B(i)";
    j.layouts = {{"A", "SV"}, {"B", "SV"}};
    j.find = p;
    return j;
  };
  JobSpec spmv;
  spmv.name = "spmv";
  spmv.expr = "y(i) = A(i,j) * x(j)";
  spmv.layouts = {{"A", "CSR"}};
  JobSpec three = selftestJob("three_way");
  three.extraLayouts = parse_layouts(slurp(std::string(SPF_SOURCE_DIR) + "/tests/data/vectors.layout"));
  JobSpec tiled = selftestJob("tiled_find");
  tiled.name = "tiled";
  std::vector<GoldenCase> out = {
      {"dot_loop.c", dot(FindPolicy::Loop)}, {"dot_seqiter.c", dot(FindPolicy::Auto)},
      {"dot_hashmap.c", dot(FindPolicy::HashMap)}, {"spmv_csr.c", spmv},
      {"three_way.c", three},                     {"tiled_find.c", tiled},
  };
  for (auto &c : out) c.job.emit.prelude = false;
  return out;
}

inline std::string goldenPath(const std::string &file) {
  return std::string(SPF_SOURCE_DIR) + "/tests/golden/" + file;
}

} // namespace spf::testing
