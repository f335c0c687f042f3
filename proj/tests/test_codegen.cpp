#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "golden_jobs.hpp"
#include "spf/interp.hpp"

using namespace spf;
using namespace spf::testing;
namespace fs = std::filesystem;

TEST_CASE("golden kernels") {
  for (auto &g : goldenCases()) {
    CAPTURE(g.file);
    CHECK(squash(compile(g.job).source) == squash(slurp(goldenPath(g.file))));
  }
}

TEST_CASE("squash ignores layout only") {
  CHECK(squash("for (i = 0;\n  i < n; ++i)  x();") == squash("for(i=0;i<n;++i)x();"));
  CHECK(squash("a + b") != squash("a - b"));
}

TEST_CASE("prelude, header and value types") {
  JobSpec j = selftestJob("dot_hashmap");
  Compiled c = compile(j);
  CHECK(c.source.find("#include <stdint.h>") != std::string::npos);
  CHECK(c.source.find("spf_hash_find") != std::string::npos);
  CHECK(emit_header(c.ast, j.emit).find("void dot_hashmap(double *v") != std::string::npos);
  j.emit.value = parse_value_type("f32");
  CHECK(compile(j).source.find("float *v") != std::string::npos);
  j.emit.prelude = false;
  CHECK(compile(j).source.find("#include") == std::string::npos);
  CHECK_THROWS_AS(parse_value_type("f16"), Error);
  // no hash table unless a kernel needs one
  CHECK(compile(selftestJob("dot_seqiter")).source.find("spf_hash_t") == std::string::npos);
}

TEST_CASE("pragma placement") {
  CHECK(compile(selftestJob("spmv_csr")).source.find("#pragma omp") != std::string::npos);
  JobSpec dot = selftestJob("dot_seqiter");
  CHECK(compile(dot).source.find("#pragma omp") == std::string::npos);
  dot.reductionPragma = true;
  // the SeqIter state is set up outside pA, so pA still gets no pragma
  CHECK(compile(dot).source.find("#pragma omp") == std::string::npos);
  JobSpec loop = selftestJob("dot_loop");
  loop.reductionPragma = true;
  CHECK(compile(loop).source.find("reduction(+:v[0:1])") != std::string::npos);
  JobSpec csr = selftestJob("spmv_csr");
  csr.parallel = false;
  CHECK(compile(csr).source.find("#pragma") == std::string::npos);
}

TEST_CASE("interpreter runs the sorted dot product") {
  Compiled c = compile(selftestJob("dot_seqiter"));
  Instance inst = Instance::parse(R"(
    index A.idx = [1, 3]
    value A.val = [1, 1]
    scalar A.len = 2
    index B.idx = [0, 1, 3]
    value B.val = [1, 1, 1]
    scalar B.len = 3
    value v = [0]
  )");
  Counters k = interpret(c.ast, inst);
  CHECK(inst.reals.at("v")[0] == 2);
  CHECK(k.statements == 2);
  CHECK(k.advances <= 5);
  Instance round = Instance::parse(inst.str());
  CHECK(round.ints == inst.ints);
  CHECK(round.reals == inst.reals);
  CHECK(round.scalars == inst.scalars);
}

TEST_CASE("interpreter rejects out-of-range reads") {
  Compiled c = compile(selftestJob("spmv_csr"));
  Instance inst = Instance::parse(R"(
    scalar A.numRows = 2
    index A.rowPtr = [0, 1, 5]
    index A.colIdx = [0, 1]
    value A.data = [1, 2]
    value x = [1, 1]
    value y = [0, 0]
  )");
  CHECK_THROWS(interpret(c.ast, inst));
}

namespace {

/// C driver holding `inst` as static arrays; prints each output element.
std::string driver(const Compiled &c, const Instance &inst) {
  std::ostringstream s;
  s << c.source << "\n#include <stdio.h>\n";
  for (auto &p : c.ast.params) {
    std::string m = mangle(p.name);
    if (p.role == Param::Scalar) continue;
    s << (p.role == Param::IndexArray ? "static int64_t " : "static double ") << m << "_d[] = {";
    if (p.role == Param::IndexArray)
      for (auto v : inst.ints.at(p.name)) s << v << ",";
    else
      for (auto v : inst.reals.at(p.name)) s << v << ",";
    s << "0};\n";
  }
  s << "int main(void) {\n  " << c.ast.name << "(";
  bool first = true;
  for (auto &p : c.ast.params) {
    s << (first ? "" : ", ");
    first = false;
    if (p.role == Param::Scalar)
      s << inst.scalars.at(p.name);
    else
      s << mangle(p.name) << "_d";
  }
  s << ");\n";
  for (auto &p : c.ast.params)
    if (p.role == Param::OutputArray)
      s << "  for (size_t q = 0; q < " << inst.reals.at(p.name).size() << "; ++q) printf(\"%.17g\\n\", "
        << mangle(p.name) << "_d[q]);\n";
  s << "  return 0;\n}\n";
  return s.str();
}

} // namespace

TEST_CASE("emitted C agrees with the interpreter") {
  if (std::system("cc --version >/dev/null 2>&1") != 0) return;
  fs::path dir = fs::temp_directory_path() / "spf_cc_check";
  fs::create_directories(dir);
  for (const char *k : {"dot_seqiter", "dot_hashmap", "spmv_bcsr", "spmspv_seqiter", "spmspm_coo_csr",
                        "ttm_csf", "three_way"}) {
    CAPTURE(k);
    Compiled c = compile(selftestJob(k));
    for (uint64_t seed : {3u, 4u}) {
      Problem p = gen_problem(c.is, seed);
      std::string src = driver(c, p.inst);
      Instance ran = p.inst;
      interpret(c.ast, ran);
      fs::path cfile = dir / (std::string(k) + ".c"), exe = dir / k, out = dir / (std::string(k) + ".out");
      {
        std::ofstream f(cfile);
        f << src;
      }
      std::string cmd = "cc -std=c99 -O1 -Wall -Werror -Wno-unused-function -fopenmp -o '" + exe.string() +
                        "' '" + cfile.string() + "' && '" + exe.string() + "' > '" + out.string() + "'";
      REQUIRE(std::system(cmd.c_str()) == 0);
      std::ifstream in(out);
      for (auto &prm : c.ast.params)
        if (prm.role == Param::OutputArray)
          for (double want : ran.reals.at(prm.name)) {
            double got = 0;
            REQUIRE(static_cast<bool>(in >> got));
            CHECK(got == doctest::Approx(want).epsilon(1e-12));
          }
    }
  }
}
