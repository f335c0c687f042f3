#include "doctest.h"
#include "spf/compose.hpp"
#include "spf/contraction.hpp"
#include "spf/enumerate.hpp"
#include "spf/error.hpp"
#include "spf/layout.hpp"

using namespace spf;

TEST_CASE("CSR relation maps stored positions to coordinates") {
  LayoutSpec csr = builtin("CSR");
  Env env;
  env.vals["numRows"] = 2;
  env.arrays["rowPtr"] = {0, 2, 3};
  env.arrays["colIdx"] = {0, 2, 1};
  auto pairs = enumerate(csr.relation, {{"p_i", {0, 4}}, {"p_j", {0, 4}}, {"g_i", {0, 4}}, {"g_j", {0, 4}}},
                         env);
  std::vector<double> data = {5, 7, 9};
  double dense[2][3] = {};
  for (auto &[in, out] : pairs) dense[out[0]][out[1]] += data[in[1]];
  CHECK(pairs.size() == 3);
  CHECK(dense[0][0] == 5);
  CHECK(dense[0][2] == 7);
  CHECK(dense[1][1] == 9);
  CHECK(dense[0][1] == 0);
  CHECK(dense[1][0] == 0);
  CHECK(dense[1][2] == 0);
}

TEST_CASE("every builtin parses and prints back") {
  for (const char *n : {"SV", "CSR", "DCSR", "COO", "BCSR(8,8)", "LowerTri", "WarpMMA16x16", "CSF(3)",
                        "CSF(3,1)"}) {
    CAPTURE(std::string(n));
    LayoutSpec l = builtin(n);
    CHECK_FALSE(l.physical.empty());
    LayoutSpec again = parse_layout(print_layout(l));
    CHECK(again.name == l.name);
    CHECK(again.physical == l.physical);
    CHECK(again.logical == l.logical);
    CHECK(again.properties.size() == l.properties.size());
  }
  CHECK(builtin("Dense(2)").dense);
  CHECK_THROWS_AS(builtin("CSR(2)"), Error);
  CHECK_THROWS_AS(builtin("Nope"), Error);
}

TEST_CASE("layout DSL reports malformed input") {
  CHECK_THROWS_AS(parse_layout("layout X { physical p; }"), Error);
  CHECK_THROWS_AS(parse_layout("layout X { physical p; logical g; relation { g = q(p) }; value v[p]; }"),
                  Error);
  IndexArrayProperty p = parse_property("idx: (a < a') -> (f < f')");
  CHECK(p.uf == "idx");
  CHECK(p.flavor == Flavor::StrictMonotone);
}

TEST_CASE("contractions parse into free and contraction indices") {
  ContractionExpr e = parse_contraction("C(i,j) = A(i,k) * B(k,j)");
  CHECK(e.output.name == "C");
  CHECK(e.freeIndices == std::vector<std::string>{"i", "j"});
  CHECK(e.contractionIndices == std::vector<std::string>{"k"});
  CHECK(e.inputs.size() == 2);
  ContractionExpr dot = parse_contraction("v = A(i) * B(i)");
  CHECK(dot.output.indices.empty());
  CHECK(access_maps(e).size() == 3);
  CHECK_THROWS_AS(parse_contraction("C(i) = A(i,j"), Error);
  CHECK_THROWS_AS(parse_contraction("C(i) = A(j)"), Error);
}

TEST_CASE("binding qualifies names") {
  BoundLayout a = spf::bind("A", builtin("CSR"));
  CHECK(a.rename.at("p_i") == "pA_i");
  CHECK(a.rename.at("rowPtr") == "A.rowPtr");
  CHECK(a.ownPhysical() == std::vector<std::string>{"pA_i", "pA_j"});
  ShareDecl s = parse_share("A.C=levels:2");
  CHECK(s.from == "A");
  CHECK(s.to == "C");
  CHECK(s.levels == 2);
}

TEST_CASE("combined space of CSR SpMV orders layout variables first") {
  ContractionExpr e = parse_contraction("y(i) = A(i,j) * x(j)");
  std::vector<BoundLayout> ls = {spf::bind("y", builtin("Dense(1)")), spf::bind("A", builtin("CSR")),
                                 spf::bind("x", builtin("Dense(1)"))};
  ExtendedIterationSpace is = combine(e, ls);
  auto pos = [&](const std::string &v) {
    return std::find(is.order.begin(), is.order.end(), v) - is.order.begin();
  };
  CHECK(pos("pA_i") < pos("i"));
  CHECK(pos("pA_j") < pos("j"));
  CHECK(is.isComputation("i"));
  CHECK_FALSE(is.isComputation("pA_j"));
  CHECK(is.properties.size() == 1);
}
