#include <sstream>

#include "spf/error.hpp"
#include "spf/layout.hpp"
#include "spf/parse.hpp"

namespace spf {

namespace {

const char *kSV = R"(
layout SV {
  physical p_i;
  logical g_i;
  arrays idx: index, val: value;
  scalar len;
  relation { 0 <= p_i < len and g_i = idx(p_i) };
  value val[p_i];
  property idx: (a < a') -> (f < f');
})";

const char *kCSR = R"(
layout CSR {
  physical p_i, p_j;
  logical g_i, g_j;
  arrays rowPtr: index, colIdx: index, data: value;
  scalar numRows;
  relation { 0 <= p_i < numRows and rowPtr(p_i) <= p_j < rowPtr(p_i + 1)
             and g_i = p_i and g_j = colIdx(p_j) };
  value data[p_j];
  property colIdx: (p_i = p_i' and a < a') -> (f < f');
})";

const char *kDCSR = R"(
layout DCSR {
  physical p_i, p_j;
  logical g_i, g_j;
  arrays rowIdx: index, rowPtr: index, colIdx: index, data: value;
  scalar numRows;
  relation { 0 <= p_i < numRows and rowPtr(p_i) <= p_j < rowPtr(p_i + 1)
             and g_i = rowIdx(p_i) and g_j = colIdx(p_j) };
  value data[p_j];
  property rowIdx: (a < a') -> (f < f');
  property colIdx: (p_i = p_i' and a < a') -> (f < f');
})";

const char *kCOO = R"(
layout COO {
  physical p_i;
  logical g_i, g_j;
  arrays rowIdx: index, colIdx: index, data: value;
  scalar numNNZ;
  relation { 0 <= p_i < numNNZ and g_i = rowIdx(p_i) and g_j = colIdx(p_i) };
  value data[p_i];
  property rowIdx: (a < a') -> (f <= f');
  property colIdx: (a < a' and rowIdx(a) = rowIdx(a')) -> (f < f');
})";

const char *kLowerTri = R"(
layout LowerTri {
  physical p_i, p_j;
  logical g_i, g_j;
  arrays data: value;
  scalar numRows;
  relation { 0 <= p_i < numRows and 0 <= p_j <= p_i and g_i = p_i and g_j = p_j };
  value data[p_i * (p_i + 1) / 2 + p_j];
})";

const char *kWarp = R"(
layout WarpMMA16x16 {
  physical p_i, p_j;
  logical g_i, g_j;
  arrays offset: index, data: value;
  relation { 0 <= p_i < 16 and 0 <= p_j < 8 and g_i = p_i
             and g_j = 2*p_j + offset(32*p_i + 4*p_j + 1) };
  value data[p_i * 8 + p_j];
  property offset: 0 <= f < 2;
})";

std::string bcsr(int64_t br, int64_t bc) {
  std::ostringstream os;
  os << "layout BCSR {\n"
     << "  physical p_i, p_j, p_k, p_l;\n"
     << "  logical g_i, g_j;\n"
     << "  arrays rowPtr: index, colIdx: index, data: value;\n"
     << "  scalar numRows;\n"
     << "  relation { 0 <= p_i < numRows and rowPtr(p_i) <= p_j < rowPtr(p_i + 1)\n"
     << "             and 0 <= p_k < " << br << " and 0 <= p_l < " << bc << "\n"
     << "             and g_i = " << br << "*p_i + p_k and g_j = colIdx(p_j) + p_l };\n"
     << "  value data[(p_j * " << br << " + p_k) * " << bc << " + p_l];\n"
     << "  property colIdx: (p_i = p_i' and a < a') -> (f + " << bc << " <= f');\n"
     << "}\n";
  return os.str();
}

/// Nested compressed levels; with denseTail the last level is a dense
/// range of extent dimN.
std::string csf(int64_t order, bool denseTail) {
  std::ostringstream os;
  int64_t last = order - 1;
  os << "layout CSF {\n  physical ";
  for (int64_t l = 0; l < order; ++l) os << (l ? ", " : "") << "p_" << l;
  os << ";\n  logical ";
  for (int64_t l = 0; l < order; ++l) os << (l ? ", " : "") << "g_" << l;
  os << ";\n  arrays ";
  std::string sep;
  for (int64_t l = 0; l < order; ++l) {
    if (denseTail && l == last) break;
    if (l > 0) {
      os << sep << "ptr" << l << ": index";
      sep = ", ";
    }
    os << sep << "idx" << l << ": index";
    sep = ", ";
  }
  os << ", data: value;\n  scalar nnz0";
  if (denseTail) os << ", dim" << last;
  os << ";\n  relation { 0 <= p_0 < nnz0 and g_0 = idx0(p_0)";
  for (int64_t l = 1; l < order; ++l) {
    if (denseTail && l == last)
      os << "\n    and 0 <= p_" << l << " < dim" << l << " and g_" << l << " = p_" << l;
    else
      os << "\n    and ptr" << l << "(p_" << l - 1 << ") <= p_" << l << " < ptr" << l << "(p_"
         << l - 1 << " + 1) and g_" << l << " = idx" << l << "(p_" << l << ")";
  }
  os << " };\n";
  if (denseTail)
    os << "  value data[p_" << last - 1 << " * dim" << last << " + p_" << last << "];\n";
  else
    os << "  value data[p_" << last << "];\n";
  os << "  property idx0: (a < a') -> (f < f');\n";
  for (int64_t l = 1; l < order; ++l) {
    if (denseTail && l == last) break;
    os << "  property idx" << l << ": (p_" << l - 1 << " = p_" << l - 1
       << "' and a < a') -> (f < f');\n";
  }
  os << "}\n";
  return os.str();
}

std::pair<std::string, std::vector<int64_t>> splitName(const std::string &name) {
  auto lp = name.find('(');
  if (lp == std::string::npos) return {name, {}};
  if (name.back() != ')') throw Error("layout", "malformed layout name '" + name + "'");
  std::vector<int64_t> ps;
  std::string inner = name.substr(lp + 1, name.size() - lp - 2);
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      ps.push_back(std::stoll(item));
    } catch (...) {
      throw Error("layout", "bad layout parameter '" + item + "' in '" + name + "'");
    }
  }
  return {name.substr(0, lp), ps};
}

} // namespace

bool isBuiltinName(const std::string &name) {
  static const char *names[] = {"SV", "CSR", "DCSR", "COO", "BCSR", "LowerTri",
                                "WarpMMA16x16", "CSF", "Dense"};
  std::string base = name.substr(0, name.find('('));
  for (auto *n : names)
    if (base == n) return true;
  return false;
}

LayoutSpec builtin(const std::string &fullName, std::vector<int64_t> params) {
  auto [name, inline_] = splitName(fullName);
  if (params.empty()) params = inline_;
  auto noParams = [&]() {
    if (!params.empty()) throw Error("layout", name + " takes no parameters");
  };
  LayoutSpec l;
  if (name == "SV") {
    noParams();
    l = parse_layout(kSV);
  } else if (name == "CSR") {
    noParams();
    l = parse_layout(kCSR);
  } else if (name == "DCSR") {
    noParams();
    l = parse_layout(kDCSR);
  } else if (name == "COO") {
    noParams();
    l = parse_layout(kCOO);
  } else if (name == "LowerTri") {
    noParams();
    l = parse_layout(kLowerTri);
  } else if (name == "WarpMMA16x16") {
    noParams();
    l = parse_layout(kWarp);
  } else if (name == "BCSR") {
    if (params.empty()) params = {8, 8};
    if (params.size() != 2 || params[0] < 1 || params[1] < 1)
      throw Error("layout", "BCSR needs two positive block sizes");
    l = parse_layout(bcsr(params[0], params[1]));
  } else if (name == "CSF") {
    if (params.empty()) params = {3};
    if (params.size() > 2 || params[0] < 1 || params[0] > 8 ||
        (params.size() == 2 && params[1] != 0 && params[1] != 1) ||
        (params.size() == 2 && params[1] == 1 && params[0] < 2))
      throw Error("layout", "CSF takes (order[, denseTail]) with 1 <= order <= 8");
    l = parse_layout(csf(params[0], params.size() == 2 && params[1] == 1));
  } else if (name == "Dense") {
    if (params.size() > 1) throw Error("layout", "Dense takes at most the tensor order");
    l.name = "Dense";
    l.dense = true;
    int64_t order = params.empty() ? 0 : params[0];
    for (int64_t i = 0; i < order; ++i) l.logical.push_back("g_" + std::to_string(i));
  } else {
    throw Error("layout", "unknown layout '" + fullName + "'");
  }
  l.family = name;
  l.params = params;
  return l;
}

} // namespace spf
