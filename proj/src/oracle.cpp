#include "spf/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "spf/error.hpp"

namespace spf {

double Logical::at(const std::vector<int64_t> &c) const {
  auto it = nz.find(c);
  return it == nz.end() ? 0.0 : it->second;
}

namespace {

std::string q(const BoundLayout &b, const std::string &base) {
  auto it = b.rename.find(base);
  return it == b.rename.end() ? b.tensor + "." + base : it->second;
}

const std::vector<int64_t> &ints(const Instance &inst, const std::string &name) {
  auto it = inst.ints.find(name);
  if (it == inst.ints.end()) throw Error("oracle", "instance has no index array '" + name + "'");
  return it->second;
}

int64_t scalar(const Instance &inst, const std::string &name) {
  auto it = inst.scalars.find(name);
  if (it == inst.scalars.end()) throw Error("oracle", "instance has no scalar '" + name + "'");
  return it->second;
}

int64_t at(const std::vector<int64_t> &a, int64_t i, const std::string &name) {
  if (i < 0 || i >= (int64_t)a.size())
    throw Error("oracle", name + "[" + std::to_string(i) + "] out of bounds");
  return a[i];
}

/// Physical tuples of a sparse layout, in storage order.
std::vector<std::vector<int64_t>> walk(const BoundLayout &b, const Instance &inst) {
  const std::string &fam = b.spec.family;
  std::vector<std::vector<int64_t>> out;
  auto ptr = [&](const std::string &base) { return std::cref(ints(inst, q(b, base))); };
  if (fam == "CSR" || fam == "DCSR" || fam == "BCSR") {
    int64_t rows = scalar(inst, q(b, "numRows"));
    const auto &rp = ptr("rowPtr").get();
    int64_t br = fam == "BCSR" ? b.spec.params[0] : 1, bc = fam == "BCSR" ? b.spec.params[1] : 1;
    for (int64_t i = 0; i < rows; ++i)
      for (int64_t j = at(rp, i, "rowPtr"); j < at(rp, i + 1, "rowPtr"); ++j) {
        if (fam != "BCSR") {
          out.push_back({i, j});
          continue;
        }
        for (int64_t k = 0; k < br; ++k)
          for (int64_t l = 0; l < bc; ++l) out.push_back({i, j, k, l});
      }
  } else if (fam == "LowerTri") {
    int64_t n = scalar(inst, q(b, "numRows"));
    for (int64_t i = 0; i < n; ++i)
      for (int64_t j = 0; j <= i; ++j) out.push_back({i, j});
  } else if (fam == "WarpMMA16x16") {
    for (int64_t i = 0; i < 16; ++i)
      for (int64_t j = 0; j < 8; ++j) out.push_back({i, j});
  } else if (fam == "CSF") {
    int64_t order = b.spec.params[0];
    bool tail = b.spec.params.size() == 2 && b.spec.params[1] == 1;
    std::vector<int64_t> cur(order);
    std::function<void(int64_t)> rec = [&](int64_t l) {
      if (l == order) {
        out.push_back(cur);
        return;
      }
      int64_t lo, hi;
      if (l == 0) {
        lo = 0;
        hi = scalar(inst, q(b, "nnz0"));
      } else if (tail && l == order - 1) {
        lo = 0;
        hi = scalar(inst, q(b, "dim" + std::to_string(l)));
      } else {
        const auto &p = ints(inst, q(b, "ptr" + std::to_string(l)));
        lo = at(p, cur[l - 1], "ptr");
        hi = at(p, cur[l - 1] + 1, "ptr");
      }
      for (int64_t v = lo; v < hi; ++v) {
        cur[l] = v;
        rec(l + 1);
      }
    };
    rec(0);
  } else if (b.spec.physical.size() == 1) {
    // 0 <= p < bound for layouts with one physical variable.
    const std::string &p = b.spec.physical[0];
    Env env;
    for (auto &[k, v] : inst.scalars) env.vals[k] = v;
    std::optional<int64_t> hi;
    for (auto &c : b.spec.relation.disjuncts.at(0).constraints)
      if (c.kind == Constraint::GE && c.expr.coeff(p) == -1 && !c.expr.mentionsInUf(p) &&
          !c.expr.hasUf()) {
        AffineExpr rest = c.expr.without(p);
        bool phys = false;
        for (auto &v : rest.vars())
          if (!inst.scalars.count(v)) phys = true;
        if (phys) continue;
        int64_t h = rest.evaluate(env);
        hi = hi ? std::min(*hi, h) : h;
      }
    if (!hi) throw Error("oracle", "cannot find the extent of layout " + b.spec.name);
    for (int64_t i = 0; i <= *hi; ++i) out.push_back({i});
  } else {
    throw Error("oracle", "no storage walk for layout " + b.spec.name);
  }
  return out;
}

} // namespace

std::vector<StoredElement> stored(const BoundLayout &b, const Instance &inst) {
  if (b.dense()) throw Error("oracle", "stored() needs a sparse layout");
  const auto &rel = b.spec.relation;
  std::vector<AffineExpr> defs;
  for (auto &g : rel.output) {
    bool found = false;
    for (auto &c : rel.disjuncts.at(0).constraints) {
      int64_t k = c.expr.coeff(g.name);
      if (c.kind != Constraint::EQ || (k != 1 && k != -1) || c.expr.mentionsInUf(g.name)) continue;
      defs.push_back(c.expr.without(g.name) * (-k));
      found = true;
      break;
    }
    if (!found) throw Error("oracle", "coordinate " + g.name + " of " + b.spec.name + " is not defined by an equality");
  }
  Env env;
  for (auto &[k, v] : inst.scalars) env.vals[k] = v;
  env.arrays = inst.ints;
  const Expr &value = b.spec.value;
  if (value.op != Expr::Load) throw Error("oracle", "value of " + b.spec.name + " is not an array element");
  std::vector<StoredElement> out;
  for (auto &t : walk(b, inst)) {
    for (size_t i = 0; i < t.size(); ++i) env.vals[b.spec.physical[i]] = t[i];
    StoredElement e;
    for (auto &d : defs) e.coords.push_back(d.evaluate(env));
    e.valueIndex = value.kids[0].eval([&](const std::string &v) { return env.value(v); },
                                      [&](const std::string &a, int64_t i) {
                                        return at(ints(inst, a), i, a);
                                      });
    out.push_back(std::move(e));
  }
  return out;
}

Logical decode(const BoundLayout &b, const Instance &inst, const std::vector<int64_t> &dims) {
  Logical t;
  t.dims = dims;
  const std::string arr = b.dense() ? b.tensor : b.spec.value.name;
  auto it = inst.reals.find(arr);
  if (it == inst.reals.end()) throw Error("oracle", "instance has no value array '" + arr + "'");
  const auto &vals = it->second;
  if (b.dense()) {
    int64_t total = 1;
    for (auto d : dims) total *= d;
    if ((int64_t)vals.size() != total) throw Error("oracle", "dense array " + arr + " has the wrong size");
    std::vector<int64_t> c(dims.size(), 0);
    for (int64_t flat = 0; flat < total; ++flat) {
      int64_t r = flat;
      for (size_t d = dims.size(); d-- > 0;) {
        c[d] = r % dims[d];
        r /= dims[d];
      }
      if (vals[flat] != 0) t.nz[c] = vals[flat];
    }
    return t;
  }
  for (auto &e : stored(b, inst)) {
    if (e.valueIndex < 0 || e.valueIndex >= (int64_t)vals.size())
      throw Error("oracle", arr + "[" + std::to_string(e.valueIndex) + "] out of bounds");
    t.nz[e.coords] += vals[e.valueIndex];
  }
  for (auto it2 = t.nz.begin(); it2 != t.nz.end();)
    it2 = it2->second == 0 ? t.nz.erase(it2) : std::next(it2);
  return t;
}

namespace {

enum class Order { Increasing, Decreasing, Shuffled };

/// Storage order allowed by the properties of the first coordinate array.
Order singleVarOrder(const BoundLayout &b, const std::string &uf) {
  bool any = false, inc = true, dec = true;
  for (auto *p : b.spec.propertiesOf(uf)) {
    any = true;
    Env up, down;
    up.vals = {{"f", 0}, {"f'", 1}};
    down.vals = {{"f", 1}, {"f'", 0}};
    for (auto &c : p->conclusion) {
      if (!c.holds(up)) inc = false;
      if (!c.holds(down)) dec = false;
    }
  }
  if (!any || (inc && dec)) return Order::Shuffled;
  if (inc) return Order::Increasing;
  if (dec) return Order::Decreasing;
  throw Error("oracle", "cannot order the elements of " + b.spec.name);
}

void encodeSingleVar(const BoundLayout &b, const Logical &t, Instance &inst, std::mt19937_64 &rng) {
  const std::string &p = b.spec.physical[0];
  std::vector<std::string> ufs;
  for (auto &g : b.spec.relation.output) {
    std::string name;
    for (auto &c : b.spec.relation.disjuncts.at(0).constraints) {
      if (c.kind != Constraint::EQ || c.expr.coeff(g.name) == 0) continue;
      AffineExpr rest = c.expr.without(g.name);
      if (rest.terms().size() == 1 && rest.terms()[0].atom.uf && rest.constant() == 0 &&
          rest.terms()[0].atom.args.size() == 1 && rest.terms()[0].atom.args[0].asVar() == p)
        name = rest.terms()[0].atom.name;
    }
    if (name.empty()) throw Error("oracle", "coordinate " + g.name + " of " + b.spec.name + " is not a plain array lookup");
    ufs.push_back(name);
  }
  std::vector<std::pair<std::vector<int64_t>, double>> es(t.nz.begin(), t.nz.end());
  Order o = b.spec.family == "SV" || b.spec.family == "COO" ? Order::Increasing : singleVarOrder(b, ufs[0]);
  if (o == Order::Decreasing) std::reverse(es.begin(), es.end());
  if (o == Order::Shuffled) std::shuffle(es.begin(), es.end(), rng);
  int64_t n = (int64_t)es.size();
  for (auto &f : b.spec.fields)
    if (f.role == FieldDecl::Scalar) inst.scalars[f.name] = n;
  for (size_t k = 0; k < ufs.size(); ++k) {
    auto &a = inst.ints[ufs[k]];
    a.clear();
    for (auto &e : es) a.push_back(e.first[k]);
  }
  auto &vals = inst.reals[b.spec.value.name];
  vals.assign(n, 0);
  for (int64_t i = 0; i < n; ++i) {
    int64_t idx = b.spec.value.kids[0].eval(
        [&](const std::string &v) -> int64_t {
          if (v == p) return i;
          throw Error("oracle", "value of " + b.spec.name + " depends on " + v);
        },
        [&](const std::string &a, int64_t) -> int64_t { throw Error("oracle", "value of " + b.spec.name + " loads " + a); });
    if (idx < 0 || idx >= n) throw Error("oracle", "value index out of range in " + b.spec.name);
    vals[idx] = es[i].second;
  }
}

/// Rows of a 2-d tensor: row -> (col, value) in column order.
std::map<int64_t, std::vector<std::pair<int64_t, double>>> rows(const Logical &t) {
  std::map<int64_t, std::vector<std::pair<int64_t, double>>> r;
  for (auto &[c, v] : t.nz) r[c[0]].push_back({c[1], v});
  return r;
}

void encodeCsr(const BoundLayout &b, const Logical &t, Instance &inst, bool doubly) {
  auto r = rows(t);
  auto &rowPtr = inst.ints[q(b, "rowPtr")];
  auto &colIdx = inst.ints[q(b, "colIdx")];
  auto &data = inst.reals[q(b, "data")];
  rowPtr = {0};
  colIdx.clear();
  data.clear();
  auto emitRow = [&](int64_t row) {
    auto it = r.find(row);
    if (it != r.end())
      for (auto &[c, v] : it->second) {
        colIdx.push_back(c);
        data.push_back(v);
      }
    rowPtr.push_back((int64_t)colIdx.size());
  };
  if (doubly) {
    auto &rowIdx = inst.ints[q(b, "rowIdx")];
    rowIdx.clear();
    for (auto &[row, _] : r) {
      rowIdx.push_back(row);
      emitRow(row);
    }
    inst.scalars[q(b, "numRows")] = (int64_t)rowIdx.size();
  } else {
    for (int64_t row = 0; row < t.dims[0]; ++row) emitRow(row);
    inst.scalars[q(b, "numRows")] = t.dims[0];
  }
}

void encodeBcsr(const BoundLayout &b, const Logical &t, Instance &inst) {
  int64_t br = b.spec.params[0], bc = b.spec.params[1];
  int64_t nbr = (t.dims[0] + br - 1) / br;
  std::map<std::pair<int64_t, int64_t>, std::vector<double>> blocks;
  for (auto &[c, v] : t.nz) {
    auto &blk = blocks[{c[0] / br, c[1] / bc}];
    blk.resize(br * bc, 0);
    blk[(c[0] % br) * bc + c[1] % bc] = v;
  }
  auto &rowPtr = inst.ints[q(b, "rowPtr")];
  auto &colIdx = inst.ints[q(b, "colIdx")];
  auto &data = inst.reals[q(b, "data")];
  rowPtr.assign(1, 0);
  colIdx.clear();
  data.clear();
  for (int64_t i = 0; i < nbr; ++i) {
    for (auto it = blocks.lower_bound({i, INT64_MIN}); it != blocks.end() && it->first.first == i; ++it) {
      colIdx.push_back(it->first.second * bc);
      data.insert(data.end(), it->second.begin(), it->second.end());
    }
    rowPtr.push_back((int64_t)colIdx.size());
  }
  inst.scalars[q(b, "numRows")] = nbr;
}

void encodeLowerTri(const BoundLayout &b, const Logical &t, Instance &inst) {
  int64_t n = t.dims[0];
  auto &data = inst.reals[q(b, "data")];
  data.assign(n * (n + 1) / 2, 0);
  for (auto &[c, v] : t.nz) {
    if (c[1] > c[0]) throw Error("oracle", "LowerTri cannot hold an element above the diagonal");
    data[c[0] * (c[0] + 1) / 2 + c[1]] = v;
  }
  inst.scalars[q(b, "numRows")] = n;
}

void encodeWarp(const BoundLayout &b, const Logical &t, Instance &inst) {
  auto &offset = inst.ints[q(b, "offset")];
  auto &data = inst.reals[q(b, "data")];
  offset.assign(512, 0);
  data.assign(128, 0);
  std::set<std::pair<int64_t, int64_t>> seen;
  for (auto &[c, v] : t.nz) {
    int64_t i = c[0], j = c[1] / 2;
    if (i >= 16 || j >= 8 || !seen.insert({i, j}).second)
      throw Error("oracle", "WarpMMA16x16 holds one of each column pair per row");
    offset[32 * i + 4 * j + 1] = c[1] % 2;
    data[i * 8 + j] = v;
  }
}

void encodeCsf(const BoundLayout &b, const Logical &t, Instance &inst) {
  int64_t order = b.spec.params[0];
  bool tail = b.spec.params.size() == 2 && b.spec.params[1] == 1;
  int64_t compressed = tail ? order - 1 : order;
  std::vector<std::vector<int64_t>> idx(compressed), ptr(compressed);
  for (int64_t l = 1; l < compressed; ++l) ptr[l] = {0};
  std::vector<int64_t> prev;
  auto &data = inst.reals[q(b, "data")];
  data.clear();
  int64_t dim = tail ? t.dims[order - 1] : 1;
  for (auto &[c, v] : t.nz) {
    // first level where the prefix differs from the previous element
    int64_t d = 0;
    while (!prev.empty() && d < compressed && prev[d] == c[d]) ++d;
    for (int64_t l = d; l < compressed; ++l) {
      idx[l].push_back(c[l]);
      if (l + 1 < compressed) ptr[l + 1].push_back(ptr[l + 1].back());
      if (l > 0) ++ptr[l].back();
      if (tail && l == compressed - 1) data.resize(data.size() + dim, 0);
    }
    if (tail) data[(idx[compressed - 1].size() - 1) * dim + c[order - 1]] = v;
    else data.push_back(v);
    prev = c;
  }
  inst.scalars[q(b, "nnz0")] = (int64_t)idx[0].size();
  for (int64_t l = 0; l < compressed; ++l) {
    inst.ints[q(b, "idx" + std::to_string(l))] = idx[l];
    if (l > 0) inst.ints[q(b, "ptr" + std::to_string(l))] = ptr[l];
  }
  if (tail) inst.scalars[q(b, "dim" + std::to_string(order - 1))] = dim;
}

} // namespace

void encode(const BoundLayout &b, const Logical &t, Instance &inst, std::mt19937_64 &rng) {
  if (b.dense()) {
    int64_t total = 1;
    for (size_t d = 0; d < t.dims.size(); ++d) {
      total *= t.dims[d];
      inst.scalars[b.tensor + ".dim" + std::to_string(d)] = t.dims[d];
    }
    auto &vals = inst.reals[b.tensor];
    vals.assign(total, 0);
    for (auto &[c, v] : t.nz) {
      int64_t flat = 0;
      for (size_t d = 0; d < c.size(); ++d) flat = flat * t.dims[d] + c[d];
      vals[flat] = v;
    }
    return;
  }
  if (!b.sharedWith.empty()) throw Error("oracle", "cannot encode " + b.tensor + ": its structure belongs to " + b.sharedWith);
  const std::string &fam = b.spec.family;
  if (fam == "CSR" || fam == "DCSR") encodeCsr(b, t, inst, fam == "DCSR");
  else if (fam == "BCSR") encodeBcsr(b, t, inst);
  else if (fam == "LowerTri") encodeLowerTri(b, t, inst);
  else if (fam == "WarpMMA16x16") encodeWarp(b, t, inst);
  else if (fam == "CSF") encodeCsf(b, t, inst);
  else if (b.spec.physical.size() == 1) encodeSingleVar(b, t, inst, rng);
  else throw Error("oracle", "no encoder for layout " + b.spec.name);
}

Logical dense_contract(const ContractionExpr &e, const std::map<std::string, Logical> &inputs,
                       const std::map<std::string, int64_t> &extents) {
  std::vector<std::string> idx = e.indices();
  std::map<std::string, size_t> pos;
  for (size_t i = 0; i < idx.size(); ++i) pos[idx[i]] = i;
  std::vector<int64_t> ext;
  for (auto &i : idx) ext.push_back(extents.at(i));

  struct Flat {
    std::vector<double> v;
    std::vector<size_t> at;
    std::vector<int64_t> dims;
  };
  std::vector<Flat> flats;
  for (auto &in : e.inputs) {
    const Logical &t = inputs.at(in.name);
    Flat f;
    f.dims = t.dims;
    int64_t total = 1;
    for (auto d : t.dims) total *= d;
    f.v.assign(total, 0);
    for (auto &[c, v] : t.nz) {
      int64_t flat = 0;
      for (size_t d = 0; d < c.size(); ++d) flat = flat * t.dims[d] + c[d];
      f.v[flat] = v;
    }
    for (auto &name : in.indices) f.at.push_back(pos.at(name));
    flats.push_back(std::move(f));
  }
  Logical out;
  for (auto &name : e.output.indices) out.dims.push_back(extents.at(name));
  for (int64_t x : ext)
    if (x <= 0) return out;
  std::vector<int64_t> cur(idx.size(), 0);
  std::vector<int64_t> oc(e.output.indices.size());
  for (;;) {
    double prod = 1;
    for (auto &f : flats) {
      int64_t flat = 0;
      for (size_t d = 0; d < f.at.size(); ++d) flat = flat * f.dims[d] + cur[f.at[d]];
      prod *= f.v[flat];
      if (prod == 0) break;
    }
    if (prod != 0) {
      for (size_t d = 0; d < oc.size(); ++d) oc[d] = cur[pos.at(e.output.indices[d])];
      out.nz[oc] += prod;
    }
    bool done = true;
    for (size_t d = idx.size(); d-- > 0;) {
      if (++cur[d] < ext[d]) {
        done = false;
        break;
      }
      cur[d] = 0;
    }
    if (done) break;
  }
  for (auto it = out.nz.begin(); it != out.nz.end();)
    it = it->second == 0 ? out.nz.erase(it) : std::next(it);
  return out;
}

namespace {

Logical randomTensor(const BoundLayout &b, const std::vector<int64_t> &dims, double density,
                     std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> coin(0, 1);
  std::uniform_int_distribution<int> mag(1, 4);
  auto value = [&] { return (double)(coin(rng) < 0.5 ? -mag(rng) : mag(rng)); };
  Logical t;
  t.dims = dims;
  const std::string &fam = b.spec.family;
  if (fam == "WarpMMA16x16") {
    for (int64_t i = 0; i < 16; ++i)
      for (int64_t j = 0; j < 8; ++j)
        if (coin(rng) < density) t.nz[{i, 2 * j + (coin(rng) < 0.5 ? 0 : 1)}] = value();
    return t;
  }
  int64_t total = 1;
  for (auto d : dims) total *= d;
  std::vector<int64_t> c(dims.size());
  for (int64_t flat = 0; flat < total; ++flat) {
    int64_t r = flat;
    for (size_t d = dims.size(); d-- > 0;) {
      c[d] = r % dims[d];
      r /= dims[d];
    }
    if (fam == "LowerTri" && c[1] > c[0]) continue;
    if (coin(rng) < density) t.nz[c] = value();
  }
  return t;
}

} // namespace

Problem gen_problem(const ExtendedIterationSpace &is, uint64_t seed, const GenOptions &opt) {
  if (!is.expr) throw Error("oracle", "only contraction kernels can be checked");
  const ContractionExpr &e = *is.expr;
  std::mt19937_64 rng(seed);
  Problem pr;
  pr.density = std::uniform_real_distribution<double>(opt.minDensity, opt.maxDensity)(rng);
  auto extent = [&](int64_t multiple) {
    int64_t hi = std::max<int64_t>(1, opt.maxExtent / multiple);
    return multiple * std::uniform_int_distribution<int64_t>(1, hi)(rng);
  };
  for (auto &i : e.indices()) pr.extents[i] = extent(1);
  for (auto &in : e.inputs) {
    const BoundLayout *b = is.layoutOf(in.name);
    if (!b || b->dense() || in.indices.size() != 2) continue;
    const std::string &fam = b->spec.family;
    if (fam == "BCSR") {
      pr.extents[in.indices[0]] = extent(b->spec.params[0]);
      pr.extents[in.indices[1]] = extent(b->spec.params[1]);
    } else if (fam == "WarpMMA16x16") {
      pr.extents[in.indices[0]] = pr.extents[in.indices[1]] = 16;
    } else if (fam == "LowerTri") {
      pr.extents[in.indices[1]] = pr.extents[in.indices[0]];
    }
  }
  for (auto &in : e.inputs) {
    const BoundLayout *b = is.layoutOf(in.name);
    if (!b) throw Error("oracle", "tensor " + in.name + " has no layout");
    std::vector<int64_t> dims;
    for (auto &i : in.indices) dims.push_back(pr.extents.at(i));
    Logical t = randomTensor(*b, dims, pr.density, rng);
    encode(*b, t, pr.inst, rng);
    pr.tensors[in.name] = std::move(t);
  }
  const BoundLayout *out = is.layoutOf(e.output.name);
  if (!out) throw Error("oracle", "tensor " + e.output.name + " has no layout");
  std::vector<int64_t> dims;
  for (auto &i : e.output.indices) dims.push_back(pr.extents.at(i));
  if (out->dense()) {
    encode(*out, Logical{dims, {}}, pr.inst, rng);
  } else {
    if (out->sharedWith.empty())
      throw Error("oracle", "sparse output " + out->tensor + " must share its structure");
    for (size_t d = 0; d < dims.size(); ++d) {
      std::string name = out->tensor + ".dim" + std::to_string(d);
      for (auto &f : out->spec.fields)
        if (f.role == FieldDecl::Scalar && f.name == name) pr.inst.scalars[name] = dims[d];
    }
    int64_t size = 0;
    for (auto &s : stored(*out, pr.inst)) size = std::max(size, s.valueIndex + 1);
    pr.inst.reals[out->spec.value.name].assign(size, 0);
  }
  return pr;
}

namespace {

std::string coordStr(const std::vector<int64_t> &c) {
  std::string s = "(";
  for (size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i]);
  return s + ")";
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

} // namespace

DiffResult differential_test(const ExtendedIterationSpace &is, const Ast &ast, uint64_t seed,
                             const GenOptions &opt) {
  DiffResult r;
  r.problem = gen_problem(is, seed, opt);
  const ContractionExpr &e = *is.expr;
  Logical expect = dense_contract(e, r.problem.tensors, r.problem.extents);
  std::ostringstream msg;
  msg << "seed " << seed << ": ";
  try {
    r.counters = interpret(ast, r.problem.inst);
  } catch (Error &x) {
    r.ok = false;
    msg << x.what();
    r.message = msg.str();
    return r;
  }
  const BoundLayout *out = is.layoutOf(e.output.name);
  Logical got = decode(*out, r.problem.inst, expect.dims);
  for (auto &[c, v] : expect.nz)
    if (!close(got.at(c), v)) {
      r.ok = false;
      msg << e.output.name << coordStr(c) << " = " << got.at(c) << ", expected " << v;
      break;
    }
  if (r.ok)
    for (auto &[c, v] : got.nz)
      if (!expect.nz.count(c)) {
        r.ok = false;
        msg << e.output.name << coordStr(c) << " = " << v << ", expected 0";
        break;
      }
  if (r.ok && !out->dense()) {
    std::set<std::vector<int64_t>> held;
    for (auto &s : stored(*out, r.problem.inst)) held.insert(s.coords);
    for (auto &[c, v] : expect.nz)
      if (!held.count(c)) {
        r.ok = false;
        msg << e.output.name << coordStr(c) << " is not stored";
        break;
      }
  }
  if (!r.ok) r.message = msg.str();
  return r;
}

} // namespace spf
