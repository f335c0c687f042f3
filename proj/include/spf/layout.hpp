#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spf/expr.hpp"
#include "spf/set.hpp"
#include "spf/solver.hpp"

namespace spf {

enum class Flavor { Range, Injective, Monotone, StrictMonotone, Periodic, Covary, Other };
const char *flavorName(Flavor f);

/// guard -> conclusion, universally quantified over two instances. The
/// placeholders are `a`, `a'` (arguments of `uf`), `f`, `f'` (its values)
/// and primed/unprimed physical variables of the layout.
struct IndexArrayProperty {
  std::string uf;
  std::vector<Formula> guard;      // atoms
  std::vector<Formula> conclusion; // atoms
  Flavor flavor = Flavor::Other;
  /// Physical variable passed to `uf` in the layout relation, if it is a
  /// plain variable. Guards over other physical variables only make sense
  /// for that usage.
  std::optional<std::string> canonicalArg;
  /// Guard mentions physical variables.
  bool guardsLayout = false;

  std::string str() const;
};

/// Ground `prop` for the instance pair. Each substitution binds the
/// unprimed physical variables the property mentions and `a`. Returns the
/// clause in both orientations.
std::vector<Formula> instantiate_property(const IndexArrayProperty &prop,
                                          const std::map<std::string, AffineExpr> &inst1,
                                          const std::map<std::string, AffineExpr> &inst2);

struct FieldDecl {
  enum Role { Index, Value, Scalar };
  std::string name;
  Role role = Index;
};

struct LayoutSpec {
  std::string name;
  std::vector<std::string> physical, logical;
  PresburgerRelation relation;
  Expr value;
  std::vector<FieldDecl> fields;
  std::vector<IndexArrayProperty> properties;
  /// Logical coordinates are the tensor coordinates themselves.
  bool dense = false;
  /// Builtin family and parameters, for instance generation.
  std::string family;
  std::vector<int64_t> params;

  const FieldDecl *field(const std::string &n) const;
  std::string valueArray() const;
  std::vector<const IndexArrayProperty *> propertiesOf(const std::string &uf) const;
};

/// One or more `layout NAME { ... }` blocks.
std::vector<LayoutSpec> parse_layouts(const std::string &text);
LayoutSpec parse_layout(const std::string &text);
std::string print_layout(const LayoutSpec &l);
/// A single "uf: (guard) -> (conclusion)" outside any layout.
IndexArrayProperty parse_property(const std::string &text);

/// Registry: SV, CSR, DCSR, COO, BCSR(br,bc), LowerTri, WarpMMA16x16,
/// CSF(order[,denseTail]), Dense. `name` may carry the parameters in
/// parentheses, e.g. "BCSR(8,8)".
LayoutSpec builtin(const std::string &name, std::vector<int64_t> params = {});
bool isBuiltinName(const std::string &name);

/// Classify and fill flavor/canonicalArg/guardsLayout of every property.
void finalize_layout(LayoutSpec &l);

} // namespace spf
