#pragma once

#include <string>

#include "spf/ast.hpp"

namespace spf {

enum class ValueType { F64, F32, I64 };
ValueType parse_value_type(const std::string &s);
const char *cType(ValueType t);

struct EmitConfig {
  /// Includes, min/max helpers and the hash table.
  bool prelude = true;
  ValueType value = ValueType::F64;
  int indent = 2;
};

std::string signature(const Ast &ast, const EmitConfig &cfg = {});
std::string emit_c(const Ast &ast, const EmitConfig &cfg = {});
/// Prototype for `<name>.h`.
std::string emit_header(const Ast &ast, const EmitConfig &cfg = {});

/// Whitespace removed, for layout-insensitive comparison.
std::string squash(const std::string &code);

} // namespace spf
