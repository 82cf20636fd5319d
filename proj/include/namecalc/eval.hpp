#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "namecalc/depgraph.hpp"
#include "namecalc/value.hpp"
#include "namecalc/workbook.hpp"

namespace namecalc {

/// Result shape of combining two operands elementwise: each dimension must be
/// equal or 1. Nullopt means the shapes do not conform (#VALUE!).
std::optional<Shape> broadcast(Shape a, Shape b);

/// Applies a built-in function to already-evaluated arguments. Range
/// arguments are passed as their values; INDEX then slices the value.
Value eval_builtin(std::string_view function, const std::vector<Value>& args);

/// Names of the supported built-in functions, upper case.
const std::vector<std::string_view>& builtin_names();

/// Computed value of every name in a workbook.
struct ValueStore {
  std::map<NameKey, Value> values;
  /// Groups of names that form a genuine cycle; every member is #CYCLE!.
  std::vector<std::vector<NameKey>> cycles;

  const Value* find(const NameKey& key) const;
  /// Lookup by display text: "id" or "sheet!id".
  const Value* find(std::string_view display) const;
};

ValueStore evaluate(const Workbook& wb);

/// Evaluates a stand-alone formula as if it were a workbook-scoped formula
/// name seen from `context`.
Value evaluate_formula(const Workbook& wb, const Expr& formula, std::optional<std::string_view> context = std::nullopt);

}  // namespace namecalc
