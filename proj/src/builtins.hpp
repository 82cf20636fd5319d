#pragma once

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "namecalc/grid.hpp"
#include "namecalc/value.hpp"
#include "namecalc/workbook.hpp"

namespace namecalc {

/// An unevaluated grid reference. `displaced` names the formula-bearing
/// range whose cells this reference reads at an offset; reads outside that
/// range yield Blank.
struct Ref {
  GridRange range;
  std::optional<NameKey> displaced;
};

using Operand = std::variant<Value, Ref>;

class RefReader {
 public:
  virtual ~RefReader() = default;
  virtual Value read(const Ref& ref) = 0;
  virtual Shape shape(const Ref& ref) = 0;
};

Value deref(const Operand& op, RefReader& reader);

bool is_builtin(std::string_view function);

/// Elementwise choice between two branches under broadcasting.
Value if_select(const Value& cond, const Value& then_v, const Value& else_v);

/// Applies a function to evaluated arguments. The evaluator handles IF
/// itself so that unselected branches are never evaluated.
Operand call_builtin(std::string_view function, const std::vector<Operand>& args, RefReader& reader);

}  // namespace namecalc
