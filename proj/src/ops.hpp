#pragma once

// Scalar coercions and elementwise operators shared by the evaluator and
// the built-in functions.

#include "namecalc/formula.hpp"
#include "namecalc/grid.hpp"
#include "namecalc/value.hpp"

namespace namecalc::ops {

OrError<double> to_number(const Scalar& s);
OrError<bool> to_bool(const Scalar& s);

/// Three-way comparison: numbers < text < booleans, text without case.
/// Blank takes the zero value of the other operand's type.
OrError<int> compare(const Scalar& a, const Scalar& b);

/// Number or #VALUE! when the double is not finite.
Scalar finite(double d);

Value unary(UnaryOp op, const Value& v);
Value percent(const Value& v);
Value binary(BinaryOp op, const Value& a, const Value& b);

/// Expands `v` to `shape` by broadcasting; #VALUE! everywhere when it does
/// not conform.
Value fit(const Value& v, Shape shape);

}  // namespace namecalc::ops
