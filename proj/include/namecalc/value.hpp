#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace namecalc {

/// The closed set of cell error kinds.
enum class ErrorKind { Name, Value, Null, Ref, Div0, Cycle };

std::string_view error_text(ErrorKind kind);
std::optional<ErrorKind> parse_error_text(std::string_view text);

struct Blank {
  bool operator==(const Blank&) const = default;
};

/// One cell's worth of data.
using Scalar = std::variant<Blank, double, std::string, bool, ErrorKind>;

inline bool is_blank(const Scalar& s) { return std::holds_alternative<Blank>(s); }
inline bool is_number(const Scalar& s) { return std::holds_alternative<double>(s); }
inline bool is_error(const Scalar& s) { return std::holds_alternative<ErrorKind>(s); }

/// Bitwise equality: numbers compare by representation, so 0.0 and -0.0 differ.
bool identical(const Scalar& a, const Scalar& b);

struct Shape {
  std::size_t rows = 1;
  std::size_t cols = 1;
  std::size_t size() const { return rows * cols; }
  bool operator==(const Shape&) const = default;
};

std::string to_string(Shape s);  // "12x19"

/// Rectangular, non-empty array of scalars. A 1x1 value is a scalar.
class Value {
 public:
  Value() : cells_(1, Blank{}) {}
  Value(Scalar s) : cells_{std::move(s)} {}  // NOLINT: implicit by intent
  Value(Shape shape, Scalar fill);
  Value(Shape shape, std::vector<Scalar> cells);

  Shape shape() const { return shape_; }
  std::size_t rows() const { return shape_.rows; }
  std::size_t cols() const { return shape_.cols; }
  bool is_scalar() const { return shape_.rows == 1 && shape_.cols == 1; }

  const Scalar& at(std::size_t r, std::size_t c) const { return cells_[r * shape_.cols + c]; }
  Scalar& at(std::size_t r, std::size_t c) { return cells_[r * shape_.cols + c]; }

  /// Element access under broadcasting: a unit dimension repeats.
  const Scalar& broadcast_at(std::size_t r, std::size_t c) const {
    return at(shape_.rows == 1 ? 0 : r, shape_.cols == 1 ? 0 : c);
  }

  const Scalar& scalar() const { return cells_.front(); }
  const std::vector<Scalar>& cells() const { return cells_; }

  /// First error in row-major order, if any.
  std::optional<ErrorKind> first_error() const;

  bool operator==(const Value& other) const;

 private:
  Shape shape_{};
  std::vector<Scalar> cells_;
};

bool identical(const Value& a, const Value& b);

/// Shortest decimal text that round-trips the double.
std::string format_number(double d);

/// Display form used by concatenation and TSV output.
std::string display_text(const Scalar& s);

}  // namespace namecalc
