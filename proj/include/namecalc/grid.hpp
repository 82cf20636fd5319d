#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "namecalc/value.hpp"

namespace namecalc {

/// Either a result or a cell error kind.
template <class T>
using OrError = std::variant<T, ErrorKind>;

struct Interval {
  int first = 1;  // 1-based, inclusive
  int last = 1;
  int length() const { return last - first + 1; }
  bool contains(int i) const { return i >= first && i <= last; }
  auto operator<=>(const Interval&) const = default;
};

/// Rectangular region on one sheet. An absent interval means the whole
/// extent of that dimension (e.g. `F:X` has whole rows).
struct GridRange {
  std::string sheet;
  std::optional<Interval> rows;
  std::optional<Interval> cols;

  bool whole_rows() const { return !rows.has_value(); }
  bool whole_cols() const { return !cols.has_value(); }
  bool operator==(const GridRange&) const = default;
};

struct CellAddr {
  int row = 1;
  int col = 1;
  auto operator<=>(const CellAddr&) const = default;
};

inline constexpr int kMaxRows = 9'999'999;
inline constexpr int kMaxCols = 18'278;  // ZZZ

/// Sheet-bounded extent used to clamp whole dimensions.
struct Extent {
  int rows = kMaxRows;
  int cols = kMaxCols;
};

std::string column_letters(int col);                          // 1 -> "A", 28 -> "AB"
std::optional<int> column_number(std::string_view letters);   // case-insensitive

/// A1 text for the rectangle without the sheet: "F5:X16", "C3", "F:X", "5:7".
std::string to_a1(const GridRange& r);
std::string to_a1(CellAddr a);
/// "<sheet>!<a1>"
std::string qualified_a1(const GridRange& r);

/// Parses "F5:X16", "C3", "F:X" or "5:7" (no '$') on the given sheet.
std::optional<GridRange> parse_a1(std::string_view sheet, std::string_view a1);

/// Rectangle with whole dimensions replaced by the extent.
GridRange clamp(const GridRange& r, Extent e);
/// Shape of a bounded rectangle (whole dimensions use the extent).
Shape shape_of(const GridRange& r, Extent e = {});

bool contains(const GridRange& r, CellAddr a);
/// True when the two rectangles share at least one cell (same sheet).
bool overlaps(const GridRange& a, const GridRange& b);

/// Rectangle intersection. Whole bounds take the other operand's bounds.
/// #NULL! when empty or on different sheets.
OrError<GridRange> intersect(const GridRange& a, const GridRange& b);

/// INDEX-style slice: 0 selects the entire extent in that dimension.
/// #REF! when an index exceeds the range, #VALUE! for negative indices.
OrError<GridRange> index_slice(const GridRange& r, int row, int col);

/// Same shape, translated. #REF! when shifting a whole dimension or when the
/// result leaves the sheet.
OrError<GridRange> shift_range(const GridRange& r, int d_row, int d_col, Extent e = {});

}  // namespace namecalc
