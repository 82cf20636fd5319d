#include "namecalc/grid.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace namecalc {

std::string column_letters(int col) {
  std::string out;
  while (col > 0) {
    int rem = (col - 1) % 26;
    out.insert(out.begin(), static_cast<char>('A' + rem));
    col = (col - 1) / 26;
  }
  return out;
}

std::optional<int> column_number(std::string_view letters) {
  if (letters.empty() || letters.size() > 3) return std::nullopt;
  int n = 0;
  for (char ch : letters) {
    if (!std::isalpha(static_cast<unsigned char>(ch))) return std::nullopt;
    n = n * 26 + (std::toupper(static_cast<unsigned char>(ch)) - 'A' + 1);
  }
  return n;
}

std::string to_a1(CellAddr a) { return column_letters(a.col) + std::to_string(a.row); }

std::string to_a1(const GridRange& r) {
  if (r.rows && r.cols) {
    std::string first = to_a1(CellAddr{r.rows->first, r.cols->first});
    if (r.rows->length() == 1 && r.cols->length() == 1) return first;
    return first + ":" + to_a1(CellAddr{r.rows->last, r.cols->last});
  }
  if (r.cols) return column_letters(r.cols->first) + ":" + column_letters(r.cols->last);
  if (r.rows) return std::to_string(r.rows->first) + ":" + std::to_string(r.rows->last);
  return "#REF!";
}

std::string qualified_a1(const GridRange& r) { return r.sheet + "!" + to_a1(r); }

namespace {

struct Part {
  std::optional<int> col;
  std::optional<int> row;
};

std::optional<Part> parse_part(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
  Part p;
  if (i > 0) {
    p.col = column_number(s.substr(0, i));
    if (!p.col) return std::nullopt;
  }
  if (i < s.size()) {
    int row = 0;
    auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), row);
    if (ec != std::errc{} || ptr != s.data() + s.size() || row < 1 || s.size() - i > 7) return std::nullopt;
    p.row = row;
  }
  if (!p.col && !p.row) return std::nullopt;
  return p;
}

}  // namespace

std::optional<GridRange> parse_a1(std::string_view sheet, std::string_view a1) {
  auto colon = a1.find(':');
  auto lhs = parse_part(a1.substr(0, colon));
  if (!lhs) return std::nullopt;
  Part rhs = *lhs;
  if (colon != std::string_view::npos) {
    auto parsed = parse_part(a1.substr(colon + 1));
    if (!parsed) return std::nullopt;
    rhs = *parsed;
  }
  if (lhs->col.has_value() != rhs.col.has_value() || lhs->row.has_value() != rhs.row.has_value()) {
    return std::nullopt;
  }
  GridRange r{std::string(sheet), std::nullopt, std::nullopt};
  if (lhs->row) r.rows = Interval{std::min(*lhs->row, *rhs.row), std::max(*lhs->row, *rhs.row)};
  if (lhs->col) r.cols = Interval{std::min(*lhs->col, *rhs.col), std::max(*lhs->col, *rhs.col)};
  // A single cell or a bare column needs both parts to make sense.
  if (colon == std::string_view::npos && !(r.rows && r.cols)) return std::nullopt;
  return r;
}

GridRange clamp(const GridRange& r, Extent e) {
  GridRange out = r;
  if (!out.rows) out.rows = Interval{1, e.rows};
  if (!out.cols) out.cols = Interval{1, e.cols};
  return out;
}

Shape shape_of(const GridRange& r, Extent e) {
  GridRange c = clamp(r, e);
  return Shape{static_cast<std::size_t>(c.rows->length()), static_cast<std::size_t>(c.cols->length())};
}

bool contains(const GridRange& r, CellAddr a) {
  return (!r.rows || r.rows->contains(a.row)) && (!r.cols || r.cols->contains(a.col));
}

namespace {

std::optional<std::optional<Interval>> meet(const std::optional<Interval>& a, const std::optional<Interval>& b) {
  if (!a) return b;
  if (!b) return a;
  Interval m{std::max(a->first, b->first), std::min(a->last, b->last)};
  if (m.first > m.last) return std::nullopt;
  return std::optional<Interval>{m};
}

}  // namespace

bool overlaps(const GridRange& a, const GridRange& b) {
  return std::holds_alternative<GridRange>(intersect(a, b));
}

OrError<GridRange> intersect(const GridRange& a, const GridRange& b) {
  if (a.sheet != b.sheet) return ErrorKind::Null;
  auto rows = meet(a.rows, b.rows);
  auto cols = meet(a.cols, b.cols);
  if (!rows || !cols) return ErrorKind::Null;
  return GridRange{a.sheet, *rows, *cols};
}

namespace {

// Picks the index-th slot of an interval; 0 keeps the whole interval.
OrError<std::optional<Interval>> slice_dim(const std::optional<Interval>& iv, int index) {
  if (index < 0) return ErrorKind::Value;
  if (index == 0) return iv;
  if (!iv) return std::optional<Interval>{Interval{index, index}};
  if (index > iv->length()) return ErrorKind::Ref;
  int at = iv->first + index - 1;
  return std::optional<Interval>{Interval{at, at}};
}

}  // namespace

OrError<GridRange> index_slice(const GridRange& r, int row, int col) {
  auto rows = slice_dim(r.rows, row);
  if (auto* e = std::get_if<ErrorKind>(&rows)) return *e;
  auto cols = slice_dim(r.cols, col);
  if (auto* e = std::get_if<ErrorKind>(&cols)) return *e;
  return GridRange{r.sheet, std::get<0>(rows), std::get<0>(cols)};
}

OrError<GridRange> shift_range(const GridRange& r, int d_row, int d_col, Extent e) {
  GridRange out = r;
  if (d_row != 0) {
    if (!r.rows) return ErrorKind::Ref;
    out.rows = Interval{r.rows->first + d_row, r.rows->last + d_row};
    if (out.rows->first < 1 || out.rows->last > e.rows) return ErrorKind::Ref;
  }
  if (d_col != 0) {
    if (!r.cols) return ErrorKind::Ref;
    out.cols = Interval{r.cols->first + d_col, r.cols->last + d_col};
    if (out.cols->first < 1 || out.cols->last > e.cols) return ErrorKind::Ref;
  }
  return out;
}

}  // namespace namecalc
