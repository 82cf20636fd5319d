#include <doctest.h>

#include "namecalc/grid.hpp"
#include "namecalc/value.hpp"

#include <cstdlib>

using namespace namecalc;

namespace {

GridRange rect(std::string_view a1) { return *parse_a1("Model", a1); }

GridRange ok(const OrError<GridRange>& r) {
  REQUIRE(std::holds_alternative<GridRange>(r));
  return std::get<GridRange>(r);
}

ErrorKind err(const OrError<GridRange>& r) {
  REQUIRE(std::holds_alternative<ErrorKind>(r));
  return std::get<ErrorKind>(r);
}

}  // namespace

TEST_CASE("column letters") {
  CHECK(column_letters(1) == "A");
  CHECK(column_letters(26) == "Z");
  CHECK(column_letters(27) == "AA");
  CHECK(column_letters(kMaxCols) == "ZZZ");
  for (int c = 1; c <= kMaxCols; c += 37) CHECK(column_number(column_letters(c)) == c);
  CHECK(column_number("ab") == 28);
  CHECK(!column_number("AAAA"));
}

TEST_CASE("A1 text") {
  CHECK(to_a1(rect("F5:X16")) == "F5:X16");
  CHECK(to_a1(rect("C3")) == "C3");
  CHECK(to_a1(rect("F:X")) == "F:X");
  CHECK(to_a1(rect("5:7")) == "5:7");
  CHECK(qualified_a1(rect("F:X")) == "Model!F:X");
  CHECK(rect("X16:F5") == rect("F5:X16"));
  CHECK(!parse_a1("Model", "F5:"));
  CHECK(!parse_a1("Model", "$F$5"));
}

TEST_CASE("intersect") {
  CHECK(ok(intersect(rect("F20:X31"), rect("H:H"))) == rect("H20:H31"));
  CHECK(err(intersect(rect("F:F"), rect("G:G"))) == ErrorKind::Null);
  CHECK(ok(intersect(rect("F:X"), rect("F:X"))) == rect("F:X"));
  CHECK(err(intersect(rect("A1:B2"), *parse_a1("Other", "A1:B2"))) == ErrorKind::Null);
  CHECK(ok(intersect(rect("2:4"), rect("C:D"))) == rect("C2:D4"));
}

TEST_CASE("index_slice") {
  CHECK(ok(index_slice(rect("F:X"), 0, 3)) == rect("H:H"));
  CHECK(ok(index_slice(rect("A1:C10"), 2, 2)) == rect("B2"));
  CHECK(err(index_slice(rect("F:X"), 0, 99)) == ErrorKind::Ref);
  CHECK(ok(index_slice(rect("F6:X17"), 2, 0)) == rect("F7:X7"));
  CHECK(ok(index_slice(rect("F6:X17"), 0, 0)) == rect("F6:X17"));
  CHECK(err(index_slice(rect("F6:X17"), -1, 0)) == ErrorKind::Value);
}

TEST_CASE("shift_range") {
  CHECK(ok(shift_range(rect("F6:X17"), 0, -1)) == rect("E6:W17"));
  CHECK(ok(shift_range(rect("F6:X17"), 0, 0)) == rect("F6:X17"));
  CHECK(err(shift_range(rect("A1:C3"), 0, -1)) == ErrorKind::Ref);
  CHECK(err(shift_range(rect("F:X"), -1, 0)) == ErrorKind::Ref);
  CHECK(ok(shift_range(rect("F:X"), 0, 1)) == rect("G:Y"));
  CHECK(err(shift_range(rect("A10:A12"), 1, 0, Extent{12, 5})) == ErrorKind::Ref);
}

TEST_CASE("clamp, shape and overlap") {
  CHECK(shape_of(rect("F:X"), Extent{47, 24}) == Shape{47, 19});
  CHECK(shape_of(rect("F6:X17")) == Shape{12, 19});
  CHECK(clamp(rect("F:X"), Extent{47, 24}) == rect("F1:X47"));
  CHECK(overlaps(rect("F:X"), rect("A3:F3")));
  CHECK(!overlaps(rect("F:X"), rect("A3:E3")));
  CHECK(contains(rect("F6:X17"), CellAddr{6, 6}));
  CHECK(!contains(rect("F6:X17"), CellAddr{5, 6}));
}

TEST_CASE("value basics") {
  Value v(Shape{2, 3}, Scalar{1.0});
  CHECK(v.rows() == 2);
  CHECK(v.cols() == 3);
  CHECK(!v.is_scalar());
  CHECK(Value(Scalar{std::string("x")}).is_scalar());
  CHECK(!v.first_error());
  v.at(1, 2) = ErrorKind::Div0;
  v.at(1, 1) = ErrorKind::Ref;
  CHECK(v.first_error() == ErrorKind::Ref);
  CHECK(identical(Scalar{0.0}, Scalar{0.0}));
  CHECK(!identical(Scalar{0.0}, Scalar{-0.0}));
  CHECK(error_text(ErrorKind::Div0) == "#DIV/0!");
  CHECK(parse_error_text("#CYCLE!") == ErrorKind::Cycle);
  CHECK(!parse_error_text("#N/A"));
}

TEST_CASE("number formatting is shortest round trip") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(100000) == "100000");
  CHECK(format_number(110907.00083023) == "110907.00083023");
  CHECK(format_number(1e21) == "1e+21");
  CHECK(format_number(1e-7) == "1e-07");
  CHECK(format_number(-0.0) == "-0");
  for (double d : {1.0 / 3, 2.0 / 3, 123456.789, 5e-324, 1.7976931348623157e308, 0.30000000000000004}) {
    CHECK(std::strtod(format_number(d).c_str(), nullptr) == d);
  }
  CHECK(display_text(Scalar{true}) == "TRUE");
  CHECK(display_text(Scalar{Blank{}}).empty());
}
