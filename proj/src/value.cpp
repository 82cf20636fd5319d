#include "namecalc/value.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace namecalc {

namespace {

constexpr std::array<std::pair<ErrorKind, std::string_view>, 6> kErrorNames{{
    {ErrorKind::Name, "#NAME?"},
    {ErrorKind::Value, "#VALUE!"},
    {ErrorKind::Null, "#NULL!"},
    {ErrorKind::Ref, "#REF!"},
    {ErrorKind::Div0, "#DIV/0!"},
    {ErrorKind::Cycle, "#CYCLE!"},
}};

}  // namespace

std::string_view error_text(ErrorKind kind) {
  for (const auto& [k, text] : kErrorNames) {
    if (k == kind) return text;
  }
  return "#VALUE!";
}

std::optional<ErrorKind> parse_error_text(std::string_view text) {
  for (const auto& [k, name] : kErrorNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

bool identical(const Scalar& a, const Scalar& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<double>(&a)) {
    return std::bit_cast<std::uint64_t>(*x) == std::bit_cast<std::uint64_t>(std::get<double>(b));
  }
  return a == b;
}

std::string to_string(Shape s) { return std::to_string(s.rows) + "x" + std::to_string(s.cols); }

Value::Value(Shape shape, Scalar fill) : shape_(shape), cells_(shape.size(), std::move(fill)) {
  if (shape.rows == 0 || shape.cols == 0) throw std::invalid_argument("empty array value");
}

Value::Value(Shape shape, std::vector<Scalar> cells) : shape_(shape), cells_(std::move(cells)) {
  if (shape.rows == 0 || shape.cols == 0) throw std::invalid_argument("empty array value");
  if (cells_.size() != shape.size()) throw std::invalid_argument("array cell count mismatch");
}

std::optional<ErrorKind> Value::first_error() const {
  for (const auto& c : cells_) {
    if (const auto* e = std::get_if<ErrorKind>(&c)) return *e;
  }
  return std::nullopt;
}

bool Value::operator==(const Value& other) const {
  return shape_ == other.shape_ && cells_ == other.cells_;
}

bool identical(const Value& a, const Value& b) {
  if (a.shape() != b.shape()) return false;
  for (std::size_t i = 0; i < a.cells().size(); ++i) {
    if (!identical(a.cells()[i], b.cells()[i])) return false;
  }
  return true;
}

std::string format_number(double d) {
  std::array<char, 400> buf{};
  double mag = std::fabs(d);
  // Plain digits in the everyday range, exponent form outside it.
  auto format = mag == 0 || (mag >= 1e-5 && mag < 1e16) ? std::chars_format::fixed : std::chars_format::scientific;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d, format);
  if (ec != std::errc{}) return "#VALUE!";
  return std::string(buf.data(), end);
}

std::string display_text(const Scalar& s) {
  struct Visitor {
    std::string operator()(Blank) const { return {}; }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(const std::string& t) const { return t; }
    std::string operator()(bool b) const { return b ? "TRUE" : "FALSE"; }
    std::string operator()(ErrorKind e) const { return std::string(error_text(e)); }
  };
  return std::visit(Visitor{}, s);
}

}  // namespace namecalc
