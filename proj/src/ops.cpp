#include "ops.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "namecalc/eval.hpp"

namespace namecalc {

std::optional<Shape> broadcast(Shape a, Shape b) {
  auto dim = [](std::size_t x, std::size_t y) -> std::optional<std::size_t> {
    if (x == y || y == 1) return x;
    if (x == 1) return y;
    return std::nullopt;
  };
  auto r = dim(a.rows, b.rows);
  auto c = dim(a.cols, b.cols);
  if (!r || !c) return std::nullopt;
  return Shape{*r, *c};
}

namespace ops {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool iequal(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

int icompare(std::string_view a, std::string_view b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    int x = std::tolower(static_cast<unsigned char>(a[i]));
    int y = std::tolower(static_cast<unsigned char>(b[i]));
    if (x != y) return x < y ? -1 : 1;
  }
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

int type_rank(const Scalar& s) {
  if (std::holds_alternative<double>(s)) return 0;
  if (std::holds_alternative<std::string>(s)) return 1;
  return 2;
}

Scalar zero_like(const Scalar& s) {
  if (std::holds_alternative<std::string>(s)) return std::string{};
  if (std::holds_alternative<bool>(s)) return false;
  return 0.0;
}

template <class T>
int three_way(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

template <class F>
Value map_cells(const Value& v, F f) {
  std::vector<Scalar> out;
  out.reserve(v.cells().size());
  for (const auto& c : v.cells()) out.push_back(f(c));
  return Value(v.shape(), std::move(out));
}

Scalar arithmetic(BinaryOp op, const Scalar& a, const Scalar& b) {
  auto x = to_number(a);
  if (auto* e = std::get_if<ErrorKind>(&x)) return *e;
  auto y = to_number(b);
  if (auto* e = std::get_if<ErrorKind>(&y)) return *e;
  double l = std::get<double>(x), r = std::get<double>(y);
  switch (op) {
    case BinaryOp::Add: return finite(l + r);
    case BinaryOp::Sub: return finite(l - r);
    case BinaryOp::Mul: return finite(l * r);
    case BinaryOp::Div:
      if (r == 0) return ErrorKind::Div0;
      return finite(l / r);
    case BinaryOp::Pow: return finite(std::pow(l, r));
    default: return ErrorKind::Value;
  }
}

Scalar scalar_binary(BinaryOp op, const Scalar& a, const Scalar& b) {
  if (auto* e = std::get_if<ErrorKind>(&a)) return *e;
  if (auto* e = std::get_if<ErrorKind>(&b)) return *e;
  switch (op) {
    case BinaryOp::Add:
    case BinaryOp::Sub:
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Pow: return arithmetic(op, a, b);
    case BinaryOp::Concat: return display_text(a) + display_text(b);
    default: break;
  }
  auto c = compare(a, b);
  if (auto* e = std::get_if<ErrorKind>(&c)) return *e;
  int k = std::get<int>(c);
  switch (op) {
    case BinaryOp::Eq: return k == 0;
    case BinaryOp::Ne: return k != 0;
    case BinaryOp::Lt: return k < 0;
    case BinaryOp::Le: return k <= 0;
    case BinaryOp::Gt: return k > 0;
    case BinaryOp::Ge: return k >= 0;
    default: return ErrorKind::Value;
  }
}

}  // namespace

Scalar finite(double d) {
  if (!std::isfinite(d)) return ErrorKind::Value;
  return d;
}

OrError<double> to_number(const Scalar& s) {
  if (std::holds_alternative<Blank>(s)) return 0.0;
  if (const auto* d = std::get_if<double>(&s)) return *d;
  if (const auto* b = std::get_if<bool>(&s)) return *b ? 1.0 : 0.0;
  if (const auto* e = std::get_if<ErrorKind>(&s)) return *e;
  std::string_view t = trim(std::get<std::string>(s));
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  double out = 0;
  auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || ec != std::errc{} || end != t.data() + t.size() || !std::isfinite(out)) return ErrorKind::Value;
  return out;
}

OrError<bool> to_bool(const Scalar& s) {
  if (std::holds_alternative<Blank>(s)) return false;
  if (const auto* d = std::get_if<double>(&s)) return *d != 0;
  if (const auto* b = std::get_if<bool>(&s)) return *b;
  if (const auto* e = std::get_if<ErrorKind>(&s)) return *e;
  const auto& t = std::get<std::string>(s);
  if (iequal(t, "TRUE")) return true;
  if (iequal(t, "FALSE")) return false;
  return ErrorKind::Value;
}

OrError<int> compare(const Scalar& a, const Scalar& b) {
  if (const auto* e = std::get_if<ErrorKind>(&a)) return *e;
  if (const auto* e = std::get_if<ErrorKind>(&b)) return *e;
  if (is_blank(a) && is_blank(b)) return 0;
  if (is_blank(a)) return compare(zero_like(b), b);
  if (is_blank(b)) return compare(a, zero_like(a));
  int ra = type_rank(a), rb = type_rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  if (ra == 0) return three_way(std::get<double>(a), std::get<double>(b));
  if (ra == 1) return icompare(std::get<std::string>(a), std::get<std::string>(b));
  return three_way(std::get<bool>(a), std::get<bool>(b));
}

Value unary(UnaryOp op, const Value& v) {
  return map_cells(v, [op](const Scalar& s) -> Scalar {
    auto n = to_number(s);
    if (auto* e = std::get_if<ErrorKind>(&n)) return *e;
    double d = std::get<double>(n);
    return op == UnaryOp::Minus ? -d : d;
  });
}

Value percent(const Value& v) {
  return map_cells(v, [](const Scalar& s) -> Scalar {
    auto n = to_number(s);
    if (auto* e = std::get_if<ErrorKind>(&n)) return *e;
    return std::get<double>(n) / 100.0;
  });
}

Value binary(BinaryOp op, const Value& a, const Value& b) {
  auto shape = broadcast(a.shape(), b.shape());
  if (!shape) return Value(ErrorKind::Value);
  std::vector<Scalar> out;
  out.reserve(shape->size());
  for (std::size_t r = 0; r < shape->rows; ++r) {
    for (std::size_t c = 0; c < shape->cols; ++c) {
      out.push_back(scalar_binary(op, a.broadcast_at(r, c), b.broadcast_at(r, c)));
    }
  }
  return Value(*shape, std::move(out));
}

Value fit(const Value& v, Shape shape) {
  if (v.shape() == shape) return v;
  bool rows_ok = v.rows() == shape.rows || v.rows() == 1;
  bool cols_ok = v.cols() == shape.cols || v.cols() == 1;
  if (!rows_ok || !cols_ok) return Value(shape, ErrorKind::Value);
  std::vector<Scalar> out;
  out.reserve(shape.size());
  for (std::size_t r = 0; r < shape.rows; ++r) {
    for (std::size_t c = 0; c < shape.cols; ++c) out.push_back(v.broadcast_at(r, c));
  }
  return Value(shape, std::move(out));
}

}  // namespace ops
}  // namespace namecalc
