#include "builtins.hpp"

#include <algorithm>
#include <cmath>

#include "namecalc/eval.hpp"
#include "ops.hpp"

namespace namecalc {

namespace {

const std::vector<std::string_view> kNames = {"AND", "IF", "INDEX", "LOOKUP", "MATCH", "MAX", "MIN", "NOT", "OR", "SUM"};

// Index argument as an integer, truncated toward zero.
OrError<long long> to_index(const Scalar& s) {
  auto n = ops::to_number(s);
  if (auto* e = std::get_if<ErrorKind>(&n)) return *e;
  double d = std::trunc(std::get<double>(n));
  if (d < -1e9 || d > 1e9) return ErrorKind::Ref;
  return static_cast<long long>(d);
}

Value reduce_numbers(std::string_view fn, const std::vector<Value>& args) {
  double acc = fn == "SUM" ? 0.0 : (fn == "MIN" ? INFINITY : -INFINITY);
  bool any = false;
  for (const auto& v : args) {
    for (const auto& c : v.cells()) {
      if (auto* e = std::get_if<ErrorKind>(&c)) return Value(*e);
      const auto* d = std::get_if<double>(&c);
      if (!d) continue;
      any = true;
      if (fn == "SUM") {
        acc += *d;
      } else if (fn == "MIN") {
        acc = std::min(acc, *d);
      } else {
        acc = std::max(acc, *d);
      }
    }
  }
  if (!any) return Value(0.0);
  return Value(ops::finite(acc));
}

Value reduce_logical(bool is_and, const std::vector<Value>& args) {
  bool acc = is_and;
  bool any = false;
  for (const auto& v : args) {
    for (const auto& c : v.cells()) {
      if (auto* e = std::get_if<ErrorKind>(&c)) return Value(*e);
      bool b = false;
      if (const auto* d = std::get_if<double>(&c)) {
        b = *d != 0;
      } else if (const auto* x = std::get_if<bool>(&c)) {
        b = *x;
      } else {
        continue;
      }
      any = true;
      acc = is_and ? (acc && b) : (acc || b);
    }
  }
  if (!any) return Value(ErrorKind::Value);
  return Value(acc);
}

// Cells of a one-dimensional value, or nullopt for a 2-D one.
std::optional<std::vector<Scalar>> vector_cells(const Value& v) {
  if (v.rows() != 1 && v.cols() != 1) return std::nullopt;
  return v.cells();
}

int type_rank(const Scalar& s) {
  if (std::holds_alternative<double>(s)) return 0;
  if (std::holds_alternative<std::string>(s)) return 1;
  if (std::holds_alternative<bool>(s)) return 2;
  return -1;
}

// 1-based position of `key` in `vec`, or #VALUE! when there is none.
Scalar match_position(const Scalar& key, const std::vector<Scalar>& vec, int type) {
  if (auto* e = std::get_if<ErrorKind>(&key)) return *e;
  if (is_blank(key)) return ErrorKind::Value;
  std::size_t found = 0;
  for (std::size_t p = 0; p < vec.size(); ++p) {
    if (type_rank(vec[p]) != type_rank(key)) continue;
    int k = std::get<int>(ops::compare(vec[p], key));
    if (type == 0 && k == 0) return static_cast<double>(p + 1);
    if ((type == 1 && k <= 0) || (type == -1 && k >= 0)) found = p + 1;
  }
  if (found == 0) return ErrorKind::Value;
  return static_cast<double>(found);
}

Value match(const std::vector<Value>& args) {
  if (args.size() < 2 || args.size() > 3) return Value(ErrorKind::Value);
  auto vec = vector_cells(args[1]);
  if (!vec) return Value(ErrorKind::Value);
  int type = 1;
  if (args.size() == 3) {
    if (!args[2].is_scalar()) return Value(ErrorKind::Value);
    auto t = to_index(args[2].scalar());
    if (auto* e = std::get_if<ErrorKind>(&t)) return Value(*e);
    type = static_cast<int>(std::clamp(std::get<long long>(t), -1LL, 1LL));
  }
  std::vector<Scalar> out;
  for (const auto& key : args[0].cells()) out.push_back(match_position(key, *vec, type));
  return Value(args[0].shape(), std::move(out));
}

Value lookup(const std::vector<Value>& args) {
  if (args.size() < 2 || args.size() > 3) return Value(ErrorKind::Value);
  auto keys = vector_cells(args[1]);
  auto results = vector_cells(args.size() == 3 ? args[2] : args[1]);
  if (!keys || !results) return Value(ErrorKind::Value);
  std::vector<Scalar> out;
  for (const auto& key : args[0].cells()) {
    Scalar p = match_position(key, *keys, 1);
    if (is_error(p)) {
      out.push_back(p);
      continue;
    }
    auto i = static_cast<std::size_t>(std::get<double>(p));
    out.push_back(i <= results->size() ? (*results)[i - 1] : Scalar{ErrorKind::Ref});
  }
  return Value(args[0].shape(), std::move(out));
}

// Slice of a value: 0 keeps the whole dimension.
Value slice_value(const Value& v, long long row, long long col) {
  if (row < 0 || col < 0) return Value(ErrorKind::Value);
  if (row > static_cast<long long>(v.rows()) || col > static_cast<long long>(v.cols())) return Value(ErrorKind::Ref);
  std::size_t r0 = row == 0 ? 0 : row - 1, r1 = row == 0 ? v.rows() : row;
  std::size_t c0 = col == 0 ? 0 : col - 1, c1 = col == 0 ? v.cols() : col;
  std::vector<Scalar> out;
  for (std::size_t r = r0; r < r1; ++r) {
    for (std::size_t c = c0; c < c1; ++c) out.push_back(v.at(r, c));
  }
  return Value(Shape{r1 - r0, c1 - c0}, std::move(out));
}

// Elementwise INDEX with array-valued indices.
Value gather(const Value& array, const Value& rows, const std::optional<Value>& cols) {
  Shape shape = rows.shape();
  if (cols) {
    auto b = broadcast(rows.shape(), cols->shape());
    if (!b) return Value(ErrorKind::Value);
    shape = *b;
  }
  auto pick = [&](long long n, std::size_t extent) -> OrError<std::size_t> {
    if (n == 0 && extent == 1) return std::size_t{0};
    if (n < 1) return ErrorKind::Value;
    if (n > static_cast<long long>(extent)) return ErrorKind::Ref;
    return static_cast<std::size_t>(n - 1);
  };
  std::vector<Scalar> out;
  for (std::size_t r = 0; r < shape.rows; ++r) {
    for (std::size_t c = 0; c < shape.cols; ++c) {
      auto ri = to_index(rows.broadcast_at(r, c));
      if (auto* e = std::get_if<ErrorKind>(&ri)) {
        out.push_back(*e);
        continue;
      }
      long long rn = std::get<long long>(ri), cn = 1;
      if (cols) {
        auto ci = to_index(cols->broadcast_at(r, c));
        if (auto* e = std::get_if<ErrorKind>(&ci)) {
          out.push_back(*e);
          continue;
        }
        cn = std::get<long long>(ci);
      } else if (array.rows() == 1) {
        std::swap(rn, cn);
      } else if (array.cols() != 1) {
        out.push_back(ErrorKind::Value);
        continue;
      }
      auto pr = pick(rn, array.rows());
      auto pc = pick(cn, array.cols());
      if (auto* e = std::get_if<ErrorKind>(&pr)) {
        out.push_back(*e);
      } else if (auto* e2 = std::get_if<ErrorKind>(&pc)) {
        out.push_back(*e2);
      } else {
        out.push_back(array.at(std::get<std::size_t>(pr), std::get<std::size_t>(pc)));
      }
    }
  }
  return Value(shape, std::move(out));
}

Operand index(const std::vector<Operand>& args, RefReader& reader) {
  if (args.size() < 2 || args.size() > 3) return Value(ErrorKind::Value);
  Value rows = deref(args[1], reader);
  std::optional<Value> cols;
  if (args.size() == 3) cols = deref(args[2], reader);

  if (!rows.is_scalar() || (cols && !cols->is_scalar())) {
    return gather(deref(args[0], reader), rows, cols);
  }
  auto ri = to_index(rows.scalar());
  if (auto* e = std::get_if<ErrorKind>(&ri)) return Value(*e);
  long long row = std::get<long long>(ri), col = 0;
  if (cols) {
    auto ci = to_index(cols->scalar());
    if (auto* e = std::get_if<ErrorKind>(&ci)) return Value(*e);
    col = std::get<long long>(ci);
  }

  const Ref* ref = std::get_if<Ref>(&args[0]);
  Shape shape = ref ? reader.shape(*ref) : std::get<Value>(args[0]).shape();
  if (!cols && shape.rows == 1 && shape.cols != 1) {
    col = row;
    row = 0;
  }
  if (!ref) return slice_value(std::get<Value>(args[0]), row, col);
  if (row < 0 || col < 0) return Value(ErrorKind::Value);
  if (row > static_cast<long long>(shape.rows) || col > static_cast<long long>(shape.cols)) {
    return Value(ErrorKind::Ref);
  }
  auto sliced = index_slice(ref->range, static_cast<int>(row), static_cast<int>(col));
  if (auto* e = std::get_if<ErrorKind>(&sliced)) return Value(*e);
  return Ref{std::get<GridRange>(sliced), ref->displaced};
}

Value logical_not(const std::vector<Value>& args) {
  if (args.size() != 1) return Value(ErrorKind::Value);
  std::vector<Scalar> out;
  for (const auto& c : args[0].cells()) {
    auto b = ops::to_bool(c);
    if (auto* e = std::get_if<ErrorKind>(&b)) {
      out.push_back(*e);
    } else {
      out.push_back(!std::get<bool>(b));
    }
  }
  return Value(args[0].shape(), std::move(out));
}

// Values-only reader for eval_builtin.
class NoRefs : public RefReader {
 public:
  Value read(const Ref&) override { return Value(ErrorKind::Ref); }
  Shape shape(const Ref&) override { return Shape{}; }
};

}  // namespace

Value deref(const Operand& op, RefReader& reader) {
  if (const auto* v = std::get_if<Value>(&op)) return *v;
  return reader.read(std::get<Ref>(op));
}

bool is_builtin(std::string_view function) {
  return std::find(kNames.begin(), kNames.end(), function) != kNames.end();
}

const std::vector<std::string_view>& builtin_names() { return kNames; }

Operand call_builtin(std::string_view fn, const std::vector<Operand>& args, RefReader& reader) {
  if (fn == "INDEX") return index(args, reader);
  std::vector<Value> values;
  values.reserve(args.size());
  for (const auto& a : args) values.push_back(deref(a, reader));
  if (fn == "SUM" || fn == "MIN" || fn == "MAX") {
    if (values.empty()) return Value(ErrorKind::Value);
    return reduce_numbers(fn, values);
  }
  if (fn == "AND" || fn == "OR") return reduce_logical(fn == "AND", values);
  if (fn == "NOT") return logical_not(values);
  if (fn == "MATCH") return match(values);
  if (fn == "LOOKUP") return lookup(values);
  if (fn == "IF") {
    if (values.size() < 2 || values.size() > 3) return Value(ErrorKind::Value);
    return if_select(values[0], values[1], values.size() == 3 ? values[2] : Value(false));
  }
  return Value(ErrorKind::Name);
}

Value if_select(const Value& cond, const Value& then_v, const Value& else_v) {
  auto s1 = broadcast(cond.shape(), then_v.shape());
  auto shape = s1 ? broadcast(*s1, else_v.shape()) : std::nullopt;
  if (!shape) return Value(ErrorKind::Value);
  std::vector<Scalar> out;
  out.reserve(shape->size());
  for (std::size_t r = 0; r < shape->rows; ++r) {
    for (std::size_t c = 0; c < shape->cols; ++c) {
      auto b = ops::to_bool(cond.broadcast_at(r, c));
      if (auto* e = std::get_if<ErrorKind>(&b)) {
        out.push_back(*e);
      } else {
        out.push_back(std::get<bool>(b) ? then_v.broadcast_at(r, c) : else_v.broadcast_at(r, c));
      }
    }
  }
  return Value(*shape, std::move(out));
}

Value eval_builtin(std::string_view function, const std::vector<Value>& args) {
  NoRefs reader;
  std::vector<Operand> ops(args.begin(), args.end());
  return deref(call_builtin(function, ops, reader), reader);
}

}  // namespace namecalc
