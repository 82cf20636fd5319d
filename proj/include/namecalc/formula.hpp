#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace namecalc {

enum class TokenKind {
  Number,
  Text,
  Bool,
  Ident,
  SheetQual,  // lexeme carries the trailing '!'
  CellRef,
  Op,
  LParen,
  RParen,
  Comma,
  Intersect,  // whitespace between two reference-producing tokens
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string lexeme;
  std::size_t begin = 0;  // byte offsets into the source, [begin, end)
  std::size_t end = 0;
  bool operator==(const Token&) const = default;
};

class LexError : public std::runtime_error {
 public:
  LexError(std::size_t offset, std::string reason);
  std::size_t offset() const { return offset_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t offset_;
  std::string reason_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::string expected, std::string found);
  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  std::size_t offset_;
  std::string expected_;
  std::string found_;
};

/// Lexes one formula. A leading '=' and surrounding "{...}" are skipped.
std::vector<Token> tokenize(std::string_view text);

/// Identifier grammar: a letter or the back arrow first, then letters,
/// digits, '.' or '_', then an optional '?'. Cell-reference look-alikes and
/// the boolean literals are excluded.
bool is_valid_identifier(std::string_view id);
/// `[$]A-ZZZ[$]1-9999999`, case-insensitive.
bool looks_like_cell_ref(std::string_view s);
/// Sheet identifiers: a letter, then letters, digits, '.' or '_'.
bool is_valid_sheet_name(std::string_view s);

// ---------------------------------------------------------------------------
// Abstract syntax tree

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct NumberLit {
  double value = 0;
  bool operator==(const NumberLit&) const = default;
};
struct TextLit {
  std::string value;
  bool operator==(const TextLit&) const = default;
};
struct BoolLit {
  bool value = false;
  bool operator==(const BoolLit&) const = default;
};
struct NameRef {
  std::string identifier;
  std::optional<std::string> sheet;
  bool operator==(const NameRef&) const = default;
};

struct CellCoord {
  int col = 1;
  std::optional<int> row;  // absent for column-only references ("F")
  bool abs_col = false;
  bool abs_row = false;
  bool operator==(const CellCoord&) const = default;
};
struct CellRef {
  std::optional<std::string> sheet;
  CellCoord first;
  std::optional<CellCoord> last;  // present for "A1:B2" and "F:X"
  bool operator==(const CellRef&) const = default;
};

enum class UnaryOp { Plus, Minus };
enum class BinaryOp { Add, Sub, Mul, Div, Pow, Concat, Eq, Ne, Lt, Le, Gt, Ge };

std::string_view to_string(UnaryOp op);
std::string_view to_string(BinaryOp op);

struct Unary {
  UnaryOp op;
  ExprPtr operand;
};
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct Intersect {
  ExprPtr lhs;
  ExprPtr rhs;
};
struct Percent {
  ExprPtr operand;
};
struct Call {
  std::string function;  // upper-cased
  std::vector<ExprPtr> args;
};

struct Expr {
  std::variant<NumberLit, TextLit, BoolLit, NameRef, CellRef, Unary, Binary, Intersect, Percent, Call> node;
};

/// Structural equality through the shared children.
bool operator==(const Expr& a, const Expr& b);
bool same_tree(const ExprPtr& a, const ExprPtr& b);

// Builders, mostly for tests and fixtures.
ExprPtr make_number(double v);
ExprPtr make_text(std::string v);
ExprPtr make_bool(bool v);
ExprPtr make_name(std::string id, std::optional<std::string> sheet = std::nullopt);
ExprPtr make_cell(CellRef ref);
ExprPtr make_unary(UnaryOp op, ExprPtr operand);
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_intersect(ExprPtr lhs, ExprPtr rhs);
ExprPtr make_percent(ExprPtr operand);
ExprPtr make_call(std::string function, std::vector<ExprPtr> args);

ExprPtr parse(const std::vector<Token>& tokens);
/// tokenize + parse.
ExprPtr parse_formula(std::string_view text);

/// Canonical text with minimal parenthesization.
std::string render(const Expr& e);
inline std::string render(const ExprPtr& e) { return render(*e); }

struct QualifiedName {
  std::optional<std::string> sheet;
  std::string identifier;
  auto operator<=>(const QualifiedName&) const = default;
};

/// NameRef leaves, deduplicated. Cell references are not included.
std::set<QualifiedName> names_referenced(const Expr& e);

/// Every CellRef leaf, in source order.
std::vector<CellRef> cell_refs(const Expr& e);
std::string render(const CellRef& ref);

}  // namespace namecalc
