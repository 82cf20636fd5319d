#include <algorithm>
#include <cctype>
#include <charconv>

#include "namecalc/formula.hpp"
#include "namecalc/grid.hpp"
#include "namecalc/value.hpp"

namespace namecalc {

ParseError::ParseError(std::size_t offset, std::string expected, std::string found)
    : std::runtime_error("parse error at offset " + std::to_string(offset) + ": expected " + expected + ", found " +
                         found),
      offset_(offset),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

std::string_view to_string(UnaryOp op) { return op == UnaryOp::Plus ? "+" : "-"; }

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Pow: return "^";
    case BinaryOp::Concat: return "&";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "<>";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Tree helpers

bool same_tree(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

namespace {

struct EqualVisitor {
  const Expr& other;

  template <class T>
  const T& peer() const {
    return std::get<T>(other.node);
  }

  bool operator()(const NumberLit& x) const { return x == peer<NumberLit>(); }
  bool operator()(const TextLit& x) const { return x == peer<TextLit>(); }
  bool operator()(const BoolLit& x) const { return x == peer<BoolLit>(); }
  bool operator()(const NameRef& x) const { return x == peer<NameRef>(); }
  bool operator()(const CellRef& x) const { return x == peer<CellRef>(); }
  bool operator()(const Unary& x) const {
    const auto& y = peer<Unary>();
    return x.op == y.op && same_tree(x.operand, y.operand);
  }
  bool operator()(const Binary& x) const {
    const auto& y = peer<Binary>();
    return x.op == y.op && same_tree(x.lhs, y.lhs) && same_tree(x.rhs, y.rhs);
  }
  bool operator()(const Intersect& x) const {
    const auto& y = peer<Intersect>();
    return same_tree(x.lhs, y.lhs) && same_tree(x.rhs, y.rhs);
  }
  bool operator()(const Percent& x) const { return same_tree(x.operand, peer<Percent>().operand); }
  bool operator()(const Call& x) const {
    const auto& y = peer<Call>();
    return x.function == y.function && x.args.size() == y.args.size() &&
           std::equal(x.args.begin(), x.args.end(), y.args.begin(), same_tree);
  }
};

template <class T>
ExprPtr wrap(T node) {
  return std::make_shared<const Expr>(Expr{std::move(node)});
}

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(EqualVisitor{b}, a.node);
}

ExprPtr make_number(double v) { return wrap(NumberLit{v}); }
ExprPtr make_text(std::string v) { return wrap(TextLit{std::move(v)}); }
ExprPtr make_bool(bool v) { return wrap(BoolLit{v}); }
ExprPtr make_name(std::string id, std::optional<std::string> sheet) {
  return wrap(NameRef{std::move(id), std::move(sheet)});
}
ExprPtr make_cell(CellRef ref) { return wrap(std::move(ref)); }
ExprPtr make_unary(UnaryOp op, ExprPtr operand) { return wrap(Unary{op, std::move(operand)}); }
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) { return wrap(Binary{op, std::move(lhs), std::move(rhs)}); }
ExprPtr make_intersect(ExprPtr lhs, ExprPtr rhs) { return wrap(Intersect{std::move(lhs), std::move(rhs)}); }
ExprPtr make_percent(ExprPtr operand) { return wrap(Percent{std::move(operand)}); }
ExprPtr make_call(std::string function, std::vector<ExprPtr> args) {
  std::transform(function.begin(), function.end(), function.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return wrap(Call{std::move(function), std::move(args)});
}

// ---------------------------------------------------------------------------
// Parser

namespace {

// Binding strength, loosest first.
enum Level : int {
  kComparison = 1,
  kConcat,
  kAdditive,
  kMultiplicative,
  kPower,
  kUnary,
  kPostfix,
  kIntersect,
  kPrimary,
};

int level_of(BinaryOp op) {
  switch (op) {
    case BinaryOp::Eq: case BinaryOp::Ne: case BinaryOp::Lt:
    case BinaryOp::Le: case BinaryOp::Gt: case BinaryOp::Ge:
      return kComparison;
    case BinaryOp::Concat: return kConcat;
    case BinaryOp::Add: case BinaryOp::Sub: return kAdditive;
    case BinaryOp::Mul: case BinaryOp::Div: return kMultiplicative;
    case BinaryOp::Pow: return kPower;
  }
  return kComparison;
}

std::optional<BinaryOp> binary_op(std::string_view lexeme) {
  static constexpr std::pair<std::string_view, BinaryOp> kOps[] = {
      {"+", BinaryOp::Add}, {"-", BinaryOp::Sub},    {"*", BinaryOp::Mul}, {"/", BinaryOp::Div},
      {"^", BinaryOp::Pow}, {"&", BinaryOp::Concat}, {"=", BinaryOp::Eq},  {"<>", BinaryOp::Ne},
      {"<", BinaryOp::Lt},  {"<=", BinaryOp::Le},    {">", BinaryOp::Gt},  {">=", BinaryOp::Ge},
  };
  for (const auto& [text, op] : kOps) {
    if (text == lexeme) return op;
  }
  return std::nullopt;
}

CellCoord parse_coord(std::string_view s) {
  CellCoord c;
  std::size_t i = 0;
  if (i < s.size() && s[i] == '$') {
    c.abs_col = true;
    ++i;
  }
  std::size_t start = i;
  while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
  c.col = column_number(s.substr(start, i - start)).value_or(1);
  if (i < s.size() && s[i] == '$') {
    c.abs_row = true;
    ++i;
  }
  if (i < s.size()) {
    int row = 0;
    std::from_chars(s.data() + i, s.data() + s.size(), row);
    c.row = row;
  }
  return c;
}

CellRef parse_cell_lexeme(std::string_view lexeme) {
  CellRef ref;
  auto colon = lexeme.find(':');
  ref.first = parse_coord(lexeme.substr(0, colon));
  if (colon != std::string_view::npos) ref.last = parse_coord(lexeme.substr(colon + 1));
  return ref;
}

std::string unquote_text(std::string_view lexeme) {
  std::string out;
  for (std::size_t i = 1; i + 1 < lexeme.size(); ++i) {
    out.push_back(lexeme[i]);
    if (lexeme[i] == '"') ++i;  // doubled quote
  }
  return out;
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

  ExprPtr run() {
    ExprPtr e = comparison();
    if (pos_ < toks_.size()) fail("end of formula");
    return e;
  }

 private:
  const Token* peek() const { return pos_ < toks_.size() ? &toks_[pos_] : nullptr; }

  bool at_op(std::string_view lexeme) const {
    const Token* t = peek();
    return t && t->kind == TokenKind::Op && t->lexeme == lexeme;
  }

  bool at(TokenKind kind) const {
    const Token* t = peek();
    return t && t->kind == kind;
  }

  [[noreturn]] void fail(std::string expected) const {
    const Token* t = peek();
    std::size_t offset = t ? t->begin : (toks_.empty() ? 0 : toks_.back().end);
    std::string found = t ? std::string(to_string(t->kind)) + " '" + t->lexeme + "'" : "end of input";
    throw ParseError(offset, std::move(expected), std::move(found));
  }

  // One left-associative binary level.
  template <class Next>
  ExprPtr binary_level(int level, Next next) {
    ExprPtr lhs = next();
    while (const Token* t = peek()) {
      if (t->kind != TokenKind::Op) break;
      auto op = binary_op(t->lexeme);
      if (!op || level_of(*op) != level) break;
      ++pos_;
      lhs = make_binary(*op, lhs, next());
    }
    return lhs;
  }

  ExprPtr comparison() {
    return binary_level(kComparison, [this] { return concat(); });
  }
  ExprPtr concat() {
    return binary_level(kConcat, [this] { return additive(); });
  }
  ExprPtr additive() {
    return binary_level(kAdditive, [this] { return multiplicative(); });
  }
  ExprPtr multiplicative() {
    return binary_level(kMultiplicative, [this] { return power(); });
  }
  ExprPtr power() {
    return binary_level(kPower, [this] { return unary(); });
  }

  ExprPtr unary() {
    if (at_op("-") || at_op("+")) {
      UnaryOp op = peek()->lexeme == "-" ? UnaryOp::Minus : UnaryOp::Plus;
      ++pos_;
      return make_unary(op, unary());
    }
    return postfix();
  }

  ExprPtr postfix() {
    ExprPtr e = intersection();
    while (at_op("%")) {
      ++pos_;
      e = make_percent(e);
    }
    return e;
  }

  ExprPtr intersection() {
    ExprPtr e = primary();
    while (at(TokenKind::Intersect)) {
      ++pos_;
      e = make_intersect(e, primary());
    }
    return e;
  }

  ExprPtr primary() {
    const Token* t = peek();
    if (!t) fail("expression");
    switch (t->kind) {
      case TokenKind::Number: {
        ++pos_;
        double v = 0;
        auto [ptr, ec] = std::from_chars(t->lexeme.data(), t->lexeme.data() + t->lexeme.size(), v);
        if (ec != std::errc{} || ptr != t->lexeme.data() + t->lexeme.size()) {
          --pos_;
          fail("number");
        }
        return make_number(v);
      }
      case TokenKind::Text:
        ++pos_;
        return make_text(unquote_text(t->lexeme));
      case TokenKind::Bool: {
        ++pos_;
        bool v = std::toupper(static_cast<unsigned char>(t->lexeme.front())) == 'T';
        return make_bool(v);
      }
      case TokenKind::CellRef:
        ++pos_;
        return make_cell(parse_cell_lexeme(t->lexeme));
      case TokenKind::SheetQual: {
        ++pos_;
        std::string sheet = t->lexeme.substr(0, t->lexeme.size() - 1);
        const Token* n = peek();
        if (n && n->kind == TokenKind::Ident) {
          ++pos_;
          return make_name(n->lexeme, std::move(sheet));
        }
        if (n && n->kind == TokenKind::CellRef) {
          ++pos_;
          CellRef ref = parse_cell_lexeme(n->lexeme);
          ref.sheet = std::move(sheet);
          return make_cell(std::move(ref));
        }
        fail("name or cell reference after sheet qualifier");
      }
      case TokenKind::Ident: {
        ++pos_;
        if (at(TokenKind::LParen)) {
          ++pos_;
          std::vector<ExprPtr> args;
          if (!at(TokenKind::RParen)) {
            args.push_back(comparison());
            while (at(TokenKind::Comma)) {
              ++pos_;
              args.push_back(comparison());
            }
          }
          if (!at(TokenKind::RParen)) fail("')' or ','");
          ++pos_;
          return make_call(t->lexeme, std::move(args));
        }
        return make_name(t->lexeme);
      }
      case TokenKind::LParen: {
        ++pos_;
        ExprPtr e = comparison();
        if (!at(TokenKind::RParen)) fail("')'");
        ++pos_;
        return e;
      }
      default:
        fail("expression");
    }
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
};

}  // namespace

ExprPtr parse(const std::vector<Token>& tokens) { return Parser(tokens).run(); }

ExprPtr parse_formula(std::string_view text) { return parse(tokenize(text)); }

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string render_coord(const CellCoord& c) {
  std::string out;
  if (c.abs_col) out += '$';
  out += column_letters(c.col);
  if (c.row) {
    if (c.abs_row) out += '$';
    out += std::to_string(*c.row);
  }
  return out;
}

int level_of(const Expr& e) {
  if (const auto* b = std::get_if<Binary>(&e.node)) return level_of(b->op);
  if (std::holds_alternative<Unary>(e.node)) return kUnary;
  if (std::holds_alternative<Intersect>(e.node)) return kIntersect;
  if (std::holds_alternative<Percent>(e.node)) return kPostfix;
  return kPrimary;
}

void render_into(const Expr& e, int min_level, std::string& out);

// Intersection operands must begin (right) or end (left) with a
// reference-producing token; anything else is parenthesized.
void render_intersect_operand(const Expr& e, bool left, std::string& out) {
  bool bare = std::holds_alternative<NameRef>(e.node) || std::holds_alternative<CellRef>(e.node) ||
              std::holds_alternative<Call>(e.node) || (left && std::holds_alternative<Intersect>(e.node));
  if (bare) {
    render_into(e, kIntersect, out);
  } else {
    out += '(';
    render_into(e, 0, out);
    out += ')';
  }
}

struct RenderVisitor {
  std::string& out;

  void operator()(const NumberLit& n) const { out += format_number(n.value); }
  void operator()(const TextLit& t) const {
    out += '"';
    for (char c : t.value) {
      out += c;
      if (c == '"') out += '"';
    }
    out += '"';
  }
  void operator()(const BoolLit& b) const { out += b.value ? "TRUE" : "FALSE"; }
  void operator()(const NameRef& n) const {
    if (n.sheet) out += *n.sheet + "!";
    out += n.identifier;
  }
  void operator()(const CellRef& c) const { out += render(c); }
  void operator()(const Unary& u) const {
    out += to_string(u.op);
    render_into(*u.operand, kUnary, out);
  }
  void operator()(const Binary& b) const {
    int level = level_of(b.op);
    render_into(*b.lhs, level, out);
    out += ' ';
    out += to_string(b.op);
    out += ' ';
    render_into(*b.rhs, level + 1, out);
  }
  void operator()(const Intersect& i) const {
    render_intersect_operand(*i.lhs, true, out);
    out += ' ';
    render_intersect_operand(*i.rhs, false, out);
  }
  void operator()(const Percent& p) const {
    render_into(*p.operand, kPostfix, out);
    out += '%';
  }
  void operator()(const Call& c) const {
    out += c.function;
    out += '(';
    for (std::size_t i = 0; i < c.args.size(); ++i) {
      if (i > 0) out += ", ";
      render_into(*c.args[i], 0, out);
    }
    out += ')';
  }
};

void render_into(const Expr& e, int min_level, std::string& out) {
  bool parens = level_of(e) < min_level;
  if (parens) out += '(';
  std::visit(RenderVisitor{out}, e.node);
  if (parens) out += ')';
}

template <class Fn>
void walk(const Expr& e, Fn& fn) {
  fn(e);
  if (const auto* u = std::get_if<Unary>(&e.node)) {
    walk(*u->operand, fn);
  } else if (const auto* b = std::get_if<Binary>(&e.node)) {
    walk(*b->lhs, fn);
    walk(*b->rhs, fn);
  } else if (const auto* x = std::get_if<Intersect>(&e.node)) {
    walk(*x->lhs, fn);
    walk(*x->rhs, fn);
  } else if (const auto* p = std::get_if<Percent>(&e.node)) {
    walk(*p->operand, fn);
  } else if (const auto* c = std::get_if<Call>(&e.node)) {
    for (const auto& a : c->args) walk(*a, fn);
  }
}

}  // namespace

std::string render(const CellRef& ref) {
  std::string out;
  if (ref.sheet) out += *ref.sheet + "!";
  out += render_coord(ref.first);
  if (ref.last) out += ":" + render_coord(*ref.last);
  return out;
}

std::string render(const Expr& e) {
  std::string out;
  render_into(e, 0, out);
  return out;
}

std::set<QualifiedName> names_referenced(const Expr& e) {
  std::set<QualifiedName> out;
  auto collect = [&out](const Expr& node) {
    if (const auto* n = std::get_if<NameRef>(&node.node)) out.insert(QualifiedName{n->sheet, n->identifier});
  };
  walk(e, collect);
  return out;
}

std::vector<CellRef> cell_refs(const Expr& e) {
  std::vector<CellRef> out;
  auto collect = [&out](const Expr& node) {
    if (const auto* c = std::get_if<CellRef>(&node.node)) out.push_back(*c);
  };
  walk(e, collect);
  return out;
}

}  // namespace namecalc
