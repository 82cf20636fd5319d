#include <algorithm>
#include <cctype>
#include <charconv>

#include "namecalc/formula.hpp"
#include "namecalc/grid.hpp"

namespace namecalc {

namespace {

constexpr std::string_view kArrow = "\xE2\x86\x90";  // U+2190 LEFTWARDS ARROW

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }
bool is_word(char c) { return is_alpha(c) || is_digit(c) || c == '.' || c == '_'; }

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::toupper(static_cast<unsigned char>(x)) == std::toupper(static_cast<unsigned char>(y));
         });
}

bool is_bool_word(std::string_view s) { return iequals(s, "TRUE") || iequals(s, "FALSE"); }

// Lengths of a cell-reference match starting at s[0]: [$]letters[$]digits.
// Returns 0 when there is no match.
std::size_t match_cell(std::string_view s, bool need_row) {
  std::size_t i = 0;
  if (i < s.size() && s[i] == '$') ++i;
  std::size_t letters = 0;
  while (i < s.size() && is_alpha(s[i]) && letters < 4) {
    ++i;
    ++letters;
  }
  if (letters == 0 || letters > 3) return 0;
  std::size_t col_end = i;
  if (i < s.size() && s[i] == '$') ++i;
  std::size_t digits = 0;
  bool nonzero = false;
  while (i < s.size() && is_digit(s[i])) {
    nonzero = nonzero || s[i] != '0';
    ++i;
    ++digits;
  }
  if (digits == 0) {
    if (need_row) return 0;
    return col_end;  // bare column: no '$' before a missing row
  }
  if (digits > 7 || !nonzero) return 0;  // rows run from 1
  return i;
}

}  // namespace

LexError::LexError(std::size_t offset, std::string reason)
    : std::runtime_error("lex error at offset " + std::to_string(offset) + ": " + reason),
      offset_(offset),
      reason_(std::move(reason)) {}

bool looks_like_cell_ref(std::string_view s) {
  return !s.empty() && match_cell(s, true) == s.size();
}

bool is_valid_sheet_name(std::string_view s) {
  if (s.empty() || !is_alpha(s.front())) return false;
  return std::all_of(s.begin(), s.end(), is_word) && s != "workbook";
}

bool is_valid_identifier(std::string_view id) {
  std::string_view rest = id;
  if (rest.starts_with(kArrow)) {
    rest.remove_prefix(kArrow.size());
  } else {
    if (rest.empty() || !is_alpha(rest.front())) return false;
  }
  if (rest.ends_with('?')) rest.remove_suffix(1);
  if (!std::all_of(rest.begin(), rest.end(), is_word)) return false;
  if (looks_like_cell_ref(id) || is_bool_word(id)) return false;
  return true;
}

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Number: return "NUMBER";
    case TokenKind::Text: return "TEXT";
    case TokenKind::Bool: return "BOOL";
    case TokenKind::Ident: return "IDENT";
    case TokenKind::SheetQual: return "SHEET_QUAL";
    case TokenKind::CellRef: return "CELLREF";
    case TokenKind::Op: return "OP";
    case TokenKind::LParen: return "LPAREN";
    case TokenKind::RParen: return "RPAREN";
    case TokenKind::Comma: return "COMMA";
    case TokenKind::Intersect: return "INTERSECT";
  }
  return "?";
}

namespace {

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src), end_(src.size()) {}

  std::vector<Token> run() {
    std::size_t end = end_;
    skip_space();
    if (pos_ < end && src_[pos_] == '{') {
      ++pos_;
      std::size_t close = src_.find_last_not_of(" \t\r\n");
      if (close == std::string_view::npos || close < pos_ || src_[close] != '}') {
        throw LexError(pos_ - 1, "unterminated array braces");
      }
      end = close;
      skip_space();
    }
    if (pos_ < end && src_[pos_] == '=') ++pos_;
    end_ = end;

    while (true) {
      std::size_t ws_begin = pos_;
      skip_space();
      if (pos_ >= end_) break;
      bool had_space = pos_ > ws_begin;
      Token tok = next();
      if (had_space && !out_.empty() && ends_reference(out_.back()) && starts_reference(tok)) {
        out_.push_back(Token{TokenKind::Intersect, std::string(src_.substr(ws_begin, tok.begin - ws_begin)),
                             ws_begin, tok.begin});
      }
      out_.push_back(std::move(tok));
    }
    return std::move(out_);
  }

 private:
  static bool ends_reference(const Token& t) {
    return t.kind == TokenKind::Ident || t.kind == TokenKind::CellRef || t.kind == TokenKind::RParen;
  }
  static bool starts_reference(const Token& t) {
    return t.kind == TokenKind::Ident || t.kind == TokenKind::CellRef || t.kind == TokenKind::SheetQual ||
           t.kind == TokenKind::LParen;
  }

  void skip_space() {
    while (pos_ < end_ && is_space(src_[pos_])) ++pos_;
  }

  char peek(std::size_t ahead = 0) const { return pos_ + ahead < end_ ? src_[pos_ + ahead] : '\0'; }

  Token make(TokenKind kind, std::size_t begin) {
    return Token{kind, std::string(src_.substr(begin, pos_ - begin)), begin, pos_};
  }

  Token next() {
    std::size_t begin = pos_;
    char c = peek();
    if (is_digit(c) || (c == '.' && is_digit(peek(1)))) return number();
    if (c == '"') return text();
    if (c == '$' || is_alpha(c) || src_.substr(pos_).starts_with(kArrow)) return word();
    switch (c) {
      case '(': ++pos_; return make(TokenKind::LParen, begin);
      case ')': ++pos_; return make(TokenKind::RParen, begin);
      case ',': ++pos_; return make(TokenKind::Comma, begin);
      case '+': case '-': case '*': case '/': case '^': case '&': case '=': case '%':
        ++pos_;
        return make(TokenKind::Op, begin);
      case '<':
        ++pos_;
        if (peek() == '=' || peek() == '>') ++pos_;
        return make(TokenKind::Op, begin);
      case '>':
        ++pos_;
        if (peek() == '=') ++pos_;
        return make(TokenKind::Op, begin);
      default:
        break;
    }
    throw LexError(begin, std::string("illegal character '") + c + "'");
  }

  Token number() {
    std::size_t begin = pos_;
    while (is_digit(peek())) ++pos_;
    if (peek() == '.') {
      ++pos_;
      while (is_digit(peek())) ++pos_;
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t k = 1;
      if (peek(k) == '+' || peek(k) == '-') ++k;
      if (is_digit(peek(k))) {
        pos_ += k;
        while (is_digit(peek())) ++pos_;
      }
    }
    return make(TokenKind::Number, begin);
  }

  Token text() {
    std::size_t begin = pos_;
    ++pos_;
    while (true) {
      if (pos_ >= end_) throw LexError(begin, "unterminated text literal");
      if (src_[pos_] == '"') {
        if (peek(1) == '"') {
          pos_ += 2;
          continue;
        }
        ++pos_;
        break;
      }
      ++pos_;
    }
    return make(TokenKind::Text, begin);
  }

  // Identifiers, sheet qualifiers, booleans and grid references.
  Token word() {
    std::size_t begin = pos_;
    std::string_view rest = src_.substr(pos_, end_ - pos_);

    if (rest.starts_with(kArrow)) {
      pos_ += kArrow.size();
      while (is_word(peek())) ++pos_;
      if (peek() == '?') ++pos_;
      return make(TokenKind::Ident, begin);
    }

    std::size_t run = 0;
    while (run < rest.size() && is_word(rest[run])) ++run;
    std::string_view word = rest.substr(0, run);

    if (run > 0 && run < rest.size() && rest[run] == '!') {
      if (!is_valid_sheet_name(word)) throw LexError(begin, "bad sheet name '" + std::string(word) + "'");
      pos_ += run + 1;
      return make(TokenKind::SheetQual, begin);
    }

    // Grid references: "$J$16", "A1:B2", "F:X", "$F:$X".
    std::size_t cell = match_cell(rest, false);
    bool boundary = cell > 0 && (cell >= rest.size() || !(is_word(rest[cell]) || rest[cell] == '?' || rest[cell] == '$'));
    bool bare_column = cell > 0 && !is_digit(rest[cell - 1]);
    if (cell > 0 && (rest.front() == '$' || cell >= run) &&
        (boundary || (cell < rest.size() && rest[cell] == ':'))) {
      if (cell < rest.size() && rest[cell] == ':') {
        std::size_t second = match_cell(rest.substr(cell + 1), false);
        std::size_t stop = cell + 1 + second;
        bool second_bare = second > 0 && !is_digit(rest[stop - 1]);
        bool ok = second > 0 && second_bare == bare_column &&
                  (stop >= rest.size() || !(is_word(rest[stop]) || rest[stop] == '?' || rest[stop] == '$'));
        if (!ok) throw LexError(begin, "malformed range reference");
        pos_ += stop;
        return make(TokenKind::CellRef, begin);
      }
      if (!bare_column) {
        pos_ += cell;
        return make(TokenKind::CellRef, begin);
      }
    }
    if (rest.front() == '$') throw LexError(begin, "malformed cell reference");
    pos_ += run;
    if (peek() == '?') {
      ++pos_;
    } else if (is_bool_word(word)) {
      return make(TokenKind::Bool, begin);
    }
    return make(TokenKind::Ident, begin);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t end_;
  std::vector<Token> out_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  return Lexer(text).run();
}

}  // namespace namecalc
