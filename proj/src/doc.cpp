#include "namecalc/doc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace namecalc {

DocError::DocError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

UndeclaredName::UndeclaredName(int line, std::string name)
    : DocError(line, "undeclared name '" + name + "'"), name_(std::move(name)) {}

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

ExportError::ExportError(std::vector<std::string> cells, const std::string& message)
    : std::runtime_error(message + ": " + join(cells, ", ")), cells_(std::move(cells)) {}

// ---------------------------------------------------------------------------
// Fields

std::string encode_field(const Scalar& s) {
  if (is_blank(s)) return "";
  if (const auto* d = std::get_if<double>(&s)) return format_number(*d);
  if (const auto* b = std::get_if<bool>(&s)) return *b ? "TRUE" : "FALSE";
  if (const auto* e = std::get_if<ErrorKind>(&s)) return std::string(error_text(*e));
  std::string out = "\"";
  for (char c : std::get<std::string>(s)) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

namespace {

// A decoded data field: a literal, or a legacy cell formula.
struct Field {
  Scalar value;
  std::optional<std::string> cell_formula;
};

Field decode_field(std::string_view f, int line) {
  if (f.empty()) return {Blank{}, std::nullopt};
  if (f.front() == '=') return {Blank{}, std::string(f)};
  if (f == "TRUE") return {true, std::nullopt};
  if (f == "FALSE") return {false, std::nullopt};
  if (auto e = parse_error_text(f)) return {*e, std::nullopt};
  if (f.front() == '"') {
    if (f.size() < 2 || f.back() != '"') throw DocSyntaxError(line, "unterminated text field");
    std::string out;
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
      char c = f[i];
      if (c == '"') throw DocSyntaxError(line, "unescaped quote in text field");
      if (c != '\\') {
        out += c;
        continue;
      }
      if (i + 2 >= f.size()) throw DocSyntaxError(line, "dangling escape in text field");
      switch (f[++i]) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 't': out += '\t'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        default: throw DocSyntaxError(line, "unknown escape in text field");
      }
    }
    return {out, std::nullopt};
  }
  double d = 0;
  auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), d);
  if (ec != std::errc{} || end != f.data() + f.size() || !std::isfinite(d)) {
    throw DocSyntaxError(line, "bad data field '" + std::string(f) + "'");
  }
  return {d, std::nullopt};
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Export

struct Block {
  std::size_t sheet_index;
  GridRange range;  // bounded
};

bool block_less(const Block& a, const Block& b) {
  return std::tie(a.sheet_index, a.range.rows->first, a.range.cols->first, a.range.rows->last, a.range.cols->last) <
         std::tie(b.sheet_index, b.range.rows->first, b.range.cols->first, b.range.rows->last, b.range.cols->last);
}

}  // namespace

std::string export_doc(const Workbook& wb) {
  std::map<std::string, std::size_t> sheet_index;
  for (const auto& s : wb.sheets()) sheet_index.emplace(s.id, sheet_index.size());

  std::vector<GridRange> formula_ranges;
  for (const auto& [key, def] : wb.names()) {
    if (def.formula_bearing_range() && def.target) formula_ranges.push_back(*def.target);
  }
  auto in_formula_range = [&](const std::string& sheet, CellAddr a) {
    return std::any_of(formula_ranges.begin(), formula_ranges.end(),
                       [&](const GridRange& r) { return r.sheet == sheet && contains(r, a); });
  };

  std::vector<std::string> unowned;
  for (const auto& s : wb.sheets()) {
    for (const auto& [at, text] : s.cell_formulas) {
      if (!in_formula_range(s.id, at)) unowned.push_back(s.id + "!" + to_a1(at));
    }
  }
  if (!unowned.empty()) throw ExportError(unowned, "formula cells outside any named formula range");

  std::vector<Block> blocks;
  for (const auto& [key, def] : wb.names()) {
    if (!def.is_range() || def.has_formula() || def.derivation || !def.target) continue;
    bool shadowed = std::any_of(formula_ranges.begin(), formula_ranges.end(),
                                [&](const GridRange& r) { return overlaps(r, *def.target); });
    if (shadowed) continue;
    const Sheet* sheet = wb.find_sheet(def.target->sheet);
    blocks.push_back(Block{sheet_index.at(sheet->id), clamp(*def.target, sheet->extent())});
  }
  std::sort(blocks.begin(), blocks.end(), block_less);
  blocks.erase(std::unique(blocks.begin(), blocks.end(),
                           [](const Block& a, const Block& b) { return a.range == b.range; }),
               blocks.end());

  std::vector<std::string> stray;
  for (const auto& s : wb.sheets()) {
    for (const auto& [at, value] : s.literals) {
      bool covered = std::any_of(blocks.begin(), blocks.end(),
                                 [&](const Block& b) { return b.range.sheet == s.id && contains(b.range, at); });
      if (!covered) stray.push_back(s.id + "!" + to_a1(at));
    }
  }
  if (!stray.empty()) throw ExportError(stray, "literal cells outside any input range");

  std::ostringstream out;
  out << kDocHeader << '\n';
  for (const auto& s : wb.sheets()) out << "[SHEET] " << s.id << " rows=" << s.rows << " cols=" << s.cols << '\n';
  for (const auto& [key, def] : wb.names()) {
    out << "[NAME] scope=" << def.scope.text() << " id=" << def.identifier
        << " kind=" << (def.is_range() ? "range" : "formula") << " array=" << (def.array ? 1 : 0);
    if (def.output) out << " output=1";
    out << '\n';
    if (def.is_range()) out << "  target=" << (def.target ? qualified_a1(*def.target) : "#REF!") << '\n';
    if (def.derivation) {
      out << "  derive=shift(" << def.derivation->base << ',' << def.derivation->d_row << ','
          << def.derivation->d_col << ")\n";
    }
    if (def.formula) out << "  formula=" << render(def.formula) << '\n';
  }
  for (const auto& b : blocks) {
    const Sheet* sheet = wb.find_sheet(b.range.sheet);
    out << "[DATA] " << qualified_a1(b.range) << '\n';
    for (int row = b.range.rows->first; row <= b.range.rows->last; ++row) {
      for (int col = b.range.cols->first; col <= b.range.cols->last; ++col) {
        if (col > b.range.cols->first) out << '\t';
        auto it = sheet->literals.find(CellAddr{row, col});
        if (it != sheet->literals.end()) out << encode_field(it->second);
      }
      out << '\n';
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Rebuild

namespace {

struct NameDecl {
  int line = 0;
  NameDef def;
  std::optional<std::string> target_text;
  std::optional<std::string> formula_text;
  int formula_line = 0;
};

struct DataDecl {
  int line = 0;
  GridRange range;
  std::vector<std::vector<Field>> rows;
};

struct SheetDecl {
  int line = 0;
  std::string id;
  int rows = 0;
  int cols = 0;
};

// "key=value" attributes after a block tag.
std::map<std::string, std::string> attributes(const std::vector<std::string_view>& words, std::size_t from, int line) {
  std::map<std::string, std::string> out;
  for (std::size_t i = from; i < words.size(); ++i) {
    if (words[i].empty()) continue;
    auto eq = words[i].find('=');
    if (eq == std::string_view::npos) throw DocSyntaxError(line, "expected key=value, found '" + std::string(words[i]) + "'");
    auto key = std::string(words[i].substr(0, eq));
    if (!out.emplace(key, std::string(words[i].substr(eq + 1))).second) {
      throw DocSyntaxError(line, "repeated attribute '" + key + "'");
    }
  }
  return out;
}

int to_int(std::string_view s, int line, std::string_view what) {
  int v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size()) {
    throw DocSyntaxError(line, "bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

std::string take(std::map<std::string, std::string>& attrs, const std::string& key, int line) {
  auto it = attrs.find(key);
  if (it == attrs.end()) throw DocSyntaxError(line, "missing " + key + "=");
  std::string v = it->second;
  attrs.erase(it);
  return v;
}

GridRange parse_target(std::string_view text, int line) {
  auto bang = text.rfind('!');
  if (bang == std::string_view::npos) throw DocSyntaxError(line, "target needs sheet!range");
  auto r = parse_a1(text.substr(0, bang), text.substr(bang + 1));
  if (!r) throw DocSyntaxError(line, "bad range '" + std::string(text) + "'");
  return *r;
}

Derivation parse_derive(std::string_view text, int line) {
  if (!text.starts_with("shift(") || !text.ends_with(")")) throw DocSyntaxError(line, "derive must be shift(base,dr,dc)");
  auto parts = split(text.substr(6, text.size() - 7), ',');
  if (parts.size() != 3 || parts[0].empty()) throw DocSyntaxError(line, "derive must be shift(base,dr,dc)");
  return Derivation{std::string(parts[0]), to_int(parts[1], line, "row offset"), to_int(parts[2], line, "column offset")};
}

class Reader {
 public:
  explicit Reader(std::string_view doc) {
    auto lines = split(doc, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    for (auto& l : lines) {
      if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    }
    lines_ = std::move(lines);
  }

  void read() {
    if (lines_.empty()) throw DocSyntaxError(1, "empty document");
    if (lines_[0] != kDocHeader) {
      if (lines_[0].starts_with("#%NAMESDOC")) throw UnknownVersion(1, "unsupported version '" + std::string(lines_[0]) + "'");
      throw DocSyntaxError(1, "missing '#%NAMESDOC v1' header");
    }
    std::size_t i = 1;
    while (i < lines_.size()) {
      std::string_view l = lines_[i];
      int line = static_cast<int>(i) + 1;
      if (l.empty() || l.front() == '#') {
        ++i;
      } else if (l.starts_with("[SHEET] ")) {
        read_sheet(l, line);
        ++i;
      } else if (l.starts_with("[NAME] ")) {
        i = read_name(i);
      } else if (l.starts_with("[DATA] ")) {
        i = read_data(i);
      } else {
        throw DocSyntaxError(line, "unexpected line '" + std::string(l) + "'");
      }
    }
  }

  std::vector<SheetDecl> sheets;
  std::vector<NameDecl> names;
  std::vector<DataDecl> data;

 private:
  void read_sheet(std::string_view l, int line) {
    auto words = split(l, ' ');
    if (words.size() < 2 || words[1].empty()) throw DocSyntaxError(line, "sheet needs a name");
    auto attrs = attributes(words, 2, line);
    SheetDecl s{line, std::string(words[1]), 0, 0};
    s.rows = to_int(take(attrs, "rows", line), line, "rows");
    s.cols = to_int(take(attrs, "cols", line), line, "cols");
    if (!attrs.empty()) throw DocSyntaxError(line, "unknown attribute '" + attrs.begin()->first + "'");
    sheets.push_back(std::move(s));
  }

  std::size_t read_name(std::size_t i) {
    int line = static_cast<int>(i) + 1;
    auto attrs = attributes(split(lines_[i], ' '), 1, line);
    NameDecl n;
    n.line = line;
    std::string scope = take(attrs, "scope", line);
    n.def.scope = scope == "workbook" ? Scope::workbook() : Scope::sheet(scope);
    n.def.identifier = take(attrs, "id", line);
    std::string kind = take(attrs, "kind", line);
    if (kind != "range" && kind != "formula") throw DocSyntaxError(line, "kind must be range or formula");
    n.def.kind = kind == "range" ? NameKind::Range : NameKind::Formula;
    std::string array = take(attrs, "array", line);
    if (array != "0" && array != "1") throw DocSyntaxError(line, "array must be 0 or 1");
    n.def.array = array == "1";
    if (auto it = attrs.find("output"); it != attrs.end()) {
      if (it->second != "0" && it->second != "1") throw DocSyntaxError(line, "output must be 0 or 1");
      n.def.output = it->second == "1";
      attrs.erase(it);
    }
    if (!attrs.empty()) throw DocSyntaxError(line, "unknown attribute '" + attrs.begin()->first + "'");

    // Indented fields, in fixed order.
    static const std::vector<std::string_view> kFields = {"target", "derive", "formula"};
    std::size_t next_field = 0;
    ++i;
    while (i < lines_.size() && lines_[i].starts_with("  ")) {
      int fline = static_cast<int>(i) + 1;
      std::string_view body = lines_[i].substr(2);
      auto eq = body.find('=');
      if (eq == std::string_view::npos) throw DocSyntaxError(fline, "expected field=value");
      std::string_view key = body.substr(0, eq), value = body.substr(eq + 1);
      auto pos = std::find(kFields.begin(), kFields.end(), key);
      if (pos == kFields.end()) throw DocSyntaxError(fline, "unknown field '" + std::string(key) + "'");
      auto index = static_cast<std::size_t>(pos - kFields.begin());
      if (index < next_field) throw DocSyntaxError(fline, "field '" + std::string(key) + "' out of order");
      next_field = index + 1;
      if (key == "target") {
        n.target_text = std::string(value);
        if (value != "#REF!") n.def.target = parse_target(value, fline);
      } else if (key == "derive") {
        n.def.derivation = parse_derive(value, fline);
      } else {
        n.formula_text = std::string(value);
        n.formula_line = fline;
      }
      ++i;
    }
    if (n.def.kind == NameKind::Range && !n.target_text && !n.def.derivation) {
      throw DocSyntaxError(line, "range name '" + n.def.identifier + "' needs a target");
    }
    if (n.def.kind == NameKind::Formula && !n.formula_text) {
      throw DocSyntaxError(line, "formula name '" + n.def.identifier + "' needs a formula");
    }
    names.push_back(std::move(n));
    return i;
  }

  std::size_t read_data(std::size_t i) {
    int line = static_cast<int>(i) + 1;
    DataDecl d;
    d.line = line;
    d.range = parse_target(lines_[i].substr(7), line);
    if (!d.range.rows || !d.range.cols) throw DocSyntaxError(line, "data block needs a bounded rectangle");
    ++i;
    for (int r = 0; r < d.range.rows->length(); ++r, ++i) {
      if (i >= lines_.size()) throw DocSyntaxError(static_cast<int>(i), "data block ends early");
      int rline = static_cast<int>(i) + 1;
      auto fields = split(lines_[i], '\t');
      if (static_cast<int>(fields.size()) > d.range.cols->length()) {
        throw DocSyntaxError(rline, "data row is wider than its block");
      }
      std::vector<Field> row;
      for (auto f : fields) row.push_back(decode_field(f, rline));
      d.rows.push_back(std::move(row));
    }
    data.push_back(std::move(d));
    return i;
  }

  std::vector<std::string_view> lines_;
};

Workbook assemble(std::string_view doc, std::vector<FormulaIssue>* issues) {
  Reader reader(doc);
  reader.read();
  Workbook wb;
  for (const auto& s : reader.sheets) {
    try {
      wb.add_sheet(s.id, s.rows, s.cols);
    } catch (const WorkbookError& e) {
      throw DocSyntaxError(s.line, e.what());
    }
  }

  std::set<NameKey> declared;
  for (const auto& n : reader.names) declared.insert(n.def.key());

  std::vector<NameDecl*> ready;
  for (auto& n : reader.names) {
    if (n.formula_text) {
      try {
        n.def.formula = parse_formula(*n.formula_text);
      } catch (const std::exception& e) {
        if (!issues) throw DocSyntaxError(n.formula_line, std::string("formula of '") + n.def.identifier + "': " + e.what());
        issues->push_back(FormulaIssue{n.formula_line, n.def.key().display(), e.what()});
        continue;
      }
    }
    ready.push_back(&n);
  }

  // Closed world: every reference resolves to a declared name.
  for (const NameDecl* n : ready) {
    if (!n->def.formula) continue;
    auto ctx = formula_context(n->def);
    for (const auto& ref : names_referenced(*n->def.formula)) {
      bool ok = ref.sheet ? declared.count(NameKey{Scope::sheet(*ref.sheet), ref.identifier}) > 0
                          : declared.count(NameKey{Scope::workbook(), ref.identifier}) > 0 ||
                                (ctx && declared.count(NameKey{Scope::sheet(std::string(*ctx)), ref.identifier}) > 0);
      if (!ok) throw UndeclaredName(n->formula_line, ref.sheet ? *ref.sheet + "!" + ref.identifier : ref.identifier);
    }
  }

  // Bases before the names derived from them.
  std::stable_sort(ready.begin(), ready.end(), [](const NameDecl* a, const NameDecl* b) {
    return !a->def.derivation && b->def.derivation;
  });
  for (NameDecl* n : ready) {
    try {
      wb.define(n->def);
    } catch (const WorkbookError& e) {
      throw DocSyntaxError(n->line, e.what());
    }
  }

  for (const auto& d : reader.data) {
    try {
      for (std::size_t r = 0; r < d.rows.size(); ++r) {
        for (std::size_t c = 0; c < d.rows[r].size(); ++c) {
          CellAddr at{d.range.rows->first + static_cast<int>(r), d.range.cols->first + static_cast<int>(c)};
          const Field& f = d.rows[r][c];
          if (f.cell_formula) {
            wb.set_cell_formula(d.range.sheet, at, *f.cell_formula);
          } else {
            wb.set_literal(d.range.sheet, at, f.value);
          }
        }
      }
    } catch (const WorkbookError& e) {
      throw DocSyntaxError(d.line, e.what());
    }
  }
  return wb;
}

}  // namespace

Workbook rebuild(std::string_view doc) { return assemble(doc, nullptr); }

Workbook rebuild_lenient(std::string_view doc, std::vector<FormulaIssue>& issues) { return assemble(doc, &issues); }

}  // namespace namecalc
