#include "namecalc/workbook.hpp"

#include <algorithm>

namespace namecalc {

std::string NameKey::display() const {
  return scope.is_workbook() ? identifier : scope.sheet_id() + "!" + identifier;
}

bool equivalent(const NameDef& a, const NameDef& b) {
  return a.identifier == b.identifier && a.scope == b.scope && a.kind == b.kind && a.target == b.target &&
         a.array == b.array && same_tree(a.formula, b.formula) && a.derivation == b.derivation &&
         a.output == b.output;
}

WorkbookError::WorkbookError(Code code, std::string message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

std::string_view to_string(WorkbookError::Code code) {
  using C = WorkbookError::Code;
  switch (code) {
    case C::DuplicateName: return "DuplicateName";
    case C::OverlappingFormulaRange: return "OverlappingFormulaRange";
    case C::BadIdentifier: return "BadIdentifier";
    case C::UnknownName: return "UnknownName";
    case C::UnknownSheet: return "UnknownSheet";
    case C::InvalidDefinition: return "InvalidDefinition";
  }
  return "WorkbookError";
}

const Sheet* Workbook::find_sheet(std::string_view id) const {
  auto it = std::find_if(sheets_.begin(), sheets_.end(), [&](const Sheet& s) { return s.id == id; });
  return it == sheets_.end() ? nullptr : &*it;
}

Sheet& Workbook::sheet_mut(std::string_view id) {
  auto it = std::find_if(sheets_.begin(), sheets_.end(), [&](const Sheet& s) { return s.id == id; });
  if (it == sheets_.end()) throw WorkbookError(WorkbookError::Code::UnknownSheet, std::string(id));
  return *it;
}

const NameDef* Workbook::find_name(const NameKey& key) const {
  auto it = names_.find(key);
  return it == names_.end() ? nullptr : &it->second;
}

void Workbook::add_sheet(std::string id, int rows, int cols) {
  if (!is_valid_sheet_name(id)) throw WorkbookError(WorkbookError::Code::BadIdentifier, "sheet '" + id + "'");
  if (find_sheet(id)) throw WorkbookError(WorkbookError::Code::DuplicateName, "sheet '" + id + "'");
  if (rows < 1 || cols < 1 || rows > kMaxRows || cols > kMaxCols) {
    throw WorkbookError(WorkbookError::Code::InvalidDefinition, "sheet '" + id + "' has a bad extent");
  }
  sheets_.push_back(Sheet{std::move(id), rows, cols, {}, {}});
}

namespace {

void check_inside(const Sheet& sheet, CellAddr at) {
  if (at.row < 1 || at.col < 1 || at.row > sheet.rows || at.col > sheet.cols) {
    throw WorkbookError(WorkbookError::Code::InvalidDefinition,
                        "cell " + to_a1(at) + " lies outside sheet '" + sheet.id + "'");
  }
}

}  // namespace

void Workbook::set_literal(std::string_view sheet, CellAddr at, Scalar value) {
  Sheet& s = sheet_mut(sheet);
  check_inside(s, at);
  if (is_blank(value)) {
    s.literals.erase(at);
  } else {
    s.literals[at] = std::move(value);
  }
}

void Workbook::set_cell_formula(std::string_view sheet, CellAddr at, std::string formula) {
  Sheet& s = sheet_mut(sheet);
  check_inside(s, at);
  s.cell_formulas[at] = std::move(formula);
}

void Workbook::set_literals(const GridRange& range, const std::vector<Scalar>& row_major) {
  const Sheet& s = sheet_mut(range.sheet);
  GridRange r = clamp(range, s.extent());
  std::size_t i = 0;
  for (int row = r.rows->first; row <= r.rows->last; ++row) {
    for (int col = r.cols->first; col <= r.cols->last; ++col) {
      if (i >= row_major.size()) return;
      set_literal(range.sheet, CellAddr{row, col}, row_major[i++]);
    }
  }
}

std::optional<GridRange> Workbook::derive_target(const NameDef& def) const {
  const Derivation& d = *def.derivation;
  const NameDef* base = find_name(NameKey{def.scope, d.base});
  if (!base) base = find_name(NameKey{Scope::workbook(), d.base});
  if (!base || !base->is_range()) {
    throw WorkbookError(WorkbookError::Code::UnknownName, "derivation base '" + d.base + "' of '" + def.identifier + "'");
  }
  if (!base->target) return std::nullopt;
  const Sheet* sheet = find_sheet(base->target->sheet);
  if (!sheet) return std::nullopt;
  auto shifted = shift_range(*base->target, d.d_row, d.d_col, sheet->extent());
  if (const auto* r = std::get_if<GridRange>(&shifted)) return *r;
  return std::nullopt;
}

void Workbook::validate(const NameDef& def, const NameKey* replacing) const {
  using C = WorkbookError::Code;
  const std::string& id = def.identifier;
  if (!is_valid_identifier(id)) throw WorkbookError(C::BadIdentifier, "'" + id + "'");
  if (!def.scope.is_workbook() && !find_sheet(def.scope.sheet_id())) {
    throw WorkbookError(C::UnknownSheet, "scope '" + def.scope.sheet_id() + "' of '" + id + "'");
  }
  NameKey key = def.key();
  if ((!replacing || *replacing != key) && names_.count(key)) {
    throw WorkbookError(C::DuplicateName, "'" + key.display() + "'");
  }

  if (def.kind == NameKind::Formula) {
    if (!def.formula || def.target || def.array || def.derivation) {
      throw WorkbookError(C::InvalidDefinition, "formula name '" + id + "' must carry only a formula");
    }
    return;
  }

  if (def.array && !def.formula) {
    throw WorkbookError(C::InvalidDefinition, "array flag on '" + id + "' without a formula");
  }
  if (def.derivation && def.formula) {
    throw WorkbookError(C::InvalidDefinition, "derived name '" + id + "' cannot carry a formula");
  }
  if (!def.target) return;  // #REF! sentinel

  const GridRange& t = *def.target;
  const Sheet* sheet = find_sheet(t.sheet);
  if (!sheet) throw WorkbookError(C::UnknownSheet, "target sheet '" + t.sheet + "' of '" + id + "'");
  if (!t.rows && !t.cols) throw WorkbookError(C::InvalidDefinition, "target of '" + id + "' is unbounded");
  bool inside = (!t.rows || (t.rows->first >= 1 && t.rows->last <= sheet->rows && t.rows->first <= t.rows->last)) &&
                (!t.cols || (t.cols->first >= 1 && t.cols->last <= sheet->cols && t.cols->first <= t.cols->last));
  if (!inside) throw WorkbookError(C::InvalidDefinition, "target of '" + id + "' lies outside its sheet");

  if (!def.formula) return;
  for (const auto& [other_key, other] : names_) {
    if (replacing && other_key == *replacing) continue;
    if (other.formula_bearing_range() && other.target && overlaps(*other.target, t)) {
      throw WorkbookError(C::OverlappingFormulaRange, "'" + id + "' overlaps '" + other_key.display() + "'");
    }
  }
}

void Workbook::define(NameDef def) {
  if (def.derivation && is_valid_identifier(def.identifier)) def.target = derive_target(def);
  validate(def, nullptr);
  NameKey key = def.key();
  names_.emplace(key, std::move(def));
}

void Workbook::rederive_dependents(const NameKey& base) {
  for (auto& [key, def] : names_) {
    if (!def.derivation) continue;
    const NameDef* resolved = find_name(NameKey{def.scope, def.derivation->base});
    if (!resolved) resolved = find_name(NameKey{Scope::workbook(), def.derivation->base});
    if (!resolved || resolved->key() != base) continue;
    def.target = derive_target(def);
  }
}

void Workbook::rebind(const NameKey& key, const std::variant<GridRange, ExprPtr>& target) {
  auto it = names_.find(key);
  if (it == names_.end()) throw WorkbookError(WorkbookError::Code::UnknownName, "'" + key.display() + "'");
  NameDef def = it->second;
  def.derivation.reset();
  if (const auto* range = std::get_if<GridRange>(&target)) {
    if (def.kind == NameKind::Formula) {
      def.formula = nullptr;
      def.array = false;
    }
    def.kind = NameKind::Range;
    def.target = *range;
  } else {
    def.kind = NameKind::Formula;
    def.target.reset();
    def.array = false;
    def.formula = std::get<ExprPtr>(target);
  }
  validate(def, &key);
  it->second = std::move(def);
  rederive_dependents(key);
}

void Workbook::remove_sheet(std::string_view id) {
  auto it = std::find_if(sheets_.begin(), sheets_.end(), [&](const Sheet& s) { return s.id == id; });
  if (it == sheets_.end()) throw WorkbookError(WorkbookError::Code::UnknownSheet, std::string(id));
  sheets_.erase(it);

  std::erase_if(names_, [&](const auto& entry) {
    return !entry.first.scope.is_workbook() && entry.first.scope.sheet_id() == id;
  });
  for (auto& [key, def] : names_) {
    if (def.target && def.target->sheet == id) {
      def.target.reset();
      def.formula = nullptr;
      def.array = false;
      def.derivation.reset();
    }
  }
  for (auto& [key, def] : names_) {
    if (!def.derivation) continue;
    const NameDef* base = find_name(NameKey{def.scope, def.derivation->base});
    if (!base) base = find_name(NameKey{Scope::workbook(), def.derivation->base});
    if (!base) {
      def.derivation.reset();
      def.target.reset();
    } else {
      def.target = derive_target(def);
    }
  }
}

Workbook define_name(Workbook wb, NameDef def) {
  wb.define(std::move(def));
  return wb;
}

Workbook rebind_name(Workbook wb, const NameKey& key, const std::variant<GridRange, ExprPtr>& target) {
  wb.rebind(key, target);
  return wb;
}

Workbook delete_sheet(Workbook wb, std::string_view sheet) {
  wb.remove_sheet(sheet);
  return wb;
}

const NameDef* resolve_name(const Workbook& wb, std::string_view identifier,
                            std::optional<std::string_view> context) {
  if (context) {
    if (const NameDef* def = wb.find_name(NameKey{Scope::sheet(std::string(*context)), std::string(identifier)})) {
      return def;
    }
  }
  return wb.find_name(NameKey{Scope::workbook(), std::string(identifier)});
}

Resolution resolve_reference(const Workbook& wb, const QualifiedName& ref, std::optional<std::string_view> context) {
  if (ref.sheet) {
    if (!wb.find_sheet(*ref.sheet)) return Resolution{nullptr, ErrorKind::Ref};
    const NameDef* def = wb.find_name(NameKey{Scope::sheet(*ref.sheet), ref.identifier});
    return Resolution{def, ErrorKind::Name};
  }
  return Resolution{resolve_name(wb, ref.identifier, context), ErrorKind::Name};
}

std::optional<std::string_view> formula_context(const NameDef& def) {
  if (!def.scope.is_workbook()) return def.scope.sheet_id();
  if (def.target) return def.target->sheet;
  return std::nullopt;
}

}  // namespace namecalc
