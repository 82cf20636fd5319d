#pragma once

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "namecalc/formula.hpp"
#include "namecalc/grid.hpp"
#include "namecalc/value.hpp"

namespace namecalc {

/// Where a name is visible: the whole workbook or a single sheet.
class Scope {
 public:
  static Scope workbook() { return Scope{}; }
  static Scope sheet(std::string id) { return Scope{std::move(id)}; }

  bool is_workbook() const { return sheet_.empty(); }
  const std::string& sheet_id() const { return sheet_; }
  /// "workbook" or the sheet id, as written in documents.
  std::string text() const { return is_workbook() ? "workbook" : sheet_; }

  // Workbook scope sorts first.
  auto operator<=>(const Scope&) const = default;

 private:
  Scope() = default;
  explicit Scope(std::string id) : sheet_(std::move(id)) {}
  std::string sheet_;
};

struct NameKey {
  Scope scope = Scope::workbook();
  std::string identifier;

  /// "id" for workbook names, "sheet!id" for sheet-scoped ones.
  std::string display() const;
  auto operator<=>(const NameKey&) const = default;
};

enum class NameKind { Range, Formula };

/// Mechanical displacement of another name's range (the "←" convention).
struct Derivation {
  std::string base;
  int d_row = 0;
  int d_col = 0;
  bool operator==(const Derivation&) const = default;
};

struct NameDef {
  std::string identifier;
  Scope scope = Scope::workbook();
  NameKind kind = NameKind::Range;
  /// Range names only. Absent on a range name means the target was deleted (#REF!).
  std::optional<GridRange> target;
  bool array = false;
  /// Defining formula: the computation for a formula-bearing range, or the
  /// whole definition of a formula name. Null for input ranges.
  ExprPtr formula;
  std::optional<Derivation> derivation;
  /// Intended result; exempt from the unused-name lint.
  bool output = false;

  NameKey key() const { return NameKey{scope, identifier}; }
  bool is_range() const { return kind == NameKind::Range; }
  bool has_formula() const { return formula != nullptr; }
  bool formula_bearing_range() const { return is_range() && has_formula(); }
};

bool equivalent(const NameDef& a, const NameDef& b);

struct Sheet {
  std::string id;
  int rows = 1;
  int cols = 1;
  std::map<CellAddr, Scalar> literals;
  /// Legacy single-cell formulas, as entered. Never evaluated; linted.
  std::map<CellAddr, std::string> cell_formulas;

  Extent extent() const { return Extent{rows, cols}; }
};

class WorkbookError : public std::runtime_error {
 public:
  enum class Code {
    DuplicateName,
    OverlappingFormulaRange,
    BadIdentifier,
    UnknownName,
    UnknownSheet,
    InvalidDefinition,
  };
  WorkbookError(Code code, std::string message);
  Code code() const { return code_; }

 private:
  Code code_;
};

std::string_view to_string(WorkbookError::Code code);

class Workbook {
 public:
  const std::vector<Sheet>& sheets() const { return sheets_; }
  const Sheet* find_sheet(std::string_view id) const;
  const std::map<NameKey, NameDef>& names() const { return names_; }
  const NameDef* find_name(const NameKey& key) const;

  void add_sheet(std::string id, int rows, int cols);
  void set_literal(std::string_view sheet, CellAddr at, Scalar value);
  void set_cell_formula(std::string_view sheet, CellAddr at, std::string formula);
  /// Writes a block of literals row-major starting at the range's top-left.
  void set_literals(const GridRange& range, const std::vector<Scalar>& row_major);

  void define(NameDef def);
  void rebind(const NameKey& key, const std::variant<GridRange, ExprPtr>& target);
  void remove_sheet(std::string_view id);

 private:
  Sheet& sheet_mut(std::string_view id);
  void validate(const NameDef& def, const NameKey* replacing) const;
  void rederive_dependents(const NameKey& base);
  std::optional<GridRange> derive_target(const NameDef& def) const;

  std::vector<Sheet> sheets_;
  std::map<NameKey, NameDef> names_;
};

// Value-returning operations over a workbook.
Workbook define_name(Workbook wb, NameDef def);
Workbook rebind_name(Workbook wb, const NameKey& key, const std::variant<GridRange, ExprPtr>& target);
Workbook delete_sheet(Workbook wb, std::string_view sheet);

/// Unqualified lookup: a definition scoped to `context` shadows the workbook
/// one. Returns null (#NAME?) when absent.
const NameDef* resolve_name(const Workbook& wb, std::string_view identifier,
                            std::optional<std::string_view> context);

/// Lookup of a reference as written in a formula.
struct Resolution {
  const NameDef* def = nullptr;
  ErrorKind error = ErrorKind::Name;  // meaningful when def is null
};
Resolution resolve_reference(const Workbook& wb, const QualifiedName& ref, std::optional<std::string_view> context);

/// Sheet whose unqualified names a name's formula sees: its scope sheet,
/// else the sheet of its target, else none (workbook names only).
std::optional<std::string_view> formula_context(const NameDef& def);

}  // namespace namecalc
