#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "namecalc/workbook.hpp"

namespace namecalc {

inline constexpr std::string_view kDocHeader = "#%NAMESDOC v1";

/// Failure to read a names document. `line` is 1-based, 0 when unknown.
class DocError : public std::runtime_error {
 public:
  DocError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

class DocSyntaxError : public DocError {
 public:
  using DocError::DocError;
};

class UnknownVersion : public DocError {
 public:
  using DocError::DocError;
};

class UndeclaredName : public DocError {
 public:
  UndeclaredName(int line, std::string name);
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class ExportError : public std::runtime_error {
 public:
  ExportError(std::vector<std::string> cells, const std::string& message);
  /// Offending cells as "sheet!A1".
  const std::vector<std::string>& cells() const { return cells_; }

 private:
  std::vector<std::string> cells_;
};

/// A formula that failed to parse while rebuilding leniently.
struct FormulaIssue {
  int line = 0;
  std::string name;     // display form of the owning name
  std::string message;
};

/// Canonical document text for a workbook.
std::string export_doc(const Workbook& wb);

/// Workbook described by a document.
Workbook rebuild(std::string_view doc);

/// Like rebuild, but names whose formulas do not parse are dropped and
/// reported instead of aborting. References to them still count as declared.
Workbook rebuild_lenient(std::string_view doc, std::vector<FormulaIssue>& issues);

/// Field encodings used in data blocks.
std::string encode_field(const Scalar& s);

}  // namespace namecalc
