#pragma once

#include <optional>
#include <string>
#include <vector>

#include "namecalc/depgraph.hpp"
#include "namecalc/doc.hpp"
#include "namecalc/workbook.hpp"

namespace namecalc {

struct ListingEntry {
  NameKey key;
  bool input = false;
  std::string formula;             // canonical text; empty for inputs
  std::string address;             // "Sheet!F5:X16", "#REF!", or empty for formula names
  std::optional<Shape> shape;      // absent for formula names
};

/// Input declarations first, then one statement per formula-bearing name in
/// dependency order. Throws CycleError.
std::vector<ListingEntry> linear_listing(const Workbook& wb);
std::string format_listing(const std::vector<ListingEntry>& listing);

struct GraphNode {
  NameKey key;
  std::string formula;
  std::string address;
  int distance = 0;  // hops from the focus
};

struct GraphSlice {
  std::vector<GraphNode> nodes;  // identifier order
  std::vector<DepEdge> edges;    // only edges walked from the focus
};

/// Predecessors and dependents within `radius` hops of `focus`. Throws
/// WorkbookError(UnknownName).
GraphSlice focus_graph(const Workbook& wb, const NameKey& focus, int radius);

/// DOT digraph; edges run from the referenced name to the name using it.
std::string export_dot(const GraphSlice& slice);

enum class Severity { Error, Warning };

struct Finding {
  std::string rule;  // N1..N5, PARSE
  Severity severity = Severity::Error;
  std::string locus;
  std::string message;
  bool operator==(const Finding&) const = default;
};

std::vector<Finding> lint(const Workbook& wb, const std::vector<FormulaIssue>& parse_issues = {});
/// "rule<TAB>severity<TAB>locus<TAB>message"
std::string format_finding(const Finding& f);
bool has_errors(const std::vector<Finding>& findings);

}  // namespace namecalc
