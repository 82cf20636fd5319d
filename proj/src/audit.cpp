#include "namecalc/audit.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace namecalc {

namespace {

std::string address_of(const NameDef& def) {
  if (!def.is_range()) return "";
  return def.target ? qualified_a1(*def.target) : "#REF!";
}

std::optional<Shape> shape_of_name(const Workbook& wb, const NameDef& def) {
  if (!def.is_range() || !def.target) return std::nullopt;
  const Sheet* sheet = wb.find_sheet(def.target->sheet);
  return shape_of(*def.target, sheet ? sheet->extent() : Extent{});
}

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<ListingEntry> linear_listing(const Workbook& wb) {
  std::vector<NameKey> order = topo_order(build_dep_graph(wb));
  std::vector<ListingEntry> inputs, statements;
  for (const auto& key : order) {
    const NameDef& def = *wb.find_name(key);
    ListingEntry e{key, !def.formula, def.formula ? render(def.formula) : "", address_of(def), shape_of_name(wb, def)};
    (e.input ? inputs : statements).push_back(std::move(e));
  }
  std::sort(inputs.begin(), inputs.end(),
            [](const ListingEntry& a, const ListingEntry& b) { return identifier_less(a.key, b.key); });
  inputs.insert(inputs.end(), statements.begin(), statements.end());
  return inputs;
}

std::string format_listing(const std::vector<ListingEntry>& listing) {
  std::ostringstream out;
  for (const auto& e : listing) {
    out << e.key.display() << '\t' << (e.shape ? to_string(*e.shape) : "formula") << '\t';
    if (e.input) {
      out << "input " << e.address;
    } else {
      out << "= " << e.formula;
      if (!e.address.empty()) out << "  @ " << e.address;
    }
    out << '\n';
  }
  return out.str();
}

GraphSlice focus_graph(const Workbook& wb, const NameKey& focus, int radius) {
  if (!wb.find_name(focus)) throw WorkbookError(WorkbookError::Code::UnknownName, "'" + focus.display() + "'");
  DepGraph g = build_dep_graph(wb);
  std::map<NameKey, int> distance{{focus, 0}};
  std::vector<DepEdge> walked;

  // Upstream follows references, downstream follows usages.
  for (bool upstream : {true, false}) {
    std::map<NameKey, int> seen{{focus, 0}};
    std::deque<NameKey> queue{focus};
    while (!queue.empty()) {
      NameKey n = queue.front();
      queue.pop_front();
      int d = seen[n];
      if (d >= radius) continue;
      for (const auto& e : g.edges) {
        const NameKey& near = upstream ? e.from : e.to;
        const NameKey& far = upstream ? e.to : e.from;
        if (near != n) continue;
        walked.push_back(e);
        if (seen.emplace(far, d + 1).second) queue.push_back(far);
      }
    }
    for (const auto& [k, d] : seen) {
      auto [it, fresh] = distance.emplace(k, d);
      if (!fresh) it->second = std::min(it->second, d);
    }
  }

  GraphSlice slice;
  for (const auto& [key, d] : distance) {
    const NameDef& def = *wb.find_name(key);
    slice.nodes.push_back(GraphNode{key, def.formula ? render(def.formula) : "", address_of(def), d});
  }
  std::sort(slice.nodes.begin(), slice.nodes.end(),
            [](const GraphNode& a, const GraphNode& b) { return identifier_less(a.key, b.key); });
  std::sort(walked.begin(), walked.end(), [](const DepEdge& a, const DepEdge& b) {
    if (a.to != b.to) return identifier_less(a.to, b.to);
    return identifier_less(a.from, b.from);
  });
  walked.erase(std::unique(walked.begin(), walked.end()), walked.end());
  slice.edges = std::move(walked);
  return slice;
}

std::string export_dot(const GraphSlice& slice) {
  std::ostringstream out;
  out << "digraph {\n";
  for (const auto& n : slice.nodes) {
    // Label lines are quoted separately and joined with DOT's \n escape.
    std::string label = dot_quote(n.key.display());
    if (!n.formula.empty()) label = label.substr(0, label.size() - 1) + "\\n" + dot_quote("= " + n.formula).substr(1);
    if (!n.address.empty()) label = label.substr(0, label.size() - 1) + "\\n" + dot_quote(n.address).substr(1);
    out << "  " << dot_quote(n.key.display()) << " [label=" << label << "];\n";
  }
  for (const auto& e : slice.edges) {
    out << "  " << dot_quote(e.to.display()) << " -> " << dot_quote(e.from.display());
    if (e.recurrence) out << " [style=dashed]";
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Lint

namespace {

// A legacy cell formula with its cell references made relative to the host
// cell, so that copies across a range compare equal.
std::string relative_form(const std::string& text, CellAddr host) {
  std::vector<Token> tokens;
  try {
    tokens = tokenize(text);
  } catch (const std::exception&) {
    return text;
  }
  std::string out;
  for (const auto& t : tokens) {
    if (t.kind != TokenKind::CellRef) {
      out += t.lexeme;
      out += '\x1f';
      continue;
    }
    try {
      ExprPtr parsed = parse_formula(t.lexeme);
      const auto& ref = std::get<CellRef>(parsed->node);
      auto coord = [&](const CellCoord& c) {
        std::string s = c.abs_col ? "C" + std::to_string(c.col) : "C[" + std::to_string(c.col - host.col) + "]";
        if (c.row) s += c.abs_row ? "R" + std::to_string(*c.row) : "R[" + std::to_string(*c.row - host.row) + "]";
        return s;
      };
      out += (ref.sheet ? *ref.sheet + "!" : "") + coord(ref.first) + (ref.last ? ":" + coord(*ref.last) : "");
    } catch (const std::exception&) {
      out += t.lexeme;
    }
    out += '\x1f';
  }
  return out;
}

bool input_range(const NameDef& def, const std::vector<GridRange>& formula_ranges) {
  if (!def.is_range() || def.has_formula() || def.derivation || !def.target) return false;
  return std::none_of(formula_ranges.begin(), formula_ranges.end(),
                      [&](const GridRange& r) { return overlaps(r, *def.target); });
}

}  // namespace

std::vector<Finding> lint(const Workbook& wb, const std::vector<FormulaIssue>& parse_issues) {
  std::vector<Finding> out;
  for (const auto& issue : parse_issues) {
    out.push_back(Finding{"PARSE", Severity::Error, issue.name, "line " + std::to_string(issue.line) + ": " + issue.message});
  }

  std::vector<std::pair<NameKey, GridRange>> formula_ranges;
  std::vector<GridRange> formula_rects;
  for (const auto& [key, def] : wb.names()) {
    if (def.formula_bearing_range() && def.target) {
      formula_ranges.emplace_back(key, *def.target);
      formula_rects.push_back(*def.target);
    }
  }

  // N1 and N5: legacy cell formulas.
  for (const auto& sheet : wb.sheets()) {
    std::map<NameKey, std::map<std::string, CellAddr>> forms_by_owner;
    for (const auto& [at, text] : sheet.cell_formulas) {
      auto owner = std::find_if(formula_ranges.begin(), formula_ranges.end(),
                                [&](const auto& fr) { return fr.second.sheet == sheet.id && contains(fr.second, at); });
      if (owner == formula_ranges.end()) {
        out.push_back(Finding{"N1", Severity::Error, sheet.id + "!" + to_a1(at),
                              "formula cell is not owned by a named range: " + text});
      } else {
        forms_by_owner[owner->first].emplace(relative_form(text, at), at);
      }
    }
    for (const auto& [key, forms] : forms_by_owner) {
      if (wb.find_name(key)->array || forms.size() < 2) continue;
      out.push_back(Finding{"N5", Severity::Error, key.display(),
                            std::to_string(forms.size()) + " different cell formulas in one range"});
    }
  }

  // N2 and the reference census for N4.
  std::set<NameKey> used;
  for (const auto& [key, def] : wb.names()) {
    if (def.derivation) {
      auto ctx = def.scope.is_workbook() ? std::nullopt : std::optional<std::string_view>(def.scope.sheet_id());
      if (const NameDef* base = resolve_name(wb, def.derivation->base, ctx)) used.insert(base->key());
    }
    if (!def.formula) continue;
    for (const auto& ref : cell_refs(*def.formula)) {
      out.push_back(Finding{"N2", Severity::Error, key.display(), "cell reference " + render(ref) + " in formula"});
    }
    auto ctx = formula_context(def);
    for (const auto& ref : names_referenced(*def.formula)) {
      if (const NameDef* d = resolve_reference(wb, ref, ctx).def) used.insert(d->key());
    }
  }

  // N3: data-holding ranges that share cells.
  std::vector<const NameDef*> inputs;
  for (const auto& [key, def] : wb.names()) {
    if (input_range(def, formula_rects)) inputs.push_back(&def);
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t j = i + 1; j < inputs.size(); ++j) {
      if (overlaps(*inputs[i]->target, *inputs[j]->target)) {
        out.push_back(Finding{"N3", Severity::Warning, inputs[i]->key().display(),
                              "input range overlaps " + inputs[j]->key().display()});
      }
    }
  }

  for (const auto& [key, def] : wb.names()) {
    if (!def.output && !used.count(key)) {
      out.push_back(Finding{"N4", Severity::Warning, key.display(), "name is never referenced"});
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const Finding& a, const Finding& b) {
    return std::tie(a.rule, a.locus) < std::tie(b.rule, b.locus);
  });
  return out;
}

std::string format_finding(const Finding& f) {
  return f.rule + "\t" + (f.severity == Severity::Error ? "error" : "warning") + "\t" + f.locus + "\t" + f.message;
}

bool has_errors(const std::vector<Finding>& findings) {
  return std::any_of(findings.begin(), findings.end(), [](const Finding& f) { return f.severity == Severity::Error; });
}

}  // namespace namecalc
