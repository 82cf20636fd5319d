#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "namecalc/audit.hpp"
#include "namecalc/doc.hpp"
#include "namecalc/eval.hpp"

namespace namecalc {

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kEvalErrors = 2;
constexpr int kLintErrors = 3;

struct Failure {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{"cannot read " + path};
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw Failure{"cannot write " + path};
}

NameKey parse_key(const std::string& text) {
  auto bang = text.find('!');
  if (bang == std::string::npos) return NameKey{Scope::workbook(), text};
  return NameKey{Scope::sheet(text.substr(0, bang)), text.substr(bang + 1)};
}

Workbook load(const std::string& path) {
  std::string text = read_file(path);
  return rebuild(text);
}

std::string tsv_block(const NameKey& key, const Value& v) {
  std::string out = "# " + key.display() + " " + to_string(v.shape()) + "\n";
  for (std::size_t r = 0; r < v.rows(); ++r) {
    for (std::size_t c = 0; c < v.cols(); ++c) {
      if (c) out += '\t';
      out += encode_field(v.at(r, c));
    }
    out += '\n';
  }
  return out;
}

int cmd_eval(const std::string& path, const std::vector<std::string>& names, const std::string& output,
             std::ostream& out, std::ostream& err) {
  Workbook wb = load(path);
  ValueStore store = evaluate(wb);
  std::vector<NameKey> keys;
  if (names.empty()) {
    for (const auto& [key, v] : store.values) keys.push_back(key);
  } else {
    for (const auto& n : names) {
      NameKey key = parse_key(n);
      if (!store.find(key)) throw Failure{"unknown name '" + n + "'"};
      keys.push_back(key);
    }
  }
  std::string text;
  bool errors = false;
  for (const auto& key : keys) {
    const Value& v = *store.find(key);
    errors = errors || v.first_error().has_value();
    text += tsv_block(key, v);
  }
  for (const auto& cycle : store.cycles) {
    std::string members;
    for (const auto& k : cycle) members += (members.empty() ? "" : ", ") + k.display();
    err << "#CYCLE! among " << members << '\n';
  }
  if (output.empty()) {
    out << text;
  } else {
    write_file(output, text);
  }
  return errors ? kEvalErrors : kOk;
}

int cmd_list(const std::string& path, std::ostream& out, std::ostream& err) {
  Workbook wb = load(path);
  try {
    out << format_listing(linear_listing(wb));
  } catch (const CycleError& e) {
    err << e.what() << '\n';
    return kEvalErrors;
  }
  return kOk;
}

int cmd_graph(const std::string& path, const std::string& focus, int radius, const std::string& dot, std::ostream& out) {
  Workbook wb = load(path);
  NameKey key = parse_key(focus);
  if (!wb.find_name(key)) throw Failure{"unknown name '" + focus + "'"};
  std::string text = export_dot(focus_graph(wb, key, radius));
  if (dot.empty()) {
    out << text;
  } else {
    write_file(dot, text);
  }
  return kOk;
}

int cmd_lint(const std::string& path, std::ostream& out) {
  std::vector<FormulaIssue> issues;
  Workbook wb = rebuild_lenient(read_file(path), issues);
  auto findings = lint(wb, issues);
  for (const auto& f : findings) out << format_finding(f) << '\n';
  return has_errors(findings) ? kLintErrors : kOk;
}

int cmd_fmt(const std::string& path, bool check, std::ostream& err) {
  std::string before = read_file(path);
  std::string after = export_doc(rebuild(before));
  if (after == before) return kOk;
  if (check) {
    err << path << " is not in canonical form\n";
    return kFailure;
  }
  write_file(path, after);
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Name-based spreadsheet calculation and audit"};
  app.require_subcommand(1);

  std::string doc;
  std::vector<std::string> names;
  std::string output;
  auto* eval = app.add_subcommand("eval", "Evaluate a names document and print values as TSV");
  eval->add_option("doc", doc, "Names document (.nsdoc)")->required();
  eval->add_option("--name", names, "Only print these names (repeatable; sheet!id for sheet scope)");
  eval->add_option("--output,-o", output, "Write the TSV here instead of standard output");

  auto* audit = app.add_subcommand("audit", "Dependency listing and graph views");
  audit->require_subcommand(1);
  auto* list = audit->add_subcommand("list", "Inputs, then statements in dependency order");
  list->add_option("doc", doc, "Names document")->required();
  std::string focus, dot;
  int radius = 1;
  auto* graph = audit->add_subcommand("graph", "Predecessors and dependents of one name as DOT");
  graph->add_option("doc", doc, "Names document")->required();
  graph->add_option("--focus", focus, "Name at the centre of the graph")->required();
  graph->add_option("--radius", radius, "Hops to follow in each direction")->check(CLI::NonNegativeNumber);
  graph->add_option("--dot", dot, "Write DOT here instead of standard output");

  auto* lint_cmd = app.add_subcommand("lint", "Check name discipline");
  lint_cmd->add_option("doc", doc, "Names document")->required();

  bool check = false;
  auto* fmt = app.add_subcommand("fmt", "Rewrite a names document in canonical form");
  fmt->add_option("doc", doc, "Names document")->required();
  fmt->add_flag("--check", check, "Only report whether the file is canonical");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kFailure;
  }

  try {
    if (*eval) return cmd_eval(doc, names, output, out, err);
    if (*list) return cmd_list(doc, out, err);
    if (*graph) return cmd_graph(doc, focus, radius, dot, out);
    if (*lint_cmd) return cmd_lint(doc, out);
    if (*fmt) return cmd_fmt(doc, check, err);
  } catch (const Failure& f) {
    err << "error: " << f.message << '\n';
  } catch (const DocError& e) {
    err << doc << ": " << e.what() << '\n';
  } catch (const ExportError& e) {
    err << doc << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << doc << ": " << e.what() << '\n';
  }
  return kFailure;
}

}  // namespace namecalc
