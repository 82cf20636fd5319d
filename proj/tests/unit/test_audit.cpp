#include <doctest.h>

#include "gen.hpp"
#include "namecalc/audit.hpp"
#include "namecalc/doc.hpp"

#include <algorithm>
#include <map>

using namespace namecalc;
using namespace namecalc::testing;

namespace {

NameKey key(std::string id) { return NameKey{Scope::workbook(), std::move(id)}; }

const std::string kHead = "#%NAMESDOC v1\n[SHEET] S rows=20 cols=12\n";

std::string range(const std::string& id, const std::string& a1, const std::string& formula = "", bool output = false) {
  std::string s = "[NAME] scope=workbook id=" + id + " kind=range array=" + (formula.empty() ? "0" : "1") +
                  (output ? " output=1" : "") + "\n  target=S!" + a1 + "\n";
  if (!formula.empty()) s += "  formula=" + formula + "\n";
  return s;
}

std::string formula_name(const std::string& id, const std::string& formula, bool output = true) {
  return "[NAME] scope=workbook id=" + id + " kind=formula array=0" + (output ? " output=1" : "") +
         "\n  formula=" + formula + "\n";
}

std::vector<std::string> rules(const std::vector<Finding>& fs) {
  std::vector<std::string> out;
  for (const auto& f : fs) out.push_back(f.rule + " " + f.locus);
  return out;
}

}  // namespace

TEST_CASE("linear listing is in dependency order") {
  for (const char* f : {"fixtureA.nsdoc", "fixtureB.nsdoc", "fixtureC.nsdoc"}) {
    Workbook wb = load_fixture(f);
    auto listing = linear_listing(wb);
    std::map<NameKey, std::size_t> pos;
    for (std::size_t i = 0; i < listing.size(); ++i) pos[listing[i].key] = i;
    // Every input declaration comes before every statement.
    bool seen_statement = false;
    for (const auto& e : listing) {
      if (!e.input) seen_statement = true;
      CHECK(!(e.input && seen_statement));
    }
    DepGraph g = build_dep_graph(wb);
    for (const auto& e : g.edges) {
      if (e.recurrence || !pos.count(e.from) || !pos.count(e.to)) continue;
      CHECK_MESSAGE(pos[e.to] < pos[e.from], e.from.display() << " uses " << e.to.display());
    }
  }
  Workbook a = load_fixture("fixtureA.nsdoc");
  auto listing = linear_listing(a);
  auto at = [&](const char* id) {
    return std::find_if(listing.begin(), listing.end(), [&](const auto& e) { return e.key == key(id); }) -
           listing.begin();
  };
  CHECK(at("product.price") < at("revenue"));
  CHECK(at("revenue") < at("period.revenue"));
  const auto& rev = listing[static_cast<std::size_t>(at("revenue"))];
  CHECK(rev.formula == "volume * product.price");
  CHECK(rev.address == "Model!F32:X43");
  CHECK(rev.shape == Shape{12, 19});
  CHECK(format_listing(listing).find("revenue") != std::string::npos);
}

TEST_CASE("listing of a single input and of a cycle") {
  Workbook one = rebuild(kHead + range("x", "A1"));
  auto listing = linear_listing(one);
  REQUIRE(listing.size() == 1);
  CHECK(listing[0].input);
  CHECK(listing[0].address == "S!A1");

  Workbook cyc = rebuild(kHead + formula_name("a", "b") + formula_name("b", "a"));
  CHECK_THROWS_AS(linear_listing(cyc), CycleError);
}

TEST_CASE("focus graph") {
  Workbook c = load_fixture("fixtureC.nsdoc");
  GraphSlice s = focus_graph(c, key("debt.balance"), 1);
  CHECK(s.nodes.size() == 6);
  CHECK(s.edges.size() == 5);
  for (const auto& e : s.edges) CHECK(e.from == key("debt.balance"));
  for (const auto& n : s.nodes) CHECK(n.distance == (n.key == key("debt.balance") ? 0 : 1));

  GraphSlice prev = focus_graph(c, key("\xE2\x86\x90" "debt.balance"), 1);
  auto has = [](const GraphSlice& g, const NameKey& k) {
    return std::any_of(g.nodes.begin(), g.nodes.end(), [&](const GraphNode& n) { return n.key == k; });
  };
  CHECK(has(prev, key("debt.balance")));
  CHECK(has(prev, key("interest.expense")));

  GraphSlice zero = focus_graph(c, key("debt.balance"), 0);
  CHECK(zero.nodes.size() == 1);
  CHECK(zero.edges.empty());

  GraphSlice lone = focus_graph(rebuild(kHead + range("x", "A1")), key("x"), 3);
  CHECK(lone.nodes.size() == 1);
  CHECK_THROWS_AS(focus_graph(c, key("nonsuch"), 1), WorkbookError);

  // Widening the radius never loses nodes.
  std::size_t last = 0;
  for (int r = 0; r < 6; ++r) {
    std::size_t n = focus_graph(c, key("debt.balance"), r).nodes.size();
    CHECK(n >= last);
    last = n;
  }
}

TEST_CASE("DOT export") {
  Workbook c = load_fixture("fixtureC.nsdoc");
  for (const auto& [k, def] : c.names()) {
    std::string dot = export_dot(focus_graph(c, k, 2));
    CHECK_MESSAGE(check_dot(dot) == "", dot);
  }
  Workbook chain = rebuild(kHead + range("a", "A1") + formula_name("b", "a * 2"));
  std::string dot = export_dot(focus_graph(chain, key("b"), 1));
  CHECK(dot.find("\"a\" -> \"b\"") != std::string::npos);
  CHECK(dot.find("\"b\" -> \"a\"") == std::string::npos);
  CHECK(export_dot(GraphSlice{}) == "digraph {\n}\n");
}

TEST_CASE("lint: cell references") {
  Workbook wb = rebuild(kHead + range("price", "B2") + formula_name("taxRate", "$J$16") +
                        formula_name("tax", "price * taxRate"));
  auto fs = lint(wb);
  CHECK(rules(fs) == std::vector<std::string>{"N2 taxRate"});
  CHECK(has_errors(fs));
  CHECK(format_finding(fs[0]).starts_with("N2\terror\ttaxRate\t"));
}

TEST_CASE("lint: a fully named model is clean") {
  Workbook wb = rebuild(kHead + range("Price", "B2:B5") + range("Quantity", "C2:C5") +
                        range("Revenue", "D2:D5", "Price * Quantity", true));
  CHECK(lint(wb).empty());
  for (const char* f : {"fixtureA.nsdoc", "fixtureB.nsdoc", "fixtureC.nsdoc"}) CHECK(lint(load_fixture(f)).empty());
}

TEST_CASE("lint: unused names") {
  Workbook wb = rebuild(kHead + range("scratch", "B2") + range("kept", "C2") + formula_name("out", "kept"));
  auto fs = lint(wb);
  CHECK(rules(fs) == std::vector<std::string>{"N4 scratch"});
  CHECK(fs[0].severity == Severity::Warning);
  CHECK(!has_errors(fs));
}

TEST_CASE("lint: legacy cell formulas") {
  auto with_cells = [](const std::string& array) {
    Workbook wb = rebuild(kHead + "[NAME] scope=workbook id=total kind=range array=" + array +
                          " output=1\n  target=S!B2:B4\n  formula=1\n");
    wb.set_cell_formula("S", CellAddr{9, 9}, "=A1+1");
    wb.set_cell_formula("S", CellAddr{2, 2}, "=A2*2");
    wb.set_cell_formula("S", CellAddr{3, 2}, "=A3*2");
    return wb;
  };
  Workbook wb = with_cells("1");
  CHECK(rules(lint(wb)) == std::vector<std::string>{"N1 S!I9"});
  // A different shape of formula in the same range; array ranges are exempt.
  wb.set_cell_formula("S", CellAddr{4, 2}, "=A4+2");
  CHECK(rules(lint(wb)) == std::vector<std::string>{"N1 S!I9"});

  Workbook plain = with_cells("0");
  CHECK(rules(lint(plain)) == std::vector<std::string>{"N1 S!I9"});
  plain.set_cell_formula("S", CellAddr{4, 2}, "=A4+2");
  CHECK(rules(lint(plain)) == std::vector<std::string>{"N1 S!I9", "N5 total"});
}

TEST_CASE("lint: overlapping inputs and parse issues") {
  Workbook wb = rebuild(kHead + range("left", "B2:C3", "", true) + range("right", "C3:D4", "", true));
  auto fs = lint(wb);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].rule == "N3");
  CHECK(fs[0].severity == Severity::Warning);

  std::vector<FormulaIssue> issues;
  Workbook bad = rebuild_lenient(kHead + formula_name("a", "1 +"), issues);
  auto pf = lint(bad, issues);
  REQUIRE(pf.size() == 1);
  CHECK(pf[0].rule == "PARSE");
  CHECK(has_errors(pf));
}

TEST_CASE("lint is deterministic and clean workbooks export") {
  Rng rng(31);
  for (int i = 0; i < 50; ++i) {
    Workbook wb = random_workbook(rng);
    auto first = lint(wb);
    CHECK(lint(wb) == first);
    if (!has_errors(first)) CHECK_NOTHROW(export_doc(wb));
  }
}
