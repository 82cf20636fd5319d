// Acceptance runner: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "gen.hpp"
#include "namecalc/audit.hpp"
#include "namecalc/doc.hpp"
#include "namecalc/eval.hpp"
#include "properties.hpp"

using namespace namecalc;
using namespace namecalc::testing;

namespace {

// Tolerances.
constexpr double kClosedFormRel = 1e-9;
constexpr double kLoanScale = 1e-6;   // times the loan amount
constexpr double kLoanTrackRel = 1e-9;
constexpr double kRevenueSeconds = 1.0;
constexpr double kSuiteSeconds = 60.0;

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
  void check(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

NameKey key(std::string id) { return NameKey{Scope::workbook(), std::move(id)}; }

const Scalar& literal(const Workbook& wb, const std::string& sheet, int row, int col) {
  static const Scalar blank = Blank{};
  const auto& lits = wb.find_sheet(sheet)->literals;
  auto it = lits.find(CellAddr{row, col});
  return it == lits.end() ? blank : it->second;
}

double number(const Scalar& s) { return std::holds_alternative<double>(s) ? std::get<double>(s) : NAN; }

double rel_err(double got, double want) {
  double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

std::string fmt(double d) { return format_number(d); }

// Fixture A layout: products in rows 6..17, periods in columns F..X.
constexpr int kFirstProductRow = 6;
constexpr int kProducts = 12;
constexpr int kFirstPeriodCol = 6;
constexpr int kPeriods = 19;
constexpr int kVolumeRow = 19;

// Price path straight from the input cells, period by period.
std::vector<std::vector<double>> price_oracle(const Workbook& wb) {
  std::vector<std::vector<double>> p(kProducts, std::vector<double>(kPeriods));
  for (int r = 0; r < kProducts; ++r) {
    int row = kFirstProductRow + r;
    bool escalated = literal(wb, "Model", row, 2) == Scalar{true};
    double initial = number(literal(wb, "Model", row, 3));
    double prev = initial;
    for (int t = 0; t < kPeriods; ++t) {
      if (escalated) {
        double rate = number(literal(wb, "Model", row, 4));
        prev = (t == 0 ? initial : prev) * (1 + rate);
        p[r][t] = prev;
      } else {
        p[r][t] = initial;
      }
    }
  }
  return p;
}

Outcome c1_single_formula() {
  Outcome o;
  Workbook wb = load_fixture("fixtureA.nsdoc");
  const NameDef* rev = wb.find_name(key("revenue"));
  o.check(rev && rev->formula_bearing_range() && rev->array, "revenue is not an array formula range");
  if (!o.ok) return o;
  Shape s = shape_of(*rev->target);
  o.check(s == Shape{12, 19} && s.size() == 228, "revenue range is " + to_string(s));
  for (const auto& [at, text] : wb.find_sheet("Model")->cell_formulas) {
    if (contains(*rev->target, at)) o.fail("cell formula inside revenue: " + text);
  }

  auto t0 = Clock::now();
  ValueStore store = evaluate(wb);
  double secs = seconds_since(t0);
  o.check(secs < kRevenueSeconds, "evaluation took " + fmt(secs) + " s");

  auto price = price_oracle(wb);
  const Value& v = *store.find("revenue");
  int exact = 0;
  for (int r = 0; r < kProducts; ++r) {
    for (int t = 0; t < kPeriods; ++t) {
      double want = number(literal(wb, "Model", kVolumeRow + r, kFirstPeriodCol + t)) * price[r][t];
      const Scalar& got = v.at(static_cast<std::size_t>(r), static_cast<std::size_t>(t));
      if (identical(got, Scalar{want})) {
        ++exact;
      } else {
        o.fail("revenue[" + std::to_string(r + 1) + "," + std::to_string(t + 1) + "] = " + display_text(got) +
               ", oracle " + fmt(want));
      }
    }
  }
  if (o.ok) o.detail = std::to_string(exact) + "/228 cells at 0 ULP, evaluate " + fmt(std::round(secs * 1e4) / 1e4) + " s";
  return o;
}

Outcome c2_escalation() {
  Outcome o;
  Workbook wb = load_fixture("fixtureA.nsdoc");
  ValueStore store = evaluate(wb);
  const Value& price = *store.find("product.price");
  double worst = 0;
  for (int r = 0; r < kProducts; ++r) {
    int row = kFirstProductRow + r;
    double initial = number(literal(wb, "Model", row, 3));
    bool escalated = literal(wb, "Model", row, 2) == Scalar{true};
    for (int t = 0; t < kPeriods; ++t) {
      double got = number(price.at(static_cast<std::size_t>(r), static_cast<std::size_t>(t)));
      if (escalated) {
        double rate = number(literal(wb, "Model", row, 4));
        double want = initial * std::pow(1 + rate, t + 1);
        worst = std::max(worst, rel_err(got, want));
        o.check(rel_err(got, want) <= kClosedFormRel, "product " + std::to_string(r + 1) + " period " +
                                                          std::to_string(t + 1) + ": " + fmt(got) + " vs " + fmt(want));
      }
    }
  }
  // Products 4 to 6 carry "Not applied" / "-" escalation.
  const double constant[] = {20, 10, 20};
  for (int k = 0; k < 3; ++k) {
    for (std::size_t t = 0; t < kPeriods; ++t) {
      const Scalar& got = price.at(static_cast<std::size_t>(3 + k), t);
      o.check(identical(got, Scalar{constant[k]}), "product " + std::to_string(4 + k) + " is " + display_text(got));
    }
  }
  PropertyResult p = prop_recurrence_closed_form(1002, 1000);
  o.check(p.ok && p.cases == 1000, "closed form: " + p.detail);
  if (o.ok) {
    std::ostringstream d;
    d << "fixture worst rel err " << worst << ", " << p.cases << " random cases, products 4-6 exact";
    o.detail = d.str();
  }
  return o;
}

Outcome c3_intersection_sum() {
  Outcome o;
  Workbook wb = load_fixture("fixtureA.nsdoc");
  ValueStore store = evaluate(wb);
  // Period 1 is the column whose start date equals the selected date.
  double selected = number(literal(wb, "Model", 2, 3));
  int col = -1;
  for (int t = 0; t < kPeriods; ++t) {
    if (number(literal(wb, "Model", 2, kFirstPeriodCol + t)) == selected) col = t;
  }
  o.check(col == 0, "selected date is not in period 1");
  if (!o.ok) return o;
  auto price = price_oracle(wb);
  double sum = 0;
  for (int r = 0; r < kProducts; ++r) sum += number(literal(wb, "Model", kVolumeRow + r, kFirstPeriodCol + col)) * price[r][col];
  const Scalar& got = store.find("period.revenue")->scalar();
  o.check(identical(got, Scalar{sum}), "period.revenue " + display_text(got) + " vs oracle " + fmt(sum));
  if (o.ok) {
    o.detail = "period.revenue = oracle = " + fmt(sum) + "; printed total 110,007 not matched (volumes are reconstructed)";
  }
  return o;
}

Outcome c4_loan() {
  Outcome o;
  Workbook wb = load_fixture("fixtureC.nsdoc");
  ValueStore store = evaluate(wb);
  const Value& bal = *store.find("debt.balance");
  const Value& svc = *store.find("debt.service");
  const Value& interest = *store.find("interest.expense");
  const int periods = static_cast<int>(bal.cols());

  // Row 2: fixed payment, no grace. Amortise by hand.
  const int row = 4;  // sheet row of the profile
  double amount = number(literal(wb, "Loan", row, 1));
  double rate = number(literal(wb, "Loan", row, 2));
  double n = number(literal(wb, "Loan", row, 4));
  o.check(literal(wb, "Loan", row, 5) == Scalar{true} && number(literal(wb, "Loan", row, 3)) == 0,
          "row 2 is not the fixed-payment no-grace profile");
  double payment = amount * rate / (1 - std::pow(1 + rate, -n));
  double b = amount;
  for (int t = 0; t < periods; ++t) {
    if (t > 0) b = b * (1 + rate) - payment;
    double got = number(bal.at(1, static_cast<std::size_t>(t)));
    o.check(std::abs(got - b) <= kLoanScale * amount, "period " + std::to_string(t + 1) + " balance " + fmt(got) +
                                                          " vs oracle " + fmt(b));
  }
  double final_balance = number(bal.at(1, static_cast<std::size_t>(periods - 1)));
  o.check(std::abs(final_balance) <= kLoanScale * amount, "final balance " + fmt(final_balance));

  // Grace profiles: rows 3 and 4 of the table.
  for (std::size_t r : {2u, 3u}) {
    int grace = static_cast<int>(number(literal(wb, "Loan", 3 + static_cast<int>(r), 3)));
    o.check(grace > 0, "profile " + std::to_string(r + 1) + " has no grace");
    for (int t = 1; t <= grace; ++t) {
      auto c = static_cast<std::size_t>(t);
      o.check(identical(svc.at(r, c), Scalar{0.0}), "service during grace is " + display_text(svc.at(r, c)));
      double growth = number(bal.at(r, c)) - number(bal.at(r, c - 1));
      double accrued = number(interest.at(r, c));
      o.check(std::abs(growth - accrued) <= kLoanTrackRel * number(bal.at(r, c)),
              "balance growth " + fmt(growth) + " vs interest " + fmt(accrued));
    }
    double last = number(bal.at(r, static_cast<std::size_t>(periods - 1)));
    o.check(std::abs(last) <= kLoanScale * amount, "grace profile final balance " + fmt(last));
  }
  if (o.ok) o.detail = "annuity final balance " + fmt(final_balance) + ", payment " + fmt(payment);
  return o;
}

Outcome c5_focus_graph() {
  Outcome o;
  Workbook wb = load_fixture("fixtureC.nsdoc");
  const NameKey focus = key("debt.balance");
  GraphSlice s = focus_graph(wb, focus, 1);
  std::set<NameKey> preds, deps;
  for (const auto& e : s.edges) {
    if (e.from == focus) preds.insert(e.to);
    if (e.to == focus) deps.insert(e.from);
  }
  // The names in IF(initialise.loan?, loan.amount, ←debt.balance + interest.expense - debt.service).
  std::set<NameKey> want;
  for (const auto& q : names_referenced(*wb.find_name(focus)->formula)) want.insert(key(q.identifier));
  o.check(want.size() == 5, "formula names " + std::to_string(want.size()));
  o.check(preds == want, "predecessors differ from the formula's names");
  o.check(deps.empty(), std::to_string(deps.size()) + " dependents");
  o.check(s.nodes.size() == 6, std::to_string(s.nodes.size()) + " nodes");

  GraphSlice prev = focus_graph(wb, key("\xE2\x86\x90" "debt.balance"), 1);
  bool found = std::any_of(prev.edges.begin(), prev.edges.end(), [&](const DepEdge& e) {
    return e.from == focus && e.to == key("\xE2\x86\x90" "debt.balance");
  });
  o.check(found, "debt.balance is not a dependent of its displaced copy");
  if (o.ok) o.detail = "5 predecessors, 0 dependents; ←debt.balance feeds debt.balance";
  return o;
}

Outcome c6_round_trip() {
  Outcome o;
  for (const char* f : {"fixtureA.nsdoc", "fixtureB.nsdoc", "fixtureC.nsdoc"}) {
    std::string text = read_text(fixture_path(f));
    Workbook wb = rebuild(text);
    std::string once = export_doc(wb);
    o.check(once == text, std::string(f) + " is not a byte fixpoint");
    Workbook back = rebuild(once);
    o.check(export_doc(back) == once, std::string(f) + " second export differs");
    std::string diff = diff_stores(evaluate(wb), evaluate(back));
    o.check(diff.empty(), std::string(f) + ": " + diff);
  }
  PropertyResult p = prop_doc_roundtrip(1006, 200);
  o.check(p.ok && p.cases == 200, "random: " + p.detail);
  if (o.ok) o.detail = "3 fixtures + " + std::to_string(p.cases) + " random workbooks, bit-for-bit";
  return o;
}

Outcome c7_module_rebinding() {
  Outcome o;
  // Standalone unit configuration: the module's own dummy lists.
  Workbook wb = load_fixture("fixtureB.nsdoc");
  std::vector<double> a, b;
  for (int r = 1; r <= 20; ++r) {
    if (is_number(literal(wb, "mergeRoutine", r, 2))) a.push_back(number(literal(wb, "mergeRoutine", r, 2)));
    if (is_number(literal(wb, "mergeRoutine", r, 3))) b.push_back(number(literal(wb, "mergeRoutine", r, 3)));
  }
  o.check(!a.empty() || !b.empty(), "fixture B has no dummy data");
  std::string standalone = check_merged(evaluate(wb), a, b);
  o.check(standalone.empty(), "dummy data: " + standalone);

  PropertyResult p = prop_merge(1007, 100);
  o.check(p.ok && p.cases == 100, "random lists: " + p.detail);
  if (o.ok) {
    o.detail = "dummy " + std::to_string(a.size()) + "+" + std::to_string(b.size()) + " items; " +
               std::to_string(p.cases) + " random pairs in place and rebound";
  }
  return o;
}

std::vector<Finding> lint_text(const std::string& text) {
  std::vector<FormulaIssue> issues;
  Workbook wb = rebuild_lenient(text, issues);
  return lint(wb, issues);
}

Outcome c8_lint() {
  Outcome o;
  for (const char* f : {"fixtureA.nsdoc", "fixtureB.nsdoc", "fixtureC.nsdoc"}) {
    auto findings = lint_text(read_text(fixture_path(f)));
    o.check(findings.empty(), std::string(f) + ": " + (findings.empty() ? "" : format_finding(findings[0])));
  }
  std::string text = read_text(fixture_path("fixtureA.nsdoc"));
  const std::string legacy = "[NAME] scope=workbook id=taxRate kind=formula array=0 output=1\n  formula=$J$16\n";
  text.insert(text.find("[DATA]"), legacy);
  auto findings = lint_text(text);
  o.check(findings.size() == 1 && findings[0].rule == "N2" && findings[0].severity == Severity::Error,
          std::to_string(findings.size()) + " findings after injection");

  auto path = std::filesystem::temp_directory_path() / "namecalc_acceptance_n2.nsdoc";
  std::ofstream(path, std::ios::binary) << text;
  std::ostringstream out, err;
  int code = run_cli({"lint", path.string()}, out, err);
  std::filesystem::remove(path);
  o.check(code == 3, "lint exit code " + std::to_string(code));
  if (o.ok) o.detail = "fixtures clean; injected $J$16 -> 1 N2, exit 3";
  return o;
}

// Line items each sit in one state; the tax rate comes from a 5-state table.
struct TaxModel {
  std::vector<std::string> codes{"CA", "NY", "OR", "TX", "WA"};
  std::vector<double> rates{0.0725, 0.04, 0, 0.0625, 0.065};
  static constexpr int kItems = 8;

  Workbook build(const std::vector<int>& item_state, double legacy_rate, bool legacy_flag) const {
    Workbook wb;
    wb.add_sheet("Tax", 20, 12);
    std::vector<Scalar> code_cells, rate_cells, state_cells, amount_cells;
    for (std::size_t i = 0; i < codes.size(); ++i) {
      code_cells.emplace_back(codes[i]);
      rate_cells.emplace_back(rates[i]);
    }
    for (int i = 0; i < kItems; ++i) {
      state_cells.emplace_back(codes[static_cast<std::size_t>(item_state[static_cast<std::size_t>(i)])]);
      amount_cells.emplace_back(100.0 * (i + 1) + 0.25);
    }
    auto input = [&](const std::string& id, const std::string& a1, const std::vector<Scalar>& cells) {
      NameDef d;
      d.identifier = id;
      d.target = *parse_a1("Tax", a1);
      wb.define(d);
      if (!cells.empty()) wb.set_literals(*d.target, cells);
    };
    input("state.codes", "A2:A6", code_cells);
    input("state.taxRate", "B2:B6", rate_cells);
    input("state", "D2:D9", state_cells);
    input("amount", "E2:E9", amount_cells);
    input("default.taxRate", "J16", {legacy_rate});
    input("isLegacyCalculation?", "J17", {legacy_flag});

    NameDef tax;
    tax.identifier = "taxRate";
    tax.target = *parse_a1("Tax", "J16");
    wb.define(tax);

    NameDef due;
    due.identifier = "tax.due";
    due.target = *parse_a1("Tax", "F2:F9");
    due.formula = parse_formula("amount * taxRate");
    due.array = true;
    due.output = true;
    wb.define(due);
    return wb;
  }
};

const char* const kLookup = "LOOKUP(state, state.codes, state.taxRate)";
const char* const kIndexMatch = "INDEX(state.taxRate, MATCH(state, state.codes, 0))";
const char* const kLegacy = "IF(isLegacyCalculation?, default.taxRate, LOOKUP(state, state.codes, state.taxRate))";

Value tax_due(const Workbook& wb, const char* formula) {
  Workbook w = formula ? rebind_name(wb, key("taxRate"), parse_formula(formula)) : wb;
  return *evaluate(w).find("tax.due");
}

Outcome c9_tax_ladder() {
  Outcome o;
  TaxModel m;
  // Single jurisdiction: every line item in state k, J16 holding k's rate.
  for (std::size_t k = 0; k < m.codes.size(); ++k) {
    Workbook wb = m.build(std::vector<int>(TaxModel::kItems, static_cast<int>(k)), m.rates[k], false);
    Value constant = tax_due(wb, nullptr);
    o.check(identical(constant, tax_due(wb, kLookup)), "LOOKUP differs from constant for " + m.codes[k]);
    o.check(identical(constant, tax_due(wb, kIndexMatch)), "INDEX/MATCH differs from constant for " + m.codes[k]);
    o.check(identical(constant, tax_due(wb, kLegacy)), "IF form differs from constant for " + m.codes[k]);
  }

  // Mixed jurisdictions: both lookups against a linear scan of the table, for every key.
  std::vector<int> mixed;
  for (int i = 0; i < TaxModel::kItems; ++i) mixed.push_back(i % static_cast<int>(m.codes.size()));
  Workbook wb = m.build(mixed, 0.05, false);
  Value lookup = tax_due(wb, kLookup);
  Value index = tax_due(wb, kIndexMatch);
  std::set<int> keys_seen;
  for (int i = 0; i < TaxModel::kItems; ++i) {
    const std::string& code = m.codes[static_cast<std::size_t>(mixed[static_cast<std::size_t>(i)])];
    double rate = NAN;
    for (std::size_t j = 0; j < m.codes.size(); ++j) {
      if (m.codes[j] == code) rate = m.rates[j];
    }
    keys_seen.insert(mixed[static_cast<std::size_t>(i)]);
    Scalar want = (100.0 * (i + 1) + 0.25) * rate;
    auto r = static_cast<std::size_t>(i);
    o.check(identical(lookup.at(r, 0), want), "LOOKUP item " + std::to_string(i + 1) + " = " + display_text(lookup.at(r, 0)));
    o.check(identical(index.at(r, 0), want), "INDEX/MATCH item " + std::to_string(i + 1));
  }
  o.check(keys_seen.size() == m.codes.size(), "not every key exercised");
  o.check(identical(tax_due(wb, kLegacy), lookup), "IF form with flag off differs from LOOKUP");

  // Flag on: back to the single legacy constant.
  Workbook legacy = m.build(mixed, 0.05, true);
  Value flat = tax_due(legacy, kLegacy);
  Value constant = tax_due(legacy, nullptr);
  o.check(identical(flat, constant), "IF form with flag on differs from the constant");
  if (o.ok) o.detail = "constant = LOOKUP = INDEX/MATCH = IF on 5 states; oracle over all keys";
  return o;
}

Outcome c10_properties() {
  Outcome o;
  auto t0 = Clock::now();
  struct Suite {
    const char* name;
    std::function<PropertyResult()> run;
    int want;
  };
  const std::vector<Suite> suites = {
      {"parser round trip", [] { return prop_parser_roundtrip(1010, 1000); }, 1000},
      {"lexeme concatenation", [] { return prop_lexeme_concat(1011, 1000); }, 1000},
      {"identifier vs cell", [] { return prop_identifier_vs_cell(); }, 0},
      {"intersection algebra", [] { return prop_intersection_algebra(1012, 1000); }, 1000},
      {"shift inverse", [] { return prop_shift_inverse(1013, 1000); }, 1000},
      {"determinism", [] { return prop_determinism(1014, 50); }, 50},
      {"error propagation", [] { return prop_error_propagation(1015, 1000); }, 1000},
      {"naive equivalence", [] { return prop_naive_equivalence(1016, 200); }, 200},
  };
  int total = 0;
  for (const auto& s : suites) {
    PropertyResult r = s.run();
    total += r.cases;
    o.check(r.ok, std::string(s.name) + ": " + r.detail);
    o.check(r.cases >= s.want, std::string(s.name) + " ran " + std::to_string(r.cases) + " cases");
  }
  double secs = seconds_since(t0);
  o.check(secs < kSuiteSeconds, "property suites took " + fmt(secs) + " s");
  if (o.ok) o.detail = std::to_string(total) + " cases in " + fmt(std::round(secs * 100) / 100) + " s";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 single array formula over 228 cells", c1_single_formula},
      {"2 escalation recurrence", c2_escalation},
      {"3 intersection aggregate", c3_intersection_sum},
      {"4 loan schedules", c4_loan},
      {"5 focus graph", c5_focus_graph},
      {"6 document round trip", c6_round_trip},
      {"7 module rebinding", c7_module_rebinding},
      {"8 lint discipline", c8_lint},
      {"9 taxRate ladder", c9_tax_ladder},
      {"10 property suites", c10_properties},
  };
  auto t0 = Clock::now();
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    if (!o.ok) ++failed;
    std::printf("%s criterion %s: %s\n", o.ok ? "PASS" : "FAIL", name, o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed in %.2f s\n", static_cast<int>(criteria.size()) - failed, criteria.size(),
              seconds_since(t0));
  return failed == 0 ? 0 : 1;
}
