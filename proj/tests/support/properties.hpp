#pragma once

// Property suites shared by the unit tests and the acceptance runner.

#include <cstdint>
#include <string>
#include <vector>

#include "namecalc/eval.hpp"
#include "namecalc/workbook.hpp"

namespace namecalc::testing {

struct PropertyResult {
  bool ok = true;
  int cases = 0;
  std::string detail;  // first counterexample
};

PropertyResult prop_parser_roundtrip(std::uint64_t seed, int cases);
PropertyResult prop_lexeme_concat(std::uint64_t seed, int cases);
/// Every [A-Z0-9] string of length 1..4: identifiers never look like cells.
PropertyResult prop_identifier_vs_cell();
PropertyResult prop_intersection_algebra(std::uint64_t seed, int cases);
PropertyResult prop_shift_inverse(std::uint64_t seed, int cases);
PropertyResult prop_determinism(std::uint64_t seed, int cases);
PropertyResult prop_error_propagation(std::uint64_t seed, int cases);
/// initial*(1+r)^t for random (initial, r, n <= 50).
PropertyResult prop_recurrence_closed_form(std::uint64_t seed, int cases);
PropertyResult prop_doc_roundtrip(std::uint64_t seed, int cases);
PropertyResult prop_naive_equivalence(std::uint64_t seed, int cases);
/// Fixture B against sort(concat(a, b)), with the lists placed in the
/// dummy ranges and again after rebinding to master ranges.
PropertyResult prop_merge(std::uint64_t seed, int cases);

/// Bitwise comparison of two value stores; empty when equal.
std::string diff_stores(const ValueStore& a, const ValueStore& b);
/// Engine against the naive interpreter; numbers may differ by 1e-12 relative.
std::string diff_naive(const Workbook& wb, const ValueStore& store);

/// Merge scenario helpers.
Workbook with_lists_in_place(Workbook wb, const std::vector<double>& a, const std::vector<double>& b);
Workbook with_master_lists(Workbook wb, const std::vector<double>& a, const std::vector<double>& b);
std::string check_merged(const ValueStore& store, std::vector<double> a, std::vector<double> b);

}  // namespace namecalc::testing
