#pragma once

// Hand-rolled random generators for the property suites.

#include <random>
#include <string>
#include <vector>

#include "namecalc/formula.hpp"
#include "namecalc/grid.hpp"
#include "namecalc/workbook.hpp"

namespace namecalc::testing {

using Rng = std::mt19937_64;

int uniform(Rng& rng, int lo, int hi);  // inclusive
bool chance(Rng& rng, double p);

/// Grammar-driven expression: every node kind, non-negative number literals.
ExprPtr random_expr(Rng& rng, int depth);

/// A valid identifier, sometimes with a '.', '_', digits or trailing '?'.
std::string random_identifier(Rng& rng);

/// Text that exercises escaping: quotes, backslashes, tabs, newlines,
/// things that look like numbers, errors or booleans.
std::string random_text(Rng& rng);

/// Random rectangle inside 1..max_row x 1..max_col.
GridRange random_rect(Rng& rng, const std::string& sheet, int max_row, int max_col);

/// Workbook with up to 5 sheets and 40 names: input bands, chained array
/// formulas with broadcasting, recurrences through displaced names, formula
/// names, sheet-scoped names and output flags. Formula ranges never overlap
/// and column 1 of every sheet is left empty.
Workbook random_workbook(Rng& rng);

/// Minimal DOT checker: a single digraph with node and edge statements and
/// bracketed attribute lists. Returns an empty string when the text parses.
std::string check_dot(const std::string& text);

/// Path of a fixture shipped in the repository.
std::string fixture_path(const std::string& file);
std::string read_text(const std::string& path);
Workbook load_fixture(const std::string& file);

}  // namespace namecalc::testing
