#pragma once

#include <stdexcept>
#include <vector>

#include "namecalc/workbook.hpp"

namespace namecalc {

/// `from` references `to` in its defining formula.
struct DepEdge {
  NameKey from;
  NameKey to;
  /// `to` is a formula-less copy of `from`'s own range displaced by
  /// (d_row, d_col): a period-over-period reference, not a cycle.
  bool recurrence = false;
  int d_row = 0;
  int d_col = 0;
  bool operator==(const DepEdge&) const = default;
};

struct DepGraph {
  std::vector<NameKey> nodes;  // sorted
  std::vector<DepEdge> edges;  // sorted by (from, to)

  std::vector<NameKey> predecessors(const NameKey& n) const;  // what n references
  std::vector<NameKey> dependents(const NameKey& n) const;    // what references n
  const DepEdge* find_edge(const NameKey& from, const NameKey& to) const;
};

DepGraph build_dep_graph(const Workbook& wb);

class CycleError : public std::runtime_error {
 public:
  explicit CycleError(std::vector<NameKey> members);
  const std::vector<NameKey>& members() const { return members_; }

 private:
  std::vector<NameKey> members_;
};

/// Orders names after their non-recurrence predecessors, ties broken by
/// identifier. Throws CycleError with the offending strongly connected
/// component.
std::vector<NameKey> topo_order(const DepGraph& g);

/// Identifier-first ordering used for deterministic tie-breaks.
bool identifier_less(const NameKey& a, const NameKey& b);

/// Strongly connected components of size > 1 or with a self edge, over the
/// given edges; members sorted, components sorted by first member.
std::vector<std::vector<NameKey>> cyclic_components(const std::vector<NameKey>& nodes,
                                                    const std::vector<std::pair<NameKey, NameKey>>& edges);

}  // namespace namecalc
