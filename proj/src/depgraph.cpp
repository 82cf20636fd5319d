#include "namecalc/depgraph.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>

namespace namecalc {

namespace {

// Displacement taking `from` onto `to`, when both are equal-shaped
// rectangles on the same sheet.
std::optional<std::pair<int, int>> displacement(const GridRange& from, const GridRange& to) {
  if (from.sheet != to.sheet) return std::nullopt;
  auto dim = [](const std::optional<Interval>& a, const std::optional<Interval>& b) -> std::optional<int> {
    if (!a && !b) return 0;
    if (!a || !b || a->length() != b->length()) return std::nullopt;
    return b->first - a->first;
  };
  auto dr = dim(from.rows, to.rows);
  auto dc = dim(from.cols, to.cols);
  if (!dr || !dc) return std::nullopt;
  return std::pair{*dr, *dc};
}

std::string names_of(const std::vector<NameKey>& keys) {
  std::string out;
  for (const auto& k : keys) {
    if (!out.empty()) out += ", ";
    out += k.display();
  }
  return out;
}

}  // namespace

bool identifier_less(const NameKey& a, const NameKey& b) {
  if (a.identifier != b.identifier) return a.identifier < b.identifier;
  return a.scope < b.scope;
}

std::vector<NameKey> DepGraph::predecessors(const NameKey& n) const {
  std::vector<NameKey> out;
  for (const auto& e : edges) {
    if (e.from == n) out.push_back(e.to);
  }
  return out;
}

std::vector<NameKey> DepGraph::dependents(const NameKey& n) const {
  std::vector<NameKey> out;
  for (const auto& e : edges) {
    if (e.to == n) out.push_back(e.from);
  }
  std::sort(out.begin(), out.end());
  return out;
}

const DepEdge* DepGraph::find_edge(const NameKey& from, const NameKey& to) const {
  for (const auto& e : edges) {
    if (e.from == from && e.to == to) return &e;
  }
  return nullptr;
}

DepGraph build_dep_graph(const Workbook& wb) {
  DepGraph g;
  for (const auto& [key, def] : wb.names()) g.nodes.push_back(key);

  for (const auto& [key, def] : wb.names()) {
    if (!def.formula) continue;
    auto context = formula_context(def);
    for (const auto& ref : names_referenced(*def.formula)) {
      Resolution res = resolve_reference(wb, ref, context);
      if (!res.def) continue;
      DepEdge edge{key, res.def->key()};
      if (def.is_range() && def.target && res.def->is_range() && res.def->target && !res.def->has_formula()) {
        auto d = displacement(*def.target, *res.def->target);
        if (d && *d != std::pair{0, 0}) {
          edge.recurrence = true;
          edge.d_row = d->first;
          edge.d_col = d->second;
        }
      }
      g.edges.push_back(std::move(edge));
    }
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const DepEdge& a, const DepEdge& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  return g;
}

CycleError::CycleError(std::vector<NameKey> members)
    : std::runtime_error("#CYCLE! among " + names_of(members)), members_(std::move(members)) {}

std::vector<std::vector<NameKey>> cyclic_components(const std::vector<NameKey>& nodes,
                                                    const std::vector<std::pair<NameKey, NameKey>>& edges) {
  std::map<NameKey, std::size_t> index;
  for (const auto& n : nodes) index.emplace(n, index.size());
  std::vector<std::vector<std::size_t>> adj(nodes.size());
  std::vector<bool> self_loop(nodes.size(), false);
  for (const auto& [from, to] : edges) {
    auto f = index.find(from);
    auto t = index.find(to);
    if (f == index.end() || t == index.end()) continue;
    adj[f->second].push_back(t->second);
    if (f->second == t->second) self_loop[f->second] = true;
  }

  // Tarjan's algorithm.
  std::vector<int> order(nodes.size(), -1), low(nodes.size(), 0);
  std::vector<bool> on_stack(nodes.size(), false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<NameKey>> out;
  int counter = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    order[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : adj[v]) {
      if (order[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], order[w]);
      }
    }
    if (low[v] == order[v]) {
      std::vector<NameKey> comp;
      std::size_t w = 0;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(nodes[w]);
      } while (w != v);
      if (comp.size() > 1 || self_loop[v]) {
        std::sort(comp.begin(), comp.end(), identifier_less);
        out.push_back(std::move(comp));
      }
    }
  };
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (order[v] < 0) visit(v);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return identifier_less(a.front(), b.front()); });
  return out;
}

std::vector<NameKey> topo_order(const DepGraph& g) {
  std::map<NameKey, std::size_t> pending;
  std::map<NameKey, std::vector<NameKey>> users;
  for (const auto& n : g.nodes) pending[n] = 0;
  std::vector<std::pair<NameKey, NameKey>> plain;
  for (const auto& e : g.edges) {
    if (e.recurrence) continue;
    plain.emplace_back(e.from, e.to);
    ++pending[e.from];
    users[e.to].push_back(e.from);
  }

  auto later = [](const NameKey& a, const NameKey& b) { return identifier_less(b, a); };
  std::priority_queue<NameKey, std::vector<NameKey>, decltype(later)> ready(later);
  for (const auto& [n, count] : pending) {
    if (count == 0) ready.push(n);
  }
  std::vector<NameKey> out;
  while (!ready.empty()) {
    NameKey n = ready.top();
    ready.pop();
    out.push_back(n);
    for (const auto& u : users[n]) {
      if (--pending[u] == 0) ready.push(u);
    }
  }
  if (out.size() != g.nodes.size()) {
    auto comps = cyclic_components(g.nodes, plain);
    throw CycleError(comps.empty() ? std::vector<NameKey>{} : comps.front());
  }
  return out;
}

}  // namespace namecalc
