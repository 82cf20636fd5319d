#include "namecalc/eval.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "builtins.hpp"
#include "ops.hpp"

namespace namecalc {

namespace {

enum class State { Fresh, Busy, Sweeping, Done };

// A formula-less range reading a formula-bearing one at a unit offset.
struct Displacement {
  NameKey base;
  int d_row = 0;
  int d_col = 0;
};

// Names whose mutual references go through displaced copies only; they are
// computed together one line at a time.
struct Group {
  std::vector<NameKey> members;  // lag-free dependencies first
  int d_row = 0;
  int d_col = 0;
  bool valid = false;
};

struct EvalEdge {
  NameKey from;
  NameKey to;
  bool lagged = false;
  int d_row = 0;
  int d_col = 0;
};

std::optional<std::pair<int, int>> offset_between(const GridRange& base, const GridRange& copy) {
  if (base.sheet != copy.sheet) return std::nullopt;
  auto dim = [](const std::optional<Interval>& a, const std::optional<Interval>& b) -> std::optional<int> {
    if (!a && !b) return 0;
    if (!a || !b || a->length() != b->length()) return std::nullopt;
    return b->first - a->first;
  };
  auto dr = dim(base.rows, copy.rows);
  auto dc = dim(base.cols, copy.cols);
  if (!dr || !dc) return std::nullopt;
  return std::pair{*dr, *dc};
}

bool unit(std::pair<int, int> d) { return std::abs(d.first) + std::abs(d.second) == 1; }

GridRange cell_range(const CellRef& ref, const std::string& sheet) {
  GridRange r{sheet, std::nullopt, std::nullopt};
  CellCoord last = ref.last.value_or(ref.first);
  r.cols = Interval{std::min(ref.first.col, last.col), std::max(ref.first.col, last.col)};
  if (ref.first.row && last.row) {
    r.rows = Interval{std::min(*ref.first.row, *last.row), std::max(*ref.first.row, *last.row)};
  }
  return r;
}

class Engine : public RefReader {
 public:
  explicit Engine(const Workbook& wb) : wb_(wb) {
    find_displacements();
    index_owners();
    build_groups();
  }

  const Value& force(const NameKey& key);
  Operand eval(const Expr& e, std::optional<std::string_view> ctx);
  Value eval_value(const Expr& e, std::optional<std::string_view> ctx) { return deref(eval(e, ctx), *this); }
  Value read(const Ref& ref) override;
  Shape shape(const Ref& ref) override;
  Value final_value(const NameKey& key);

  std::vector<std::vector<NameKey>> cycles;

 private:
  struct Owner {
    NameKey key;
    GridRange range;  // clamped
  };

  void find_displacements();
  void index_owners();
  void build_groups();
  std::vector<EvalEdge> eval_edges() const;
  std::vector<NameKey> owners_overlapping(const GridRange& r) const;
  void run_group(Group& g);
  Shape target_shape(const NameDef& def) const;
  Value compute(const NameDef& def);
  Operand eval_name(const NameRef& n, std::optional<std::string_view> ctx);
  Operand eval_call(const Call& c, std::optional<std::string_view> ctx);
  State state(const NameKey& k) const {
    auto it = state_.find(k);
    return it == state_.end() ? State::Fresh : it->second;
  }

  const Workbook& wb_;
  std::map<NameKey, Displacement> displaced_;
  std::map<std::string, std::vector<Owner>> owners_;
  std::vector<Group> groups_;
  std::map<NameKey, std::size_t> group_of_;
  std::map<NameKey, State> state_;
  std::map<NameKey, Value> values_;
  std::map<NameKey, Value> scratch_;  // formula names evaluated mid-sweep
  std::set<NameKey> busy_in_sweep_;
  std::map<NameKey, Ref> refs_;  // formula names whose result is a reference
};

const Value& cycle_scalar() {
  static const Value v(ErrorKind::Cycle);
  return v;
}

void Engine::find_displacements() {
  for (const auto& [key, def] : wb_.names()) {
    if (!def.is_range() || def.has_formula() || !def.target) continue;
    const NameDef* base = nullptr;
    if (def.derivation) {
      base = resolve_name(wb_, def.derivation->base,
                          def.scope.is_workbook() ? std::nullopt : std::optional<std::string_view>(def.scope.sheet_id()));
      if (base && base->formula_bearing_range() && base->target) {
        auto d = offset_between(*base->target, *def.target);
        if (d && unit(*d)) {
          displaced_[key] = Displacement{base->key(), d->first, d->second};
          continue;
        }
      }
    }
    for (const auto& [bkey, b] : wb_.names()) {
      if (!b.formula_bearing_range() || !b.target) continue;
      auto d = offset_between(*b.target, *def.target);
      if (d && unit(*d) && overlaps(*b.target, *def.target)) {
        displaced_[key] = Displacement{bkey, d->first, d->second};
        break;
      }
    }
  }
}

void Engine::index_owners() {
  for (const auto& [key, def] : wb_.names()) {
    if (!def.formula_bearing_range() || !def.target) continue;
    const Sheet* sheet = wb_.find_sheet(def.target->sheet);
    if (!sheet) continue;
    owners_[def.target->sheet].push_back(Owner{key, clamp(*def.target, sheet->extent())});
  }
}

std::vector<NameKey> Engine::owners_overlapping(const GridRange& r) const {
  std::vector<NameKey> out;
  auto it = owners_.find(r.sheet);
  if (it == owners_.end()) return out;
  for (const auto& o : it->second) {
    if (overlaps(o.range, r)) out.push_back(o.key);
  }
  return out;
}

std::vector<EvalEdge> Engine::eval_edges() const {
  std::vector<EvalEdge> edges;
  for (const auto& [key, def] : wb_.names()) {
    if (!def.formula) continue;
    auto ctx = formula_context(def);
    for (const auto& ref : names_referenced(*def.formula)) {
      Resolution res = resolve_reference(wb_, ref, ctx);
      if (!res.def) continue;
      if (res.def->formula) {
        edges.push_back(EvalEdge{key, res.def->key()});
      } else if (auto d = displaced_.find(res.def->key()); d != displaced_.end()) {
        edges.push_back(EvalEdge{key, d->second.base, true, d->second.d_row, d->second.d_col});
      } else if (res.def->target) {
        for (const auto& owner : owners_overlapping(*res.def->target)) edges.push_back(EvalEdge{key, owner});
      }
    }
    for (const auto& cell : cell_refs(*def.formula)) {
      auto sheet = cell.sheet ? std::optional<std::string>(*cell.sheet)
                              : (ctx ? std::optional<std::string>(std::string(*ctx)) : std::nullopt);
      if (!sheet) continue;
      for (const auto& owner : owners_overlapping(cell_range(cell, *sheet))) edges.push_back(EvalEdge{key, owner});
    }
  }
  return edges;
}

void Engine::build_groups() {
  std::vector<NameKey> nodes;
  for (const auto& [key, def] : wb_.names()) {
    if (def.formula) nodes.push_back(key);
  }
  auto edges = eval_edges();
  std::vector<std::pair<NameKey, NameKey>> pairs;
  for (const auto& e : edges) pairs.emplace_back(e.from, e.to);

  for (auto& members : cyclic_components(nodes, pairs)) {
    std::set<NameKey> in(members.begin(), members.end());
    Group g;
    bool has_lag = false, lags_agree = true;
    std::map<NameKey, std::size_t> pending;
    std::map<NameKey, std::vector<NameKey>> users;
    for (const auto& m : members) pending[m] = 0;
    for (const auto& e : edges) {
      if (!in.count(e.from) || !in.count(e.to)) continue;
      if (e.lagged) {
        if (has_lag && (e.d_row != g.d_row || e.d_col != g.d_col)) lags_agree = false;
        has_lag = true;
        g.d_row = e.d_row;
        g.d_col = e.d_col;
      } else {
        ++pending[e.from];
        users[e.to].push_back(e.from);
      }
    }

    auto later = [](const NameKey& a, const NameKey& b) { return identifier_less(b, a); };
    std::priority_queue<NameKey, std::vector<NameKey>, decltype(later)> ready(later);
    for (const auto& [m, n] : pending) {
      if (n == 0) ready.push(m);
    }
    while (!ready.empty()) {
      NameKey m = ready.top();
      ready.pop();
      g.members.push_back(m);
      for (const auto& u : users[m]) {
        if (--pending[u] == 0) ready.push(u);
      }
    }
    bool acyclic = g.members.size() == members.size();

    bool aligned = true;
    std::optional<GridRange> first;
    for (const auto& m : members) {
      const NameDef* def = wb_.find_name(m);
      if (!def->is_range()) continue;
      if (!def->target) {
        aligned = false;
        break;
      }
      const GridRange& t = *def->target;
      const auto& line_dim = g.d_col != 0 ? t.cols : t.rows;
      if (!line_dim) aligned = false;
      if (!first) {
        first = t;
      } else if (t.sheet != first->sheet || line_dim != (g.d_col != 0 ? first->cols : first->rows)) {
        aligned = false;
      }
    }

    g.valid = has_lag && lags_agree && acyclic && aligned && first.has_value();
    if (!g.valid) {
      g.members = members;
      cycles.push_back(members);
    }
    for (const auto& m : g.members) group_of_[m] = groups_.size();
    groups_.push_back(std::move(g));
  }
}

Shape Engine::target_shape(const NameDef& def) const {
  const Sheet* sheet = wb_.find_sheet(def.target->sheet);
  return shape_of(*def.target, sheet ? sheet->extent() : Extent{});
}

Value Engine::compute(const NameDef& def) {
  Operand op = eval(*def.formula, formula_context(def));
  if (def.is_range()) return ops::fit(deref(op, *this), target_shape(def));
  // A formula name that yields a reference stays usable as one.
  if (const Ref* ref = std::get_if<Ref>(&op)) {
    refs_[def.key()] = *ref;
  } else {
    refs_.erase(def.key());
  }
  return deref(op, *this);
}

void Engine::run_group(Group& g) {
  for (const auto& m : g.members) {
    const NameDef* def = wb_.find_name(m);
    state_[m] = State::Sweeping;
    if (def->is_range()) values_[m] = Value(target_shape(*def), Blank{});
  }
  const NameDef* lead = nullptr;
  for (const auto& m : g.members) {
    if (wb_.find_name(m)->is_range()) {
      lead = wb_.find_name(m);
      break;
    }
  }
  bool by_col = g.d_col != 0;
  Interval span = by_col ? *lead->target->cols : *lead->target->rows;
  int lines = span.length();
  // The copy sits at base + d, so it exposes line l - d: walk against d.
  bool forward = (by_col ? g.d_col : g.d_row) < 0;
  for (int step = 0; step < lines; ++step) {
    auto line = static_cast<std::size_t>(forward ? step : lines - 1 - step);
    for (const auto& m : g.members) {
      const NameDef* def = wb_.find_name(m);
      if (!def->is_range()) continue;
      Value full = compute(*def);
      Value& into = values_[m];
      if (by_col) {
        for (std::size_t r = 0; r < into.rows(); ++r) into.at(r, line) = full.at(r, line);
      } else {
        for (std::size_t c = 0; c < into.cols(); ++c) into.at(line, c) = full.at(line, c);
      }
    }
  }
  for (const auto& m : g.members) {
    state_[m] = wb_.find_name(m)->is_range() ? State::Done : State::Fresh;
  }
}

const Value& Engine::force(const NameKey& key) {
  const NameDef* def = wb_.find_name(key);
  switch (state(key)) {
    case State::Done: return values_.at(key);
    case State::Busy: return cycle_scalar();
    case State::Sweeping:
      if (def->is_range()) return values_.at(key);
      if (busy_in_sweep_.count(key)) return cycle_scalar();
      busy_in_sweep_.insert(key);
      scratch_[key] = compute(*def);
      busy_in_sweep_.erase(key);
      return scratch_[key];
    case State::Fresh: break;
  }

  if (auto g = group_of_.find(key); g != group_of_.end()) {
    Group& group = groups_[g->second];
    if (!group.valid) {
      for (const auto& m : group.members) {
        const NameDef* d = wb_.find_name(m);
        values_[m] = d->is_range() && d->target ? Value(target_shape(*d), ErrorKind::Cycle) : Value(ErrorKind::Cycle);
        state_[m] = State::Done;
      }
      return values_.at(key);
    }
    if (def->is_range()) {
      run_group(group);
      return values_.at(key);
    }
    bool swept = std::all_of(group.members.begin(), group.members.end(),
                             [&](const NameKey& m) { return !wb_.find_name(m)->is_range() || state(m) == State::Done; });
    if (!swept) {
      run_group(group);
      if (state(key) == State::Done) return values_.at(key);
    }
  }

  if (def->is_range() && !def->target) {
    values_[key] = Value(ErrorKind::Ref);
    state_[key] = State::Done;
    return values_.at(key);
  }
  if (!def->formula) {
    // Input ranges are read afresh; only computed names are memoized.
    scratch_[key] = read(Ref{*def->target, std::nullopt});
    return scratch_[key];
  }
  state_[key] = State::Busy;
  Value v = compute(*def);
  values_[key] = std::move(v);
  state_[key] = State::Done;
  return values_.at(key);
}

Shape Engine::shape(const Ref& ref) {
  const Sheet* sheet = wb_.find_sheet(ref.range.sheet);
  return shape_of(ref.range, sheet ? sheet->extent() : Extent{});
}

Value Engine::read(const Ref& ref) {
  const Sheet* sheet = wb_.find_sheet(ref.range.sheet);
  if (!sheet) return Value(ErrorKind::Ref);
  GridRange r = clamp(ref.range, sheet->extent());
  if (r.rows->first < 1 || r.cols->first < 1 || r.rows->last > sheet->rows || r.cols->last > sheet->cols) {
    return Value(ErrorKind::Ref);
  }
  Value out(shape_of(r), Blank{});
  auto place = [&](const NameKey& owner, const GridRange& owned) {
    auto ov = intersect(owned, r);
    if (!std::holds_alternative<GridRange>(ov)) return;
    const GridRange& o = std::get<GridRange>(ov);
    bool busy = state(owner) == State::Busy;
    const Value& src = busy ? cycle_scalar() : force(owner);
    for (int row = o.rows->first; row <= o.rows->last; ++row) {
      for (int col = o.cols->first; col <= o.cols->last; ++col) {
        Scalar& cell = out.at(row - r.rows->first, col - r.cols->first);
        if (busy || src.is_scalar()) {
          cell = busy ? Scalar{ErrorKind::Cycle} : src.scalar();
        } else {
          cell = src.at(row - owned.rows->first, col - owned.cols->first);
        }
      }
    }
  };

  if (ref.displaced) {
    const NameDef* base = wb_.find_name(*ref.displaced);
    place(*ref.displaced, clamp(*base->target, sheet->extent()));
    return out;
  }
  for (int row = r.rows->first; row <= r.rows->last; ++row) {
    auto it = sheet->literals.lower_bound(CellAddr{row, r.cols->first});
    for (; it != sheet->literals.end() && it->first.row == row && it->first.col <= r.cols->last; ++it) {
      out.at(row - r.rows->first, it->first.col - r.cols->first) = it->second;
    }
  }
  if (auto it = owners_.find(r.sheet); it != owners_.end()) {
    for (const auto& o : it->second) {
      if (overlaps(o.range, r)) place(o.key, o.range);
    }
  }
  return out;
}

Operand Engine::eval_name(const NameRef& n, std::optional<std::string_view> ctx) {
  Resolution res = resolve_reference(wb_, QualifiedName{n.sheet, n.identifier}, ctx);
  if (!res.def) return Value(res.error);
  const NameDef& def = *res.def;
  if (!def.is_range()) {
    const Value& v = force(def.key());
    if (auto r = refs_.find(def.key()); r != refs_.end() && (state(def.key()) != State::Busy)) return r->second;
    return v;
  }
  if (!def.target) return Value(ErrorKind::Ref);
  std::optional<NameKey> base;
  if (auto d = displaced_.find(def.key()); d != displaced_.end()) base = d->second.base;
  return Ref{*def.target, base};
}

Operand Engine::eval_call(const Call& c, std::optional<std::string_view> ctx) {
  if (!is_builtin(c.function)) return Value(ErrorKind::Name);
  if (c.function != "IF") {
    std::vector<Operand> args;
    args.reserve(c.args.size());
    for (const auto& a : c.args) args.push_back(eval(*a, ctx));
    return call_builtin(c.function, args, *this);
  }
  if (c.args.size() < 2 || c.args.size() > 3) return Value(ErrorKind::Value);
  Value cond = eval_value(*c.args[0], ctx);
  bool any_true = false, any_false = false;
  for (const auto& cell : cond.cells()) {
    auto b = ops::to_bool(cell);
    if (const bool* x = std::get_if<bool>(&b)) (*x ? any_true : any_false) = true;
  }
  Value then_v = any_true ? eval_value(*c.args[1], ctx) : Value();
  Value else_v = !any_false ? Value() : (c.args.size() == 3 ? eval_value(*c.args[2], ctx) : Value(false));
  return if_select(cond, then_v, else_v);
}

Operand Engine::eval(const Expr& e, std::optional<std::string_view> ctx) {
  if (const auto* n = std::get_if<NumberLit>(&e.node)) return Value(n->value);
  if (const auto* t = std::get_if<TextLit>(&e.node)) return Value(t->value);
  if (const auto* b = std::get_if<BoolLit>(&e.node)) return Value(b->value);
  if (const auto* n = std::get_if<NameRef>(&e.node)) return eval_name(*n, ctx);
  if (const auto* c = std::get_if<CellRef>(&e.node)) {
    if (c->sheet) return Ref{cell_range(*c, *c->sheet), std::nullopt};
    if (!ctx) return Value(ErrorKind::Ref);
    return Ref{cell_range(*c, std::string(*ctx)), std::nullopt};
  }
  if (const auto* u = std::get_if<Unary>(&e.node)) return ops::unary(u->op, eval_value(*u->operand, ctx));
  if (const auto* p = std::get_if<Percent>(&e.node)) return ops::percent(eval_value(*p->operand, ctx));
  if (const auto* b = std::get_if<Binary>(&e.node)) {
    Value l = eval_value(*b->lhs, ctx);
    Value r = eval_value(*b->rhs, ctx);
    return ops::binary(b->op, l, r);
  }
  if (const auto* x = std::get_if<Intersect>(&e.node)) {
    Operand l = eval(*x->lhs, ctx);
    Operand r = eval(*x->rhs, ctx);
    for (const Operand* side : {&l, &r}) {
      if (const auto* v = std::get_if<Value>(side)) {
        if (v->is_scalar() && is_error(v->scalar())) return *v;
      }
    }
    const Ref* lr = std::get_if<Ref>(&l);
    const Ref* rr = std::get_if<Ref>(&r);
    if (!lr || !rr) return Value(ErrorKind::Value);
    auto meet = intersect(lr->range, rr->range);
    if (auto* err = std::get_if<ErrorKind>(&meet)) return Value(*err);
    return Ref{std::get<GridRange>(meet), lr->displaced ? lr->displaced : rr->displaced};
  }
  return eval_call(std::get<Call>(e.node), ctx);
}

Value Engine::final_value(const NameKey& key) {
  const NameDef* def = wb_.find_name(key);
  if (def->is_range() && !def->has_formula()) {
    if (!def->target) return Value(ErrorKind::Ref);
    std::optional<NameKey> base;
    if (auto d = displaced_.find(key); d != displaced_.end()) base = d->second.base;
    return read(Ref{*def->target, base});
  }
  return force(key);
}

}  // namespace

const Value* ValueStore::find(const NameKey& key) const {
  auto it = values.find(key);
  return it == values.end() ? nullptr : &it->second;
}

const Value* ValueStore::find(std::string_view display) const {
  auto bang = display.find('!');
  if (bang == std::string_view::npos) return find(NameKey{Scope::workbook(), std::string(display)});
  return find(NameKey{Scope::sheet(std::string(display.substr(0, bang))), std::string(display.substr(bang + 1))});
}

ValueStore evaluate(const Workbook& wb) {
  Engine engine(wb);
  ValueStore store;
  for (const auto& [key, def] : wb.names()) {
    if (def.formula) engine.force(key);
  }
  for (const auto& [key, def] : wb.names()) store.values.emplace(key, engine.final_value(key));
  store.cycles = engine.cycles;
  return store;
}

Value evaluate_formula(const Workbook& wb, const Expr& formula, std::optional<std::string_view> context) {
  Engine engine(wb);
  return engine.eval_value(formula, context);
}

}  // namespace namecalc
