#include "pccp/process.hpp"

#include <set>

namespace pccp {

Process tell(Slot target, MonotoneFn fn) {
  return Process(Process::Tell{target, std::move(fn)});
}

Process tell_const(Slot target, const LatticeValue& v) {
  return Process(Process::Tell{target, MonotoneFn::const_value(v)});
}

Process ask(Slot binc_cell, Process body) {
  return Process(Process::Ask{Pred::binc_true(binc_cell),
                              std::make_shared<const Process>(std::move(body))});
}

Process ask(Pred guard, Process body) {
  return Process(Process::Ask{std::move(guard),
                              std::make_shared<const Process>(std::move(body))});
}

Process exists(const LocalVar& v, Process body) {
  if (v.id >= 0) throw ModelError("exists: variable '" + v.name + "' is not a local placeholder");
  return Process(Process::Local{v, std::make_shared<const Process>(std::move(body))});
}

Process par(std::vector<Process> children) {
  return Process(Process::Par{std::move(children)});
}

Process seq(std::vector<Process> children) {
  return Process(Process::Seq{std::move(children)});
}

Process expand_forall(int lo, int hi, const std::function<Process(int)>& f) {
  std::vector<Process> children;
  for (int i = lo; i <= hi; ++i) children.push_back(f(i));
  return par(std::move(children));
}

namespace {

using Subst = std::vector<std::pair<Slot, Slot>>; // placeholder -> concrete

Slot substitute(Slot s, const Subst& subst) {
  if (s >= 0) return s;
  for (const auto& [from, to] : subst) {
    if (from == s) return to;
  }
  throw ModelError("unbound local placeholder in process body");
}

void substitute_expr(LinExpr& e, const Subst& subst) {
  for (Term& t : e.terms) t.ref.slot = substitute(t.ref.slot, subst);
}

MonotoneFn substitute_fn(const MonotoneFn& fn, const Subst& subst) {
  MonotoneFn out = fn;
  if (out.scalar) substitute_expr(*out.scalar, subst);
  if (out.lb) substitute_expr(*out.lb, subst);
  if (out.ub) substitute_expr(*out.ub, subst);
  if (out.generic) {
    for (CellRef& r : out.generic->reads) r.slot = substitute(r.slot, subst);
  }
  return out;
}

Pred substitute_pred(const Pred& p, const Subst& subst) {
  Pred out = p;
  substitute_expr(out.lhs, subst);
  if (out.binc_cell) out.binc_cell = substitute(*out.binc_cell, subst);
  return out;
}

Process erase_rec(const Process& p, SchemaBuilder& schema, Subst& subst,
                  std::set<std::string>& scope_names) {
  return std::visit(
      [&](const auto& node) -> Process {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Process::Tell>) {
          return tell(substitute(node.target, subst), substitute_fn(node.fn, subst));
        } else if constexpr (std::is_same_v<T, Process::Ask>) {
          return ask(substitute_pred(node.guard, subst),
                     erase_rec(*node.body, schema, subst, scope_names));
        } else if constexpr (std::is_same_v<T, Process::Local>) {
          if (!scope_names.insert(node.var.name).second) {
            throw ModelError("duplicate local name '" + node.var.name + "' in one scope");
          }
          const Slot slot = schema.add_cell(node.var.name, node.var.kind);
          subst.emplace_back(node.var.id, slot);
          Process body = erase_rec(*node.body, schema, subst, scope_names);
          subst.pop_back();
          scope_names.erase(node.var.name);
          return body;
        } else if constexpr (std::is_same_v<T, Process::Par>) {
          std::vector<Process> children;
          children.reserve(node.children.size());
          for (const Process& c : node.children) {
            children.push_back(erase_rec(c, schema, subst, scope_names));
          }
          return par(std::move(children));
        } else {
          std::vector<Process> children;
          children.reserve(node.children.size());
          for (const Process& c : node.children) {
            children.push_back(erase_rec(c, schema, subst, scope_names));
          }
          return seq(std::move(children));
        }
      },
      p.node());
}

void gnf_rec(std::vector<Pred> acc, const Process& p, std::vector<GuardedCommand>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Process::Tell>) {
          GuardedCommand gc;
          gc.guards = std::move(acc);
          gc.target = node.target;
          gc.fn = node.fn;
          out.push_back(std::move(gc));
        } else if constexpr (std::is_same_v<T, Process::Ask>) {
          // Skip a duplicate BInc cell guard already on the path.
          bool dup = false;
          if (node.guard.binc_cell) {
            for (const Pred& g : acc) {
              if (g.binc_cell && *g.binc_cell == *node.guard.binc_cell) {
                dup = true;
                break;
              }
            }
          }
          if (!dup) acc.push_back(node.guard);
          gnf_rec(std::move(acc), *node.body, out);
        } else if constexpr (std::is_same_v<T, Process::Local>) {
          throw ModelError("gnf: process still contains a local statement");
        } else {
          for (const Process& c : node.children) gnf_rec(acc, c, out);
        }
      },
      p.node());
}

} // namespace

Process erase_locals(const Process& p, SchemaBuilder& schema) {
  Subst subst;
  std::set<std::string> scope_names;
  return erase_rec(p, schema, subst, scope_names);
}

std::vector<GuardedCommand> gnf(const std::vector<Pred>& acc_guards, const Process& p,
                                const Schema& schema) {
  std::vector<GuardedCommand> out;
  gnf_rec(acc_guards, p, out);
  finalize_all(out, schema);
  return out;
}

std::vector<GuardedCommand> gnf(const Process& p, const Schema& schema) {
  return gnf({}, p, schema);
}

namespace {
Process map_composition(const Process& p, bool to_par) {
  return std::visit(
      [&](const auto& node) -> Process {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Process::Tell>) {
          return Process(Process::Tell{node.target, node.fn});
        } else if constexpr (std::is_same_v<T, Process::Ask>) {
          return ask(node.guard, map_composition(*node.body, to_par));
        } else if constexpr (std::is_same_v<T, Process::Local>) {
          return exists(node.var, map_composition(*node.body, to_par));
        } else {
          std::vector<Process> children;
          children.reserve(node.children.size());
          for (const Process& c : node.children) children.push_back(map_composition(c, to_par));
          return to_par ? par(std::move(children)) : seq(std::move(children));
        }
      },
      p.node());
}
} // namespace

Process seq_to_par(const Process& p) { return map_composition(p, true); }
Process par_to_seq(const Process& p) { return map_composition(p, false); }

} // namespace pccp
