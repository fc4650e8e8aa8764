#include "oracle.hpp"

namespace pccp::testsupport {

namespace {

// D(P) with a frozen input: reads go to `in`, joins go to `out`.
bool apply_joint(const Process& p, const Store& in, Store& out) {
  return std::visit(
      [&](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Process::Tell>) {
          GuardedCommand gc;
          gc.target = node.target;
          gc.fn = node.fn;
          finalize(gc, in.schema());
          return out.join_in_place(gc.target, gc.fn.eval(gc.target_kind, in));
        } else if constexpr (std::is_same_v<T, Process::Ask>) {
          Pred g = node.guard;
          LinExpr lhs = g.lhs;
          for (Term& t : lhs.terms) t.word = resolve_word(t.ref, in.schema());
          g.lhs = lhs;
          if (!g.eval(in)) return false;
          return apply_joint(*node.body, in, out);
        } else if constexpr (std::is_same_v<T, Process::Local>) {
          throw ModelError("denotational oracle: erase locals first");
        } else if constexpr (std::is_same_v<T, Process::Par>) {
          bool changed = false;
          for (const Process& c : node.children) changed |= apply_joint(c, in, out);
          return changed;
        } else {
          // Sequential composition: each child sees its predecessors' output.
          Store mid(in.schema_ptr());
          mid.copy_from(in);
          for (const Process& c : node.children) {
            Store frozen(mid.schema_ptr());
            frozen.copy_from(mid);
            apply_joint(c, frozen, mid);
          }
          bool changed = false;
          for (Slot i = 0; i < in.schema().slot_count(); ++i) {
            changed |= out.join_in_place(i, mid.get(i));
          }
          return changed;
        }
      },
      p.node());
}

} // namespace

bool denotational_step(const Process& p, Store& s) {
  Store frozen(s.schema_ptr());
  frozen.copy_from(s);
  return apply_joint(p, frozen, s);
}

void denotational_fix(const Process& p, Store& s, std::size_t max_rounds) {
  for (std::size_t i = 0; i < max_rounds; ++i) {
    if (!denotational_step(p, s)) return;
    if (s.is_failed()) return;
  }
  throw ModelError("denotational oracle: no fixed point within the round budget");
}

bool eval_concrete(const Constraint& c, const std::vector<std::int32_t>& value_by_slot) {
  auto value = [&value_by_slot](const Operand& o) {
    return o.is_const ? o.value : value_by_slot.at(static_cast<std::size_t>(o.var));
  };
  return std::visit(
      [&](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CLeq>) {
          return value(node.x) + node.offset <= value(node.y);
        } else if constexpr (std::is_same_v<T, CLinearLeq>) {
          std::int64_t acc = 0;
          for (const auto& [coef, var] : node.terms) {
            acc += std::int64_t{coef} * value_by_slot.at(static_cast<std::size_t>(var));
          }
          return acc <= node.c;
        } else if constexpr (std::is_same_v<T, CAnd>) {
          return eval_concrete(*node.a, value_by_slot) && eval_concrete(*node.b, value_by_slot);
        } else if constexpr (std::is_same_v<T, CNot>) {
          return !eval_concrete(*node.a, value_by_slot);
        } else {
          return eval_concrete(*node.a, value_by_slot) == eval_concrete(*node.b, value_by_slot);
        }
      },
      c.node);
}

} // namespace pccp::testsupport
