#ifndef PCCP_PROCESS_HPP
#define PCCP_PROCESS_HPP

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "pccp/command.hpp"

namespace pccp {

/** A local variable placeholder. Ids are negative so they cannot collide with
 * schema slots; erase_locals assigns the concrete slot. */
struct LocalVar {
  Slot id = -1;
  std::string name;
  Kind kind = Kind::Interval;
};

/** Allocates placeholder ids. One allocator per process tree; trees built
 * from different allocators must be erased separately. */
class LocalAlloc {
public:
  LocalVar fresh(std::string name, Kind kind) {
    return LocalVar{--next_, std::move(name), kind};
  }

private:
  Slot next_ = 0;
};

/** PCCP process tree: ask / tell / local / parallel, plus sequence.
 * Sequence only survives as a scheduling hint for the sequential engine;
 * fixed points are order independent. Trees are immutable once built. */
class Process {
public:
  struct Tell {
    Slot target;
    MonotoneFn fn;
  };
  struct Ask {
    Pred guard;
    std::shared_ptr<const Process> body;
  };
  struct Local {
    LocalVar var;
    std::shared_ptr<const Process> body;
  };
  struct Par {
    std::vector<Process> children;
  };
  struct Seq {
    std::vector<Process> children;
  };

  using Node = std::variant<Tell, Ask, Local, Par, Seq>;

  explicit Process(Node n) : node_(std::make_shared<Node>(std::move(n))) {}

  const Node& node() const { return *node_; }
  bool is_par() const { return std::holds_alternative<Par>(*node_); }

private:
  std::shared_ptr<const Node> node_;
};

// Builders.
Process tell(Slot target, MonotoneFn fn);
Process tell_const(Slot target, const LatticeValue& v);
Process ask(Slot binc_cell, Process body);
Process ask(Pred guard, Process body);
Process exists(const LocalVar& v, Process body);
Process par(std::vector<Process> children);
Process seq(std::vector<Process> children);

/** Compile-time generator expansion: builds Par[f(lo), ..., f(hi)].
 * An empty range yields the empty Par (the identity process). */
Process expand_forall(int lo, int hi, const std::function<Process(int)>& f);

/** Erases every local statement, appending one cell per local to the schema
 * (depth-first left-to-right, so numbering is deterministic) and substituting
 * concrete slots into the body. Throws ModelError on duplicate names in one
 * scope or on unresolved placeholders. */
Process erase_locals(const Process& p, SchemaBuilder& schema);

/** Guarded-normal-form lowering. Requires a local-free process; Seq flattens
 * like Par (the fixed point is the same). Guard sets accumulate along ask
 * nesting; output order is the depth-first order of the tells. Commands come
 * back finalized against `schema`. */
std::vector<GuardedCommand> gnf(const std::vector<Pred>& acc_guards, const Process& p,
                                const Schema& schema);
std::vector<GuardedCommand> gnf(const Process& p, const Schema& schema);

/** Replaces every Seq node by Par (or the reverse) — used by equivalence tests. */
Process seq_to_par(const Process& p);
Process par_to_seq(const Process& p);

} // namespace pccp

#endif
