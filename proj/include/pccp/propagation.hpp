#ifndef PCCP_PROPAGATION_HPP
#define PCCP_PROPAGATION_HPP

#include <memory>
#include <variant>
#include <vector>

#include "pccp/process.hpp"

namespace pccp {

class CompileError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/** A constraint operand: an interval variable or an integer constant. */
struct Operand {
  Slot var = -1;
  std::int32_t value = 0;
  bool is_const = false;

  static Operand v(Slot s) { return Operand{s, 0, false}; }
  static Operand c(std::int32_t k) { return Operand{-1, k, true}; }
};

struct Constraint;
using ConstraintPtr = std::shared_ptr<const Constraint>;

/** sum(coef_i * x_i) <= c with nonnegative coefficients. */
struct CLinearLeq {
  std::vector<std::pair<std::int32_t, Slot>> terms;
  std::int32_t c = 0;
};

/** x + offset <= y. offset 0 is x <= y, offset 1 is x < y, offset d is the
 * precedence x + d <= y. */
struct CLeq {
  Operand x;
  std::int32_t offset = 0;
  Operand y;
};

struct CAnd {
  ConstraintPtr a, b;
};
struct CIff {
  ConstraintPtr a, b;
};
struct CNot {
  ConstraintPtr a;
};

struct Constraint {
  std::variant<CLinearLeq, CLeq, CAnd, CIff, CNot> node;
};

Constraint linear_leq(std::vector<std::pair<std::int32_t, Slot>> terms, std::int32_t c);
Constraint leq(Operand x, Operand y);
Constraint lt(Operand x, Operand y);
/** x + d <= y (task precedence shape). */
Constraint precedes(Operand x, std::int32_t d, Operand y);
Constraint leq_offset(Operand x, std::int32_t offset, Operand y);
Constraint and_c(Constraint a, Constraint b);
Constraint iff_c(Constraint a, Constraint b);
Constraint not_c(Constraint a);

std::string describe(const Constraint& c);

/** A compiled constraint: guarded commands plus the constraint itself for
 * entailment queries. */
struct Propagator {
  std::vector<GuardedCommand> commands;
  Constraint constraint;

  std::vector<CellRef> read_set() const;
  std::vector<Slot> write_set() const;
};

/** Compiles a constraint to its propagator. Sum constraints allocate one
 * fresh ZInc `lsum` cell on `schema`. Throws CompileError on unsupported
 * shapes (e.g. the negation of a sum constraint). */
Propagator compile(const Constraint& c, SchemaBuilder& schema);

/** Intermediate form: the PCCP process for `c` (before local erasure and
 * GNF lowering). `lsum` locals are allocated from `locals`. */
Process compile_to_process(const Constraint& c, LocalAlloc& locals);

/** True only if `c` holds under every instantiation within current bounds.
 * Monotone in the store. */
bool entailed(const Constraint& c, const Store& s);

/** Entailment of the negation: true only if `c` fails under every
 * instantiation within current bounds. Monotone in the store. */
bool entailed_not(const Constraint& c, const Store& s);

/** Reifies `c` onto the 0/1 interval variable `b`: entailed(c) forces b=1,
 * entailed(not c) forces b=0, b=1 activates the propagator of c and b=0 the
 * propagator of its negation. Requires c and not(c) both compilable. */
Propagator compile_reified(Slot b, const Constraint& c, SchemaBuilder& schema);

/** Entailment conditions in disjunctive normal form: the constraint is
 * entailed as soon as every predicate of one disjunct holds. Conjunctions
 * multiply out; the negation of a conjunction contributes one disjunct per
 * side. Used to build reification guards. */
std::vector<std::vector<Pred>> entailment_guards(const Constraint& c);
std::vector<std::vector<Pred>> entailment_not_guards(const Constraint& c);

} // namespace pccp

#endif
