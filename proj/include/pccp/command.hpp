#ifndef PCCP_COMMAND_HPP
#define PCCP_COMMAND_HPP

#include <functional>
#include <optional>
#include <vector>

#include "pccp/store.hpp"

namespace pccp {

/** Which part of a cell an expression reads. */
enum class Bound : std::uint8_t { Scalar, Lb, Ub };

struct CellRef {
  Slot slot = 0;
  Bound bound = Bound::Scalar;
};

inline CellRef lb_of(Slot s) { return {s, Bound::Lb}; }
inline CellRef ub_of(Slot s) { return {s, Bound::Ub}; }
inline CellRef scalar_of(Slot s) { return {s, Bound::Scalar}; }

/** One linear term `coef * ref`. The word index is resolved against the
 * schema when the command is finalized. */
struct Term {
  std::int32_t coef = 1;
  CellRef ref;
  Word word = 0;
};

/** Saturating linear form `k + sum(coef_i * ref_i)` over store words.
 * Monotone whenever coefficients are nonnegative on upward words and
 * nonpositive on downward words (the compiler only emits such forms). */
struct LinExpr {
  std::int32_t k = 0;
  std::vector<Term> terms;

  std::int32_t eval(const Store& s) const;
  static LinExpr constant(std::int32_t k) { return LinExpr{k, {}}; }
  static LinExpr of(CellRef r, std::int32_t coef = 1, std::int32_t k = 0) {
    return LinExpr{k, {Term{coef, r, 0}}};
  }
};

/** Guard predicate: either a linear test `expr <= rhs` / `expr > rhs`
 * (entailment checks compile to this form), or an opaque function used by
 * tests. A plain BInc guard cell b compiles to `b > 0` and remembers the
 * cell for introspection. */
struct Pred {
  enum class Rel : std::uint8_t { Leq, Gt };

  LinExpr lhs;
  Rel rel = Rel::Gt;
  std::int32_t rhs = 0;
  std::optional<Slot> binc_cell; // set when this pred is just "cell is true"
  std::function<bool(const Store&)> generic;

  bool eval(const Store& s) const;
  std::string describe(const Schema& schema) const;

  static Pred binc_true(Slot b) {
    Pred p;
    p.lhs = LinExpr::of(scalar_of(b));
    p.rel = Rel::Gt;
    p.rhs = 0;
    p.binc_cell = b;
    return p;
  }
  static Pred linear(LinExpr lhs, Rel rel, std::int32_t rhs) {
    Pred p;
    p.lhs = std::move(lhs);
    p.rel = rel;
    p.rhs = rhs;
    return p;
  }
};

/** Escape hatch for arbitrary monotone functions (used by tests and demos;
 * compiled propagators always use the linear forms). */
struct GenericFn {
  std::function<LatticeValue(const Store&)> eval;
  std::vector<CellRef> reads;
};

/** A monotone function from read cells to one lattice value, in one of three
 * shapes: a scalar linear form, an interval pair of linear forms (an absent
 * part tells bottom, i.e. leaves that bound alone), or a generic function. */
struct MonotoneFn {
  std::optional<LinExpr> scalar;
  std::optional<LinExpr> lb, ub;
  std::optional<GenericFn> generic;

  LatticeValue eval(Kind target_kind, const Store& s) const;
  std::vector<CellRef> reads() const;

  static MonotoneFn make_scalar(LinExpr e) {
    MonotoneFn f;
    f.scalar = std::move(e);
    return f;
  }
  static MonotoneFn make_interval(std::optional<LinExpr> lb, std::optional<LinExpr> ub) {
    MonotoneFn f;
    f.lb = std::move(lb);
    f.ub = std::move(ub);
    return f;
  }
  static MonotoneFn make_generic(GenericFn g) {
    MonotoneFn f;
    f.generic = std::move(g);
    return f;
  }
  static MonotoneFn const_value(const LatticeValue& v);
};

/** `{guards} => target <- fn(reads)` — the executable unit after GNF
 * lowering. Immutable once finalized against a schema. */
struct GuardedCommand {
  std::vector<Pred> guards;
  Slot target = 0;
  Kind target_kind = Kind::ZInc;
  MonotoneFn fn;
  Word target_word = 0; // first word of the target slot

  /** Evaluates guards against the live store; if they all hold, joins the
   * function value into the target. Returns true iff the target strictly
   * increased (the `bx` change flag). */
  bool apply(Store& s) const;

  bool guards_hold(const Store& s) const;

  /** Sorted distinct BInc guard cells (for structural tests on gnf output). */
  std::vector<Slot> guard_cells() const;

  /** All cells read by guards and fn. */
  std::vector<CellRef> read_set() const;
};

/** Resolves every Term::word and the target word against `schema`.
 * Throws ModelError if any referenced slot is still a local placeholder. */
void finalize(GuardedCommand& gc, const Schema& schema);
void finalize_all(std::vector<GuardedCommand>& gcs, const Schema& schema);

Word resolve_word(const CellRef& ref, const Schema& schema);

} // namespace pccp

#endif
