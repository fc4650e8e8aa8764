#include "pccp/propagation.hpp"

#include <algorithm>
#include <sstream>

namespace pccp {

Constraint linear_leq(std::vector<std::pair<std::int32_t, Slot>> terms, std::int32_t c) {
  for (const auto& [coef, var] : terms) {
    if (coef < 0) throw CompileError("linear_leq: coefficients must be nonnegative");
  }
  return Constraint{CLinearLeq{std::move(terms), c}};
}

Constraint leq_offset(Operand x, std::int32_t offset, Operand y) {
  return Constraint{CLeq{x, offset, y}};
}
Constraint leq(Operand x, Operand y) { return leq_offset(x, 0, y); }
Constraint lt(Operand x, Operand y) { return leq_offset(x, 1, y); }
Constraint precedes(Operand x, std::int32_t d, Operand y) { return leq_offset(x, d, y); }

Constraint and_c(Constraint a, Constraint b) {
  return Constraint{CAnd{std::make_shared<const Constraint>(std::move(a)),
                         std::make_shared<const Constraint>(std::move(b))}};
}
Constraint iff_c(Constraint a, Constraint b) {
  return Constraint{CIff{std::make_shared<const Constraint>(std::move(a)),
                         std::make_shared<const Constraint>(std::move(b))}};
}
Constraint not_c(Constraint a) {
  return Constraint{CNot{std::make_shared<const Constraint>(std::move(a))}};
}

namespace {

std::string operand_str(const Operand& o) {
  return o.is_const ? std::to_string(o.value) : ("x" + std::to_string(o.var));
}

} // namespace

std::string describe(const Constraint& c) {
  return std::visit(
      [](const auto& node) -> std::string {
        using T = std::decay_t<decltype(node)>;
        std::ostringstream os;
        if constexpr (std::is_same_v<T, CLinearLeq>) {
          bool first = true;
          for (const auto& [coef, var] : node.terms) {
            if (!first) os << " + ";
            first = false;
            os << coef << "*x" << var;
          }
          os << " <= " << node.c;
        } else if constexpr (std::is_same_v<T, CLeq>) {
          os << operand_str(node.x);
          if (node.offset != 0) os << " + " << node.offset;
          os << " <= " << operand_str(node.y);
        } else if constexpr (std::is_same_v<T, CAnd>) {
          os << "(" << describe(*node.a) << ") and (" << describe(*node.b) << ")";
        } else if constexpr (std::is_same_v<T, CIff>) {
          os << "(" << describe(*node.a) << ") iff (" << describe(*node.b) << ")";
        } else {
          os << "not (" << describe(*node.a) << ")";
        }
        return os.str();
      },
      c.node);
}

namespace {

// Bound readers used by the concrete entailment evaluation.
std::int32_t op_ub(const Operand& o, const Store& s) {
  if (o.is_const) return o.value;
  const LatticeValue v = s.get(o.var);
  if (v.kind != Kind::Interval) throw SchemaError("entailment: operand is not an interval");
  return v.hi;
}
std::int32_t op_lb(const Operand& o, const Store& s) {
  if (o.is_const) return o.value;
  const LatticeValue v = s.get(o.var);
  if (v.kind != Kind::Interval) throw SchemaError("entailment: operand is not an interval");
  return v.lo;
}

// Negation pushed inward. not(x + k <= y) = y + (1-k) <= x.
Constraint negate(const Constraint& c) {
  return std::visit(
      [](const auto& node) -> Constraint {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CLeq>) {
          return leq_offset(node.y, 1 - node.offset, node.x);
        } else if constexpr (std::is_same_v<T, CNot>) {
          return *node.a;
        } else if constexpr (std::is_same_v<T, CLinearLeq>) {
          throw CompileError("negation of a sum constraint is not supported");
        } else if constexpr (std::is_same_v<T, CAnd>) {
          // Kept symbolic; compilation handles not(and) by conditional
          // propagation of the violated side.
          return not_c(Constraint{node});
        } else {
          throw CompileError("negation of an iff constraint is not supported");
        }
      },
      c.node);
}

// Entailment predicates in canonical linear form.
// ent(x + k <= y): ub(x) - lb(y) <= -k.
Pred ent_pred(const CLeq& c) {
  LinExpr lhs;
  if (!c.x.is_const) lhs.terms.push_back(Term{1, ub_of(c.x.var), 0});
  else lhs.k = sat_add(lhs.k, c.x.value);
  if (!c.y.is_const) lhs.terms.push_back(Term{-1, lb_of(c.y.var), 0});
  else lhs.k = sat_add(lhs.k, -c.y.value);
  return Pred::linear(std::move(lhs), Pred::Rel::Leq, -c.offset);
}

// ent(not (x + k <= y)): lb(x) - ub(y) > -k.
Pred ent_not_pred(const CLeq& c) {
  LinExpr lhs;
  if (!c.x.is_const) lhs.terms.push_back(Term{1, lb_of(c.x.var), 0});
  else lhs.k = sat_add(lhs.k, c.x.value);
  if (!c.y.is_const) lhs.terms.push_back(Term{-1, ub_of(c.y.var), 0});
  else lhs.k = sat_add(lhs.k, -c.y.value);
  return Pred::linear(std::move(lhs), Pred::Rel::Gt, -c.offset);
}

// ent(sum coef*x <= c): sum coef*ub(x) <= c.
Pred ent_pred(const CLinearLeq& c) {
  LinExpr lhs;
  for (const auto& [coef, var] : c.terms) lhs.terms.push_back(Term{coef, ub_of(var), 0});
  return Pred::linear(std::move(lhs), Pred::Rel::Leq, c.c);
}

// ent(not (sum coef*x <= c)): sum coef*lb(x) > c.
Pred ent_not_pred(const CLinearLeq& c) {
  LinExpr lhs;
  for (const auto& [coef, var] : c.terms) lhs.terms.push_back(Term{coef, lb_of(var), 0});
  return Pred::linear(std::move(lhs), Pred::Rel::Gt, c.c);
}

std::vector<std::vector<Pred>> dnf_product(const std::vector<std::vector<Pred>>& a,
                                           const std::vector<std::vector<Pred>>& b) {
  std::vector<std::vector<Pred>> out;
  for (const auto& da : a) {
    for (const auto& db : b) {
      std::vector<Pred> d = da;
      d.insert(d.end(), db.begin(), db.end());
      out.push_back(std::move(d));
    }
  }
  return out;
}

std::vector<std::vector<Pred>> dnf_union(std::vector<std::vector<Pred>> a,
                                         const std::vector<std::vector<Pred>>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

} // namespace

std::vector<std::vector<Pred>> entailment_guards(const Constraint& c) {
  return std::visit(
      [](const auto& node) -> std::vector<std::vector<Pred>> {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CLeq>) {
          return {{ent_pred(node)}};
        } else if constexpr (std::is_same_v<T, CLinearLeq>) {
          return {{ent_pred(node)}};
        } else if constexpr (std::is_same_v<T, CAnd>) {
          return dnf_product(entailment_guards(*node.a), entailment_guards(*node.b));
        } else if constexpr (std::is_same_v<T, CNot>) {
          return entailment_not_guards(*node.a);
        } else {
          throw CompileError("entailment guard of an iff constraint is not supported");
        }
      },
      c.node);
}

std::vector<std::vector<Pred>> entailment_not_guards(const Constraint& c) {
  return std::visit(
      [](const auto& node) -> std::vector<std::vector<Pred>> {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CLeq>) {
          return {{ent_not_pred(node)}};
        } else if constexpr (std::is_same_v<T, CLinearLeq>) {
          return {{ent_not_pred(node)}};
        } else if constexpr (std::is_same_v<T, CAnd>) {
          return dnf_union(entailment_not_guards(*node.a), entailment_not_guards(*node.b));
        } else if constexpr (std::is_same_v<T, CNot>) {
          return entailment_guards(*node.a);
        } else {
          throw CompileError("entailment guard of an iff constraint is not supported");
        }
      },
      c.node);
}

bool entailed(const Constraint& c, const Store& s) {
  return std::visit(
      [&s](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CLeq>) {
          return sat_add(op_ub(node.x, s), node.offset) <= op_lb(node.y, s);
        } else if constexpr (std::is_same_v<T, CLinearLeq>) {
          std::int64_t acc = 0;
          for (const auto& [coef, var] : node.terms) {
            acc += std::int64_t{sat_mul(coef, op_ub(Operand::v(var), s))};
          }
          return acc <= node.c;
        } else if constexpr (std::is_same_v<T, CAnd>) {
          return entailed(*node.a, s) && entailed(*node.b, s);
        } else if constexpr (std::is_same_v<T, CNot>) {
          return entailed_not(*node.a, s);
        } else {
          return (entailed(*node.a, s) && entailed(*node.b, s)) ||
                 (entailed_not(*node.a, s) && entailed_not(*node.b, s));
        }
      },
      c.node);
}

bool entailed_not(const Constraint& c, const Store& s) {
  return std::visit(
      [&s](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CLeq>) {
          return sat_add(op_lb(node.x, s), node.offset) > op_ub(node.y, s);
        } else if constexpr (std::is_same_v<T, CLinearLeq>) {
          std::int64_t acc = 0;
          for (const auto& [coef, var] : node.terms) {
            acc += std::int64_t{sat_mul(coef, op_lb(Operand::v(var), s))};
          }
          return acc > node.c;
        } else if constexpr (std::is_same_v<T, CAnd>) {
          return entailed_not(*node.a, s) || entailed_not(*node.b, s);
        } else if constexpr (std::is_same_v<T, CNot>) {
          return entailed(*node.a, s);
        } else {
          return (entailed(*node.a, s) && entailed_not(*node.b, s)) ||
                 (entailed_not(*node.a, s) && entailed(*node.b, s));
        }
      },
      c.node);
}

namespace {

/** Wraps `body` in asks so it runs once any disjunct holds: one parallel
 * copy of the body per disjunct, each behind that disjunct's predicates. */
Process ask_dnf(const std::vector<std::vector<Pred>>& dnf, const Process& body) {
  std::vector<Process> branches;
  for (const auto& disjunct : dnf) {
    Process p = body;
    for (auto it = disjunct.rbegin(); it != disjunct.rend(); ++it) p = ask(*it, p);
    branches.push_back(std::move(p));
  }
  if (branches.size() == 1) return branches.front();
  return par(std::move(branches));
}

Process compile_leq(const CLeq& c) {
  if (c.x.is_const && c.y.is_const) {
    throw CompileError("leq with two constant operands: " + operand_str(c.x) + " + " +
                       std::to_string(c.offset) + " <= " + operand_str(c.y));
  }
  std::vector<Process> tells;
  if (!c.x.is_const) {
    // x <- (bot, ub(y) - offset)
    LinExpr ub_expr;
    ub_expr.k = -c.offset;
    if (c.y.is_const) ub_expr.k = sat_add(c.y.value, -c.offset);
    else ub_expr.terms.push_back(Term{1, ub_of(c.y.var), 0});
    tells.push_back(tell(c.x.var, MonotoneFn::make_interval(std::nullopt, ub_expr)));
  }
  if (!c.y.is_const) {
    // y <- (lb(x) + offset, top)
    LinExpr lb_expr;
    lb_expr.k = c.offset;
    if (c.x.is_const) lb_expr.k = sat_add(c.x.value, c.offset);
    else lb_expr.terms.push_back(Term{1, lb_of(c.x.var), 0});
    tells.push_back(tell(c.y.var, MonotoneFn::make_interval(lb_expr, std::nullopt)));
  }
  if (tells.size() == 1) return std::move(tells.front());
  return par(std::move(tells));
}

/** x + y <= c with two unit coefficients compiles to the pair of indexical
 * tells x <- (bot, c - lb(y)) || y <- (bot, c - lb(x)). */
Process compile_binary_sum(const CLinearLeq& c) {
  const Slot x = c.terms[0].second;
  const Slot y = c.terms[1].second;
  LinExpr x_ub;
  x_ub.k = c.c;
  x_ub.terms.push_back(Term{-1, lb_of(y), 0});
  LinExpr y_ub;
  y_ub.k = c.c;
  y_ub.terms.push_back(Term{-1, lb_of(x), 0});
  return par({tell(x, MonotoneFn::make_interval(std::nullopt, x_ub)),
              tell(y, MonotoneFn::make_interval(std::nullopt, y_ub))});
}

/** General sum: one fresh lsum cell re-told each round, plus one guarded
 * zeroing command per term and a direct failure rule.
 *
 * The guard excludes the term's own contribution to lsum
 * (coef_i*(1 - lb(x_i)) + lsum > c); with the term already counted, the
 * printed form `coef_i + lsum > c` would zero variables that are part of a
 * load within capacity. */
Process compile_sum(const CLinearLeq& c, LocalAlloc& locals) {
  const LocalVar lsum = locals.fresh("lsum", Kind::ZInc);

  std::vector<Process> body;
  LinExpr sum_expr;
  for (const auto& [coef, var] : c.terms) sum_expr.terms.push_back(Term{coef, lb_of(var), 0});
  body.push_back(tell(lsum.id, MonotoneFn::make_scalar(sum_expr)));

  // lsum > c is already a contradiction: drive lsum to top.
  Pred overload = Pred::linear(LinExpr::of(scalar_of(lsum.id)), Pred::Rel::Gt, c.c);
  body.push_back(ask(overload, tell_const(lsum.id, LatticeValue::zinc(kPosInf))));

  for (const auto& [coef, var] : c.terms) {
    LinExpr lhs;
    lhs.k = coef;
    lhs.terms.push_back(Term{1, scalar_of(lsum.id), 0});
    lhs.terms.push_back(Term{-coef, lb_of(var), 0});
    Pred guard = Pred::linear(std::move(lhs), Pred::Rel::Gt, c.c);
    body.push_back(ask(std::move(guard), tell_const(var, LatticeValue::interval(0, 0))));
  }
  return exists(lsum, par(std::move(body)));
}

Process compile_rec(const Constraint& c, LocalAlloc& locals) {
  return std::visit(
      [&locals](const auto& node) -> Process {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CLeq>) {
          return compile_leq(node);
        } else if constexpr (std::is_same_v<T, CLinearLeq>) {
          if (node.terms.size() == 2 && node.terms[0].first == 1 && node.terms[1].first == 1) {
            return compile_binary_sum(node);
          }
          return compile_sum(node, locals);
        } else if constexpr (std::is_same_v<T, CAnd>) {
          return par({compile_rec(*node.a, locals), compile_rec(*node.b, locals)});
        } else if constexpr (std::is_same_v<T, CNot>) {
          const Constraint& inner = *node.a;
          if (std::holds_alternative<CAnd>(inner.node)) {
            // not(a and b): once one side is entailed, propagate the
            // negation of the other.
            const CAnd& conj = std::get<CAnd>(inner.node);
            Process na = compile_rec(negate(*conj.a), locals);
            Process nb = compile_rec(negate(*conj.b), locals);
            return par({ask_dnf(entailment_guards(*conj.a), nb),
                        ask_dnf(entailment_guards(*conj.b), na)});
          }
          return compile_rec(negate(inner), locals);
        } else {
          // a iff b, four conditional branches.
          const Constraint& a = *node.a;
          const Constraint& b = *node.b;
          return par({ask_dnf(entailment_guards(a), compile_rec(b, locals)),
                      ask_dnf(entailment_guards(b), compile_rec(a, locals)),
                      ask_dnf(entailment_not_guards(a), compile_rec(not_c(b), locals)),
                      ask_dnf(entailment_not_guards(b), compile_rec(not_c(a), locals))});
        }
      },
      c.node);
}

} // namespace

Process compile_to_process(const Constraint& c, LocalAlloc& locals) {
  return compile_rec(c, locals);
}

Propagator compile(const Constraint& c, SchemaBuilder& schema) {
  LocalAlloc locals;
  Process p = compile_to_process(c, locals);
  Process erased = erase_locals(p, schema);
  Propagator prop{gnf(erased, schema.peek()), c};
  return prop;
}

Propagator compile_reified(Slot b, const Constraint& c, SchemaBuilder& schema) {
  if (schema.peek().kind(b) != Kind::Interval) {
    throw CompileError("compile_reified: reification variable must be a 0/1 interval");
  }
  LocalAlloc locals;
  Process when_true = compile_to_process(c, locals);
  Process when_false = compile_to_process(not_c(c), locals);

  Pred b_true = Pred::linear(LinExpr::of(lb_of(b)), Pred::Rel::Gt, 0);   // lb(b) >= 1
  Pred b_false = Pred::linear(LinExpr::of(ub_of(b)), Pred::Rel::Leq, 0); // ub(b) <= 0

  Process p = par({ask_dnf(entailment_guards(c), tell_const(b, LatticeValue::interval(1, 1))),
                   ask_dnf(entailment_not_guards(c), tell_const(b, LatticeValue::interval(0, 0))),
                   ask(b_true, std::move(when_true)),
                   ask(b_false, std::move(when_false))});
  Process erased = erase_locals(p, schema);
  return Propagator{gnf(erased, schema.peek()), iff_c(leq(Operand::c(1), Operand::v(b)), c)};
}

std::vector<CellRef> Propagator::read_set() const {
  std::vector<CellRef> out;
  for (const GuardedCommand& gc : commands) {
    const auto r = gc.read_set();
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

std::vector<Slot> Propagator::write_set() const {
  std::vector<Slot> out;
  for (const GuardedCommand& gc : commands) out.push_back(gc.target);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

} // namespace pccp
