#include "pccp/command.hpp"

#include <algorithm>
#include <sstream>

namespace pccp {

namespace {
constexpr std::int64_t kWideInf = std::int64_t{1} << 40;

std::int64_t term_value(const Term& t, const Store& s) {
  if (t.coef == 0) return 0;
  const std::int32_t v = s.load_word(t.word);
  if (v == kPosInf) return t.coef > 0 ? kWideInf : -kWideInf;
  if (v == kNegInf) return t.coef > 0 ? -kWideInf : kWideInf;
  const std::int64_t p = std::int64_t{t.coef} * std::int64_t{v};
  return std::clamp<std::int64_t>(p, -kWideInf, kWideInf);
}
} // namespace

std::int32_t LinExpr::eval(const Store& s) const {
  std::int64_t acc = k;
  for (const Term& t : terms) acc += term_value(t, s);
  if (acc >= kPosInf) return kPosInf;
  if (acc <= kNegInf) return kNegInf;
  return static_cast<std::int32_t>(acc);
}

bool Pred::eval(const Store& s) const {
  if (generic) return generic(s);
  const std::int32_t v = lhs.eval(s);
  return rel == Rel::Leq ? v <= rhs : v > rhs;
}

std::string Pred::describe(const Schema& schema) const {
  if (generic) return "<generic>";
  std::ostringstream os;
  if (binc_cell) {
    os << schema.name(*binc_cell);
    return os.str();
  }
  bool first = true;
  for (const Term& t : lhs.terms) {
    if (!first) os << " + ";
    first = false;
    if (t.coef != 1) os << t.coef << "*";
    switch (t.ref.bound) {
      case Bound::Lb: os << "lb(" << schema.name(t.ref.slot) << ")"; break;
      case Bound::Ub: os << "ub(" << schema.name(t.ref.slot) << ")"; break;
      case Bound::Scalar: os << schema.name(t.ref.slot); break;
    }
  }
  if (lhs.k != 0 || lhs.terms.empty()) os << (lhs.terms.empty() ? "" : " + ") << lhs.k;
  os << (rel == Rel::Leq ? " <= " : " > ") << rhs;
  return os.str();
}

LatticeValue MonotoneFn::eval(Kind target_kind, const Store& s) const {
  if (generic) return generic->eval(s);
  if (target_kind == Kind::Interval) {
    const std::int32_t lo = lb ? lb->eval(s) : kNegInf;
    const std::int32_t hi = ub ? ub->eval(s) : kPosInf;
    return LatticeValue::interval(lo, hi);
  }
  if (!scalar) throw ModelError("scalar tell without a scalar expression");
  return {target_kind, scalar->eval(s), 0};
}

std::vector<CellRef> MonotoneFn::reads() const {
  std::vector<CellRef> out;
  auto add = [&out](const std::optional<LinExpr>& e) {
    if (!e) return;
    for (const Term& t : e->terms) out.push_back(t.ref);
  };
  add(scalar);
  add(lb);
  add(ub);
  if (generic) out.insert(out.end(), generic->reads.begin(), generic->reads.end());
  return out;
}

MonotoneFn MonotoneFn::const_value(const LatticeValue& v) {
  MonotoneFn f;
  if (v.kind == Kind::Interval) {
    if (v.lo != kNegInf) f.lb = LinExpr::constant(v.lo);
    if (v.hi != kPosInf) f.ub = LinExpr::constant(v.hi);
  } else {
    f.scalar = LinExpr::constant(v.lo);
  }
  return f;
}

bool GuardedCommand::guards_hold(const Store& s) const {
  for (const Pred& p : guards) {
    if (!p.eval(s)) return false;
  }
  return true;
}

bool GuardedCommand::apply(Store& s) const {
  if (!guards_hold(s)) return false;
  if (!fn.generic && target_kind == Kind::Interval) {
    // Fast path: join each present bound directly, no LatticeValue round trip.
    bool changed = false;
    if (fn.lb) changed |= s.join_word(target_word, fn.lb->eval(s));
    if (fn.ub) changed |= s.join_word(target_word + 1, fn.ub->eval(s));
    return changed;
  }
  if (!fn.generic && fn.scalar) {
    return s.join_word(target_word, fn.scalar->eval(s));
  }
  return s.join_in_place(target, fn.eval(target_kind, s));
}

std::vector<Slot> GuardedCommand::guard_cells() const {
  std::vector<Slot> out;
  for (const Pred& p : guards) {
    if (p.binc_cell) out.push_back(*p.binc_cell);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<CellRef> GuardedCommand::read_set() const {
  std::vector<CellRef> out = fn.reads();
  for (const Pred& p : guards) {
    for (const Term& t : p.lhs.terms) out.push_back(t.ref);
  }
  return out;
}

Word resolve_word(const CellRef& ref, const Schema& schema) {
  if (ref.slot < 0) throw ModelError("unresolved local placeholder in expression");
  const SlotInfo& info = schema.slot(ref.slot);
  switch (ref.bound) {
    case Bound::Scalar:
      if (info.kind == Kind::Interval) {
        throw SchemaError("scalar read of interval cell '" + info.name + "'");
      }
      return info.word;
    case Bound::Lb:
      if (info.kind != Kind::Interval) {
        throw SchemaError("lb read of scalar cell '" + info.name + "'");
      }
      return info.word;
    case Bound::Ub:
      if (info.kind != Kind::Interval) {
        throw SchemaError("ub read of scalar cell '" + info.name + "'");
      }
      return info.word + 1;
  }
  return info.word;
}

namespace {
void resolve_expr(LinExpr& e, const Schema& schema) {
  for (Term& t : e.terms) t.word = resolve_word(t.ref, schema);
}
} // namespace

void finalize(GuardedCommand& gc, const Schema& schema) {
  if (gc.target < 0) throw ModelError("unresolved local placeholder as tell target");
  gc.target_kind = schema.kind(gc.target);
  gc.target_word = schema.first_word(gc.target);
  if (gc.fn.scalar) resolve_expr(*gc.fn.scalar, schema);
  if (gc.fn.lb) resolve_expr(*gc.fn.lb, schema);
  if (gc.fn.ub) resolve_expr(*gc.fn.ub, schema);
  for (Pred& p : gc.guards) resolve_expr(p.lhs, schema);
}

void finalize_all(std::vector<GuardedCommand>& gcs, const Schema& schema) {
  for (GuardedCommand& gc : gcs) finalize(gc, schema);
}

} // namespace pccp
