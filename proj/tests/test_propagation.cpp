#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "oracle.hpp"
#include "pccp/engine.hpp"
#include "pccp/propagation.hpp"

using namespace pccp;
using namespace pccp::testsupport;

namespace {

struct TwoVars {
  SchemaBuilder sb;
  Slot x, y;
  TwoVars() {
    x = sb.add_cell("x", Kind::Interval);
    y = sb.add_cell("y", Kind::Interval);
  }
  Store store(std::int32_t x0, std::int32_t x1, std::int32_t y0, std::int32_t y1) {
    Store s(sb.share());
    s.join_in_place(x, LatticeValue::interval(x0, x1));
    s.join_in_place(y, LatticeValue::interval(y0, y1));
    return s;
  }
};

} // namespace

TEST_CASE("x+y<=5 prunes both upper bounds in one round") {
  TwoVars m;
  Propagator p = compile(linear_leq({{1, m.x}, {1, m.y}}, 5), m.sb);
  Store s = m.store(0, 10, 0, 10);
  denotational_round(p.commands, s);
  CHECK(equal(s.get(m.x), LatticeValue::interval(0, 5)));
  CHECK(equal(s.get(m.y), LatticeValue::interval(0, 5)));
}

TEST_CASE("the sum rule zeroes an overloaded boolean but spares decided ones") {
  SchemaBuilder sb;
  const Slot b1 = sb.add_cell("b1", Kind::Interval);
  const Slot b2 = sb.add_cell("b2", Kind::Interval);
  Propagator p = compile(linear_leq({{2, b1}, {2, b2}}, 3), sb);
  // One fresh lsum cell was added for the constraint.
  REQUIRE(sb.peek().slot_count() == 3);
  CHECK(sb.peek().kind(2) == Kind::ZInc);

  Store s(sb.share());
  s.join_in_place(b1, LatticeValue::interval(0, 1));
  s.join_in_place(b2, LatticeValue::interval(1, 1));
  run_sequential(p.commands, s);

  CHECK(s.get(2).lo == 2); // lsum joined to 2*0 + 2*1
  CHECK(equal(s.get(b1), LatticeValue::interval(0, 0)));
  CHECK(equal(s.get(b2), LatticeValue::interval(1, 1)));
  CHECK(!s.is_failed());
}

TEST_CASE("x+y<=5 fails when the lower bounds already exceed it") {
  TwoVars m;
  Propagator p = compile(linear_leq({{1, m.x}, {1, m.y}}, 5), m.sb);
  Store s = m.store(4, 10, 3, 10);
  const EngineResult r = run_sequential(p.commands, s);
  CHECK(r.status == Status::Failed);
  CHECK(s.get(m.x).hi == 2); // joined (bot, 5-3)
}

TEST_CASE("entailment of x+y<=c uses upper bounds") {
  TwoVars m;
  const Constraint c6 = linear_leq({{1, m.x}, {1, m.y}}, 6);
  const Constraint c4 = linear_leq({{1, m.x}, {1, m.y}}, 4);
  Store s = m.store(0, 2, 0, 3);
  CHECK(entailed(c6, s));
  CHECK(!entailed(c4, s));
}

TEST_CASE("entailment of a sum reads the upper bounds of its booleans") {
  SchemaBuilder sb;
  const Slot b1 = sb.add_cell("b1", Kind::Interval);
  const Slot b2 = sb.add_cell("b2", Kind::Interval);
  Store s(sb.share());
  s.join_in_place(b1, LatticeValue::interval(0, 0));
  s.join_in_place(b2, LatticeValue::interval(0, 1));
  CHECK(entailed(linear_leq({{2, b1}, {2, b2}}, 3), s));
}

TEST_CASE("entailment of negations uses lower bounds") {
  TwoVars m;
  SUBCASE("not (x+y<=4) once the floors exceed it") {
    Store s = m.store(3, 5, 2, 6);
    CHECK(entailed_not(linear_leq({{1, m.x}, {1, m.y}}, 4), s));
  }
  SUBCASE("not (x<=y) undecided on full boxes") {
    Store s = m.store(0, 9, 0, 9);
    CHECK(!entailed_not(leq(Operand::v(m.x), Operand::v(m.y)), s));
  }
  SUBCASE("not (x<=y) once x is entirely above y") {
    Store s = m.store(7, 9, 0, 3);
    CHECK(entailed_not(leq(Operand::v(m.x), Operand::v(m.y)), s));
  }
}

TEST_CASE("reification decides b from entailment") {
  TwoVars m;
  const Slot b = m.sb.add_cell("b", Kind::Interval);
  Propagator p = compile_reified(b, leq(Operand::v(m.x), Operand::v(m.y)), m.sb);

  SUBCASE("entailed constraint forces b = 1") {
    Store s = m.store(0, 2, 5, 9);
    s.join_in_place(b, LatticeValue::interval(0, 1));
    run_sequential(p.commands, s);
    CHECK(equal(s.get(b), LatticeValue::interval(1, 1)));
  }
  SUBCASE("b = 1 activates the constraint without over-pruning") {
    Store s = m.store(0, 9, 0, 9);
    s.join_in_place(b, LatticeValue::interval(1, 1));
    run_sequential(p.commands, s);
    CHECK(equal(s.get(m.x), LatticeValue::interval(0, 9)));
    CHECK(equal(s.get(m.y), LatticeValue::interval(0, 9)));
    CHECK(!s.is_failed());
  }
  SUBCASE("b = 0 activates the negation y < x") {
    Store s = m.store(0, 9, 0, 9);
    s.join_in_place(b, LatticeValue::interval(0, 0));
    run_sequential(p.commands, s);
    CHECK(equal(s.get(m.y), LatticeValue::interval(0, 8)));
    CHECK(equal(s.get(m.x), LatticeValue::interval(1, 9)));
  }
}

TEST_CASE("negating a sum constraint is rejected, not guessed") {
  SchemaBuilder sb;
  const Slot b = sb.add_cell("b", Kind::Interval);
  const Slot v = sb.add_cell("v", Kind::Interval);
  const Constraint sum = linear_leq({{2, v}}, 3);
  CHECK_THROWS_AS(compile(not_c(sum), sb), CompileError);
  CHECK_THROWS_AS(compile_reified(b, sum, sb), CompileError);
}

TEST_CASE("compile rejects two constant operands and negative coefficients") {
  SchemaBuilder sb;
  CHECK_THROWS_AS(compile(leq(Operand::c(1), Operand::c(2)), sb), CompileError);
  CHECK_THROWS_AS(linear_leq({{-1, 0}}, 3), CompileError);
}

TEST_CASE("propagators only remove non-solutions (brute force, 150 instances)") {
  std::mt19937_64 rng(10101);
  for (int i = 0; i < 150; ++i) {
    const MicroCsp csp = random_micro_csp(rng);
    Store s(csp.schema);
    const EngineResult r = run_sequential(csp.props, s);

    for_each_assignment(csp, [&](const std::vector<std::int32_t>& values) {
      for (const Constraint& c : csp.constraints) {
        if (!eval_concrete(c, values)) return;
      }
      // A satisfying assignment must lie inside the fixed point box.
      REQUIRE(r.status == Status::Fixpoint);
      for (Slot v : csp.vars) {
        const LatticeValue box = s.get(v);
        const std::int32_t val = values[static_cast<std::size_t>(v)];
        REQUIRE(box.lo <= val);
        REQUIRE(val <= box.hi);
      }
    });
  }
}

TEST_CASE("one propagator application is extensive and monotone") {
  std::mt19937_64 rng(20202);
  int trials = 0;
  while (trials < 10000) {
    const MicroCsp csp = random_micro_csp(rng);
    std::uniform_int_distribution<int> d(0, 8);
    for (int rep = 0; rep < 40 && trials < 10000; ++rep, ++trials) {
      // Random store pair s <= t over the decision variables.
      Store s(csp.schema), t(csp.schema);
      for (Slot v : csp.vars) {
        const std::int32_t a = d(rng), b = d(rng), c = d(rng), e = d(rng);
        const std::int32_t lo_s = std::min(a, b), hi_s = std::max(a, b) + 4;
        // t tightens s on both sides.
        const std::int32_t lo_t = lo_s + std::min(c, 2), hi_t = hi_s - std::min(e, 2);
        s.join_in_place(v, LatticeValue::interval(lo_s, hi_s));
        t.join_in_place(v, LatticeValue::interval(lo_t, hi_t));
      }
      Store ps(csp.schema), pt(csp.schema);
      ps.copy_from(s);
      pt.copy_from(t);
      denotational_round(csp.props, ps);
      denotational_round(csp.props, pt);
      for (Slot c = 0; c < csp.schema->slot_count(); ++c) {
        REQUIRE(leq(s.get(c), ps.get(c)));  // extensive
        REQUIRE(leq(ps.get(c), pt.get(c))); // monotone
      }
    }
  }
}

TEST_CASE("reification is coherent at non-failed fixed points") {
  std::mt19937_64 rng(30303);
  int checked = 0;
  for (int i = 0; i < 400 && checked < 150; ++i) {
    TwoVars m;
    const Slot b = m.sb.add_cell("b", Kind::Interval);
    std::uniform_int_distribution<int> d(0, 8);
    const Constraint phi = leq_offset(Operand::v(m.x), d(rng) - 4, Operand::v(m.y));
    Propagator p = compile_reified(b, phi, m.sb);

    const std::int32_t a = d(rng), c = d(rng);
    Store s = m.store(std::min(a, c), std::max(a, c), d(rng), 8);
    s.join_in_place(b, LatticeValue::interval(0, 1));
    if (run_sequential(p.commands, s).failed()) continue;

    const LatticeValue bv = s.get(b);
    if (bv.lo == 1 && bv.hi == 1) {
      REQUIRE(!entailed_not(phi, s));
      ++checked;
    } else if (bv.lo == 0 && bv.hi == 0) {
      REQUIRE(!entailed(phi, s));
      ++checked;
    }
  }
  REQUIRE(checked > 0);
}

TEST_CASE("entailment is stable as the store grows") {
  std::mt19937_64 rng(40404);
  for (int i = 0; i < 200; ++i) {
    TwoVars m;
    std::uniform_int_distribution<int> d(0, 8);
    const Constraint phi = linear_leq({{1, m.x}, {1, m.y}}, d(rng) + 4);
    Store s = m.store(0, d(rng) + 1, 0, d(rng) + 1);
    const bool before = entailed(phi, s);
    const bool before_not = entailed_not(phi, s);
    // Grow the store by tightening both variables.
    s.join_in_place(m.x, LatticeValue::interval(d(rng) % 2, 4));
    s.join_in_place(m.y, LatticeValue::interval(d(rng) % 2, 4));
    if (s.is_failed()) continue;
    if (before) REQUIRE(entailed(phi, s));
    if (before_not) REQUIRE(entailed_not(phi, s));
  }
}

TEST_CASE("propagator exposes read and write sets") {
  TwoVars m;
  Propagator p = compile(linear_leq({{1, m.x}, {1, m.y}}, 5), m.sb);
  const auto writes = p.write_set();
  CHECK(std::find(writes.begin(), writes.end(), m.x) != writes.end());
  CHECK(std::find(writes.begin(), writes.end(), m.y) != writes.end());
  CHECK(!p.read_set().empty());
}
