#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "oracle.hpp"
#include "pccp/engine.hpp"
#include "pccp/propagation.hpp"

using namespace pccp;
using namespace pccp::testsupport;

namespace {

struct XYModel {
  std::shared_ptr<const Schema> schema;
  Slot x, y;
  std::vector<GuardedCommand> props;
};

/** x, y in (x0..x1), (y0..y1) with x + y <= 5. */
XYModel xy_leq5(std::int32_t x0, std::int32_t x1, std::int32_t y0, std::int32_t y1) {
  XYModel m;
  SchemaBuilder sb;
  m.x = sb.add_cell("x", Kind::Interval);
  m.y = sb.add_cell("y", Kind::Interval);
  m.props = gnf(par({tell_const(m.x, LatticeValue::interval(x0, x1)),
                     tell_const(m.y, LatticeValue::interval(y0, y1))}),
                sb.peek());
  Propagator p = compile(linear_leq({{1, m.x}, {1, m.y}}, 5), sb);
  m.props.insert(m.props.end(), p.commands.begin(), p.commands.end());
  m.schema = sb.share();
  finalize_all(m.props, *m.schema);
  return m;
}

} // namespace

TEST_CASE("empty command set is already a fixpoint") {
  SchemaBuilder sb;
  sb.add_cell("x", Kind::ZInc);
  Store s(sb.share());
  const EngineResult r = run_sequential({}, s);
  CHECK(r.status == Status::Fixpoint);
  CHECK(r.iterations == 1);
  CHECK(r.applications == 0);
}

TEST_CASE("sequential engine reaches the x+y<=5 fixpoint") {
  XYModel m = xy_leq5(0, 10, 0, 10);
  Store s(m.schema);
  const EngineResult r = run_sequential(m.props, s);
  CHECK(r.status == Status::Fixpoint);
  CHECK(equal(s.get(m.x), LatticeValue::interval(0, 5)));
  CHECK(equal(s.get(m.y), LatticeValue::interval(0, 5)));
}

TEST_CASE("sequential engine detects failure") {
  XYModel m = xy_leq5(4, 10, 3, 10);
  Store s(m.schema);
  CHECK(run_sequential(m.props, s).status == Status::Failed);
  CHECK(s.is_failed());
}

TEST_CASE("fair engine agrees with itself across seeds and with sequential") {
  XYModel m = xy_leq5(0, 10, 0, 10);
  Store ref(m.schema);
  run_sequential(m.props, ref);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Store s(m.schema);
    const EngineResult r = run_fair(m.props, s, seed);
    CHECK(r.status == Status::Fixpoint);
    REQUIRE(snapshots_equal(s.snapshot(), ref.snapshot()));
  }
}

TEST_CASE("parallel engine with one worker matches sequential") {
  XYModel m = xy_leq5(0, 10, 0, 10);
  Store a(m.schema), b(m.schema);
  run_sequential(m.props, a);
  const EngineResult r = run_parallel(m.props, b, 1);
  CHECK(r.status == Status::Fixpoint);
  CHECK(snapshots_equal(a.snapshot(), b.snapshot()));
}

TEST_CASE("an input already at fixpoint ends after exactly one parallel iteration") {
  XYModel m = xy_leq5(0, 10, 0, 10);
  Store s(m.schema);
  run_sequential(m.props, s);
  const EngineResult again = run_parallel(m.props, s, 4);
  CHECK(again.iterations == 1);
  CHECK(again.status == Status::Fixpoint);
}

TEST_CASE("cross-engine confluence on random micro CSPs") {
  std::mt19937_64 rng(4242);
  for (int i = 0; i < 120; ++i) {
    const MicroCsp csp = random_micro_csp(rng);
    Store ref(csp.schema);
    const EngineResult r0 = run_sequential(csp.props, ref);

    for (std::uint64_t seed = 3; seed <= 5; ++seed) {
      Store s(csp.schema);
      const EngineResult r = run_fair(csp.props, s, seed);
      REQUIRE(r.status == r0.status);
      if (r0.status == Status::Fixpoint) REQUIRE(snapshots_equal(s.snapshot(), ref.snapshot()));
    }
    for (unsigned workers : {1u, 2u, 8u}) {
      Store s(csp.schema);
      const EngineResult r = run_parallel(csp.props, s, workers);
      REQUIRE(r.status == r0.status);
      if (r0.status == Status::Fixpoint) REQUIRE(snapshots_equal(s.snapshot(), ref.snapshot()));
    }
  }
}

TEST_CASE("one sequential sweep dominates one joint parallel round") {
  std::mt19937_64 rng(515);
  for (int i = 0; i < 100; ++i) {
    const MicroCsp csp = random_micro_csp(rng);
    Store swept(csp.schema);
    bool first = true;
    run_sequential(csp.props, swept, [&](const Store& snap) {
      if (!first) return;
      first = false;
      Store joint(csp.schema);
      denotational_round(csp.props, joint);
      // joint <= swept on every cell after their first rounds.
      for (Slot c = 0; c < snap.schema().slot_count(); ++c) {
        REQUIRE(leq(joint.get(c), snap.get(c)));
      }
    });
  }
}

TEST_CASE("store trajectories are monotone chains and terminate within the chain budget") {
  std::mt19937_64 rng(616);
  for (int i = 0; i < 80; ++i) {
    const MicroCsp csp = random_micro_csp(rng);
    Store s(csp.schema);
    std::vector<std::vector<LatticeValue>> traj;
    const EngineResult r = run_sequential(csp.props, s, [&](const Store& snap) {
      std::vector<LatticeValue> row;
      for (Slot c = 0; c < snap.schema().slot_count(); ++c) row.push_back(snap.get(c));
      traj.push_back(std::move(row));
    });

    std::uint64_t strict_increases = 0;
    for (std::size_t t = 1; t < traj.size(); ++t) {
      for (std::size_t c = 0; c < traj[t].size(); ++c) {
        REQUIRE(leq(traj[t - 1][c], traj[t][c]));
        if (!equal(traj[t - 1][c], traj[t][c])) ++strict_increases;
      }
    }
    // Each round but the last strictly increases some cell, so rounds are
    // bounded by the total chain capacity; applications by rounds * |gc|.
    REQUIRE(r.iterations <= strict_increases + 2);
    REQUIRE(r.applications <= r.iterations * csp.props.size());
  }
}

TEST_CASE("parallel engine is confluent under many workers on one shared store") {
  // A chain of dependent bounds exercises cross-worker visibility.
  SchemaBuilder sb;
  std::vector<Slot> xs;
  for (int i = 0; i < 12; ++i) xs.push_back(sb.add_cell("c" + std::to_string(i), Kind::Interval));
  std::vector<GuardedCommand> props;
  {
    std::vector<Process> ps;
    for (Slot x : xs) ps.push_back(tell_const(x, LatticeValue::interval(0, 100)));
    auto cmds = gnf(par(std::move(ps)), sb.peek());
    props.insert(props.end(), cmds.begin(), cmds.end());
  }
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    Propagator p = compile(precedes(Operand::v(xs[i]), 3, Operand::v(xs[i + 1])), sb);
    props.insert(props.end(), p.commands.begin(), p.commands.end());
  }
  const auto schema = sb.share();
  finalize_all(props, *schema);

  Store ref(schema);
  run_sequential(props, ref);
  for (int rep = 0; rep < 10; ++rep) {
    Store s(schema);
    const EngineResult r = run_parallel(props, s, 8);
    REQUIRE(r.status == Status::Fixpoint);
    REQUIRE(snapshots_equal(s.snapshot(), ref.snapshot()));
  }
}
