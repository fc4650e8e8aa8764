#include "pccp/solver.hpp"

#include <deque>
#include <mutex>
#include <thread>

namespace pccp {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "OPTIMAL";
    case SolveStatus::Sat: return "SAT";
    case SolveStatus::Unsat: return "UNSAT";
    case SolveStatus::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::optional<std::pair<Decision, Decision>> branch(const Store& s,
                                                    const BranchStrategy& strategy) {
  const Schema& schema = s.schema();
  Slot best_var = -1;
  std::int64_t best_width = 0;
  auto consider = [&](Slot i) {
    if (schema.kind(i) != Kind::Interval) return;
    const LatticeValue v = s.get(i);
    if (v.lo >= v.hi) return; // singleton (or empty, handled by failure)
    const std::int64_t width = std::int64_t{v.hi} - std::int64_t{v.lo} + 1;
    if (best_var < 0 || width < best_width) {
      best_var = i;
      best_width = width;
    }
  };
  if (strategy.candidates.empty()) {
    for (Slot i = 0; i < schema.slot_count(); ++i) consider(i);
  } else {
    for (Slot i : strategy.candidates) consider(i);
  }
  if (best_var < 0) return std::nullopt;
  const LatticeValue v = s.get(best_var);
  if (v.lo == kNegInf || v.hi == kPosInf) {
    throw ModelError("branch: variable '" + schema.name(best_var) + "' is unbounded");
  }
  const std::int32_t mid =
      static_cast<std::int32_t>((std::int64_t{v.lo} + std::int64_t{v.hi}) >> 1);
  return std::make_pair(Decision{best_var, false, mid}, Decision{best_var, true, mid});
}

namespace {

struct SharedControl {
  explicit SharedControl(const SolveLimits& limits)
      : start(std::chrono::steady_clock::now()),
        deadline(start + limits.timeout),
        node_limit(limits.node_limit) {}

  std::chrono::steady_clock::time_point start;
  std::chrono::steady_clock::time_point deadline;
  std::uint64_t node_limit = UINT64_MAX;
  std::atomic<std::uint64_t> nodes{0};
  std::atomic<bool> stop{false};

  std::mutex solution_mu;
  std::uint64_t solutions = 0;
  std::optional<std::int32_t> best_value;
  std::vector<LatticeValue> best_store;

  bool should_stop() {
    if (stop.load(std::memory_order_relaxed)) return true;
    if (nodes.load(std::memory_order_relaxed) >= node_limit ||
        std::chrono::steady_clock::now() >= deadline) {
      stop.store(true, std::memory_order_relaxed);
      return true;
    }
    return false;
  }
};

EngineResult run_engine(const EngineConfig& cfg, std::span<const GuardedCommand> props,
                        Store& s) {
  switch (cfg.kind) {
    case EngineConfig::Kind::Fair: return run_fair(props, s, cfg.seed);
    case EngineConfig::Kind::Par: return run_parallel(props, s, cfg.workers);
    case EngineConfig::Kind::Seq: break;
  }
  return run_sequential(props, s);
}

/** Rebuilds a node's state in `current`: copy the subproblem root, replay
 * the decision path, tighten the objective and run to a fixpoint. */
EngineResult materialize(Store& current, const Store& root, const SearchNode& node,
                         std::span<const GuardedCommand> props, Objective& objective,
                         const EngineConfig& engine, SharedControl& ctrl) {
  current.copy_from(root);
  for (const Decision& d : node.decisions) current.join_in_place(d.var, d.as_join());
  const std::int32_t best = objective.best();
  if (best != kPosInf) {
    current.join_in_place(objective.var(), LatticeValue::interval(kNegInf, best - 1));
  }
  ctrl.nodes.fetch_add(1, std::memory_order_relaxed);
  return run_engine(engine, props, current);
}

void record_solution(const Store& s, Objective& objective, SharedControl& ctrl,
                     const SolutionCallback& on_solution) {
  const LatticeValue obj = s.get(objective.var());
  const std::int32_t value = obj.lo;
  if (!objective.improve(value)) return; // raced or not an improvement
  {
    std::lock_guard<std::mutex> lock(ctrl.solution_mu);
    ++ctrl.solutions;
    if (!ctrl.best_value || value < *ctrl.best_value) {
      ctrl.best_value = value;
      ctrl.best_store = s.snapshot();
    }
  }
  if (on_solution) on_solution(s, value);
}

/** Depth-first left-first exploration of one subproblem. Returns true iff
 * the subtree was exhausted (false when a limit stopped the search). */
bool dfs(const Store& root, std::span<const GuardedCommand> props, Objective& objective,
         const EngineConfig& engine, SharedControl& ctrl, const SolutionCallback& on_solution,
         const BranchStrategy& strategy) {
  Store current(root.schema_ptr());
  std::vector<SearchNode> stack;
  stack.push_back(SearchNode{});
  while (!stack.empty()) {
    if (ctrl.should_stop()) return false;
    SearchNode node = std::move(stack.back());
    stack.pop_back();
    const EngineResult r = materialize(current, root, node, props, objective, engine, ctrl);
    if (r.failed()) continue;
    const auto decisions = branch(current, strategy);
    if (!decisions) {
      record_solution(current, objective, ctrl, on_solution);
      continue;
    }
    SearchNode right = node;
    right.decisions.push_back(decisions->second);
    stack.push_back(std::move(right)); // right branch explored last
    node.decisions.push_back(decisions->first);
    stack.push_back(std::move(node));
  }
  return true;
}

SolveResult finish(SharedControl& ctrl, Objective& objective, bool exhausted) {
  SolveResult out;
  out.stats.nodes = ctrl.nodes.load();
  out.stats.solutions = ctrl.solutions;
  out.stats.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - ctrl.start);
  if (objective.has_incumbent()) {
    out.objective = objective.best();
    out.best_store = ctrl.best_store;
    out.status = exhausted ? SolveStatus::Optimal : SolveStatus::Sat;
  } else {
    out.status = exhausted ? SolveStatus::Unsat : SolveStatus::Unknown;
  }
  return out;
}

} // namespace

SolveResult solve_dfs(const Store& root, std::span<const GuardedCommand> props,
                      Objective& objective, const SolveLimits& limits,
                      const EngineConfig& engine, const SolutionCallback& on_solution,
                      const BranchStrategy& strategy) {
  SharedControl ctrl(limits);
  const bool exhausted = dfs(root, props, objective, engine, ctrl, on_solution, strategy);
  return finish(ctrl, objective, exhausted);
}

namespace {

/** Breadth-first frontier expansion. The open list only ever holds live
 * nodes: children are materialized on creation, so failed and solved nodes
 * are resolved during decomposition and never reach the frontier. */
std::vector<SearchNode> decompose(const Store& root, std::span<const GuardedCommand> props,
                                  Objective& objective, std::size_t target,
                                  const EngineConfig& engine, SharedControl& ctrl,
                                  const SolutionCallback& on_solution,
                                  const BranchStrategy& strategy) {
  std::deque<SearchNode> open;
  open.push_back(SearchNode{});
  Store current(root.schema_ptr());
  Store child_store(root.schema_ptr());
  while (!open.empty() && open.size() < target && !ctrl.should_stop()) {
    SearchNode node = std::move(open.front());
    open.pop_front();
    const EngineResult r = materialize(current, root, node, props, objective, engine, ctrl);
    if (r.failed()) continue;
    const auto decisions = branch(current, strategy);
    if (!decisions) {
      record_solution(current, objective, ctrl, on_solution);
      continue;
    }
    for (const Decision& d : {decisions->first, decisions->second}) {
      SearchNode child = node;
      child.decisions.push_back(d);
      const EngineResult cr =
          materialize(child_store, root, child, props, objective, engine, ctrl);
      if (cr.failed()) continue;
      if (!branch(child_store, strategy)) {
        record_solution(child_store, objective, ctrl, on_solution);
        continue;
      }
      open.push_back(std::move(child));
    }
  }
  return {open.begin(), open.end()};
}

} // namespace

std::vector<SearchNode> eps_decompose(const Store& root, std::span<const GuardedCommand> props,
                                      Objective& objective, std::size_t target,
                                      SolveStats& stats, const EngineConfig& engine,
                                      const SolutionCallback& on_solution,
                                      const BranchStrategy& strategy) {
  SharedControl ctrl((SolveLimits()));
  auto out = decompose(root, props, objective, target, engine, ctrl, on_solution, strategy);
  stats.nodes += ctrl.nodes.load();
  stats.solutions += ctrl.solutions;
  return out;
}

SolveResult solve_parallel(const Store& root, std::span<const GuardedCommand> props,
                           Slot obj_var, unsigned workers, const SolveLimits& limits,
                           const EngineConfig& engine, unsigned eps_factor,
                           const SolutionCallback& on_solution, const BranchStrategy& strategy) {
  if (workers < 1) throw ModelError("solve_parallel: workers must be >= 1");
  Objective objective(obj_var);
  SharedControl ctrl(limits);
  if (ctrl.should_stop()) return finish(ctrl, objective, false);

  // Propagate the problem root once; it becomes the base of every subproblem.
  Store propagated(root.schema_ptr());
  const EngineResult root_result =
      materialize(propagated, root, SearchNode{}, props, objective, engine, ctrl);
  if (root_result.failed()) return finish(ctrl, objective, true);
  if (!branch(propagated, strategy)) {
    record_solution(propagated, objective, ctrl, on_solution);
    return finish(ctrl, objective, true);
  }

  const std::size_t target = static_cast<std::size_t>(eps_factor) * workers;
  const std::vector<SearchNode> frontier =
      decompose(propagated, props, objective, target, engine, ctrl, on_solution, strategy);
  if (frontier.empty()) return finish(ctrl, objective, !ctrl.should_stop());

  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> all_exhausted{true};

  auto worker_fn = [&]() {
    // Two stores per worker: the subproblem root and the search state.
    Store subroot(propagated.schema_ptr());
    while (true) {
      const std::size_t i = cursor.fetch_add(1, std::memory_order_relaxed);
      if (i >= frontier.size()) break;
      if (ctrl.should_stop()) {
        all_exhausted.store(false, std::memory_order_relaxed);
        break;
      }
      subroot.copy_from(propagated);
      for (const Decision& d : frontier[i].decisions) subroot.join_in_place(d.var, d.as_join());
      if (!dfs(subroot, props, objective, engine, ctrl, on_solution, strategy)) {
        all_exhausted.store(false, std::memory_order_relaxed);
      }
    }
  };

  if (workers == 1) {
    worker_fn();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker_fn);
    for (std::thread& t : pool) t.join();
  }
  return finish(ctrl, objective, all_exhausted.load());
}

} // namespace pccp
