#ifndef PCCP_SOLVER_HPP
#define PCCP_SOLVER_HPP

#include <chrono>
#include <optional>
#include <random>

#include "pccp/engine.hpp"

namespace pccp {

/** One branching decision. The two branches x <= mid and x >= mid+1
 * partition the current interval of the variable. */
struct Decision {
  Slot var = 0;
  bool upper_half = false; // false: x <= mid, true: x >= mid+1
  std::int32_t mid = 0;

  LatticeValue as_join() const {
    return upper_half ? LatticeValue::interval(mid + 1, kPosInf)
                      : LatticeValue::interval(kNegInf, mid);
  }
};

/** A search node is just its decision path from the subproblem root:
 * copying the root store, replaying the decisions and propagating
 * reconstructs the node's state exactly. */
struct SearchNode {
  std::vector<Decision> decisions;
};

/** Shared minimization state: the best-known objective upper bound lives in
 * an atomic ZDec cell, updated by join like every other cell. */
class Objective {
public:
  explicit Objective(Slot obj_var) : obj_var_(obj_var), best_(kPosInf) {}

  Slot var() const { return obj_var_; }
  std::int32_t best() const { return best_.load(std::memory_order_relaxed); }
  bool has_incumbent() const { return best() != kPosInf; }

  /** ZDec join (min); returns true iff the bound strictly improved. */
  bool improve(std::int32_t makespan) {
    std::int32_t cur = best_.load(std::memory_order_relaxed);
    while (makespan < cur) {
      if (best_.compare_exchange_weak(cur, makespan, std::memory_order_relaxed)) return true;
    }
    return false;
  }

private:
  Slot obj_var_;
  std::atomic<std::int32_t> best_;
};

enum class SolveStatus : std::uint8_t { Optimal, Sat, Unsat, Unknown };

const char* to_string(SolveStatus s);

/** Which engine runs the per-node fixpoint. */
struct EngineConfig {
  enum class Kind : std::uint8_t { Seq, Fair, Par } kind = Kind::Seq;
  std::uint64_t seed = 1;
  unsigned workers = 1; // for Kind::Par
};

struct SolveLimits {
  std::chrono::steady_clock::duration timeout = std::chrono::hours(24);
  std::uint64_t node_limit = UINT64_MAX;
};

struct SolveStats {
  std::uint64_t nodes = 0; // materialized nodes = propagation fixpoints
  std::uint64_t solutions = 0;
  std::chrono::milliseconds elapsed{0};
};

struct SolveResult {
  SolveStatus status = SolveStatus::Unknown;
  std::optional<std::int32_t> objective;
  std::vector<LatticeValue> best_store; // snapshot of the best solution
  SolveStats stats;
};

/** Called on every improving solution; may inspect the solved store. */
using SolutionCallback = std::function<void(const Store&, std::int32_t objective)>;

/** Which variables the search may branch on. With an empty candidate list
 * every interval variable is considered. A model can restrict this to its
 * decision variables when propagation is known to fix the rest (RCPSP
 * branches on starts; the overlap booleans follow by entailment). */
struct BranchStrategy {
  std::vector<Slot> candidates;
};

/** Picks the unfixed candidate with the smallest width (ties: lowest
 * cell-index), mid = floor((lb+ub)/2). Returns nothing when every interval
 * is a singleton (a solution). */
std::optional<std::pair<Decision, Decision>> branch(const Store& s,
                                                    const BranchStrategy& strategy = {});

/** Depth-first left-first branch and bound. Every node is rebuilt by full
 * recomputation: copy the root store, replay the decision path, tighten the
 * objective to best-1 and run the engine to a fixpoint. */
SolveResult solve_dfs(const Store& root, std::span<const GuardedCommand> props,
                      Objective& objective, const SolveLimits& limits = {},
                      const EngineConfig& engine = {},
                      const SolutionCallback& on_solution = nullptr,
                      const BranchStrategy& strategy = {});

/** Breadth-first expansion of the search tree until at least `target` open
 * nodes exist (or the tree is exhausted). Failed and solved nodes are
 * resolved on the way; solutions found during decomposition update the
 * objective. Requires a propagated, non-failed root. */
std::vector<SearchNode> eps_decompose(const Store& root, std::span<const GuardedCommand> props,
                                      Objective& objective, std::size_t target,
                                      SolveStats& stats, const EngineConfig& engine = {},
                                      const SolutionCallback& on_solution = nullptr,
                                      const BranchStrategy& strategy = {});

/** Embarrassingly parallel search: decomposes into eps_factor * workers
 * subproblems; workers pull them from a shared cursor and run solve_dfs on
 * each, all sharing one best-bound cell. */
SolveResult solve_parallel(const Store& root, std::span<const GuardedCommand> props,
                           Slot obj_var, unsigned workers, const SolveLimits& limits = {},
                           const EngineConfig& engine = {}, unsigned eps_factor = 8,
                           const SolutionCallback& on_solution = nullptr,
                           const BranchStrategy& strategy = {});

} // namespace pccp

#endif
