#ifndef PCCP_ENGINE_HPP
#define PCCP_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <span>

#include "pccp/command.hpp"

namespace pccp {

enum class Status : std::uint8_t { Fixpoint, Failed };

struct EngineResult {
  Status status = Status::Fixpoint;
  std::uint64_t iterations = 0;   // full rounds over the command set
  std::uint64_t applications = 0; // guard-passing command executions
  bool failed() const { return status == Status::Failed; }
};

/** Called with the store at each round boundary (testing hook). */
using RoundObserver = std::function<void(const Store&)>;

/** Sweeps all commands in index order until a full sweep changes nothing.
 * Failure is checked at sweep boundaries; a failed store stops the run and
 * is reported as Failed (all failed stores are semantically top). */
EngineResult run_sequential(std::span<const GuardedCommand> gc, Store& s,
                            const RoundObserver& observer = nullptr);

/** Fair scheduler: one command per step, in per-round shuffled order, so
 * every command is selected infinitely often in an infinite run. The fixed
 * point is the same for every seed. */
EngineResult run_fair(std::span<const GuardedCommand> gc, Store& s, std::uint64_t seed,
                      const RoundObserver& observer = nullptr);

/** Barrier-synchronized parallel engine: worker w applies commands
 * w, w+stride, ... each iteration; per-command change flags OR into the
 * current slot of a 3-slot has_changed ring (past / present / future), and
 * all workers meet at one rendezvous per iteration. Failure is detected by
 * scanning the store after each iteration. Requires workers >= 1. */
EngineResult run_parallel(std::span<const GuardedCommand> gc, Store& s, unsigned workers);

/** One joint round of the denotational semantics: every command is evaluated
 * against a frozen snapshot of `s` and all results are joined in. Used by
 * dominance and extensiveness tests. Returns true iff anything changed. */
bool denotational_round(std::span<const GuardedCommand> gc, Store& s);

} // namespace pccp

#endif
