#ifndef PCCP_LSMACHINE_HPP
#define PCCP_LSMACHINE_HPP

#include "pccp/engine.hpp"

namespace pccp::ls {

/** Knobs for the desk-scale interleaving explorer. The two mutants exist to
 * demonstrate which parts of the compiled sequence carry the correctness:
 * dropping the strict-increase test must stay correct (joins are
 * idempotent), replacing the join-store by a plain overwrite must not. */
struct LsOptions {
  bool strict_po = false;       // execute the listing order, no Lemma-3 reordering
  bool skip_increase_guard = false; // mutant: store without the ox > rx test
  bool overwrite_store = false;     // mutant: store rf instead of rx join rf
  int max_rounds = 3;               // productive (store-changing) rounds per thread
  std::size_t max_states = 1u << 21;
};

/** The compiled load/store form of one guarded command: guard loads, value
 * loads, the target load, local computes folded into the step epilogue, and
 * the conditional store. */
struct LSProgram {
  const GuardedCommand* command = nullptr;
  std::vector<Word> guard_loads;
  std::vector<Word> value_loads;
  Word target = 0;
  std::string name;

  std::size_t load_count() const { return guard_loads.size() + value_loads.size() + 1; }
};

/** Compiles a guarded command with a scalar target into its instruction
 * sequence. Throws ModelError for interval targets (each bound is its own
 * cell at this level) or oversized read sets. */
LSProgram compile_ls(const GuardedCommand& gc, const Schema& schema,
                     std::size_t max_reads = 12);

struct ExploreReport {
  std::vector<std::vector<std::int32_t>> terminal_stores; // quiescent store words
  std::size_t states_visited = 0;
  bool bound_exceeded = false;   // productive-round or state budget hit
  bool soundness_violated = false; // some reachable store above the fixed point
  bool registers_monotone = true;
  std::vector<std::int32_t> fix_words; // sequential fixed point of the same commands
  std::string violation_trace;         // interleaving leading to a violation
};

/** Exhaustively explores interleavings of the programs from `s0` (all
 * programs conceptually loop forever; a state is terminal when no thread's
 * next round would change the store). Every reachable store is compared
 * against the sequential fixed point on the fly. */
ExploreReport explore(const std::vector<LSProgram>& programs, const Store& s0,
                      const LsOptions& opts = {});

struct TheoremReport {
  bool soundness = false;    // every reachable store <= fix
  bool completeness = false; // terminal set is exactly { fix }
  bool passed() const { return soundness && completeness; }
  ExploreReport detail;
};

/** Soundness: no interleaving generates more information than the fixed
 * point. Completeness: every quiescent terminal state equals the fixed
 * point. A violation names the offending interleaving. */
TheoremReport check_theorems(const std::vector<LSProgram>& programs, const Store& s0,
                             const LsOptions& opts = {});

} // namespace pccp::ls

#endif
