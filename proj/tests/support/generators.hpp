#ifndef PCCP_TESTS_GENERATORS_HPP
#define PCCP_TESTS_GENERATORS_HPP

#include <random>

#include "pccp/process.hpp"
#include "pccp/propagation.hpp"
#include "pccp/rcpsp.hpp"

namespace pccp::testsupport {

/** A random CSP over a handful of interval variables with small domains,
 * plus the compiled propagators and the constraints for concrete checks. */
struct MicroCsp {
  std::shared_ptr<const Schema> schema;
  std::vector<GuardedCommand> props;
  std::vector<Slot> vars;
  std::vector<std::pair<std::int32_t, std::int32_t>> domains; // initial (lo, hi)
  std::vector<Constraint> constraints;                        // over `vars` only
};

MicroCsp random_micro_csp(std::mt19937_64& rng);

/** Enumerates all total assignments over the initial domains, calling `f`
 * with values indexed by slot (non-decision slots hold 0). */
void for_each_assignment(const MicroCsp& csp,
                         const std::function<void(const std::vector<std::int32_t>&)>& f);

/** A random local-free process over the given schema. All functions are
 * monotone and clamped to a small window so fixed points stay shallow. */
Process random_process(std::mt19937_64& rng, const Schema& schema, int max_depth = 4);

/** A schema with a few interval, ZInc and BInc cells for process tests. */
std::shared_ptr<const Schema> small_mixed_schema();

/** Random RCPSP with up to 3 real tasks bracketed by dummies, horizon <= 12.
 * Roughly one in ten draws is unsatisfiable (a usage above capacity). */
rcpsp::RcpspInstance random_micro_rcpsp(std::mt19937_64& rng);

/** Exhaustive optimum of the sink start, or nothing when unsatisfiable.
 * Uses check_solution (the time-indexed test), not the b_ij decomposition. */
std::optional<std::int32_t> brute_force_makespan(const rcpsp::RcpspInstance& inst);

} // namespace pccp::testsupport

#endif
