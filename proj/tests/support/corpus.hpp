#ifndef PCCP_TESTS_CORPUS_HPP
#define PCCP_TESTS_CORPUS_HPP

#include <random>
#include <string>
#include <vector>

#include "pccp/rcpsp.hpp"

namespace pccp::testsupport {

/** Serializes an instance in the Patterson layout. */
std::string patterson_text(const rcpsp::RcpspInstance& inst);

/** A feasible random Patterson-style instance: `n_real` tasks bracketed by
 * dummy source/sink, layered random precedences, usages within capacity. */
rcpsp::RcpspInstance random_patterson(std::mt19937_64& rng, int n_real, int resources);

/** The stand-in corpus for the 110-instance Patterson set: deterministic,
 * format identical, sizes from 4 to 22 real tasks. Files are written to
 * `dir` as pat001.rcp .. pat110.rcp; returns the paths. */
std::vector<std::string> write_corpus(const std::string& dir);

/** The same corpus in memory (index 0..109). */
std::vector<rcpsp::RcpspInstance> corpus_instances();

} // namespace pccp::testsupport

#endif
