#ifndef PCCP_RCPSP_HPP
#define PCCP_RCPSP_HPP

#include <iosfwd>

#include "pccp/propagation.hpp"

namespace pccp::rcpsp {

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Task {
  std::int32_t duration = 0;
  std::vector<std::int32_t> usages; // one per resource
};

struct RcpspInstance {
  std::vector<Task> tasks;                               // includes dummy source/sink
  std::vector<std::pair<std::size_t, std::size_t>> precedences; // i must end before j starts
  std::vector<std::int32_t> capacities;
  std::int32_t horizon = 0; // defaults to the sum of durations

  std::size_t task_count() const { return tasks.size(); }
  std::size_t resource_count() const { return capacities.size(); }
};

/** Parses the Patterson format: header `J R`, then R capacities, then per
 * job its duration, R usages, successor count and 1-based successor ids.
 * Dummy source/sink jobs are kept. Throws ParseError (with the offending
 * line) on truncated input, negative numbers, out-of-range successors or a
 * cyclic precedence graph. */
RcpspInstance parse_patterson(std::istream& in);
RcpspInstance parse_patterson_text(const std::string& text);
RcpspInstance parse_patterson_file(const std::string& path);

/** JSON ingest with the same fields: {"tasks": [{"duration": d, "usages":
 * [..]}], "precedences": [[i, j]..], "capacities": [..], "horizon": h?}.
 * Task indices are 0-based here. */
RcpspInstance parse_json_text(const std::string& text);
RcpspInstance parse_json_file(const std::string& path);

void validate(const RcpspInstance& inst); // acyclicity and range checks

struct RcpspModel {
  std::shared_ptr<const Schema> schema;
  std::vector<GuardedCommand> props;
  Slot objective = 0;        // start of the sink dummy
  std::vector<Slot> starts;  // one per task
  std::vector<Slot> overlaps; // b[i*n+j], row-major
  std::vector<Slot> search_vars; // branch on starts; propagation fixes the rest
};

/** Builds the decomposed model: s_i in (0,h), 0/1 overlap variables b_ij,
 * precedence propagators, n^2 overlap reifications (b_ii fixed: 1 when
 * d_i > 0, else 0) and one resource sum per (resource, task). */
RcpspModel build_model(const RcpspInstance& inst);

/** Independent solution check on concrete starts: all precedences hold and
 * at every time point the running tasks fit every capacity. This is the
 * time-indexed cumulative test, deliberately not the b_ij decomposition. */
bool check_solution(const RcpspInstance& inst, const std::vector<std::int32_t>& starts);

/** Extracts concrete starts from a solved store (all start cells singleton). */
std::vector<std::int32_t> extract_starts(const RcpspModel& model,
                                         const std::vector<LatticeValue>& snapshot);

} // namespace pccp::rcpsp

#endif
