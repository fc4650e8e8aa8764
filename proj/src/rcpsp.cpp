#include "pccp/rcpsp.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pccp::rcpsp {

namespace {

/** Whitespace-separated integer reader that tracks line numbers for
 * diagnostics. */
class TokenReader {
public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  std::int64_t next(const char* what) {
    skip_space();
    std::int64_t v = 0;
    if (!(in_ >> v)) {
      throw ParseError("truncated instance: expected " + std::string(what) + " near line " +
                       std::to_string(line_));
    }
    return v;
  }

  std::int32_t next_nonneg(const char* what) {
    const std::int64_t v = next(what);
    if (v < 0 || v > kPosInf - 1) {
      throw ParseError(std::string(what) + " out of range (" + std::to_string(v) +
                       ") near line " + std::to_string(line_));
    }
    return static_cast<std::int32_t>(v);
  }

  int line() const { return line_; }

private:
  void skip_space() {
    int c;
    while ((c = in_.peek()) != EOF && std::isspace(c)) {
      if (c == '\n') ++line_;
      in_.get();
    }
  }

  std::istream& in_;
  int line_ = 1;
};

void default_horizon(RcpspInstance& inst) {
  std::int64_t h = 0;
  for (const Task& t : inst.tasks) h += t.duration;
  inst.horizon = static_cast<std::int32_t>(std::min<std::int64_t>(h, kPosInf - 2));
}

} // namespace

void validate(const RcpspInstance& inst) {
  const std::size_t n = inst.task_count();
  for (const Task& t : inst.tasks) {
    if (t.usages.size() != inst.resource_count()) {
      throw ParseError("task usage arity does not match resource count");
    }
    if (t.duration < 0) throw ParseError("negative duration");
    for (std::int32_t u : t.usages) {
      if (u < 0) throw ParseError("negative resource usage");
    }
  }
  for (const auto& [i, j] : inst.precedences) {
    if (i >= n || j >= n) throw ParseError("precedence endpoint out of range");
    if (i == j) throw ParseError("self precedence");
  }
  // Cycle check by iterative removal of sources.
  std::vector<int> indeg(n, 0);
  for (const auto& [i, j] : inst.precedences) ++indeg[j];
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indeg[i] == 0) ready.push_back(i);
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    const std::size_t i = ready.back();
    ready.pop_back();
    ++seen;
    for (const auto& [a, b] : inst.precedences) {
      if (a == i && --indeg[b] == 0) ready.push_back(b);
    }
  }
  if (seen != n) throw ParseError("precedence graph is cyclic");
}

RcpspInstance parse_patterson(std::istream& in) {
  TokenReader r(in);
  RcpspInstance inst;
  const std::int32_t jobs = r.next_nonneg("job count");
  const std::int32_t resources = r.next_nonneg("resource count");
  inst.capacities.reserve(static_cast<std::size_t>(resources));
  for (std::int32_t k = 0; k < resources; ++k) {
    inst.capacities.push_back(r.next_nonneg("capacity"));
  }
  std::vector<std::vector<std::size_t>> successors(static_cast<std::size_t>(jobs));
  for (std::int32_t j = 0; j < jobs; ++j) {
    Task t;
    t.duration = r.next_nonneg("duration");
    for (std::int32_t k = 0; k < resources; ++k) {
      t.usages.push_back(r.next_nonneg("usage"));
    }
    const std::int32_t nsucc = r.next_nonneg("successor count");
    for (std::int32_t s = 0; s < nsucc; ++s) {
      const std::int32_t id = r.next_nonneg("successor id");
      if (id < 1 || id > jobs) {
        throw ParseError("successor id " + std::to_string(id) + " out of range 1.." +
                         std::to_string(jobs) + " near line " + std::to_string(r.line()));
      }
      successors[static_cast<std::size_t>(j)].push_back(static_cast<std::size_t>(id - 1));
    }
    inst.tasks.push_back(std::move(t));
  }
  for (std::size_t i = 0; i < successors.size(); ++i) {
    for (std::size_t j : successors[i]) inst.precedences.emplace_back(i, j);
  }
  default_horizon(inst);
  validate(inst);
  return inst;
}

RcpspInstance parse_patterson_text(const std::string& text) {
  std::istringstream in(text);
  return parse_patterson(in);
}

RcpspInstance parse_patterson_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file: " + path);
  return parse_patterson(in);
}

RcpspInstance parse_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad json instance: ") + e.what());
  }
  RcpspInstance inst;
  try {
    for (const auto& t : j.at("tasks")) {
      Task task;
      task.duration = t.at("duration").get<std::int32_t>();
      if (t.contains("usages")) task.usages = t.at("usages").get<std::vector<std::int32_t>>();
      inst.tasks.push_back(std::move(task));
    }
    inst.capacities = j.value("capacities", std::vector<std::int32_t>{});
    for (Task& t : inst.tasks) t.usages.resize(inst.capacities.size(), 0);
    for (const auto& p : j.value("precedences", std::vector<std::vector<std::size_t>>{})) {
      if (p.size() != 2) throw ParseError("precedence entries must be pairs");
      inst.precedences.emplace_back(p[0], p[1]);
    }
    if (j.contains("horizon")) inst.horizon = j.at("horizon").get<std::int32_t>();
    else default_horizon(inst);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad json instance: ") + e.what());
  }
  validate(inst);
  return inst;
}

RcpspInstance parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str());
}

RcpspModel build_model(const RcpspInstance& inst) {
  const std::size_t n = inst.task_count();
  RcpspModel model;
  SchemaBuilder schema;

  if (n == 0) {
    // Degenerate instance: a lone zero makespan.
    model.objective = schema.add_cell("makespan", Kind::Interval);
    std::vector<GuardedCommand> cmds =
        gnf(tell_const(model.objective, LatticeValue::interval(0, 0)), schema.peek());
    model.schema = schema.share();
    model.props = std::move(cmds);
    return model;
  }

  const std::int32_t h = inst.horizon;
  for (std::size_t i = 0; i < n; ++i) {
    model.starts.push_back(schema.add_cell("s" + std::to_string(i + 1), Kind::Interval));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      model.overlaps.push_back(
          schema.add_cell("b" + std::to_string(i + 1) + "_" + std::to_string(j + 1),
                          Kind::Interval));
    }
  }

  std::vector<Process> init;
  for (std::size_t i = 0; i < n; ++i) {
    init.push_back(tell_const(model.starts[i], LatticeValue::interval(0, h)));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      init.push_back(tell_const(model.overlaps[i * n + j], LatticeValue::interval(0, 1)));
    }
  }
  // A running task overlaps its own start; a zero-duration task never runs,
  // so its whole overlap row folds to 0 (s_i <= s_j < s_i + 0 has no
  // solutions) and needs no reification.
  for (std::size_t i = 0; i < n; ++i) {
    const bool runs = inst.tasks[i].duration > 0;
    if (runs) {
      init.push_back(tell_const(model.overlaps[i * n + i], LatticeValue::interval(1, 1)));
    } else {
      for (std::size_t j = 0; j < n; ++j) {
        init.push_back(tell_const(model.overlaps[i * n + j], LatticeValue::interval(0, 0)));
      }
    }
  }
  std::vector<GuardedCommand> props = gnf(par(std::move(init)), schema.peek());

  auto append = [&props](Propagator p) {
    props.insert(props.end(), std::make_move_iterator(p.commands.begin()),
                 std::make_move_iterator(p.commands.end()));
  };

  for (const auto& [i, j] : inst.precedences) {
    append(compile(precedes(Operand::v(model.starts[i]), inst.tasks[i].duration,
                            Operand::v(model.starts[j])),
                   schema));
  }

  // b_ij <-> (s_i <= s_j and s_j < s_i + d_i), for i != j and running i.
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j || inst.tasks[i].duration == 0) continue;
      const Slot si = model.starts[i];
      const Slot sj = model.starts[j];
      const Constraint overlap =
          and_c(leq(Operand::v(si), Operand::v(sj)),
                leq_offset(Operand::v(sj), 1 - inst.tasks[i].duration, Operand::v(si)));
      append(compile_reified(model.overlaps[i * n + j], overlap, schema));
    }
  }

  // Per resource and task: the tasks overlapping j's start fit the capacity.
  for (std::size_t k = 0; k < inst.resource_count(); ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::pair<std::int32_t, Slot>> terms;
      for (std::size_t i = 0; i < n; ++i) {
        const std::int32_t r = inst.tasks[i].usages[k];
        if (r > 0) terms.emplace_back(r, model.overlaps[i * n + j]);
      }
      if (terms.empty()) continue;
      append(compile(linear_leq(std::move(terms), inst.capacities[k]), schema));
    }
  }

  // The sink dummy is the job every task precedes; its start is the makespan.
  model.objective = model.starts[n - 1];
  model.search_vars = model.starts;
  model.schema = schema.share();
  finalize_all(props, *model.schema);
  model.props = std::move(props);
  return model;
}

bool check_solution(const RcpspInstance& inst, const std::vector<std::int32_t>& starts) {
  const std::size_t n = inst.task_count();
  if (starts.size() != n) throw ModelError("check_solution: one start per task required");
  for (std::size_t i = 0; i < n; ++i) {
    if (starts[i] < 0) return false;
  }
  for (const auto& [i, j] : inst.precedences) {
    if (starts[i] + inst.tasks[i].duration > starts[j]) return false;
  }
  std::int64_t end = 0;
  for (std::size_t i = 0; i < n; ++i) {
    end = std::max<std::int64_t>(end, std::int64_t{starts[i]} + inst.tasks[i].duration);
  }
  for (std::size_t k = 0; k < inst.resource_count(); ++k) {
    for (std::int64_t t = 0; t < end; ++t) {
      std::int64_t load = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (starts[i] <= t && t < starts[i] + inst.tasks[i].duration) {
          load += inst.tasks[i].usages[k];
        }
      }
      if (load > inst.capacities[k]) return false;
    }
  }
  return true;
}

std::vector<std::int32_t> extract_starts(const RcpspModel& model,
                                         const std::vector<LatticeValue>& snapshot) {
  std::vector<std::int32_t> starts;
  starts.reserve(model.starts.size());
  for (Slot s : model.starts) {
    const LatticeValue v = snapshot.at(static_cast<std::size_t>(s));
    if (v.lo != v.hi) throw ModelError("extract_starts: start cell is not a singleton");
    starts.push_back(v.lo);
  }
  return starts;
}

} // namespace pccp::rcpsp
