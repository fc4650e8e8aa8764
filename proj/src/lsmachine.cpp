#include "pccp/lsmachine.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace pccp::ls {

namespace {

std::vector<Word> words_of(const std::vector<CellRef>& refs, const Schema& schema) {
  std::vector<Word> out;
  for (const CellRef& r : refs) out.push_back(resolve_word(r, schema));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

} // namespace

LSProgram compile_ls(const GuardedCommand& gc, const Schema& schema, std::size_t max_reads) {
  if (schema.kind(gc.target) == Kind::Interval) {
    throw ModelError("compile_ls: interval targets are two scalar cells; compile each bound");
  }
  LSProgram p;
  p.command = &gc;
  p.target = schema.first_word(gc.target);

  std::vector<CellRef> guard_refs;
  for (const Pred& g : gc.guards) {
    for (const Term& t : g.lhs.terms) guard_refs.push_back(t.ref);
    if (g.generic) throw ModelError("compile_ls: generic guard predicates are not loadable");
  }
  p.guard_loads = words_of(guard_refs, schema);
  p.value_loads = words_of(gc.fn.reads(), schema);
  if (p.load_count() > max_reads) {
    throw ModelError("compile_ls: read set exceeds the desk-scale bound");
  }
  std::ostringstream name;
  name << "gc(" << schema.name(gc.target) << ")";
  p.name = name.str();
  return p;
}

namespace {

/** Load slots of one thread: guard loads, then value loads, then the target. */
struct Layout {
  std::vector<Word> loads; // slot -> word
  std::size_t guard_count = 0;
  std::size_t value_count = 0;
  std::size_t x_slot = 0;
};

Layout layout_of(const LSProgram& p) {
  Layout l;
  l.loads = p.guard_loads;
  l.loads.insert(l.loads.end(), p.value_loads.begin(), p.value_loads.end());
  l.loads.push_back(p.target);
  l.guard_count = p.guard_loads.size();
  l.value_count = p.value_loads.size();
  l.x_slot = l.loads.size() - 1;
  return l;
}

struct ThreadState {
  std::uint32_t loaded = 0; // bitmask over load slots, this round
  std::uint32_t ever = 0;   // slots loaded at least once on this path
  std::vector<std::int32_t> regs;
  std::uint8_t productive = 0;
  bool at_loop_head = true;

  bool operator==(const ThreadState&) const = default;
};

struct State {
  std::vector<std::int32_t> words;
  std::vector<ThreadState> threads;

  bool operator==(const State&) const = default;
};

struct StateHash {
  std::size_t operator()(const State& s) const {
    std::size_t h = 1469598103934665603ull;
    auto mix = [&h](std::size_t v) {
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    for (std::int32_t w : s.words) mix(static_cast<std::size_t>(static_cast<std::uint32_t>(w)));
    for (const ThreadState& t : s.threads) {
      mix(t.loaded);
      mix(t.ever);
      mix(t.at_loop_head ? 1 : 0);
      mix(t.productive);
      for (std::int32_t r : t.regs) mix(static_cast<std::size_t>(static_cast<std::uint32_t>(r)));
    }
    return h;
  }
};

class Explorer {
public:
  Explorer(const std::vector<LSProgram>& programs, const Store& s0, const LsOptions& opts)
      : programs_(programs), opts_(opts), schema_(s0.schema_ptr()), scratch_(schema_) {
    for (const LSProgram& p : programs_) layouts_.push_back(layout_of(p));
    for (Word w = 0; w < schema_->word_count(); ++w) init_words_.push_back(s0.load_word(w));
    compute_fix(s0);
  }

  ExploreReport run() {
    State initial;
    initial.words = init_words_;
    initial.threads.resize(programs_.size());
    for (std::size_t t = 0; t < programs_.size(); ++t) {
      initial.threads[t].regs.assign(layouts_[t].loads.size(), 0);
    }
    push_state(std::move(initial), SIZE_MAX, "");

    while (!worklist_.empty() && !report_.bound_exceeded) {
      const std::size_t id = worklist_.back();
      worklist_.pop_back();
      expand(id);
    }

    for (const auto& words : terminals_) report_.terminal_stores.push_back(words);
    report_.states_visited = states_.size();
    return report_;
  }

private:
  struct StoredState {
    State state;
    std::size_t parent;
    std::string label;
  };

  void compute_fix(const Store& s0) {
    Store fix_store(schema_);
    fix_store.copy_from(s0);
    std::vector<GuardedCommand> cmds;
    for (const LSProgram& p : programs_) cmds.push_back(*p.command);
    run_sequential(cmds, fix_store);
    for (Word w = 0; w < schema_->word_count(); ++w) {
      report_.fix_words.push_back(fix_store.load_word(w));
    }
  }

  bool word_leq(Word w, std::int32_t a, std::int32_t b) const {
    return schema_->word_is_up(w) ? a <= b : a >= b;
  }

  bool store_leq_fix(const std::vector<std::int32_t>& words) const {
    for (Word w = 0; w < words.size(); ++w) {
      if (!word_leq(w, words[w], report_.fix_words[w])) return false;
    }
    return true;
  }

  std::string trace_of(std::size_t id) const {
    std::vector<std::string> labels;
    for (std::size_t cur = id; cur != SIZE_MAX; cur = states_[cur].parent) {
      if (!states_[cur].label.empty()) labels.push_back(states_[cur].label);
    }
    std::reverse(labels.begin(), labels.end());
    std::ostringstream os;
    for (const std::string& l : labels) os << l << "; ";
    return os.str();
  }

  void push_state(State s, std::size_t parent, std::string label) {
    if (states_.size() >= opts_.max_states) {
      report_.bound_exceeded = true;
      return;
    }
    auto [it, inserted] = seen_.emplace(s, states_.size());
    if (!inserted) return;
    if (!store_leq_fix(s.words) && !report_.soundness_violated) {
      report_.soundness_violated = true;
      report_.violation_trace = trace_of(parent) + label + " -> store above fix";
    }
    states_.push_back(StoredState{std::move(s), parent, std::move(label)});
    worklist_.push_back(states_.size() - 1);
  }

  // Evaluates guards / fn of program t against this thread's registers.
  void fill_scratch(const Layout& l, const ThreadState& ts) {
    for (std::size_t i = 0; i < l.loads.size(); ++i) {
      scratch_.store_word(l.loads[i], ts.regs[i]);
    }
  }

  bool guards_pass(std::size_t t, const ThreadState& ts) {
    fill_scratch(layouts_[t], ts);
    return programs_[t].command->guards_hold(scratch_);
  }

  std::int32_t compute_rf(std::size_t t, const ThreadState& ts) {
    fill_scratch(layouts_[t], ts);
    const GuardedCommand& gc = *programs_[t].command;
    const LatticeValue v = gc.fn.eval(gc.target_kind, scratch_);
    return v.lo;
  }

  bool all_guards_loaded(const Layout& l, const ThreadState& ts) const {
    for (std::size_t i = 0; i < l.guard_count; ++i) {
      if (!(ts.loaded & (1u << i))) return false;
    }
    return true;
  }
  bool all_values_loaded(const Layout& l, const ThreadState& ts) const {
    for (std::size_t i = l.guard_count; i < l.guard_count + l.value_count; ++i) {
      if (!(ts.loaded & (1u << i))) return false;
    }
    return true;
  }
  bool x_loaded(const Layout& l, const ThreadState& ts) const {
    return ts.loaded & (1u << l.x_slot);
  }

  /** A thread's whole round executed atomically against `words`: returns the
   * stored value, or nothing when the round would not store. */
  std::optional<std::pair<Word, std::int32_t>> solo_round(std::size_t t,
                                                          const std::vector<std::int32_t>& words) {
    const Layout& l = layouts_[t];
    ThreadState ts;
    ts.regs.resize(l.loads.size());
    for (std::size_t i = 0; i < l.loads.size(); ++i) {
      ts.regs[i] = words[l.loads[i]];
      ts.loaded |= (1u << i);
    }
    if (!guards_pass(t, ts)) return std::nullopt;
    const std::int32_t rx = ts.regs[l.x_slot];
    const std::int32_t rf = compute_rf(t, ts);
    const Word xw = l.loads[l.x_slot];
    const std::int32_t ox =
        opts_.overwrite_store ? rf
                              : (word_leq(xw, rf, rx) ? rx : rf); // rx join rf
    const bool bx = opts_.skip_increase_guard ? true : ox != rx;
    if (!bx) return std::nullopt;
    return std::make_pair(xw, ox);
  }

  bool quiescent(const State& s) {
    for (const ThreadState& ts : s.threads) {
      if (!ts.at_loop_head) return false;
    }
    for (std::size_t t = 0; t < programs_.size(); ++t) {
      const auto stored = solo_round(t, s.words);
      if (stored && s.words[stored->first] != stored->second) return false;
    }
    return true;
  }

  /** Shared-access steps the thread may take next. In relaxed mode any
   * pending load is ready (the program order of the guarded-command listing
   * only forces loads before the computes that consume them and the store
   * last); in strict mode the listing order is followed. */
  std::vector<std::size_t> ready_loads(std::size_t t, const ThreadState& ts) const {
    const Layout& l = layouts_[t];
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < l.loads.size(); ++i) {
      if (ts.loaded & (1u << i)) continue;
      out.push_back(i);
      if (opts_.strict_po) break; // only the first pending load
    }
    return out;
  }

  void expand(std::size_t id) {
    const State snapshot = states_[id].state; // copy: states_ may reallocate
    if (quiescent(snapshot)) {
      terminals_.insert(snapshot.words);
      return;
    }
    for (std::size_t t = 0; t < snapshot.threads.size(); ++t) {
      const ThreadState& ts = snapshot.threads[t];
      if (ts.at_loop_head) {
        // Begin a round: the first shared access happens in a child step.
        State next = snapshot;
        ThreadState& nt = next.threads[t];
        nt.at_loop_head = false;
        nt.loaded = 0;
        push_state(std::move(next), id, label(t, "round start"));
        continue;
      }
      for (std::size_t slot : ready_loads(t, ts)) {
        step_load(id, snapshot, t, slot);
      }
      try_store(id, snapshot, t);
    }
  }

  std::string label(std::size_t t, const std::string& what) const {
    return "T" + std::to_string(t) + ": " + what;
  }

  void step_load(std::size_t id, const State& snapshot, std::size_t t, std::size_t slot) {
    const Layout& l = layouts_[t];
    State next = snapshot;
    ThreadState& nt = next.threads[t];
    const Word w = l.loads[slot];
    const std::int32_t v = next.words[w];
    // A register loaded from a monotone cell may only grow across rounds;
    // the overwrite mutant legitimately breaks this.
    if ((nt.ever & (1u << slot)) && !word_leq(w, nt.regs[slot], v)) {
      report_.registers_monotone = false;
    }
    nt.regs[slot] = v;
    nt.loaded |= (1u << slot);
    nt.ever |= (1u << slot);
    round_epilogue(t, nt);
    push_state(std::move(next), id,
               label(t, "L w" + std::to_string(w) + " -> " + std::to_string(v)));
  }

  /** Local computes and early round exits that follow deterministically from
   * the registers: a failed guard test aborts the round; a complete set of
   * loads with bx false finishes it without a store. */
  void round_epilogue(std::size_t t, ThreadState& ts) {
    const Layout& l = layouts_[t];
    if (all_guards_loaded(l, ts) && !guards_pass(t, ts)) {
      ts.at_loop_head = true;
      return;
    }
    if (all_guards_loaded(l, ts) && all_values_loaded(l, ts) && x_loaded(l, ts)) {
      const std::int32_t rx = ts.regs[l.x_slot];
      const std::int32_t rf = compute_rf(t, ts);
      const Word xw = l.loads[l.x_slot];
      const std::int32_t ox = opts_.overwrite_store ? rf : (word_leq(xw, rf, rx) ? rx : rf);
      const bool bx = opts_.skip_increase_guard ? true : ox != rx;
      if (!bx) ts.at_loop_head = true; // no store: round over
    }
  }

  void try_store(std::size_t id, const State& snapshot, std::size_t t) {
    const Layout& l = layouts_[t];
    const ThreadState& ts = snapshot.threads[t];
    if (!all_guards_loaded(l, ts) || !all_values_loaded(l, ts) || !x_loaded(l, ts)) return;
    if (!guards_pass(t, ts)) return;
    const std::int32_t rx = ts.regs[l.x_slot];
    const std::int32_t rf = compute_rf(t, ts);
    const Word xw = l.loads[l.x_slot];
    const std::int32_t ox = opts_.overwrite_store ? rf : (word_leq(xw, rf, rx) ? rx : rf);
    const bool bx = opts_.skip_increase_guard ? true : ox != rx;
    if (!bx) return; // epilogue already closed the round

    State next = snapshot;
    ThreadState& nt = next.threads[t];
    const bool changes = next.words[xw] != ox;
    next.words[xw] = ox;
    nt.at_loop_head = true;
    if (changes) {
      if (nt.productive >= opts_.max_rounds) {
        report_.bound_exceeded = true;
        return;
      }
      ++nt.productive;
    }
    push_state(std::move(next), id,
               label(t, "S w" + std::to_string(xw) + " = " + std::to_string(ox)));
  }

  const std::vector<LSProgram>& programs_;
  LsOptions opts_;
  std::shared_ptr<const Schema> schema_;
  Store scratch_;
  std::vector<Layout> layouts_;
  std::vector<std::int32_t> init_words_;

  std::vector<StoredState> states_;
  std::unordered_map<State, std::size_t, StateHash> seen_;
  std::vector<std::size_t> worklist_;
  std::set<std::vector<std::int32_t>> terminals_;
  ExploreReport report_;
};

} // namespace

ExploreReport explore(const std::vector<LSProgram>& programs, const Store& s0,
                      const LsOptions& opts) {
  if (programs.empty()) {
    ExploreReport r;
    for (Word w = 0; w < s0.schema().word_count(); ++w) {
      r.fix_words.push_back(s0.load_word(w));
    }
    r.terminal_stores.push_back(r.fix_words);
    r.states_visited = 1;
    return r;
  }
  Explorer ex(programs, s0, opts);
  return ex.run();
}

TheoremReport check_theorems(const std::vector<LSProgram>& programs, const Store& s0,
                             const LsOptions& opts) {
  TheoremReport report;
  report.detail = explore(programs, s0, opts);
  const ExploreReport& d = report.detail;
  report.soundness = !d.soundness_violated;
  report.completeness = !d.bound_exceeded && d.terminal_stores.size() == 1 &&
                        d.terminal_stores.front() == d.fix_words;
  return report;
}

} // namespace pccp::ls
