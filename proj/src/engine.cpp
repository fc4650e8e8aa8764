#include "pccp/engine.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <numeric>
#include <random>
#include <thread>
#include <vector>

namespace pccp {

EngineResult run_sequential(std::span<const GuardedCommand> gc, Store& s,
                            const RoundObserver& observer) {
  EngineResult r;
  bool changed = true;
  while (changed) {
    changed = false;
    ++r.iterations;
    for (const GuardedCommand& cmd : gc) {
      if (!cmd.guards_hold(s)) continue;
      ++r.applications;
      changed |= cmd.apply(s);
    }
    if (observer) observer(s);
    if (s.is_failed()) {
      r.status = Status::Failed;
      return r;
    }
  }
  return r;
}

EngineResult run_fair(std::span<const GuardedCommand> gc, Store& s, std::uint64_t seed,
                      const RoundObserver& observer) {
  EngineResult r;
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(gc.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  bool changed = true;
  while (changed) {
    changed = false;
    ++r.iterations;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      const GuardedCommand& cmd = gc[i];
      if (!cmd.guards_hold(s)) continue;
      ++r.applications;
      changed |= cmd.apply(s);
    }
    if (observer) observer(s);
    if (s.is_failed()) {
      r.status = Status::Failed;
      return r;
    }
  }
  return r;
}

namespace {

/** Scans slots t, t+stride, ... for an empty interval or a scalar at top. */
bool slice_failed(const Store& s, unsigned first, unsigned stride) {
  const Schema& schema = s.schema();
  const Slot n = schema.slot_count();
  for (Slot i = static_cast<Slot>(first); i < n; i += static_cast<Slot>(stride)) {
    const SlotInfo& info = schema.slot(i);
    if (info.kind == Kind::Interval) {
      if (s.load_word(info.word) > s.load_word(info.word + 1)) return true;
    } else if (s.load_word(info.word) == scalar_top(info.kind)) {
      return true;
    }
  }
  return false;
}

} // namespace

EngineResult run_parallel(std::span<const GuardedCommand> gc, Store& s, unsigned workers) {
  if (workers < 1) throw ModelError("run_parallel: workers must be >= 1");
  EngineResult result;

  // Past / present / future change flags, as in the eventless propagation
  // loop: continue while slot (i-1)%3 is set, set slot i%3 on change, clear
  // slot (i+1)%3, then all workers synchronize once per iteration.
  //
  // Failure detection gets the same 3-slot treatment: round i records a
  // failed slice in fail_ring[i%3] and the exit decision for round i+1 reads
  // that slot. Decision slots are never written by the round in progress, so
  // every worker computes the same exit decision and nobody strands the
  // others at the rendezvous. fail_ring needs no clearing: a set slot exits
  // the loop before the slot could ever be reused.
  std::atomic<bool> has_changed[3] = {true, false, false};
  std::atomic<bool> fail_ring[3] = {false, false, false};
  std::atomic<std::uint64_t> applications{0};
  std::barrier<> sync(static_cast<std::ptrdiff_t>(workers));

  auto worker = [&](unsigned tid) {
    std::uint64_t local_apps = 0;
    std::uint64_t rounds = 0;
    for (std::uint64_t i = 1;; ++i) {
      if (!has_changed[(i - 1) % 3].load(std::memory_order_relaxed) ||
          fail_ring[(i - 1) % 3].load(std::memory_order_relaxed)) {
        break;
      }
      ++rounds;
      for (std::size_t t = tid; t < gc.size(); t += workers) {
        const GuardedCommand& cmd = gc[t];
        if (!cmd.guards_hold(s)) continue;
        ++local_apps;
        if (cmd.apply(s)) has_changed[i % 3].store(true, std::memory_order_relaxed);
      }
      has_changed[(i + 1) % 3].store(false, std::memory_order_relaxed);
      if (slice_failed(s, tid, workers)) fail_ring[i % 3].store(true, std::memory_order_relaxed);
      sync.arrive_and_wait();
    }
    applications.fetch_add(local_apps, std::memory_order_relaxed);
    if (tid == 0) result.iterations = rounds;
  };

  if (workers == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker, w);
    for (std::thread& t : pool) t.join();
  }

  result.applications = applications.load();
  result.status = s.is_failed() ? Status::Failed : Status::Fixpoint;
  return result;
}

bool denotational_round(std::span<const GuardedCommand> gc, Store& s) {
  Store frozen(s.schema_ptr());
  frozen.copy_from(s);
  bool changed = false;
  for (const GuardedCommand& cmd : gc) {
    if (!cmd.guards_hold(frozen)) continue;
    const LatticeValue v = cmd.fn.eval(cmd.target_kind, frozen);
    changed |= s.join_in_place(cmd.target, v);
  }
  return changed;
}

} // namespace pccp
