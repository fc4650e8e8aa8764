#ifndef PCCP_STORE_HPP
#define PCCP_STORE_HPP

#include <atomic>
#include <cassert>
#include <memory>
#include <string>
#include <vector>

#include "pccp/lattice.hpp"

namespace pccp {

/** Index of a variable in the store schema ("cell-index"). Negative values are
 * local placeholders that only exist before erase_locals has run. */
using Slot = std::int32_t;

/** Index of one atomic machine word inside a store. An Interval slot owns two
 * words (lb then ub); scalar slots own one. */
using Word = std::uint32_t;

struct SlotInfo {
  std::string name;
  Kind kind = Kind::ZInc;
  Word word = 0; // first word of the slot
};

/** Immutable cell layout shared by every store of one model. */
class Schema {
public:
  Slot slot_count() const { return static_cast<Slot>(slots_.size()); }
  Word word_count() const { return word_count_; }
  const SlotInfo& slot(Slot s) const { return slots_.at(static_cast<std::size_t>(s)); }
  Kind kind(Slot s) const { return slot(s).kind; }
  const std::string& name(Slot s) const { return slot(s).name; }
  Word first_word(Slot s) const { return slot(s).word; }
  bool word_is_up(Word w) const { return word_up_[w]; }

private:
  friend class SchemaBuilder;
  std::vector<SlotInfo> slots_;
  std::vector<bool> word_up_;
  Word word_count_ = 0;
};

class SchemaBuilder {
public:
  SchemaBuilder() : schema_(std::make_shared<Schema>()) {}

  Slot add_cell(std::string name, Kind kind);
  Slot slot_count() const { return schema_->slot_count(); }
  const Schema& peek() const { return *schema_; }

  /** Freezes the schema. The builder stays usable: later add_cell calls keep
   * extending the same shared schema object (stores created before an
   * extension must not be reused after it). */
  std::shared_ptr<const Schema> share() const { return schema_; }

private:
  std::shared_ptr<Schema> schema_;
};

/** The single shared state of a PCCP program: a fixed-length Cartesian
 * product of atomic lattice cells.
 *
 * Cells only evolve upward in their lattice order. All cross-thread mutation
 * goes through join_word/join_in_place, which use a relaxed compare-exchange
 * loop so a concurrent stronger value is never overwritten by a weaker one.
 * There are no locks; correctness relies on monotone updates and eventual
 * visibility only. */
class Store {
public:
  explicit Store(std::shared_ptr<const Schema> schema);

  const Schema& schema() const { return *schema_; }
  std::shared_ptr<const Schema> schema_ptr() const { return schema_; }
  Slot slot_count() const { return schema_->slot_count(); }

  // Word-level access (propagation hot path; bounds resolved at compile time).
  std::int32_t load_word(Word w) const {
    return words_[w].load(std::memory_order_relaxed);
  }
  /** Plain overwrite of one word. Single-owner use only (model checking,
   * store initialization); concurrent propagation must join instead. */
  void store_word(Word w, std::int32_t v) {
    words_[w].store(v, std::memory_order_relaxed);
  }

  /** Joins `v` into word `w`; returns true iff the word strictly increased. */
  bool join_word(Word w, std::int32_t v) {
    std::atomic<std::int32_t>& cell = words_[w];
    const bool up = schema_->word_is_up(w);
    std::int32_t cur = cell.load(std::memory_order_relaxed);
    while (up ? v > cur : v < cur) {
      if (cell.compare_exchange_weak(cur, v, std::memory_order_relaxed)) return true;
    }
    return false;
  }

  // Slot-level access.
  LatticeValue get(Slot s) const;
  /** Joins `v` into cell `s`; returns true iff the cell strictly increased. */
  bool join_in_place(Slot s, const LatticeValue& v);

  /** A failure is a fixpoint on top: an empty interval or a scalar cell at
   * its top sentinel anywhere in the store. */
  bool is_failed() const;

  /** Canonicalized copy of all cells (empty intervals collapse to one
   * representative), for equality, hashing and cross-engine comparison. */
  std::vector<LatticeValue> snapshot() const;

  /** Overwrites this store's cells with `other`'s. Requires the same schema.
   * Not safe concurrently with writers to either store. */
  void copy_from(const Store& other);

  /** Resets every cell to bottom. */
  void reset();

private:
  std::shared_ptr<const Schema> schema_;
  std::unique_ptr<std::atomic<std::int32_t>[]> words_;
};

bool snapshots_equal(const std::vector<LatticeValue>& a, const std::vector<LatticeValue>& b);

} // namespace pccp

#endif
