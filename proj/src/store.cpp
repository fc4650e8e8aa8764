#include "pccp/store.hpp"

namespace pccp {

Slot SchemaBuilder::add_cell(std::string name, Kind kind) {
  Schema& s = *schema_;
  SlotInfo info;
  info.name = std::move(name);
  info.kind = kind;
  info.word = s.word_count_;
  s.slots_.push_back(std::move(info));
  if (kind == Kind::Interval) {
    s.word_up_.push_back(true);  // lb is ZInc
    s.word_up_.push_back(false); // ub is ZDec
    s.word_count_ += 2;
  } else {
    s.word_up_.push_back(kind_is_up(kind));
    s.word_count_ += 1;
  }
  return s.slot_count() - 1;
}

Store::Store(std::shared_ptr<const Schema> schema) : schema_(std::move(schema)) {
  const Word n = schema_->word_count();
  words_ = std::make_unique<std::atomic<std::int32_t>[]>(n);
  reset();
}

void Store::reset() {
  for (Slot s = 0; s < slot_count(); ++s) {
    const SlotInfo& info = schema_->slot(s);
    if (info.kind == Kind::Interval) {
      words_[info.word].store(kNegInf, std::memory_order_relaxed);
      words_[info.word + 1].store(kPosInf, std::memory_order_relaxed);
    } else {
      words_[info.word].store(scalar_bot(info.kind), std::memory_order_relaxed);
    }
  }
}

LatticeValue Store::get(Slot s) const {
  const SlotInfo& info = schema_->slot(s);
  if (info.kind == Kind::Interval) {
    // Two independent relaxed loads: the bounds may be observed at different
    // instants, which is safe because each evolves monotonically.
    return LatticeValue::interval(load_word(info.word), load_word(info.word + 1));
  }
  return {info.kind, load_word(info.word), 0};
}

bool Store::join_in_place(Slot s, const LatticeValue& v) {
  const SlotInfo& info = schema_->slot(s);
  if (v.kind != info.kind) {
    throw SchemaError("join_in_place: cell '" + info.name + "' is " +
                      to_string(LatticeValue::bot(info.kind)) + " but value is " + to_string(v));
  }
  if (info.kind == Kind::Interval) {
    const bool c1 = join_word(info.word, v.lo);
    const bool c2 = join_word(info.word + 1, v.hi);
    return c1 || c2;
  }
  return join_word(info.word, v.lo);
}

bool Store::is_failed() const {
  for (Slot s = 0; s < slot_count(); ++s) {
    const SlotInfo& info = schema_->slot(s);
    if (info.kind == Kind::Interval) {
      if (load_word(info.word) > load_word(info.word + 1)) return true;
    } else if (load_word(info.word) == scalar_top(info.kind)) {
      return true;
    }
  }
  return false;
}

std::vector<LatticeValue> Store::snapshot() const {
  std::vector<LatticeValue> out;
  out.reserve(static_cast<std::size_t>(slot_count()));
  for (Slot s = 0; s < slot_count(); ++s) out.push_back(canonical(get(s)));
  return out;
}

void Store::copy_from(const Store& other) {
  assert(schema_.get() == other.schema_.get() ||
         schema_->word_count() == other.schema_->word_count());
  const Word n = schema_->word_count();
  for (Word w = 0; w < n; ++w) {
    words_[w].store(other.words_[w].load(std::memory_order_relaxed),
                    std::memory_order_relaxed);
  }
}

bool snapshots_equal(const std::vector<LatticeValue>& a, const std::vector<LatticeValue>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!equal(a[i], b[i])) return false;
  }
  return true;
}

} // namespace pccp
