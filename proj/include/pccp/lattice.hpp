#ifndef PCCP_LATTICE_HPP
#define PCCP_LATTICE_HPP

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace pccp {

/** Primitive lattice kinds plus the interval product lattice.
 *
 * ZInc orders integers upward (join = max), ZDec is its dual (join = min).
 * BInc is the Boolean chain false <= true, BDec the reverse.
 * Interval is ZInc x ZDec: a pair (lb, ub) shrinking toward a singleton. */
enum class Kind : std::uint8_t { ZInc, ZDec, BInc, BDec, Interval };

/** Sentinels for -inf / +inf. The finite universe is every other int32 value. */
inline constexpr std::int32_t kNegInf = std::numeric_limits<std::int32_t>::min();
inline constexpr std::int32_t kPosInf = std::numeric_limits<std::int32_t>::max();

/** Thrown when a value's lattice tag does not match the cell it is used with.
 * This is a programming bug, never a solver state. */
class SchemaError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

class ModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/** True if the scalar kind orders values upward (join = max). */
constexpr bool kind_is_up(Kind k) { return k == Kind::ZInc || k == Kind::BInc; }
constexpr bool kind_is_scalar(Kind k) { return k != Kind::Interval; }

/** Bottom/top of the scalar kinds, as raw words. */
constexpr std::int32_t scalar_bot(Kind k) {
  switch (k) {
    case Kind::ZInc: return kNegInf;
    case Kind::ZDec: return kPosInf;
    case Kind::BInc: return 0;
    case Kind::BDec: return 1;
    default: return 0;
  }
}
constexpr std::int32_t scalar_top(Kind k) {
  switch (k) {
    case Kind::ZInc: return kPosInf;
    case Kind::ZDec: return kNegInf;
    case Kind::BInc: return 1;
    case Kind::BDec: return 0;
    default: return 0;
  }
}

/** One element of one lattice. Scalars use `lo`; Interval uses (lo, hi). */
struct LatticeValue {
  Kind kind = Kind::ZInc;
  std::int32_t lo = 0;
  std::int32_t hi = 0;

  static LatticeValue zinc(std::int32_t v) { return {Kind::ZInc, v, 0}; }
  static LatticeValue zdec(std::int32_t v) { return {Kind::ZDec, v, 0}; }
  static LatticeValue binc(bool v) { return {Kind::BInc, v ? 1 : 0, 0}; }
  static LatticeValue bdec(bool v) { return {Kind::BDec, v ? 1 : 0, 0}; }
  static LatticeValue interval(std::int32_t lb, std::int32_t ub) {
    return {Kind::Interval, lb, ub};
  }
  static LatticeValue bot(Kind k);
  static LatticeValue top(Kind k);
};

LatticeValue join(const LatticeValue& a, const LatticeValue& b);

/** Partial-order test: a <= b iff join(a, b) = b. Interval upper bounds compare dually. */
bool leq(const LatticeValue& a, const LatticeValue& b);

bool is_top(const LatticeValue& v);
bool is_bot(const LatticeValue& v);

/** All empty intervals denote the same set; map them to one representative
 * so equality and hashing agree with the lattice. */
LatticeValue canonical(const LatticeValue& v);

/** Canonical equality (empty intervals compare equal). */
bool equal(const LatticeValue& a, const LatticeValue& b);

std::string to_string(const LatticeValue& v);

/** Saturating arithmetic over lattice words: sentinels absorb, finite
 * overflow saturates to the matching sentinel. Monotone in both arguments. */
std::int32_t sat_add(std::int32_t a, std::int32_t b);
std::int32_t sat_sub(std::int32_t a, std::int32_t b);
std::int32_t sat_mul(std::int32_t coef, std::int32_t v);
std::int32_t sat_neg(std::int32_t v);

} // namespace pccp

#endif
