#include "pccp/lattice.hpp"

#include <algorithm>
#include <sstream>

namespace pccp {

namespace {

constexpr std::int64_t kWideInf = std::int64_t{1} << 40;

std::int64_t widen(std::int32_t v) {
  if (v == kPosInf) return kWideInf;
  if (v == kNegInf) return -kWideInf;
  return v;
}

std::int32_t narrow(std::int64_t v) {
  if (v >= kPosInf) return kPosInf;
  if (v <= kNegInf) return kNegInf;
  return static_cast<std::int32_t>(v);
}

void check_same_kind(const LatticeValue& a, const LatticeValue& b) {
  if (a.kind != b.kind) {
    throw SchemaError("lattice tag mismatch: " + to_string(a) + " vs " + to_string(b));
  }
}

std::int32_t scalar_join(Kind k, std::int32_t a, std::int32_t b) {
  return kind_is_up(k) ? std::max(a, b) : std::min(a, b);
}

bool scalar_leq(Kind k, std::int32_t a, std::int32_t b) {
  return kind_is_up(k) ? a <= b : a >= b;
}

} // namespace

LatticeValue LatticeValue::bot(Kind k) {
  if (k == Kind::Interval) return interval(kNegInf, kPosInf);
  return {k, scalar_bot(k), 0};
}

LatticeValue LatticeValue::top(Kind k) {
  if (k == Kind::Interval) return interval(kPosInf, kNegInf);
  return {k, scalar_top(k), 0};
}

LatticeValue join(const LatticeValue& a, const LatticeValue& b) {
  check_same_kind(a, b);
  if (a.kind == Kind::Interval) {
    return LatticeValue::interval(std::max(a.lo, b.lo), std::min(a.hi, b.hi));
  }
  return {a.kind, scalar_join(a.kind, a.lo, b.lo), 0};
}

bool leq(const LatticeValue& a, const LatticeValue& b) {
  check_same_kind(a, b);
  if (a.kind == Kind::Interval) {
    if (is_top(b)) return true;
    if (is_top(a)) return false;
    return a.lo <= b.lo && a.hi >= b.hi;
  }
  return scalar_leq(a.kind, a.lo, b.lo);
}

bool is_top(const LatticeValue& v) {
  if (v.kind == Kind::Interval) return v.lo > v.hi;
  return v.lo == scalar_top(v.kind);
}

bool is_bot(const LatticeValue& v) {
  if (v.kind == Kind::Interval) return v.lo == kNegInf && v.hi == kPosInf;
  return v.lo == scalar_bot(v.kind);
}

LatticeValue canonical(const LatticeValue& v) {
  if (v.kind == Kind::Interval && v.lo > v.hi) return LatticeValue::top(Kind::Interval);
  return v;
}

bool equal(const LatticeValue& a, const LatticeValue& b) {
  if (a.kind != b.kind) return false;
  const LatticeValue ca = canonical(a);
  const LatticeValue cb = canonical(b);
  if (a.kind == Kind::Interval) return ca.lo == cb.lo && ca.hi == cb.hi;
  return ca.lo == cb.lo;
}

std::string to_string(const LatticeValue& v) {
  auto word = [](std::int32_t w) -> std::string {
    if (w == kNegInf) return "-inf";
    if (w == kPosInf) return "+inf";
    return std::to_string(w);
  };
  std::ostringstream os;
  switch (v.kind) {
    case Kind::ZInc: os << "ZInc(" << word(v.lo) << ")"; break;
    case Kind::ZDec: os << "ZDec(" << word(v.lo) << ")"; break;
    case Kind::BInc: os << "BInc(" << (v.lo ? "true" : "false") << ")"; break;
    case Kind::BDec: os << "BDec(" << (v.lo ? "true" : "false") << ")"; break;
    case Kind::Interval:
      os << "[" << word(v.lo) << ".." << word(v.hi) << "]";
      break;
  }
  return os.str();
}

std::int32_t sat_add(std::int32_t a, std::int32_t b) {
  return narrow(widen(a) + widen(b));
}

std::int32_t sat_sub(std::int32_t a, std::int32_t b) {
  return narrow(widen(a) - widen(b));
}

std::int32_t sat_mul(std::int32_t coef, std::int32_t v) {
  if (coef == 0) return 0;
  if (v == kPosInf || v == kNegInf) return coef > 0 ? v : (v == kPosInf ? kNegInf : kPosInf);
  const std::int64_t p = std::int64_t{coef} * std::int64_t{v};
  return narrow(std::clamp<std::int64_t>(p, -kWideInf, kWideInf));
}

std::int32_t sat_neg(std::int32_t v) {
  if (v == kPosInf) return kNegInf;
  if (v == kNegInf) return kPosInf;
  return -v;
}

} // namespace pccp
