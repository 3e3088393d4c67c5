#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace chmr::jet {

using VarId = std::uint8_t;
using FieldId = std::uint8_t;

/// A field together with a multi-index of derivative orders, packed into one word:
/// the field index in the top byte, then one byte per independent variable.
class JetVar {
 public:
  static constexpr std::size_t kMaxVars = 7;

  constexpr JetVar() = default;
  explicit constexpr JetVar(FieldId field) : key_(std::uint64_t{field} << 56) {}

  static constexpr JetVar from_key(std::uint64_t key) {
    JetVar j;
    j.key_ = key;
    return j;
  }

  constexpr FieldId field() const { return static_cast<FieldId>(key_ >> 56); }
  constexpr unsigned order(VarId v) const {
    return static_cast<unsigned>((key_ >> shift(v)) & 0xffu);
  }
  constexpr unsigned total_order() const {
    unsigned s = 0;
    for (VarId v = 0; v < kMaxVars; ++v) s += order(v);
    return s;
  }
  constexpr bool is_base() const { return (key_ & kOrderMask) == 0; }
  constexpr JetVar base() const { return from_key(key_ & ~kOrderMask); }

  constexpr JetVar differentiated(VarId v, unsigned times = 1) const {
    return from_key(key_ + (std::uint64_t{times} << shift(v)));
  }
  /// Inverse of differentiated(); the caller guarantees order(v) >= times.
  constexpr JetVar integrated(VarId v, unsigned times = 1) const {
    return from_key(key_ - (std::uint64_t{times} << shift(v)));
  }
  constexpr JetVar with_order(VarId v, unsigned order_v) const {
    return from_key((key_ & ~(std::uint64_t{0xff} << shift(v))) |
                    (std::uint64_t{order_v} << shift(v)));
  }

  /// True when *this is obtained from `other` by differentiation (or equals it).
  constexpr bool is_derivative_of(JetVar other) const {
    if (field() != other.field()) return false;
    for (VarId v = 0; v < kMaxVars; ++v)
      if (order(v) < other.order(v)) return false;
    return true;
  }

  constexpr std::uint64_t key() const { return key_; }
  constexpr auto operator<=>(const JetVar&) const = default;

 private:
  static constexpr std::uint64_t kOrderMask = (std::uint64_t{1} << 56) - 1;
  static constexpr unsigned shift(VarId v) { return 8u * (6u - v); }
  std::uint64_t key_ = 0;
};

/// Sentinel key used where a map needs a slot for "no jet variable".
inline constexpr JetVar kNoJet = JetVar::from_key(~std::uint64_t{0});

}  // namespace chmr::jet

template <>
struct std::hash<chmr::jet::JetVar> {
  std::size_t operator()(chmr::jet::JetVar j) const noexcept {
    return std::hash<std::uint64_t>{}(j.key());
  }
};
