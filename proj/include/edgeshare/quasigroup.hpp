#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "edgeshare/bytes.hpp"

namespace edgeshare {

/// Quasigroup elements are indices in [0, order); callers map any external
/// alphabet onto them.
using Element = std::uint16_t;

inline constexpr std::uint32_t kMinOrder = 2;
/// Tables are stored densely (three n*n arrays), which bounds the order.
inline constexpr std::uint32_t kMaxOrder = 4096;

/// Parameters that rebuild a generated quasigroup bit-exactly.
struct QuasigroupParams {
  std::uint32_t order = 0;
  std::uint64_t seed = 0;

  bool operator==(const QuasigroupParams&) const = default;
};

using Table = std::vector<std::vector<std::uint32_t>>;

/// A finite quasigroup (Q, *, \, /) held as its Cayley table plus both
/// division tables. Immutable after construction and safe to share.
///
/// Row index is the left operand, column index the right operand:
///   multiply(x, y)     = table[x][y]
///   left_divide(x, y)  = the z with x * z = y
///   right_divide(y, x) = the z with z * x = y
class Quasigroup {
 public:
  /// Isotope of the cyclic group: table[x][y] = s((p(x) + r(y)) mod n) for
  /// three seed-derived permutations s, p, r. Deterministic in (order, seed).
  /// Not uniform over all Latin squares.
  static Quasigroup generate(std::uint32_t order, std::uint64_t seed);

  /// Throws Error(malformed_table) unless rows form a Latin square.
  static Quasigroup from_table(const Table& rows);

  static Quasigroup from_canonical_bytes(ByteView data);

  std::uint32_t order() const noexcept { return order_; }
  const std::optional<QuasigroupParams>& params() const noexcept { return params_; }

  // Checked operations; out-of-range operands throw Error(invalid_element).
  Element multiply(std::uint32_t x, std::uint32_t y) const;
  Element left_divide(std::uint32_t x, std::uint32_t y) const;
  Element right_divide(std::uint32_t y, std::uint32_t x) const;

  // Unchecked forms for inner loops.
  Element mul(Element x, Element y) const noexcept { return table_[idx(x, y)]; }
  Element ldiv(Element x, Element y) const noexcept { return left_div_[idx(x, y)]; }
  Element rdiv(Element y, Element x) const noexcept { return right_div_[idx(y, x)]; }

  std::span<const Element> table() const noexcept { return table_; }
  std::span<const Element> left_division_table() const noexcept { return left_div_; }
  std::span<const Element> right_division_table() const noexcept { return right_div_; }
  Table rows() const;

  /// order as u32 BE, then order^2 entries row-major as u16 BE.
  Bytes canonical_bytes() const;

 private:
  Quasigroup(std::uint32_t order, std::vector<Element> table, std::optional<QuasigroupParams> params);

  std::size_t idx(std::uint32_t a, std::uint32_t b) const noexcept {
    return static_cast<std::size_t>(a) * order_ + b;
  }
  void check_element(std::uint32_t v) const;

  std::uint32_t order_;
  std::vector<Element> table_;
  std::vector<Element> left_div_;
  std::vector<Element> right_div_;
  std::optional<QuasigroupParams> params_;
};

/// True iff every row and column is a permutation of [0, n). Throws
/// Error(malformed_table) for a non-square table or entries outside [0, n).
bool is_latin_square(const Table& rows);

struct Exhaustive {};
struct Sampled {
  std::uint32_t pairs = 64;
  std::uint64_t seed = 0;
};
using VerificationMode = std::variant<Exhaustive, Sampled>;

struct IdentityFailure {
  int identity;  // 1..6
  Element x;
  Element y;

  bool operator==(const IdentityFailure&) const = default;
};

struct IdentityReport {
  bool passed = true;
  std::uint64_t pairs_checked = 0;
  std::vector<IdentityFailure> failures;
};

/// Checks the six parastroph identities
///   1. x * (x \ y) = y        4. (y * x) / x = y
///   2. (y / x) * x = y        5. x / (y \ x) = y
///   3. x \ (x * y) = y        6. (x / y) \ x = y
/// over every pair (Exhaustive) or over seed-chosen pairs (Sampled).
IdentityReport verify_parastroph_identities(const Quasigroup& q,
                                            const VerificationMode& mode = Exhaustive{});

/// Same check over an arbitrary table: division tables are derived from the
/// rows and every identity is evaluated against them. Throws
/// Error(malformed_table) if the rows are not a Latin square.
IdentityReport verify_parastroph_identities(const Table& rows,
                                            const VerificationMode& mode = Exhaustive{});

}  // namespace edgeshare
