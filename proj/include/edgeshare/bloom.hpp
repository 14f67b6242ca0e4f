#pragma once

#include <cstdint>
#include <vector>

#include "edgeshare/bytes.hpp"
#include "edgeshare/crypto.hpp"

namespace edgeshare {

/// Allowlist pre-check over device IDs. A hit only means "maybe
/// registered"; access still requires the ledger lookup and share
/// verification.
class BloomFilter {
 public:
  static constexpr std::uint64_t kMaxBits = std::uint64_t{1} << 32;
  static constexpr std::uint32_t kMaxHashes = 64;

  /// m = ceil(-n ln(fpr) / ln(2)^2), k = max(1, round(m / n * ln 2)).
  /// Throws Error(parameter_out_of_range).
  static BloomFilter create(std::uint64_t expected_n, double target_fpr);

  BloomFilter(std::uint64_t m, std::uint32_t k);

  void insert(const Digest& device_id);
  bool contains(const Digest& device_id) const;

  std::uint64_t bit_count() const noexcept { return m_; }
  std::uint32_t hash_count() const noexcept { return k_; }
  std::uint64_t inserted() const noexcept { return n_inserted_; }

  /// (1 - e^(-k n / m))^k at the current load.
  double estimated_fpr() const;

  /// The k bit positions for an ID: (h_a + i * h_b) mod m where h_a, h_b
  /// are the big-endian 16-byte halves of SHA-256(device_id).
  std::vector<std::uint64_t> indices(const Digest& device_id) const;

  /// m (u64 BE) || k (u32 BE) || n_inserted (u64 BE) || ceil(m/8) bytes,
  /// bit i stored at byte i/8, bit position i%8 (LSB first).
  Bytes serialize() const;
  static BloomFilter deserialize(ByteView data);

  bool operator==(const BloomFilter&) const = default;

 private:
  std::uint64_t m_;
  std::uint32_t k_;
  std::uint64_t n_inserted_ = 0;
  std::vector<std::uint8_t> bits_;
};

}  // namespace edgeshare
