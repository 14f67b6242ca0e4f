#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "edgeshare/crypto.hpp"
#include "edgeshare/quasigroup.hpp"
#include "edgeshare/rng.hpp"

namespace edgeshare {

/// 32-byte identifier binding a split to its owner, usually a ledger
/// device ID.
using ContextId = Digest;

/// Secret length as big-endian integer written in base `order`, most
/// significant digit first, with digit_count(len, order) digits. Powers of
/// two take a bit-slicing fast path. Throws Error(empty_secret).
std::vector<Element> encode_secret(ByteView secret, std::uint32_t order);

/// Inverse of encode_secret. Throws Error(parse_error) when the digits do
/// not describe a value of exactly secret_len bytes.
Bytes decode_secret(std::span<const Element> digits, std::uint32_t order, std::size_t secret_len);

/// ceil(8 * secret_len / floor(log2(order)))
std::size_t digit_count(std::size_t secret_len, std::uint32_t order);

struct PlainShare {
  std::uint8_t index = 0;  // 1 = edge, 2 = cloud
  std::uint32_t order = 0;
  std::vector<Element> digits;
  std::size_t secret_len_bytes = 0;

  /// index (u8) || order (u16 BE) || digit count (u32 BE) || digits (u16 BE)
  Bytes canonical_bytes() const;
  static PlainShare from_canonical_bytes(ByteView data, std::size_t secret_len);

  bool operator==(const PlainShare&) const = default;
};

struct SealedShare {
  std::uint8_t index = 0;
  AeadRecord record;
  Digest binding_tag{};

  bool operator==(const SealedShare&) const = default;
};

/// Everything the edge secure zone keeps to verify and recombine a split.
/// Never leaves the zone.
struct SplitRecord {
  ContextId context_id{};
  QuasigroupParams quasigroup;
  std::uint64_t secret_len = 0;
  Digest secret_checksum{};
  std::array<Digest, 2> expected_tags{};

  bool operator==(const SplitRecord&) const = default;
};

struct SplitResult {
  PlainShare first;
  PlainShare second;
  SplitRecord record;
};

/// SHA-256(canonical share bytes || index || context_id)
Digest binding_tag(const PlainShare& share, const ContextId& context_id);

/// 2-of-2 split over q: for each secret digit s a uniform r is drawn,
/// share 1 gets r and share 2 gets r \ s, so that r * (r \ s) = s.
/// q must be a generated quasigroup so that the record can rebuild it.
SplitResult split(ByteView secret, const Quasigroup& q, const ContextId& context_id,
                  std::uint64_t rng_seed);

/// Digit-level core of split(); exposed for tests on hand-built tables.
std::pair<std::vector<Element>, std::vector<Element>> split_digits(std::span<const Element> digits,
                                                                   const Quasigroup& q, Rng& rng);
std::vector<Element> combine_digits(std::span<const Element> first, std::span<const Element> second,
                                    const Quasigroup& q);

SealedShare seal_share(const PlainShare& share, const Key256& key, const ContextId& context_id,
                       NonceSequence& nonces);

/// Throws Error(authentication_failure) on a wrong key or tampered record.
PlainShare unseal_share(const SealedShare& sealed, const Key256& key, const ContextId& context_id,
                        std::size_t secret_len);

/// Decrypts both shares, checks their binding tags against the record,
/// rebuilds the quasigroup and samples the parastroph identities,
/// recombines digits and compares the secret checksum. Each stage has its
/// own error code: decrypt_failure, tag_mismatch, algebra_failure,
/// checksum_mismatch.
Bytes combine_and_verify(const SealedShare& first, const SealedShare& second, const SplitRecord& record,
                         const Key256& key);

}  // namespace edgeshare
