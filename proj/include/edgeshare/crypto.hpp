#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "edgeshare/bytes.hpp"

namespace edgeshare {

using Digest = std::array<std::uint8_t, 32>;
using Key256 = std::array<std::uint8_t, 32>;
using Nonce = std::array<std::uint8_t, 12>;
using AuthTag = std::array<std::uint8_t, 16>;

Digest sha256(ByteView data);

/// Incremental SHA-256 for hashing concatenations without building them.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(Sha256&&) noexcept;
  Sha256& operator=(Sha256&&) noexcept;

  Sha256& update(ByteView data);
  Sha256& update(std::string_view data) { return update(as_bytes(data)); }
  Digest finish();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

/// Fills out with bytes from the OpenSSL CSPRNG.
void secure_random(std::span<std::uint8_t> out);

/// Constant-time comparison; false when the lengths differ.
bool constant_time_equal(ByteView a, ByteView b) noexcept;

/// Wipes key material from memory.
void secure_wipe(std::span<std::uint8_t> data) noexcept;

// ---------------------------------------------------------------------------
// AES-256-GCM

struct AeadRecord {
  Nonce nonce{};
  Bytes ciphertext;
  AuthTag tag{};

  /// nonce || ciphertext || tag
  Bytes to_bytes() const;
  static AeadRecord from_bytes(ByteView data);

  bool operator==(const AeadRecord&) const = default;
};

/// Counter-based nonce source: 4 seed-derived prefix bytes followed by a
/// 64-bit big-endian counter. Two nonces from one sequence never repeat.
class NonceSequence {
 public:
  explicit NonceSequence(std::uint64_t seed);
  NonceSequence(std::array<std::uint8_t, 4> prefix, std::uint64_t next_counter)
      : prefix_(prefix), counter_(next_counter) {}

  Nonce next();
  std::uint64_t issued() const noexcept { return counter_; }
  const std::array<std::uint8_t, 4>& prefix() const noexcept { return prefix_; }

 private:
  std::array<std::uint8_t, 4> prefix_{};
  std::uint64_t counter_ = 0;
};

AeadRecord aead_encrypt(const Key256& key, ByteView plaintext, ByteView associated_data,
                        NonceSequence& nonces);
AeadRecord aead_encrypt(const Key256& key, ByteView plaintext, ByteView associated_data,
                        const Nonce& nonce);

/// Throws Error(authentication_failure) when the key is wrong or any byte of
/// the record or associated data has changed.
Bytes aead_decrypt(const Key256& key, const AeadRecord& record, ByteView associated_data);

// ---------------------------------------------------------------------------
// Timestamps

struct Timestamp {
  std::uint64_t epoch_seconds = 0;
  std::string issuer;
  std::uint64_t sequence = 0;

  /// 8-byte BE epoch_seconds || 8-byte BE sequence. This is the only form
  /// that is ever hashed.
  std::array<std::uint8_t, 16> to_bytes() const;

  bool operator==(const Timestamp&) const = default;
};

using Clock = std::function<std::uint64_t()>;

/// Local time-stamp authority. Sequence numbers start at 1 and increase by
/// one per issue; the clock may stand still but must never move backwards.
/// Single writer: callers serialize issue() per instance.
class TimestampAuthority {
 public:
  TimestampAuthority(std::string issuer, Clock clock, std::uint64_t last_sequence = 0,
                     std::uint64_t last_epoch = 0);

  static Clock wall_clock();

  /// Registers a transaction for the given context and stamps it.
  Timestamp issue(ByteView for_context);

  const std::string& issuer() const noexcept { return issuer_; }
  std::uint64_t last_sequence() const noexcept { return last_sequence_; }
  std::uint64_t last_epoch() const noexcept { return last_epoch_; }

  /// Digest over (context, timestamp bytes) recorded for the most recent issue.
  const Digest& last_registration() const noexcept { return last_registration_; }

 private:
  std::string issuer_;
  Clock clock_;
  std::uint64_t last_sequence_;
  std::uint64_t last_epoch_;
  Digest last_registration_{};
};

/// False when ts was not issued by this authority (foreign issuer or a
/// sequence it has not reached yet) or when it does not advance past
/// last_seen, i.e. a replay.
bool verify_freshness(const TimestampAuthority& tsa_view, const Timestamp& ts,
                      const std::optional<Timestamp>& last_seen);

}  // namespace edgeshare
