#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgeshare/crypto.hpp"
#include "edgeshare/ledger.hpp"
#include "edgeshare/secret_split.hpp"


namespace edgeshare {

using KeyId = std::array<std::uint8_t, 16>;

enum class KeyPurpose { data_encryption, key_encryption, point_sealing };
enum class KeyState { generated, split, distributed, retired };

std::string_view to_string(KeyPurpose purpose) noexcept;
std::string_view to_string(KeyState state) noexcept;
KeyPurpose parse_key_purpose(std::string_view name);

inline constexpr std::uint64_t kDefaultUsageBudget = std::uint64_t{1} << 16;
inline constexpr std::uint32_t kDefaultShareOrder = 256;

/// Public view of a managed key; never carries key bytes.
struct ManagedKeyInfo {
  KeyId id{};
  KeyPurpose purpose = KeyPurpose::data_encryption;
  KeyState state = KeyState::generated;
  std::uint64_t usage_budget = kDefaultUsageBudget;
  std::uint64_t uses = 0;
  Timestamp created_at;
};

enum class RejectReason {
  replay,
  tag_mismatch,
  decrypt_failure,
  algebra_failure,
  checksum_mismatch,
  budget_exhausted,
  unknown_context,
  key_retired,
};

std::string_view to_string(RejectReason reason) noexcept;

struct Decision {
  bool accepted = false;
  std::optional<RejectReason> reason;

  static Decision accept() { return {true, std::nullopt}; }
  static Decision reject(RejectReason r) { return {false, r}; }
};

struct AuditRecord {
  std::uint64_t sequence = 0;
  std::string op;
  std::optional<KeyId> key_id;
  std::optional<ContextId> context_id;
  std::string outcome;
  std::optional<std::string> reason;

  /// {sequence, op, key_id, context_id_hex, outcome, reason?}
  std::string to_json_line() const;
};

struct Distribution {
  SealedShare edge_share;
  SealedShare cloud_share;
};

/// Software stand-in for the edge HSM. Raw key bytes and split records
/// stay inside; callers handle key IDs, sealed shares and decisions.
/// Every mutating call appends exactly one audit record, including calls
/// that fail. Single writer.
class SecureZone {
 public:
  /// seed switches on deterministic test mode for all zone randomness.
  explicit SecureZone(TimestampAuthority& tsa, std::optional<std::uint64_t> seed = std::nullopt);

  SecureZone(SecureZone&&) noexcept = default;
  SecureZone& operator=(SecureZone&&) = delete;
  SecureZone(const SecureZone&) = delete;
  ~SecureZone();

  KeyId generate_key(KeyPurpose purpose, std::uint64_t usage_budget = kDefaultUsageBudget,
                     std::optional<std::uint64_t> rng_seed = std::nullopt);

  /// AES-256-GCM wrap of target under a key-encryption key.
  /// Throws Error(wrong_purpose) / Error(unknown_key).
  AeadRecord wrap_key(const KeyId& kek_id, const KeyId& target_id);

  /// Imports a wrapped key as a new managed key and returns its ID.
  /// Throws Error(authentication_failure) on a tampered record.
  KeyId unwrap_key(const KeyId& kek_id, const KeyId& wrapped_id, const AeadRecord& record,
                   KeyPurpose purpose, std::uint64_t usage_budget = kDefaultUsageBudget);

  /// SHA-256 fingerprint of key bytes; lets callers compare keys without
  /// seeing them.
  Digest key_fingerprint(const KeyId& id) const;

  /// Wraps the key under the zone KEK, splits the wrapped bytes over a fresh
  /// secret quasigroup of the given order, seals both shares, keeps share 1
  /// and the split record, and returns both shares (share 2 is the one to
  /// ship to the cloud). Key state moves generated -> split -> distributed.
  Distribution split_and_distribute(const KeyId& key_id, const ContextId& context_id,
                                    std::uint32_t q_order = kDefaultShareOrder,
                                    std::optional<std::uint64_t> rng_seed = std::nullopt);

  /// Freshness check against the zone's TSA, then full share verification
  /// against the stored edge share. Consumes one unit of the key's budget
  /// on acceptance.
  Decision authorize_transaction(const ContextId& context_id, const SealedShare& cloud_share,
                                 const Timestamp& ts);

  void retire_key(const KeyId& id);

  /// Registers a device in the ledger using the zone's point-sealing key.
  const LedgerEntry& register_device(IdentityLedger& ledger, const std::string& device_label,
                                     std::uint64_t rng_seed);

  std::optional<ManagedKeyInfo> key_info(const KeyId& id) const;
  std::vector<ManagedKeyInfo> list_keys() const;
  bool has_split(const ContextId& context_id) const { return splits_.count(context_id) != 0; }
  /// Records appended since construction or restore; sequence numbers
  /// continue across restores.
  const std::vector<AuditRecord>& audit_log() const noexcept { return audit_; }

  /// Exportable view: key metadata and split contexts only.
  nlohmann::json public_state() const;

  /// Zone-private storage form, including key bytes. Only for the zone's
  /// own state file.
  nlohmann::json persist() const;
  static SecureZone restore(const nlohmann::json& state, TimestampAuthority& tsa);

 private:
  struct ManagedKey {
    ManagedKeyInfo info;
    Key256 bytes{};
  };
  struct StoredSplit {
    SplitRecord record;
    SealedShare edge_share;
    KeyId key_id{};
    std::optional<Timestamp> last_seen;
  };

  void fill_random(std::span<std::uint8_t> out, std::optional<std::uint64_t> seed,
                   std::uint64_t label);
  std::uint64_t next_seed(std::optional<std::uint64_t> seed, std::uint64_t label);
  ManagedKey& find_key(const KeyId& id);
  const ManagedKey& find_key(const KeyId& id) const;
  void advance_state(ManagedKey& key, KeyState next);
  void audit(std::string op, std::optional<KeyId> key_id, std::optional<ContextId> context_id,
             std::string outcome, std::optional<std::string> reason = std::nullopt);

  TimestampAuthority* tsa_;
  std::optional<std::uint64_t> seed_;
  std::uint64_t draw_counter_ = 0;
  NonceSequence nonces_;
  Key256 zone_kek_{};
  Key256 share_key_{};
  Key256 point_key_{};
  std::map<KeyId, ManagedKey> keys_;
  std::map<ContextId, StoredSplit> splits_;
  std::vector<AuditRecord> audit_;
  std::uint64_t audit_base_ = 0;
};

}  // namespace edgeshare
