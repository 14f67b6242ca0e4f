#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edgeshare/crypto.hpp"
#include "edgeshare/curve.hpp"

namespace edgeshare {

struct LedgerEntry {
  std::uint64_t index = 0;
  std::string device_label;
  AeadRecord sealed_point;
  Timestamp timestamp;
  Digest h1{};
  Digest h2{};  // the device's unique ID

  /// nonce || ciphertext || tag || epoch (u64 BE) || sequence (u64 BE) || h1 || h2.
  /// Every byte of this form is covered by the chain check.
  Bytes chain_bytes() const;
  /// Inverse of chain_bytes(); label, index and issuer are carried over
  /// from `meta`.
  static LedgerEntry from_chain_bytes(ByteView data, const LedgerEntry& meta);

  bool operator==(const LedgerEntry&) const = default;
};

/// h1 = SHA-256(sealed point record bytes || timestamp bytes)
Digest compute_h1(const AeadRecord& sealed_point, const Timestamp& ts);
/// h2 = h1 for the first entry, else SHA-256(previous h2 || h1)
Digest compute_h2(const std::optional<Digest>& previous_h2, const Digest& h1);

struct ChainReport {
  bool valid = true;
  std::optional<std::size_t> first_bad_index;
};

/// Recomputes h1/h2 along the chain and reports the earliest entry whose
/// stored values, or position index, disagree.
ChainReport verify_chain(std::span<const LedgerEntry> entries);

struct LedgerSnapshot {
  std::string jsonl;

  bool operator==(const LedgerSnapshot&) const = default;
};

/// Edge-side identity ledger for one device group. Append-only; single
/// writer. The set of used points is edge secret state and never appears
/// in a snapshot.
class IdentityLedger {
 public:
  IdentityLedger(std::string group_id, WeierstrassCurve curve);

  /// Selects a fresh point, seals it under point_key, stamps it, chains it
  /// and appends the entry. The sealed point is never decrypted again.
  /// Throws Error(duplicate_device) or Error(group_full).
  const LedgerEntry& register_device(const std::string& device_label, TimestampAuthority& tsa,
                                     const Key256& point_key, std::uint64_t rng_seed);

  ChainReport verify_chain() const { return edgeshare::verify_chain(entries_); }

  const std::string& group_id() const noexcept { return group_id_; }
  const WeierstrassCurve& curve() const noexcept { return curve_; }
  const std::vector<LedgerEntry>& entries() const noexcept { return entries_; }
  const PointSet& used_points() const noexcept { return used_; }
  const LedgerEntry* find(const Digest& device_id) const;

  /// Rebuilds an edge ledger from persisted state. Throws Error(invalid_state)
  /// if the chain does not verify.
  static IdentityLedger restore(std::string group_id, WeierstrassCurve curve,
                                std::vector<LedgerEntry> entries, PointSet used);

 private:
  std::string group_id_;
  WeierstrassCurve curve_;
  std::vector<LedgerEntry> entries_;
  PointSet used_;
};

/// Serializes the verified ledger for the cloud: a header line
/// {group_id, p_hex, a1_hex..a6_hex, entry_count} followed by one JSON line
/// per entry. Throws Error(refuse_sync) for a broken chain.
LedgerSnapshot sync_to_cloud(const IdentityLedger& ledger);

/// Cloud-side copy of a ledger, as parsed from a snapshot.
struct LedgerReplica {
  std::string group_id;
  CurveCoefficients curve;
  std::size_t declared_entries = 0;
  std::vector<LedgerEntry> entries;
  /// Index of the first entry line that could not be parsed, if any;
  /// entries holds only the lines before it.
  std::optional<std::size_t> first_malformed;

  /// Chain check that also accounts for unparseable lines and a header
  /// entry count that disagrees with the body.
  ChainReport verify() const;
};

/// Throws Error(parse_error) if the header line is unusable.
LedgerReplica parse_snapshot(std::string_view jsonl);

std::string snapshot_header_line(const std::string& group_id, const CurveCoefficients& curve,
                                 std::size_t entry_count);
std::string entry_line(const LedgerEntry& entry);

}  // namespace edgeshare
