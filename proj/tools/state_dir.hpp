#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "edgeshare/crypto.hpp"
#include "edgeshare/ledger.hpp"
#include "edgeshare/secure_zone.hpp"

namespace edgeshare::cli {

/// On-disk layout of one edge node:
///   zone.json          secure-zone storage (key bytes, split records, TSA
///                      counters, used points); never exported
///   ledger.jsonl       edge ledger in snapshot form
///   cloud/ledger.jsonl last snapshot synced to the cloud location
///   audit.jsonl        append-only audit log
///   .lock              advisory lock held by mutating commands
class StateDir {
 public:
  explicit StateDir(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path zone_path() const { return root_ / "zone.json"; }
  std::filesystem::path ledger_path() const { return root_ / "ledger.jsonl"; }
  std::filesystem::path cloud_ledger_path() const { return root_ / "cloud" / "ledger.jsonl"; }
  std::filesystem::path audit_path() const { return root_ / "audit.jsonl"; }

  /// Takes the advisory lock; throws Error(io_error) if another process
  /// holds it.
  void lock();

  TimestampAuthority& tsa() { return *tsa_; }

  /// Loads zone.json (or starts a fresh zone) together with the TSA state.
  SecureZone& zone();

  bool has_ledger() const { return std::filesystem::exists(ledger_path()); }
  /// Loads and verifies the edge ledger; Error(invalid_state) on a broken
  /// chain.
  IdentityLedger load_ledger();

  /// Persists zone + TSA + used points and appends new audit records.
  void save_zone(const IdentityLedger* ledger = nullptr);
  void save_ledger(const IdentityLedger& ledger);

  ~StateDir();

 private:
  std::filesystem::path root_;
  int lock_fd_ = -1;
  std::optional<TimestampAuthority> tsa_;
  std::optional<SecureZone> zone_;
  nlohmann::json used_points_ = nlohmann::json::object();
};

std::string read_file(const std::filesystem::path& path);
/// Write-to-temp then rename.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace edgeshare::cli
