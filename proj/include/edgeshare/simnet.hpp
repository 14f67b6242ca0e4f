#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgeshare/curve.hpp"

namespace edgeshare {

enum class ActionKind { register_device, transact, attack };
enum class AttackKind { tamper_share, forge_share, replay, tamper_ledger_bit };

std::string_view to_string(AttackKind kind) noexcept;

struct ScriptAction {
  ActionKind kind = ActionKind::transact;
  std::string device;
  std::optional<AttackKind> attack;
  /// Expected outcome string; defaults to "ok" for register, "accepted"
  /// for transact and "detected" for attacks. A transact expectation of
  /// plain "rejected" matches any rejection reason.
  std::optional<std::string> expect;
};

struct SimScenario {
  std::string name = "scenario";
  std::uint64_t seed = 0;
  std::uint32_t device_count = 0;
  std::uint32_t share_order = 256;
  std::optional<CurveCoefficients> curve;  // default curve when absent
  std::vector<ScriptAction> script;
};

/// Throws Error(config_error) for a malformed scenario document.
SimScenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimScenario& scenario);

struct SimEvent {
  std::uint64_t tick = 0;
  std::string actor;  // edge | cloud | adversary | tsa
  std::string kind;
  std::string payload;
  std::string outcome;

  std::string to_json_line() const;
};

struct SimResult {
  /// {scenario, seed, config_sha256}; the config digest stands in for a
  /// code-integrity measurement of what was run.
  std::string header_line;
  std::vector<SimEvent> events;
  bool passed = true;
  std::vector<std::string> diffs;
  std::size_t attacks = 0;
  std::size_t attacks_detected = 0;

  /// Header plus one line per event; empty when no events were produced.
  std::string event_log() const;
};

/// Runs one edge node (secure zone, ledger, Bloom allowlist) against one
/// cloud node (ledger replica, cloud shares) over an in-process channel,
/// with adversary actions applied to messages in flight. Time is a logical
/// tick; nothing reads the wall clock. Throws Error(config_error).
SimResult run_scenario(const SimScenario& scenario);

/// Runs the scenario twice and compares event logs byte for byte.
bool replay_determinism_check(const SimScenario& scenario);

/// happy-path, attacks, replay.
std::vector<SimScenario> builtin_scenarios();

struct DataRecord {
  std::string id;
  std::optional<std::uint64_t> age;
  std::optional<std::string> category;

  bool operator==(const DataRecord&) const = default;
};

struct SplitPolicy {
  /// Records older than this go to the cloud.
  std::optional<std::uint64_t> max_timely_age;
  /// Categories always sent to the cloud, regardless of age.
  std::vector<std::string> historical_categories;
};

struct DataPartition {
  std::vector<DataRecord> timely;      // kept at the edge
  std::vector<DataRecord> historical;  // sent to the cloud
};

/// Disjoint split of edge data. Throws Error(classification_error) for a
/// record the policy cannot place.
DataPartition edge_data_split(const std::vector<DataRecord>& records, const SplitPolicy& policy);

}  // namespace edgeshare
