#include "edgeshare/simnet.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "edgeshare/bloom.hpp"
#include "edgeshare/error.hpp"
#include "edgeshare/json_io.hpp"
#include "edgeshare/ledger.hpp"
#include "edgeshare/secure_zone.hpp"

namespace edgeshare {

namespace {

constexpr double kAllowlistFpr = 0.01;

ActionKind parse_action(const std::string& s) {
  if (s == "register") return ActionKind::register_device;
  if (s == "transact") return ActionKind::transact;
  if (s == "attack") return ActionKind::attack;
  throw Error(ErrorCode::config_error, "unknown action: " + s);
}

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::register_device: return "register";
    case ActionKind::transact: return "transact";
    case ActionKind::attack: return "attack";
  }
  return "unknown";
}

AttackKind parse_attack(const std::string& s) {
  for (auto k : {AttackKind::tamper_share, AttackKind::forge_share, AttackKind::replay,
                 AttackKind::tamper_ledger_bit}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::config_error, "unknown attack: " + s);
}

std::string device_name(std::uint32_t i) { return "device-" + std::to_string(i); }

// Message from cloud to edge asking to authorize a transaction.
struct TransactionRequest {
  ContextId context{};
  SealedShare share;
  Timestamp ts;
};

class Simulation {
 public:
  explicit Simulation(const SimScenario& s)
      : scenario_(s),
        tsa_("sim-tsa", [this] { return tick_; }),
        zone_(tsa_, mix_seed(s.seed, 1)),
        ledger_("group-" + s.name, s.curve ? WeierstrassCurve(*s.curve) : WeierstrassCurve::default_curve()),
        filter_(BloomFilter::create(std::max<std::uint64_t>(1, expected_devices(s)), kAllowlistFpr)),
        adversary_(mix_seed(s.seed, 2)) {}

  SimResult run() {
    SimResult result;
    nlohmann::ordered_json header;
    header["scenario"] = scenario_.name;
    header["seed"] = scenario_.seed;
    header["config_sha256"] = to_hex(sha256(as_bytes(to_json(scenario_).dump())));
    result.header_line = header.dump();

    for (std::uint32_t i = 0; i < scenario_.device_count; ++i) {
      check(result, "initial register " + device_name(i), register_device(device_name(i)), "ok");
    }
    for (std::size_t step = 0; step < scenario_.script.size(); ++step) {
      const auto& action = scenario_.script[step];
      std::string outcome;
      std::string fallback;
      switch (action.kind) {
        case ActionKind::register_device:
          outcome = register_device(action.device);
          fallback = "ok";
          break;
        case ActionKind::transact:
          outcome = transact(action.device);
          fallback = "accepted";
          break;
        case ActionKind::attack:
          ++result.attacks;
          outcome = attack(*action.attack, action.device);
          if (outcome.rfind("detected", 0) == 0) ++result.attacks_detected;
          fallback = "detected";
          break;
      }
      check(result, "step " + std::to_string(step) + " (" + std::string(to_string(action.kind)) + ")",
            outcome, action.expect.value_or(fallback));
    }
    result.events = std::move(events_);
    return result;
  }

 private:
  static std::uint64_t expected_devices(const SimScenario& s) {
    std::uint64_t n = s.device_count;
    for (const auto& a : s.script) n += a.kind == ActionKind::register_device ? 1 : 0;
    return n;
  }

  static bool matches(const std::string& outcome, const std::string& expected) {
    if (outcome == expected) return true;
    // "rejected" and "detected" accept any reason suffix.
    return (expected == "rejected" || expected == "detected") && outcome.rfind(expected + ":", 0) == 0;
  }

  void check(SimResult& result, const std::string& what, const std::string& outcome,
             const std::string& expected) {
    if (!matches(outcome, expected)) {
      result.passed = false;
      result.diffs.push_back(what + ": expected " + expected + ", got " + outcome);
    }
  }

  void log(std::string actor, std::string kind, std::string payload, std::string outcome) {
    events_.push_back({tick_, std::move(actor), std::move(kind), std::move(payload), std::move(outcome)});
  }

  const ContextId* context_of(const std::string& device) const {
    auto it = contexts_.find(device);
    return it == contexts_.end() ? nullptr : &it->second;
  }

  std::string register_device(const std::string& label) {
    ++tick_;
    const std::uint64_t seed = mix_seed(scenario_.seed, 1000 + tick_);
    try {
      const LedgerEntry& entry = zone_.register_device(ledger_, label, seed);
      const ContextId context = entry.h2;
      log("edge", "register", "device=" + label + " h2=" + to_hex(context), "ok");

      const KeyId key = zone_.generate_key(KeyPurpose::data_encryption, kDefaultUsageBudget,
                                           mix_seed(seed, 1));
      const Distribution dist = zone_.split_and_distribute(key, context, scenario_.share_order,
                                                           mix_seed(seed, 2));
      filter_.insert(context);
      log("edge", "share-split", "device=" + label + " key=" + to_hex(key), "ok");

      // Channel: cloud share and ledger snapshot travel to the cloud.
      cloud_shares_[label] = dist.cloud_share;
      contexts_[label] = context;
      log("cloud", "share-received",
          "device=" + label + " binding_tag=" + to_hex(dist.cloud_share.binding_tag), "stored");
      sync();
      return "ok";
    } catch (const Error& e) {
      log("edge", "register", "device=" + label, "error:" + std::string(to_string(e.code())));
      return "error:" + std::string(to_string(e.code()));
    }
  }

  void sync() {
    const LedgerSnapshot snapshot = sync_to_cloud(ledger_);
    cloud_ledger_ = parse_snapshot(snapshot.jsonl);
    const ChainReport report = cloud_ledger_.verify();
    const bool identical = render(cloud_ledger_) == snapshot.jsonl;
    log("cloud", "ledger-sync",
        "entries=" + std::to_string(cloud_ledger_.entries.size()) +
            " snapshot_sha256=" + to_hex(sha256(as_bytes(snapshot.jsonl))),
        std::string(report.valid ? "replica-valid" : "replica-invalid") +
            (identical ? "" : ":replica-differs"));
  }

  static std::string render(const LedgerReplica& r) {
    std::string out = snapshot_header_line(r.group_id, r.curve, r.entries.size()) + "\n";
    for (const auto& e : r.entries) out += entry_line(e) + "\n";
    return out;
  }

  std::string deliver(const TransactionRequest& request, const std::string& label) {
    if (!filter_.contains(request.context)) {
      log("edge", "authorize", "device=" + label, "rejected:not-allowlisted");
      return "rejected:not-allowlisted";
    }
    const Decision d = zone_.authorize_transaction(request.context, request.share, request.ts);
    const std::string outcome =
        d.accepted ? "accepted" : "rejected:" + std::string(to_string(*d.reason));
    log("edge", "authorize", "device=" + label + " sequence=" + std::to_string(request.ts.sequence),
        outcome);
    return outcome;
  }

  std::optional<TransactionRequest> cloud_request(const std::string& label) {
    const ContextId* context = context_of(label);
    if (!context) return std::nullopt;
    TransactionRequest req{*context, cloud_shares_.at(label), tsa_.issue(*context)};
    log("tsa", "timestamp", "device=" + label + " sequence=" + std::to_string(req.ts.sequence), "issued");
    log("cloud", "transaction-request", "device=" + label, "sent");
    return req;
  }

  std::string transact(const std::string& label) {
    ++tick_;
    auto req = cloud_request(label);
    if (!req) {
      log("cloud", "transaction-request", "device=" + label, "error:unknown-device");
      return "error:unknown-device";
    }
    const std::string outcome = deliver(*req, label);
    last_request_[label] = *req;
    return outcome;
  }

  static std::string detection(const std::string& outcome) {
    if (outcome.rfind("rejected:", 0) == 0) return "detected:" + outcome.substr(9);
    return "undetected";
  }

  std::string attack(AttackKind kind, const std::string& label) {
    ++tick_;
    const std::string name(to_string(kind));
    if (kind == AttackKind::tamper_ledger_bit) return tamper_ledger();

    if (!context_of(label)) {
      log("adversary", name, "device=" + label, "error:unknown-device");
      return "error:unknown-device";
    }
    switch (kind) {
      case AttackKind::tamper_share: {
        auto req = cloud_request(label);
        Bytes raw = req->share.record.to_bytes();
        const std::size_t total_bits = (raw.size() + req->share.binding_tag.size()) * 8;
        const std::size_t bit = adversary_.uniform(total_bits);
        if (bit < raw.size() * 8) {
          raw[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
          req->share.record = AeadRecord::from_bytes(raw);
        } else {
          const std::size_t b = bit - raw.size() * 8;
          req->share.binding_tag[b / 8] ^= static_cast<std::uint8_t>(1u << (b % 8));
        }
        log("adversary", name, "device=" + label + " bit=" + std::to_string(bit), "injected");
        const std::string outcome = detection(deliver(*req, label));
        log("edge", "detection", "attack=" + name, outcome);
        return outcome;
      }
      case AttackKind::forge_share: {
        auto req = cloud_request(label);
        SealedShare forged;
        forged.index = 2;
        adversary_.fill(forged.record.nonce);
        forged.record.ciphertext.resize(req->share.record.ciphertext.size());
        adversary_.fill(forged.record.ciphertext);
        adversary_.fill(forged.record.tag);
        adversary_.fill(forged.binding_tag);
        req->share = forged;
        log("adversary", name, "device=" + label + " nonce=" + to_hex(forged.record.nonce), "injected");
        const std::string outcome = detection(deliver(*req, label));
        log("edge", "detection", "attack=" + name, outcome);
        return outcome;
      }
      case AttackKind::replay: {
        auto it = last_request_.find(label);
        if (it == last_request_.end()) {
          // Capture one honest exchange first.
          auto req = cloud_request(label);
          log("adversary", "capture", "device=" + label, "captured");
          deliver(*req, label);
          it = last_request_.emplace(label, *req).first;
        }
        log("adversary", name,
            "device=" + label + " sequence=" + std::to_string(it->second.ts.sequence), "injected");
        const std::string outcome = detection(deliver(it->second, label));
        log("edge", "detection", "attack=" + name, outcome);
        return outcome;
      }
      case AttackKind::tamper_ledger_bit:
        break;
    }
    return "error:unreachable";
  }

  std::string tamper_ledger() {
    const std::string name(to_string(AttackKind::tamper_ledger_bit));
    if (cloud_ledger_.entries.empty()) {
      log("adversary", name, "entries=0", "error:empty-ledger");
      return "error:empty-ledger";
    }
    const std::size_t index = adversary_.uniform(cloud_ledger_.entries.size());
    LedgerEntry& victim = cloud_ledger_.entries[index];
    Bytes raw = victim.chain_bytes();
    const std::size_t bit = adversary_.uniform(raw.size() * 8);
    raw[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    victim = LedgerEntry::from_chain_bytes(raw, victim);
    log("adversary", name, "index=" + std::to_string(index) + " bit=" + std::to_string(bit), "injected");

    const ChainReport report = cloud_ledger_.verify();
    std::string outcome;
    if (report.valid) {
      outcome = "undetected";
    } else if (report.first_bad_index != index) {
      outcome = "misattributed:" + std::to_string(*report.first_bad_index);
    } else {
      outcome = "detected:index-" + std::to_string(index);
    }
    log("cloud", "verify-chain", "entries=" + std::to_string(cloud_ledger_.entries.size()), outcome);
    sync();  // edge re-pushes the authoritative copy
    return outcome;
  }

  const SimScenario& scenario_;
  std::uint64_t tick_ = 0;
  TimestampAuthority tsa_;
  SecureZone zone_;
  IdentityLedger ledger_;
  BloomFilter filter_;
  Rng adversary_;
  LedgerReplica cloud_ledger_;
  std::map<std::string, SealedShare> cloud_shares_;
  std::map<std::string, ContextId> contexts_;
  std::map<std::string, TransactionRequest> last_request_;
  std::vector<SimEvent> events_;
};

}  // namespace

std::string_view to_string(AttackKind kind) noexcept {
  switch (kind) {
    case AttackKind::tamper_share: return "tamper-share";
    case AttackKind::forge_share: return "forge-share";
    case AttackKind::replay: return "replay";
    case AttackKind::tamper_ledger_bit: return "tamper-ledger-bit";
  }
  return "unknown";
}

SimScenario scenario_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw Error(ErrorCode::config_error, "scenario must be a JSON object");
    SimScenario s;
    s.name = j.value("name", std::string("scenario"));
    s.seed = j.value("seed", std::uint64_t{0});
    s.device_count = j.value("device_count", std::uint32_t{0});
    s.share_order = j.value("share_order", std::uint32_t{256});
    if (s.share_order < kMinOrder || s.share_order > kMaxOrder) {
      throw Error(ErrorCode::config_error, "share_order out of range");
    }
    if (j.contains("curve")) {
      const auto& c = j.at("curve");
      CurveCoefficients cc;
      cc.p = mpz_from_hex(c.at("p_hex").get<std::string>());
      cc.a1 = mpz_from_hex(c.value("a1_hex", std::string("0")));
      cc.a2 = mpz_from_hex(c.value("a2_hex", std::string("0")));
      cc.a3 = mpz_from_hex(c.value("a3_hex", std::string("0")));
      cc.a4 = mpz_from_hex(c.value("a4_hex", std::string("0")));
      cc.a6 = mpz_from_hex(c.value("a6_hex", std::string("0")));
      WeierstrassCurve validated(cc);  // reject bad curves up front
      s.curve = validated.coefficients();
    }
    for (const auto& a : j.value("script", nlohmann::json::array())) {
      ScriptAction action;
      action.kind = parse_action(a.at("action").get<std::string>());
      action.device = a.value("device", std::string());
      if (action.kind == ActionKind::attack) {
        action.attack = parse_attack(a.at("attack").get<std::string>());
      }
      if (action.kind != ActionKind::attack && action.device.empty()) {
        throw Error(ErrorCode::config_error, "action requires a device");
      }
      if (action.kind == ActionKind::attack && action.attack != AttackKind::tamper_ledger_bit &&
          action.device.empty()) {
        throw Error(ErrorCode::config_error, "attack requires a target device");
      }
      if (a.contains("expect")) action.expect = a.at("expect").get<std::string>();
      s.script.push_back(std::move(action));
    }
    return s;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::config_error, std::string("malformed scenario: ") + ex.what());
  } catch (const Error& ex) {
    if (ex.code() == ErrorCode::config_error) throw;
    throw Error(ErrorCode::config_error, std::string("malformed scenario: ") + ex.what());
  }
}

nlohmann::json to_json(const SimScenario& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["device_count"] = s.device_count;
  j["share_order"] = s.share_order;
  if (s.curve) {
    j["curve"] = {{"p_hex", to_hex(s.curve->p)},   {"a1_hex", to_hex(s.curve->a1)},
                  {"a2_hex", to_hex(s.curve->a2)}, {"a3_hex", to_hex(s.curve->a3)},
                  {"a4_hex", to_hex(s.curve->a4)}, {"a6_hex", to_hex(s.curve->a6)}};
  }
  nlohmann::ordered_json script = nlohmann::ordered_json::array();
  for (const auto& a : s.script) {
    nlohmann::ordered_json step;
    step["action"] = to_string(a.kind);
    if (!a.device.empty()) step["device"] = a.device;
    if (a.attack) step["attack"] = to_string(*a.attack);
    if (a.expect) step["expect"] = *a.expect;
    script.push_back(std::move(step));
  }
  j["script"] = std::move(script);
  return nlohmann::json::parse(j.dump());
}

std::string SimEvent::to_json_line() const {
  nlohmann::ordered_json j;
  j["tick"] = tick;
  j["actor"] = actor;
  j["kind"] = kind;
  j["payload"] = payload;
  j["outcome"] = outcome;
  return j.dump();
}

std::string SimResult::event_log() const {
  if (events.empty()) return {};
  std::string out = header_line + "\n";
  for (const auto& e : events) out += e.to_json_line() + "\n";
  return out;
}

SimResult run_scenario(const SimScenario& scenario) { return Simulation(scenario).run(); }

bool replay_determinism_check(const SimScenario& scenario) {
  return run_scenario(scenario).event_log() == run_scenario(scenario).event_log();
}

std::vector<SimScenario> builtin_scenarios() {
  auto tx = [](std::string device) { return ScriptAction{ActionKind::transact, std::move(device), {}, {}}; };
  auto atk = [](AttackKind k, std::string device) {
    return ScriptAction{ActionKind::attack, std::move(device), k, {}};
  };

  SimScenario happy;
  happy.name = "happy-path";
  happy.seed = 2024;
  happy.device_count = 5;
  for (int i = 0; i < 10; ++i) happy.script.push_back(tx(device_name(i % 5)));

  SimScenario attacks;
  attacks.name = "attacks";
  attacks.seed = 7;
  attacks.device_count = 4;
  attacks.script = {tx("device-0"),
                    atk(AttackKind::tamper_share, "device-0"),
                    atk(AttackKind::forge_share, "device-1"),
                    atk(AttackKind::replay, "device-0"),
                    atk(AttackKind::tamper_ledger_bit, ""),
                    tx("device-2"),
                    {ActionKind::register_device, "late-joiner", {}, {}},
                    atk(AttackKind::forge_share, "late-joiner"),
                    atk(AttackKind::replay, "device-3"),
                    tx("late-joiner"),
                    tx("device-0")};

  SimScenario replay;
  replay.name = "replay";
  replay.seed = 99;
  replay.device_count = 2;
  replay.script = {tx("device-0"), atk(AttackKind::replay, "device-0"), tx("device-0"),
                   atk(AttackKind::replay, "device-0"), atk(AttackKind::replay, "device-1"),
                   tx("device-1")};

  return {happy, attacks, replay};
}

DataPartition edge_data_split(const std::vector<DataRecord>& records, const SplitPolicy& policy) {
  DataPartition out;
  for (const auto& r : records) {
    const bool historical_category =
        r.category && std::find(policy.historical_categories.begin(), policy.historical_categories.end(),
                                *r.category) != policy.historical_categories.end();
    if (historical_category) {
      out.historical.push_back(r);
    } else if (r.age && policy.max_timely_age) {
      (*r.age > *policy.max_timely_age ? out.historical : out.timely).push_back(r);
    } else if (r.category) {
      out.timely.push_back(r);
    } else {
      throw Error(ErrorCode::classification_error, "record " + r.id + " carries no usable tag");
    }
  }
  return out;
}

}  // namespace edgeshare
