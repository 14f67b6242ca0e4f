#include "edgeshare/secure_zone.hpp"

#include "edgeshare/error.hpp"
#include "edgeshare/json_io.hpp"

namespace edgeshare {

namespace {

enum SeedLabel : std::uint64_t {
  kLabelNonces = 1,
  kLabelZoneKek,
  kLabelShareKey,
  kLabelPointKey,
  kLabelDraw,
};

Bytes wrap_aad(const KeyId& wrapped_id) {
  Bytes aad;
  append(aad, as_bytes("edgeshare/wrap"));
  append(aad, wrapped_id);
  return aad;
}

std::optional<RejectReason> reason_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::decrypt_failure: return RejectReason::decrypt_failure;
    case ErrorCode::tag_mismatch: return RejectReason::tag_mismatch;
    case ErrorCode::algebra_failure: return RejectReason::algebra_failure;
    case ErrorCode::checksum_mismatch: return RejectReason::checksum_mismatch;
    default: return std::nullopt;
  }
}

Key256 key_from_hex(const std::string& hex) { return fixed_from_hex<32>(hex); }

}  // namespace

std::string_view to_string(KeyPurpose purpose) noexcept {
  switch (purpose) {
    case KeyPurpose::data_encryption: return "data-encryption";
    case KeyPurpose::key_encryption: return "key-encryption";
    case KeyPurpose::point_sealing: return "point-sealing";
  }
  return "unknown";
}

std::string_view to_string(KeyState state) noexcept {
  switch (state) {
    case KeyState::generated: return "generated";
    case KeyState::split: return "split";
    case KeyState::distributed: return "distributed";
    case KeyState::retired: return "retired";
  }
  return "unknown";
}

KeyPurpose parse_key_purpose(std::string_view name) {
  for (auto p : {KeyPurpose::data_encryption, KeyPurpose::key_encryption, KeyPurpose::point_sealing}) {
    if (to_string(p) == name) return p;
  }
  throw Error(ErrorCode::parse_error, "unknown key purpose: " + std::string(name));
}

namespace {

KeyState parse_key_state(std::string_view name) {
  for (auto s : {KeyState::generated, KeyState::split, KeyState::distributed, KeyState::retired}) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorCode::parse_error, "unknown key state: " + std::string(name));
}

}  // namespace

std::string_view to_string(RejectReason reason) noexcept {
  switch (reason) {
    case RejectReason::replay: return "replay";
    case RejectReason::tag_mismatch: return "tag-mismatch";
    case RejectReason::decrypt_failure: return "decrypt-failure";
    case RejectReason::algebra_failure: return "algebra-failure";
    case RejectReason::checksum_mismatch: return "checksum-mismatch";
    case RejectReason::budget_exhausted: return "budget-exhausted";
    case RejectReason::unknown_context: return "unknown-context";
    case RejectReason::key_retired: return "key-retired";
  }
  return "unknown";
}

std::string AuditRecord::to_json_line() const {
  nlohmann::ordered_json j;
  j["sequence"] = sequence;
  j["op"] = op;
  j["key_id"] = key_id ? nlohmann::ordered_json(to_hex(*key_id)) : nlohmann::ordered_json(nullptr);
  j["context_id_hex"] =
      context_id ? nlohmann::ordered_json(to_hex(*context_id)) : nlohmann::ordered_json(nullptr);
  j["outcome"] = outcome;
  if (reason) j["reason"] = *reason;
  return j.dump();
}

SecureZone::SecureZone(TimestampAuthority& tsa, std::optional<std::uint64_t> seed)
    : tsa_(&tsa), seed_(seed), nonces_(0) {
  nonces_ = NonceSequence(seed ? mix_seed(*seed, kLabelNonces) : [] {
    std::array<std::uint8_t, 8> b{};
    secure_random(b);
    std::uint64_t v = 0;
    for (auto x : b) v = v << 8 | x;
    return v;
  }());
  auto init = [&](Key256& key, std::uint64_t label) {
    if (seed_) {
      Rng(mix_seed(*seed_, label)).fill(key);
    } else {
      secure_random(key);
    }
  };
  init(zone_kek_, kLabelZoneKek);
  init(share_key_, kLabelShareKey);
  init(point_key_, kLabelPointKey);
}

SecureZone::~SecureZone() {
  secure_wipe(zone_kek_);
  secure_wipe(share_key_);
  secure_wipe(point_key_);
  for (auto& [id, key] : keys_) secure_wipe(key.bytes);
}

void SecureZone::fill_random(std::span<std::uint8_t> out, std::optional<std::uint64_t> seed,
                             std::uint64_t label) {
  const std::uint64_t draw = draw_counter_++;
  if (seed) {
    Rng(mix_seed(mix_seed(*seed, label), draw)).fill(out);
  } else if (seed_) {
    Rng(mix_seed(mix_seed(*seed_, kLabelDraw), mix_seed(label, draw))).fill(out);
  } else {
    secure_random(out);
  }
}

std::uint64_t SecureZone::next_seed(std::optional<std::uint64_t> seed, std::uint64_t label) {
  std::array<std::uint8_t, 8> b{};
  fill_random(b, seed, label);
  std::uint64_t v = 0;
  for (auto x : b) v = v << 8 | x;
  return v;
}

SecureZone::ManagedKey& SecureZone::find_key(const KeyId& id) {
  auto it = keys_.find(id);
  if (it == keys_.end()) throw Error(ErrorCode::unknown_key, "unknown key id " + to_hex(id));
  return it->second;
}

const SecureZone::ManagedKey& SecureZone::find_key(const KeyId& id) const {
  auto it = keys_.find(id);
  if (it == keys_.end()) throw Error(ErrorCode::unknown_key, "unknown key id " + to_hex(id));
  return it->second;
}

void SecureZone::advance_state(ManagedKey& key, KeyState next) {
  if (static_cast<int>(next) <= static_cast<int>(key.info.state)) {
    throw Error(ErrorCode::invalid_state, "key state can only move forward (" +
                                              std::string(to_string(key.info.state)) + " -> " +
                                              std::string(to_string(next)) + ")");
  }
  key.info.state = next;
}

void SecureZone::audit(std::string op, std::optional<KeyId> key_id,
                       std::optional<ContextId> context_id, std::string outcome,
                       std::optional<std::string> reason) {
  audit_.push_back({audit_base_ + audit_.size() + 1, std::move(op), key_id, context_id,
                    std::move(outcome), std::move(reason)});
}

KeyId SecureZone::generate_key(KeyPurpose purpose, std::uint64_t usage_budget,
                               std::optional<std::uint64_t> rng_seed) {
  ManagedKey key;
  fill_random(key.bytes, rng_seed, 0x6b6579);
  do {
    fill_random(key.info.id, rng_seed, 0x6964);
  } while (keys_.count(key.info.id) != 0);
  key.info.purpose = purpose;
  key.info.usage_budget = usage_budget;
  key.info.created_at = tsa_->issue(key.info.id);
  const KeyId id = key.info.id;
  keys_.emplace(id, std::move(key));
  audit("generate_key", id, std::nullopt, "ok");
  return id;
}

AeadRecord SecureZone::wrap_key(const KeyId& kek_id, const KeyId& target_id) {
  try {
    const ManagedKey& kek = find_key(kek_id);
    if (kek.info.purpose != KeyPurpose::key_encryption) {
      throw Error(ErrorCode::wrong_purpose, "wrapping requires a key-encryption key");
    }
    if (kek.info.state == KeyState::retired) throw Error(ErrorCode::invalid_state, "KEK is retired");
    const ManagedKey& target = find_key(target_id);
    AeadRecord record = aead_encrypt(kek.bytes, target.bytes, wrap_aad(target_id), nonces_);
    audit("wrap_key", target_id, std::nullopt, "ok");
    return record;
  } catch (const Error& e) {
    audit("wrap_key", target_id, std::nullopt, "error", std::string(to_string(e.code())));
    throw;
  }
}

KeyId SecureZone::unwrap_key(const KeyId& kek_id, const KeyId& wrapped_id, const AeadRecord& record,
                             KeyPurpose purpose, std::uint64_t usage_budget) {
  try {
    const ManagedKey& kek = find_key(kek_id);
    if (kek.info.purpose != KeyPurpose::key_encryption) {
      throw Error(ErrorCode::wrong_purpose, "unwrapping requires a key-encryption key");
    }
    Bytes plain = aead_decrypt(kek.bytes, record, wrap_aad(wrapped_id));
    if (plain.size() != sizeof(Key256)) {
      secure_wipe(plain);
      throw Error(ErrorCode::authentication_failure, "wrapped payload is not a 256-bit key");
    }
    ManagedKey key;
    std::copy(plain.begin(), plain.end(), key.bytes.begin());
    secure_wipe(plain);
    do {
      fill_random(key.info.id, std::nullopt, 0x6964);
    } while (keys_.count(key.info.id) != 0);
    key.info.purpose = purpose;
    key.info.usage_budget = usage_budget;
    key.info.created_at = tsa_->issue(key.info.id);
    const KeyId id = key.info.id;
    keys_.emplace(id, std::move(key));
    audit("unwrap_key", id, std::nullopt, "ok");
    return id;
  } catch (const Error& e) {
    audit("unwrap_key", wrapped_id, std::nullopt, "error", std::string(to_string(e.code())));
    throw;
  }
}

Digest SecureZone::key_fingerprint(const KeyId& id) const {
  return Sha256().update("edgeshare/fingerprint").update(find_key(id).bytes).finish();
}

Distribution SecureZone::split_and_distribute(const KeyId& key_id, const ContextId& context_id,
                                              std::uint32_t q_order,
                                              std::optional<std::uint64_t> rng_seed) {
  try {
    ManagedKey& key = find_key(key_id);
    if (key.info.state != KeyState::generated) {
      throw Error(ErrorCode::already_split, "key " + to_hex(key_id) + " is already " +
                                                std::string(to_string(key.info.state)));
    }
    if (splits_.count(context_id) != 0) {
      throw Error(ErrorCode::already_split, "context " + to_hex(context_id) + " already has a split");
    }
    const auto quasigroup = Quasigroup::generate(q_order, next_seed(rng_seed, 0x7167));
    AeadRecord wrapped = aead_encrypt(zone_kek_, key.bytes, wrap_aad(key_id), nonces_);
    Bytes wrapped_bytes = wrapped.to_bytes();
    SplitResult parts = split(wrapped_bytes, quasigroup, context_id, next_seed(rng_seed, 0x73706c));
    advance_state(key, KeyState::split);

    Distribution out;
    out.edge_share = seal_share(parts.first, share_key_, context_id, nonces_);
    out.cloud_share = seal_share(parts.second, share_key_, context_id, nonces_);
    splits_.emplace(context_id, StoredSplit{parts.record, out.edge_share, key_id, std::nullopt});
    advance_state(key, KeyState::distributed);
    audit("split_and_distribute", key_id, context_id, "ok");
    return out;
  } catch (const Error& e) {
    audit("split_and_distribute", key_id, context_id, "error", std::string(to_string(e.code())));
    throw;
  }
}

Decision SecureZone::authorize_transaction(const ContextId& context_id,
                                           const SealedShare& cloud_share, const Timestamp& ts) {
  auto finish = [&](Decision d, std::optional<KeyId> key_id) {
    audit("authorize_transaction", key_id, context_id, d.accepted ? "accepted" : "rejected",
          d.reason ? std::optional<std::string>(to_string(*d.reason)) : std::nullopt);
    return d;
  };

  auto it = splits_.find(context_id);
  if (it == splits_.end()) return finish(Decision::reject(RejectReason::unknown_context), std::nullopt);
  StoredSplit& stored = it->second;

  if (!verify_freshness(*tsa_, ts, stored.last_seen)) {
    return finish(Decision::reject(RejectReason::replay), stored.key_id);
  }
  stored.last_seen = ts;

  ManagedKey& key = find_key(stored.key_id);
  if (key.info.state == KeyState::retired) {
    return finish(Decision::reject(RejectReason::key_retired), stored.key_id);
  }
  if (key.info.uses >= key.info.usage_budget) {
    return finish(Decision::reject(RejectReason::budget_exhausted), stored.key_id);
  }

  Bytes wrapped;
  try {
    wrapped = combine_and_verify(stored.edge_share, cloud_share, stored.record, share_key_);
  } catch (const Error& e) {
    auto reason = reason_for(e.code());
    return finish(Decision::reject(reason.value_or(RejectReason::decrypt_failure)), stored.key_id);
  }

  // The recombined payload must unwrap to exactly the managed key.
  try {
    Bytes restored = aead_decrypt(zone_kek_, AeadRecord::from_bytes(wrapped), wrap_aad(stored.key_id));
    const bool same = constant_time_equal(restored, key.bytes);
    secure_wipe(restored);
    if (!same) return finish(Decision::reject(RejectReason::checksum_mismatch), stored.key_id);
  } catch (const Error&) {
    return finish(Decision::reject(RejectReason::checksum_mismatch), stored.key_id);
  }
  secure_wipe(wrapped);

  ++key.info.uses;
  return finish(Decision::accept(), stored.key_id);
}

void SecureZone::retire_key(const KeyId& id) {
  try {
    advance_state(find_key(id), KeyState::retired);
    audit("retire_key", id, std::nullopt, "ok");
  } catch (const Error& e) {
    audit("retire_key", id, std::nullopt, "error", std::string(to_string(e.code())));
    throw;
  }
}

const LedgerEntry& SecureZone::register_device(IdentityLedger& ledger, const std::string& device_label,
                                               std::uint64_t rng_seed) {
  try {
    const LedgerEntry& entry = ledger.register_device(device_label, *tsa_, point_key_, rng_seed);
    audit("register_device", std::nullopt, entry.h2, "ok");
    return entry;
  } catch (const Error& e) {
    audit("register_device", std::nullopt, std::nullopt, "error", std::string(to_string(e.code())));
    throw;
  }
}

std::optional<ManagedKeyInfo> SecureZone::key_info(const KeyId& id) const {
  auto it = keys_.find(id);
  if (it == keys_.end()) return std::nullopt;
  return it->second.info;
}

std::vector<ManagedKeyInfo> SecureZone::list_keys() const {
  std::vector<ManagedKeyInfo> out;
  for (const auto& [id, key] : keys_) out.push_back(key.info);
  return out;
}

nlohmann::json SecureZone::public_state() const {
  nlohmann::json keys = nlohmann::json::array();
  for (const auto& [id, key] : keys_) {
    keys.push_back({{"key_id", to_hex(id)},
                    {"purpose", to_string(key.info.purpose)},
                    {"state", to_string(key.info.state)},
                    {"usage_budget", key.info.usage_budget},
                    {"uses", key.info.uses},
                    {"created_at", to_json(key.info.created_at)}});
  }
  nlohmann::json contexts = nlohmann::json::array();
  for (const auto& [ctx, stored] : splits_) {
    contexts.push_back({{"context_id", to_hex(ctx)}, {"key_id", to_hex(stored.key_id)}});
  }
  return {{"keys", keys}, {"split_contexts", contexts}, {"audit_records", audit_base_ + audit_.size()}};
}

nlohmann::json SecureZone::persist() const {
  nlohmann::json keys = nlohmann::json::array();
  for (const auto& [id, key] : keys_) {
    keys.push_back({{"key_id", to_hex(id)},
                    {"purpose", to_string(key.info.purpose)},
                    {"state", to_string(key.info.state)},
                    {"usage_budget", key.info.usage_budget},
                    {"uses", key.info.uses},
                    {"created_at", to_json(key.info.created_at)},
                    {"bytes", to_hex(key.bytes)}});
  }
  nlohmann::json splits = nlohmann::json::array();
  for (const auto& [ctx, stored] : splits_) {
    nlohmann::json s = {{"record", to_json(stored.record)},
                        {"edge_share", to_json(stored.edge_share)},
                        {"key_id", to_hex(stored.key_id)}};
    if (stored.last_seen) s["last_seen"] = to_json(*stored.last_seen);
    splits.push_back(std::move(s));
  }
  nlohmann::json j = {{"version", 1},
                      {"zone_kek", to_hex(zone_kek_)},
                      {"share_key", to_hex(share_key_)},
                      {"point_key", to_hex(point_key_)},
                      {"nonce_prefix", to_hex(nonces_.prefix())},
                      {"nonce_counter", nonces_.issued()},
                      {"draw_counter", draw_counter_},
                      {"audit_sequence", audit_base_ + audit_.size()},
                      {"keys", keys},
                      {"splits", splits}};
  j["seed"] = seed_ ? nlohmann::json(*seed_) : nlohmann::json(nullptr);
  return j;
}

SecureZone SecureZone::restore(const nlohmann::json& state, TimestampAuthority& tsa) {
  try {
    std::optional<std::uint64_t> seed;
    if (!state.at("seed").is_null()) seed = state.at("seed").get<std::uint64_t>();
    SecureZone zone(tsa, seed);
    zone.zone_kek_ = key_from_hex(state.at("zone_kek").get<std::string>());
    zone.share_key_ = key_from_hex(state.at("share_key").get<std::string>());
    zone.point_key_ = key_from_hex(state.at("point_key").get<std::string>());
    zone.nonces_ = NonceSequence(fixed_from_hex<4>(state.at("nonce_prefix").get<std::string>()),
                                 state.at("nonce_counter").get<std::uint64_t>());
    zone.draw_counter_ = state.at("draw_counter").get<std::uint64_t>();
    zone.audit_base_ = state.at("audit_sequence").get<std::uint64_t>();
    for (const auto& k : state.at("keys")) {
      ManagedKey key;
      key.info.id = fixed_from_hex<16>(k.at("key_id").get<std::string>());
      key.info.purpose = parse_key_purpose(k.at("purpose").get<std::string>());
      key.info.state = parse_key_state(k.at("state").get<std::string>());
      key.info.usage_budget = k.at("usage_budget").get<std::uint64_t>();
      key.info.uses = k.at("uses").get<std::uint64_t>();
      key.info.created_at = timestamp_from_json(k.at("created_at"));
      key.bytes = key_from_hex(k.at("bytes").get<std::string>());
      zone.keys_.emplace(key.info.id, std::move(key));
    }
    for (const auto& s : state.at("splits")) {
      StoredSplit stored;
      stored.record = split_record_from_json(s.at("record"));
      stored.edge_share = sealed_share_from_json(s.at("edge_share"));
      stored.key_id = fixed_from_hex<16>(s.at("key_id").get<std::string>());
      if (s.contains("last_seen")) stored.last_seen = timestamp_from_json(s.at("last_seen"));
      zone.splits_.emplace(stored.record.context_id, std::move(stored));
    }
    return zone;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::invalid_state, std::string("corrupted zone state: ") + ex.what());
  } catch (const Error& ex) {
    throw Error(ErrorCode::invalid_state, std::string("corrupted zone state: ") + ex.what());
  }
}

}  // namespace edgeshare
