#include "edgeshare/ledger.hpp"

#include <json.hpp>

#include <sstream>

#include "edgeshare/error.hpp"

namespace edgeshare {

namespace {

using ordered_json = nlohmann::ordered_json;

Bytes point_aad(const std::string& group_id, const std::string& label) {
  Bytes aad;
  append(aad, as_bytes("edgeshare/point"));
  append(aad, as_bytes(group_id));
  aad.push_back(0);
  append(aad, as_bytes(label));
  return aad;
}

LedgerEntry parse_entry_line(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    LedgerEntry e;
    e.index = j.at("index").get<std::uint64_t>();
    e.device_label = j.at("device_label").get<std::string>();
    e.sealed_point.nonce = fixed_from_hex<12>(j.at("nonce_hex").get<std::string>());
    e.sealed_point.ciphertext = from_hex(j.at("ciphertext_hex").get<std::string>());
    e.sealed_point.tag = fixed_from_hex<16>(j.at("tag_hex").get<std::string>());
    e.timestamp.epoch_seconds = j.at("epoch_seconds").get<std::uint64_t>();
    e.timestamp.sequence = j.at("sequence").get<std::uint64_t>();
    e.h1 = fixed_from_hex<32>(j.at("h1_hex").get<std::string>());
    e.h2 = fixed_from_hex<32>(j.at("h2_hex").get<std::string>());
    // Only the exact rendering is accepted, so case or spacing edits count as tamper.
    if (entry_line(e) != line) throw Error(ErrorCode::parse_error, "non-canonical ledger line");
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::parse_error, ex.what());
  }
}

}  // namespace

Bytes LedgerEntry::chain_bytes() const {
  Bytes out = sealed_point.to_bytes();
  append(out, timestamp.to_bytes());
  append(out, h1);
  append(out, h2);
  return out;
}

LedgerEntry LedgerEntry::from_chain_bytes(ByteView data, const LedgerEntry& meta) {
  constexpr std::size_t kTail = 16 + 32 + 32;
  if (data.size() < kTail) throw Error(ErrorCode::parse_error, "chain record too short");
  LedgerEntry e = meta;
  e.sealed_point = AeadRecord::from_bytes(data.first(data.size() - kTail));
  ByteReader reader(data.last(kTail));
  e.timestamp.epoch_seconds = reader.u64();
  e.timestamp.sequence = reader.u64();
  e.h1 = reader.fixed<32>();
  e.h2 = reader.fixed<32>();
  return e;
}

Digest compute_h1(const AeadRecord& sealed_point, const Timestamp& ts) {
  return Sha256().update(sealed_point.to_bytes()).update(ts.to_bytes()).finish();
}

Digest compute_h2(const std::optional<Digest>& previous_h2, const Digest& h1) {
  if (!previous_h2) return h1;
  return Sha256().update(*previous_h2).update(h1).finish();
}

ChainReport verify_chain(std::span<const LedgerEntry> entries) {
  std::optional<Digest> previous;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const Digest h1 = compute_h1(e.sealed_point, e.timestamp);
    const Digest h2 = compute_h2(previous, h1);
    if (e.index != i || h1 != e.h1 || h2 != e.h2) return {false, i};
    previous = e.h2;
  }
  return {true, std::nullopt};
}

IdentityLedger::IdentityLedger(std::string group_id, WeierstrassCurve curve)
    : group_id_(std::move(group_id)), curve_(std::move(curve)), used_(curve_.coordinate_width()) {}

const LedgerEntry& IdentityLedger::register_device(const std::string& device_label,
                                                   TimestampAuthority& tsa, const Key256& point_key,
                                                   std::uint64_t rng_seed) {
  for (const auto& e : entries_) {
    if (e.device_label == device_label) {
      throw Error(ErrorCode::duplicate_device, "device already registered: " + device_label);
    }
  }
  Rng rng(rng_seed);
  // (a) unique point, sealed at the edge
  const CurvePoint point = select_unique_point(curve_, used_, rng);
  Bytes encoded = point.encode(curve_.coordinate_width());
  std::array<std::uint8_t, 4> prefix{};
  rng.fill(prefix);
  NonceSequence nonces(prefix, entries_.size());

  LedgerEntry entry;
  entry.index = entries_.size();
  entry.device_label = device_label;
  entry.sealed_point = aead_encrypt(point_key, encoded, point_aad(group_id_, device_label), nonces);
  secure_wipe(encoded);
  // (b) H1(point, timestamp)
  entry.timestamp = tsa.issue(entry.sealed_point.to_bytes());
  entry.h1 = compute_h1(entry.sealed_point, entry.timestamp);
  // (c) H2(point, timestamp, history)
  entry.h2 = compute_h2(entries_.empty() ? std::nullopt : std::optional<Digest>(entries_.back().h2),
                        entry.h1);
  // (d) record
  used_.insert(point);
  entries_.push_back(std::move(entry));
  return entries_.back();
}

const LedgerEntry* IdentityLedger::find(const Digest& device_id) const {
  for (const auto& e : entries_) {
    if (e.h2 == device_id) return &e;
  }
  return nullptr;
}

IdentityLedger IdentityLedger::restore(std::string group_id, WeierstrassCurve curve,
                                       std::vector<LedgerEntry> entries, PointSet used) {
  IdentityLedger ledger(std::move(group_id), std::move(curve));
  if (!edgeshare::verify_chain(entries).valid) {
    throw Error(ErrorCode::invalid_state, "persisted ledger fails chain verification");
  }
  ledger.entries_ = std::move(entries);
  ledger.used_ = std::move(used);
  return ledger;
}

std::string snapshot_header_line(const std::string& group_id, const CurveCoefficients& curve,
                                 std::size_t entry_count) {
  ordered_json header;
  header["group_id"] = group_id;
  header["p_hex"] = to_hex(curve.p);
  header["a1_hex"] = to_hex(curve.a1);
  header["a2_hex"] = to_hex(curve.a2);
  header["a3_hex"] = to_hex(curve.a3);
  header["a4_hex"] = to_hex(curve.a4);
  header["a6_hex"] = to_hex(curve.a6);
  header["entry_count"] = entry_count;
  return header.dump();
}

std::string entry_line(const LedgerEntry& e) {
  ordered_json j;
  j["index"] = e.index;
  j["device_label"] = e.device_label;
  j["nonce_hex"] = to_hex(e.sealed_point.nonce);
  j["ciphertext_hex"] = to_hex(e.sealed_point.ciphertext);
  j["tag_hex"] = to_hex(e.sealed_point.tag);
  j["epoch_seconds"] = e.timestamp.epoch_seconds;
  j["sequence"] = e.timestamp.sequence;
  j["h1_hex"] = to_hex(e.h1);
  j["h2_hex"] = to_hex(e.h2);
  return j.dump();
}

LedgerSnapshot sync_to_cloud(const IdentityLedger& ledger) {
  const auto report = ledger.verify_chain();
  if (!report.valid) {
    throw Error(ErrorCode::refuse_sync,
                "refusing to sync a broken chain (first bad entry " +
                    std::to_string(*report.first_bad_index) + ")");
  }
  std::string out = snapshot_header_line(ledger.group_id(), ledger.curve().coefficients(),
                                         ledger.entries().size());
  out += '\n';
  for (const auto& e : ledger.entries()) {
    out += entry_line(e);
    out += '\n';
  }
  return {std::move(out)};
}

ChainReport LedgerReplica::verify() const {
  ChainReport report = verify_chain(entries);
  if (!report.valid) return report;
  if (first_malformed) return {false, first_malformed};
  if (declared_entries != entries.size()) return {false, std::min(declared_entries, entries.size())};
  return report;
}

LedgerReplica parse_snapshot(std::string_view jsonl) {
  std::istringstream in{std::string(jsonl)};
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::parse_error, "snapshot has no header line");
  LedgerReplica replica;
  try {
    const auto h = nlohmann::json::parse(line);
    replica.group_id = h.at("group_id").get<std::string>();
    replica.curve.p = mpz_from_hex(h.at("p_hex").get<std::string>());
    replica.curve.a1 = mpz_from_hex(h.at("a1_hex").get<std::string>());
    replica.curve.a2 = mpz_from_hex(h.at("a2_hex").get<std::string>());
    replica.curve.a3 = mpz_from_hex(h.at("a3_hex").get<std::string>());
    replica.curve.a4 = mpz_from_hex(h.at("a4_hex").get<std::string>());
    replica.curve.a6 = mpz_from_hex(h.at("a6_hex").get<std::string>());
    replica.declared_entries = h.at("entry_count").get<std::size_t>();
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::parse_error, std::string("bad snapshot header: ") + ex.what());
  }
  std::size_t position = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      replica.entries.push_back(parse_entry_line(line));
    } catch (const Error&) {
      replica.first_malformed = position;
      break;
    }
    ++position;
  }
  return replica;
}

}  // namespace edgeshare
