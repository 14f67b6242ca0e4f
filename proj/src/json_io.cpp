#include "edgeshare/json_io.hpp"

#include "edgeshare/error.hpp"

namespace edgeshare {

namespace {

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::parse_error, ex.what());
  }
}

}  // namespace

nlohmann::json to_json(const SealedShare& share) {
  return {{"index", share.index},
          {"nonce", to_hex(share.record.nonce)},
          {"ciphertext", to_hex(share.record.ciphertext)},
          {"tag", to_hex(share.record.tag)},
          {"binding_tag", to_hex(share.binding_tag)}};
}

SealedShare sealed_share_from_json(const nlohmann::json& j) {
  return guarded([&] {
    SealedShare s;
    s.index = j.at("index").get<std::uint8_t>();
    s.record.nonce = fixed_from_hex<12>(j.at("nonce").get<std::string>());
    s.record.ciphertext = from_hex(j.at("ciphertext").get<std::string>());
    s.record.tag = fixed_from_hex<16>(j.at("tag").get<std::string>());
    s.binding_tag = fixed_from_hex<32>(j.at("binding_tag").get<std::string>());
    return s;
  });
}

nlohmann::json to_json(const Timestamp& ts) {
  return {{"epoch_seconds", ts.epoch_seconds}, {"issuer", ts.issuer}, {"sequence", ts.sequence}};
}

Timestamp timestamp_from_json(const nlohmann::json& j) {
  return guarded([&] {
    return Timestamp{j.at("epoch_seconds").get<std::uint64_t>(), j.at("issuer").get<std::string>(),
                     j.at("sequence").get<std::uint64_t>()};
  });
}

nlohmann::json to_json(const AeadRecord& record) {
  return {{"nonce", to_hex(record.nonce)},
          {"ciphertext", to_hex(record.ciphertext)},
          {"tag", to_hex(record.tag)}};
}

AeadRecord aead_record_from_json(const nlohmann::json& j) {
  return guarded([&] {
    AeadRecord r;
    r.nonce = fixed_from_hex<12>(j.at("nonce").get<std::string>());
    r.ciphertext = from_hex(j.at("ciphertext").get<std::string>());
    r.tag = fixed_from_hex<16>(j.at("tag").get<std::string>());
    return r;
  });
}

nlohmann::json to_json(const SplitRecord& record) {
  return {{"context_id", to_hex(record.context_id)},
          {"order", record.quasigroup.order},
          {"seed", record.quasigroup.seed},
          {"secret_len", record.secret_len},
          {"secret_checksum", to_hex(record.secret_checksum)},
          {"expected_tags", {to_hex(record.expected_tags[0]), to_hex(record.expected_tags[1])}}};
}

SplitRecord split_record_from_json(const nlohmann::json& j) {
  return guarded([&] {
    SplitRecord r;
    r.context_id = fixed_from_hex<32>(j.at("context_id").get<std::string>());
    r.quasigroup.order = j.at("order").get<std::uint32_t>();
    r.quasigroup.seed = j.at("seed").get<std::uint64_t>();
    r.secret_len = j.at("secret_len").get<std::uint64_t>();
    r.secret_checksum = fixed_from_hex<32>(j.at("secret_checksum").get<std::string>());
    const auto& tags = j.at("expected_tags");
    r.expected_tags = {fixed_from_hex<32>(tags.at(0).get<std::string>()),
                       fixed_from_hex<32>(tags.at(1).get<std::string>())};
    return r;
  });
}

}  // namespace edgeshare
