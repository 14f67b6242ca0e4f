#pragma once

#include <json.hpp>

#include "edgeshare/crypto.hpp"
#include "edgeshare/secret_split.hpp"

namespace edgeshare {

/// {index, nonce, ciphertext, tag, binding_tag}, all byte fields as
/// lowercase hex.
nlohmann::json to_json(const SealedShare& share);
SealedShare sealed_share_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Timestamp& ts);
Timestamp timestamp_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AeadRecord& record);
AeadRecord aead_record_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SplitRecord& record);
SplitRecord split_record_from_json(const nlohmann::json& j);

}  // namespace edgeshare
