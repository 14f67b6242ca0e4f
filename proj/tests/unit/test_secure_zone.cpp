#include <gtest/gtest.h>

#include "edgeshare/error.hpp"
#include "edgeshare/json_io.hpp"
#include "edgeshare/rng.hpp"
#include "edgeshare/secure_zone.hpp"

using namespace edgeshare;

namespace {

ContextId ctx(std::uint8_t v) {
  ContextId c{};
  c.fill(v);
  return c;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::io_error;
}

struct ZoneFixture {
  std::uint64_t tick = 1000;
  TimestampAuthority tsa{"zone-tsa", [this] { return tick++; }};
  SecureZone zone{tsa, 42};

  Timestamp fresh() { return tsa.issue({}); }
};

}  // namespace

TEST(SecureZone, GenerateDistinctAndDeterministic) {
  ZoneFixture a, b;
  const KeyId k1 = a.zone.generate_key(KeyPurpose::data_encryption, 10, 1);
  const KeyId k2 = a.zone.generate_key(KeyPurpose::data_encryption, 10, 2);
  EXPECT_NE(k1, k2);
  EXPECT_EQ(b.zone.generate_key(KeyPurpose::data_encryption, 10, 1), k1);
  EXPECT_EQ(a.zone.key_fingerprint(k1), b.zone.key_fingerprint(k1));
  const auto info = a.zone.key_info(k1);
  ASSERT_TRUE(info);
  EXPECT_EQ(info->state, KeyState::generated);
  EXPECT_EQ(info->usage_budget, 10u);
}

TEST(SecureZone, ExportedStateHasNoKeyBytes) {
  ZoneFixture f;
  const KeyId k = f.zone.generate_key(KeyPurpose::data_encryption);
  const Distribution d = f.zone.split_and_distribute(k, ctx(1));
  const auto stored = f.zone.persist();
  std::string exported = f.zone.public_state().dump() + to_json(d.cloud_share).dump();
  for (const auto& rec : f.zone.audit_log()) exported += rec.to_json_line();
  for (const auto& key : stored.at("keys")) {
    EXPECT_EQ(exported.find(key.at("bytes").get<std::string>()), std::string::npos);
  }
  EXPECT_EQ(exported.find("\"bytes\""), std::string::npos);
  EXPECT_EQ(exported.find("secret_checksum"), std::string::npos);
}

TEST(SecureZone, WrapUnwrapRoundTrip) {
  ZoneFixture f;
  const KeyId kek = f.zone.generate_key(KeyPurpose::key_encryption);
  const KeyId target = f.zone.generate_key(KeyPurpose::data_encryption);
  const AeadRecord wrapped = f.zone.wrap_key(kek, target);
  const KeyId restored = f.zone.unwrap_key(kek, target, wrapped, KeyPurpose::data_encryption);
  EXPECT_NE(restored, target);
  EXPECT_EQ(f.zone.key_fingerprint(restored), f.zone.key_fingerprint(target));
}

TEST(SecureZone, WrapErrors) {
  ZoneFixture f;
  const KeyId kek = f.zone.generate_key(KeyPurpose::key_encryption);
  const KeyId data = f.zone.generate_key(KeyPurpose::data_encryption);
  EXPECT_EQ(code_of([&] { f.zone.wrap_key(data, kek); }), ErrorCode::wrong_purpose);
  EXPECT_EQ(code_of([&] { f.zone.wrap_key(kek, KeyId{}); }), ErrorCode::unknown_key);
  AeadRecord wrapped = f.zone.wrap_key(kek, data);
  wrapped.ciphertext[0] ^= 1;
  EXPECT_EQ(code_of([&] { f.zone.unwrap_key(kek, data, wrapped, KeyPurpose::data_encryption); }),
            ErrorCode::authentication_failure);
}

TEST(SecureZone, SplitRolesAndStates) {
  ZoneFixture f;
  const KeyId k = f.zone.generate_key(KeyPurpose::data_encryption);
  const Distribution d = f.zone.split_and_distribute(k, ctx(1));
  EXPECT_EQ(d.edge_share.index, 1);
  EXPECT_EQ(d.cloud_share.index, 2);
  EXPECT_EQ(f.zone.key_info(k)->state, KeyState::distributed);
  EXPECT_TRUE(f.zone.has_split(ctx(1)));
  EXPECT_EQ(code_of([&] { f.zone.split_and_distribute(k, ctx(2)); }), ErrorCode::already_split);
  EXPECT_EQ(code_of([&] { f.zone.split_and_distribute(KeyId{}, ctx(3)); }), ErrorCode::unknown_key);
}

TEST(SecureZone, HonestTransactionAccepted) {
  ZoneFixture f;
  const KeyId k = f.zone.generate_key(KeyPurpose::data_encryption);
  const Distribution d = f.zone.split_and_distribute(k, ctx(1), 16);
  const Decision dec = f.zone.authorize_transaction(ctx(1), d.cloud_share, f.fresh());
  EXPECT_TRUE(dec.accepted);
  EXPECT_EQ(f.zone.key_info(k)->uses, 1u);
}

TEST(SecureZone, ReplayRejected) {
  ZoneFixture f;
  const KeyId k = f.zone.generate_key(KeyPurpose::data_encryption);
  const Distribution d = f.zone.split_and_distribute(k, ctx(1));
  const Timestamp ts = f.fresh();
  ASSERT_TRUE(f.zone.authorize_transaction(ctx(1), d.cloud_share, ts).accepted);
  const Decision again = f.zone.authorize_transaction(ctx(1), d.cloud_share, ts);
  EXPECT_FALSE(again.accepted);
  EXPECT_EQ(again.reason, RejectReason::replay);
}

TEST(SecureZone, ForgedSharesRejected) {
  ZoneFixture f;
  const KeyId k = f.zone.generate_key(KeyPurpose::data_encryption);
  const Distribution d = f.zone.split_and_distribute(k, ctx(1));
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    SealedShare forged = d.cloud_share;
    if (i % 2 == 0) {
      rng.fill(forged.record.ciphertext);
      rng.fill(forged.record.tag);
    } else {
      rng.fill(forged.binding_tag);
    }
    const Decision dec = f.zone.authorize_transaction(ctx(1), forged, f.fresh());
    ASSERT_FALSE(dec.accepted);
    ASSERT_TRUE(dec.reason == RejectReason::decrypt_failure || dec.reason == RejectReason::tag_mismatch);
  }
  // The edge share presented as the cloud share is also refused.
  EXPECT_FALSE(f.zone.authorize_transaction(ctx(1), d.edge_share, f.fresh()).accepted);
  EXPECT_TRUE(f.zone.authorize_transaction(ctx(1), d.cloud_share, f.fresh()).accepted);
}

TEST(SecureZone, CloudShareForOtherContextRejected) {
  ZoneFixture f;
  const Distribution d1 = f.zone.split_and_distribute(f.zone.generate_key(KeyPurpose::data_encryption), ctx(1));
  const Distribution d2 = f.zone.split_and_distribute(f.zone.generate_key(KeyPurpose::data_encryption), ctx(2));
  const Decision dec = f.zone.authorize_transaction(ctx(1), d2.cloud_share, f.fresh());
  EXPECT_FALSE(dec.accepted);
  EXPECT_EQ(f.zone.authorize_transaction(ctx(9), d1.cloud_share, f.fresh()).reason,
            RejectReason::unknown_context);
}

TEST(SecureZone, BudgetExhaustion) {
  ZoneFixture f;
  const KeyId k = f.zone.generate_key(KeyPurpose::data_encryption, 3);
  const Distribution d = f.zone.split_and_distribute(k, ctx(1), 16);
  for (int i = 0; i < 3; ++i) ASSERT_TRUE(f.zone.authorize_transaction(ctx(1), d.cloud_share, f.fresh()).accepted);
  const Decision dec = f.zone.authorize_transaction(ctx(1), d.cloud_share, f.fresh());
  EXPECT_FALSE(dec.accepted);
  EXPECT_EQ(dec.reason, RejectReason::budget_exhausted);
}

TEST(SecureZone, RetiredKeyRejectedAndStatesOnlyForward) {
  ZoneFixture f;
  const KeyId k = f.zone.generate_key(KeyPurpose::data_encryption);
  const Distribution d = f.zone.split_and_distribute(k, ctx(1), 16);
  f.zone.retire_key(k);
  EXPECT_EQ(f.zone.authorize_transaction(ctx(1), d.cloud_share, f.fresh()).reason, RejectReason::key_retired);
  EXPECT_EQ(code_of([&] { f.zone.retire_key(k); }), ErrorCode::invalid_state);
}

TEST(SecureZone, AuditLogCountsEveryMutatingCall) {
  ZoneFixture f;
  std::size_t calls = 0;
  const KeyId k = f.zone.generate_key(KeyPurpose::data_encryption);
  ++calls;
  const Distribution d = f.zone.split_and_distribute(k, ctx(1), 16);
  ++calls;
  try {
    f.zone.split_and_distribute(k, ctx(2));
  } catch (const Error&) {
  }
  ++calls;
  f.zone.authorize_transaction(ctx(1), d.cloud_share, f.fresh());
  ++calls;
  f.zone.authorize_transaction(ctx(1), SealedShare{}, f.fresh());
  ++calls;
  f.zone.retire_key(k);
  ++calls;
  const auto& log = f.zone.audit_log();
  ASSERT_EQ(log.size(), calls);
  for (std::size_t i = 0; i < log.size(); ++i) EXPECT_EQ(log[i].sequence, i + 1);
  EXPECT_EQ(log[2].outcome, "error");
  EXPECT_EQ(log[4].outcome, "rejected");
  const auto line = nlohmann::json::parse(log[4].to_json_line());
  EXPECT_EQ(line.at("op"), "authorize_transaction");
  EXPECT_TRUE(line.contains("reason"));
  EXPECT_TRUE(line.contains("context_id_hex"));
}

TEST(SecureZone, PersistRestoreContinuesSession) {
  ZoneFixture f;
  const KeyId k = f.zone.generate_key(KeyPurpose::data_encryption);
  const Distribution d = f.zone.split_and_distribute(k, ctx(1), 16);
  const Timestamp used = f.fresh();
  ASSERT_TRUE(f.zone.authorize_transaction(ctx(1), d.cloud_share, used).accepted);
  const auto saved = f.zone.persist();

  SecureZone restored = SecureZone::restore(saved, f.tsa);
  EXPECT_EQ(restored.key_fingerprint(k), f.zone.key_fingerprint(k));
  EXPECT_EQ(restored.authorize_transaction(ctx(1), d.cloud_share, used).reason, RejectReason::replay);
  EXPECT_TRUE(restored.authorize_transaction(ctx(1), d.cloud_share, f.fresh()).accepted);
  EXPECT_EQ(restored.public_state().at("audit_records"), 5);

  auto broken = saved;
  broken["keys"][0]["bytes"] = "zz";
  EXPECT_EQ(code_of([&] { SecureZone::restore(broken, f.tsa); }), ErrorCode::invalid_state);
}
