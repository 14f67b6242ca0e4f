#include <gtest/gtest.h>

#include <chrono>

#include "edgeshare/error.hpp"
#include "edgeshare/rng.hpp"
#include "edgeshare/secret_split.hpp"
#include "oracles.hpp"

using namespace edgeshare;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::io_error;
}

Bytes random_bytes(Rng& rng, std::size_t n) {
  Bytes b(n);
  rng.fill(b);
  return b;
}

ContextId context(std::uint8_t fill) {
  ContextId c{};
  c.fill(fill);
  return c;
}

Key256 key(std::uint8_t fill) {
  Key256 k{};
  k.fill(fill);
  return k;
}

struct Sealed {
  SplitResult split;
  SealedShare first;
  SealedShare second;
};

Sealed make_sealed(ByteView secret, const Quasigroup& q, const Key256& k, std::uint64_t seed) {
  Sealed s{split(secret, q, context(7), seed), {}, {}};
  NonceSequence nonces(seed);
  s.first = seal_share(s.split.first, k, context(7), nonces);
  s.second = seal_share(s.split.second, k, context(7), nonces);
  return s;
}

}  // namespace

TEST(Encoding, Examples) {
  EXPECT_EQ(encode_secret(Bytes{0xFF}, 16), (std::vector<Element>{15, 15}));
  EXPECT_EQ(encode_secret(Bytes{0x00}, 2), std::vector<Element>(8, 0));
  EXPECT_EQ(encode_secret(Bytes{0xAB, 0xCD}, 16), (std::vector<Element>{10, 11, 12, 13}));
  EXPECT_EQ(encode_secret(Bytes{0xAB, 0xCD}, 256), (std::vector<Element>{0xAB, 0xCD}));
  EXPECT_EQ(code_of([] { encode_secret(Bytes{}, 16); }), ErrorCode::empty_secret);
}

TEST(Encoding, DigitCountRule) {
  EXPECT_EQ(digit_count(1, 2), 8u);
  EXPECT_EQ(digit_count(1, 3), 8u);    // floor(log2 3) = 1
  EXPECT_EQ(digit_count(3, 8), 8u);    // 24 bits / 3
  EXPECT_EQ(digit_count(2, 10), 6u);   // ceil(16 / 3)
  EXPECT_EQ(digit_count(32, 256), 32u);
  EXPECT_EQ(digit_count(5, 4096), 4u);  // ceil(40 / 12)
}

TEST(Encoding, NonPowerOfTwoBaseDigits) {
  // 0x0102 = 258 = 2*125 + 0*25 + 1*5 + 3 in base 5; digit count = ceil(16/2) = 8
  EXPECT_EQ(encode_secret(Bytes{0x01, 0x02}, 5), (std::vector<Element>{0, 0, 0, 0, 2, 0, 1, 3}));
}

TEST(Encoding, RoundTripAcrossOrders) {
  Rng rng(5);
  for (std::uint32_t n : {2u, 3u, 4u, 5u, 7u, 10u, 16u, 100u, 255u, 256u, 257u, 1000u, 4096u}) {
    for (std::size_t len : {1u, 2u, 3u, 17u, 64u}) {
      const Bytes s = random_bytes(rng, len);
      const auto digits = encode_secret(s, n);
      ASSERT_EQ(digits.size(), digit_count(len, n));
      for (auto d : digits) ASSERT_LT(d, n);
      ASSERT_EQ(decode_secret(digits, n, len), s) << "n=" << n << " len=" << len;
    }
  }
}

TEST(Split, ModularAdditionDigit) {
  const Quasigroup q = Quasigroup::from_table(oracle::cyclic_table(3));
  // share2 = r \ s; with r = 1, s = 2: 1 + z = 2 -> z = 1
  EXPECT_EQ(q.left_divide(1, 2), 1);
  Rng rng(1);
  const std::vector<Element> secret{2, 0, 1, 2};
  auto [first, second] = split_digits(secret, q, rng);
  for (std::size_t i = 0; i < secret.size(); ++i) {
    EXPECT_EQ((first[i] + second[i]) % 3, secret[i]);
  }
  EXPECT_EQ(combine_digits(first, second, q), secret);
}

TEST(Split, RequiresGeneratedQuasigroup) {
  const Quasigroup q = Quasigroup::from_table(oracle::cyclic_table(3));
  EXPECT_EQ(code_of([&] { split(Bytes{1}, q, context(1), 1); }), ErrorCode::malformed_table);
}

TEST(Split, RoundTripManySeeds) {
  Rng rng(11);
  for (std::uint32_t n : {2u, 4u, 16u, 256u}) {
    const Quasigroup q = Quasigroup::generate(n, n);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const Bytes s = random_bytes(rng, 1 + rng.uniform(seed < 5 ? 4096 : 64));
      const SplitResult r = split(s, q, context(1), seed);
      ASSERT_EQ(r.first.digits.size(), r.second.digits.size());
      ASSERT_EQ(decode_secret(combine_digits(r.first.digits, r.second.digits, q), n, s.size()), s);
    }
  }
}

TEST(Split, RecordContents) {
  const Bytes s{1, 2, 3, 4};
  const Quasigroup q = Quasigroup::generate(16, 99);
  const SplitResult r = split(s, q, context(3), 5);
  EXPECT_EQ(r.record.context_id, context(3));
  EXPECT_EQ(r.record.quasigroup, (QuasigroupParams{16, 99}));
  EXPECT_EQ(r.record.secret_checksum, oracle::sha256(s));
  EXPECT_EQ(r.record.secret_len, 4u);
  EXPECT_EQ(r.record.expected_tags[0], binding_tag(r.first, context(3)));
  EXPECT_EQ(r.record.expected_tags[1], binding_tag(r.second, context(3)));
  EXPECT_EQ(r.first.index, 1);
  EXPECT_EQ(r.second.index, 2);
}

TEST(Split, BindingTagLayout) {
  PlainShare share{2, 16, {1, 2, 3}, 2};
  const Bytes canon = share.canonical_bytes();
  EXPECT_EQ(canon, (Bytes{2, 0, 16, 0, 0, 0, 3, 0, 1, 0, 2, 0, 3}));
  Bytes input = canon;
  input.push_back(2);
  const ContextId ctx = context(9);
  input.insert(input.end(), ctx.begin(), ctx.end());
  EXPECT_EQ(binding_tag(share, ctx), oracle::sha256(input));
  EXPECT_EQ(PlainShare::from_canonical_bytes(canon, 2), share);
}

TEST(Split, PerDigitHidingExhaustive) {
  // For every fixed secret digit s, ranging r over [0, n) makes both share
  // digits hit every value exactly once.
  for (std::uint32_t n : {2u, 3u, 5u, 8u, 16u}) {
    const Quasigroup q = Quasigroup::generate(n, 1234 + n);
    for (Element s = 0; s < n; ++s) {
      std::vector<int> second_counts(n), recovered(n);
      for (Element r = 0; r < n; ++r) {
        ++second_counts[q.ldiv(r, s)];
      }
      for (Element b = 0; b < n; ++b) {
        ++recovered[q.mul(s, b)];  // fixing share1 and varying share2 spans all secrets
      }
      for (std::uint32_t v = 0; v < n; ++v) {
        ASSERT_EQ(second_counts[v], 1);
        ASSERT_EQ(recovered[v], 1);
      }
    }
  }
}

TEST(Seal, RoundTripAndWrongKey) {
  const Quasigroup q = Quasigroup::generate(256, 1);
  const Sealed s = make_sealed(Bytes{9, 8, 7}, q, key(1), 3);
  EXPECT_EQ(unseal_share(s.first, key(1), context(7), 3), s.split.first);
  EXPECT_EQ(unseal_share(s.second, key(1), context(7), 3), s.split.second);
  EXPECT_EQ(code_of([&] { unseal_share(s.first, key(2), context(7), 3); }), ErrorCode::authentication_failure);
  EXPECT_EQ(code_of([&] { unseal_share(s.first, key(1), context(8), 3); }), ErrorCode::authentication_failure);
}

TEST(Seal, TwoSealsDifferInCiphertextNotTag) {
  const Quasigroup q = Quasigroup::generate(16, 1);
  const SplitResult r = split(Bytes{1, 2}, q, context(1), 1);
  NonceSequence nonces(4);
  const SealedShare a = seal_share(r.second, key(1), context(1), nonces);
  const SealedShare b = seal_share(r.second, key(1), context(1), nonces);
  EXPECT_NE(a.record.nonce, b.record.nonce);
  EXPECT_NE(a.record.ciphertext, b.record.ciphertext);
  EXPECT_EQ(a.binding_tag, b.binding_tag);
}

TEST(Combine, HonestShares) {
  const Quasigroup q = Quasigroup::generate(256, 77);
  const Bytes secret{0xde, 0xad, 0xbe, 0xef};
  const Sealed s = make_sealed(secret, q, key(1), 1);
  EXPECT_EQ(combine_and_verify(s.first, s.second, s.split.record, key(1)), secret);
}

TEST(Combine, StaleTagIsTagMismatch) {
  const Quasigroup q = Quasigroup::generate(16, 77);
  Sealed s = make_sealed(Bytes{1, 2, 3}, q, key(1), 1);
  PlainShare altered = s.split.second;
  altered.digits[0] = static_cast<Element>((altered.digits[0] + 1) % 16);
  NonceSequence nonces(99);
  SealedShare forged = seal_share(altered, key(1), context(7), nonces);
  forged.binding_tag = s.second.binding_tag;
  EXPECT_EQ(code_of([&] { combine_and_verify(s.first, forged, s.split.record, key(1)); }),
            ErrorCode::tag_mismatch);
  // Fresh tag for the altered share still disagrees with the stored one.
  forged.binding_tag = binding_tag(altered, context(7));
  EXPECT_EQ(code_of([&] { combine_and_verify(s.first, forged, s.split.record, key(1)); }),
            ErrorCode::tag_mismatch);
}

TEST(Combine, RandomBlobIsDecryptFailure) {
  const Quasigroup q = Quasigroup::generate(256, 5);
  const Sealed s = make_sealed(Bytes{1, 2, 3}, q, key(1), 1);
  Rng rng(3);
  SealedShare blob{2, AeadRecord::from_bytes(random_bytes(rng, 32)), {}};
  EXPECT_EQ(code_of([&] { combine_and_verify(s.first, blob, s.split.record, key(1)); }),
            ErrorCode::decrypt_failure);
}

TEST(Combine, SwappedSharesAreTagMismatch) {
  const Quasigroup q = Quasigroup::generate(16, 5);
  const Sealed s = make_sealed(Bytes{1, 2, 3}, q, key(1), 1);
  EXPECT_EQ(code_of([&] { combine_and_verify(s.second, s.first, s.split.record, key(1)); }),
            ErrorCode::tag_mismatch);
}

TEST(Combine, OrderDisagreementIsAlgebraFailure) {
  const Quasigroup q = Quasigroup::generate(16, 5);
  const Sealed s = make_sealed(Bytes{1, 2, 3}, q, key(1), 1);
  SplitRecord record = s.split.record;
  record.quasigroup.order = 32;
  EXPECT_EQ(code_of([&] { combine_and_verify(s.first, s.second, record, key(1)); }),
            ErrorCode::algebra_failure);
}

TEST(Combine, WrongQuasigroupSeedIsChecksumMismatch) {
  const Quasigroup q = Quasigroup::generate(256, 5);
  const Sealed s = make_sealed(Bytes{1, 2, 3, 4, 5, 6}, q, key(1), 1);
  SplitRecord record = s.split.record;
  record.quasigroup.seed ^= 1;
  EXPECT_EQ(code_of([&] { combine_and_verify(s.first, s.second, record, key(1)); }),
            ErrorCode::checksum_mismatch);
  record = s.split.record;
  record.secret_checksum[0] ^= 1;
  EXPECT_EQ(code_of([&] { combine_and_verify(s.first, s.second, record, key(1)); }),
            ErrorCode::checksum_mismatch);
}

TEST(Combine, EverySingleBitFlipIsRejected) {
  const Quasigroup q = Quasigroup::generate(256, 8);
  Rng rng(8);
  const Bytes secret = random_bytes(rng, 16);
  const Sealed s = make_sealed(secret, q, key(4), 2);
  for (int which = 0; which < 2; ++which) {
    const SealedShare& base = which == 0 ? s.first : s.second;
    Bytes wire = base.record.to_bytes();
    wire.insert(wire.end(), base.binding_tag.begin(), base.binding_tag.end());
    for (std::size_t bit = 0; bit < wire.size() * 8; ++bit) {
      Bytes flipped = wire;
      flipped[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      SealedShare tampered = base;
      tampered.record = AeadRecord::from_bytes(ByteView(flipped).first(wire.size() - 32));
      std::copy(flipped.end() - 32, flipped.end(), tampered.binding_tag.begin());
      const SealedShare& a = which == 0 ? tampered : s.first;
      const SealedShare& b = which == 0 ? s.second : tampered;
      const ErrorCode c = code_of([&] { combine_and_verify(a, b, s.split.record, key(4)); });
      ASSERT_TRUE(c == ErrorCode::decrypt_failure || c == ErrorCode::tag_mismatch) << bit;
    }
  }
}

TEST(Combine, ThirtyTwoByteSecretIsFast) {
  const Quasigroup q = Quasigroup::generate(256, 8);
  const Sealed s = make_sealed(Bytes(32, 0x5a), q, key(4), 2);
  const auto start = std::chrono::steady_clock::now();
  EXPECT_EQ(combine_and_verify(s.first, s.second, s.split.record, key(4)), Bytes(32, 0x5a));
  const auto elapsed = std::chrono::steady_clock::now() - start;
  EXPECT_LT(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count(), 50);
}
