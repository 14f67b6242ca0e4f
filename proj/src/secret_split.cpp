#include "edgeshare/secret_split.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <bit>

#include "edgeshare/error.hpp"

namespace edgeshare {

namespace {

constexpr std::uint64_t kAlgebraSampleSeedLabel = 0x616c6765627261;  // "algebra"
constexpr std::uint32_t kAlgebraSamplePairs = 64;

unsigned bits_per_digit(std::uint32_t order) { return std::bit_width(order) - 1; }

void check_order(std::uint32_t order) {
  if (order < kMinOrder || order > kMaxOrder) {
    throw Error(ErrorCode::invalid_order, "digit alphabet size out of range: " + std::to_string(order));
  }
}

mpz_class import_be(ByteView bytes) {
  mpz_class v;
  mpz_import(v.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  return v;
}

Bytes share_aad(std::uint8_t index, const ContextId& context_id) {
  Bytes aad;
  append(aad, as_bytes("edgeshare/share"));
  aad.push_back(index);
  append(aad, context_id);
  return aad;
}

Digest binding_tag_over(ByteView canonical, std::uint8_t index, const ContextId& context_id) {
  const std::uint8_t idx[1] = {index};
  return Sha256().update(canonical).update(ByteView(idx)).update(context_id).finish();
}

}  // namespace

std::size_t digit_count(std::size_t secret_len, std::uint32_t order) {
  check_order(order);
  const std::size_t bits = bits_per_digit(order);
  return (secret_len * 8 + bits - 1) / bits;
}

std::vector<Element> encode_secret(ByteView secret, std::uint32_t order) {
  if (secret.empty()) throw Error(ErrorCode::empty_secret, "cannot encode an empty secret");
  const std::size_t count = digit_count(secret.size(), order);
  std::vector<Element> digits(count);

  if (std::has_single_bit(order)) {
    const std::size_t width = bits_per_digit(order);
    const std::size_t total_bits = secret.size() * 8;
    const std::size_t pad = count * width - total_bits;
    for (std::size_t j = 0; j < count; ++j) {
      Element d = 0;
      for (std::size_t b = j * width; b < (j + 1) * width; ++b) {
        d = static_cast<Element>(d << 1);
        if (b >= pad) {
          const std::size_t bit = b - pad;
          d |= (secret[bit / 8] >> (7 - bit % 8)) & 1;
        }
      }
      digits[j] = d;
    }
    return digits;
  }

  mpz_class value = import_be(secret);
  for (std::size_t j = count; j-- > 0;) {
    digits[j] = static_cast<Element>(mpz_tdiv_q_ui(value.get_mpz_t(), value.get_mpz_t(), order));
  }
  return digits;
}

Bytes decode_secret(std::span<const Element> digits, std::uint32_t order, std::size_t secret_len) {
  if (secret_len == 0) throw Error(ErrorCode::empty_secret, "cannot decode an empty secret");
  if (digits.size() != digit_count(secret_len, order)) {
    throw Error(ErrorCode::parse_error, "digit count does not match secret length");
  }
  for (Element d : digits) {
    if (d >= order) throw Error(ErrorCode::parse_error, "digit outside alphabet");
  }
  Bytes out(secret_len, 0);

  if (std::has_single_bit(order)) {
    const std::size_t width = bits_per_digit(order);
    const std::size_t pad = digits.size() * width - secret_len * 8;
    for (std::size_t j = 0; j < digits.size(); ++j) {
      for (std::size_t k = 0; k < width; ++k) {
        const std::size_t b = j * width + k;
        const unsigned bit_value = (digits[j] >> (width - 1 - k)) & 1;
        if (b < pad) {
          if (bit_value) throw Error(ErrorCode::parse_error, "nonzero padding bits");
          continue;
        }
        const std::size_t bit = b - pad;
        out[bit / 8] |= static_cast<std::uint8_t>(bit_value << (7 - bit % 8));
      }
    }
    return out;
  }

  mpz_class value = 0;
  for (Element d : digits) {
    value *= order;
    value += d;
  }
  if (mpz_sizeinbase(value.get_mpz_t(), 2) > secret_len * 8) {
    throw Error(ErrorCode::parse_error, "digits encode a value wider than the secret");
  }
  std::size_t written = 0;
  Bytes tmp((mpz_sizeinbase(value.get_mpz_t(), 2) + 7) / 8 + 1);
  mpz_export(tmp.data(), &written, 1, 1, 1, 0, value.get_mpz_t());
  std::copy_n(tmp.begin(), written, out.end() - static_cast<std::ptrdiff_t>(written));
  return out;
}

Bytes PlainShare::canonical_bytes() const {
  Bytes out;
  out.reserve(7 + digits.size() * 2);
  out.push_back(index);
  put_u16(out, static_cast<std::uint16_t>(order));
  put_u32(out, static_cast<std::uint32_t>(digits.size()));
  for (Element d : digits) put_u16(out, d);
  return out;
}

PlainShare PlainShare::from_canonical_bytes(ByteView data, std::size_t secret_len) {
  ByteReader reader(data);
  PlainShare share;
  share.index = reader.u8();
  share.order = reader.u16();
  const std::uint32_t count = reader.u32();
  if (reader.remaining() != static_cast<std::size_t>(count) * 2) {
    throw Error(ErrorCode::parse_error, "share digit count does not match payload");
  }
  share.digits.resize(count);
  for (auto& d : share.digits) d = reader.u16();
  share.secret_len_bytes = secret_len;
  return share;
}

Digest binding_tag(const PlainShare& share, const ContextId& context_id) {
  return binding_tag_over(share.canonical_bytes(), share.index, context_id);
}

std::pair<std::vector<Element>, std::vector<Element>> split_digits(std::span<const Element> digits,
                                                                   const Quasigroup& q, Rng& rng) {
  std::vector<Element> first(digits.size());
  std::vector<Element> second(digits.size());
  for (std::size_t i = 0; i < digits.size(); ++i) {
    const auto r = static_cast<Element>(rng.uniform(q.order()));
    first[i] = r;
    second[i] = q.left_divide(r, digits[i]);
  }
  return {std::move(first), std::move(second)};
}

std::vector<Element> combine_digits(std::span<const Element> first, std::span<const Element> second,
                                    const Quasigroup& q) {
  if (first.size() != second.size()) {
    throw Error(ErrorCode::algebra_failure, "shares have different digit counts");
  }
  std::vector<Element> out(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) out[i] = q.multiply(first[i], second[i]);
  return out;
}

SplitResult split(ByteView secret, const Quasigroup& q, const ContextId& context_id,
                  std::uint64_t rng_seed) {
  if (!q.params()) {
    throw Error(ErrorCode::malformed_table,
                "splitting requires a generated quasigroup whose parameters can be recorded");
  }
  const auto digits = encode_secret(secret, q.order());
  Rng rng(rng_seed);
  auto [first, second] = split_digits(digits, q, rng);

  SplitResult result;
  result.first = PlainShare{1, q.order(), std::move(first), secret.size()};
  result.second = PlainShare{2, q.order(), std::move(second), secret.size()};
  result.record.context_id = context_id;
  result.record.quasigroup = *q.params();
  result.record.secret_len = secret.size();
  result.record.secret_checksum = sha256(secret);
  result.record.expected_tags = {binding_tag(result.first, context_id),
                                 binding_tag(result.second, context_id)};
  return result;
}

SealedShare seal_share(const PlainShare& share, const Key256& key, const ContextId& context_id,
                       NonceSequence& nonces) {
  if (share.index != 1 && share.index != 2) {
    throw Error(ErrorCode::encryption_failure, "share index must be 1 or 2");
  }
  Bytes canonical = share.canonical_bytes();
  SealedShare sealed;
  sealed.index = share.index;
  sealed.record = aead_encrypt(key, canonical, share_aad(share.index, context_id), nonces);
  sealed.binding_tag = binding_tag_over(canonical, share.index, context_id);
  return sealed;
}

PlainShare unseal_share(const SealedShare& sealed, const Key256& key, const ContextId& context_id,
                        std::size_t secret_len) {
  Bytes plain = aead_decrypt(key, sealed.record, share_aad(sealed.index, context_id));
  return PlainShare::from_canonical_bytes(plain, secret_len);
}

Bytes combine_and_verify(const SealedShare& first, const SealedShare& second, const SplitRecord& record,
                         const Key256& key) {
  // (1) authenticated decryption
  Bytes plain[2];
  const SealedShare* sealed[2] = {&first, &second};
  for (int i = 0; i < 2; ++i) {
    try {
      plain[i] = aead_decrypt(key, sealed[i]->record, share_aad(sealed[i]->index, record.context_id));
    } catch (const Error&) {
      throw Error(ErrorCode::decrypt_failure,
                  "share " + std::to_string(i + 1) + " failed authenticated decryption");
    }
  }

  // (2) binding tags, both as presented and as recomputed from the plaintext
  for (int i = 0; i < 2; ++i) {
    const auto expected_index = static_cast<std::uint8_t>(i + 1);
    const Digest& expected = record.expected_tags[i];
    const Digest recomputed = binding_tag_over(plain[i], sealed[i]->index, record.context_id);
    if (sealed[i]->index != expected_index || !constant_time_equal(sealed[i]->binding_tag, expected) ||
        !constant_time_equal(recomputed, expected)) {
      throw Error(ErrorCode::tag_mismatch,
                  "share " + std::to_string(i + 1) + " binding tag mismatch (impersonation suspected)");
    }
  }

  // (3) algebraic verification of the rebuilt secret quasigroup
  std::optional<Quasigroup> q;
  PlainShare shares[2];
  try {
    q = Quasigroup::generate(record.quasigroup.order, record.quasigroup.seed);
    for (int i = 0; i < 2; ++i) shares[i] = PlainShare::from_canonical_bytes(plain[i], record.secret_len);
  } catch (const Error& e) {
    throw Error(ErrorCode::algebra_failure, std::string("cannot rebuild split state: ") + e.what());
  }
  const auto report = verify_parastroph_identities(
      *q, Sampled{kAlgebraSamplePairs, mix_seed(record.quasigroup.seed, kAlgebraSampleSeedLabel)});
  if (!report.passed) throw Error(ErrorCode::algebra_failure, "parastroph identities violated");
  const std::size_t expected_digits = digit_count(record.secret_len, q->order());
  for (const auto& s : shares) {
    if (s.order != q->order() || s.digits.size() != expected_digits ||
        std::any_of(s.digits.begin(), s.digits.end(), [&](Element d) { return d >= q->order(); })) {
      throw Error(ErrorCode::algebra_failure, "share digits inconsistent with the secret quasigroup");
    }
  }

  // (4) reconstruction s_i = a_i * b_i
  const auto digits = combine_digits(shares[0].digits, shares[1].digits, *q);
  Bytes secret;
  try {
    secret = decode_secret(digits, q->order(), record.secret_len);
  } catch (const Error&) {
    throw Error(ErrorCode::checksum_mismatch, "reconstructed digits do not form a valid secret");
  }

  // (5) checksum
  if (!constant_time_equal(sha256(secret), record.secret_checksum)) {
    secure_wipe(secret);
    throw Error(ErrorCode::checksum_mismatch, "reconstructed secret fails checksum");
  }
  return secret;
}

}  // namespace edgeshare
