#include "edgeshare/crypto.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <limits>

#include "edgeshare/error.hpp"

namespace edgeshare {

namespace {

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const noexcept { EVP_MD_CTX_free(ctx); }
};
struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const noexcept { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

int checked_len(std::size_t n) {
  if (n > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
    throw Error(ErrorCode::encryption_failure, "input too large for a single AEAD call");
  }
  return static_cast<int>(n);
}

}  // namespace

Digest sha256(ByteView data) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("EVP_Digest failed");
  }
  return out;
}

struct Sha256::State {
  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx{EVP_MD_CTX_new()};
};

Sha256::Sha256() : state_(std::make_unique<State>()) {
  if (!state_->ctx || EVP_DigestInit_ex(state_->ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("EVP_DigestInit_ex failed");
  }
}

Sha256::~Sha256() = default;
Sha256::Sha256(Sha256&&) noexcept = default;
Sha256& Sha256::operator=(Sha256&&) noexcept = default;

Sha256& Sha256::update(ByteView data) {
  if (EVP_DigestUpdate(state_->ctx.get(), data.data(), data.size()) != 1) {
    throw std::runtime_error("EVP_DigestUpdate failed");
  }
  return *this;
}

Digest Sha256::finish() {
  Digest out{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(state_->ctx.get(), out.data(), &len) != 1) {
    throw std::runtime_error("EVP_DigestFinal_ex failed");
  }
  return out;
}

void secure_random(std::span<std::uint8_t> out) {
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw std::runtime_error("RAND_bytes failed");
  }
}

bool constant_time_equal(ByteView a, ByteView b) noexcept {
  return a.size() == b.size() && CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

void secure_wipe(std::span<std::uint8_t> data) noexcept { OPENSSL_cleanse(data.data(), data.size()); }

Bytes AeadRecord::to_bytes() const {
  Bytes out(nonce.size() + ciphertext.size() + tag.size());
  auto it = std::copy(nonce.begin(), nonce.end(), out.begin());
  it = std::copy(ciphertext.begin(), ciphertext.end(), it);
  std::copy(tag.begin(), tag.end(), it);
  return out;
}

AeadRecord AeadRecord::from_bytes(ByteView data) {
  if (data.size() < sizeof(Nonce) + sizeof(AuthTag)) {
    throw Error(ErrorCode::parse_error, "AEAD record shorter than nonce + tag");
  }
  AeadRecord r;
  const std::size_t body = data.size() - r.nonce.size() - r.tag.size();
  std::memcpy(r.nonce.data(), data.data(), r.nonce.size());
  r.ciphertext.assign(data.begin() + r.nonce.size(), data.begin() + r.nonce.size() + body);
  std::memcpy(r.tag.data(), data.data() + r.nonce.size() + body, r.tag.size());
  return r;
}

NonceSequence::NonceSequence(std::uint64_t seed) {
  Bytes seed_bytes;
  put_u64(seed_bytes, seed);
  Digest d = Sha256().update("edgeshare/nonce-prefix").update(seed_bytes).finish();
  std::copy_n(d.begin(), prefix_.size(), prefix_.begin());
}

Nonce NonceSequence::next() {
  Nonce n{};
  std::copy(prefix_.begin(), prefix_.end(), n.begin());
  for (int i = 0; i < 8; ++i) n[4 + i] = static_cast<std::uint8_t>(counter_ >> (56 - 8 * i));
  ++counter_;
  return n;
}

AeadRecord aead_encrypt(const Key256& key, ByteView plaintext, ByteView associated_data,
                        NonceSequence& nonces) {
  return aead_encrypt(key, plaintext, associated_data, nonces.next());
}

AeadRecord aead_encrypt(const Key256& key, ByteView plaintext, ByteView associated_data,
                        const Nonce& nonce) {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  AeadRecord record;
  record.nonce = nonce;
  record.ciphertext.resize(plaintext.size());
  int len = 0;
  bool ok = ctx && EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(nonce.size()),
                                nullptr) == 1 &&
            EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()) == 1;
  if (ok && !associated_data.empty()) {
    ok = EVP_EncryptUpdate(ctx.get(), nullptr, &len, associated_data.data(),
                           checked_len(associated_data.size())) == 1;
  }
  if (ok && !plaintext.empty()) {
    ok = EVP_EncryptUpdate(ctx.get(), record.ciphertext.data(), &len, plaintext.data(),
                           checked_len(plaintext.size())) == 1;
  }
  ok = ok && EVP_EncryptFinal_ex(ctx.get(), record.ciphertext.data() + plaintext.size(), &len) == 1 &&
       EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, static_cast<int>(record.tag.size()),
                           record.tag.data()) == 1;
  if (!ok) throw Error(ErrorCode::encryption_failure, "AES-256-GCM encryption failed");
  return record;
}

Bytes aead_decrypt(const Key256& key, const AeadRecord& record, ByteView associated_data) {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  Bytes plaintext(record.ciphertext.size());
  int len = 0;
  AuthTag tag = record.tag;
  bool ok = ctx && EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN,
                                static_cast<int>(record.nonce.size()), nullptr) == 1 &&
            EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), record.nonce.data()) == 1;
  if (ok && !associated_data.empty()) {
    ok = EVP_DecryptUpdate(ctx.get(), nullptr, &len, associated_data.data(),
                           checked_len(associated_data.size())) == 1;
  }
  if (ok && !record.ciphertext.empty()) {
    ok = EVP_DecryptUpdate(ctx.get(), plaintext.data(), &len, record.ciphertext.data(),
                           checked_len(record.ciphertext.size())) == 1;
  }
  ok = ok &&
       EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, static_cast<int>(tag.size()), tag.data()) ==
           1 &&
       EVP_DecryptFinal_ex(ctx.get(), plaintext.data() + plaintext.size(), &len) == 1;
  if (!ok) {
    secure_wipe(plaintext);
    throw Error(ErrorCode::authentication_failure, "AEAD authentication failed");
  }
  return plaintext;
}

std::array<std::uint8_t, 16> Timestamp::to_bytes() const {
  std::array<std::uint8_t, 16> out{};
  for (int i = 0; i < 8; ++i) {
    out[i] = static_cast<std::uint8_t>(epoch_seconds >> (56 - 8 * i));
    out[8 + i] = static_cast<std::uint8_t>(sequence >> (56 - 8 * i));
  }
  return out;
}

TimestampAuthority::TimestampAuthority(std::string issuer, Clock clock, std::uint64_t last_sequence,
                                       std::uint64_t last_epoch)
    : issuer_(std::move(issuer)),
      clock_(std::move(clock)),
      last_sequence_(last_sequence),
      last_epoch_(last_epoch) {}

Clock TimestampAuthority::wall_clock() {
  return [] {
    auto now = std::chrono::system_clock::now().time_since_epoch();
    return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::seconds>(now).count());
  };
}

Timestamp TimestampAuthority::issue(ByteView for_context) {
  const std::uint64_t now = clock_();
  if (now < last_epoch_) {
    throw Error(ErrorCode::clock_error, "clock moved backwards: " + std::to_string(now) + " < " +
                                            std::to_string(last_epoch_));
  }
  Timestamp ts{now, issuer_, last_sequence_ + 1};
  last_epoch_ = now;
  last_sequence_ = ts.sequence;
  last_registration_ =
      Sha256().update(for_context).update(ts.to_bytes()).update(as_bytes(issuer_)).finish();
  return ts;
}

bool verify_freshness(const TimestampAuthority& tsa_view, const Timestamp& ts,
                      const std::optional<Timestamp>& last_seen) {
  if (ts.issuer != tsa_view.issuer()) return false;
  if (ts.sequence == 0 || ts.sequence > tsa_view.last_sequence()) return false;
  if (ts.epoch_seconds > tsa_view.last_epoch()) return false;
  if (last_seen && ts.sequence <= last_seen->sequence) return false;
  return true;
}

}  // namespace edgeshare
