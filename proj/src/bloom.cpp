#include "edgeshare/bloom.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "edgeshare/error.hpp"

namespace edgeshare {

namespace {

// Big-endian integer mod m; exact in 64-bit arithmetic because m <= 2^32.
std::uint64_t be_mod(ByteView bytes, std::uint64_t m) {
  std::uint64_t acc = 0;
  for (std::uint8_t b : bytes) acc = ((acc << 8) | b) % m;
  return acc;
}

}  // namespace

BloomFilter BloomFilter::create(std::uint64_t expected_n, double target_fpr) {
  if (expected_n < 1) throw Error(ErrorCode::parameter_out_of_range, "expected_n must be >= 1");
  if (!(target_fpr > 0.0 && target_fpr < 1.0)) {
    throw Error(ErrorCode::parameter_out_of_range, "target false-positive rate must lie in (0, 1)");
  }
  const double ln2 = std::numbers::ln2;
  const double n = static_cast<double>(expected_n);
  const auto m = static_cast<std::uint64_t>(std::ceil(-n * std::log(target_fpr) / (ln2 * ln2)));
  const auto k = static_cast<std::uint32_t>(
      std::max(1.0, std::round(static_cast<double>(m) / n * ln2)));
  return BloomFilter(m, k);
}

BloomFilter::BloomFilter(std::uint64_t m, std::uint32_t k) : m_(m), k_(k), bits_((m + 7) / 8, 0) {
  if (m_ == 0 || k_ == 0) throw Error(ErrorCode::parameter_out_of_range, "m and k must be positive");
  if (m_ > kMaxBits || k_ > kMaxHashes) {
    throw Error(ErrorCode::parameter_out_of_range, "filter dimensions too large");
  }
}

std::vector<std::uint64_t> BloomFilter::indices(const Digest& device_id) const {
  const Digest d = sha256(device_id);
  const ByteView view(d);
  const std::uint64_t ha = be_mod(view.first(16), m_);
  const std::uint64_t hb = be_mod(view.last(16), m_);
  std::vector<std::uint64_t> out(k_);
  for (std::uint32_t i = 0; i < k_; ++i) {
    out[i] = (ha + i * hb) % m_;
  }
  return out;
}

void BloomFilter::insert(const Digest& device_id) {
  for (auto i : indices(device_id)) bits_[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  ++n_inserted_;
}

bool BloomFilter::contains(const Digest& device_id) const {
  for (auto i : indices(device_id)) {
    if (!(bits_[i / 8] >> (i % 8) & 1)) return false;
  }
  return true;
}

double BloomFilter::estimated_fpr() const {
  const double k = k_;
  return std::pow(1.0 - std::exp(-k * static_cast<double>(n_inserted_) / static_cast<double>(m_)), k);
}

Bytes BloomFilter::serialize() const {
  Bytes out;
  out.reserve(20 + bits_.size());
  put_u64(out, m_);
  put_u32(out, k_);
  put_u64(out, n_inserted_);
  append(out, bits_);
  return out;
}

BloomFilter BloomFilter::deserialize(ByteView data) {
  ByteReader reader(data);
  const std::uint64_t m = reader.u64();
  const std::uint32_t k = reader.u32();
  const std::uint64_t n = reader.u64();
  if (m == 0 || k == 0 || m > kMaxBits || reader.remaining() != (m + 7) / 8) {
    throw Error(ErrorCode::parse_error, "bloom filter header does not match payload");
  }
  BloomFilter f(m, k);
  f.n_inserted_ = n;
  auto bits = reader.take((m + 7) / 8);
  f.bits_.assign(bits.begin(), bits.end());
  return f;
}

}  // namespace edgeshare
