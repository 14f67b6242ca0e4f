#include "edgeshare/quasigroup.hpp"

#include <numeric>
#include <string>

#include "edgeshare/error.hpp"
#include "edgeshare/rng.hpp"

namespace edgeshare {

namespace {

void check_order(std::uint64_t order) {
  if (order < kMinOrder || order > kMaxOrder) {
    throw Error(ErrorCode::invalid_order, "quasigroup order must lie in [" + std::to_string(kMinOrder) +
                                              ", " + std::to_string(kMaxOrder) + "], got " +
                                              std::to_string(order));
  }
}

std::vector<Element> random_permutation(std::uint32_t n, Rng& rng) {
  std::vector<Element> perm(n);
  std::iota(perm.begin(), perm.end(), Element{0});
  rng.shuffle(perm);
  return perm;
}

// Shape and range validation shared by is_latin_square and from_table.
std::uint32_t validated_order(const Table& rows) {
  const std::size_t n = rows.size();
  for (const auto& row : rows) {
    if (row.size() != n) throw Error(ErrorCode::malformed_table, "table is not square");
    for (auto v : row) {
      if (v >= n) throw Error(ErrorCode::malformed_table, "table entry out of range");
    }
  }
  return static_cast<std::uint32_t>(n);
}

}  // namespace

Quasigroup::Quasigroup(std::uint32_t order, std::vector<Element> table,
                       std::optional<QuasigroupParams> params)
    : order_(order), table_(std::move(table)), params_(params) {
  const std::size_t cells = static_cast<std::size_t>(order_) * order_;
  constexpr Element kUnset = 0xffff;
  left_div_.assign(cells, kUnset);
  right_div_.assign(cells, kUnset);
  // x * z = y  =>  left_div[x][y] = z ;  z * x = y  =>  right_div[y][x] = z
  for (std::uint32_t x = 0; x < order_; ++x) {
    for (std::uint32_t z = 0; z < order_; ++z) {
      const Element y = table_[idx(x, z)];
      Element& l = left_div_[idx(x, y)];
      Element& r = right_div_[idx(y, z)];
      if (l != kUnset || r != kUnset) {
        throw Error(ErrorCode::malformed_table, "table is not a Latin square");
      }
      l = static_cast<Element>(z);
      r = static_cast<Element>(x);
    }
  }
}

Quasigroup Quasigroup::generate(std::uint32_t order, std::uint64_t seed) {
  check_order(order);
  Rng rng(seed);
  const auto outer = random_permutation(order, rng);
  const auto row_perm = random_permutation(order, rng);
  const auto col_perm = random_permutation(order, rng);
  std::vector<Element> table(static_cast<std::size_t>(order) * order);
  for (std::uint32_t x = 0; x < order; ++x) {
    for (std::uint32_t y = 0; y < order; ++y) {
      table[static_cast<std::size_t>(x) * order + y] = outer[(row_perm[x] + col_perm[y]) % order];
    }
  }
  return Quasigroup(order, std::move(table), QuasigroupParams{order, seed});
}

Quasigroup Quasigroup::from_table(const Table& rows) {
  const std::uint32_t n = validated_order(rows);
  check_order(n);
  std::vector<Element> table;
  table.reserve(static_cast<std::size_t>(n) * n);
  for (const auto& row : rows) {
    for (auto v : row) table.push_back(static_cast<Element>(v));
  }
  return Quasigroup(n, std::move(table), std::nullopt);
}

Quasigroup Quasigroup::from_canonical_bytes(ByteView data) {
  ByteReader reader(data);
  const std::uint32_t n = reader.u32();
  check_order(n);
  std::vector<Element> table(static_cast<std::size_t>(n) * n);
  for (auto& cell : table) {
    cell = reader.u16();
    if (cell >= n) throw Error(ErrorCode::malformed_table, "table entry out of range");
  }
  if (!reader.done()) throw Error(ErrorCode::parse_error, "trailing bytes after quasigroup table");
  return Quasigroup(n, std::move(table), std::nullopt);
}

void Quasigroup::check_element(std::uint32_t v) const {
  if (v >= order_) {
    throw Error(ErrorCode::invalid_element, "element " + std::to_string(v) + " outside [0, " +
                                                std::to_string(order_) + ")");
  }
}

Element Quasigroup::multiply(std::uint32_t x, std::uint32_t y) const {
  check_element(x);
  check_element(y);
  return table_[idx(x, y)];
}

Element Quasigroup::left_divide(std::uint32_t x, std::uint32_t y) const {
  check_element(x);
  check_element(y);
  return left_div_[idx(x, y)];
}

Element Quasigroup::right_divide(std::uint32_t y, std::uint32_t x) const {
  check_element(y);
  check_element(x);
  return right_div_[idx(y, x)];
}

Table Quasigroup::rows() const {
  Table out(order_, std::vector<std::uint32_t>(order_));
  for (std::uint32_t x = 0; x < order_; ++x) {
    for (std::uint32_t y = 0; y < order_; ++y) out[x][y] = table_[idx(x, y)];
  }
  return out;
}

Bytes Quasigroup::canonical_bytes() const {
  Bytes out;
  out.reserve(4 + table_.size() * 2);
  put_u32(out, order_);
  for (Element e : table_) put_u16(out, e);
  return out;
}

bool is_latin_square(const Table& rows) {
  const std::uint32_t n = validated_order(rows);
  if (n == 0) return false;
  std::vector<char> seen(n);
  for (std::uint32_t r = 0; r < n; ++r) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::uint32_t c = 0; c < n; ++c) {
      if (seen[rows[r][c]]++) return false;
    }
  }
  for (std::uint32_t c = 0; c < n; ++c) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::uint32_t r = 0; r < n; ++r) {
      if (seen[rows[r][c]]++) return false;
    }
  }
  return true;
}

namespace {

void check_pair(const Quasigroup& q, Element x, Element y, IdentityReport& report) {
  auto fail = [&](int id) { report.failures.push_back({id, x, y}); };
  if (q.mul(x, q.ldiv(x, y)) != y) fail(1);
  if (q.mul(q.rdiv(y, x), x) != y) fail(2);
  if (q.ldiv(x, q.mul(x, y)) != y) fail(3);
  if (q.rdiv(q.mul(y, x), x) != y) fail(4);
  if (q.rdiv(x, q.ldiv(y, x)) != y) fail(5);
  if (q.ldiv(q.rdiv(x, y), x) != y) fail(6);
  ++report.pairs_checked;
}

}  // namespace

IdentityReport verify_parastroph_identities(const Quasigroup& q, const VerificationMode& mode) {
  IdentityReport report;
  const std::uint32_t n = q.order();
  if (std::holds_alternative<Exhaustive>(mode)) {
    for (std::uint32_t x = 0; x < n; ++x) {
      for (std::uint32_t y = 0; y < n; ++y) {
        check_pair(q, static_cast<Element>(x), static_cast<Element>(y), report);
      }
    }
  } else {
    const auto& sampled = std::get<Sampled>(mode);
    Rng rng(sampled.seed);
    for (std::uint32_t i = 0; i < sampled.pairs; ++i) {
      const auto x = static_cast<Element>(rng.uniform(n));
      const auto y = static_cast<Element>(rng.uniform(n));
      check_pair(q, x, y, report);
    }
  }
  report.passed = report.failures.empty();
  return report;
}

IdentityReport verify_parastroph_identities(const Table& rows, const VerificationMode& mode) {
  if (!is_latin_square(rows)) throw Error(ErrorCode::malformed_table, "table is not a Latin square");
  return verify_parastroph_identities(Quasigroup::from_table(rows), mode);
}

}  // namespace edgeshare
