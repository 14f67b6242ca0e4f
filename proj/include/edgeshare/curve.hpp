#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>

#include "edgeshare/bytes.hpp"
#include "edgeshare/rng.hpp"

namespace edgeshare {

/// Long Weierstrass form over F_p:
///   y^2 + a1*x*y + a3*y = x^3 + a2*x^2 + a4*x + a6
struct CurveCoefficients {
  mpz_class p;
  mpz_class a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;
};

/// Standard discriminant through the b-quantities, reduced into [0, p).
mpz_class discriminant(const CurveCoefficients& c);

/// A validated curve: p is a prime above 3 and the discriminant is nonzero.
class WeierstrassCurve {
 public:
  /// Throws Error(invalid_curve) for a bad modulus, Error(singular_curve)
  /// when the discriminant vanishes. Coefficients are reduced mod p.
  explicit WeierstrassCurve(CurveCoefficients c);

  /// Long-form curve over the 256-bit prime 2^256 - 2^224 + 2^192 + 2^96 - 1
  /// with all five coefficients in use.
  static WeierstrassCurve default_curve();

  const CurveCoefficients& coefficients() const noexcept { return c_; }
  const mpz_class& p() const noexcept { return c_.p; }

  /// Bytes per coordinate: ceil(bits(p) / 8).
  std::size_t coordinate_width() const noexcept { return width_; }

 private:
  CurveCoefficients c_;
  std::size_t width_;
};

class CurvePoint {
 public:
  static CurvePoint infinity() { return CurvePoint(); }
  static CurvePoint affine(mpz_class x, mpz_class y) { return CurvePoint(std::move(x), std::move(y)); }

  bool is_infinity() const noexcept { return infinity_; }
  const mpz_class& x() const noexcept { return x_; }
  const mpz_class& y() const noexcept { return y_; }

  /// Fixed-width big-endian x || y. Infinity has no encoding.
  Bytes encode(std::size_t width) const;

  bool operator==(const CurvePoint& o) const {
    return infinity_ == o.infinity_ && (infinity_ || (x_ == o.x_ && y_ == o.y_));
  }

 private:
  CurvePoint() : infinity_(true) {}
  CurvePoint(mpz_class x, mpz_class y) : infinity_(false), x_(std::move(x)), y_(std::move(y)) {}

  bool infinity_;
  mpz_class x_;
  mpz_class y_;
};

bool is_on_curve(const WeierstrassCurve& curve, const CurvePoint& point);

/// Square root modulo an odd prime by Tonelli-Shanks; nullopt for a
/// quadratic non-residue.
std::optional<mpz_class> sqrt_mod(const mpz_class& a, const mpz_class& p);

/// Set of points already handed out within one group.
class PointSet {
 public:
  explicit PointSet(std::size_t coordinate_width = 0) : width_(coordinate_width) {}

  bool contains(const CurvePoint& p) const { return keys_.count(key(p)) != 0; }
  bool insert(const CurvePoint& p) { return keys_.insert(key(p)).second; }
  std::size_t size() const noexcept { return keys_.size(); }

  /// Encoded points, for persistence inside the secure zone.
  const std::unordered_set<std::string>& encoded() const noexcept { return keys_; }
  void insert_encoded(std::string raw) { keys_.insert(std::move(raw)); }

 private:
  std::string key(const CurvePoint& p) const {
    Bytes b = p.encode(width_);
    return std::string(b.begin(), b.end());
  }

  std::size_t width_;
  std::unordered_set<std::string> keys_;
};

inline constexpr int kMaxPointTries = 4096;

/// Draws a uniform x, solves (2y + a1*x + a3)^2 = 4(x^3 + a2*x^2 + a4*x + a6)
/// + (a1*x + a3)^2 for y, and retries on non-residues or points already in
/// `used`. Throws Error(group_full) after kMaxPointTries attempts.
CurvePoint select_unique_point(const WeierstrassCurve& curve, const PointSet& used, Rng& rng);
CurvePoint select_unique_point(const WeierstrassCurve& curve, const PointSet& used,
                               std::uint64_t rng_seed);

std::string to_hex(const mpz_class& v);
mpz_class mpz_from_hex(const std::string& hex);

}  // namespace edgeshare
