#include "edgeshare/curve.hpp"

#include "edgeshare/error.hpp"

namespace edgeshare {

namespace {

mpz_class mod(const mpz_class& v, const mpz_class& p) {
  mpz_class r;
  mpz_mod(r.get_mpz_t(), v.get_mpz_t(), p.get_mpz_t());
  return r;
}

mpz_class powm(const mpz_class& base, const mpz_class& exp, const mpz_class& p) {
  mpz_class r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), p.get_mpz_t());
  return r;
}

// Uniform value in [0, bound) from the seeded stream.
mpz_class uniform_below(const mpz_class& bound, Rng& rng) {
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  Bytes buf((bits + 7) / 8);
  const unsigned excess = static_cast<unsigned>(buf.size() * 8 - bits);
  while (true) {
    rng.fill(buf);
    buf[0] &= static_cast<std::uint8_t>(0xff >> excess);
    mpz_class v;
    mpz_import(v.get_mpz_t(), buf.size(), 1, 1, 1, 0, buf.data());
    if (v < bound) return v;
  }
}

}  // namespace

mpz_class discriminant(const CurveCoefficients& c) {
  const mpz_class& p = c.p;
  const mpz_class b2 = c.a1 * c.a1 + 4 * c.a2;
  const mpz_class b4 = 2 * c.a4 + c.a1 * c.a3;
  const mpz_class b6 = c.a3 * c.a3 + 4 * c.a6;
  const mpz_class b8 =
      c.a1 * c.a1 * c.a6 + 4 * c.a2 * c.a6 - c.a1 * c.a3 * c.a4 + c.a2 * c.a3 * c.a3 - c.a4 * c.a4;
  const mpz_class delta = -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
  return mod(delta, p);
}

WeierstrassCurve::WeierstrassCurve(CurveCoefficients c) : c_(std::move(c)) {
  if (c_.p <= 3 || mpz_probab_prime_p(c_.p.get_mpz_t(), 40) == 0) {
    throw Error(ErrorCode::invalid_curve, "curve modulus must be a prime greater than 3");
  }
  for (mpz_class* a : {&c_.a1, &c_.a2, &c_.a3, &c_.a4, &c_.a6}) *a = mod(*a, c_.p);
  if (discriminant(c_) == 0) throw Error(ErrorCode::singular_curve, "curve discriminant is zero");
  width_ = (mpz_sizeinbase(c_.p.get_mpz_t(), 2) + 7) / 8;
}

WeierstrassCurve WeierstrassCurve::default_curve() {
  CurveCoefficients c;
  c.p = mpz_from_hex("ffffffff00000001000000000000000000000000ffffffffffffffffffffffff");
  c.a1 = 1;
  c.a2 = 3;
  c.a3 = 5;
  c.a4 = 7;
  c.a6 = 11;
  return WeierstrassCurve(std::move(c));
}

Bytes CurvePoint::encode(std::size_t width) const {
  if (infinity_) throw Error(ErrorCode::invalid_element, "the point at infinity has no affine encoding");
  Bytes out(2 * width, 0);
  auto put = [&](const mpz_class& v, std::size_t offset) {
    const std::size_t len = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
    if (len > width) throw Error(ErrorCode::invalid_element, "coordinate wider than field");
    std::size_t written = 0;
    if (v != 0) mpz_export(out.data() + offset + (width - len), &written, 1, 1, 1, 0, v.get_mpz_t());
  };
  put(x_, 0);
  put(y_, width);
  return out;
}

bool is_on_curve(const WeierstrassCurve& curve, const CurvePoint& point) {
  if (point.is_infinity()) return true;
  const auto& c = curve.coefficients();
  const mpz_class& x = point.x();
  const mpz_class& y = point.y();
  if (x < 0 || x >= c.p || y < 0 || y >= c.p) return false;
  const mpz_class lhs = y * y + c.a1 * x * y + c.a3 * y;
  const mpz_class rhs = x * x * x + c.a2 * x * x + c.a4 * x + c.a6;
  return mod(lhs - rhs, c.p) == 0;
}

std::optional<mpz_class> sqrt_mod(const mpz_class& a_in, const mpz_class& p) {
  const mpz_class a = mod(a_in, p);
  if (a == 0) return mpz_class(0);
  const mpz_class p_minus_1 = p - 1;
  if (powm(a, p_minus_1 / 2, p) != 1) return std::nullopt;

  if (mod(p, 4) == 3) return powm(a, (p + 1) / 4, p);

  // p - 1 = q * 2^s with q odd
  mpz_class q = p_minus_1;
  unsigned long s = 0;
  while (mpz_even_p(q.get_mpz_t())) {
    q /= 2;
    ++s;
  }
  mpz_class z = 2;
  while (powm(z, p_minus_1 / 2, p) != p_minus_1) ++z;

  unsigned long m = s;
  mpz_class c = powm(z, q, p);
  mpz_class t = powm(a, q, p);
  mpz_class r = powm(a, (q + 1) / 2, p);
  while (t != 1) {
    unsigned long i = 0;
    mpz_class t2 = t;
    while (t2 != 1) {
      t2 = mod(t2 * t2, p);
      ++i;
    }
    mpz_class b = c;
    for (unsigned long j = 0; j + i + 1 < m; ++j) b = mod(b * b, p);
    m = i;
    c = mod(b * b, p);
    t = mod(t * c, p);
    r = mod(r * b, p);
  }
  return r;
}

CurvePoint select_unique_point(const WeierstrassCurve& curve, const PointSet& used, Rng& rng) {
  const auto& c = curve.coefficients();
  const mpz_class& p = c.p;
  mpz_class inv2;
  const mpz_class two = 2;
  mpz_invert(inv2.get_mpz_t(), two.get_mpz_t(), p.get_mpz_t());

  for (int attempt = 0; attempt < kMaxPointTries; ++attempt) {
    const mpz_class x = uniform_below(p, rng);
    const mpz_class linear = c.a1 * x + c.a3;
    const mpz_class disc = 4 * (x * x * x + c.a2 * x * x + c.a4 * x + c.a6) + linear * linear;
    auto root = sqrt_mod(disc, p);
    if (!root) continue;
    mpz_class t = *root;
    if (t != 0 && (rng.next() & 1)) t = p - t;
    CurvePoint candidate = CurvePoint::affine(x, mod((t - linear) * inv2, p));
    if (!used.contains(candidate)) return candidate;
  }
  throw Error(ErrorCode::group_full,
              "no unused curve point found after " + std::to_string(kMaxPointTries) + " attempts");
}

CurvePoint select_unique_point(const WeierstrassCurve& curve, const PointSet& used,
                               std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return select_unique_point(curve, used, rng);
}

std::string to_hex(const mpz_class& v) { return v.get_str(16); }

mpz_class mpz_from_hex(const std::string& hex) {
  mpz_class v;
  if (hex.empty() || v.set_str(hex, 16) != 0 || v < 0) {
    throw Error(ErrorCode::parse_error, "invalid hex integer: " + hex);
  }
  return v;
}

}  // namespace edgeshare
