#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace annulus {

inline constexpr double kPi = 3.14159265358979323846;

/// Positive infinity, used as a first-class Lebesgue exponent (sup semantics).
inline constexpr double kInfExp = std::numeric_limits<double>::infinity();

inline bool is_inf(double p) { return std::isinf(p); }

/// Conjugate exponent p' with 1/p + 1/p' = 1; conj(1) = inf, conj(inf) = 1.
inline double conjugate_exponent(double p) {
  if (p < 1.0) throw std::invalid_argument("exponent must be >= 1");
  if (is_inf(p)) return 1.0;
  if (p == 1.0) return kInfExp;
  return p / (p - 1.0);
}

/// 1/p with the convention 1/inf = 0.
inline double inv_exp(double p) { return is_inf(p) ? 0.0 : 1.0 / p; }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double c) const { return {x * c, y * c}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
};

inline double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }
inline double dist2(Vec2 a, Vec2 b) { return (a - b).norm2(); }

/// Parses dyadic literals "2^-8", "4^-3" (also plain decimals) exactly.
inline double parse_dyadic(std::string_view text) {
  std::string s(text);
  auto caret = s.find('^');
  if (caret != std::string::npos) {
    int base = std::stoi(s.substr(0, caret));
    int exp = std::stoi(s.substr(caret + 1));
    if (base != 2 && base != 4) throw std::invalid_argument("dyadic literal base must be 2 or 4");
    return std::ldexp(1.0, exp * (base == 4 ? 2 : 1));
  }
  return std::stod(s);
}

/// Exact k with x == 2^-k, or -1 if x is not of that form.
inline int dyadic_exponent(double x) {
  if (!(x > 0.0) || x > 1.0) return -1;
  int e = 0;
  double m = std::frexp(x, &e);  // x = m * 2^e, m in [0.5,1)
  if (m != 0.5) return -1;
  return 1 - e;
}

inline std::string format_dyadic(double x) {
  int k = dyadic_exponent(x);
  if (k >= 0) return "2^-" + std::to_string(k);
  return std::to_string(x);
}

/// Deterministic RNG wrapper. All sampling goes through these helpers so
/// outputs are reproducible across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    assert(n > 0);
    return engine_() % n;
  }

  /// Derives an independent stream, e.g. one per sweep point.
  Rng fork(std::uint64_t salt) const {
    return Rng(seed_ ^ (salt * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull));
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// FNV-1a, used for the content hash embedded in output headers.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace annulus
