#ifndef ANFORGE_ARITH_HPP_
#define ANFORGE_ARITH_HPP_

// Small integer helpers shared by every module: machine-word modular
// arithmetic, prime tables, CRT and a few mpz conveniences.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "anforge/error.hpp"

namespace anforge {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (e != 0) {
    if (e & 1U) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    e >>= 1U;
  }
  return result;
}

// Inverse modulo a prime (Fermat).
inline std::uint64_t invmod_prime(std::uint64_t a, std::uint64_t p) {
  if (a % p == 0) throw InvalidArgument("no inverse of 0 mod " + std::to_string(p));
  return powmod(a, p - 2, p);
}

// Representative in [0, m).
inline mpz_class mod_floor(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  if (r < 0) r += abs(m);
  return r;
}

inline std::uint64_t mod_u64(const mpz_class& a, std::uint64_t m) {
  mpz_class r = mod_floor(a, mpz_class(static_cast<unsigned long>(m)));
  return r.get_ui();
}

inline mpz_class ipow(const mpz_class& base, unsigned long e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline mpz_class gcd(const mpz_class& a, const mpz_class& b) {
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline mpz_class lcm(const mpz_class& a, const mpz_class& b) {
  mpz_class l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

inline mpz_class factorial(int n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
  return f;
}

// lcm(1, ..., n)
inline mpz_class lcm_upto(int n) {
  mpz_class l = 1;
  for (int k = 2; k <= n; ++k) l = lcm(l, mpz_class(k));
  return l;
}

inline mpz_class divexact(const mpz_class& a, const mpz_class& b) {
  mpz_class q;
  mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline bool divides(const mpz_class& d, const mpz_class& a) {
  return mpz_divisible_p(a.get_mpz_t(), d.get_mpz_t()) != 0;
}

inline mpz_class floor_of(const mpq_class& q) {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline mpz_class ceil_of(const mpq_class& q) {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline mpz_class parse_integer(const std::string& text) {
  mpz_class v;
  if (text.empty() || v.set_str(text, 10) != 0) {
    throw InvalidArgument("not a decimal integer: '" + text + "'");
  }
  return v;
}

// Modular inverse for arbitrary moduli; nullopt when gcd(a, m) != 1.
inline std::optional<mpz_class> invert(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) {
    return std::nullopt;
  }
  return mod_floor(r, m);
}

struct Congruence {
  mpz_class residue;  // in [0, modulus)
  mpz_class modulus;
};

// Generalized CRT: combines x = r1 (mod m1) and x = r2 (mod m2) for any
// positive moduli; nullopt when the two classes are inconsistent.
inline std::optional<Congruence> crt(const Congruence& a, const Congruence& b) {
  const mpz_class g = gcd(a.modulus, b.modulus);
  const mpz_class diff = b.residue - a.residue;
  if (!divides(g, diff)) return std::nullopt;
  const mpz_class m1 = a.modulus / g;
  const mpz_class m2 = b.modulus / g;
  const mpz_class l = a.modulus * m2;
  if (m2 == 1) return Congruence{mod_floor(a.residue, l), l};
  // x = r1 + m1*g*t with m1*t = diff/g (mod m2)
  const auto inv = invert(m1, m2);
  const mpz_class t = mod_floor((diff / g) * *inv, m2);
  return Congruence{mod_floor(a.residue + a.modulus * t, l), l};
}

// All primes <= bound, by a plain sieve of Eratosthenes.
inline std::vector<std::uint64_t> primes_up_to(std::uint64_t bound) {
  std::vector<std::uint64_t> primes;
  if (bound < 2) return primes;
  std::vector<bool> composite(bound + 1, false);
  for (std::uint64_t i = 2; i <= bound; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::uint64_t j = i * i; j <= bound; j += i) composite[j] = true;
  }
  return primes;
}

// Trial-division primality for machine words; only used on small values.
inline bool is_small_prime(std::uint64_t m) {
  if (m < 2) return false;
  for (std::uint64_t d = 2; d * d <= m; ++d) {
    if (m % d == 0) return false;
  }
  return true;
}

inline std::uint64_t next_prime_after(std::uint64_t m) {
  std::uint64_t c = m + 1;
  while (!is_small_prime(c)) ++c;
  return c;
}

inline std::uint64_t to_u64(const mpz_class& v) {
  if (v < 0 || !v.fits_ulong_p()) {
    throw InvalidArgument("value does not fit in 64 bits: " + v.get_str());
  }
  return v.get_ui();
}

inline mpz_class from_u64(std::uint64_t v) {
  return mpz_class(static_cast<unsigned long>(v));
}

// Portable bounded draws: std::uniform_int_distribution is
// implementation-defined, and certificates must be reproducible everywhere.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("uniform_below: empty range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % bound;
}

// Uniform in [lo, hi].
inline long uniform_in(std::mt19937_64& rng, long lo, long hi) {
  return lo + static_cast<long>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

}  // namespace anforge

#endif  // ANFORGE_ARITH_HPP_
