#ifndef ANFORGE_GALOIS_HPP_
#define ANFORGE_GALOIS_HPP_

// Galois-group certificates from Frobenius cycle types. For a prime p not
// dividing disc(P), the factor degrees of P mod p are the cycle type of a
// Frobenius element. An n-cycle, an (n-1)-cycle and a transposition together
// generate S_n: the first gives transitivity, the second double transitivity
// (hence primitivity), and a primitive group with a transposition is S_n
// (Jordan).

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "anforge/arith.hpp"
#include "anforge/construct.hpp"
#include "anforge/error.hpp"
#include "anforge/factor.hpp"
#include "anforge/intpoly.hpp"

namespace anforge {

struct FrobeniusWitness {
  std::uint64_t prime = 0;
  std::vector<int> cycle_type;  // descending

  friend bool operator==(const FrobeniusWitness&, const FrobeniusWitness&) = default;
};

enum class CyclePattern {
  Full,             // {n}
  Transposition,    // {2, 1, ..., 1}
  FixedPointCycle,  // {n-1, 1}
};

inline const char* pattern_name(CyclePattern pattern) {
  switch (pattern) {
    case CyclePattern::Full: return "n-cycle";
    case CyclePattern::Transposition: return "transposition";
    case CyclePattern::FixedPointCycle: return "(n-1)-cycle";
  }
  return "?";
}

inline std::vector<int> cycle_type_of(CyclePattern pattern, int n) {
  switch (pattern) {
    case CyclePattern::Full: return {n};
    case CyclePattern::Transposition: {
      std::vector<int> t(static_cast<std::size_t>(n - 1), 1);
      t[0] = 2;
      return t;
    }
    case CyclePattern::FixedPointCycle: return {n - 1, 1};
  }
  return {};
}

inline constexpr CyclePattern kSnPatterns[] = {CyclePattern::Full, CyclePattern::Transposition,
                                               CyclePattern::FixedPointCycle};

/// Factor degrees of P mod p, or nullopt when p divides disc(P) or lc(P).
inline std::optional<std::vector<int>> frobenius_cycle_type(const IntPoly& poly, std::uint64_t p) {
  try {
    return degree_multiset_mod_p(poly, p);
  } catch (const NotSeparableModP&) {
    return std::nullopt;
  } catch (const DegreeDropModP&) {
    return std::nullopt;
  }
}

/// First prime realizing each S_n pattern, scanning p <= bound upwards.
/// Returned witnesses are distinct primes in increasing order.
inline std::optional<std::vector<FrobeniusWitness>> find_sn_witnesses(const IntPoly& poly,
                                                                      std::uint64_t bound) {
  const int n = poly.degree();
  std::vector<FrobeniusWitness> found;
  bool seen[3] = {false, false, false};
  for (std::uint64_t p : primes_up_to(bound)) {
    const auto type = frobenius_cycle_type(poly, p);
    if (!type) continue;
    bool useful = false;
    for (int k = 0; k < 3; ++k) {
      if (!seen[k] && *type == cycle_type_of(kSnPatterns[k], n)) seen[k] = useful = true;
    }
    if (useful) found.push_back({p, *type});
    if (seen[0] && seen[1] && seen[2]) return found;
  }
  return std::nullopt;
}

struct ReferencePoly {
  IntPoly poly;
  IntPoly derivative;
  std::vector<FrobeniusWitness> sn_witnesses;
};

/// A prime where R has a prescribed cycle type and R' splits into n-1
/// distinct linear factors. Roots are ascending; roots[0] is matched to the
/// rational critical point u l / n, roots[i] to A_{i+1} l.
struct WitnessPrime {
  std::uint64_t prime = 0;
  CyclePattern pattern = CyclePattern::Full;
  std::vector<std::uint64_t> roots;
  std::uint64_t r0 = 0;  // R(0) mod prime
};

struct WitnessPrimes {
  std::vector<WitnessPrime> primes;

  mpz_class product() const {
    mpz_class m = 1;
    for (const auto& w : primes) m *= from_u64(w.prime);
    return m;
  }
};

/// Fills a WitnessPrime for p, or nullopt when R' does not split into
/// distinct linear factors mod p.
inline std::optional<WitnessPrime> witness_at(const IntPoly& r, const IntPoly& r_prime,
                                              std::uint64_t p, CyclePattern pattern) {
  auto roots = roots_mod_p(r_prime, p);
  if (roots.size() != static_cast<std::size_t>(r.degree() - 1)) return std::nullopt;
  if (reduce_mod(r_prime, p).degree() != r_prime.degree()) return std::nullopt;
  return WitnessPrime{p, pattern, std::move(roots), mod_u64(r.coeff(0), p)};
}

/// Smallest primes n < p <= bound realizing, in order, the n-cycle, the
/// transposition and the (n-1)-cycle for R, each with R' split mod p.
inline WitnessPrimes find_witness_primes(const ReferencePoly& ref, std::uint64_t bound) {
  const int n = ref.poly.degree();
  std::optional<WitnessPrime> slot[3];
  for (std::uint64_t p : primes_up_to(bound)) {
    if (p <= static_cast<std::uint64_t>(n)) continue;
    const auto type = frobenius_cycle_type(ref.poly, p);
    if (!type) continue;
    for (int k = 0; k < 3; ++k) {
      if (slot[k] || *type != cycle_type_of(kSnPatterns[k], n)) continue;
      if (auto w = witness_at(ref.poly, ref.derivative, p, kSnPatterns[k])) {
        slot[k] = std::move(w);
        break;  // one role per prime (matters for n = 3, where two patterns coincide)
      }
      break;
    }
    if (slot[0] && slot[1] && slot[2]) {
      return WitnessPrimes{{*slot[0], *slot[1], *slot[2]}};
    }
  }
  std::string missing;
  for (int k = 0; k < 3; ++k) {
    if (!slot[k]) missing += std::string(missing.empty() ? "" : ", ") + pattern_name(kSnPatterns[k]);
  }
  throw NotFoundWithinBound("no witness prime <= " + std::to_string(bound) + " for: " + missing);
}

struct ReferenceSearch {
  int attempts = 2000;
  std::uint64_t sn_bound = 10000;
  std::uint64_t witness_bound = 1000000;
};

/// Seeded search over monic R with coefficients in [-n^2, n^2].
inline ReferencePoly find_reference_poly(int n, std::uint64_t seed, const ReferenceSearch& search = {}) {
  if (n < 3) throw InvalidArgument("degree must be at least 3");
  std::mt19937_64 rng(seed);
  const long spread = static_cast<long>(n) * n;
  for (int attempt = 0; attempt < search.attempts; ++attempt) {
    std::vector<mpz_class> c(static_cast<std::size_t>(n + 1));
    for (int k = 0; k < n; ++k) c[static_cast<std::size_t>(k)] = uniform_in(rng, -spread, spread);
    c[static_cast<std::size_t>(n)] = 1;
    ReferencePoly ref{IntPoly(std::move(c)), IntPoly(), {}};
    if (discriminant(ref.poly) == 0) continue;
    ref.derivative = derivative(ref.poly);
    auto sn = find_sn_witnesses(ref.poly, search.sn_bound);
    if (!sn) continue;
    ref.sn_witnesses = std::move(*sn);
    try {
      find_witness_primes(ref, search.witness_bound);
    } catch (const NotFoundWithinBound&) {
      continue;
    }
    return ref;
  }
  throw SearchExhausted("no reference polynomial of degree " + std::to_string(n) + " within " +
                        std::to_string(search.attempts) + " attempts");
}

struct GaloisCertificate {
  IntPoly poly;
  std::vector<FrobeniusWitness> witnesses;
  std::string conclusion = "S_n";
};

/// Recomputes every claimed cycle type and demands all three S_n patterns.
inline GaloisCertificate certify_sn(const IntPoly& poly, const std::vector<FrobeniusWitness>& witnesses) {
  const int n = poly.degree();
  if (n < 2) throw InvalidArgument("degree must be at least 2");
  for (const auto& w : witnesses) {
    if (w.prime < 2 || !is_probable_prime(from_u64(w.prime))) throw BadWitness(w.prime, "not prime");
    std::vector<int> actual;
    try {
      actual = degree_multiset_mod_p(poly, w.prime);
    } catch (const NotSeparableModP&) {
      throw BadWitness(w.prime, "polynomial not separable mod p");
    } catch (const DegreeDropModP&) {
      throw BadWitness(w.prime, "leading coefficient vanishes mod p");
    }
    if (actual != w.cycle_type) throw BadWitness(w.prime, "claimed cycle type does not match");
  }
  std::string missing;
  for (CyclePattern pattern : kSnPatterns) {
    const auto want = cycle_type_of(pattern, n);
    const bool present = std::any_of(witnesses.begin(), witnesses.end(),
                                     [&](const FrobeniusWitness& w) { return w.cycle_type == want; });
    if (!present) missing += std::string(missing.empty() ? "" : ", ") + pattern_name(pattern);
  }
  if (!missing.empty()) throw InsufficientWitnesses("missing " + missing);
  return GaloisCertificate{poly, witnesses, "S_n"};
}

/// The conclusion for a squarefree-discriminant S_n polynomial: K = Q[x]/(P)
/// has field discriminant Delta, and K(sqrt Delta) / Q(sqrt Delta) is an
/// unramified A_n extension avoiding the listed primes.
struct UnramifiedAnCertificate {
  IntPoly poly;
  mpz_class field_discriminant;
  bool real_quadratic = false;  // Delta > 0
  std::vector<std::uint64_t> avoid;
};

inline UnramifiedAnCertificate certify_unramified_an(const Instance& inst, const SquarefreeProof& sf,
                                                     const GaloisCertificate& gc,
                                                     const std::vector<std::uint64_t>& avoid) {
  if (gc.poly != inst.pb()) throw MismatchedComponents("Galois certificate is for another polynomial");
  const auto& factors = inst.factors();
  if (sf.factors.size() != factors.size()) {
    throw MismatchedComponents("squarefree proof has the wrong number of factors");
  }
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (sf.factors[i].value != factors[i]) {
      throw MismatchedComponents("squarefree proof covers a different F" + std::to_string(i + 1));
    }
  }
  const auto full = cycle_type_of(CyclePattern::Full, inst.shape().degree());
  if (std::none_of(gc.witnesses.begin(), gc.witnesses.end(),
                   [&](const FrobeniusWitness& w) { return w.cycle_type == full; })) {
    throw MismatchedComponents("no irreducibility witness");
  }
  const mpz_class delta = discriminant_factored(inst).value;
  for (std::uint64_t s : avoid) {
    if (divides(from_u64(s), delta)) throw AvoidanceViolated(s);
  }
  return UnramifiedAnCertificate{inst.pb(), delta, delta > 0, avoid};
}

}  // namespace anforge

#endif  // ANFORGE_GALOIS_HPP_
