#ifndef ANFORGE_FACTOR_HPP_
#define ANFORGE_FACTOR_HPP_

// Integer factorization and squarefree certification.
//
// Primality: Miller-Rabin with the first 13 prime bases, which is a proof
// below 3317044064679887385961981 (Sorenson-Webster). Above that bound the
// same bases are followed by `rounds` further pseudo-random bases and the
// result is tagged probabilistic.
//
// Factorization: trial division by primes up to a bound (default 1e5), then
// Pollard rho with Brent's cycle detection under an iteration budget.
// Cofactors that survive the budget are reported, never guessed.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "anforge/arith.hpp"

namespace anforge {

inline constexpr int kDefaultMillerRabinRounds = 40;

inline const mpz_class& deterministic_mr_limit() {
  static const mpz_class limit("3317044064679887385961981");
  return limit;
}

struct PrimalityTag {
  enum class Kind { DeterministicSmall, Probabilistic };
  Kind kind = Kind::DeterministicSmall;
  int rounds = 0;  // extra random bases; 0 for deterministic tags

  friend bool operator==(const PrimalityTag&, const PrimalityTag&) = default;
};

namespace detail {

inline bool miller_rabin_round(const mpz_class& n, const mpz_class& n_minus_1,
                               const mpz_class& d, unsigned long s, const mpz_class& base) {
  mpz_class x;
  mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == n_minus_1) return true;
  for (unsigned long r = 1; r < s; ++r) {
    x = x * x % n;
    if (x == n_minus_1) return true;
    if (x == 1) return false;
  }
  return false;
}

inline const std::vector<std::uint64_t>& small_primes() {
  static const std::vector<std::uint64_t> primes = primes_up_to(1000000);
  return primes;
}

}  // namespace detail

/// Miller-Rabin; deterministic below deterministic_mr_limit().
inline bool is_probable_prime(const mpz_class& m, int rounds = kDefaultMillerRabinRounds) {
  if (m < 2) return false;
  static constexpr unsigned long kBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
  for (unsigned long p : kBases) {
    if (m == p) return true;
    if (mpz_divisible_ui_p(m.get_mpz_t(), p) != 0) return false;
  }
  const mpz_class n_minus_1 = m - 1;
  mpz_class d = n_minus_1;
  const unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
  for (unsigned long p : kBases) {
    if (!detail::miller_rabin_round(m, n_minus_1, d, s, mpz_class(p))) return false;
  }
  if (m < deterministic_mr_limit()) return true;
  // Fixed seed: the same input always sees the same bases.
  std::mt19937_64 rng(0x616e666f726765ULL);
  const mpz_class span = m - 3;
  for (int r = 0; r < rounds; ++r) {
    mpz_class base = 0;
    for (int limb = 0; limb < 4; ++limb) {
      base = (base << 64) + mpz_class(static_cast<unsigned long>(rng()));
    }
    base = mod_floor(base, span) + 2;
    if (!detail::miller_rabin_round(m, n_minus_1, d, s, base)) return false;
  }
  return true;
}

inline PrimalityTag primality_tag_for(const mpz_class& prime, int rounds) {
  if (prime < deterministic_mr_limit()) return {PrimalityTag::Kind::DeterministicSmall, 0};
  return {PrimalityTag::Kind::Probabilistic, rounds};
}

struct FactorBudget {
  std::uint64_t trial_bound = 100000;
  std::uint64_t rho_iterations = 200000;
  int mr_rounds = kDefaultMillerRabinRounds;
};

struct PrimePower {
  mpz_class prime;
  unsigned exponent = 0;
};

struct Factorization {
  int unit = 1;
  std::vector<PrimePower> factors;          // ascending primes
  std::vector<mpz_class> unfactored;        // composite cofactors left over

  bool complete() const { return unfactored.empty(); }
};

namespace detail {

inline mpz_class brent_step(const mpz_class& y, const mpz_class& c, const mpz_class& n) {
  mpz_class r = y * y + c;
  mpz_mod(r.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t());
  return r;
}

// A nontrivial divisor of the odd composite n, or nullopt when the budget
// runs out. `budget` is decremented by the number of map evaluations.
inline std::optional<mpz_class> pollard_brent(const mpz_class& n, std::uint64_t& budget) {
  constexpr std::uint64_t kBatch = 128;
  for (unsigned long c_value = 1; budget > 0; ++c_value) {
    const mpz_class c(c_value);
    mpz_class y = 2, x, ys, q = 1, g = 1, diff;
    std::uint64_t r = 1;
    while (g == 1 && budget > 0) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = brent_step(y, c, n);
      budget = budget > r ? budget - r : 0;
      std::uint64_t k = 0;
      while (k < r && g == 1 && budget > 0) {
        ys = y;
        const std::uint64_t steps = std::min(kBatch, r - k);
        for (std::uint64_t i = 0; i < steps; ++i) {
          y = brent_step(y, c, n);
          diff = x - y;
          q = q * abs(diff);
          mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        }
        budget = budget > steps ? budget - steps : 0;
        g = gcd(q, n);
        k += steps;
      }
      r *= 2;
    }
    if (g == 1) return std::nullopt;
    if (g == n) {
      // backtrack one step at a time from the last saved point
      do {
        ys = brent_step(ys, c, n);
        diff = x - ys;
        g = gcd(abs(diff), n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
  return std::nullopt;
}

// Exact k-th root when n is a perfect power, smallest such base.
inline std::optional<std::pair<mpz_class, unsigned>> perfect_power(const mpz_class& n) {
  if (mpz_perfect_power_p(n.get_mpz_t()) == 0 || n < 4) return std::nullopt;
  const unsigned long bits = mpz_sizeinbase(n.get_mpz_t(), 2);
  for (unsigned long k = bits; k >= 2; --k) {
    mpz_class root;
    if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k) != 0) {
      return std::make_pair(root, static_cast<unsigned>(k));
    }
  }
  return std::nullopt;
}

// Splits a cofactor free of primes <= trial_bound into primes, appending
// each prime (with multiplicity) to `primes`. Unsplittable composites go to
// `unfactored`.
inline void finish_factorization(const mpz_class& cofactor, std::uint64_t trial_bound,
                                 std::uint64_t& rho_budget, int rounds,
                                 std::vector<mpz_class>& primes,
                                 std::vector<mpz_class>& unfactored) {
  std::vector<std::pair<mpz_class, unsigned>> pending{{cofactor, 1}};
  const mpz_class trial_square = from_u64(trial_bound) * from_u64(trial_bound);
  while (!pending.empty()) {
    auto [c, mult] = pending.back();
    pending.pop_back();
    if (c == 1) continue;
    if (c < trial_square || is_probable_prime(c, rounds)) {
      for (unsigned k = 0; k < mult; ++k) primes.push_back(c);
      continue;
    }
    if (auto pp = perfect_power(c)) {
      pending.emplace_back(pp->first, mult * pp->second);
      continue;
    }
    if (auto d = pollard_brent(c, rho_budget)) {
      pending.emplace_back(*d, mult);
      pending.emplace_back(c / *d, mult);
      continue;
    }
    for (unsigned k = 0; k < mult; ++k) unfactored.push_back(c);
  }
}

inline std::vector<PrimePower> collect(std::vector<mpz_class> primes) {
  std::sort(primes.begin(), primes.end());
  std::vector<PrimePower> out;
  for (auto& p : primes) {
    if (!out.empty() && out.back().prime == p) {
      ++out.back().exponent;
    } else {
      out.push_back({p, 1});
    }
  }
  return out;
}

// Divides out every prime <= bound (or only the listed hint primes, which
// must be exactly the primes <= bound dividing m). Returns the cofactor.
inline mpz_class strip_small_primes(const mpz_class& m, std::uint64_t bound,
                                    const std::vector<std::uint32_t>* hints,
                                    std::vector<mpz_class>& primes) {
  mpz_class rest = abs(m);
  auto strip = [&](std::uint64_t p) {
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p) != 0) {
      mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
      primes.push_back(from_u64(p));
    }
  };
  if (hints != nullptr) {
    for (std::uint32_t p : *hints) strip(p);
    return rest;
  }
  for (std::uint64_t p : small_primes()) {
    if (p > bound) break;
    if (from_u64(p) * from_u64(p) > rest) break;
    strip(p);
  }
  return rest;
}

}  // namespace detail

/// Factorization of m != 0; possibly partial (see Factorization::unfactored).
inline Factorization factorize(const mpz_class& m, const FactorBudget& budget = {}) {
  if (m == 0) throw InvalidArgument("factorize: zero");
  Factorization out;
  out.unit = sgn(m);
  std::vector<mpz_class> primes;
  const mpz_class rest = detail::strip_small_primes(m, budget.trial_bound, nullptr, primes);
  // the trial loop may stop early at sqrt(rest), so only claim primality
  // of a leftover below the square of the trial bound
  std::uint64_t rho = budget.rho_iterations;
  detail::finish_factorization(rest, budget.trial_bound, rho, budget.mr_rounds, primes,
                               out.unfactored);
  out.factors = detail::collect(std::move(primes));
  return out;
}

// ---------------------------------------------------------------------------
// Squarefree certificates

struct ProvenPrime {
  mpz_class prime;
  PrimalityTag tag;
};

struct FactorProof {
  mpz_class value;                  // the factor F_i itself (signed)
  std::vector<ProvenPrime> primes;  // strictly increasing, product = |value|
};

/// Every factor fully factored with exponent one, prime lists pairwise
/// disjoint across factors.
struct SquarefreeProof {
  std::vector<FactorProof> factors;
};

struct SquarefreeVerdict {
  enum class Kind { Proof, NotSquarefree, Unknown };
  Kind kind = Kind::Unknown;
  SquarefreeProof proof;                 // Kind::Proof
  std::size_t factor = 0;                // witness / unknown factor index
  mpz_class prime;                       // NotSquarefree: p with p^2 | Delta
  std::optional<std::size_t> shared_with;  // p divides two factors

  bool proven() const { return kind == Kind::Proof; }
};

namespace detail {

inline SquarefreeVerdict squarefree_verdict(std::span<const mpz_class> values,
                                            const FactorBudget& budget,
                                            const std::vector<std::vector<std::uint32_t>>* hints) {
  SquarefreeVerdict verdict;
  std::vector<std::vector<mpz_class>> primes(values.size());
  std::vector<mpz_class> cofactors(values.size());
  // Phase 1: small primes everywhere (cheap rejections first).
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == 0) throw InvalidArgument("squarefree_proof: zero factor");
    cofactors[i] = strip_small_primes(values[i], budget.trial_bound,
                                      hints ? &(*hints)[i] : nullptr, primes[i]);
    for (std::size_t k = 1; k < primes[i].size(); ++k) {
      if (primes[i][k] == primes[i][k - 1]) {
        verdict.kind = SquarefreeVerdict::Kind::NotSquarefree;
        verdict.factor = i;
        verdict.prime = primes[i][k];
        return verdict;
      }
    }
  }
  // Phase 2: large cofactors.
  const mpz_class trial_square = from_u64(budget.trial_bound) * from_u64(budget.trial_bound);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const mpz_class& c = cofactors[i];
    if (c == 1) continue;
    if (mpz_perfect_square_p(c.get_mpz_t()) != 0) {
      verdict.kind = SquarefreeVerdict::Kind::NotSquarefree;
      verdict.factor = i;
      mpz_class root;
      mpz_sqrt(root.get_mpz_t(), c.get_mpz_t());
      verdict.prime = root;
      if (!is_probable_prime(root, budget.mr_rounds)) {
        std::uint64_t rho = budget.rho_iterations;
        std::vector<mpz_class> found, unfactored;
        finish_factorization(root, budget.trial_bound, rho, budget.mr_rounds, found,
                             unfactored);
        if (!found.empty()) verdict.prime = *std::min_element(found.begin(), found.end());
      }
      return verdict;
    }
    if (c < trial_square || is_probable_prime(c, budget.mr_rounds)) {
      primes[i].push_back(c);
      continue;
    }
    std::uint64_t rho = budget.rho_iterations;
    std::vector<mpz_class> unfactored;
    std::vector<mpz_class> found;
    finish_factorization(c, budget.trial_bound, rho, budget.mr_rounds, found, unfactored);
    std::sort(found.begin(), found.end());
    for (std::size_t k = 1; k < found.size(); ++k) {
      if (found[k] == found[k - 1]) {
        verdict.kind = SquarefreeVerdict::Kind::NotSquarefree;
        verdict.factor = i;
        verdict.prime = found[k];
        return verdict;
      }
    }
    if (!unfactored.empty()) {
      verdict.kind = SquarefreeVerdict::Kind::Unknown;
      verdict.factor = i;
      return verdict;
    }
    primes[i].insert(primes[i].end(), found.begin(), found.end());
  }
  // Pairwise disjointness across factors.
  std::map<mpz_class, std::size_t> owner;
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::sort(primes[i].begin(), primes[i].end());
    for (const auto& p : primes[i]) {
      auto [it, inserted] = owner.emplace(p, i);
      if (!inserted) {
        verdict.kind = SquarefreeVerdict::Kind::NotSquarefree;
        verdict.factor = i;
        verdict.prime = p;
        verdict.shared_with = it->second;
        return verdict;
      }
    }
  }
  verdict.kind = SquarefreeVerdict::Kind::Proof;
  for (std::size_t i = 0; i < values.size(); ++i) {
    FactorProof fp{values[i], {}};
    for (const auto& p : primes[i]) {
      fp.primes.push_back({p, primality_tag_for(p, budget.mr_rounds)});
    }
    verdict.proof.factors.push_back(std::move(fp));
  }
  return verdict;
}

}  // namespace detail

/// Certifies that the product of `values` is squarefree, or explains why
/// not. Unknown means the factorization budget ran out; such candidates are
/// never certified.
inline SquarefreeVerdict squarefree_proof(std::span<const mpz_class> values,
                                          const FactorBudget& budget = {}) {
  return detail::squarefree_verdict(values, budget, nullptr);
}

/// Same as squarefree_proof, with the primes <= budget.trial_bound dividing
/// each value supplied by the caller (e.g. from a progression sieve).
inline SquarefreeVerdict squarefree_proof_with_hints(
    std::span<const mpz_class> values, const std::vector<std::vector<std::uint32_t>>& hints,
    const FactorBudget& budget = {}) {
  return detail::squarefree_verdict(values, budget, &hints);
}

}  // namespace anforge

#endif  // ANFORGE_FACTOR_HPP_
