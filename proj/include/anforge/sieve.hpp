#ifndef ANFORGE_SIEVE_HPP_
#define ANFORGE_SIEVE_HPP_

// Scanning b along its progression for squarefree discriminants, and the
// exact small-window statistics of the squarefree sieve:
//   N0 = admissible b,  N1 = b with every factor squarefree,
//   N2 = b with no p^2 | F_i for p < xi,  N3 = #{(b, p) : p >= xi, p^2 | some F_i},
// which satisfy N2 >= N1 >= N2 - N3.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "anforge/arith.hpp"
#include "anforge/congruence.hpp"
#include "anforge/construct.hpp"
#include "anforge/error.hpp"
#include "anforge/factor.hpp"

namespace anforge {

/// Primes q <= bound dividing each F_i(b_k) for b_k = start + k * step,
/// k in [0, count), found by marking residue classes of k.
class ProgressionSieve {
 public:
  ProgressionSieve(const std::vector<LinearForm>& forms, const mpz_class& start, const mpz_class& step,
                   std::size_t count, std::uint64_t bound)
      : forms_(forms.size()), hits_(count * forms.size()) {
    std::vector<mpz_class> at_start, stride;
    for (const auto& f : forms) {
      at_start.push_back(f.at(start));
      stride.push_back(f.slope * step);
    }
    for (std::uint64_t q : detail::small_primes()) {
      if (q > bound) break;
      for (std::size_t i = 0; i < forms_; ++i) {
        const std::uint64_t a = mpz_fdiv_ui(stride[i].get_mpz_t(), q);
        const std::uint64_t c = mpz_fdiv_ui(at_start[i].get_mpz_t(), q);
        std::uint64_t k0;
        std::uint64_t period = q;
        if (a == 0) {
          if (c != 0) continue;
          k0 = 0;
          period = 1;
        } else {
          k0 = mulmod((q - c) % q, invmod_prime(a, q), q);
        }
        for (std::uint64_t k = k0; k < count; k += period) {
          hits_[k * forms_ + i].push_back(static_cast<std::uint32_t>(q));
        }
      }
    }
  }

  /// hints for candidate k, one list per form
  std::vector<std::vector<std::uint32_t>> hints(std::size_t k) const {
    return {hits_.begin() + static_cast<std::ptrdiff_t>(k * forms_),
            hits_.begin() + static_cast<std::ptrdiff_t>((k + 1) * forms_)};
  }

 private:
  std::size_t forms_;
  std::vector<std::vector<std::uint32_t>> hits_;
};

struct ScanStats {
  std::uint64_t progression_terms = 0;  // base-progression terms visited
  std::uint64_t excluded = 0;           // removed by an exclusion
  std::uint64_t examined = 0;           // admissible b tested
  std::uint64_t accepted = 0;
  std::uint64_t zero_factor = 0;
  std::uint64_t not_coprime = 0;   // gcd(b, n!) != 1
  std::uint64_t square_found = 0;  // p^2 | F_i
  std::uint64_t shared_prime = 0;  // p | F_i and p | F_j
  std::uint64_t unknown = 0;       // factoring budget ran out
  bool window_exhausted = false;
};

struct ScanHit {
  mpz_class b;
  SquarefreeProof proof;
};

struct ScanResult {
  std::vector<ScanHit> hits;
  ScanStats stats;
};

struct ScanOptions {
  std::size_t max_results = 1;
  std::uint64_t max_candidates = UINT64_MAX;  // admissible b examined at most
  FactorBudget budget{};
  std::size_t block = 1024;  // progression terms sieved together
  unsigned workers = 1;
};

namespace detail {

enum class Outcome { Accepted, ZeroFactor, NotCoprime, Square, Shared, Unknown };

struct CandidateResult {
  Outcome outcome = Outcome::Unknown;
  SquarefreeProof proof;
};

inline CandidateResult test_candidate(const std::vector<LinearForm>& forms, const mpz_class& b,
                                      const mpz_class& unit_modulus,
                                      const std::vector<std::vector<std::uint32_t>>& hints,
                                      const FactorBudget& budget) {
  CandidateResult r;
  std::vector<mpz_class> values;
  for (const auto& f : forms) {
    values.push_back(f.at(b));
    if (values.back() == 0) {
      r.outcome = Outcome::ZeroFactor;
      return r;
    }
  }
  if (gcd(b, unit_modulus) != 1) {
    r.outcome = Outcome::NotCoprime;
    return r;
  }
  auto verdict = squarefree_proof_with_hints(values, hints, budget);
  switch (verdict.kind) {
    case SquarefreeVerdict::Kind::Proof:
      r.outcome = Outcome::Accepted;
      r.proof = std::move(verdict.proof);
      break;
    case SquarefreeVerdict::Kind::NotSquarefree:
      r.outcome = verdict.shared_with ? Outcome::Shared : Outcome::Square;
      break;
    case SquarefreeVerdict::Kind::Unknown:
      r.outcome = Outcome::Unknown;
      break;
  }
  return r;
}

}  // namespace detail

/// Tests admissible b in ascending order until max_results proofs are found,
/// the window ends, or max_candidates have been examined. The outcome does
/// not depend on the worker count.
inline ScanResult scan(const Shape& shape, const mpz_class& ell, const BProgram& program,
                       const ScanOptions& options = {}) {
  ScanResult result;
  if (options.max_results == 0) {
    result.stats.window_exhausted = program.window.empty();
    return result;
  }
  if (!program.first_admissible()) throw EmptyProgram("no admissible b in the window");
  const auto forms = discriminant_forms(shape, ell);
  const mpz_class unit_modulus = factorial(shape.degree());
  const mpz_class& step = program.base.modulus;
  mpz_class start = program.progression_start(program.window.lo);
  auto& stats = result.stats;
  const unsigned workers = std::max(1U, options.workers);

  while (true) {
    if (start > program.window.hi) {
      stats.window_exhausted = true;
      break;
    }
    const mpz_class remaining = (program.window.hi - start) / step + 1;
    std::size_t count = options.block;
    if (remaining < count) count = remaining.get_ui();

    // admissible candidates of this block, within the candidate allowance
    std::vector<std::size_t> picks;
    std::size_t visited = 0;
    for (; visited < count; ++visited) {
      if (stats.examined + picks.size() >= options.max_candidates) break;
      if (program.excluded(start + step * visited)) {
        ++stats.excluded;
      } else {
        picks.push_back(visited);
      }
    }
    const ProgressionSieve sieve(forms, start, step, count, options.budget.trial_bound);

    // chunks of `workers` candidates; merged in ascending order so the
    // stopping point does not depend on the worker count
    std::size_t consumed = visited;
    bool done = false;
    for (std::size_t chunk = 0; chunk < picks.size() && !done; chunk += workers) {
      const std::size_t chunk_end = std::min(picks.size(), chunk + workers);
      std::vector<detail::CandidateResult> outcomes(chunk_end - chunk);
      auto work = [&](std::size_t j) {
        const mpz_class b = start + step * picks[j];
        outcomes[j - chunk] = detail::test_candidate(forms, b, unit_modulus, sieve.hints(picks[j]), options.budget);
      };
      if (outcomes.size() == 1) {
        work(chunk);
      } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = chunk; j < chunk_end; ++j) pool.emplace_back(work, j);
      }
      for (std::size_t j = chunk; j < chunk_end; ++j) {
        ++stats.examined;
        auto& o = outcomes[j - chunk];
        switch (o.outcome) {
          case detail::Outcome::Accepted:
            ++stats.accepted;
            result.hits.push_back({start + step * picks[j], std::move(o.proof)});
            break;
          case detail::Outcome::ZeroFactor: ++stats.zero_factor; break;
          case detail::Outcome::NotCoprime: ++stats.not_coprime; break;
          case detail::Outcome::Square: ++stats.square_found; break;
          case detail::Outcome::Shared: ++stats.shared_prime; break;
          case detail::Outcome::Unknown: ++stats.unknown; break;
        }
        if (result.hits.size() >= options.max_results) {
          consumed = picks[j] + 1;
          done = true;
          break;
        }
      }
    }
    // exclusions counted past the stopping point are given back
    for (std::size_t k = consumed; k < visited; ++k) {
      if (program.excluded(start + step * k)) --stats.excluded;
    }
    stats.progression_terms += consumed;
    if (result.hits.size() >= options.max_results) break;
    if (stats.examined >= options.max_candidates) break;
    start += step * count;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Sieve statistics

struct SieveStats {
  std::uint64_t n0 = 0;  // admissible b with nonzero factors
  std::uint64_t n1 = 0;
  std::uint64_t n2 = 0;
  std::uint64_t n3 = 0;
  std::uint64_t degenerate = 0;  // admissible b where some factor vanishes
  double xi = 0;
  IntWindow window;
  Congruence base;

  bool inequality_holds() const { return n2 >= n1 && n1 + n3 >= n2 && n0 >= n1; }
  double density() const { return n0 == 0 ? 0.0 : static_cast<double>(n1) / static_cast<double>(n0); }
};

struct StatsOptions {
  std::optional<double> xi;  // default: log(window width) / 4
  FactorBudget budget{100000, 2000000, kDefaultMillerRabinRounds};
  std::uint64_t max_candidates = 2000000;
};

/// Exact N0..N3 over the program's window by complete factorization.
inline SieveStats sieve_stats(const Shape& shape, const mpz_class& ell, const BProgram& program,
                              const StatsOptions& options = {}) {
  SieveStats stats;
  stats.window = program.window;
  stats.base = program.base;
  const double width = program.window.width().get_d();
  stats.xi = options.xi.value_or(width >= 1 ? std::log(width) / 4 : 0.0);
  if (program.window.empty()) return stats;
  const auto forms = discriminant_forms(shape, ell);
  const mpz_class& step = program.base.modulus;
  const mpz_class terms = program.progression_size();
  if (terms > options.max_candidates) {
    throw BudgetExceeded("window holds " + terms.get_str() + " progression terms");
  }
  const std::size_t total = terms.get_ui();
  const mpz_class first = program.progression_start(program.window.lo);
  constexpr std::size_t kBlock = 4096;
  for (std::size_t offset = 0; offset < total; offset += kBlock) {
    const std::size_t count = std::min(kBlock, total - offset);
    const mpz_class start = first + step * offset;
    const ProgressionSieve sieve(forms, start, step, count, options.budget.trial_bound);
    for (std::size_t k = 0; k < count; ++k) {
      const mpz_class b = start + step * k;
      if (program.excluded(b)) continue;
      bool zero = false;
      for (const auto& f : forms) zero = zero || f.at(b) == 0;
      if (zero) {
        ++stats.degenerate;
        continue;
      }
      ++stats.n0;
      const auto hints = sieve.hints(k);
      bool small_square = false, any_square = false;
      std::set<mpz_class> large_square_primes;
      for (std::size_t i = 0; i < forms.size(); ++i) {
        std::vector<mpz_class> primes;
        const mpz_class rest = detail::strip_small_primes(forms[i].at(b), options.budget.trial_bound,
                                                          &hints[i], primes);
        std::uint64_t rho = options.budget.rho_iterations;
        std::vector<mpz_class> unfactored;
        detail::finish_factorization(rest, options.budget.trial_bound, rho, options.budget.mr_rounds, primes,
                                     unfactored);
        if (!unfactored.empty()) {
          throw BudgetExceeded("could not factor F" + std::to_string(i + 1) + "(" + b.get_str() + ")");
        }
        for (const auto& pp : detail::collect(std::move(primes))) {
          if (pp.exponent < 2) continue;
          any_square = true;
          if (pp.prime.get_d() < stats.xi) {
            small_square = true;
          } else {
            large_square_primes.insert(pp.prime);
          }
        }
      }
      if (!any_square) ++stats.n1;
      if (!small_square) ++stats.n2;
      stats.n3 += large_square_primes.size();
    }
  }
  if (!stats.inequality_holds()) throw std::logic_error("sieve inequality violated");
  return stats;
}

/// prod over primes p <= bound of the chance that no factor is divisible by
/// p^2, for b uniform in the classes the program allows mod p. Counts are
/// brute force over b mod p^2.
inline mpq_class local_density(const Shape& shape, const mpz_class& ell, const BProgram& program,
                               std::uint64_t bound) {
  if (bound > 100000) throw InvalidArgument("local_density: bound too large for brute force");
  const auto forms = discriminant_forms(shape, ell);
  mpq_class density = 1;
  for (std::uint64_t p : primes_up_to(bound)) {
    const std::uint64_t p2 = p * p;
    const mpz_class pz = from_u64(p);
    std::vector<bool> allowed(p, true);
    if (divides(pz, program.base.modulus)) {
      const std::uint64_t fixed = mod_u64(program.base.residue, p);
      for (std::uint64_t t = 0; t < p; ++t) allowed[t] = t == fixed;
    }
    for (const auto& e : program.exclusions) {
      if (e.modulus != pz) continue;
      for (const auto& r : e.forbidden) allowed[r.get_ui()] = false;
    }
    std::vector<std::pair<std::uint64_t, std::uint64_t>> reduced;
    for (const auto& f : forms) reduced.emplace_back(mod_u64(f.slope, p2), mod_u64(f.offset, p2));
    std::uint64_t admissible = 0, hit = 0;
    for (std::uint64_t b = 0; b < p2; ++b) {
      if (!allowed[b % p]) continue;
      ++admissible;
      for (const auto& [s, o] : reduced) {
        if ((mulmod(s, b, p2) + o) % p2 == 0) {
          ++hit;
          break;
        }
      }
    }
    if (admissible == 0) return 0;
    density *= mpq_class(from_u64(admissible - hit), from_u64(admissible));
  }
  density.canonicalize();
  return density;
}

}  // namespace anforge

#endif  // ANFORGE_SIEVE_HPP_
