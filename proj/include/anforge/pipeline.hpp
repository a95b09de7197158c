#ifndef ANFORGE_PIPELINE_HPP_
#define ANFORGE_PIPELINE_HPP_

// End-to-end forging: reference polynomial and witness primes -> ell ->
// shape congruences -> signature window -> b progression -> scan ->
// certificates. Also the field-counting and sieve-statistics drivers.

#include <gmpxx.h>

#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "anforge/arith.hpp"
#include "anforge/certificate.hpp"
#include "anforge/congruence.hpp"
#include "anforge/construct.hpp"
#include "anforge/error.hpp"
#include "anforge/factor.hpp"
#include "anforge/galois.hpp"
#include "anforge/signature.hpp"
#include "anforge/sieve.hpp"

namespace anforge {

struct ReferenceChoice {
  ReferencePoly ref;
  WitnessPrimes witnesses;
  std::uint64_t seed = 0;
};

/// Among the reference searches seeded 1..candidates, the one whose witness
/// primes have the smallest product (smaller shapes, smaller discriminants).
/// Cached per (n, candidates).
inline ReferenceChoice choose_reference(int n, int candidates = 8, const ReferenceSearch& search = {}) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, ReferenceChoice> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find({n, candidates}); it != cache.end()) return it->second;
  std::optional<ReferenceChoice> best;
  for (int seed = 1; seed <= candidates; ++seed) {
    ReferencePoly ref;
    try {
      ref = find_reference_poly(n, static_cast<std::uint64_t>(seed), search);
    } catch (const SearchExhausted&) {
      continue;
    }
    auto wp = find_witness_primes(ref, search.witness_bound);
    if (!best || wp.product() < best->witnesses.product()) {
      best = ReferenceChoice{std::move(ref), std::move(wp), static_cast<std::uint64_t>(seed)};
    }
  }
  if (!best) throw BudgetExhausted("reference", "no reference polynomial of degree " + std::to_string(n));
  cache.emplace(std::pair{n, candidates}, *best);
  return *best;
}

/// Smallest prime above n that is neither a witness prime nor avoided.
inline mpz_class choose_ell(int n, const WitnessPrimes& wp, const std::vector<std::uint64_t>& avoid) {
  std::set<std::uint64_t> taken(avoid.begin(), avoid.end());
  for (const auto& w : wp.primes) taken.insert(w.prime);
  std::uint64_t p = static_cast<std::uint64_t>(n);
  do {
    p = next_prime_after(p);
  } while (taken.count(p) != 0);
  return from_u64(p);
}

struct ForgeOptions {
  int n = 5;
  int r = 0;
  std::size_t count = 1;
  std::vector<std::uint64_t> avoid;
  std::uint64_t seed = 1;
  bool allow_small_n = false;

  int reference_candidates = 8;
  int shape_attempts = 400;
  long shape_spread = 2;
  std::uint64_t terms_per_shape = 20000;     // window width in progression terms
  std::uint64_t candidates_per_shape = 600;  // admissible b tested per shape
  FactorBudget budget{100000, 30000, kDefaultMillerRabinRounds};
  unsigned workers = 1;
  std::optional<std::chrono::seconds> time_limit;
  std::function<bool(const Certificate&)> keep;  // extra acceptance filter
  std::function<void(const std::string&)> log;
};

struct ForgeReport {
  std::vector<Certificate> certificates;
  std::optional<std::string> exhausted;  // stage that starved, if short
  std::map<std::string, int> failures;   // per stage, over shape attempts
  int shape_attempts = 0;
  std::size_t duplicates = 0;  // repeated discriminants
  std::size_t filtered = 0;    // rejected by ForgeOptions::keep
  ScanStats scan;
  mpz_class ell;
  std::uint64_t reference_seed = 0;
  double seconds = 0;
};

inline void validate_forge_options(const ForgeOptions& o) {
  if (o.n < 3 || (o.n < 5 && !o.allow_small_n)) {
    throw InvalidArgument("n = " + std::to_string(o.n) + " needs n >= 5 (or n >= 3 with small n allowed)");
  }
  if (o.r < 0 || o.r > o.n / 2) {
    throw InvalidArgument("r = " + std::to_string(o.r) + " outside 0.." + std::to_string(o.n / 2));
  }
  for (std::uint64_t s : o.avoid) {
    if (!is_small_prime(s) && !is_probable_prime(from_u64(s))) {
      throw InvalidArgument("avoid entry " + std::to_string(s) + " is not prime");
    }
  }
}

/// Assembles and self-verifies the certificate for one scan hit. Throws
/// AvoidanceViolated when an avoided prime divides the discriminant.
inline Certificate make_certificate(int r, const ReferenceChoice& choice, const Shape& shape, const mpz_class& ell,
                                    const ScanHit& hit, const std::vector<std::uint64_t>& avoid,
                                    std::uint64_t seed) {
  const int n = shape.degree();
  const Instance inst = instantiate(shape, ell, hit.b);
  std::vector<FrobeniusWitness> frob;
  for (const auto& w : choice.witnesses.primes) frob.push_back({w.prime, cycle_type_of(w.pattern, n)});
  const GaloisCertificate gc = certify_sn(inst.pb(), frob);
  const UnramifiedAnCertificate un = certify_unramified_an(inst, hit.proof, gc, avoid);

  Certificate c;
  c.n = n;
  c.r = r;
  c.avoid = avoid;
  c.pb = inst.pb();
  c.ell = ell;
  c.b = hit.b;
  c.u = shape.u();
  c.a = shape.a();
  const auto fd = discriminant_factored(inst);
  c.discriminant_sign = fd.sign;
  c.factors = fd.factors;
  c.discriminant = fd.value;
  c.squarefree = hit.proof;
  for (const auto& w : gc.witnesses) c.galois.push_back({w.prime, w.cycle_type});
  c.real_roots = real_root_count(c.pb);
  c.complex_pairs = (n - c.real_roots) / 2;
  c.quadratic_field = un.real_quadratic ? "real" : "imaginary";
  c.reference = choice.ref.poly;
  for (const auto& w : choice.witnesses.primes) c.reference_witnesses.push_back({w.prime, w.roots, w.r0});
  c.seed = seed;
  c.reference_seed = choice.seed;
  if (c.complex_pairs != r) throw std::logic_error("forged polynomial has the wrong signature");
  const auto report = verify(c);
  if (!report.accepted()) throw std::logic_error("forged certificate fails verification: " + report.summary());
  return c;
}

inline ForgeReport run_forge(const ForgeOptions& o) {
  validate_forge_options(o);
  const auto started = std::chrono::steady_clock::now();
  auto log = [&](const std::string& msg) {
    if (o.log) o.log(msg);
  };
  ForgeReport report;
  const ReferenceChoice choice = choose_reference(o.n, o.reference_candidates);
  const auto& wp = choice.witnesses;
  report.reference_seed = choice.seed;
  report.ell = choose_ell(o.n, wp, o.avoid);
  const mpz_class& ell = report.ell;
  {
    std::string primes;
    for (const auto& w : wp.primes) primes += " " + std::to_string(w.prime);
    log("reference R = " + choice.ref.poly.to_string() + " (seed " + std::to_string(choice.seed) +
        "), witness primes" + primes + ", ell = " + ell.get_str());
  }
  const ShapeCongruences sc = derive_shape_congruences(o.n, wp, ell);
  const mpz_class width = factorial(o.n) * wp.product() * from_u64(o.terms_per_shape);

  std::mt19937_64 rng(o.seed);
  std::set<mpz_class> seen;
  auto elapsed = [&] { return std::chrono::steady_clock::now() - started; };
  while (report.certificates.size() < o.count) {
    if (report.shape_attempts >= o.shape_attempts) {
      // name the stage that consumed the most attempts
      std::string stage = "scan";
      int most = -1;
      for (const auto& [name, k] : report.failures) {
        if (k > most) {
          stage = name;
          most = k;
        }
      }
      report.exhausted = stage;
      break;
    }
    if (o.time_limit && elapsed() > *o.time_limit) {
      report.exhausted = "time";
      break;
    }
    ++report.shape_attempts;
    std::optional<Shape> shape;
    try {
      shape = sample_shape(o.n, sc, rng, o.shape_spread);
    } catch (const InfeasibleConstraint&) {
      ++report.failures["shape"];
      continue;
    }
    IntWindow window;
    try {
      window = select_window(root_profile(*shape, ell), o.r, o.n).truncate(width);
    } catch (const RepeatedCriticalValue&) {
      ++report.failures["shape"];
      continue;
    } catch (const SignatureUnachievable&) {
      ++report.failures["signature"];
      continue;
    }
    BProgram program;
    try {
      program = assemble_b_program(o.n, wp, *shape, ell, window, o.avoid);
    } catch (const EmptyProgram&) {
      ++report.failures["program"];
      continue;
    }
    ScanOptions so;
    so.max_results = o.count - report.certificates.size();
    so.max_candidates = o.candidates_per_shape;
    so.budget = o.budget;
    so.workers = o.workers;
    const ScanResult result = scan(*shape, ell, program, so);
    const auto& st = result.stats;
    report.scan.progression_terms += st.progression_terms;
    report.scan.excluded += st.excluded;
    report.scan.examined += st.examined;
    report.scan.accepted += st.accepted;
    report.scan.zero_factor += st.zero_factor;
    report.scan.not_coprime += st.not_coprime;
    report.scan.square_found += st.square_found;
    report.scan.shared_prime += st.shared_prime;
    report.scan.unknown += st.unknown;
    std::size_t kept = 0;
    for (const auto& hit : result.hits) {
      Certificate cert = make_certificate(o.r, choice, *shape, ell, hit, o.avoid, o.seed);
      if (!seen.insert(cert.discriminant).second) {
        ++report.duplicates;
        continue;
      }
      if (o.keep && !o.keep(cert)) {
        ++report.filtered;
        continue;
      }
      report.certificates.push_back(std::move(cert));
      ++kept;
    }
    if (kept == 0) ++report.failures["scan"];
    log("shape " + std::to_string(report.shape_attempts) + ": examined " + std::to_string(st.examined) +
        ", squares " + std::to_string(st.square_found + st.shared_prime) + ", unknown " +
        std::to_string(st.unknown) + ", kept " + std::to_string(kept) + " (total " +
        std::to_string(report.certificates.size()) + "/" + std::to_string(o.count) + ")");
  }
  report.seconds = std::chrono::duration<double>(elapsed()).count();
  return report;
}

/// Throws BudgetExhausted naming the starved stage when fewer than
/// `count` certificates were found.
inline std::vector<Certificate> forge(const ForgeOptions& options) {
  ForgeReport report = run_forge(options);
  if (report.exhausted) {
    throw BudgetExhausted(*report.exhausted, std::to_string(report.certificates.size()) + " of " +
                                                 std::to_string(options.count) + " certificates");
  }
  return std::move(report.certificates);
}

// ---------------------------------------------------------------------------
// Field counting

struct FieldCount {
  int n = 0;
  int r = 0;
  std::optional<mpz_class> bound;      // on |Delta|; nullopt: unbounded
  std::vector<mpz_class> discriminants;  // pairwise distinct, in discovery order
  std::size_t collisions = 0;            // b values repeating an earlier Delta
  std::size_t over_bound = 0;
  std::optional<std::string> exhausted;
  std::vector<Certificate> certificates;

  std::size_t count() const { return discriminants.size(); }
};

/// Forges until `target` distinct squarefree discriminants with |Delta| <=
/// bound are found or the budget runs out (partial count, stage recorded).
inline FieldCount count_fields(ForgeOptions options, std::size_t target,
                               const std::optional<mpz_class>& bound = std::nullopt) {
  FieldCount out;
  out.n = options.n;
  out.r = options.r;
  out.bound = bound;
  options.count = target;
  options.keep = [&](const Certificate& c) {
    if (bound && abs(c.discriminant) > *bound) {
      ++out.over_bound;
      return false;
    }
    return true;
  };
  ForgeReport report = run_forge(options);
  out.collisions = report.duplicates;
  out.exhausted = report.exhausted;
  for (auto& c : report.certificates) out.discriminants.push_back(c.discriminant);
  out.certificates = std::move(report.certificates);
  return out;
}

// ---------------------------------------------------------------------------
// Sieve statistics

struct StatsReport {
  SieveStats stats;
  mpq_class local_density;  // primes <= local_bound
  std::uint64_t local_bound = 1000;
};

/// N0..N3 over b = 1 mod n! in the window, next to the truncated local
/// density for the same progression.
inline StatsReport stats_report(const Shape& shape, const mpz_class& ell, const IntWindow& window,
                                const StatsOptions& options = {}, std::uint64_t local_bound = 1000) {
  const BProgram program{{1, factorial(shape.degree())}, {}, window};
  StatsReport report;
  report.stats = sieve_stats(shape, ell, program, options);
  report.local_bound = local_bound;
  report.local_density = local_density(shape, ell, program, local_bound);
  return report;
}

}  // namespace anforge

#endif  // ANFORGE_PIPELINE_HPP_
