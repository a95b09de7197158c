#ifndef ANFORGE_CONGRUENCE_HPP_
#define ANFORGE_CONGRUENCE_HPP_

// Residue conditions on the shape (u, A) and on b. Fixed residues are merged
// by CRT into a single progression; conditions of the form "b avoids these
// classes mod m" stay as separate exclusions and are tested per candidate.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "anforge/arith.hpp"
#include "anforge/construct.hpp"
#include "anforge/error.hpp"
#include "anforge/factor.hpp"
#include "anforge/galois.hpp"

namespace anforge {

/// Progressions for u and each A_i (i = 2 .. n-1).
struct ShapeCongruences {
  Congruence u;
  std::vector<Congruence> a;
};

namespace detail {

inline Congruence combine_or_throw(const Congruence& x, const Congruence& y, const std::string& what) {
  auto c = crt(x, y);
  if (!c) {
    throw InfeasibleConstraint(what + ": " + x.residue.get_str() + " mod " + x.modulus.get_str() +
                               " conflicts with " + y.residue.get_str() + " mod " + y.modulus.get_str());
  }
  return *c;
}

}  // namespace detail

/// With uniformizer ell (1 for raw shapes), makes P_b' = R' mod every witness
/// prime: u l = n rho_1 and A_i l = rho_i, alongside u = 0 mod u_base(n) and
/// A_i = 0 mod n!.
inline ShapeCongruences derive_shape_congruences(int n, const WitnessPrimes& wp,
                                                 const mpz_class& ell = 1) {
  if (n < 3) throw InvalidArgument("degree must be at least 3");
  const mpz_class nz = n;
  ShapeCongruences sc{{0, u_base(n)}, std::vector<Congruence>(static_cast<std::size_t>(n - 2),
                                                              Congruence{0, factorial(n)})};
  for (const auto& w : wp.primes) {
    const mpz_class p = from_u64(w.prime);
    if (w.prime <= static_cast<std::uint64_t>(n)) {
      throw InvalidArgument("witness prime " + p.get_str() + " does not exceed n");
    }
    if (w.roots.size() != static_cast<std::size_t>(n - 1)) {
      throw InvalidArgument("witness prime " + p.get_str() + " needs n - 1 roots of R'");
    }
    const auto ell_inv = invert(ell, p);
    if (!ell_inv) throw InfeasibleConstraint("ell coincides with witness prime " + p.get_str());
    sc.u = detail::combine_or_throw(
        sc.u, {mod_floor(nz * from_u64(w.roots[0]) * *ell_inv, p), p}, "u");
    for (std::size_t i = 0; i < sc.a.size(); ++i) {
      sc.a[i] = detail::combine_or_throw(
          sc.a[i], {mod_floor(from_u64(w.roots[i + 1]) * *ell_inv, p), p},
          "A_" + std::to_string(i + 2));
    }
  }
  return sc;
}

/// A shape drawn from the progressions: each entry is its residue shifted
/// by k * modulus with k in [-spread, spread]; u is redrawn until coprime to n.
inline Shape sample_shape(int n, const ShapeCongruences& sc, std::mt19937_64& rng, long spread = 2) {
  const mpz_class nz = n;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const mpz_class u = sc.u.residue + sc.u.modulus * uniform_in(rng, -spread, spread);
    if (u == 0 || gcd(u, nz) != 1) continue;
    std::vector<mpz_class> a;
    for (const auto& c : sc.a) a.push_back(c.residue + c.modulus * uniform_in(rng, -spread, spread));
    try {
      return build_shape(n, u, std::move(a));
    } catch (const DegenerateShape&) {
    }
  }
  throw InfeasibleConstraint("no admissible shape in the sampled range");
}

/// b must avoid the listed classes modulo `modulus`.
struct Exclusion {
  enum class Reason { Pairwise, Avoid, Ell };
  mpz_class modulus;
  std::vector<mpz_class> forbidden;  // sorted, reduced
  Reason reason = Reason::Pairwise;

  bool excludes(const mpz_class& b) const {
    return std::binary_search(forbidden.begin(), forbidden.end(), mod_floor(b, modulus));
  }
};

namespace detail {

inline Exclusion make_exclusion(const mpz_class& m, const std::set<mpz_class>& classes,
                                Exclusion::Reason reason) {
  if (classes.size() >= m) {
    throw FeasibilityViolation("exclusions cover every class mod " + m.get_str());
  }
  return Exclusion{m, std::vector<mpz_class>(classes.begin(), classes.end()), reason};
}

// b with F_i(b) = 0 mod m, for the forms of the shape; nullopt when the
// slope is not invertible.
inline std::optional<mpz_class> vanishing_class(const LinearForm& form, const mpz_class& m) {
  const auto inv = invert(form.slope, m);
  if (!inv) return std::nullopt;
  return mod_floor(-form.offset * *inv, m);
}

}  // namespace detail

/// For every prime P > n (P != ell) dividing some D_ij = "F_i - F_j" per
/// ell^n, forbids the class where both factors vanish mod P. Cofactors left
/// composite by the budget are used as moduli as they are.
inline std::vector<Exclusion> derive_pairwise_coprime_constraints(const Shape& shape, const mpz_class& ell,
                                                                  const FactorBudget& budget = {}) {
  const int n = shape.degree();
  const auto forms = discriminant_forms(shape, ell);
  // D_1j = T1 - n^n B_j and D_ij = B_i - B_j
  std::map<mpz_class, std::set<mpz_class>> classes;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    for (std::size_t j = i + 1; j < forms.size(); ++j) {
      const mpz_class d = i == 0 ? mpz_class(shape.t1() - shape.n_pow_n() * shape.critical_values()[j - 1])
                                 : mpz_class(shape.critical_values()[i - 1] - shape.critical_values()[j - 1]);
      if (d == 0) throw RepeatedCriticalValue();
      const Factorization f = factorize(d, budget);
      std::vector<mpz_class> moduli;
      for (const auto& pp : f.factors) moduli.push_back(pp.prime);
      for (const auto& c : f.unfactored) moduli.push_back(c);
      for (const auto& m : moduli) {
        if (m <= n || m == ell) continue;
        if (auto r = detail::vanishing_class(forms[j], m)) classes[m].insert(*r);
      }
    }
  }
  std::vector<Exclusion> out;
  for (const auto& [m, set] : classes) out.push_back(detail::make_exclusion(m, set, Exclusion::Reason::Pairwise));
  if (ell > 1) out.push_back(Exclusion{ell, {0}, Exclusion::Reason::Ell});
  return out;
}

/// Forbids every class mod s where some factor vanishes, so s does not divide
/// the discriminant. Primes s <= n never divide it and need nothing.
inline std::vector<Exclusion> derive_avoidance_constraints(const Shape& shape, const mpz_class& ell,
                                                           const std::vector<std::uint64_t>& avoid) {
  const int n = shape.degree();
  std::vector<Exclusion> out;
  for (std::uint64_t s : avoid) {
    const mpz_class sz = from_u64(s);
    if (!is_probable_prime(sz)) throw InvalidArgument("avoid entry " + sz.get_str() + " is not prime");
    if (sz == ell) throw AvoidEqualsEll();
    if (s <= static_cast<std::uint64_t>(n)) continue;
    std::set<mpz_class> set;
    for (const auto& form : discriminant_forms(shape, ell)) {
      if (auto r = detail::vanishing_class(form, sz)) set.insert(*r);
    }
    out.push_back(detail::make_exclusion(sz, set, Exclusion::Reason::Avoid));
  }
  return out;
}

/// Inclusive integer interval.
struct IntWindow {
  mpz_class lo;
  mpz_class hi;

  bool empty() const { return lo > hi; }
  bool contains(const mpz_class& b) const { return lo <= b && b <= hi; }
  mpz_class width() const { return empty() ? mpz_class(0) : hi - lo + 1; }
};

/// Admissible b: b = base.residue mod base.modulus, inside the window, and
/// outside every exclusion. Iteration is ascending.
struct BProgram {
  Congruence base;
  std::vector<Exclusion> exclusions;
  IntWindow window;

  bool excluded(const mpz_class& b) const {
    return std::any_of(exclusions.begin(), exclusions.end(), [&](const Exclusion& e) { return e.excludes(b); });
  }

  bool is_admissible(const mpz_class& b) const {
    return window.contains(b) && mod_floor(b - base.residue, base.modulus) == 0 && !excluded(b);
  }

  /// Smallest member of the base progression that is >= from.
  mpz_class progression_start(const mpz_class& from) const {
    return from + mod_floor(base.residue - from, base.modulus);
  }

  /// Smallest admissible b >= from, examining at most `limit` progression terms.
  std::optional<mpz_class> next_admissible(const mpz_class& from, std::uint64_t limit = UINT64_MAX) const {
    mpz_class b = progression_start(from < window.lo ? window.lo : from);
    for (std::uint64_t steps = 0; b <= window.hi && steps < limit; ++steps, b += base.modulus) {
      if (!excluded(b)) return b;
    }
    return std::nullopt;
  }

  std::optional<mpz_class> first_admissible(std::uint64_t limit = UINT64_MAX) const {
    return next_admissible(window.lo, limit);
  }

  /// Number of base-progression terms in the window (before exclusions).
  mpz_class progression_size() const {
    if (window.empty()) return 0;
    const mpz_class first = progression_start(window.lo);
    if (first > window.hi) return 0;
    return (window.hi - first) / base.modulus + 1;
  }
};

struct ProgramOptions {
  mpz_class unit_class = 1;  // b = unit_class mod n!
  FactorBudget pairwise_budget{100000, 20000, 40};
  std::uint64_t emptiness_probe = 1000000;  // progression terms examined for EmptyProgram
};

/// Fixed classes: b = unit_class mod n! and b = R(0) mod each witness prime.
/// Exclusions whose modulus shares a factor with the base modulus are
/// resolved against the fixed class and dropped.
inline BProgram assemble_b_program(int n, const WitnessPrimes& wp, const Shape& shape, const mpz_class& ell,
                                   const IntWindow& window, const std::vector<std::uint64_t>& avoid,
                                   const ProgramOptions& options = {}) {
  if (window.empty()) throw EmptyProgram("empty window");
  const mpz_class fact = factorial(n);
  if (gcd(options.unit_class, fact) != 1) throw InvalidArgument("unit class must be coprime to n!");
  BProgram program;
  program.base = {mod_floor(options.unit_class, fact), fact};
  for (const auto& w : wp.primes) {
    program.base = detail::combine_or_throw(program.base, {from_u64(w.r0), from_u64(w.prime)}, "b");
  }
  program.window = window;

  auto exclusions = derive_pairwise_coprime_constraints(shape, ell, options.pairwise_budget);
  for (auto& e : derive_avoidance_constraints(shape, ell, avoid)) exclusions.push_back(std::move(e));
  for (auto& e : exclusions) {
    const mpz_class g = gcd(e.modulus, program.base.modulus);
    if (g == 1) {
      program.exclusions.push_back(std::move(e));
      continue;
    }
    if (g == e.modulus) {
      // the fixed class decides it
      if (e.excludes(program.base.residue)) throw EmptyProgram("fixed class is excluded mod " + g.get_str());
      continue;
    }
    // partial overlap (composite modulus): keep the part coprime to the base
    mpz_class rest = e.modulus;
    for (mpz_class h = g; h != 1; h = gcd(rest, h)) rest /= h;
    std::set<mpz_class> reduced;
    for (const auto& r : e.forbidden) reduced.insert(mod_floor(r, rest));
    if (reduced.size() < rest) {
      program.exclusions.push_back(detail::make_exclusion(rest, reduced, e.reason));
    }
  }
  if (!program.first_admissible(options.emptiness_probe)) {
    throw EmptyProgram("no admissible b in [" + window.lo.get_str() + ", " + window.hi.get_str() + "]");
  }
  return program;
}

}  // namespace anforge

#endif  // ANFORGE_CONGRUENCE_HPP_
