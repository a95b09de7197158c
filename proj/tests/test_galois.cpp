#include <gtest/gtest.h>

#include <random>

#include "anforge/galois.hpp"
#include "oracles.hpp"

namespace anforge {
namespace {

const IntPoly kQuintic{-1, -1, 0, 0, 0, 1};  // x^5 - x - 1

// Cycle type of a degree-5 squarefree polynomial from (factor count, root count).
std::vector<int> quintic_type_oracle(const IntPoly& f, std::uint64_t p) {
  const int k = oracle::berlekamp_factor_count(f, p);
  const auto linear = static_cast<int>(oracle::brute_root_count(f, p));
  std::vector<int> t(static_cast<std::size_t>(linear), 1);
  // remaining degree 5 - linear split into k - linear factors of degree >= 2
  const int rest = 5 - linear, parts = k - linear;
  if (parts == 1) t.insert(t.begin(), rest);
  if (parts == 2) {  // 2+2 or 3+2
    t.insert(t.begin(), 2);
    t.insert(t.begin(), rest - 2);
  }
  return t;
}

TEST(FrobeniusCycleType, AgreesWithBerlekampOracle) {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const IntPoly f = oracle::random_monic(rng, 5, 30);
    for (std::uint64_t p : primes_up_to(400)) {
      if (p < 7) continue;
      const auto type = frobenius_cycle_type(f, p);
      if (!type) {
        EXPECT_EQ(mod_u64(discriminant(f), p), 0U);
        continue;
      }
      EXPECT_EQ(*type, quintic_type_oracle(f, p)) << f.to_string() << " mod " << p;
      ++checked;
    }
  }
  EXPECT_GT(checked, 3000);
}

TEST(CertifySn, AcceptsThreePatterns) {
  const auto cert = certify_sn(kQuintic, {{109, {5}}, {101, {4, 1}}, {761, {2, 1, 1, 1}}});
  EXPECT_EQ(cert.conclusion, "S_n");
  EXPECT_EQ(cert.poly, kQuintic);
}

TEST(CertifySn, Rejections) {
  EXPECT_THROW(certify_sn(kQuintic, {{109, {5}}, {109, {5}}}), InsufficientWitnesses);
  EXPECT_THROW(certify_sn(kQuintic, {{109, {5}}, {101, {4, 1}}}), InsufficientWitnesses);
  // 19 divides disc = 2869 = 19 * 151
  try {
    certify_sn(kQuintic, {{19, {5}}, {101, {4, 1}}, {761, {2, 1, 1, 1}}});
    FAIL() << "expected BadWitness";
  } catch (const BadWitness& e) {
    EXPECT_EQ(e.p(), 19U);
  }
  // claimed type differs from the recomputed one
  EXPECT_THROW(certify_sn(kQuintic, {{101, {5}}, {109, {4, 1}}, {761, {2, 1, 1, 1}}}), BadWitness);
  EXPECT_THROW(certify_sn(kQuintic, {{100, {5}}}), BadWitness);
}

TEST(FindWitnessPrimes, QuinticRegression) {
  EXPECT_EQ(discriminant(kQuintic), 2869);
  const ReferencePoly ref{kQuintic, derivative(kQuintic), {}};
  const auto wp = find_witness_primes(ref, 1000000);
  ASSERT_EQ(wp.primes.size(), 3U);
  EXPECT_EQ(wp.primes[0].prime, 109U);
  EXPECT_EQ(wp.primes[0].roots, (std::vector<std::uint64_t>{35, 44, 65, 74}));
  EXPECT_EQ(wp.primes[0].r0, 108U);
  EXPECT_EQ(wp.primes[1].prime, 761U);
  EXPECT_EQ(wp.primes[1].pattern, CyclePattern::Transposition);
  EXPECT_EQ(wp.primes[2].prime, 101U);
  EXPECT_EQ(wp.primes[2].roots, (std::vector<std::uint64_t>{3, 30, 71, 98}));
  EXPECT_EQ(wp.product(), 109 * 761 * 101);
  EXPECT_THROW(find_witness_primes(ref, 2), NotFoundWithinBound);
}

TEST(FindWitnessPrimes, MatchesExhaustiveScan) {
  // first primes with the three patterns and R' split, by the oracle alone
  const IntPoly rp = derivative(kQuintic);
  std::uint64_t first[3] = {0, 0, 0};
  const std::vector<int> want[3] = {{5}, {2, 1, 1, 1}, {4, 1}};
  for (std::uint64_t p : primes_up_to(2000)) {
    if (p <= 5 || 2869 % p == 0) continue;
    if (oracle::brute_root_count(rp, p) != 4) continue;
    const auto type = quintic_type_oracle(kQuintic, p);
    for (int k = 0; k < 3; ++k) {
      if (first[k] == 0 && type == want[k]) first[k] = p;
    }
  }
  const ReferencePoly ref{kQuintic, rp, {}};
  const auto wp = find_witness_primes(ref, 2000);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(wp.primes[static_cast<std::size_t>(k)].prime, first[k]);
    EXPECT_EQ(wp.primes[static_cast<std::size_t>(k)].roots,
              oracle::brute_roots_mod_p(rp, first[k]));
  }
}

TEST(FindReferencePoly, BudgetAndDeterminism) {
  ReferenceSearch none;
  none.attempts = 0;
  EXPECT_THROW(find_reference_poly(3, 1, none), SearchExhausted);

  const auto a = find_reference_poly(5, 17);
  const auto b = find_reference_poly(5, 17);
  EXPECT_EQ(a.poly, b.poly);
  EXPECT_EQ(a.sn_witnesses, b.sn_witnesses);
  EXPECT_EQ(a.poly.degree(), 5);
  EXPECT_NE(discriminant(a.poly), 0);
  EXPECT_NO_THROW(certify_sn(a.poly, a.sn_witnesses));
  for (std::size_t k = 0; k < 5; ++k) EXPECT_LE(abs(a.poly.coeff(k)), 25);

  const auto wp = find_witness_primes(a, 1000000);
  for (const auto& w : wp.primes) {
    EXPECT_GT(w.prime, 5U);
    EXPECT_EQ(w.roots, oracle::brute_roots_mod_p(a.derivative, w.prime));
    EXPECT_EQ(frobenius_cycle_type(a.poly, w.prime), cycle_type_of(w.pattern, 5));
  }
}

TEST(FindReferencePoly, SmallDegrees) {
  for (int n : {3, 4, 6}) {
    const auto ref = find_reference_poly(n, 5);
    EXPECT_NO_THROW(certify_sn(ref.poly, ref.sn_witnesses));
    const auto wp = find_witness_primes(ref, 1000000);
    EXPECT_EQ(wp.primes.size(), 3U);
    EXPECT_NE(wp.primes[1].prime, wp.primes[2].prime);
  }
}

TEST(CertifySn, NoTranspositionForProbe) {
  // x^5 + 20x + 16: never shows a transposition, so S_n is never claimed.
  const IntPoly probe{16, 20, 0, 0, 0, 1};
  const auto transposition = cycle_type_of(CyclePattern::Transposition, 5);
  for (std::uint64_t p : primes_up_to(10000)) {
    const auto type = frobenius_cycle_type(probe, p);
    if (!type) continue;
    EXPECT_NE(*type, transposition) << p;
    if (p < 500) {
      EXPECT_EQ(*type, quintic_type_oracle(probe, p)) << p;
    }
  }
  EXPECT_FALSE(find_sn_witnesses(probe, 10000).has_value());
}

struct WorkedCase {
  Instance inst = instantiate(build_shape(3, 2, {mpz_class(6)}), std::nullopt, 1);
  SquarefreeProof sf = squarefree_proof(inst.factors()).proof;
  GaloisCertificate gc = certify_sn(inst.pb(), *find_sn_witnesses(inst.pb(), 1000));
};

TEST(CertifyUnramifiedAn, WorkedExample) {
  const WorkedCase c;
  const auto cert = certify_unramified_an(c.inst, c.sf, c.gc, {});
  EXPECT_EQ(cert.field_discriminant, 9301);
  EXPECT_TRUE(cert.real_quadratic);
  EXPECT_NO_THROW(certify_unramified_an(c.inst, c.sf, c.gc, {2, 3, 5, 7}));
}

TEST(CertifyUnramifiedAn, Rejections) {
  const WorkedCase c;
  try {
    certify_unramified_an(c.inst, c.sf, c.gc, {71});
    FAIL() << "expected AvoidanceViolated";
  } catch (const AvoidanceViolated& e) {
    EXPECT_EQ(e.prime(), 71U);
  }
  const Instance other = instantiate(build_shape(3, 2, {mpz_class(6)}), std::nullopt, 5);
  EXPECT_THROW(certify_unramified_an(other, c.sf, c.gc, {}), MismatchedComponents);
  const GaloisCertificate foreign = certify_sn(kQuintic, {{109, {5}}, {101, {4, 1}}, {761, {2, 1, 1, 1}}});
  EXPECT_THROW(certify_unramified_an(c.inst, c.sf, foreign, {}), MismatchedComponents);
}

}  // namespace
}  // namespace anforge
