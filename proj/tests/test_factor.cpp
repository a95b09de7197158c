#include <gtest/gtest.h>

#include <random>

#include "anforge/factor.hpp"

namespace anforge {
namespace {

mpz_class product_of(const Factorization& f) {
  mpz_class v = f.unit;
  for (const auto& pp : f.factors) v *= ipow(pp.prime, pp.exponent);
  for (const auto& c : f.unfactored) v *= c;
  return v;
}

TEST(Primality, SmallCases) {
  EXPECT_TRUE(is_probable_prime(2));
  EXPECT_TRUE(is_probable_prime(131));
  EXPECT_FALSE(is_probable_prime(561));  // Carmichael
  EXPECT_FALSE(is_probable_prime(1));
  EXPECT_FALSE(is_probable_prime(0));
  // strong pseudoprime to bases 2..37 (Jaeschke): caught by base 41
  EXPECT_FALSE(is_probable_prime(mpz_class("3825123056546413051")));
}

TEST(Primality, AgreesWithTrialDivisionBelowTenThousand) {
  const auto primes = primes_up_to(10000);
  std::size_t next = 0;
  for (unsigned long m = 2; m <= 10000; ++m) {
    const bool expect = next < primes.size() && primes[next] == m;
    if (expect) ++next;
    EXPECT_EQ(is_probable_prime(mpz_class(m)), expect) << m;
  }
}

TEST(Primality, LargeKnownValues) {
  // 2^89 - 1 and 2^127 - 1 are Mersenne primes; 2^128 + 1 is composite.
  EXPECT_TRUE(is_probable_prime(ipow(2, 89) - 1));
  EXPECT_TRUE(is_probable_prime(ipow(2, 127) - 1));
  EXPECT_FALSE(is_probable_prime(ipow(2, 128) + 1));
  EXPECT_EQ(primality_tag_for(ipow(2, 127) - 1, 40).kind, PrimalityTag::Kind::Probabilistic);
  EXPECT_EQ(primality_tag_for(mpz_class(131), 40).kind, PrimalityTag::Kind::DeterministicSmall);
}

TEST(Factorize, Examples) {
  const auto a = factorize(9301);
  ASSERT_EQ(a.factors.size(), 2U);
  EXPECT_EQ(a.factors[0].prime, 71);
  EXPECT_EQ(a.factors[1].prime, 131);
  EXPECT_EQ(a.factors[0].exponent, 1U);

  const auto b = factorize(2048);
  ASSERT_EQ(b.factors.size(), 1U);
  EXPECT_EQ(b.factors[0].prime, 2);
  EXPECT_EQ(b.factors[0].exponent, 11U);

  const auto c = factorize(-72);
  EXPECT_EQ(c.unit, -1);
  ASSERT_EQ(c.factors.size(), 2U);
  EXPECT_EQ(c.factors[0].exponent, 3U);
  EXPECT_EQ(c.factors[1].exponent, 2U);
  EXPECT_THROW(factorize(0), InvalidArgument);
}

TEST(Factorize, RhoSplitsSemiprimesBeyondTrialRange) {
  // 1000003 * 1000033 and a square of a large prime
  const mpz_class p("1000003"), q("1000033"), r("2305843009213693951");
  const auto f = factorize(p * q * 7);
  EXPECT_TRUE(f.complete());
  EXPECT_EQ(product_of(f), p * q * 7);
  ASSERT_EQ(f.factors.size(), 3U);
  EXPECT_EQ(f.factors[2].prime, q);

  const auto g = factorize(r * r * p);
  EXPECT_TRUE(g.complete());
  ASSERT_EQ(g.factors.size(), 2U);
  EXPECT_EQ(g.factors[1].prime, r);
  EXPECT_EQ(g.factors[1].exponent, 2U);
}

TEST(Factorize, ReportsUnfactoredCofactorWhenBudgetIsZero) {
  const mpz_class p("1000003"), q("1000033");
  FactorBudget tight;
  tight.rho_iterations = 0;
  const auto f = factorize(p * q * 4, tight);
  EXPECT_FALSE(f.complete());
  ASSERT_EQ(f.unfactored.size(), 1U);
  EXPECT_EQ(f.unfactored[0], p * q);
  EXPECT_EQ(product_of(f), p * q * 4);
}

TEST(Factorize, RandomProductsRemultiply) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    mpz_class m = 1;
    const int parts = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < parts; ++k) m *= mpz_class(static_cast<unsigned long>(rng() % 2000000000ULL + 2));
    if (rng() % 2) m = -m;
    const auto f = factorize(m);
    EXPECT_TRUE(f.complete());
    EXPECT_EQ(product_of(f), m);
    for (const auto& pp : f.factors) EXPECT_TRUE(is_probable_prime(pp.prime));
  }
}

TEST(SquarefreeProof, Examples) {
  const std::vector<mpz_class> good{131, -71};
  const auto v = squarefree_proof(good);
  ASSERT_TRUE(v.proven());
  ASSERT_EQ(v.proof.factors.size(), 2U);
  EXPECT_EQ(v.proof.factors[0].primes.at(0).prime, 131);
  EXPECT_EQ(v.proof.factors[1].primes.at(0).prime, 71);

  const std::vector<mpz_class> bad{12};
  const auto w = squarefree_proof(bad);
  EXPECT_EQ(w.kind, SquarefreeVerdict::Kind::NotSquarefree);
  EXPECT_EQ(w.prime, 2);

  const std::vector<mpz_class> unit{1};
  const auto u = squarefree_proof(unit);
  ASSERT_TRUE(u.proven());
  EXPECT_TRUE(u.proof.factors[0].primes.empty());
}

TEST(SquarefreeProof, SharedPrimeAcrossFactorsIsASquare) {
  const std::vector<mpz_class> values{15, 77, 13 * 5};
  const auto v = squarefree_proof(values);
  EXPECT_EQ(v.kind, SquarefreeVerdict::Kind::NotSquarefree);
  EXPECT_EQ(v.prime, 5);
  ASSERT_TRUE(v.shared_with.has_value());
  EXPECT_EQ(*v.shared_with, 0U);
  EXPECT_EQ(v.factor, 2U);
}

TEST(SquarefreeProof, LargeSquareCofactor) {
  const mpz_class r("2305843009213693951");
  const std::vector<mpz_class> values{r * r * 3};
  const auto v = squarefree_proof(values);
  EXPECT_EQ(v.kind, SquarefreeVerdict::Kind::NotSquarefree);
  EXPECT_EQ(v.prime, r);
}

TEST(SquarefreeProof, UnknownWhenBudgetExhausted) {
  const mpz_class p("1000000007"), q("998244353");
  FactorBudget tight;
  tight.rho_iterations = 10;
  const std::vector<mpz_class> values{p * q};
  EXPECT_EQ(squarefree_proof(values, tight).kind, SquarefreeVerdict::Kind::Unknown);
  const auto full = squarefree_proof(values);
  ASSERT_TRUE(full.proven());
  EXPECT_EQ(full.proof.factors[0].primes.size(), 2U);
}

TEST(SquarefreeProof, ProofsRemultiply) {
  std::mt19937_64 rng(8);
  int proven = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<mpz_class> values;
    for (int k = 0; k < 3; ++k) {
      mpz_class v = mpz_class(static_cast<unsigned long>(rng() % 1000000000000ULL + 1));
      values.push_back(rng() % 2 ? v : -v);
    }
    const auto verdict = squarefree_proof(values);
    ASSERT_NE(verdict.kind, SquarefreeVerdict::Kind::Unknown);
    if (!verdict.proven()) continue;
    ++proven;
    for (std::size_t i = 0; i < values.size(); ++i) {
      mpz_class product = 1;
      const auto& fp = verdict.proof.factors[i];
      for (std::size_t k = 0; k < fp.primes.size(); ++k) {
        if (k > 0) {
          EXPECT_LT(fp.primes[k - 1].prime, fp.primes[k].prime);
        }
        EXPECT_TRUE(is_probable_prime(fp.primes[k].prime));
        product *= fp.primes[k].prime;
      }
      EXPECT_EQ(product, abs(values[i]));
    }
  }
  EXPECT_GT(proven, 10);
}

}  // namespace
}  // namespace anforge
