#include <gtest/gtest.h>

#include "anforge/pipeline.hpp"

namespace anforge {
namespace {

ForgeOptions options(int n, int r, std::size_t count, std::uint64_t seed = 1) {
  ForgeOptions o;
  o.n = n;
  o.r = r;
  o.count = count;
  o.seed = seed;
  return o;
}

TEST(Reference, SmallestWitnessProductAmongCandidates) {
  const auto choice = choose_reference(5, 4);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto ref = find_reference_poly(5, seed);
    EXPECT_LE(choice.witnesses.product(), find_witness_primes(ref, 1000000).product());
  }
  ASSERT_EQ(choice.witnesses.primes.size(), 3U);
  for (const auto& w : choice.witnesses.primes) {
    EXPECT_GT(w.prime, 5U);
    EXPECT_EQ(frobenius_cycle_type(choice.ref.poly, w.prime), cycle_type_of(w.pattern, 5));
  }
}

TEST(Reference, EllSkipsWitnessAndAvoidedPrimes) {
  const WitnessPrimes wp{{WitnessPrime{7, CyclePattern::Full, {}, 0}, WitnessPrime{13, CyclePattern::Transposition, {}, 0}}};
  EXPECT_EQ(choose_ell(5, wp, {}), 11);
  EXPECT_EQ(choose_ell(5, wp, {11}), 17);
  EXPECT_EQ(choose_ell(3, {}, {}), 5);
}

TEST(Forge, DeterministicAndVerified) {
  const auto first = forge(options(5, 0, 2, 9));
  const auto second = forge(options(5, 0, 2, 9));
  ASSERT_EQ(first.size(), 2U);
  ASSERT_EQ(second.size(), 2U);
  for (std::size_t k = 0; k < first.size(); ++k) {
    EXPECT_EQ(to_text(first[k]), to_text(second[k]));
    EXPECT_TRUE(verify(first[k]).accepted());
    EXPECT_EQ(real_root_count(first[k].pb), 5);
  }
  EXPECT_NE(first[0].discriminant, first[1].discriminant);
}

TEST(Forge, CongruencesAndCoprimality) {
  for (int r = 0; r <= 2; ++r) {
    for (const auto& c : forge(options(5, r, 2, 40 + r))) {
      for (const auto& w : c.reference_witnesses) {
        EXPECT_EQ(reduce_mod(c.pb, w.prime), reduce_mod(c.reference, w.prime));
      }
      for (std::size_t i = 0; i < c.factors.size(); ++i) {
        for (std::size_t j = i + 1; j < c.factors.size(); ++j) EXPECT_EQ(gcd(c.factors[i], c.factors[j]), 1);
      }
      EXPECT_EQ(gcd(c.discriminant, lcm_upto(5)), 1);
      EXPECT_EQ(c.complex_pairs, r);
    }
  }
}

TEST(Forge, AvoidedPrimesStayOut) {
  ForgeOptions o = options(5, 1, 1);
  o.avoid = {7, 11};
  const auto certs = forge(o);
  ASSERT_EQ(certs.size(), 1U);
  EXPECT_EQ(gcd(certs[0].discriminant, 77), 1);
  EXPECT_NE(certs[0].ell, 7);
  EXPECT_NE(certs[0].ell, 11);
}

TEST(Forge, Preconditions) {
  EXPECT_THROW(forge(options(5, 3, 1)), InvalidArgument);
  EXPECT_THROW(forge(options(4, 0, 1)), InvalidArgument);
  ForgeOptions bad_avoid = options(5, 0, 1);
  bad_avoid.avoid = {9};
  EXPECT_THROW(forge(bad_avoid), InvalidArgument);
}

TEST(Forge, SmallDegreesWithFlag) {
  for (int n : {3, 4}) {
    ForgeOptions o = options(n, 0, 1);
    o.allow_small_n = true;
    const auto certs = forge(o);
    ASSERT_EQ(certs.size(), 1U);
    EXPECT_TRUE(verify(certs[0]).accepted());
  }
}

TEST(Forge, BudgetExhaustionNamesTheStage) {
  ForgeOptions o = options(5, 0, 50);
  o.shape_attempts = 1;
  o.candidates_per_shape = 1;
  try {
    forge(o);
    FAIL() << "expected BudgetExhausted";
  } catch (const BudgetExhausted& e) {
    EXPECT_EQ(e.stage(), "scan");
  }
  ForgeOptions timed = options(5, 0, 50);
  timed.time_limit = std::chrono::seconds(0);
  const auto report = run_forge(timed);
  EXPECT_EQ(report.exhausted, std::optional<std::string>("time"));
}

TEST(Forge, AvoidedPrimeInsideAFactorIsRejectedBeforeEmission) {
  const Certificate c = forge(options(5, 0, 1, 5))[0];
  const Shape shape = build_shape(5, c.u, c.a);
  const ScanHit hit{c.b, c.squarefree};
  const auto choice = choose_reference(5);
  std::uint64_t inside = 0;
  for (const auto& fp : c.squarefree.factors) {
    for (const auto& pp : fp.primes) {
      if (pp.prime > 5 && pp.prime < 1000000 && inside == 0) inside = pp.prime.get_ui();
    }
  }
  ASSERT_NE(inside, 0U);
  EXPECT_NO_THROW(make_certificate(0, choice, shape, c.ell, hit, {}, 5));
  try {
    make_certificate(0, choice, shape, c.ell, hit, {inside}, 5);
    FAIL() << "expected AvoidanceViolated";
  } catch (const AvoidanceViolated& e) {
    EXPECT_EQ(e.prime(), inside);
  }
}

TEST(CountFields, DistinctAndBounded) {
  const auto fc = count_fields(options(5, 0, 0, 11), 4);
  ASSERT_EQ(fc.count(), 4U);
  std::set<mpz_class> distinct(fc.discriminants.begin(), fc.discriminants.end());
  EXPECT_EQ(distinct.size(), 4U);
  EXPECT_FALSE(fc.exhausted.has_value());

  ForgeOptions small = options(5, 0, 0, 11);
  small.shape_attempts = 2;
  const auto none = count_fields(small, 4, mpz_class(1000000000000));
  EXPECT_EQ(none.count(), 0U);
  EXPECT_GT(none.over_bound, 0U);
  EXPECT_TRUE(none.exhausted.has_value());
}

TEST(Stats, WorkedAndEmptyWindows) {
  const Shape s = build_shape(3, 2, {mpz_class(6)});
  const auto rep = stats_report(s, 1, {-3, 71});
  EXPECT_EQ(rep.stats.n0, 12U);
  EXPECT_EQ(rep.stats.n1, 12U);
  EXPECT_GT(rep.local_density, 0);
  const auto empty = stats_report(s, 1, {10, 9});
  EXPECT_EQ(empty.stats.n0, 0U);
  EXPECT_TRUE(empty.stats.inequality_holds());
}

}  // namespace
}  // namespace anforge
