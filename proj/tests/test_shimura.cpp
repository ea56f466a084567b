#include <gtest/gtest.h>

#include <memory>
#include <numeric>
#include <random>
#include <sstream>

#include "shimsign/shimura.hpp"

using namespace shimsign;

namespace {

std::shared_ptr<const Eigenform> shared_form(int weight, std::size_t N) {
    return std::make_shared<const Eigenform>(level1_eigenform(weight, N));
}

// a(t n^2) rebuilt from the factorisation of n, one prime power at a time:
// a(t p^(2e)) = A(p^e) - eps(p) p^(k-1) A(p^(e-1)). Independent of the
// Moebius convolution used by lift_invert.
BigInt a_tn2_oracle(const LiftParams& params, std::uint64_t n) {
    BigInt result = 1;
    std::uint64_t m = n;
    for (std::uint64_t p = 2; m > 1; ++p) {
        if (m % p != 0) continue;
        std::uint64_t pe = 1;
        while (m % p == 0) {
            m /= p;
            pe *= p;
        }
        const int eps = kronecker(params.character_argument(), static_cast<std::int64_t>(p));
        const BigInt pk = ipow(p, static_cast<unsigned long>(params.k() - 1));
        result *= params.eigenform().A(pe) - eps * pk * params.eigenform().A(pe / p);
    }
    return result;
}

}  // namespace

TEST(LiftParams, Validation) {
    auto f = shared_form(12, 10);
    EXPECT_NO_THROW(LiftParams(1, 6, f));
    EXPECT_NO_THROW(LiftParams(30, f));
    EXPECT_THROW(LiftParams(4, 6, f), std::invalid_argument);
    EXPECT_THROW(LiftParams(0, 6, f), std::invalid_argument);
    EXPECT_THROW(LiftParams(12, 6, f), std::invalid_argument);
    EXPECT_THROW(LiftParams(1, 7, f), std::invalid_argument);
    EXPECT_THROW(LiftParams(1, 6, nullptr), std::invalid_argument);
}

TEST(Epsilon, NamedValues) {
    auto f = shared_form(12, 10);
    const LiftParams trivial(1, f);
    for (std::uint64_t d = 1; d < 500; ++d) ASSERT_EQ(epsilon(trivial, d), 1);
    const LiftParams three(3, f);
    EXPECT_EQ(epsilon(three, 5), -1);
    EXPECT_EQ(epsilon(three, 3), 0);
    // k = 9 is odd: eps(d) = (-t | d)
    const LiftParams odd(1, shared_form(18, 10));
    EXPECT_EQ(epsilon(odd, 3), -1);
    EXPECT_EQ(epsilon(odd, 5), 1);
    EXPECT_THROW(epsilon(trivial, 0), std::invalid_argument);
}

TEST(Epsilon, CompletelyMultiplicative) {
    auto f = shared_form(12, 10);
    std::mt19937_64 rng(8);
    for (std::uint64_t t : {1u, 2u, 3u, 5u, 6u, 7u, 10u, 11u, 30u}) {
        const LiftParams p(t, f);
        for (int i = 0; i < 1000; ++i) {
            const std::uint64_t d = 1 + rng() % 20000;
            const std::uint64_t e = 1 + rng() % 20000;
            ASSERT_EQ(epsilon(p, d) * epsilon(p, e), epsilon(p, d * e)) << t << " " << d << " " << e;
        }
    }
}

TEST(LiftInvert, DeltaNamedValues) {
    const LiftParams p(1, shared_form(12, 30));
    const LiftedStream s = lift_invert(p, 30);
    EXPECT_EQ(s.value(1), 1);
    EXPECT_EQ(s.value(2), -56);
    EXPECT_EQ(s.value(3), 9);
    EXPECT_EQ(s.value(5), 1705);
    EXPECT_THROW(s.value(0), std::out_of_range);
    EXPECT_THROW(s.value(31), std::out_of_range);
}

TEST(LiftInvert, MatchesPrimePowerOracle) {
    for (int w : {12, 16, 18, 22, 26}) {
        for (std::uint64_t t : {1u, 2u, 5u, 7u, 15u}) {
            const LiftParams p(t, shared_form(w, 400));
            const LiftedStream s = lift_invert(p, 400);
            for (std::uint64_t n = 1; n <= 400; ++n) {
                ASSERT_EQ(s.value(n), a_tn2_oracle(p, n)) << "w=" << w << " t=" << t << " n=" << n;
            }
        }
    }
}

TEST(LiftInvert, RejectsInsufficientPrecision) {
    const LiftParams p(1, shared_form(12, 20));
    EXPECT_THROW(lift_invert(p, 21), std::invalid_argument);
    EXPECT_THROW(lift_invert(p, 0), std::invalid_argument);
}

TEST(VerifyRelations, FreshStreamsPass) {
    for (int w : {12, 16, 18, 20, 22, 26}) {
        for (std::uint64_t t : {1u, 3u, 6u, 13u}) {
            const LiftParams p(t, shared_form(w, 2000));
            const auto rep = verify_relations(lift_invert(p, 2000), 2000);
            EXPECT_TRUE(rep.passed) << w << " " << t << ": " << rep.message;
            EXPECT_EQ(rep.primes_checked, 303u);
            EXPECT_EQ(rep.pairs_checked, 2000u);
        }
    }
}

TEST(VerifyRelations, CorruptedPrimeValueReportsThatPrime) {
    const LiftParams p(1, shared_form(12, 100));
    const LiftedStream s = lift_invert(p, 100);
    const auto rep = verify_relations(s.with_value(2, s.value(2) + 1), 100);
    EXPECT_FALSE(rep.passed);
    EXPECT_EQ(rep.relation, "prime");
    ASSERT_TRUE(rep.prime.has_value());
    EXPECT_EQ(*rep.prime, 2u);
}

TEST(VerifyRelations, CorruptedPrimePowerReportsItsPrime) {
    const LiftParams p(1, shared_form(12, 100));
    const LiftedStream s = lift_invert(p, 100);
    const auto rep = verify_relations(s.with_value(4, s.value(4) - 7), 100);
    EXPECT_FALSE(rep.passed);
    EXPECT_EQ(rep.relation, "prime-power");
    ASSERT_TRUE(rep.prime.has_value());
    EXPECT_EQ(*rep.prime, 2u);
    EXPECT_EQ(*rep.n, 4u);
}

TEST(VerifyRelations, CorruptedCompositeCaughtByMultiplicativity) {
    const LiftParams p(1, shared_form(12, 60));
    const LiftedStream s = lift_invert(p, 60);
    const auto rep = verify_relations(s.with_value(6, s.value(6) + 1), 5000);
    EXPECT_FALSE(rep.passed);
    EXPECT_EQ(rep.relation, "multiplicativity");
    EXPECT_EQ(*rep.n * *rep.m, 6u);
}

TEST(VerifyRelations, NormalisationFailure) {
    const LiftParams p(1, shared_form(12, 20));
    const LiftedStream s = lift_invert(p, 20);
    const auto rep = verify_relations(s.with_value(1, 2), 10);
    EXPECT_FALSE(rep.passed);
    EXPECT_EQ(rep.relation, "normalisation");
}

TEST(VerifyRelations, DeltaPairsAgainstOracle) {
    const LiftParams p(1, shared_form(12, 300));
    const LiftedStream s = lift_invert(p, 300);
    EXPECT_TRUE(verify_relations(s, 10000).passed);
    std::mt19937_64 rng(99);
    int checked = 0;
    while (checked < 10000) {
        const std::uint64_t n = 1 + rng() % 300;
        const std::uint64_t m = 1 + rng() % 300;
        if (n * m > 300 || std::gcd(n, m) != 1) continue;
        ++checked;
        ASSERT_EQ(s.value(n * m), a_tn2_oracle(p, n) * a_tn2_oracle(p, m));
    }
}

TEST(LiftedStream, SignsMultiplyOnCoprimePairs) {
    const LiftParams p(5, shared_form(16, 3000));
    const LiftedStream s = lift_invert(p, 3000);
    for (std::uint64_t n = 1; n <= 54; ++n) {
        for (std::uint64_t m = 1; n * m <= 3000; ++m) {
            if (std::gcd(n, m) != 1) continue;
            ASSERT_EQ(sgn(s.value(n * m)), sgn(s.value(n)) * sgn(s.value(m)));
        }
    }
}

TEST(StreamCsv, Format) {
    const LiftParams p(1, shared_form(12, 5));
    std::ostringstream out;
    write_stream_csv(out, lift_invert(p, 5));
    EXPECT_EQ(out.str(),
              "# t=1 k=6 weight2k=12 N=5\n"
              "n,a_tn2,sign\n"
              "1,1,1\n"
              "2,-56,-1\n"
              "3,9,1\n"
              "4,-704,-1\n"
              "5,1705,1\n");
}
