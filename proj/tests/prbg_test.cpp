#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <set>

#include "feistel_lab/error.hpp"
#include "feistel_lab/prbg.hpp"

using namespace feistel_lab;

namespace {

// Naive g^e mod p by repeated multiplication.
std::uint64_t naive_pow(std::uint64_t g, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  for (std::uint64_t i = 0; i < e; ++i) r = r * g % p;
  return r;
}

// Discrete-log table of Z_p^* found by trying every exponent for every x.
std::map<std::uint64_t, std::uint64_t> brute_dlog(std::uint64_t g, std::uint64_t p) {
  std::map<std::uint64_t, std::uint64_t> table;
  for (std::uint64_t x = 1; x < p; ++x) {
    for (std::uint64_t e = 0; e + 1 < p; ++e) {
      if (naive_pow(g, e, p) == x) {
        table[x] = e;
        break;
      }
    }
  }
  return table;
}

}  // namespace

TEST(BlumMicali, FirstStepExample) {
  const BmParams params{23, 5, 3};
  const auto dlog = brute_dlog(5, 23);
  ASSERT_EQ(dlog.size(), 22u);
  BlumMicaliGenerator gen(params);
  const auto b = gen.next_bits(1);
  EXPECT_EQ(gen.state(), 10u);
  EXPECT_EQ(b.bit(0), dlog.at(10) <= 11);
}

TEST(BlumMicali, MatchesBruteForcePredicateOverFullPeriod) {
  const auto dlog = brute_dlog(5, 23);
  for (std::uint64_t x0 = 0; x0 < 23; ++x0) {
    // Oracle: iterate until a state repeats so the tail and one full cycle are covered.
    std::vector<bool> expected;
    std::set<std::uint64_t> seen;
    std::uint64_t x = x0;
    while (true) {
      x = naive_pow(5, x, 23);
      ASSERT_GE(x, 1u);
      expected.push_back(dlog.at(x) <= 11);
      if (!seen.insert(x).second) break;
    }
    const auto got = bm_generate(BmParams{23, 5, x0}, expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(got.bit(i), expected[i]) << "x0=" << x0 << " i=" << i;
  }
}

TEST(BlumMicali, EdgeCases) {
  const BmParams params{23, 5, 3};
  EXPECT_EQ(bm_generate(params, 0).width(), 0u);
  EXPECT_EQ(bm_generate(params, 200), bm_generate(params, 200));
  EXPECT_THROW(validate(BmParams{22, 5, 3}), UsageError);
  EXPECT_THROW(validate(BmParams{23, 2, 3}), UsageError);  // 2 has order 11
  EXPECT_THROW(validate(BmParams{23, 5, 23}), UsageError);
  BlumMicaliGenerator gen(params);
  EXPECT_THROW(gen.predicate(0), UsageError);
}

TEST(BlumMicali, ReseedReplays) {
  BlumMicaliGenerator a(BmParams{23, 5, 3});
  BlumMicaliGenerator b(BmParams{23, 5, 0});
  b.reseed(BitString::from_uint(26, 8));  // 26 mod 23 = 3
  EXPECT_EQ(a.next_bits(64), b.next_bits(64));
}

TEST(BlumBlumShub, HandExample) {
  const auto params = make_bbs_params(7, 11, 2);
  EXPECT_EQ(params.n, 77);
  EXPECT_EQ(params.x0, 4);
  BlumBlumShubGenerator gen(params);
  EXPECT_EQ(gen.next_bits(1), BitString::from_binary("0"));
  EXPECT_EQ(gen.state(), 16);
  EXPECT_EQ(gen.next_bits(1), BitString::from_binary("1"));
  EXPECT_EQ(gen.state(), 25);
  EXPECT_EQ(gen.next_bits(1), BitString::from_binary("1"));
  EXPECT_EQ(gen.state(), 9);
  EXPECT_EQ(bbs_generate(params, 3), BitString::from_binary("011"));
}

TEST(BlumBlumShub, ModularSquaringOracleThousandSteps) {
  const auto params = make_bbs_params(7, 11, 2);
  std::set<unsigned> residues;
  for (unsigned y = 0; y < 77; ++y) {
    if (std::gcd(y, 77u) == 1) residues.insert(y * y % 77);
  }
  BlumBlumShubGenerator gen(params);
  unsigned x = 4;
  for (int i = 0; i < 1000; ++i) {
    x = x * x % 77;
    const auto b = gen.next_bits(1);
    ASSERT_EQ(gen.state(), x);
    ASSERT_EQ(b.bit(0), (x & 1) != 0);
    ASSERT_TRUE(residues.count(x)) << x;
  }
  EXPECT_EQ(bbs_generate(params, 0).width(), 0u);
}

TEST(BlumBlumShub, ValidationErrors) {
  EXPECT_THROW(make_bbs_params(5, 11, 2), UsageError);   // 5 = 1 mod 4
  EXPECT_THROW(make_bbs_params(15, 11, 2), UsageError);  // not prime
  EXPECT_THROW(make_bbs_params(7, 11, 14), UsageError);  // gcd(14, 77) = 7
}

TEST(BlumBlumShub, GeneratedParams) {
  for (unsigned bits : {3u, 4u, 8u, 16u, 32u, 64u}) {
    for (std::uint64_t e = 0; e < 5; ++e) {
      const auto params = generate_bbs_params(bits, BitString::from_uint(e, 64));
      EXPECT_EQ(params.p % 4, 3);
      EXPECT_EQ(params.q % 4, 3);
      EXPECT_EQ(params.n, params.p * params.q);
      EXPECT_NE(params.p, params.q);
      EXPECT_NO_THROW(validate(params));
      EXPECT_EQ(params, generate_bbs_params(bits, BitString::from_uint(e, 64)));
    }
  }
}

TEST(BlumBlumShub, KeyValueRoundTrip) {
  const auto params = generate_bbs_params(48, BitString::from_uint(9, 64));
  EXPECT_EQ(bbs_params_from_key_value(to_key_value(params)), params);
  const BmParams bm{23, 5, 3};
  const auto back = bm_params_from_key_value(to_key_value(bm));
  EXPECT_EQ(back.p, bm.p);
  EXPECT_EQ(back.g, bm.g);
  EXPECT_EQ(back.x0, bm.x0);
  EXPECT_THROW(bbs_params_from_key_value("p=7\nq=11\n"), UsageError);
}

TEST(Primality, AgreesWithSieve) {
  std::vector<bool> composite(5000, false);
  for (std::size_t i = 2; i < composite.size(); ++i) {
    if (composite[i]) continue;
    for (std::size_t j = i * i; j < composite.size(); j += i) composite[j] = true;
  }
  for (std::size_t i = 2; i < composite.size(); ++i) EXPECT_EQ(is_probable_prime(i), !composite[i]) << i;
  EXPECT_TRUE(is_probable_prime(BigInt("170141183460469231731687303715884105727")));  // 2^127 - 1
}

TEST(TestGenerator, Determinism) {
  const auto seed = derive_seed(42);
  EXPECT_EQ(test_generator(seed)->next_bits(1000000), test_generator(seed)->next_bits(1000000));
}

TEST(TestGenerator, DistinctSeedsDiverge) {
  for (std::uint64_t i = 0; i < 100; ++i) {
    EXPECT_NE(test_generator(derive_seed(i))->next_bits(128), test_generator(derive_seed(i + 1000))->next_bits(128));
  }
}

TEST(TestGenerator, OnesFrequency) {
  const auto b = test_generator(derive_seed(5))->next_bits(1000000);
  const double freq = static_cast<double>(b.popcount()) / 1e6;
  EXPECT_GE(freq, 0.49);
  EXPECT_LE(freq, 0.51);
}

TEST(TestGenerator, RequestSplittingIsReplayable) {
  auto a = test_generator(derive_seed(1));
  auto b = test_generator(derive_seed(1));
  EXPECT_EQ(a->next_bits(10), b->next_bits(10));
  EXPECT_EQ(a->next_bits(0).width(), 0u);
  EXPECT_EQ(a->next_bits(130), b->next_bits(130));
  EXPECT_EQ(a->bits_emitted(), 140u);
}

TEST(Seeds, DeriveAndMix) {
  EXPECT_EQ(derive_seed(1, {2}).width(), 128u);
  EXPECT_NE(derive_seed(1, {2}), derive_seed(1, {3}));
  EXPECT_EQ(mix_seed(derive_seed(1), 2), derive_seed(1, {2}));
}
