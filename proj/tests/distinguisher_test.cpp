#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <unordered_set>

#include "feistel_lab/distinguisher.hpp"
#include "feistel_lab/error.hpp"

using namespace feistel_lab;

namespace {

BitString bits(const char* s) { return BitString::from_binary(s); }

BlockState blocks(std::size_t n, std::initializer_list<const char*> parts) {
  BlockState s{n, {}};
  for (const char* p : parts) s.blocks.push_back(bits(p));
  return s;
}

class FixedOracle final : public PermutationOracle {
 public:
  FixedOracle(std::size_t width, std::function<BitString(const BitString&)> fn)
      : PermutationOracle(width), fn_(std::move(fn)) {}

 protected:
  BitString answer(const BitString& x) override { return fn_(x); }

 private:
  std::function<BitString(const BitString&)> fn_;
};

class GreedyMachine final : public OracleMachine {
 public:
  std::string_view name() const override { return "greedy"; }
  std::size_t query_budget() const override { return 2; }
  std::size_t width() const override { return 4; }

 private:
  bool play(PermutationOracle& oracle, BitGenerator& coins) const override {
    for (int i = 0; i < 3; ++i) oracle.query(coins.next_bits(4));
    return true;
  }
};

double tolerance(double p, std::size_t trials) { return 4 * std::sqrt(p * (1 - p) / static_cast<double>(trials)); }

}  // namespace

TEST(IdealPermutation, InjectiveAndDeterministic) {
  auto pi = ideal_permutation(12, derive_seed(1));
  const auto a = pi->query(BitString::from_uint(1, 12));
  const auto b = pi->query(BitString::from_uint(2, 12));
  EXPECT_NE(a, b);
  EXPECT_EQ(pi->query(BitString::from_uint(1, 12)), a);
  EXPECT_EQ(pi->inverse(a), BitString::from_uint(1, 12));
  EXPECT_EQ(pi->queries(), 3u);
}

TEST(IdealPermutation, ExhaustionIsAPermutation) {
  auto pi = ideal_permutation(2, derive_seed(2));
  std::unordered_set<BitString> outs;
  for (unsigned v = 0; v < 4; ++v) outs.insert(pi->query(BitString::from_uint(v, 2)));
  EXPECT_EQ(outs.size(), 4u);
  EXPECT_EQ(pi->sampled(), 4u);
}

TEST(IdealPermutation, InverseFirstStaysConsistent) {
  auto pi = ideal_permutation(3, derive_seed(3));
  std::unordered_set<BitString> pre;
  for (unsigned v = 0; v < 8; ++v) pre.insert(pi->inverse(BitString::from_uint(v, 3)));
  EXPECT_EQ(pre.size(), 8u);
  for (unsigned v = 0; v < 8; ++v) {
    const auto y = BitString::from_uint(v, 3);
    EXPECT_EQ(pi->query(pi->inverse(y)), y);
  }
}

TEST(Attacks, SourceHeavyRelationInstantiation) {
  SourceHeavyAttack a(2, 2);
  const auto xp = blocks(2, {"00", "01", "10"});
  const auto xq = blocks(2, {"11", "01", "10"});
  EXPECT_TRUE(a.verdict(xp, blocks(2, {"10", "00", "00"}), xq, blocks(2, {"01", "11", "11"})));
  EXPECT_FALSE(a.verdict(xp, blocks(2, {"10", "00", "00"}), xq, blocks(2, {"00", "00", "00"})));
}

TEST(Attacks, PairMustDifferOnlyInBlockZero) {
  SourceHeavyAttack a(2, 2);
  FixedOracle id(6, [](const BitString& x) { return x; });
  EXPECT_THROW(a.run_pair(id, bits("000110"), bits("110111")), UsageError);
  EXPECT_NO_THROW(a.run_pair(id, bits("000110"), bits("110110")));
}

TEST(Attacks, Ufn2EvenInstantiation) {
  Ufn2EvenKAttack a(2, 2);
  FixedOracle zero_sum(6, [](const BitString&) { return bits("011011"); });  // 01^10^11 = 00
  FixedOracle other(6, [](const BitString&) { return bits("011010"); });
  EXPECT_TRUE(a.run_on(zero_sum, bits("011011")));
  EXPECT_FALSE(a.run_on(other, bits("011011")));
  EXPECT_THROW(Ufn2EvenKAttack(2, 3), UsageError);
  EXPECT_THROW(attack_ufn2_even_k(4, 3), UsageError);
  EXPECT_THROW(attack_ufn2_2k(4, 2), UsageError);
}

TEST(Attacks, BudgetEnforced) {
  GreedyMachine m;
  FixedOracle id(4, [](const BitString& x) { return x; });
  auto coins = test_generator(derive_seed(1));
  EXPECT_THROW(m.run(id, *coins), std::logic_error);
  FixedOracle wide(6, [](const BitString& x) { return x; });
  EXPECT_THROW(m.run(wide, *coins), UsageError);
}

TEST(Attacks, DeclaredBudgets) {
  EXPECT_EQ(attack_source_heavy(4, 2)->query_budget(), 2u);
  EXPECT_EQ(attack_target_heavy(4, 2)->query_budget(), 2u);
  EXPECT_EQ(attack_ufn2_even_k(4, 2)->query_budget(), 1u);
  EXPECT_EQ(attack_ufn2_2k(4, 3)->query_budget(), 2u);
}

TEST(Attacks, CertainAgainstUnderRoundedTargets) {
  struct Case {
    AttackName name;
    std::size_t n, k;
  };
  for (const Case c : {Case{AttackName::kSourceHeavy, 4, 2}, Case{AttackName::kSourceHeavy, 3, 3},
                       Case{AttackName::kTargetHeavy, 4, 2}, Case{AttackName::kTargetHeavy, 3, 4},
                       Case{AttackName::kUfn2EvenK, 4, 2}, Case{AttackName::kUfn2EvenK, 3, 4},
                       Case{AttackName::kUfn2TwoK, 4, 1}, Case{AttackName::kUfn2TwoK, 4, 3},
                       Case{AttackName::kUfn2TwoK, 3, 5}}) {
    auto m = make_attack(c.name, c.n, c.k);
    const auto target = attack_target(c.name, c.n, c.k);
    const auto r = estimate_advantage(*m, construction_factory(target), ideal_permutation_factory(target.state_width()),
                                      2000, 17);
    EXPECT_EQ(r.accept_a, 1.0) << m->name() << " n=" << c.n << " k=" << c.k;
    const double p = std::ldexp(1.0, -static_cast<int>(c.n));
    EXPECT_NEAR(r.accept_b, p, tolerance(p, 2000)) << m->name();
  }
}

TEST(Attacks, Ufn2EvenHoldsAtEveryRoundCount) {
  auto m = attack_ufn2_even_k(4, 2);
  for (std::size_t r = 1; r <= 10; ++r) {
    const auto rep = estimate_advantage(*m, construction_factory(UfnParams{StructureKind::kUfn2, 4, 2, r}),
                                        ideal_permutation_factory(12), 500, r);
    EXPECT_EQ(rep.accept_a, 1.0) << r;
  }
}

TEST(Attacks, Ufn2TwoKCalibration) {
  for (std::size_t k : {1u, 3u, 5u}) {
    EXPECT_EQ(calibrate_ufn2_w_index(4, k, 1), 1u) << k;
    EXPECT_EQ(ufn2_w_index(4, k), 1u);
  }
  // The L_1 alignment never holds, so a machine pinned to it loses certainty.
  Ufn2TwoKAttack wrong(4, 3, 0);
  const auto r = estimate_advantage(wrong, construction_factory(UfnParams{StructureKind::kUfn2, 4, 3, 6}),
                                    ideal_permutation_factory(16), 500, 3);
  EXPECT_LT(r.accept_a, 0.5);
}

TEST(Attacks, MinimalRoundsLookIdeal) {
  struct Case {
    AttackName name;
    StructureKind kind;
    std::size_t k;
  };
  for (const Case c : {Case{AttackName::kSourceHeavy, StructureKind::kSourceHeavy, 2},
                       Case{AttackName::kTargetHeavy, StructureKind::kTargetHeavy, 2},
                       Case{AttackName::kUfn2TwoK, StructureKind::kUfn2, 3}}) {
    auto m = make_attack(c.name, 4, c.k);
    const UfnParams p{c.kind, 4, c.k, minimal_secure_rounds(c.kind, c.k)};
    const auto r = estimate_advantage(*m, construction_factory(p), ideal_permutation_factory(p.state_width()), 10000, 23);
    EXPECT_LE(r.advantage, 3 * r.ci_halfwidth) << m->name();
  }
}

TEST(Game, IdenticalFactoriesGiveZeroAdvantage) {
  auto m = attack_source_heavy(4, 2);
  const auto f = construction_factory(UfnParams{StructureKind::kSourceHeavy, 4, 2, 4});
  const auto r = estimate_advantage(*m, f, f, 3000, 9);
  EXPECT_EQ(r.advantage, 0.0);
  EXPECT_EQ(r.accept_a, r.accept_b);
}

TEST(Game, ReproducibleAndJobIndependent) {
  auto m = attack_target_heavy(4, 2);
  const auto a = construction_factory(UfnParams{StructureKind::kTargetHeavy, 4, 2, 3});
  const auto b = ideal_permutation_factory(12);
  const auto r1 = estimate_advantage(*m, a, b, 2000, 77, 1);
  const auto r2 = estimate_advantage(*m, a, b, 2000, 77, 1);
  const auto r3 = estimate_advantage(*m, a, b, 2000, 77, 4);
  EXPECT_EQ(r1.accept_b, r2.accept_b);
  EXPECT_EQ(r1.accept_b, r3.accept_b);
  EXPECT_EQ(r1.advantage, r3.advantage);
  EXPECT_EQ(r1.seed, 77u);
  EXPECT_EQ(r1.trials, 2000u);
  EXPECT_THROW(estimate_advantage(*m, a, b, 0, 1), UsageError);
}

TEST(Game, AdvantageMatchesTheoryForSourceHeavy) {
  auto m = attack_source_heavy(4, 2);
  const auto r = estimate_advantage(*m, construction_factory(UfnParams{StructureKind::kSourceHeavy, 4, 2, 3}),
                                    ideal_permutation_factory(12), 10000, 5);
  EXPECT_EQ(r.accept_a, 1.0);
  EXPECT_TRUE(r.wilson_b.contains(0.0625));
  EXPECT_LE(std::abs(r.advantage - 0.9375), r.ci_halfwidth);
}

TEST(Wilson, KnownValues) {
  const auto zero = wilson_interval(0, 10);
  EXPECT_DOUBLE_EQ(zero.lo, 0.0);
  EXPECT_NEAR(zero.hi, 0.27753, 1e-4);
  const auto half = wilson_interval(5, 10);
  EXPECT_NEAR(half.lo, 0.23659, 1e-4);
  EXPECT_NEAR(half.hi, 0.76341, 1e-4);
  const auto all = wilson_interval(10, 10);
  EXPECT_NEAR(all.lo, 0.72247, 1e-4);
  EXPECT_NEAR(all.hi, 1.0, 1e-12);
}

TEST(ParallelFor, CoversEveryIndexOnceAndRethrows) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 3, [&](std::size_t i) { hits[i]++; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 2, [](std::size_t i) {
                 if (i == 7) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

TEST(Names, ParseAndTargets) {
  EXPECT_EQ(parse_attack_name("ufn2-2k"), AttackName::kUfn2TwoK);
  EXPECT_THROW(parse_attack_name("nope"), UsageError);
  EXPECT_EQ(attack_target(AttackName::kSourceHeavy, 4, 2).rounds, 3u);
  EXPECT_EQ(attack_target(AttackName::kTargetHeavy, 4, 2).rounds, 3u);
  EXPECT_EQ(attack_target(AttackName::kUfn2EvenK, 4, 2).rounds, 5u);
  EXPECT_EQ(attack_target(AttackName::kUfn2TwoK, 4, 3).rounds, 6u);
}

TEST(Attacks, Ufn2TwoKEveryNonLeftAlignmentHolds) {
  for (std::size_t k : {3u, 5u, 7u}) {
    const auto target = UfnParams{StructureKind::kUfn2, 3, k, 2 * k};
    for (std::size_t w = 1; w <= k; ++w) {
      Ufn2TwoKAttack m(3, k, w);
      const auto r = estimate_advantage(m, construction_factory(target), ideal_permutation_factory(target.state_width()),
                                        200, 40 + w);
      EXPECT_EQ(r.accept_a, 1.0) << "k=" << k << " w=" << w;
    }
  }
}
