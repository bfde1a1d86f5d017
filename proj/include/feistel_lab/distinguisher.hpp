#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>

#include "feistel_lab/bit_string.hpp"
#include "feistel_lab/feistel.hpp"
#include "feistel_lab/prbg.hpp"

namespace feistel_lab {

/// Black-box bijection on I_width, as seen by an oracle machine.
class PermutationOracle {
 public:
  explicit PermutationOracle(std::size_t width) : width_(width) {}
  virtual ~PermutationOracle() = default;

  std::size_t width() const { return width_; }
  std::size_t queries() const { return queries_; }

  BitString query(const BitString& x);

 protected:
  virtual BitString answer(const BitString& x) = 0;

 private:
  std::size_t width_;
  std::size_t queries_ = 0;
};

/// Oracle backed by a constructed Feistel permutation.
class ConstructionOracle final : public PermutationOracle {
 public:
  explicit ConstructionOracle(UfnPermutation perm)
      : PermutationOracle(perm.width()), perm_(std::move(perm)) {}
  UfnPermutation& permutation() { return perm_; }

 protected:
  BitString answer(const BitString& x) override { return perm_.encrypt(x); }

 private:
  UfnPermutation perm_;
};

/// Lazily sampled uniform permutation: a fresh input is mapped to a value
/// drawn uniformly from the outputs not yet used (rejection sampling).
class IdealPermutationOracle final : public PermutationOracle {
 public:
  IdealPermutationOracle(std::size_t width, std::unique_ptr<BitGenerator> entropy);

  /// Preimage of y, sampled lazily under the same consistency rule.
  BitString inverse(const BitString& y);
  std::size_t sampled() const { return forward_.size(); }

 protected:
  BitString answer(const BitString& x) override;

 private:
  BitString draw_unused(const std::unordered_map<BitString, BitString>& used);

  std::unique_ptr<BitGenerator> entropy_;
  std::unordered_map<BitString, BitString> forward_;
  std::unordered_map<BitString, BitString> inverse_;
};

std::unique_ptr<IdealPermutationOracle> ideal_permutation(std::size_t width, const BitString& seed);

// ---------------------------------------------------------------------------

/// A distinguisher: queries the oracle at most query_budget() times and
/// emits a one-bit verdict. Machines are immutable and may be shared across
/// threads; all randomness comes from the caller's `coins`.
class OracleMachine {
 public:
  virtual ~OracleMachine() = default;

  virtual std::string_view name() const = 0;
  virtual std::size_t query_budget() const = 0;
  virtual std::size_t width() const = 0;

  /// Throws std::logic_error if the machine exceeds its budget.
  bool run(PermutationOracle& oracle, BitGenerator& coins) const;

 private:
  virtual bool play(PermutationOracle& oracle, BitGenerator& coins) const = 0;
};

/// Two queries that differ only in the leftmost n-bit block.
class LeftBlockPairAttack : public OracleMachine {
 public:
  LeftBlockPairAttack(std::size_t n, std::size_t k);

  std::size_t query_budget() const override { return 2; }
  std::size_t width() const override { return (k_ + 1) * n_; }

  /// Queries x_p and x_q (which must differ only in block 0) and decides.
  bool run_pair(PermutationOracle& oracle, const BitString& x_p, const BitString& x_q) const;
  virtual bool verdict(const BlockState& x_p, const BlockState& y_p, const BlockState& x_q,
                       const BlockState& y_q) const = 0;

 protected:
  std::size_t n_;
  std::size_t k_;

 private:
  bool play(PermutationOracle& oracle, BitGenerator& coins) const override;
};

/// Accepts iff the leftmost output blocks differ by the leftmost input
/// difference. Holds with certainty against k+1 rounds of kn:n-UFN.
class SourceHeavyAttack final : public LeftBlockPairAttack {
 public:
  using LeftBlockPairAttack::LeftBlockPairAttack;
  std::string_view name() const override { return "src-k1"; }
  bool verdict(const BlockState& x_p, const BlockState& y_p, const BlockState& x_q,
               const BlockState& y_q) const override;
};

/// Same relation on L_1; holds with certainty against k+1 rounds of n:kn-UFN.
class TargetHeavyAttack final : public LeftBlockPairAttack {
 public:
  using LeftBlockPairAttack::LeftBlockPairAttack;
  std::string_view name() const override { return "tgt-k1"; }
  bool verdict(const BlockState& x_p, const BlockState& y_p, const BlockState& x_q,
               const BlockState& y_q) const override;
};

/// One query; accepts iff the XOR of all output blocks equals the XOR of all
/// input blocks. Holds for UFN2 with even k at every round count.
class Ufn2EvenKAttack final : public OracleMachine {
 public:
  Ufn2EvenKAttack(std::size_t n, std::size_t k);
  std::string_view name() const override { return "ufn2-even"; }
  std::size_t query_budget() const override { return 1; }
  std::size_t width() const override { return (k_ + 1) * n_; }
  bool run_on(PermutationOracle& oracle, const BitString& x) const;

 private:
  bool play(PermutationOracle& oracle, BitGenerator& coins) const override;
  std::size_t n_;
  std::size_t k_;
};

/// Two queries differing in L_1; accepts iff
///   (xor of L-blocks of y_p) ^ (xor of L-blocks of y_q) ^ (L_1,p ^ L_1,q) ^ (W_p ^ W_q) = 0
/// where W is input block `w_index` (0 = L_1, k = R). Targets 2k rounds of
/// UFN2 with odd k.
class Ufn2TwoKAttack final : public LeftBlockPairAttack {
 public:
  Ufn2TwoKAttack(std::size_t n, std::size_t k, std::size_t w_index);
  std::string_view name() const override { return "ufn2-2k"; }
  std::size_t w_index() const { return w_index_; }
  bool verdict(const BlockState& x_p, const BlockState& y_p, const BlockState& x_q,
               const BlockState& y_q) const override;

 private:
  std::size_t w_index_;
};

std::unique_ptr<OracleMachine> attack_source_heavy(std::size_t n, std::size_t k);
std::unique_ptr<OracleMachine> attack_target_heavy(std::size_t n, std::size_t k);
/// Throws UsageError for odd k.
std::unique_ptr<OracleMachine> attack_ufn2_even_k(std::size_t n, std::size_t k);
/// Throws UsageError for even k. Uses the calibrated W index.
std::unique_ptr<Ufn2TwoKAttack> attack_ufn2_2k(std::size_t n, std::size_t k);

/// Finds the first input block index whose use as W makes the 2k-round
/// relation hold on all of `probes` pairs against a freshly keyed 2k-round
/// UFN2 with random round functions. Throws if no index works.
std::size_t calibrate_ufn2_w_index(std::size_t n, std::size_t k, std::uint64_t seed, std::size_t probes = 64);

/// Calibrated index, computed once per k and cached (thread-safe).
std::size_t ufn2_w_index(std::size_t n, std::size_t k);

enum class AttackName { kSourceHeavy, kTargetHeavy, kUfn2EvenK, kUfn2TwoK };
/// src-k1, tgt-k1, ufn2-even, ufn2-2k.
AttackName parse_attack_name(std::string_view name);
std::unique_ptr<OracleMachine> make_attack(AttackName name, std::size_t n, std::size_t k);
/// The structure and round count each attack breaks with certainty.
UfnParams attack_target(AttackName name, std::size_t n, std::size_t k);

// ---------------------------------------------------------------------------

struct Interval {
  double lo = 0;
  double hi = 0;
  bool contains(double v) const { return lo <= v && v <= hi; }
  double halfwidth() const { return (hi - lo) / 2; }
};

/// Wilson score interval for a binomial proportion (z = 1.96 for 95%).
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96);

struct GameReport {
  double accept_a = 0;
  double accept_b = 0;
  double advantage = 0;
  std::size_t trials = 0;
  Interval wilson_a;
  Interval wilson_b;
  /// 95% half-width for the advantage: Wilson half-widths combined in quadrature.
  double ci_halfwidth = 0;
  std::uint64_t seed = 0;
};

using OracleFactory = std::function<std::unique_ptr<PermutationOracle>(const BitString& seed)>;

/// Fresh construction with independent ideal round functions per call.
OracleFactory construction_factory(const UfnParams& params);
OracleFactory ideal_permutation_factory(std::size_t width);

/// Runs `machine` against a fresh A and a fresh B oracle for each trial.
/// Trial t seeds both sides' oracles from derive_seed(seed, {t, 1}) and the
/// machine's coins from derive_seed(seed, {t, 2}), so the report does not
/// depend on `jobs`.
GameReport estimate_advantage(const OracleMachine& machine, const OracleFactory& a, const OracleFactory& b,
                              std::size_t trials, std::uint64_t seed, unsigned jobs = 1);

/// Splits [0, count) across `jobs` threads; fn(index) must be thread-safe.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace feistel_lab
