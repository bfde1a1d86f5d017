#include "feistel_lab/distinguisher.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "feistel_lab/error.hpp"

namespace feistel_lab {

namespace {

BitString xor_of_blocks(const BlockState& s, std::size_t first, std::size_t last) {
  BitString acc = BitString::zeros(s.block_width);
  for (std::size_t i = first; i < last; ++i) acc ^= s.blocks[i];
  return acc;
}

BitString nonzero_bits(BitGenerator& coins, std::size_t width) {
  for (;;) {
    BitString d = coins.next_bits(width);
    if (d.popcount() != 0) return d;
  }
}

}  // namespace

BitString PermutationOracle::query(const BitString& x) {
  if (x.width() != width_) {
    throw UsageError("oracle expects " + std::to_string(width_) + "-bit queries, got " + std::to_string(x.width()));
  }
  ++queries_;
  return answer(x);
}

IdealPermutationOracle::IdealPermutationOracle(std::size_t width, std::unique_ptr<BitGenerator> entropy)
    : PermutationOracle(width), entropy_(std::move(entropy)) {
  if (width == 0) throw UsageError("ideal permutation width must be at least 1");
}

BitString IdealPermutationOracle::draw_unused(const std::unordered_map<BitString, BitString>& used) {
  if (width() < 64 && used.size() >= (std::size_t{1} << width())) {
    throw std::logic_error("ideal permutation: domain exhausted");
  }
  for (;;) {
    BitString candidate = entropy_->next_bits(width());
    if (!used.contains(candidate)) return candidate;
  }
}

BitString IdealPermutationOracle::answer(const BitString& x) {
  if (auto it = forward_.find(x); it != forward_.end()) return it->second;
  BitString y = draw_unused(inverse_);
  forward_.emplace(x, y);
  inverse_.emplace(y, x);
  return y;
}

BitString IdealPermutationOracle::inverse(const BitString& y) {
  if (y.width() != width()) throw UsageError("inverse query width mismatch");
  if (auto it = inverse_.find(y); it != inverse_.end()) return it->second;
  BitString x = draw_unused(forward_);
  forward_.emplace(x, y);
  inverse_.emplace(y, x);
  return x;
}

std::unique_ptr<IdealPermutationOracle> ideal_permutation(std::size_t width, const BitString& seed) {
  return std::make_unique<IdealPermutationOracle>(width, test_generator(seed));
}

// ---------------------------------------------------------------------------

bool OracleMachine::run(PermutationOracle& oracle, BitGenerator& coins) const {
  if (oracle.width() != width()) {
    throw UsageError(std::string(name()) + " expects a " + std::to_string(width()) + "-bit oracle, got " +
                     std::to_string(oracle.width()));
  }
  const std::size_t before = oracle.queries();
  const bool result = play(oracle, coins);
  if (oracle.queries() - before > query_budget()) {
    throw std::logic_error(std::string(name()) + " exceeded its query budget");
  }
  return result;
}

LeftBlockPairAttack::LeftBlockPairAttack(std::size_t n, std::size_t k) : n_(n), k_(k) {
  if (n < 1 || k < 1) throw UsageError("attack parameters n and k must be at least 1");
}

bool LeftBlockPairAttack::run_pair(PermutationOracle& oracle, const BitString& x_p, const BitString& x_q) const {
  const BlockState bp = partition(x_p, n_);
  const BlockState bq = partition(x_q, n_);
  if (bp.count() != k_ + 1 || bq.count() != k_ + 1) throw UsageError("query width does not match (k+1)n");
  for (std::size_t i = 1; i <= k_; ++i) {
    if (bp.blocks[i] != bq.blocks[i]) throw UsageError("queries must differ only in the leftmost block");
  }
  if (bp.blocks[0] == bq.blocks[0]) throw UsageError("queries must be distinct");
  const BitString y_p = oracle.query(x_p);
  const BitString y_q = oracle.query(x_q);
  return verdict(bp, partition(y_p, n_), bq, partition(y_q, n_));
}

bool LeftBlockPairAttack::play(PermutationOracle& oracle, BitGenerator& coins) const {
  const BitString x_p = coins.next_bits(width());
  const BitString delta = concat(nonzero_bits(coins, n_), BitString::zeros(k_ * n_));
  return run_pair(oracle, x_p, x_p ^ delta);
}

bool SourceHeavyAttack::verdict(const BlockState& x_p, const BlockState& y_p, const BlockState& x_q,
                                const BlockState& y_q) const {
  return (y_p.blocks[0] ^ y_q.blocks[0]) == (x_p.blocks[0] ^ x_q.blocks[0]);
}

bool TargetHeavyAttack::verdict(const BlockState& x_p, const BlockState& y_p, const BlockState& x_q,
                                const BlockState& y_q) const {
  return (y_p.blocks[0] ^ y_q.blocks[0]) == (x_p.blocks[0] ^ x_q.blocks[0]);
}

Ufn2EvenKAttack::Ufn2EvenKAttack(std::size_t n, std::size_t k) : n_(n), k_(k) {
  if (n < 1 || k < 1) throw UsageError("attack parameters n and k must be at least 1");
  if (k % 2 != 0) {
    throw UsageError("ufn2-even requires even k (got k = " + std::to_string(k) +
                     "); with odd k the XOR-sum is not conserved");
  }
}

bool Ufn2EvenKAttack::run_on(PermutationOracle& oracle, const BitString& x) const {
  const BitString y = oracle.query(x);
  return partition(x, n_).xor_sum() == partition(y, n_).xor_sum();
}

bool Ufn2EvenKAttack::play(PermutationOracle& oracle, BitGenerator& coins) const {
  return run_on(oracle, coins.next_bits(width()));
}

Ufn2TwoKAttack::Ufn2TwoKAttack(std::size_t n, std::size_t k, std::size_t w_index)
    : LeftBlockPairAttack(n, k), w_index_(w_index) {
  if (k % 2 == 0) throw UsageError("ufn2-2k requires odd k (got k = " + std::to_string(k) + ")");
  if (w_index > k) throw UsageError("W index out of range");
}

bool Ufn2TwoKAttack::verdict(const BlockState& x_p, const BlockState& y_p, const BlockState& x_q,
                             const BlockState& y_q) const {
  BitString acc = xor_of_blocks(y_p, 0, k_) ^ xor_of_blocks(y_q, 0, k_);
  acc ^= x_p.blocks[0] ^ x_q.blocks[0];
  acc ^= x_p.blocks[w_index_] ^ x_q.blocks[w_index_];
  return acc.popcount() == 0;
}

std::unique_ptr<OracleMachine> attack_source_heavy(std::size_t n, std::size_t k) {
  return std::make_unique<SourceHeavyAttack>(n, k);
}

std::unique_ptr<OracleMachine> attack_target_heavy(std::size_t n, std::size_t k) {
  return std::make_unique<TargetHeavyAttack>(n, k);
}

std::unique_ptr<OracleMachine> attack_ufn2_even_k(std::size_t n, std::size_t k) {
  return std::make_unique<Ufn2EvenKAttack>(n, k);
}

std::unique_ptr<Ufn2TwoKAttack> attack_ufn2_2k(std::size_t n, std::size_t k) {
  if (k % 2 == 0) throw UsageError("ufn2-2k requires odd k (got k = " + std::to_string(k) + ")");
  return std::make_unique<Ufn2TwoKAttack>(n, k, ufn2_w_index(n, k));
}

std::size_t calibrate_ufn2_w_index(std::size_t n, std::size_t k, std::uint64_t seed, std::size_t probes) {
  if (k % 2 == 0) throw UsageError("W calibration applies to odd k only");
  const UfnParams target{StructureKind::kUfn2, n, k, 2 * k};
  for (std::size_t w = 0; w <= k; ++w) {
    const Ufn2TwoKAttack candidate(n, k, w);
    ConstructionOracle oracle(make_ideal_permutation(target, derive_seed(seed, {k, w, 0})));
    TestGenerator coins(derive_seed(seed, {k, w, 1}));
    bool always = true;
    for (std::size_t i = 0; i < probes && always; ++i) always = candidate.run(oracle, coins);
    if (always) return w;
  }
  throw std::runtime_error("no W block makes the 2k-round UFN2 relation hold");
}

std::size_t ufn2_w_index(std::size_t n, std::size_t k) {
  static std::mutex mu;
  static std::map<std::size_t, std::size_t> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(k); it != cache.end()) return it->second;
  const std::size_t w = calibrate_ufn2_w_index(n, k, 0xCA11B8A7E);
  cache.emplace(k, w);
  return w;
}

AttackName parse_attack_name(std::string_view name) {
  if (name == "src-k1") return AttackName::kSourceHeavy;
  if (name == "tgt-k1") return AttackName::kTargetHeavy;
  if (name == "ufn2-even") return AttackName::kUfn2EvenK;
  if (name == "ufn2-2k") return AttackName::kUfn2TwoK;
  throw UsageError("unknown attack '" + std::string(name) + "' (expected src-k1, tgt-k1, ufn2-even or ufn2-2k)");
}

std::unique_ptr<OracleMachine> make_attack(AttackName name, std::size_t n, std::size_t k) {
  switch (name) {
    case AttackName::kSourceHeavy:
      return attack_source_heavy(n, k);
    case AttackName::kTargetHeavy:
      return attack_target_heavy(n, k);
    case AttackName::kUfn2EvenK:
      return attack_ufn2_even_k(n, k);
    case AttackName::kUfn2TwoK:
      return attack_ufn2_2k(n, k);
  }
  throw UsageError("unknown attack");
}

UfnParams attack_target(AttackName name, std::size_t n, std::size_t k) {
  switch (name) {
    case AttackName::kSourceHeavy:
      return {StructureKind::kSourceHeavy, n, k, k + 1};
    case AttackName::kTargetHeavy:
      return {StructureKind::kTargetHeavy, n, k, k + 1};
    case AttackName::kUfn2EvenK:
      return {StructureKind::kUfn2, n, k, 2 * k + 1};
    case AttackName::kUfn2TwoK:
      return {StructureKind::kUfn2, n, k, 2 * k};
  }
  throw UsageError("unknown attack");
}

// ---------------------------------------------------------------------------

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0, 1};
  const double nt = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nt;
  const double z2 = z * z;
  const double denom = 1 + z2 / nt;
  const double centre = (p + z2 / (2 * nt)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nt + z2 / (4 * nt * nt)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

OracleFactory construction_factory(const UfnParams& params) {
  params.validate();
  return [params](const BitString& seed) -> std::unique_ptr<PermutationOracle> {
    return std::make_unique<ConstructionOracle>(make_ideal_permutation(params, seed));
  };
}

OracleFactory ideal_permutation_factory(std::size_t width) {
  return [width](const BitString& seed) -> std::unique_ptr<PermutationOracle> {
    return ideal_permutation(width, seed);
  };
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  std::exception_ptr failure;
  std::mutex failure_mu;
  for (unsigned j = 0; j < jobs; ++j) {
    workers.emplace_back([&, j] {
      try {
        for (std::size_t i = j; i < count; i += jobs) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

GameReport estimate_advantage(const OracleMachine& machine, const OracleFactory& a, const OracleFactory& b,
                              std::size_t trials, std::uint64_t seed, unsigned jobs) {
  if (trials == 0) throw UsageError("trials must be at least 1");
  std::vector<unsigned char> verdict_a(trials, 0);
  std::vector<unsigned char> verdict_b(trials, 0);
  parallel_for(trials, jobs, [&](std::size_t t) {
    const BitString oracle_seed = derive_seed(seed, {t, 1});
    const BitString coin_seed = derive_seed(seed, {t, 2});
    {
      auto oracle = a(oracle_seed);
      TestGenerator coins(coin_seed);
      verdict_a[t] = machine.run(*oracle, coins);
    }
    {
      auto oracle = b(oracle_seed);
      TestGenerator coins(coin_seed);
      verdict_b[t] = machine.run(*oracle, coins);
    }
  });
  std::size_t hits_a = 0;
  std::size_t hits_b = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    hits_a += verdict_a[t];
    hits_b += verdict_b[t];
  }
  GameReport report;
  report.trials = trials;
  report.seed = seed;
  report.accept_a = static_cast<double>(hits_a) / static_cast<double>(trials);
  report.accept_b = static_cast<double>(hits_b) / static_cast<double>(trials);
  report.advantage = std::abs(report.accept_a - report.accept_b);
  report.wilson_a = wilson_interval(hits_a, trials);
  report.wilson_b = wilson_interval(hits_b, trials);
  report.ci_halfwidth = std::hypot(report.wilson_a.halfwidth(), report.wilson_b.halfwidth());
  return report;
}

}  // namespace feistel_lab
