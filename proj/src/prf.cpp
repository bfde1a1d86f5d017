#include "feistel_lab/prf.hpp"

#include "feistel_lab/error.hpp"

namespace feistel_lab {

BitString FunctionOracle::eval(const BitString& x) {
  if (x.width() != in_bits_) {
    throw UsageError("round function expects " + std::to_string(in_bits_) + "-bit input, got " +
                     std::to_string(x.width()));
  }
  BitString y = compute(x);
  if (y.width() != out_bits_) throw std::logic_error("round function produced the wrong output width");
  return y;
}

OraclePtr zero_oracle(std::size_t in_bits, std::size_t out_bits) {
  return std::make_unique<LambdaOracle>(in_bits, out_bits,
                                        [out_bits](const BitString&) { return BitString::zeros(out_bits); });
}

IdealFunctionOracle::IdealFunctionOracle(std::size_t in_bits, std::size_t out_bits,
                                         std::unique_ptr<BitGenerator> entropy, std::size_t table_cap)
    : FunctionOracle(in_bits, out_bits), entropy_(std::move(entropy)), table_cap_(table_cap) {
  if (in_bits == 0 || out_bits == 0) throw UsageError("ideal oracle widths must be at least 1");
  if (!entropy_) throw UsageError("ideal oracle needs an entropy source");
}

BitString IdealFunctionOracle::compute(const BitString& x) {
  auto it = table_.find(x);
  if (it != table_.end()) return it->second;
  if (table_.size() >= table_cap_) {
    throw TableCapExceeded("ideal oracle table reached its cap of " + std::to_string(table_cap_) + " entries");
  }
  return table_.emplace(x, entropy_->next_bits(out_bits())).first->second;
}

std::unique_ptr<IdealFunctionOracle> ideal_oracle(std::size_t in_bits, std::size_t out_bits, const BitString& seed,
                                                  std::size_t table_cap) {
  return std::make_unique<IdealFunctionOracle>(in_bits, out_bits, test_generator(seed), table_cap);
}

BitString TestExpander::stretch(const BitString& seed, std::size_t out_bits) const {
  // Width-0 seeds still need a nonempty generator seed.
  TestGenerator gen(seed.empty() ? BitString::zeros(1) : seed);
  return gen.next_bits(out_bits);
}

BitString BbsExpander::stretch(const BitString& seed, std::size_t out_bits) const {
  BlumBlumShubGenerator gen(params_);
  gen.reseed(seed);
  return gen.next_bits(out_bits);
}

std::vector<BitString> ggm_walk(const GgmKey& key, const BitString& x, std::uint64_t* bits_drawn) {
  const std::size_t l = key.key.width();
  std::vector<BitString> states;
  states.reserve(x.width() + 1);
  states.push_back(key.key);
  for (std::size_t j = 0; j < x.width(); ++j) {
    const BitString doubled = key.expander->stretch(states.back(), 2 * l);
    if (bits_drawn) *bits_drawn += doubled.width();
    states.push_back(doubled.slice(x.bit(j) ? l : 0, l));
  }
  return states;
}

BitString ggm_eval(const GgmKey& key, const BitString& x, std::uint64_t* bits_drawn) {
  BitString y = key.finalizer->stretch(ggm_walk(key, x, bits_drawn).back(), key.out_bits);
  if (bits_drawn) *bits_drawn += y.width();
  return y;
}

std::uint64_t ggm_bits_per_eval(std::size_t key_bits, std::size_t in_bits, std::size_t out_bits) {
  return 2ull * key_bits * in_bits + out_bits;
}

GgmOracle::GgmOracle(std::size_t in_bits, GgmKey key)
    : FunctionOracle(in_bits, key.out_bits), key_(std::move(key)) {
  if (!key_.expander || !key_.finalizer) throw UsageError("GGM key needs both generators");
  if (key_.key.empty()) throw UsageError("GGM key must be nonempty");
}

BitString GgmOracle::compute(const BitString& x) {
  std::uint64_t drawn = 0;
  BitString y = ggm_eval(key_, x, &drawn);
  bits_generated_ += drawn;
  return y;
}

std::vector<GgmKey> split_master_key(const BitString& master, std::size_t rounds, std::size_t out_bits,
                                     std::shared_ptr<const SeedExpander> expander,
                                     std::shared_ptr<const SeedExpander> finalizer) {
  if (rounds == 0 || master.width() % rounds != 0) {
    throw UsageError("master key width " + std::to_string(master.width()) + " is not divisible by " +
                     std::to_string(rounds) + " rounds");
  }
  const std::size_t slice = master.width() / rounds;
  std::vector<GgmKey> keys;
  for (std::size_t i = 0; i < rounds; ++i) {
    keys.push_back(GgmKey{master.slice(i * slice, slice), out_bits, expander, finalizer});
  }
  return keys;
}

}  // namespace feistel_lab
