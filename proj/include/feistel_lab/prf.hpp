#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "feistel_lab/bit_string.hpp"
#include "feistel_lab/prbg.hpp"

namespace feistel_lab {

/// A round function F: I_in -> I_out. eval() is deterministic per instance.
class FunctionOracle {
 public:
  FunctionOracle(std::size_t in_bits, std::size_t out_bits) : in_bits_(in_bits), out_bits_(out_bits) {}
  virtual ~FunctionOracle() = default;

  std::size_t in_bits() const { return in_bits_; }
  std::size_t out_bits() const { return out_bits_; }

  /// Throws UsageError if x.width() != in_bits().
  BitString eval(const BitString& x);

 protected:
  virtual BitString compute(const BitString& x) = 0;

 private:
  std::size_t in_bits_;
  std::size_t out_bits_;
};

using OraclePtr = std::unique_ptr<FunctionOracle>;

/// Wraps a plain callable; used for hand-traced round functions.
class LambdaOracle final : public FunctionOracle {
 public:
  using Fn = std::function<BitString(const BitString&)>;
  LambdaOracle(std::size_t in_bits, std::size_t out_bits, Fn fn)
      : FunctionOracle(in_bits, out_bits), fn_(std::move(fn)) {}

 protected:
  BitString compute(const BitString& x) override { return fn_(x); }

 private:
  Fn fn_;
};

OraclePtr zero_oracle(std::size_t in_bits, std::size_t out_bits);

// ---------------------------------------------------------------------------
// Lazily sampled random function: memory plus a bit generator.

inline constexpr std::size_t kDefaultTableCap = std::size_t{1} << 20;

class TableCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fresh input draws out_bits from the entropy stream and is memoized; the
/// table is never overwritten. Not thread-safe: one instance per worker.
class IdealFunctionOracle final : public FunctionOracle {
 public:
  IdealFunctionOracle(std::size_t in_bits, std::size_t out_bits, std::unique_ptr<BitGenerator> entropy,
                      std::size_t table_cap = kDefaultTableCap);

  std::size_t table_size() const { return table_.size(); }
  /// Stored output bits, table_size() * out_bits().
  std::uint64_t payload_bits() const { return static_cast<std::uint64_t>(table_.size()) * out_bits(); }
  std::uint64_t entropy_bits() const { return entropy_->bits_emitted(); }

 protected:
  BitString compute(const BitString& x) override;

 private:
  std::unique_ptr<BitGenerator> entropy_;
  std::size_t table_cap_;
  std::unordered_map<BitString, BitString> table_;
};

std::unique_ptr<IdealFunctionOracle> ideal_oracle(std::size_t in_bits, std::size_t out_bits, const BitString& seed,
                                                  std::size_t table_cap = kDefaultTableCap);

// ---------------------------------------------------------------------------
// GGM tree construction.

/// Deterministic length-stretching generator: seed -> out_bits bits. Used as
/// the GGM doubling generator G and the output generator G'.
class SeedExpander {
 public:
  virtual ~SeedExpander() = default;
  virtual BitString stretch(const BitString& seed, std::size_t out_bits) const = 0;
};

/// Backed by TestGenerator; the default for bulk runs.
class TestExpander final : public SeedExpander {
 public:
  BitString stretch(const BitString& seed, std::size_t out_bits) const override;
};

/// Blum-Blum-Shub reseeded from the seed value under fixed (p, q).
class BbsExpander final : public SeedExpander {
 public:
  explicit BbsExpander(BbsParams params) : params_(std::move(params)) {}
  BitString stretch(const BitString& seed, std::size_t out_bits) const override;

 private:
  BbsParams params_;
};

class LambdaExpander final : public SeedExpander {
 public:
  using Fn = std::function<BitString(const BitString&, std::size_t)>;
  explicit LambdaExpander(Fn fn) : fn_(std::move(fn)) {}
  BitString stretch(const BitString& seed, std::size_t out_bits) const override { return fn_(seed, out_bits); }

 private:
  Fn fn_;
};

struct GgmKey {
  BitString key;
  std::size_t out_bits = 0;
  std::shared_ptr<const SeedExpander> expander;   // G: I_l -> I_2l
  std::shared_ptr<const SeedExpander> finalizer;  // G': I_l -> I_out
};

/// Tree walk: states[0] = key, states[j] = G_{x_j}(states[j-1]) where G_0 is
/// the left half of G and G_1 the right half. When `bits_drawn` is given it
/// is increased by the width of every generator output consumed.
std::vector<BitString> ggm_walk(const GgmKey& key, const BitString& x, std::uint64_t* bits_drawn = nullptr);

/// G'(G_x(key)).
BitString ggm_eval(const GgmKey& key, const BitString& x, std::uint64_t* bits_drawn = nullptr);

/// Number of generator bits one evaluation draws: 2*l per input bit plus out_bits.
std::uint64_t ggm_bits_per_eval(std::size_t key_bits, std::size_t in_bits, std::size_t out_bits);

/// GGM-backed FunctionOracle with an instrumented generator-bit counter.
class GgmOracle final : public FunctionOracle {
 public:
  GgmOracle(std::size_t in_bits, GgmKey key);
  std::uint64_t bits_generated() const { return bits_generated_.load(); }
  const GgmKey& key() const { return key_; }

 protected:
  BitString compute(const BitString& x) override;

 private:
  GgmKey key_;
  std::atomic<std::uint64_t> bits_generated_{0};
};

/// Cuts `master` into `rounds` contiguous equal slices, one key per round.
std::vector<GgmKey> split_master_key(const BitString& master, std::size_t rounds, std::size_t out_bits,
                                     std::shared_ptr<const SeedExpander> expander,
                                     std::shared_ptr<const SeedExpander> finalizer);

}  // namespace feistel_lab
