#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "feistel_lab/bit_string.hpp"
#include "feistel_lab/prf.hpp"

namespace feistel_lab {

enum class StructureKind {
  kBalanced,     // (L || R) -> (R || L ^ f(R)), f: n -> n
  kSourceHeavy,  // kn:n-UFN, f: kn -> n
  kTargetHeavy,  // n:kn-UFN, f: n -> kn
  kUfn2,         // n:kn-UFN2, f: n -> n applied to every target block
};

std::string_view to_string(StructureKind kind);
/// Accepts balanced, source-heavy (src), target-heavy (tgt), ufn2.
StructureKind parse_structure_kind(std::string_view name);

/// Round count from which each structure is a PRP generator: 3, k+2, k+2, 2k+1.
std::size_t minimal_secure_rounds(StructureKind kind, std::size_t k);

struct UfnParams {
  StructureKind kind = StructureKind::kBalanced;
  std::size_t n = 1;  // sub-block width in bits
  std::size_t k = 1;  // ratio; always 1 for kBalanced
  std::size_t rounds = 1;

  void validate() const;
  std::size_t block_count() const { return kind == StructureKind::kBalanced ? 2 : k + 1; }
  std::size_t state_width() const { return block_count() * n; }
  std::size_t round_in_bits() const;
  std::size_t round_out_bits() const;

  friend bool operator==(const UfnParams&, const UfnParams&) = default;
};

/// Balanced network over the same (k+1)n-bit state as the UFNs: halves of
/// (k+1)n/2 bits. Requires (k+1)n even.
UfnParams balanced_params_for(std::size_t n, std::size_t k, std::size_t rounds);

BlockState round_balanced(FunctionOracle& f, const BlockState& state);
BlockState round_source_heavy(FunctionOracle& f, const BlockState& state);
BlockState round_target_heavy(FunctionOracle& f, const BlockState& state);
BlockState round_ufn2(FunctionOracle& f, const BlockState& state);

BlockState apply_round(StructureKind kind, FunctionOracle& f, const BlockState& state);
BlockState invert_round(StructureKind kind, FunctionOracle& f, const BlockState& state);

/// r-round composition D_{f_r} o ... o D_{f_1}. Round functions are checked
/// against the structure's signature at construction.
class UfnPermutation {
 public:
  UfnPermutation(UfnParams params, std::vector<OraclePtr> rounds);

  const UfnParams& params() const { return params_; }
  std::size_t width() const { return params_.state_width(); }

  BitString encrypt(const BitString& x);
  BitString decrypt(const BitString& y);

  /// Block states before round 1 and after every round (r+1 entries).
  std::vector<BlockState> trace(const BitString& x);

  FunctionOracle& round_function(std::size_t index) { return *rounds_.at(index); }

 private:
  void check_width(const BitString& s) const;

  UfnParams params_;
  std::vector<OraclePtr> rounds_;
};

/// Independent lazily sampled round functions; round i draws from
/// mix_seed(seed, i).
UfnPermutation make_ideal_permutation(const UfnParams& params, const BitString& seed,
                                      std::size_t table_cap = kDefaultTableCap);

/// GGM round functions keyed by contiguous slices of `master_key`.
UfnPermutation make_ggm_permutation(const UfnParams& params, const BitString& master_key,
                                    std::shared_ptr<const SeedExpander> expander);

using RoundFactory = std::function<OraclePtr(std::size_t round)>;

/// Wide-block cipher: UFN2 on (k+1)n bits whose rounds are independently keyed
/// n-bit base ciphers. rounds == 0 selects 2k+1. Even k, or fewer than 2k+1
/// rounds, is refused unless `allow_insecure` is set.
UfnPermutation extend_block_cipher(const RoundFactory& base, std::size_t n, std::size_t k, std::size_t rounds = 0,
                                   bool allow_insecure = false);

}  // namespace feistel_lab
