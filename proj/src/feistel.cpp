#include "feistel_lab/feistel.hpp"

#include "feistel_lab/error.hpp"

namespace feistel_lab {

namespace {

void require_blocks(const BlockState& state, std::size_t count, std::string_view what) {
  if (state.count() != count) {
    throw UsageError(std::string(what) + ": expected " + std::to_string(count) + " blocks, got " +
                     std::to_string(state.count()));
  }
  for (const auto& b : state.blocks) {
    if (b.width() != state.block_width) throw UsageError(std::string(what) + ": block width mismatch");
  }
}

void require_signature(const FunctionOracle& f, std::size_t in_bits, std::size_t out_bits, std::string_view what) {
  if (f.in_bits() != in_bits || f.out_bits() != out_bits) {
    throw UsageError(std::string(what) + ": round function must map " + std::to_string(in_bits) + " to " +
                     std::to_string(out_bits) + " bits, got " + std::to_string(f.in_bits()) + " -> " +
                     std::to_string(f.out_bits()));
  }
}

// Inverse rounds. Each undoes the corresponding forward round given the same f.

BlockState unround_balanced(FunctionOracle& f, const BlockState& state) {
  require_blocks(state, 2, "balanced inverse round");
  require_signature(f, state.block_width, state.block_width, "balanced inverse round");
  // (Y1, Y2) = (R, L ^ f(R))  ->  (Y2 ^ f(Y1), Y1)
  return {state.block_width, {state.blocks[1] ^ f.eval(state.blocks[0]), state.blocks[0]}};
}

BlockState unround_source_heavy(FunctionOracle& f, const BlockState& state) {
  const std::size_t k = state.count() - 1;
  require_signature(f, k * state.block_width, state.block_width, "source-heavy inverse round");
  std::vector<BitString> sources(state.blocks.begin(), state.blocks.end() - 1);
  BlockState out{state.block_width, {}};
  out.blocks.reserve(k + 1);
  out.blocks.push_back(state.blocks.back() ^ f.eval(concat(sources)));
  for (auto& s : sources) out.blocks.push_back(std::move(s));
  return out;
}

BlockState unround_target_heavy(FunctionOracle& f, const BlockState& state) {
  const std::size_t k = state.count() - 1;
  const std::size_t n = state.block_width;
  require_signature(f, n, k * n, "target-heavy inverse round");
  const BitString mask = f.eval(state.blocks[0]);
  BlockState out{n, {}};
  out.blocks.reserve(k + 1);
  for (std::size_t i = 0; i < k; ++i) out.blocks.push_back(state.blocks[i + 1] ^ mask.slice(i * n, n));
  out.blocks.push_back(state.blocks[0]);
  return out;
}

BlockState unround_ufn2(FunctionOracle& f, const BlockState& state) {
  const std::size_t k = state.count() - 1;
  require_signature(f, state.block_width, state.block_width, "UFN2 inverse round");
  const BitString mask = f.eval(state.blocks[0]);
  BlockState out{state.block_width, {}};
  out.blocks.reserve(k + 1);
  for (std::size_t i = 0; i < k; ++i) out.blocks.push_back(state.blocks[i + 1] ^ mask);
  out.blocks.push_back(state.blocks[0]);
  return out;
}

}  // namespace

std::string_view to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::kBalanced:
      return "balanced";
    case StructureKind::kSourceHeavy:
      return "source-heavy";
    case StructureKind::kTargetHeavy:
      return "target-heavy";
    case StructureKind::kUfn2:
      return "ufn2";
  }
  return "?";
}

StructureKind parse_structure_kind(std::string_view name) {
  if (name == "balanced") return StructureKind::kBalanced;
  if (name == "source-heavy" || name == "src") return StructureKind::kSourceHeavy;
  if (name == "target-heavy" || name == "tgt") return StructureKind::kTargetHeavy;
  if (name == "ufn2") return StructureKind::kUfn2;
  throw UsageError("unknown structure kind '" + std::string(name) +
                   "' (expected balanced, source-heavy, target-heavy or ufn2)");
}

std::size_t minimal_secure_rounds(StructureKind kind, std::size_t k) {
  switch (kind) {
    case StructureKind::kBalanced:
      return 3;
    case StructureKind::kSourceHeavy:
    case StructureKind::kTargetHeavy:
      return k + 2;
    case StructureKind::kUfn2:
      return 2 * k + 1;
  }
  return 0;
}

void UfnParams::validate() const {
  if (n < 1 || k < 1 || rounds < 1) throw UsageError("n, k and rounds must all be at least 1");
  if (kind == StructureKind::kBalanced && k != 1) {
    throw UsageError("balanced networks have k = 1; use balanced_params_for for a (k+1)n-bit state");
  }
}

std::size_t UfnParams::round_in_bits() const { return kind == StructureKind::kSourceHeavy ? k * n : n; }

std::size_t UfnParams::round_out_bits() const { return kind == StructureKind::kTargetHeavy ? k * n : n; }

UfnParams balanced_params_for(std::size_t n, std::size_t k, std::size_t rounds) {
  if (((k + 1) * n) % 2 != 0) throw UsageError("a balanced network needs an even state width");
  return UfnParams{StructureKind::kBalanced, (k + 1) * n / 2, 1, rounds};
}

BlockState round_balanced(FunctionOracle& f, const BlockState& state) {
  require_blocks(state, 2, "balanced round");
  require_signature(f, state.block_width, state.block_width, "balanced round");
  return {state.block_width, {state.blocks[1], state.blocks[0] ^ f.eval(state.blocks[1])}};
}

BlockState round_source_heavy(FunctionOracle& f, const BlockState& state) {
  if (state.count() < 2) throw UsageError("source-heavy round: need at least 2 blocks");
  require_blocks(state, state.count(), "source-heavy round");
  const std::size_t k = state.count() - 1;
  require_signature(f, k * state.block_width, state.block_width, "source-heavy round");
  std::vector<BitString> sources(state.blocks.begin() + 1, state.blocks.end());
  const BitString mask = f.eval(concat(sources));
  BlockState out{state.block_width, std::move(sources)};
  out.blocks.push_back(state.blocks[0] ^ mask);
  return out;
}

BlockState round_target_heavy(FunctionOracle& f, const BlockState& state) {
  if (state.count() < 2) throw UsageError("target-heavy round: need at least 2 blocks");
  require_blocks(state, state.count(), "target-heavy round");
  const std::size_t k = state.count() - 1;
  const std::size_t n = state.block_width;
  require_signature(f, n, k * n, "target-heavy round");
  const BitString mask = f.eval(state.blocks[k]);
  BlockState out{n, {}};
  out.blocks.reserve(k + 1);
  out.blocks.push_back(state.blocks[k]);
  // C_i is the i-th n-bit block of f(R), leftmost first.
  for (std::size_t i = 0; i < k; ++i) out.blocks.push_back(state.blocks[i] ^ mask.slice(i * n, n));
  return out;
}

BlockState round_ufn2(FunctionOracle& f, const BlockState& state) {
  if (state.count() < 2) throw UsageError("UFN2 round: need at least 2 blocks");
  require_blocks(state, state.count(), "UFN2 round");
  const std::size_t k = state.count() - 1;
  require_signature(f, state.block_width, state.block_width, "UFN2 round");
  const BitString mask = f.eval(state.blocks[k]);
  BlockState out{state.block_width, {}};
  out.blocks.reserve(k + 1);
  out.blocks.push_back(state.blocks[k]);
  for (std::size_t i = 0; i < k; ++i) out.blocks.push_back(state.blocks[i] ^ mask);
  return out;
}

BlockState apply_round(StructureKind kind, FunctionOracle& f, const BlockState& state) {
  switch (kind) {
    case StructureKind::kBalanced:
      return round_balanced(f, state);
    case StructureKind::kSourceHeavy:
      return round_source_heavy(f, state);
    case StructureKind::kTargetHeavy:
      return round_target_heavy(f, state);
    case StructureKind::kUfn2:
      return round_ufn2(f, state);
  }
  throw UsageError("unknown structure kind");
}

BlockState invert_round(StructureKind kind, FunctionOracle& f, const BlockState& state) {
  if (state.count() < 2) throw UsageError("inverse round: need at least 2 blocks");
  require_blocks(state, state.count(), "inverse round");
  switch (kind) {
    case StructureKind::kBalanced:
      return unround_balanced(f, state);
    case StructureKind::kSourceHeavy:
      return unround_source_heavy(f, state);
    case StructureKind::kTargetHeavy:
      return unround_target_heavy(f, state);
    case StructureKind::kUfn2:
      return unround_ufn2(f, state);
  }
  throw UsageError("unknown structure kind");
}

// ---------------------------------------------------------------------------

UfnPermutation::UfnPermutation(UfnParams params, std::vector<OraclePtr> rounds)
    : params_(params), rounds_(std::move(rounds)) {
  params_.validate();
  if (rounds_.size() != params_.rounds) {
    throw UsageError("expected " + std::to_string(params_.rounds) + " round functions, got " +
                     std::to_string(rounds_.size()));
  }
  for (const auto& f : rounds_) {
    if (!f) throw UsageError("null round function");
    require_signature(*f, params_.round_in_bits(), params_.round_out_bits(), to_string(params_.kind));
  }
}

void UfnPermutation::check_width(const BitString& s) const {
  if (s.width() != width()) {
    throw UsageError("expected a " + std::to_string(width()) + "-bit block, got " + std::to_string(s.width()));
  }
}

BitString UfnPermutation::encrypt(const BitString& x) {
  check_width(x);
  BlockState state = partition(x, params_.n);
  for (auto& f : rounds_) state = apply_round(params_.kind, *f, state);
  return state.flatten();
}

BitString UfnPermutation::decrypt(const BitString& y) {
  check_width(y);
  BlockState state = partition(y, params_.n);
  for (auto it = rounds_.rbegin(); it != rounds_.rend(); ++it) state = invert_round(params_.kind, **it, state);
  return state.flatten();
}

std::vector<BlockState> UfnPermutation::trace(const BitString& x) {
  check_width(x);
  std::vector<BlockState> states;
  states.reserve(rounds_.size() + 1);
  states.push_back(partition(x, params_.n));
  for (auto& f : rounds_) states.push_back(apply_round(params_.kind, *f, states.back()));
  return states;
}

UfnPermutation make_ideal_permutation(const UfnParams& params, const BitString& seed, std::size_t table_cap) {
  params.validate();
  std::vector<OraclePtr> rounds;
  rounds.reserve(params.rounds);
  for (std::size_t i = 0; i < params.rounds; ++i) {
    rounds.push_back(ideal_oracle(params.round_in_bits(), params.round_out_bits(), mix_seed(seed, i), table_cap));
  }
  return UfnPermutation(params, std::move(rounds));
}

UfnPermutation make_ggm_permutation(const UfnParams& params, const BitString& master_key,
                                    std::shared_ptr<const SeedExpander> expander) {
  params.validate();
  auto keys = split_master_key(master_key, params.rounds, params.round_out_bits(), expander, expander);
  std::vector<OraclePtr> rounds;
  rounds.reserve(params.rounds);
  for (auto& key : keys) rounds.push_back(std::make_unique<GgmOracle>(params.round_in_bits(), std::move(key)));
  return UfnPermutation(params, std::move(rounds));
}

UfnPermutation extend_block_cipher(const RoundFactory& base, std::size_t n, std::size_t k, std::size_t rounds,
                                   bool allow_insecure) {
  if (rounds == 0) rounds = 2 * k + 1;
  if (!allow_insecure) {
    if (k % 2 == 0) {
      throw UsageError("extend_block_cipher: k = " + std::to_string(k) +
                       " is even; the XOR of all output blocks then equals the XOR of all input blocks "
                       "(even-k UFN2 attack)");
    }
    if (rounds < 2 * k + 1) {
      throw UsageError("extend_block_cipher: " + std::to_string(rounds) + " rounds is below 2k+1 = " +
                       std::to_string(2 * k + 1) + " (2k-round UFN2 attack)");
    }
  }
  std::vector<OraclePtr> fs;
  fs.reserve(rounds);
  for (std::size_t i = 0; i < rounds; ++i) fs.push_back(base(i));
  return UfnPermutation(UfnParams{StructureKind::kUfn2, n, k, rounds}, std::move(fs));
}

}  // namespace feistel_lab
