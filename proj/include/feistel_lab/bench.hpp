#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "feistel_lab/feistel.hpp"
#include "feistel_lab/prf.hpp"

namespace feistel_lab {

enum class PrfMode {
  kMemoized,  // memory + bit generator, filled on demand
  kGgm,       // GGM tree, nothing stored
};

std::string_view to_string(PrfMode mode);
/// Accepts "mem"/"memoized" and "ggm".
PrfMode parse_prf_mode(std::string_view name);

struct BenchConfig {
  std::vector<StructureKind> structures{StructureKind::kBalanced, StructureKind::kSourceHeavy,
                                        StructureKind::kTargetHeavy, StructureKind::kUfn2};
  std::size_t n = 4;
  std::size_t k = 2;
  PrfMode mode = PrfMode::kMemoized;
  std::size_t workload = 1000;
  std::uint64_t seed = 0;
  /// Total GGM key length shared by every structure; 0 selects
  /// 64 * lcm(round counts) so each structure splits it evenly.
  std::size_t key_bits = 0;
  /// Report r * 2^P1 * P2 instead of failing when a round domain exceeds the
  /// table cap.
  bool analytic_fallback = false;
  std::size_t table_cap = kDefaultTableCap;
};

struct BenchRow {
  StructureKind kind = StructureKind::kBalanced;
  std::size_t rounds = 0;
  std::size_t p1 = 0;  // round-function input bits
  std::size_t p2 = 0;  // round-function output bits

  /// r * 2^P1 * P2.
  double memory_formula_bits = 0;
  /// The closed-form memory entry of the comparison table for this structure.
  double memory_table_bits = 0;
  bool table_agrees = false;
  /// Table payload after exhausting every round domain (memoized mode), or
  /// the formula value when exhaustion is infeasible.
  double memory_bits = 0;
  bool memory_measured = false;
  std::uint64_t workload_table_bits = 0;

  std::uint64_t prbg_bits = 0;  // generator bits drawn by the workload
  double prbg_bits_per_encryption = 0;
  /// GGM only: (2 * P1 * l/r + P2) * r.
  std::uint64_t ggm_bound_bits = 0;
  std::size_t key_bits = 0;

  double wall_ns_per_encryption = 0;

  double memory_ratio = 0;
  double table_memory_ratio = 0;
  double bits_ratio = 0;
  double time_ratio = 0;
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchRow> rows;

  const BenchRow& row(StructureKind kind) const;
};

/// P1 and P2 of a structure over the (k+1)n-bit state.
std::pair<std::size_t, std::size_t> round_function_shape(StructureKind kind, std::size_t n, std::size_t k);
UfnParams bench_params(StructureKind kind, std::size_t n, std::size_t k);

BenchReport run_bench(const BenchConfig& cfg);

/// One line per structure; wall-clock columns only when `timing` is set.
std::string to_csv(const BenchReport& report, bool timing);

}  // namespace feistel_lab
