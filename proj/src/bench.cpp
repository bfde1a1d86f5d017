#include "feistel_lab/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "feistel_lab/error.hpp"

namespace feistel_lab {

namespace {

double pow2(std::size_t e) { return std::ldexp(1.0, static_cast<int>(e)); }

double table_memory_entry(StructureKind kind, std::size_t n, std::size_t k) {
  const double kn = static_cast<double>(k * n);
  switch (kind) {
    case StructureKind::kBalanced:
      return pow2((k + 1) * n / 2) * kn;
    case StructureKind::kSourceHeavy:
      return pow2(k * n) * kn;
    case StructureKind::kTargetHeavy:
      return pow2(n) * static_cast<double>(k) * kn;
    case StructureKind::kUfn2:
      return pow2(n) * kn;
  }
  return 0;
}

// Fills `ratio` with value / min(value) over the rows.
template <typename Get, typename Set>
void normalize(std::vector<BenchRow>& rows, Get get, Set set) {
  double lowest = 0;
  bool first = true;
  for (const auto& r : rows) {
    const double v = get(r);
    if (v <= 0) continue;
    if (first || v < lowest) lowest = v;
    first = false;
  }
  for (auto& r : rows) {
    const double v = get(r);
    set(r, lowest > 0 && v > 0 ? v / lowest : 0.0);
  }
}

}  // namespace

std::string_view to_string(PrfMode mode) { return mode == PrfMode::kGgm ? "ggm" : "mem"; }

PrfMode parse_prf_mode(std::string_view name) {
  if (name == "mem" || name == "memoized") return PrfMode::kMemoized;
  if (name == "ggm") return PrfMode::kGgm;
  throw UsageError("unknown PRF mode '" + std::string(name) + "' (expected mem or ggm)");
}

const BenchRow& BenchReport::row(StructureKind kind) const {
  for (const auto& r : rows) {
    if (r.kind == kind) return r;
  }
  throw UsageError("structure not part of this bench report");
}

UfnParams bench_params(StructureKind kind, std::size_t n, std::size_t k) {
  if (kind == StructureKind::kBalanced) return balanced_params_for(n, k, minimal_secure_rounds(kind, k));
  return UfnParams{kind, n, k, minimal_secure_rounds(kind, k)};
}

std::pair<std::size_t, std::size_t> round_function_shape(StructureKind kind, std::size_t n, std::size_t k) {
  const UfnParams p = bench_params(kind, n, k);
  return {p.round_in_bits(), p.round_out_bits()};
}

BenchReport run_bench(const BenchConfig& cfg) {
  if (cfg.structures.empty()) throw UsageError("bench needs at least one structure");
  BenchReport report{cfg, {}};

  std::size_t key_bits = cfg.key_bits;
  if (cfg.mode == PrfMode::kGgm && key_bits == 0) {
    std::size_t l = 1;
    for (auto kind : cfg.structures) l = std::lcm(l, minimal_secure_rounds(kind, cfg.k));
    key_bits = 64 * l;
  }

  for (auto kind : cfg.structures) {
    const UfnParams params = bench_params(kind, cfg.n, cfg.k);
    BenchRow row;
    row.kind = kind;
    row.rounds = params.rounds;
    row.p1 = params.round_in_bits();
    row.p2 = params.round_out_bits();
    row.memory_formula_bits = static_cast<double>(row.rounds) * pow2(row.p1) * static_cast<double>(row.p2);
    row.memory_table_bits = table_memory_entry(kind, cfg.n, cfg.k);
    row.table_agrees = row.memory_table_bits == row.memory_formula_bits;

    const std::uint64_t kind_tag = static_cast<std::uint64_t>(kind);
    TestGenerator inputs(derive_seed(cfg.seed, {kind_tag, 0}));
    std::vector<BitString> plaintexts;
    plaintexts.reserve(cfg.workload);
    for (std::size_t i = 0; i < cfg.workload; ++i) plaintexts.push_back(inputs.next_bits(params.state_width()));

    const bool exhaustible = row.p1 < 63 && (std::size_t{1} << row.p1) <= cfg.table_cap;

    if (cfg.mode == PrfMode::kMemoized) {
      if (!exhaustible && !cfg.analytic_fallback) {
        throw UsageError(std::string(to_string(kind)) + ": round domain 2^" + std::to_string(row.p1) +
                         " exceeds the table cap; pass --analytic to report r*2^P1*P2 instead");
      }
      std::vector<IdealFunctionOracle*> tables;
      std::vector<OraclePtr> fs;
      for (std::size_t i = 0; i < params.rounds; ++i) {
        auto f = ideal_oracle(row.p1, row.p2, derive_seed(cfg.seed, {kind_tag, 1, i}), cfg.table_cap);
        tables.push_back(f.get());
        fs.push_back(std::move(f));
      }
      UfnPermutation perm(params, std::move(fs));

      const auto start = std::chrono::steady_clock::now();
      for (const auto& x : plaintexts) perm.encrypt(x);
      const auto stop = std::chrono::steady_clock::now();
      if (cfg.workload > 0) {
        row.wall_ns_per_encryption =
            std::chrono::duration<double, std::nano>(stop - start).count() / static_cast<double>(cfg.workload);
      }
      for (auto* t : tables) {
        row.workload_table_bits += t->payload_bits();
        row.prbg_bits += t->entropy_bits();
      }
      if (exhaustible) {
        const std::uint64_t domain = std::uint64_t{1} << row.p1;
        double payload = 0;
        for (std::size_t i = 0; i < params.rounds; ++i) {
          auto& f = perm.round_function(i);
          for (std::uint64_t v = 0; v < domain; ++v) f.eval(BitString::from_uint(v, row.p1));
          payload += static_cast<double>(tables[i]->payload_bits());
        }
        row.memory_bits = payload;
        row.memory_measured = true;
      } else {
        row.memory_bits = row.memory_formula_bits;
      }
    } else {
      if (key_bits % params.rounds != 0) {
        throw UsageError("GGM key length " + std::to_string(key_bits) + " is not divisible by " +
                         std::to_string(params.rounds) + " rounds");
      }
      row.key_bits = key_bits;
      TestGenerator key_source(derive_seed(cfg.seed, {kind_tag, 2}));
      UfnPermutation perm =
          make_ggm_permutation(params, key_source.next_bits(key_bits), std::make_shared<TestExpander>());
      const std::size_t per_round = key_bits / params.rounds;
      row.ggm_bound_bits = (2ull * row.p1 * per_round + row.p2) * params.rounds;

      const auto start = std::chrono::steady_clock::now();
      for (const auto& x : plaintexts) perm.encrypt(x);
      const auto stop = std::chrono::steady_clock::now();
      if (cfg.workload > 0) {
        row.wall_ns_per_encryption =
            std::chrono::duration<double, std::nano>(stop - start).count() / static_cast<double>(cfg.workload);
      }
      for (std::size_t i = 0; i < params.rounds; ++i) {
        row.prbg_bits += static_cast<GgmOracle&>(perm.round_function(i)).bits_generated();
      }
      // Nothing is stored between evaluations.
      row.memory_bits = 0;
    }
    if (cfg.workload > 0) {
      row.prbg_bits_per_encryption = static_cast<double>(row.prbg_bits) / static_cast<double>(cfg.workload);
    }
    report.rows.push_back(row);
  }

  auto& rows = report.rows;
  normalize(rows, [](const BenchRow& r) { return r.memory_formula_bits; },
            [](BenchRow& r, double v) { r.memory_ratio = v; });
  normalize(rows, [](const BenchRow& r) { return r.memory_table_bits; },
            [](BenchRow& r, double v) { r.table_memory_ratio = v; });
  normalize(rows, [](const BenchRow& r) { return r.prbg_bits_per_encryption; },
            [](BenchRow& r, double v) { r.bits_ratio = v; });
  normalize(rows, [](const BenchRow& r) { return r.wall_ns_per_encryption; },
            [](BenchRow& r, double v) { r.time_ratio = v; });
  return report;
}

std::string to_csv(const BenchReport& report, bool timing) {
  std::ostringstream out;
  out.precision(10);
  out << "structure,mode,rounds,p1,p2,memory_formula_bits,memory_table_bits,table_agrees,memory_bits,"
         "memory_source,memory_ratio,table_memory_ratio,prbg_bits_per_encryption,bits_ratio,ggm_bound_bits";
  if (timing) out << ",ns_per_encryption,time_ratio";
  out << "\n";
  for (const auto& r : report.rows) {
    out << to_string(r.kind) << ',' << to_string(report.config.mode) << ',' << r.rounds << ',' << r.p1 << ','
        << r.p2 << ',' << r.memory_formula_bits << ',' << r.memory_table_bits << ','
        << (r.table_agrees ? "true" : "false") << ',' << r.memory_bits << ','
        << (report.config.mode == PrfMode::kGgm ? "none" : (r.memory_measured ? "measured" : "analytic")) << ','
        << r.memory_ratio << ',' << r.table_memory_ratio << ',' << r.prbg_bits_per_encryption << ','
        << r.bits_ratio << ',' << r.ggm_bound_bits;
    if (timing) out << ',' << r.wall_ns_per_encryption << ',' << r.time_ratio;
    out << "\n";
  }
  return out.str();
}

}  // namespace feistel_lab
