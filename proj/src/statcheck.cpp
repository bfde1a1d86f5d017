#include "feistel_lab/statcheck.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <unordered_set>
#include <utility>

#include "feistel_lab/error.hpp"

namespace feistel_lab {

namespace {

void require_bad_kind(StructureKind kind) {
  if (kind == StructureKind::kBalanced) throw UsageError("BAD events are defined for the unbalanced kinds only");
}

std::size_t varied_block(StructureKind kind, std::size_t k) { return kind == StructureKind::kSourceHeavy ? 1 : k; }

std::vector<BitString> shaped_queries(StructureKind kind, std::size_t n, std::size_t k, std::size_t m,
                                      QueryShape shape, BitGenerator& coins) {
  const std::size_t width = (k + 1) * n;
  std::unordered_set<BitString> seen;
  std::vector<BitString> queries;
  queries.reserve(m);
  if (shape == QueryShape::kUniform) {
    while (queries.size() < m) {
      BitString x = coins.next_bits(width);
      if (seen.insert(x).second) queries.push_back(std::move(x));
    }
    return queries;
  }
  const BlockState base = partition(coins.next_bits(width), n);
  const std::size_t slot = varied_block(kind, k);
  while (queries.size() < m) {
    BitString v = coins.next_bits(n);
    if (!seen.insert(v).second) continue;
    BlockState q = base;
    q.blocks[slot] = std::move(v);
    queries.push_back(q.flatten());
  }
  return queries;
}

}  // namespace

BadEventSpec bad_event_spec(StructureKind kind, std::size_t k, std::size_t m) {
  require_bad_kind(kind);
  if (k < 1) throw UsageError("k must be at least 1");
  BadEventSpec spec{kind, {}, m};
  std::size_t first = 0;
  std::size_t last = 0;
  switch (kind) {
    case StructureKind::kSourceHeavy:
      first = 1;
      last = k + 1;
      break;
    case StructureKind::kTargetHeavy:
      first = k;
      last = k + 1;
      break;
    case StructureKind::kUfn2:
      first = k;
      last = 2 * k;
      break;
    case StructureKind::kBalanced:
      break;
  }
  for (std::size_t i = first; i <= last; ++i) spec.rounds_watched.push_back(i);
  return spec;
}

std::size_t bad_event_construction_rounds(StructureKind kind, std::size_t k) {
  require_bad_kind(kind);
  return minimal_secure_rounds(kind, k);
}

double bad_event_bound(StructureKind kind, std::size_t n, std::size_t k, std::size_t m) {
  require_bad_kind(kind);
  const double m2 = static_cast<double>(m) * static_cast<double>(m);
  if (kind == StructureKind::kTargetHeavy) return m2 / std::ldexp(1.0, static_cast<int>(n));
  return static_cast<double>(k + 1) * m2 / std::ldexp(1.0, static_cast<int>(n + 1));
}

BitString watched_state(StructureKind kind, const BlockState& state) {
  if (kind == StructureKind::kSourceHeavy) {
    return concat(std::vector<BitString>(state.blocks.begin() + 1, state.blocks.end()));
  }
  return state.blocks.back();
}

BadProbReport estimate_bad_prob(const BadEventSpec& spec, std::size_t n, std::size_t k, std::size_t trials,
                                std::uint64_t seed, QueryShape shape, unsigned jobs) {
  require_bad_kind(spec.kind);
  if (trials == 0) throw UsageError("trials must be at least 1");
  if (spec.m < 1) throw UsageError("m must be at least 1");
  const std::size_t width = (k + 1) * n;
  const std::size_t space_bits = shape == QueryShape::kAdversarial ? n : width;
  if (space_bits < 63 && spec.m > (std::size_t{1} << space_bits)) {
    throw UsageError("m = " + std::to_string(spec.m) + " exceeds the 2^" + std::to_string(space_bits) +
                     " distinct queries available");
  }
  const UfnParams params{spec.kind, n, k, bad_event_construction_rounds(spec.kind, k)};
  for (auto r : spec.rounds_watched) {
    if (r > params.rounds) throw UsageError("watched round beyond the construction");
  }

  std::vector<unsigned char> hit(trials, 0);
  parallel_for(trials, jobs, [&](std::size_t t) {
    if (spec.m < 2) return;
    UfnPermutation perm = make_ideal_permutation(params, derive_seed(seed, {t, 1}));
    TestGenerator coins(derive_seed(seed, {t, 2}));
    std::vector<std::vector<BlockState>> traces;
    for (const auto& x : shaped_queries(spec.kind, n, k, spec.m, shape, coins)) traces.push_back(perm.trace(x));
    for (auto round : spec.rounds_watched) {
      std::unordered_set<BitString> seen;
      for (const auto& tr : traces) {
        if (!seen.insert(watched_state(spec.kind, tr[round])).second) {
          hit[t] = 1;
          return;
        }
      }
    }
  });

  BadProbReport report;
  report.trials = trials;
  for (auto h : hit) report.hits += h;
  report.empirical = static_cast<double>(report.hits) / static_cast<double>(trials);
  report.wilson = wilson_interval(report.hits, trials);
  report.ci_halfwidth = report.wilson.halfwidth();
  report.bound = bad_event_bound(spec.kind, n, k, spec.m);
  return report;
}

// ---------------------------------------------------------------------------

Gf2Matrix::Gf2Matrix(std::initializer_list<std::initializer_list<int>> rows) : Gf2Matrix(rows.size()) {
  std::size_t i = 0;
  for (const auto& r : rows) {
    if (r.size() != size_) throw UsageError("GF(2) matrix must be square");
    std::size_t j = 0;
    for (int v : r) set(i, j++, (v & 1) != 0);
    ++i;
  }
}

Gf2Matrix build_ufn2_matrix(std::size_t k) {
  if (k < 1) throw UsageError("k must be at least 1");
  Gf2Matrix a(k + 1);
  for (std::size_t i = 0; i <= k; ++i) {
    for (std::size_t j = 0; j <= k; ++j) a.set(i, j, i + j != k);
  }
  return a;
}

std::size_t gf2_rank(Gf2Matrix m) {
  const std::size_t n = m.size();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < n; ++col) {
    std::size_t pivot = rank;
    while (pivot < n && !m.at(pivot, col)) ++pivot;
    if (pivot == n) continue;
    if (pivot != rank) {
      for (std::size_t j = 0; j < n; ++j) {
        const bool tmp = m.at(rank, j);
        m.set(rank, j, m.at(pivot, j));
        m.set(pivot, j, tmp);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == rank || !m.at(i, col)) continue;
      for (std::size_t j = 0; j < n; ++j) m.set(i, j, m.at(i, j) != m.at(rank, j));
    }
    ++rank;
  }
  return rank;
}

bool gf2_nonsingular(const Gf2Matrix& m) { return gf2_rank(m) == m.size(); }

// ---------------------------------------------------------------------------

double chi_square_uniform(const std::vector<std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  return stat;
}

double chi_square_critical(std::size_t dof, double significance) {
  const boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::quantile(boost::math::complement(dist, significance));
}

UniformityReport conditional_uniformity_check(const UfnParams& params, std::size_t trials, std::uint64_t seed,
                                              unsigned jobs, double significance) {
  params.validate();
  const std::size_t width = params.state_width();
  if (width > kMaxUniformityStateBits) {
    throw UsageError("uniformity check needs a state of at most " + std::to_string(kMaxUniformityStateBits) +
                     " bits, got " + std::to_string(width));
  }
  if (trials == 0) throw UsageError("trials must be at least 1");
  const std::size_t bins = std::size_t{1} << width;
  const BitString input = BitString::zeros(width);

  std::vector<std::uint32_t> outcome(trials, 0);
  parallel_for(trials, jobs, [&](std::size_t t) {
    UfnPermutation perm = make_ideal_permutation(params, derive_seed(seed, {t}));
    outcome[t] = static_cast<std::uint32_t>(perm.encrypt(input).to_uint());
  });
  std::vector<std::uint64_t> counts(bins, 0);
  for (auto o : outcome) ++counts[o];

  UniformityReport report;
  report.trials = trials;
  report.significance = significance;
  report.dof = bins - 1;
  report.chi_square = chi_square_uniform(counts);
  report.critical_value = chi_square_critical(report.dof, significance);
  const boost::math::chi_squared dist(static_cast<double>(report.dof));
  report.p_value = boost::math::cdf(boost::math::complement(dist, report.chi_square));
  report.pass = report.chi_square < report.critical_value;
  return report;
}

}  // namespace feistel_lab
