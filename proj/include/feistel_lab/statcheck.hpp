#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "feistel_lab/bit_string.hpp"
#include "feistel_lab/distinguisher.hpp"
#include "feistel_lab/feistel.hpp"

namespace feistel_lab {

// ---------------------------------------------------------------------------
// BAD events: collisions among the intermediate R-states of a query set.

struct BadEventSpec {
  StructureKind kind = StructureKind::kSourceHeavy;
  /// Round indices i whose R-state collisions count (state after round i).
  std::vector<std::size_t> rounds_watched;
  std::size_t m = 2;
};

/// Watched rounds: 1..k+1 for source-heavy, k..k+1 for target-heavy, k..2k
/// for UFN2. Balanced networks have no BAD event definition here.
BadEventSpec bad_event_spec(StructureKind kind, std::size_t k, std::size_t m);

/// Rounds of the construction the BAD event is defined for: k+2, k+2, 2k+1.
std::size_t bad_event_construction_rounds(StructureKind kind, std::size_t k);

/// (k+1)m^2/2^(n+1) for source-heavy and UFN2, m^2/2^n for target-heavy.
double bad_event_bound(StructureKind kind, std::size_t n, std::size_t k, std::size_t m);

/// The R-state whose collisions define xi^i: R_1||...||R_k for source-heavy,
/// the single R block otherwise.
BitString watched_state(StructureKind kind, const BlockState& state);

enum class QueryShape {
  /// Queries share every block except one: R_1 for source-heavy, R for the
  /// target-heavy kinds.
  kAdversarial,
  kUniform,
};

struct BadProbReport {
  double empirical = 0;
  std::size_t hits = 0;
  std::size_t trials = 0;
  Interval wilson;
  double ci_halfwidth = 0;
  double bound = 0;
};

BadProbReport estimate_bad_prob(const BadEventSpec& spec, std::size_t n, std::size_t k, std::size_t trials,
                                std::uint64_t seed, QueryShape shape = QueryShape::kAdversarial, unsigned jobs = 1);

// ---------------------------------------------------------------------------
// GF(2) matrices.

class Gf2Matrix {
 public:
  explicit Gf2Matrix(std::size_t size) : size_(size), rows_(size, std::vector<std::uint8_t>(size, 0)) {}
  Gf2Matrix(std::initializer_list<std::initializer_list<int>> rows);

  std::size_t size() const { return size_; }
  bool at(std::size_t i, std::size_t j) const { return rows_[i][j] != 0; }
  void set(std::size_t i, std::size_t j, bool v) { rows_[i][j] = v ? 1 : 0; }
  const std::vector<std::uint8_t>& row(std::size_t i) const { return rows_[i]; }

  friend bool operator==(const Gf2Matrix&, const Gf2Matrix&) = default;

 private:
  std::size_t size_;
  std::vector<std::vector<std::uint8_t>> rows_;
};

/// (k+1)x(k+1) all-ones matrix with zeros exactly on the anti-diagonal.
Gf2Matrix build_ufn2_matrix(std::size_t k);

/// Rank by Gaussian elimination using row additions and interchanges only.
std::size_t gf2_rank(Gf2Matrix m);
bool gf2_nonsingular(const Gf2Matrix& m);

// ---------------------------------------------------------------------------
// Output uniformity at a fixed input over fresh instances.

struct UniformityReport {
  double chi_square = 0;
  std::size_t dof = 0;
  double critical_value = 0;
  double p_value = 0;
  double significance = 0.01;
  bool pass = false;
  std::size_t trials = 0;
  /// Trials dropped because a BAD event fired. A single query cannot collide,
  /// so this stays 0; it is reported to keep the conditioning explicit.
  std::size_t discarded = 0;
};

inline constexpr std::size_t kMaxUniformityStateBits = 12;

/// Encrypts the all-zero state under `trials` freshly keyed instances and
/// runs a chi-square goodness-of-fit test against uniform over I_width.
UniformityReport conditional_uniformity_check(const UfnParams& params, std::size_t trials, std::uint64_t seed,
                                              unsigned jobs = 1, double significance = 0.01);

/// Pearson statistic of observed counts against equal expected counts.
double chi_square_uniform(const std::vector<std::uint64_t>& counts);

/// Upper critical value of the chi-square distribution.
double chi_square_critical(std::size_t dof, double significance);

}  // namespace feistel_lab
