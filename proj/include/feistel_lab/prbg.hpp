#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "feistel_lab/bit_string.hpp"

namespace feistel_lab {

using BigInt = boost::multiprecision::cpp_int;

/// Replayable bit source: identical seed and request sequence give identical
/// output. Instances carry mutable state and are not thread-safe.
class BitGenerator {
 public:
  virtual ~BitGenerator() = default;

  BitString next_bits(std::size_t count) {
    emitted_ += count;
    return generate(count);
  }
  virtual void reseed(const BitString& seed) = 0;

  /// Total bits handed out since construction.
  std::uint64_t bits_emitted() const { return emitted_; }

 protected:
  virtual BitString generate(std::size_t count) = 0;

 private:
  std::uint64_t emitted_ = 0;
};

// ---------------------------------------------------------------------------
// Fast seeded generator for bulk experiments. Not a cryptographic PRBG.

class TestGenerator final : public BitGenerator {
 public:
  explicit TestGenerator(const BitString& seed);
  void reseed(const BitString& seed) override;
  std::uint64_t next_word() { return engine_(); }

 protected:
  BitString generate(std::size_t count) override;

 private:
  std::mt19937_64 engine_;
};

std::unique_ptr<BitGenerator> test_generator(const BitString& seed);

/// 64-bit master seed followed by one 64-bit word per path element. Used to
/// give every trial, round and side of a game its own reproducible stream.
BitString derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path = {});

/// `base` with a 64-bit tag appended.
BitString mix_seed(const BitString& base, std::uint64_t tag);

// ---------------------------------------------------------------------------
// Number-theoretic helpers.

BigInt to_bigint(const BitString& s);
/// Low `width` bits of `value`.
BitString from_bigint(const BigInt& value, std::size_t width);

/// Miller-Rabin with `rounds` random bases (bases drawn from a fixed seed so
/// the answer is reproducible).
bool is_probable_prime(const BigInt& n, unsigned rounds = 64);

// ---------------------------------------------------------------------------
// Blum-Micali.

struct BmParams {
  BigInt p;
  BigInt g;
  BigInt x0;
};

/// Largest modulus accepted by the Blum-Micali generator; the hard-core
/// predicate is evaluated from a precomputed discrete-log table.
inline constexpr std::uint64_t kMaxBmModulus = std::uint64_t{1} << 20;

/// Throws UsageError unless p is prime, g generates Z_p^*, 0 <= x0 < p.
void validate(const BmParams& params);

/// x_i = g^{x_{i-1}} mod p, b_i = 1 iff log_g(x_i) <= (p-1)/2. The predicate
/// is defined on Z_p^* = {1..p-1}; x_i never leaves that set for i >= 1.
class BlumMicaliGenerator final : public BitGenerator {
 public:
  explicit BlumMicaliGenerator(BmParams params);

  /// New x0 = seed mod p.
  void reseed(const BitString& seed) override;
  std::uint64_t state() const { return state_; }
  bool predicate(std::uint64_t x) const;

 protected:
  BitString generate(std::size_t count) override;

 private:
  BmParams params_;
  std::uint64_t p_ = 0;
  std::uint64_t g_ = 0;
  std::uint64_t state_ = 0;
  std::vector<std::uint32_t> dlog_;
};

BitString bm_generate(const BmParams& params, std::size_t count);

// ---------------------------------------------------------------------------
// Blum-Blum-Shub.

struct BbsParams {
  BigInt p;
  BigInt q;
  BigInt n;
  BigInt s;
  BigInt x0;

  friend bool operator==(const BbsParams&, const BbsParams&) = default;
};

/// Builds and validates params from (p, q, s): both primes are 3 mod 4 and
/// gcd(s, pq) = 1. Computes n = pq and x0 = s^2 mod n.
BbsParams make_bbs_params(const BigInt& p, const BigInt& q, const BigInt& s);
void validate(const BbsParams& params);

/// Deterministic in `entropy`. For bit_length >= 5 both primes have their
/// top bit set; below that the candidate range is [3, 2^bit_length) so two
/// distinct primes exist.
BbsParams generate_bbs_params(unsigned bit_length, const BitString& entropy);

class BlumBlumShubGenerator final : public BitGenerator {
 public:
  explicit BlumBlumShubGenerator(BbsParams params);

  /// s = seed mod n, advanced to the next value coprime to n (and >= 2);
  /// x0 = s^2 mod n.
  void reseed(const BitString& seed) override;
  const BigInt& state() const { return state_; }
  const BbsParams& params() const { return params_; }

 protected:
  BitString generate(std::size_t count) override;

 private:
  BbsParams params_;
  BigInt state_;
};

BitString bbs_generate(const BbsParams& params, std::size_t count);

// Key-value text form, one `name=decimal` pair per line.
std::string to_key_value(const BmParams& params);
std::string to_key_value(const BbsParams& params);
BmParams bm_params_from_key_value(std::string_view text);
BbsParams bbs_params_from_key_value(std::string_view text);

}  // namespace feistel_lab
