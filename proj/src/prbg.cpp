#include "feistel_lab/prbg.hpp"

#include <boost/multiprecision/miller_rabin.hpp>
#include <map>
#include <sstream>

#include "feistel_lab/error.hpp"

namespace feistel_lab {

namespace {

std::seed_seq make_seed_seq(const BitString& seed) {
  std::vector<std::uint32_t> material;
  material.push_back(static_cast<std::uint32_t>(seed.width()));
  for (auto w : seed.words()) {
    material.push_back(static_cast<std::uint32_t>(w >> 32));
    material.push_back(static_cast<std::uint32_t>(w));
  }
  return std::seed_seq(material.begin(), material.end());
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

std::map<std::string, BigInt> parse_key_value(std::string_view text) {
  std::map<std::string, BigInt> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("malformed parameter line '" + line + "'");
    try {
      out[line.substr(0, eq)] = BigInt(line.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("malformed integer in '" + line + "'");
    }
  }
  return out;
}

const BigInt& require(const std::map<std::string, BigInt>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw UsageError("missing parameter '" + key + "'");
  return it->second;
}

// Distinct prime factors of n, or empty if some cofactor could not be
// resolved by trial division up to `limit`.
std::vector<std::uint64_t> small_factorization(std::uint64_t n, std::uint64_t limit, bool& complete) {
  std::vector<std::uint64_t> factors;
  for (std::uint64_t d = 2; d <= limit && d * d <= n; ++d) {
    if (n % d == 0) {
      factors.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  complete = true;
  if (n > 1) {
    if (n > limit * limit && !is_probable_prime(BigInt(n))) complete = false;
    factors.push_back(n);
  }
  return factors;
}

}  // namespace

// ---------------------------------------------------------------------------

TestGenerator::TestGenerator(const BitString& seed) { reseed(seed); }

void TestGenerator::reseed(const BitString& seed) {
  if (seed.empty()) throw UsageError("test generator seed must be nonempty");
  auto seq = make_seed_seq(seed);
  engine_.seed(seq);
}

BitString TestGenerator::generate(std::size_t count) {
  if (count <= 64) return BitString::from_uint(count == 0 ? 0 : engine_() >> (64 - count), count);
  std::vector<BitString> chunks;
  for (std::size_t pos = 0; pos < count; pos += 64) {
    const std::size_t take = std::min<std::size_t>(64, count - pos);
    chunks.push_back(BitString::from_uint(engine_() >> (64 - take), take));
  }
  return concat(chunks);
}

std::unique_ptr<BitGenerator> test_generator(const BitString& seed) {
  return std::make_unique<TestGenerator>(seed);
}

BitString derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::vector<BitString> parts;
  parts.push_back(BitString::from_uint(master, 64));
  for (auto p : path) parts.push_back(BitString::from_uint(p, 64));
  return concat(parts);
}

BitString mix_seed(const BitString& base, std::uint64_t tag) {
  return concat(base, BitString::from_uint(tag, 64));
}

BigInt to_bigint(const BitString& s) {
  BigInt v = 0;
  for (std::size_t i = 0; i < s.width(); ++i) {
    v <<= 1;
    if (s.bit(i)) v |= 1;
  }
  return v;
}

BitString from_bigint(const BigInt& value, std::size_t width) {
  BitString out = BitString::zeros(width);
  for (std::size_t i = 0; i < width; ++i) {
    if (boost::multiprecision::bit_test(value, static_cast<unsigned>(width - 1 - i))) out.set_bit(i, true);
  }
  return out;
}

bool is_probable_prime(const BigInt& n, unsigned rounds) {
  if (n < 2) return false;
  std::mt19937_64 bases(0x5eed);
  return boost::multiprecision::miller_rabin_test(n, rounds, bases);
}

// ---------------------------------------------------------------------------

void validate(const BmParams& params) {
  if (params.p < 3 || params.p > std::numeric_limits<std::uint64_t>::max()) {
    throw UsageError("Blum-Micali modulus must be an odd prime that fits in 64 bits");
  }
  if (!is_probable_prime(params.p)) throw UsageError("Blum-Micali modulus p is not prime");
  if (params.x0 < 0 || params.x0 >= params.p) throw UsageError("Blum-Micali x0 must lie in {0..p-1}");
  const auto p = static_cast<std::uint64_t>(params.p);
  if (params.g <= 0 || params.g >= params.p) throw UsageError("Blum-Micali g must lie in {1..p-1}");
  const auto g = static_cast<std::uint64_t>(params.g);

  if (p <= kMaxBmModulus) {
    std::uint64_t x = g;
    std::uint64_t order = 1;
    while (x != 1) {
      x = mulmod(x, g, p);
      ++order;
    }
    if (order != p - 1) throw UsageError("g does not generate Z_p^* (order " + std::to_string(order) + ")");
    return;
  }
  bool complete = false;
  const auto factors = small_factorization(p - 1, std::uint64_t{1} << 22, complete);
  if (!complete) throw UsageError("cannot factor p-1 to certify the generator g");
  for (auto f : factors) {
    if (powmod(g, (p - 1) / f, p) == 1) throw UsageError("g does not generate Z_p^*");
  }
}

BlumMicaliGenerator::BlumMicaliGenerator(BmParams params) : params_(std::move(params)) {
  validate(params_);
  if (params_.p > kMaxBmModulus) {
    throw UsageError("Blum-Micali generation is limited to p <= 2^20 (discrete-log table)");
  }
  p_ = static_cast<std::uint64_t>(params_.p);
  g_ = static_cast<std::uint64_t>(params_.g);
  state_ = static_cast<std::uint64_t>(params_.x0);
  dlog_.assign(p_, 0);
  std::uint64_t x = 1;
  for (std::uint64_t e = 0; e + 1 < p_; ++e) {
    dlog_[x] = static_cast<std::uint32_t>(e);
    x = mulmod(x, g_, p_);
  }
}

void BlumMicaliGenerator::reseed(const BitString& seed) {
  state_ = static_cast<std::uint64_t>(to_bigint(seed) % params_.p);
}

bool BlumMicaliGenerator::predicate(std::uint64_t x) const {
  if (x == 0 || x >= p_) throw UsageError("Blum-Micali predicate is defined on Z_p^* only");
  return dlog_[x] <= (p_ - 1) / 2;
}

BitString BlumMicaliGenerator::generate(std::size_t count) {
  BitString out = BitString::zeros(count);
  for (std::size_t i = 0; i < count; ++i) {
    state_ = powmod(g_, state_, p_);
    if (predicate(state_)) out.set_bit(i, true);
  }
  return out;
}

BitString bm_generate(const BmParams& params, std::size_t count) {
  BlumMicaliGenerator gen(params);
  return gen.next_bits(count);
}

// ---------------------------------------------------------------------------

BbsParams make_bbs_params(const BigInt& p, const BigInt& q, const BigInt& s) {
  BbsParams params{p, q, p * q, s, 0};
  params.x0 = (s * s) % params.n;
  validate(params);
  return params;
}

void validate(const BbsParams& params) {
  if (params.p % 4 != 3 || params.q % 4 != 3) throw UsageError("BBS primes must be 3 mod 4");
  if (!is_probable_prime(params.p) || !is_probable_prime(params.q)) throw UsageError("BBS p and q must be prime");
  if (params.n != params.p * params.q) throw UsageError("BBS n must equal p*q");
  if (params.s < 1 || params.s >= params.n) throw UsageError("BBS seed must lie in {1..n-1}");
  if (boost::multiprecision::gcd(params.s, params.n) != 1) throw UsageError("BBS seed must be coprime to n");
  if (params.x0 != (params.s * params.s) % params.n) throw UsageError("BBS x0 must equal s^2 mod n");
}

BbsParams generate_bbs_params(unsigned bit_length, const BitString& entropy) {
  if (bit_length < 3) throw UsageError("BBS prime size must be at least 3 bits");
  TestGenerator rng(mix_seed(entropy, bit_length));
  const bool top_bit = bit_length >= 5;
  const BigInt upper = BigInt(1) << bit_length;

  auto draw_prime = [&]() {
    for (;;) {
      BigInt c = to_bigint(rng.next_bits(bit_length));
      if (top_bit) c |= BigInt(1) << (bit_length - 1);
      c |= 3;  // odd and 3 mod 4
      if (c >= upper || c < 3) continue;
      if (is_probable_prime(c)) return c;
    }
  };
  const BigInt p = draw_prime();
  BigInt q = draw_prime();
  while (q == p) q = draw_prime();
  const BigInt n = p * q;
  for (;;) {
    BigInt s = to_bigint(rng.next_bits(2 * bit_length)) % n;
    if (s >= 2 && boost::multiprecision::gcd(s, n) == 1) return make_bbs_params(p, q, s);
  }
}

BlumBlumShubGenerator::BlumBlumShubGenerator(BbsParams params) : params_(std::move(params)) {
  validate(params_);
  state_ = params_.x0;
}

void BlumBlumShubGenerator::reseed(const BitString& seed) {
  BigInt s = to_bigint(seed) % params_.n;
  while (s < 2 || boost::multiprecision::gcd(s, params_.n) != 1) s = (s + 1) % params_.n;
  params_.s = s;
  params_.x0 = (s * s) % params_.n;
  state_ = params_.x0;
}

BitString BlumBlumShubGenerator::generate(std::size_t count) {
  BitString out = BitString::zeros(count);
  for (std::size_t i = 0; i < count; ++i) {
    state_ = (state_ * state_) % params_.n;
    if (boost::multiprecision::bit_test(state_, 0)) out.set_bit(i, true);
  }
  return out;
}

BitString bbs_generate(const BbsParams& params, std::size_t count) {
  BlumBlumShubGenerator gen(params);
  return gen.next_bits(count);
}

// ---------------------------------------------------------------------------

std::string to_key_value(const BmParams& params) {
  std::ostringstream out;
  out << "p=" << params.p << "\ng=" << params.g << "\nx0=" << params.x0 << "\n";
  return out.str();
}

std::string to_key_value(const BbsParams& params) {
  std::ostringstream out;
  out << "p=" << params.p << "\nq=" << params.q << "\nn=" << params.n << "\ns=" << params.s
      << "\nx0=" << params.x0 << "\n";
  return out.str();
}

BmParams bm_params_from_key_value(std::string_view text) {
  const auto kv = parse_key_value(text);
  BmParams params{require(kv, "p"), require(kv, "g"), require(kv, "x0")};
  validate(params);
  return params;
}

BbsParams bbs_params_from_key_value(std::string_view text) {
  const auto kv = parse_key_value(text);
  BbsParams params = make_bbs_params(require(kv, "p"), require(kv, "q"), require(kv, "s"));
  if (kv.contains("n") && kv.at("n") != params.n) throw UsageError("BBS n does not match p*q");
  if (kv.contains("x0") && kv.at("x0") != params.x0) throw UsageError("BBS x0 does not match s^2 mod n");
  return params;
}

}  // namespace feistel_lab
