#include "feistel_lab/bit_string.hpp"

#include <bit>
#include <cctype>

#include "feistel_lab/error.hpp"

namespace feistel_lab {

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t word_count(std::size_t width) { return (width + kWordBits - 1) / kWordBits; }

std::uint64_t mask_of(std::size_t pos) { return std::uint64_t{1} << (kWordBits - 1 - pos % kWordBits); }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

BitString::BitString(std::size_t width) : width_(width), words_(word_count(width), 0) {}

BitString BitString::zeros(std::size_t width) { return BitString(width); }

BitString BitString::ones(std::size_t width) { return BitString(width).complement(); }

BitString BitString::from_uint(std::uint64_t value, std::size_t width) {
  if (width > kWordBits) throw UsageError("from_uint: width exceeds 64 bits");
  BitString s(width);
  if (width == 0) return s;
  if (width < kWordBits) value &= (std::uint64_t{1} << width) - 1;
  s.words_[0] = value << (kWordBits - width);
  return s;
}

BitString BitString::from_binary(std::string_view digits) {
  BitString s(digits.size());
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] == '1') {
      s.set_bit(i, true);
    } else if (digits[i] != '0') {
      throw UsageError("from_binary: invalid digit in '" + std::string(digits) + "'");
    }
  }
  return s;
}

BitString BitString::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw UsageError("expected width:hex, got '" + std::string(text) + "'");
  }
  std::size_t width = 0;
  for (char c : text.substr(0, colon)) {
    if (c < '0' || c > '9') throw UsageError("invalid width in '" + std::string(text) + "'");
    width = width * 10 + static_cast<std::size_t>(c - '0');
  }
  std::string_view hex = text.substr(colon + 1);
  if (hex.size() != (width + 3) / 4) {
    throw UsageError("'" + std::string(text) + "' needs exactly " + std::to_string((width + 3) / 4) +
                     " hex digits");
  }
  // The textual value is right-aligned: the first digit may carry padding bits.
  const std::size_t pad = hex.size() * 4 - width;
  BitString s(width);
  for (std::size_t d = 0; d < hex.size(); ++d) {
    const int v = hex_value(hex[d]);
    if (v < 0) throw UsageError("invalid hex digit in '" + std::string(text) + "'");
    for (std::size_t b = 0; b < 4; ++b) {
      const bool on = (v >> (3 - b)) & 1;
      const std::size_t raw = d * 4 + b;
      if (raw < pad) {
        if (on) throw UsageError("value in '" + std::string(text) + "' exceeds its width");
        continue;
      }
      if (on) s.set_bit(raw - pad, true);
    }
  }
  return s;
}

bool BitString::bit(std::size_t pos) const { return (words_[pos / kWordBits] & mask_of(pos)) != 0; }

void BitString::set_bit(std::size_t pos, bool value) {
  if (pos >= width_) throw UsageError("set_bit: position out of range");
  if (value) {
    words_[pos / kWordBits] |= mask_of(pos);
  } else {
    words_[pos / kWordBits] &= ~mask_of(pos);
  }
}

std::uint64_t BitString::to_uint() const {
  if (width_ > kWordBits) throw UsageError("to_uint: width exceeds 64 bits");
  if (width_ == 0) return 0;
  return words_[0] >> (kWordBits - width_);
}

std::vector<std::uint8_t> BitString::to_bytes() const {
  const std::size_t nbytes = (width_ + 7) / 8;
  const std::size_t pad = nbytes * 8 - width_;
  std::vector<std::uint8_t> out(nbytes, 0);
  for (std::size_t i = 0; i < width_; ++i) {
    if (bit(i)) {
      const std::size_t raw = i + pad;
      out[raw / 8] |= static_cast<std::uint8_t>(0x80u >> (raw % 8));
    }
  }
  return out;
}

std::string BitString::to_binary() const {
  std::string out(width_, '0');
  for (std::size_t i = 0; i < width_; ++i) {
    if (bit(i)) out[i] = '1';
  }
  return out;
}

std::string BitString::to_text() const {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  const std::size_t ndigits = (width_ + 3) / 4;
  const std::size_t pad = ndigits * 4 - width_;
  std::vector<int> values(ndigits, 0);
  for (std::size_t i = 0; i < width_; ++i) {
    if (!bit(i)) continue;
    const std::size_t raw = i + pad;
    values[raw / 4] |= 1 << (3 - raw % 4);
  }
  std::string out = std::to_string(width_) + ":";
  for (int v : values) out.push_back(kDigits[v]);
  return out;
}

BitString BitString::slice(std::size_t pos, std::size_t len) const {
  if (pos + len > width_) throw UsageError("slice: range exceeds width");
  BitString out(len);
  if (pos % kWordBits == 0) {
    for (std::size_t w = 0; w < out.words_.size(); ++w) out.words_[w] = words_[pos / kWordBits + w];
  } else {
    const std::size_t shift = pos % kWordBits;
    for (std::size_t w = 0; w < out.words_.size(); ++w) {
      const std::size_t src = pos / kWordBits + w;
      std::uint64_t v = words_[src] << shift;
      if (src + 1 < words_.size()) v |= words_[src + 1] >> (kWordBits - shift);
      out.words_[w] = v;
    }
  }
  if (len % kWordBits != 0 && !out.words_.empty()) {
    out.words_.back() &= ~std::uint64_t{0} << (kWordBits - len % kWordBits);
  }
  return out;
}

BitString BitString::complement() const {
  BitString out = *this;
  for (auto& w : out.words_) w = ~w;
  if (width_ % kWordBits != 0 && !out.words_.empty()) {
    out.words_.back() &= ~std::uint64_t{0} << (kWordBits - width_ % kWordBits);
  }
  return out;
}

std::size_t BitString::popcount() const {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

BitString& BitString::operator^=(const BitString& other) {
  if (other.width_ != width_) {
    throw UsageError("xor: width mismatch (" + std::to_string(width_) + " vs " +
                     std::to_string(other.width_) + ")");
  }
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

std::size_t BitString::hash() const {
  std::uint64_t h = 0x9E3779B97F4A7C15ull ^ width_;
  for (auto w : words_) {
    h ^= w + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

BitString concat(const BitString& a, const BitString& b) { return concat(std::vector<BitString>{a, b}); }

BitString concat(const std::vector<BitString>& parts) {
  std::size_t width = 0;
  for (const auto& p : parts) width += p.width();
  BitString out(width);
  std::size_t pos = 0;
  for (const auto& p : parts) {
    const std::size_t shift = pos % kWordBits;
    for (std::size_t w = 0; w < p.words_.size(); ++w) {
      const std::size_t dst = pos / kWordBits + w;
      out.words_[dst] |= p.words_[w] >> shift;
      if (shift != 0 && dst + 1 < out.words_.size()) out.words_[dst + 1] |= p.words_[w] << (kWordBits - shift);
    }
    pos += p.width();
  }
  return out;
}

BitString BlockState::xor_sum() const {
  BitString acc = BitString::zeros(block_width);
  for (const auto& b : blocks) acc ^= b;
  return acc;
}

BlockState partition(const BitString& s, std::size_t n) {
  if (n == 0 || s.width() % n != 0) {
    throw UsageError("partition: width " + std::to_string(s.width()) + " is not divisible by " +
                     std::to_string(n));
  }
  BlockState state{n, {}};
  state.blocks.reserve(s.width() / n);
  for (std::size_t pos = 0; pos < s.width(); pos += n) state.blocks.push_back(s.slice(pos, n));
  return state;
}

}  // namespace feistel_lab
