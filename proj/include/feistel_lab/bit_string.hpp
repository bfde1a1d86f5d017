#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace feistel_lab {

/// Fixed-width bit string. Position 0 is the leftmost, most significant bit;
/// this convention is shared by every block layout in the library.
///
/// Bits are packed MSB-first into 64-bit words and the unused tail of the
/// last word is always zero, so equality and hashing can work word-wise.
class BitString {
 public:
  BitString() = default;

  /// All-zero string of the given width.
  static BitString zeros(std::size_t width);
  static BitString ones(std::size_t width);

  /// Low `width` bits of `value`, most significant first. width <= 64.
  static BitString from_uint(std::uint64_t value, std::size_t width);

  /// Parses a literal such as "10110".
  static BitString from_binary(std::string_view digits);

  /// Parses the `width:hex` text form, e.g. "6:2D" for 101101. The hex digits
  /// encode the numeric value; digits beyond the width must be zero.
  static BitString parse(std::string_view text);

  std::size_t width() const { return width_; }
  bool empty() const { return width_ == 0; }

  bool bit(std::size_t pos) const;
  void set_bit(std::size_t pos, bool value);

  /// Numeric value; requires width <= 64.
  std::uint64_t to_uint() const;

  /// Big-endian byte image, left-padded to whole bytes.
  std::vector<std::uint8_t> to_bytes() const;

  std::string to_binary() const;

  /// `width:hex` form, upper-case digits, ceil(width/4) digits.
  std::string to_text() const;

  BitString slice(std::size_t pos, std::size_t len) const;
  BitString complement() const;
  std::size_t popcount() const;

  BitString& operator^=(const BitString& other);
  friend BitString operator^(BitString a, const BitString& b) { return a ^= b; }

  friend bool operator==(const BitString&, const BitString&) = default;

  std::size_t hash() const;

  const std::vector<std::uint64_t>& words() const { return words_; }

  friend BitString concat(const std::vector<BitString>& parts);

 private:
  explicit BitString(std::size_t width);

  std::size_t width_ = 0;
  std::vector<std::uint64_t> words_;
};

/// a || b with `a` occupying the leftmost positions.
BitString concat(const BitString& a, const BitString& b);
BitString concat(const std::vector<BitString>& parts);

/// Sub-block view of a flat state: `blocks[0]` is the leftmost block.
struct BlockState {
  std::size_t block_width = 0;
  std::vector<BitString> blocks;

  std::size_t count() const { return blocks.size(); }
  BitString flatten() const { return concat(blocks); }
  /// XOR of every block.
  BitString xor_sum() const;

  friend bool operator==(const BlockState&, const BlockState&) = default;
};

/// Cuts `s` into s.width()/n blocks of width n.
BlockState partition(const BitString& s, std::size_t n);

}  // namespace feistel_lab

template <>
struct std::hash<feistel_lab::BitString> {
  std::size_t operator()(const feistel_lab::BitString& s) const noexcept { return s.hash(); }
};
