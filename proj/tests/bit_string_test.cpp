#include <gtest/gtest.h>

#include <random>

#include "feistel_lab/bit_string.hpp"
#include "feistel_lab/error.hpp"

using namespace feistel_lab;

namespace {

BitString bits(const char* s) { return BitString::from_binary(s); }

}  // namespace

TEST(BitString, XorExamples) {
  EXPECT_EQ(bits("1010") ^ bits("0110"), bits("1100"));
  for (unsigned v = 0; v < 16; ++v) {
    const auto x = BitString::from_uint(v, 4);
    EXPECT_EQ(x ^ x, bits("0000"));
    EXPECT_EQ(x ^ bits("0000"), x);
  }
}

TEST(BitString, XorWidthMismatchThrows) {
  EXPECT_THROW(bits("101") ^ bits("1010"), UsageError);
}

TEST(BitString, ConcatExamples) {
  const auto c = concat(bits("10"), bits("011"));
  EXPECT_EQ(c, bits("10011"));
  EXPECT_EQ(c.width(), 5u);
  EXPECT_EQ(c.slice(0, 2), bits("10"));
  EXPECT_EQ(c.slice(2, 3), bits("011"));
  std::vector<BitString> blocks(4, bits("101"));
  EXPECT_EQ(concat(blocks).width(), 12u);
}

TEST(BitString, ConcatSplitRoundTripAcrossWordBoundaries) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t wa = rng() % 150;
    const std::size_t wb = rng() % 150;
    std::string sa;
    std::string sb;
    for (std::size_t i = 0; i < wa; ++i) sa.push_back(rng() & 1 ? '1' : '0');
    for (std::size_t i = 0; i < wb; ++i) sb.push_back(rng() & 1 ? '1' : '0');
    const auto c = concat(BitString::from_binary(sa), BitString::from_binary(sb));
    EXPECT_EQ(c.to_binary(), sa + sb);
    EXPECT_EQ(c.slice(0, wa).to_binary(), sa);
    EXPECT_EQ(c.slice(wa, wb).to_binary(), sb);
  }
}

TEST(BitString, PartitionExamples) {
  const auto p = partition(bits("110110"), 2);
  ASSERT_EQ(p.count(), 3u);
  EXPECT_EQ(p.blocks[0], bits("11"));
  EXPECT_EQ(p.blocks[1], bits("01"));
  EXPECT_EQ(p.blocks[2], bits("10"));
  const auto single = partition(bits("1111"), 4);
  ASSERT_EQ(single.count(), 1u);
  EXPECT_EQ(single.blocks[0], bits("1111"));
  EXPECT_THROW(partition(bits("101101"), 4), UsageError);
  EXPECT_THROW(partition(bits("1011"), 0), UsageError);
  EXPECT_EQ(p.flatten(), bits("110110"));
}

TEST(BitString, XorSum) {
  const auto p = partition(bits("000111"), 2);
  EXPECT_EQ(p.xor_sum(), bits("10"));
}

TEST(BitString, TextForm) {
  EXPECT_EQ(BitString::parse("6:2D"), bits("101101"));
  EXPECT_EQ(bits("101101").to_text(), "6:2D");
  EXPECT_EQ(BitString::parse("12:abc").to_text(), "12:ABC");
  EXPECT_EQ(BitString::parse("3:5"), bits("101"));
  EXPECT_THROW(BitString::parse("3:F"), UsageError);
  EXPECT_THROW(BitString::parse("8:G1"), UsageError);
  EXPECT_THROW(BitString::parse("nohex"), UsageError);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const std::size_t w = 1 + rng() % 200;
    std::string s;
    for (std::size_t j = 0; j < w; ++j) s.push_back(rng() & 1 ? '1' : '0');
    const auto b = BitString::from_binary(s);
    EXPECT_EQ(BitString::parse(b.to_text()), b);
  }
}

TEST(BitString, UintAndBytes) {
  const auto b = BitString::from_uint(0x2D, 6);
  EXPECT_EQ(b, bits("101101"));
  EXPECT_EQ(b.to_uint(), 0x2Du);
  EXPECT_EQ(b.to_bytes(), std::vector<std::uint8_t>{0x2D});
  EXPECT_EQ(BitString::from_uint(0x1234, 16).to_bytes(), (std::vector<std::uint8_t>{0x12, 0x34}));
  EXPECT_EQ(BitString::from_uint(~std::uint64_t{0}, 64), BitString::ones(64));
}

TEST(BitString, BitAccessComplementPopcount) {
  auto b = BitString::zeros(70);
  b.set_bit(0, true);
  b.set_bit(69, true);
  EXPECT_TRUE(b.bit(0));
  EXPECT_TRUE(b.bit(69));
  EXPECT_FALSE(b.bit(1));
  EXPECT_EQ(b.popcount(), 2u);
  EXPECT_EQ(b.complement().popcount(), 68u);
  EXPECT_EQ(b.complement().complement(), b);
}

TEST(BitString, EmptyWidth) {
  const auto e = BitString::zeros(0);
  EXPECT_TRUE(e.empty());
  EXPECT_EQ(concat(e, bits("1")), bits("1"));
  EXPECT_EQ(bits("101").slice(1, 0), e);
}

TEST(BitString, EqualityDistinguishesWidth) {
  EXPECT_NE(BitString::zeros(3), BitString::zeros(4));
  EXPECT_EQ(std::hash<BitString>{}(bits("1010")), std::hash<BitString>{}(bits("1010")));
}
