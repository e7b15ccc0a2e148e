#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cylpc {

// MSB-first bit packing; the final byte is zero-padded.
class BitWriter {
 public:
  void put_bit(bool bit);
  // Writes the low `count` bits of `value`, most significant first (count <= 64).
  void put_bits(std::uint64_t value, int count);
  void put_ones(std::uint64_t count);

  std::size_t bit_count() const noexcept { return bits_; }
  std::vector<std::uint8_t> finish() &&;

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bits_ = 0;
};

// Reading past the end throws CorruptStream with the bit offset.
class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool get_bit();
  std::uint64_t get_bits(int count);
  // Counts consecutive one bits up to `limit`, consuming the terminating zero if seen first.
  std::uint64_t get_unary(std::uint64_t limit);

  std::size_t position() const noexcept { return pos_; }
  std::size_t bits_left() const noexcept { return bytes_.size() * 8 - pos_; }
  // Fails unless only zero padding (< 8 bits) remains.
  void expect_end() const;

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace cylpc
