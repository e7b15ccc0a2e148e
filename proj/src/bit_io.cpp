#include "cylpc/bit_io.hpp"

#include <string>

#include "cylpc/error.hpp"

namespace cylpc {

void BitWriter::put_bit(bool bit) {
  if ((bits_ & 7u) == 0) bytes_.push_back(0);
  if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bits_ & 7u));
  ++bits_;
}

void BitWriter::put_bits(std::uint64_t value, int count) {
  for (int i = count - 1; i >= 0; --i) put_bit((value >> i) & 1u);
}

void BitWriter::put_ones(std::uint64_t count) {
  for (std::uint64_t i = 0; i < count; ++i) put_bit(true);
}

std::vector<std::uint8_t> BitWriter::finish() && { return std::move(bytes_); }

bool BitReader::get_bit() {
  if (pos_ >= bytes_.size() * 8) {
    fail(ErrorKind::CorruptStream, "bit stream truncated at bit offset " + std::to_string(pos_));
  }
  const bool bit = (bytes_[pos_ >> 3] >> (7 - (pos_ & 7u))) & 1u;
  ++pos_;
  return bit;
}

std::uint64_t BitReader::get_bits(int count) {
  std::uint64_t v = 0;
  for (int i = 0; i < count; ++i) v = (v << 1) | static_cast<std::uint64_t>(get_bit());
  return v;
}

std::uint64_t BitReader::get_unary(std::uint64_t limit) {
  std::uint64_t n = 0;
  while (n < limit && get_bit()) ++n;
  return n;
}

void BitReader::expect_end() const {
  const std::size_t total = bytes_.size() * 8;
  if (total - pos_ >= 8) {
    fail(ErrorKind::CorruptStream,
         "bit stream has trailing data after bit offset " + std::to_string(pos_));
  }
  for (std::size_t p = pos_; p < total; ++p) {
    if ((bytes_[p >> 3] >> (7 - (p & 7u))) & 1u) {
      fail(ErrorKind::CorruptStream, "bit stream has non-zero padding at bit offset " +
                                         std::to_string(p));
    }
  }
}

}  // namespace cylpc
