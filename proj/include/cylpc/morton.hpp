#pragma once

#include <cstdint>

namespace cylpc::morton {

// Interleaved index with axis0 in bit 0, axis1 in bit 1 and axis2 in bit 2 of
// every 3-bit group, so (code & 7) is the child slot 4*a2 + 2*a1 + a0.
inline constexpr int kMaxDepth = 21;

constexpr std::uint64_t spread(std::uint32_t v) noexcept {
  std::uint64_t x = v & 0x1fffffu;
  x = (x | (x << 32)) & 0x1f00000000ffffULL;
  x = (x | (x << 16)) & 0x1f0000ff0000ffULL;
  x = (x | (x << 8)) & 0x100f00f00f00f00fULL;
  x = (x | (x << 4)) & 0x10c30c30c30c30c3ULL;
  x = (x | (x << 2)) & 0x1249249249249249ULL;
  return x;
}

constexpr std::uint32_t compact(std::uint64_t x) noexcept {
  x &= 0x1249249249249249ULL;
  x = (x ^ (x >> 2)) & 0x10c30c30c30c30c3ULL;
  x = (x ^ (x >> 4)) & 0x100f00f00f00f00fULL;
  x = (x ^ (x >> 8)) & 0x1f0000ff0000ffULL;
  x = (x ^ (x >> 16)) & 0x1f00000000ffffULL;
  x = (x ^ (x >> 32)) & 0x1fffffULL;
  return static_cast<std::uint32_t>(x);
}

constexpr std::uint64_t encode(std::uint32_t a0, std::uint32_t a1, std::uint32_t a2) noexcept {
  return spread(a0) | (spread(a1) << 1) | (spread(a2) << 2);
}

constexpr std::uint32_t axis(std::uint64_t code, int a) noexcept { return compact(code >> a); }

static_assert(encode(1, 0, 0) == 1 && encode(0, 1, 0) == 2 && encode(0, 0, 1) == 4);
static_assert(encode(2, 0, 0) == 8);
static_assert(axis(encode(5, 9, 1u << 20), 2) == (1u << 20));

}  // namespace cylpc::morton
