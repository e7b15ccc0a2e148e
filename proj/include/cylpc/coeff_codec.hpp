#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cylpc/raht.hpp"

namespace cylpc {

struct QuantizedStream {
  double qstep = 1.0;
  std::int64_t dc_q = 0;
  std::vector<std::int64_t> highs_q;

  // dc first, then the highs: the order they are entropy coded in.
  std::vector<std::int64_t> symbols() const;
  static QuantizedStream from_symbols(std::span<const std::int64_t> symbols, double qstep);
};

/// Uniform scalar quantizer, round half away from zero.
QuantizedStream quantize(const CoefficientStream& coeffs, double qstep);
CoefficientStream dequantize(const QuantizedStream& qs);

struct RlgrPayload {
  std::vector<std::uint8_t> bytes;
  std::size_t count = 0;
};

// Adaptive run-length / Golomb-Rice coder constants. Both adaptive parameters
// are tracked at 4x resolution (k = kp >> 2, kr = krp >> 2) so they move in
// fractional steps. All values are part of the bitstream definition.
namespace rlgr {

inline constexpr int kScaleShift = 2;
inline constexpr unsigned kUpNoRun = 3;    // k == 0 and a zero was coded
inline constexpr unsigned kDownNoRun = 1;  // k == 0 and a non-zero was coded
inline constexpr unsigned kUpRun = 2;      // a complete run of 2^k zeros
inline constexpr unsigned kDownRun = 1;    // a run cut short by a non-zero
inline constexpr unsigned kInitialKp = 0;
inline constexpr unsigned kInitialKrp = 2u << kScaleShift;
inline constexpr unsigned kMaxK = 20;
inline constexpr unsigned kMaxKr = 58;
// Unary prefixes of this length switch to an explicit-width escape code.
inline constexpr std::uint64_t kEscapeQuotient = 32;

constexpr std::uint64_t zigzag(std::int64_t v) noexcept {
  return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}
constexpr std::int64_t unzigzag(std::uint64_t u) noexcept {
  return static_cast<std::int64_t>((u >> 1) ^ (~(u & 1) + 1));
}

static_assert(zigzag(0) == 0 && zigzag(-1) == 1 && zigzag(1) == 2 && zigzag(-2) == 3);
static_assert(unzigzag(zigzag(INT64_MIN)) == INT64_MIN);

}  // namespace rlgr

RlgrPayload rlgr_encode(std::span<const std::int64_t> values);
std::vector<std::int64_t> rlgr_decode(const RlgrPayload& payload);

}  // namespace cylpc
