#include "cylpc/coeff_codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "cylpc/bit_io.hpp"
#include "cylpc/error.hpp"

namespace cylpc {

std::vector<std::int64_t> QuantizedStream::symbols() const {
  std::vector<std::int64_t> out;
  out.reserve(highs_q.size() + 1);
  out.push_back(dc_q);
  out.insert(out.end(), highs_q.begin(), highs_q.end());
  return out;
}

QuantizedStream QuantizedStream::from_symbols(std::span<const std::int64_t> symbols,
                                              double qstep) {
  if (symbols.empty()) fail(ErrorKind::InvalidInput, "quantized stream needs a dc symbol");
  return {qstep, symbols.front(), {symbols.begin() + 1, symbols.end()}};
}

namespace {

void check_qstep(double qstep) {
  if (!(qstep > 0.0) || !std::isfinite(qstep)) {
    fail(ErrorKind::InvalidConfig, "qstep must be finite and > 0, got " + std::to_string(qstep));
  }
}

std::int64_t quantize_one(double c, double qstep) {
  const double t = c / qstep;
  if (!(std::abs(t) < 0x1p62)) {
    fail(ErrorKind::InvalidInput, "coefficient " + std::to_string(c) +
                                      " does not fit the integer range at qstep " +
                                      std::to_string(qstep));
  }
  return static_cast<std::int64_t>(std::round(t));
}

}  // namespace

QuantizedStream quantize(const CoefficientStream& coeffs, double qstep) {
  check_qstep(qstep);
  QuantizedStream qs;
  qs.qstep = qstep;
  qs.dc_q = quantize_one(coeffs.dc, qstep);
  qs.highs_q.reserve(coeffs.highs.size());
  for (double c : coeffs.highs) qs.highs_q.push_back(quantize_one(c, qstep));
  return qs;
}

CoefficientStream dequantize(const QuantizedStream& qs) {
  CoefficientStream c;
  c.dc = static_cast<double>(qs.dc_q) * qs.qstep;
  c.highs.reserve(qs.highs_q.size());
  for (std::int64_t q : qs.highs_q) c.highs.push_back(static_cast<double>(q) * qs.qstep);
  return c;
}

namespace {

using namespace rlgr;

// Backward-adaptive state shared by encoder and decoder.
struct AdaptiveState {
  unsigned kp = kInitialKp;
  unsigned krp = kInitialKrp;

  unsigned k() const { return kp >> kScaleShift; }
  unsigned kr() const { return krp >> kScaleShift; }

  void adapt_rice(std::uint64_t quotient) {
    constexpr unsigned kMaxKrp = (kMaxKr << kScaleShift) | ((1u << kScaleShift) - 1);
    if (quotient == 0) {
      krp = krp >= 2 ? krp - 2 : 0;
    } else if (quotient > 1) {
      krp = quotient >= kMaxKrp ? kMaxKrp : std::min<unsigned>(krp + unsigned(quotient) + 1, kMaxKrp);
    }
  }
  void up(unsigned step) {
    constexpr unsigned kMaxKp = (kMaxK << kScaleShift) | ((1u << kScaleShift) - 1);
    kp = std::min(kp + step, kMaxKp);
  }
  void down(unsigned step) { kp = kp >= step ? kp - step : 0; }
};

void put_rice(BitWriter& out, std::uint64_t u, AdaptiveState& st) {
  const unsigned kr = st.kr();
  const std::uint64_t quotient = u >> kr;
  if (quotient < kEscapeQuotient) {
    out.put_ones(quotient);
    out.put_bit(false);
    out.put_bits(u, static_cast<int>(kr));
  } else {
    out.put_ones(kEscapeQuotient);
    const int width = std::bit_width(u);
    out.put_bits(static_cast<std::uint64_t>(width), 7);
    out.put_bits(u, width);
  }
  st.adapt_rice(quotient);
}

std::uint64_t get_rice(BitReader& in, AdaptiveState& st) {
  const unsigned kr = st.kr();
  const std::uint64_t quotient = in.get_unary(kEscapeQuotient);
  std::uint64_t u = 0;
  if (quotient < kEscapeQuotient) {
    u = (quotient << kr) | in.get_bits(static_cast<int>(kr));
  } else {
    const auto width = in.get_bits(7);
    if (width > 64) {
      fail(ErrorKind::CorruptStream,
           "rlgr escape width " + std::to_string(width) + " at bit offset " +
               std::to_string(in.position() - 7));
    }
    u = in.get_bits(static_cast<int>(width));
  }
  st.adapt_rice(u >> kr);
  return u;
}

}  // namespace

RlgrPayload rlgr_encode(std::span<const std::int64_t> values) {
  BitWriter out;
  AdaptiveState st;
  std::uint64_t run = 0;
  for (std::int64_t v : values) {
    const std::uint64_t u = zigzag(v);
    const unsigned k = st.k();
    if (k == 0) {
      put_rice(out, u, st);
      if (u == 0) {
        st.up(kUpNoRun);
      } else {
        st.down(kDownNoRun);
      }
      continue;
    }
    if (u == 0) {
      if (++run == (std::uint64_t{1} << k)) {
        out.put_bit(false);
        run = 0;
        st.up(kUpRun);
      }
      continue;
    }
    out.put_bit(true);
    out.put_bits(run, static_cast<int>(k));
    put_rice(out, u - 1, st);
    run = 0;
    st.down(kDownRun);
  }
  // A pending partial run is sent as a complete one; the decoder stops at count.
  if (run > 0) out.put_bit(false);
  return {std::move(out).finish(), values.size()};
}

std::vector<std::int64_t> rlgr_decode(const RlgrPayload& payload) {
  BitReader in(payload.bytes);
  AdaptiveState st;
  std::vector<std::int64_t> out;
  out.reserve(payload.count);
  while (out.size() < payload.count) {
    const unsigned k = st.k();
    if (k == 0) {
      const std::uint64_t u = get_rice(in, st);
      out.push_back(unzigzag(u));
      if (u == 0) {
        st.up(kUpNoRun);
      } else {
        st.down(kDownNoRun);
      }
      continue;
    }
    const std::size_t remaining = payload.count - out.size();
    if (!in.get_bit()) {
      const std::uint64_t run = std::min<std::uint64_t>(std::uint64_t{1} << k, remaining);
      out.insert(out.end(), run, 0);
      st.up(kUpRun);
      continue;
    }
    const std::size_t at = in.position();
    const std::uint64_t run = in.get_bits(static_cast<int>(k));
    if (run + 1 > remaining) {
      fail(ErrorKind::CorruptStream, "rlgr run of " + std::to_string(run) +
                                         " overflows the symbol count at bit offset " +
                                         std::to_string(at));
    }
    out.insert(out.end(), run, 0);
    const std::uint64_t u = get_rice(in, st);
    if (u == ~std::uint64_t{0}) {
      fail(ErrorKind::CorruptStream, "rlgr value overflow at bit offset " + std::to_string(at));
    }
    out.push_back(unzigzag(u + 1));
    st.down(kDownRun);
  }
  in.expect_end();
  return out;
}

}  // namespace cylpc
