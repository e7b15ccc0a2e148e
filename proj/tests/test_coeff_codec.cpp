#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "cylpc/bit_io.hpp"
#include "cylpc/coeff_codec.hpp"
#include "cylpc/error.hpp"

using namespace cylpc;

namespace {

std::vector<std::int64_t> random_vector(std::mt19937_64& rng) {
  const std::size_t n = rng() % 3000;
  std::vector<std::int64_t> v(n);
  switch (rng() % 6) {
    case 0: {  // sparse, long zero runs
      for (auto& x : v) x = (rng() % 50 == 0) ? static_cast<std::int64_t>(rng() % 21) - 10 : 0;
      break;
    }
    case 1: {  // heavy tail
      std::cauchy_distribution<double> c(0.0, 5.0);
      for (auto& x : v) x = static_cast<std::int64_t>(std::clamp(c(rng), -1e15, 1e15));
      break;
    }
    case 2: {  // alternating signs
      std::int64_t mag = 1;
      for (std::size_t i = 0; i < n; ++i) v[i] = (i % 2 ? -1 : 1) * (mag + static_cast<std::int64_t>(i % 7));
      break;
    }
    case 3: {  // extremes between zeros
      for (auto& x : v) {
        const auto r = rng() % 10;
        x = r == 0 ? std::numeric_limits<std::int64_t>::min()
            : r == 1 ? std::numeric_limits<std::int64_t>::max()
                     : 0;
      }
      break;
    }
    case 4: {  // small laplacian, like quantized highs
      std::exponential_distribution<double> e(0.7);
      for (auto& x : v) x = static_cast<std::int64_t>(e(rng)) * (rng() % 2 ? 1 : -1);
      break;
    }
    default: {  // bursts of large values after long runs of zeros
      for (std::size_t i = 0; i < n; ++i) v[i] = (i / 97) % 2 ? static_cast<std::int64_t>(rng() >> 20) : 0;
      break;
    }
  }
  return v;
}

}  // namespace

TEST(Quantize, Examples) {
  EXPECT_EQ(quantize({0.0, {}}, 3.7).dc_q, 0);
  EXPECT_EQ(quantize({7.4, {}}, 2.0).dc_q, 4);
  const auto q = quantize({-7.4, {1.0, -1.0, 2.5}}, 2.0);
  EXPECT_EQ(q.dc_q, -4);
  EXPECT_EQ(q.highs_q, (std::vector<std::int64_t>{1, -1, 1}));
  EXPECT_EQ(q.symbols(), (std::vector<std::int64_t>{-4, 1, -1, 1}));
}

TEST(Quantize, ErrorIsAtMostHalfStep) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(-5000, 5000);
  CoefficientStream c{u(rng), {}};
  for (int i = 0; i < 10000; ++i) c.highs.push_back(u(rng));
  for (double qstep : {0.3, 1.0, 8.0, 64.0}) {
    const auto d = dequantize(quantize(c, qstep));
    EXPECT_LE(std::abs(d.dc - c.dc), qstep / 2 + 1e-12);
    for (std::size_t i = 0; i < c.highs.size(); ++i) {
      ASSERT_LE(std::abs(d.highs[i] - c.highs[i]), qstep / 2 * (1 + 1e-12));
    }
  }
}

TEST(Quantize, InvalidStep) {
  for (double q : {0.0, -1.0, std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::quiet_NaN()}) {
    try {
      quantize({1.0, {}}, q);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
    }
  }
  EXPECT_THROW(quantize({1e300, {}}, 1.0), Error);
}

TEST(Dequantize, Zeros) {
  QuantizedStream q{4.0, 0, std::vector<std::int64_t>(10, 0)};
  const auto c = dequantize(q);
  EXPECT_EQ(c.dc, 0.0);
  for (double h : c.highs) EXPECT_EQ(h, 0.0);
}

TEST(BitIo, RoundTrip) {
  BitWriter w;
  w.put_bit(true);
  w.put_bits(0x2A, 6);
  w.put_ones(11);
  w.put_bit(false);
  w.put_bits(0xFFFFFFFFFFFFFFFFULL, 64);
  w.put_bits(0, 0);
  EXPECT_EQ(w.bit_count(), 83u);
  const auto bytes = std::move(w).finish();
  EXPECT_EQ(bytes.size(), 11u);
  BitReader r(bytes);
  EXPECT_TRUE(r.get_bit());
  EXPECT_EQ(r.get_bits(6), 0x2Au);
  EXPECT_EQ(r.get_unary(100), 11u);
  EXPECT_EQ(r.get_bits(64), 0xFFFFFFFFFFFFFFFFULL);
  EXPECT_EQ(r.position(), 83u);
  EXPECT_NO_THROW(r.expect_end());
  EXPECT_EQ(r.get_bits(5), 0u);
  EXPECT_THROW(r.get_bit(), Error);
}

TEST(BitIo, UnaryStopsAtLimit) {
  BitWriter w;
  w.put_ones(40);
  const auto bytes = std::move(w).finish();
  BitReader r(bytes);
  EXPECT_EQ(r.get_unary(32), 32u);
  EXPECT_EQ(r.position(), 32u);
}

TEST(BitIo, RejectsNonZeroPadding) {
  const std::vector<std::uint8_t> bytes{0x81};
  BitReader r(bytes);
  EXPECT_TRUE(r.get_bit());
  EXPECT_THROW(r.expect_end(), Error);
}

TEST(Rlgr, Empty) {
  const auto p = rlgr_encode({});
  EXPECT_TRUE(p.bytes.empty());
  EXPECT_EQ(p.count, 0u);
  EXPECT_TRUE(rlgr_decode(p).empty());
}

TEST(Rlgr, ZigzagOrder) {
  EXPECT_EQ(rlgr::zigzag(0), 0u);
  EXPECT_EQ(rlgr::zigzag(-1), 1u);
  EXPECT_EQ(rlgr::zigzag(1), 2u);
  EXPECT_EQ(rlgr::zigzag(-2), 3u);
  EXPECT_EQ(rlgr::zigzag(std::numeric_limits<std::int64_t>::max()),
            std::numeric_limits<std::uint64_t>::max() - 1);
  EXPECT_EQ(rlgr::zigzag(std::numeric_limits<std::int64_t>::min()),
            std::numeric_limits<std::uint64_t>::max());
}

TEST(Rlgr, AllZeros) {
  for (std::size_t n : {1u, 2u, 7u, 1000u, 65537u}) {
    const std::vector<std::int64_t> zeros(n, 0);
    const auto p = rlgr_encode(zeros);
    EXPECT_EQ(rlgr_decode(p), zeros);
  }
}

TEST(Rlgr, ZerosCompressBetterThanNoise) {
  std::mt19937_64 rng(52);
  std::uniform_int_distribution<std::int64_t> u(-100, 100);
  std::vector<std::int64_t> noise(1000);
  for (auto& x : noise) x = u(rng);
  const auto z = rlgr_encode(std::vector<std::int64_t>(1000, 0));
  const auto n = rlgr_encode(noise);
  EXPECT_LT(z.bytes.size(), n.bytes.size());
  EXPECT_LT(z.bytes.size(), 20u);
}

TEST(Rlgr, RandomRoundTrip) {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 10000; ++t) {
    const auto v = random_vector(rng);
    const auto p = rlgr_encode(v);
    ASSERT_EQ(p.count, v.size());
    ASSERT_EQ(rlgr_decode(p), v) << "case " << t;
  }
}

TEST(Rlgr, Deterministic) {
  std::mt19937_64 rng(54);
  const auto v = random_vector(rng);
  EXPECT_EQ(rlgr_encode(v).bytes, rlgr_encode(v).bytes);
}

TEST(Rlgr, TruncationDetected) {
  std::mt19937_64 rng(55);
  for (int t = 0; t < 2000; ++t) {
    const auto v = random_vector(rng);
    auto p = rlgr_encode(v);
    if (p.bytes.empty()) continue;
    p.bytes.pop_back();
    try {
      rlgr_decode(p);
      FAIL() << "truncated payload accepted, case " << t;
    } catch (const Error& e) {
      ASSERT_EQ(e.kind(), ErrorKind::CorruptStream);
      ASSERT_NE(std::string(e.what()).find("bit offset"), std::string::npos) << e.what();
    }
  }
}

TEST(Rlgr, ExtraBytesDetected) {
  const std::vector<std::int64_t> v{1, 0, 0, -3, 12};
  auto p = rlgr_encode(v);
  p.bytes.push_back(0);
  EXPECT_THROW(rlgr_decode(p), Error);
}

TEST(Rlgr, BitFlipsNeverCrash) {
  std::mt19937_64 rng(56);
  for (int t = 0; t < 3000; ++t) {
    auto v = random_vector(rng);
    if (v.empty()) v.push_back(5);
    auto p = rlgr_encode(v);
    p.bytes[rng() % p.bytes.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
    try {
      const auto d = rlgr_decode(p);
      ASSERT_EQ(d.size(), v.size());
    } catch (const Error& e) {
      ASSERT_EQ(e.kind(), ErrorKind::CorruptStream);
    }
  }
}
