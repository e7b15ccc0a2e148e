#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "cylpc/bitstream.hpp"
#include "cylpc/error.hpp"
#include "cylpc/ingest.hpp"
#include "cylpc/pipeline.hpp"
#include "test_support.hpp"

using namespace cylpc;

namespace {

const PointCloud& small_sweep() {
  static const PointCloud pc = [] {
    SweepSpec spec;
    spec.beams = 16;
    spec.azimuth_step = 0.5 * 0.017453292519943295;
    return synth_sweep(spec, 17);
  }();
  return pc;
}

std::vector<GridParams> grids() {
  return {{CoordinateSystem::Cartesian, 12, false, 1.0},
          {CoordinateSystem::Cylindrical, 10, false, 1.0},
          {CoordinateSystem::Cylindrical, 10, true, 1.5}};
}

std::string error_text(std::span<const std::uint8_t> bytes) {
  try {
    decode_frame(bytes);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CorruptStream);
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Pipeline, DefaultDepths) {
  EXPECT_EQ(default_depth(CoordinateSystem::Cartesian), 16);
  EXPECT_EQ(default_depth(CoordinateSystem::Cylindrical), 13);
}

TEST(Pipeline, DecodeReproducesGeometryAndBoundsAttributes) {
  const auto& pc = small_sweep();
  for (const auto& g : grids()) {
    const auto cfg = make_config(pc, g.system, g.depth, g.log_radial, g.r_min);
    const auto vc = voxelize(pc, cfg);
    const auto centers = devoxelize(vc);
    for (double q : {1.0, 7.0, 40.0}) {
      const auto enc = encode_frame(pc, g, q);
      EXPECT_EQ(enc.bytes.size(), enc.geometry_bytes + enc.attribute_bytes + kContainerOverheadBytes);
      const auto dec = decode_frame(enc.bytes);
      EXPECT_TRUE(dec.header.config() == cfg);
      ASSERT_EQ(dec.cloud.size(), centers.size());
      for (std::size_t i = 0; i < centers.size(); ++i) {
        ASSERT_EQ(dec.cloud.points()[i], centers.points()[i]);
      }
      double sq = 0.0;
      for (std::size_t i = 0; i < vc.voxels.size(); ++i) {
        const double d = dec.voxels.voxels[i].attribute - vc.voxels[i].attribute;
        sq += d * d;
      }
      EXPECT_LE(sq / static_cast<double>(vc.voxels.size()), q * q / 4);
    }
  }
}

TEST(Pipeline, BitrateAccounting) {
  const auto& pc = small_sweep();
  const auto enc = encode_frame(pc, grids()[1], 8.0);
  const double n = static_cast<double>(pc.size());
  EXPECT_DOUBLE_EQ(enc.geometry_bpp(), 8.0 * enc.geometry_bytes / n);
  EXPECT_DOUBLE_EQ(enc.attribute_bpp(), 8.0 * enc.attribute_bytes / n);
  EXPECT_DOUBLE_EQ(enc.total_bpp(), 8.0 * enc.bytes.size() / n);
  EXPECT_EQ(enc.point_count, pc.size());
}

TEST(Pipeline, NearLosslessAtUnitStep) {
  const auto& pc = small_sweep();
  for (const auto& g : grids()) {
    const auto frame = prepare_frame(pc, g);
    const auto ev = evaluate_prepared(pc, frame, point_to_voxel(pc, frame.voxels), 1.0);
    EXPECT_TRUE(ev.psnr.is_lossless() || ev.psnr.db() > 50.0) << ev.psnr.db();
  }
}

TEST(Pipeline, SweepIsMonotoneAndDeterministic) {
  const auto& pc = small_sweep();
  const std::vector<double> qsteps(kDefaultQsteps.begin(), kDefaultQsteps.end());
  for (const auto& g : grids()) {
    const auto a = rd_sweep(pc, g, qsteps);
    for (std::size_t i = 1; i < a.runs.size(); ++i) {
      EXPECT_GE(a.runs[i].attribute_bpp, a.runs[i - 1].attribute_bpp);
      EXPECT_GE(a.runs[i].psnr.db(), a.runs[i - 1].psnr.db());
    }
    std::stringstream sa, sb;
    write_rd_csv(sa, a.rate_points());
    write_rd_csv(sb, rd_sweep(pc, g, qsteps).rate_points());
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_NO_THROW(RdCurve::from_samples(read_rd_csv(sa)));
  }
}

TEST(Pipeline, CompareAgainstItselfIsZero) {
  const auto& pc = small_sweep();
  const std::vector<double> qsteps(kDefaultQsteps.begin(), kDefaultQsteps.end());
  const auto s = rd_sweep(pc, grids()[1], qsteps);
  const auto curve = RdCurve::from_samples(s.rate_points());
  const auto bd = bd_metrics(curve, curve);
  EXPECT_EQ(bd.delta_psnr_db, 0.0);
  EXPECT_EQ(bd.delta_rate_percent, 0.0);
}

TEST(Pipeline, RejectsBadQstep) {
  EXPECT_THROW(encode_frame(small_sweep(), grids()[0], 0.0), Error);
  const std::vector<double> q{8, 4, -1, 2};
  EXPECT_THROW(rd_sweep(small_sweep(), grids()[0], q), Error);
}

TEST(Bitstream, HeaderRoundTrip) {
  for (const auto& g : grids()) {
    const auto cfg = make_config(small_sweep(), g.system, g.depth, g.log_radial, g.r_min);
    const auto h = BitstreamHeader::describe(cfg, 1234, 6.5);
    const Bitstream bs{h, {1, 2, 3}, {4, 5}};
    const auto bytes = write_bitstream(bs);
    EXPECT_EQ(bytes.size(), kContainerOverheadBytes + 5);
    EXPECT_EQ(std::memcmp(bytes.data(), kBitstreamMagic.data(), kBitstreamMagic.size()), 0);
    const auto back = read_bitstream(bytes);
    EXPECT_TRUE(back.header.config() == cfg);
    EXPECT_EQ(back.header.point_count, 1234u);
    EXPECT_EQ(back.header.qstep, 6.5);
    EXPECT_EQ(back.geometry, bs.geometry);
    EXPECT_EQ(back.attributes, bs.attributes);
  }
}

TEST(Bitstream, CorruptContainers) {
  const auto enc = encode_frame(small_sweep(), grids()[1], 8.0);
  auto bad = enc.bytes;
  bad[0] = 'X';
  EXPECT_NE(error_text(bad).find("magic"), std::string::npos);
  bad = enc.bytes;
  bad[6] = 9;
  EXPECT_NE(error_text(bad).find("version"), std::string::npos);
  bad = enc.bytes;
  bad.pop_back();
  EXPECT_NE(error_text(bad).find("offset"), std::string::npos);
  bad = enc.bytes;
  bad.push_back(0);
  EXPECT_NE(error_text(bad).find("offset"), std::string::npos);
  EXPECT_FALSE(error_text(std::span<const std::uint8_t>(enc.bytes).first(10)).empty());
  EXPECT_FALSE(error_text({}).empty());
}

TEST(Bitstream, BitFlipFuzzNeverCrashes) {
  SweepSpec spec;
  spec.beams = 4;
  spec.azimuth_step = 2.0 * 0.017453292519943295;
  const auto pc = synth_sweep(spec, 3);
  std::mt19937_64 rng(81);
  for (const auto& g : grids()) {
    const auto enc = encode_frame(pc, g, 4.0);
    int rejected = 0;
    for (int t = 0; t < 1500; ++t) {
      auto bytes = enc.bytes;
      bytes[rng() % bytes.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
      try {
        const auto dec = decode_frame(bytes);
        for (double a : dec.cloud.attributes()) ASSERT_TRUE(a >= 0.0 && a <= 255.0);
      } catch (const Error& e) {
        ASSERT_EQ(e.kind(), ErrorKind::CorruptStream) << e.what();
        ++rejected;
      }
    }
    EXPECT_GT(rejected, 0);
  }
}
