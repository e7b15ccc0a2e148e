#include <gtest/gtest.h>

#include <random>

#include "cylpc/error.hpp"
#include "cylpc/kernels.hpp"
#include "cylpc/ingest.hpp"
#include "test_support.hpp"

using namespace cylpc;
namespace k = cylpc::kernels;

TEST(Kernels, VoxelCodesAgree) {
  std::mt19937_64 rng(21);
  const auto pc = fixtures::random_cloud(rng, 20000);
  for (auto system : {CoordinateSystem::Cartesian, CoordinateSystem::Cylindrical}) {
    const auto cfg = make_config(pc, system, 12, system == CoordinateSystem::Cylindrical, 0.5);
    EXPECT_EQ(k::serial::voxel_codes(pc.points(), cfg), k::parallel::voxel_codes(pc.points(), cfg));
  }
}

TEST(Kernels, VoxelCodesReportFirstBadPoint) {
  const auto cfg = VoxelGridConfig::cartesian({{0, 0, 0}, 1.0}, 3);
  std::vector<CartesianPoint> pts(5000, {0.5, 0.5, 0.5});
  pts[4000] = {5, 0, 0};
  pts[1234] = {0, -1, 0};
  for (auto* fn : {&k::serial::voxel_codes, &k::parallel::voxel_codes}) {
    try {
      fn(pts, cfg);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::OutOfRange);
      EXPECT_EQ(std::string(e.what()).rfind("point 1234 ", 0), 0u) << e.what();
    }
  }
}

TEST(Kernels, KnnTreeMatchesBruteForce) {
  std::mt19937_64 rng(22);
  SweepSpec spec;
  spec.beams = 8;
  spec.azimuth_step = 1.0 * 0.017453292519943295;
  const auto sweep = synth_sweep(spec, 3);
  const auto uniform = fixtures::random_cloud(rng, 3000);
  for (const auto* pc : {&sweep, &uniform}) {
    for (std::size_t kk : {1u, 5u, 12u}) {
      const auto a = k::serial::knn_mean_distance(pc->points(), kk);
      const auto b = k::parallel::knn_mean_distance(pc->points(), kk);
      ASSERT_EQ(a.size(), b.size());
      for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-12 * (1 + a[i]));
    }
  }
}

TEST(Kernels, KnnDuplicatesGiveZero) {
  const std::vector<CartesianPoint> pts(10, {1, 2, 3});
  for (double d : k::parallel::knn_mean_distance(pts, 3)) EXPECT_EQ(d, 0.0);
}

TEST(Kernels, MonteCarloBitIdentical) {
  const k::UniformErrorBox box{{0.05, 0.004, 0.05}};
  for (std::size_t draws : {std::size_t{1}, std::size_t{1000}, k::kMonteCarloChunk * 3 + 17}) {
    EXPECT_EQ(k::serial::mc_mean_error_cylindrical(7.0, box, draws, 99),
              k::parallel::mc_mean_error_cylindrical(7.0, box, draws, 99));
    EXPECT_EQ(k::serial::mc_mean_error_cartesian(box, draws, 99),
              k::parallel::mc_mean_error_cartesian(box, draws, 99));
  }
}

TEST(Kernels, MonteCarloSeedMatters) {
  const k::UniformErrorBox box{{0.05, 0.004, 0.05}};
  EXPECT_NE(k::parallel::mc_mean_error_cartesian(box, 5000, 1),
            k::parallel::mc_mean_error_cartesian(box, 5000, 2));
}

TEST(Kernels, MonteCarloCartesianMatchesVariance) {
  const k::UniformErrorBox box{{0.1, 0.2, 0.3}};
  const double expect = expected_error_cartesian(box.model());
  EXPECT_NEAR(k::parallel::mc_mean_error_cartesian(box, 400000, 5), expect, 0.01 * expect);
}

TEST(Kernels, MonteCarloRejectsBadInput) {
  const k::UniformErrorBox box{{0.1, 0.1, 0.1}};
  EXPECT_THROW(k::parallel::mc_mean_error_cylindrical(-1.0, box, 10, 1), Error);
  EXPECT_THROW(k::parallel::mc_mean_error_cartesian(box, 0, 1), Error);
  EXPECT_THROW(k::serial::mc_mean_error_cartesian({{-1, 0, 0}}, 10, 1), Error);
}
