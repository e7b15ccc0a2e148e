#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version (used by the
// library) and a plain serial version that stays as the reference the tests
// and benchmarks compare against.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cylpc/geometry.hpp"
#include "cylpc/voxelizer.hpp"

namespace cylpc::kernels {

// Uniform voxelization errors e_i ~ U[-half_width_i, half_width_i].
struct UniformErrorBox {
  std::array<double, 3> half_width{};

  ErrorModel model() const noexcept {
    return {half_width[0] * half_width[0] / 3.0, half_width[1] * half_width[1] / 3.0,
            half_width[2] * half_width[2] / 3.0};
  }
};

// Monte Carlo draws are split into fixed-size chunks, each with its own
// seeded generator, and chunk sums are added in chunk order; serial and
// parallel runs therefore return bit-identical results.
inline constexpr std::size_t kMonteCarloChunk = std::size_t{1} << 15;

namespace serial {

// Morton code per point; throws OutOfRange naming the first offending point.
std::vector<std::uint64_t> voxel_codes(std::span<const CartesianPoint> points,
                                       const VoxelGridConfig& cfg);

// O(N^2) exhaustive search.
std::vector<double> knn_mean_distance(std::span<const CartesianPoint> points, std::size_t k);

double mc_mean_error_cylindrical(double r, const UniformErrorBox& errors, std::size_t draws,
                                 std::uint64_t seed);
double mc_mean_error_cartesian(const UniformErrorBox& errors, std::size_t draws,
                               std::uint64_t seed);

}  // namespace serial

namespace parallel {

std::vector<std::uint64_t> voxel_codes(std::span<const CartesianPoint> points,
                                       const VoxelGridConfig& cfg);

// k-d tree search, one query per thread iteration.
std::vector<double> knn_mean_distance(std::span<const CartesianPoint> points, std::size_t k);

double mc_mean_error_cylindrical(double r, const UniformErrorBox& errors, std::size_t draws,
                                 std::uint64_t seed);
double mc_mean_error_cartesian(const UniformErrorBox& errors, std::size_t draws,
                               std::uint64_t seed);

}  // namespace parallel

}  // namespace cylpc::kernels
