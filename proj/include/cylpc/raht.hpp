#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cylpc/octree.hpp"

namespace cylpc {

struct WeightedLeaf {
  std::uint64_t code = 0;  // Morton code at full depth
  double attribute = 0.0;
  std::uint32_t weight = 1;
};

/// One low-pass coefficient plus |leaves| - 1 high-pass coefficients.
///
/// Highs are ordered by merge step (deepest level first; axis0, axis1, axis2
/// within a level) and by ascending node index within a step. A decoder can
/// regenerate the order from geometry alone.
struct CoefficientStream {
  double dc = 0.0;
  std::vector<double> highs;

  std::size_t size() const noexcept { return highs.size() + 1; }
};

/// Forward transform. Leaves must be sorted by code with no duplicates.
/// Each merge is the orthonormal butterfly
///   low  = ( sqrt(w1) a1 + sqrt(w2) a2) / sqrt(w1 + w2)
///   high = (-sqrt(w2) a1 + sqrt(w1) a2) / sqrt(w1 + w2)
/// with merged weight w1 + w2; unpaired nodes pass through.
CoefficientStream raht_forward(std::span<const WeightedLeaf> leaves, int depth);

/// Inverse transform on the leaves of `geometry`. Missing leaf weights mean
/// unit weights.
std::vector<WeightedLeaf> raht_inverse(const CoefficientStream& coeffs, const Octree& geometry);
std::vector<WeightedLeaf> raht_inverse(const CoefficientStream& coeffs,
                                       std::span<const std::uint64_t> codes,
                                       std::span<const std::uint32_t> weights, int depth);

namespace detail {

struct Butterfly {
  double s1, s2, norm;

  Butterfly(double w1, double w2) : s1(std::sqrt(w1)), s2(std::sqrt(w2)), norm(std::sqrt(w1 + w2)) {}

  void forward(double a1, double a2, double& low, double& high) const {
    low = (s1 * a1 + s2 * a2) / norm;
    high = (-s2 * a1 + s1 * a2) / norm;
  }
  void inverse(double low, double high, double& a1, double& a2) const {
    a1 = (s1 * low - s2 * high) / norm;
    a2 = (s2 * low + s1 * high) / norm;
  }
};

}  // namespace detail

// Straight list-merging implementation kept as the reference for the planned,
// OpenMP-parallel transform above.
namespace serial {

CoefficientStream raht_forward(std::span<const WeightedLeaf> leaves, int depth);
std::vector<WeightedLeaf> raht_inverse(const CoefficientStream& coeffs,
                                       std::span<const std::uint64_t> codes,
                                       std::span<const std::uint32_t> weights, int depth);

}  // namespace serial

}  // namespace cylpc
