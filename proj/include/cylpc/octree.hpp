#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cylpc/voxelizer.hpp"

namespace cylpc {

/// Occupancy octree over Morton codes.
///
/// levels[l] holds the occupied nodes at resolution l (codes with 3*l bits),
/// sorted ascending; levels[0] is the root {0} and levels[depth] are the
/// occupied voxels. Leaf payloads are aligned with levels[depth] and may be
/// empty for geometry-only trees (e.g. straight out of deserialize).
struct Octree {
  int depth = 0;
  std::vector<std::vector<std::uint64_t>> levels;
  std::vector<double> leaf_attributes;
  std::vector<std::uint32_t> leaf_weights;

  std::span<const std::uint64_t> leaves() const noexcept { return levels.back(); }
  std::size_t internal_node_count() const noexcept;
};

Octree build_octree(const VoxelizedCloud& vc);
// Geometry only; `leaf_codes` must be sorted and unique.
Octree build_octree(std::span<const std::uint64_t> leaf_codes, int depth);

/// Breadth-first occupancy bytes, one per occupied internal node. Bit
/// (4*c2 + 2*c1 + c0) of a node's byte is set iff child (c0, c1, c2) is
/// occupied; nodes within a level are visited in ascending Morton order.
struct OccupancyStream {
  std::vector<std::uint8_t> bytes;
};

OccupancyStream serialize(const Octree& tree);
Octree deserialize(std::span<const std::uint8_t> bytes, int depth);

double geometry_bpp(const OccupancyStream& stream, std::size_t point_count);

}  // namespace cylpc
