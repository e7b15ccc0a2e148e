#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cylpc/voxelizer.hpp"

namespace cylpc {

// Container layout, all multi-byte fields little-endian:
//
//   offset  size  field
//   0       6     magic "CYLPC1"
//   6       1     version (1)
//   7       1     coordinate system (0 cartesian, 1 cylindrical)
//   8       1     depth
//   9       1     log-radial flag (0 or 1)
//   10      8     r_min (f64)
//   18      48    bounds, 6 x f64: cartesian (origin x, y, z, W, 0, 0),
//                 cylindrical (R, H, h_min, 0, 0, 0)
//   66      8     point count N (u64)
//   74      8     qstep (f64)
//   82      4     geometry section length G (u32), then G occupancy bytes
//   86+G    4     attribute section length A (u32), then A RLGR bytes
//
// The RLGR symbol count is not stored: it equals the number of occupied
// voxels, which the decoder recovers from the geometry section.
inline constexpr std::array<char, 6> kBitstreamMagic{'C', 'Y', 'L', 'P', 'C', '1'};
inline constexpr std::uint8_t kBitstreamVersion = 1;
inline constexpr std::size_t kFixedHeaderBytes = 82;
inline constexpr std::size_t kSectionPrefixBytes = 4;
// Everything that is not section payload.
inline constexpr std::size_t kContainerOverheadBytes = kFixedHeaderBytes + 2 * kSectionPrefixBytes;

struct BitstreamHeader {
  CoordinateSystem system = CoordinateSystem::Cartesian;
  int depth = 1;
  bool log_radial = false;
  double r_min = kDefaultRMin;
  std::array<double, 6> bounds{};
  std::uint64_t point_count = 0;
  double qstep = 1.0;

  static BitstreamHeader describe(const VoxelGridConfig& cfg, std::uint64_t point_count,
                                  double qstep);
  // Rebuilds the grid exactly as the encoder used it.
  VoxelGridConfig config() const;
};

struct Bitstream {
  BitstreamHeader header;
  std::vector<std::uint8_t> geometry;
  std::vector<std::uint8_t> attributes;
};

std::vector<std::uint8_t> write_bitstream(const Bitstream& bs);
// Throws CorruptStream naming the section and byte offset of the problem.
Bitstream read_bitstream(std::span<const std::uint8_t> bytes);

}  // namespace cylpc
