#include "cylpc/octree.hpp"

#include <algorithm>
#include <string>

#include "cylpc/error.hpp"

namespace cylpc {

std::size_t Octree::internal_node_count() const noexcept {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < levels.size(); ++l) n += levels[l].size();
  return n;
}

Octree build_octree(std::span<const std::uint64_t> leaf_codes, int depth) {
  if (depth < 1 || depth > morton::kMaxDepth) {
    fail(ErrorKind::InvalidInput, "build_octree: depth out of range: " + std::to_string(depth));
  }
  if (leaf_codes.empty()) fail(ErrorKind::InvalidInput, "build_octree: no voxels");
  const std::uint64_t limit = std::uint64_t{1} << (3 * depth);
  for (std::size_t i = 0; i < leaf_codes.size(); ++i) {
    if (leaf_codes[i] >= limit) {
      fail(ErrorKind::InvalidInput,
           "build_octree: voxel " + std::to_string(i) + " index exceeds 2^depth per axis");
    }
    if (i > 0 && leaf_codes[i] <= leaf_codes[i - 1]) {
      fail(ErrorKind::InvalidInput, "build_octree: voxel codes must be strictly ascending");
    }
  }
  Octree tree;
  tree.depth = depth;
  tree.levels.resize(static_cast<std::size_t>(depth) + 1);
  tree.levels[static_cast<std::size_t>(depth)].assign(leaf_codes.begin(), leaf_codes.end());
  for (int l = depth - 1; l >= 0; --l) {
    const auto& child = tree.levels[static_cast<std::size_t>(l) + 1];
    auto& parent = tree.levels[static_cast<std::size_t>(l)];
    for (std::uint64_t c : child) {
      const std::uint64_t p = c >> 3;
      if (parent.empty() || parent.back() != p) parent.push_back(p);
    }
  }
  return tree;
}

Octree build_octree(const VoxelizedCloud& vc) {
  std::vector<std::uint64_t> codes;
  codes.reserve(vc.voxels.size());
  for (const auto& v : vc.voxels) codes.push_back(v.code);
  Octree tree = build_octree(codes, vc.config.depth());
  tree.leaf_attributes.reserve(vc.voxels.size());
  tree.leaf_weights.reserve(vc.voxels.size());
  for (const auto& v : vc.voxels) {
    tree.leaf_attributes.push_back(v.attribute);
    tree.leaf_weights.push_back(v.weight);
  }
  return tree;
}

OccupancyStream serialize(const Octree& tree) {
  OccupancyStream out;
  out.bytes.reserve(tree.internal_node_count());
  for (int l = 0; l < tree.depth; ++l) {
    const auto& nodes = tree.levels[static_cast<std::size_t>(l)];
    const auto& children = tree.levels[static_cast<std::size_t>(l) + 1];
    std::size_t c = 0;
    for (std::uint64_t node : nodes) {
      std::uint8_t byte = 0;
      for (; c < children.size() && (children[c] >> 3) == node; ++c) {
        byte |= static_cast<std::uint8_t>(1u << (children[c] & 7u));
      }
      out.bytes.push_back(byte);
    }
  }
  return out;
}

Octree deserialize(std::span<const std::uint8_t> bytes, int depth) {
  if (depth < 1 || depth > morton::kMaxDepth) {
    fail(ErrorKind::CorruptStream, "occupancy stream: depth out of range: " + std::to_string(depth));
  }
  Octree tree;
  tree.depth = depth;
  tree.levels.resize(static_cast<std::size_t>(depth) + 1);
  tree.levels[0] = {0};
  std::size_t offset = 0;
  for (int l = 0; l < depth; ++l) {
    const auto& nodes = tree.levels[static_cast<std::size_t>(l)];
    auto& children = tree.levels[static_cast<std::size_t>(l) + 1];
    if (nodes.size() > bytes.size() - offset) {
      fail(ErrorKind::CorruptStream, "occupancy stream truncated at byte offset " +
                                         std::to_string(bytes.size()) + " (level " +
                                         std::to_string(l) + " needs " +
                                         std::to_string(nodes.size()) + " more bytes)");
    }
    children.reserve(nodes.size() * 2);
    for (std::uint64_t node : nodes) {
      const std::uint8_t byte = bytes[offset];
      if (byte == 0) {
        fail(ErrorKind::CorruptStream,
             "occupancy stream has an empty node at byte offset " + std::to_string(offset));
      }
      ++offset;
      for (unsigned b = 0; b < 8; ++b) {
        if (byte & (1u << b)) children.push_back((node << 3) | b);
      }
    }
  }
  if (offset != bytes.size()) {
    fail(ErrorKind::CorruptStream,
         "occupancy stream has trailing bytes starting at byte offset " + std::to_string(offset));
  }
  return tree;
}

double geometry_bpp(const OccupancyStream& stream, std::size_t point_count) {
  if (point_count == 0) fail(ErrorKind::InvalidInput, "geometry_bpp: point count must be >= 1");
  return 8.0 * static_cast<double>(stream.bytes.size()) / static_cast<double>(point_count);
}

}  // namespace cylpc
