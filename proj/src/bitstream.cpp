#include "cylpc/bitstream.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include "cylpc/error.hpp"

namespace cylpc {

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
  std::array<std::uint8_t, sizeof(T)> b;
  std::memcpy(b.data(), &v, sizeof v);
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  out.insert(out.end(), b.begin(), b.end());
}

class Cursor {
 public:
  explicit Cursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* section) {
    need(sizeof(T), section);
    std::array<std::uint8_t, sizeof(T)> b;
    std::memcpy(b.data(), bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
    T v;
    std::memcpy(&v, b.data(), sizeof v);
    pos_ += sizeof(T);
    return v;
  }

  std::span<const std::uint8_t> take(std::size_t n, const char* section) {
    need(n, section);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t pos() const { return pos_; }
  std::size_t left() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* section) const {
    if (bytes_.size() - pos_ < n) {
      fail(ErrorKind::CorruptStream, std::string(section) + ": bitstream truncated at byte offset " +
                                         std::to_string(bytes_.size()));
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

[[noreturn]] void corrupt(const char* section, std::size_t offset, const std::string& what) {
  fail(ErrorKind::CorruptStream,
       std::string(section) + ": " + what + " at byte offset " + std::to_string(offset));
}

}  // namespace

BitstreamHeader BitstreamHeader::describe(const VoxelGridConfig& cfg, std::uint64_t point_count,
                                          double qstep) {
  BitstreamHeader h;
  h.system = cfg.system();
  h.depth = cfg.depth();
  h.log_radial = cfg.log_radial();
  h.r_min = cfg.r_min();
  if (cfg.system() == CoordinateSystem::Cartesian) {
    const auto& b = cfg.box();
    h.bounds = {b.origin.x, b.origin.y, b.origin.z, b.side, 0.0, 0.0};
  } else {
    const auto& c = cfg.cylinder();
    h.bounds = {c.radius, c.height, c.h_min, 0.0, 0.0, 0.0};
  }
  h.point_count = point_count;
  h.qstep = qstep;
  return h;
}

VoxelGridConfig BitstreamHeader::config() const {
  if (system == CoordinateSystem::Cartesian) {
    return VoxelGridConfig::cartesian({{bounds[0], bounds[1], bounds[2]}, bounds[3]}, depth);
  }
  return VoxelGridConfig::cylindrical({bounds[0], bounds[1], bounds[2]}, depth, log_radial, r_min);
}

std::vector<std::uint8_t> write_bitstream(const Bitstream& bs) {
  if (bs.geometry.size() > 0xffffffffu || bs.attributes.size() > 0xffffffffu) {
    fail(ErrorKind::InvalidInput, "bitstream section exceeds 4 GiB");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kContainerOverheadBytes + bs.geometry.size() + bs.attributes.size());
  out.insert(out.end(), kBitstreamMagic.begin(), kBitstreamMagic.end());
  const auto& h = bs.header;
  put<std::uint8_t>(out, kBitstreamVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(h.system));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(h.depth));
  put<std::uint8_t>(out, h.log_radial ? 1 : 0);
  put<double>(out, h.r_min);
  for (double b : h.bounds) put<double>(out, b);
  put<std::uint64_t>(out, h.point_count);
  put<double>(out, h.qstep);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(bs.geometry.size()));
  out.insert(out.end(), bs.geometry.begin(), bs.geometry.end());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(bs.attributes.size()));
  out.insert(out.end(), bs.attributes.begin(), bs.attributes.end());
  return out;
}

Bitstream read_bitstream(std::span<const std::uint8_t> bytes) {
  Cursor in(bytes);
  const auto magic = in.take(kBitstreamMagic.size(), "header");
  if (!std::equal(magic.begin(), magic.end(), kBitstreamMagic.begin())) {
    corrupt("header", 0, "bad magic");
  }
  Bitstream bs;
  auto& h = bs.header;
  const auto version = in.get<std::uint8_t>("header");
  if (version != kBitstreamVersion) {
    corrupt("header", 6, "unsupported version " + std::to_string(version));
  }
  const auto system = in.get<std::uint8_t>("header");
  if (system > 1) corrupt("header", 7, "unknown coordinate system " + std::to_string(system));
  h.system = static_cast<CoordinateSystem>(system);
  h.depth = in.get<std::uint8_t>("header");
  const auto log_flag = in.get<std::uint8_t>("header");
  if (log_flag > 1) corrupt("header", 9, "bad log-radial flag");
  h.log_radial = log_flag == 1;
  h.r_min = in.get<double>("header");
  for (double& b : h.bounds) b = in.get<double>("header");
  h.point_count = in.get<std::uint64_t>("header");
  h.qstep = in.get<double>("header");
  if (h.point_count == 0) corrupt("header", 66, "zero point count");
  if (!(h.qstep > 0.0) || !std::isfinite(h.qstep)) corrupt("header", 74, "bad qstep");
  try {
    (void)h.config();
  } catch (const Error& e) {
    corrupt("header", 8, std::string("inconsistent grid (") + e.what() + ")");
  }

  const auto geometry_len = in.get<std::uint32_t>("geometry section");
  const auto geometry = in.take(geometry_len, "geometry section");
  bs.geometry.assign(geometry.begin(), geometry.end());
  const auto attribute_len = in.get<std::uint32_t>("attribute section");
  const auto attributes = in.take(attribute_len, "attribute section");
  bs.attributes.assign(attributes.begin(), attributes.end());
  if (in.left() != 0) corrupt("container", in.pos(), "trailing bytes");
  return bs;
}

}  // namespace cylpc
