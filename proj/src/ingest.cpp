#include "cylpc/ingest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cylpc/error.hpp"

namespace cylpc {

namespace {

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::Io, "error reading '" + path.string() + "'");
  return data;
}

template <typename T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof v);
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof v);
  }
  return v;
}

template <typename T>
void store_le(std::ostream& out, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof v);
  }
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

double clamp_attribute(double a) { return std::clamp(a, 0.0, 255.0); }

}  // namespace

LoadedCloud load_kitti_bin(const std::filesystem::path& path) {
  const auto data = read_file(path);
  if (data.size() % 16 != 0) {
    fail(ErrorKind::MalformedFile, "'" + path.string() + "' has " + std::to_string(data.size()) +
                                       " bytes, not a multiple of 16");
  }
  const std::size_t n = data.size() / 16;
  std::vector<CartesianPoint> pts;
  std::vector<double> attrs;
  pts.reserve(n);
  attrs.reserve(n);
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const char* rec = data.data() + 16 * i;
    const CartesianPoint p{load_le<float>(rec), load_le<float>(rec + 4), load_le<float>(rec + 8)};
    const double refl = load_le<float>(rec + 12);
    if (!is_finite(p) || !std::isfinite(refl)) {
      ++dropped;
      continue;
    }
    pts.push_back(p);
    attrs.push_back(clamp_attribute(std::round(refl * 255.0)));
  }
  return {PointCloud(std::move(pts), std::move(attrs)), dropped};
}

void write_kitti_bin(const std::filesystem::path& path, const PointCloud& pc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot create '" + path.string() + "'");
  const auto pts = pc.points();
  const auto attrs = pc.attributes();
  for (std::size_t i = 0; i < pc.size(); ++i) {
    store_le(out, static_cast<float>(pts[i].x));
    store_le(out, static_cast<float>(pts[i].y));
    store_le(out, static_cast<float>(pts[i].z));
    store_le(out, static_cast<float>(attrs[i] / 255.0));
  }
  if (!out) fail(ErrorKind::Io, "error writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// PLY

namespace {

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

bool parse_ply_type(const std::string& s, PlyType& t) {
  static const std::pair<const char*, PlyType> kNames[] = {
      {"char", PlyType::Int8},     {"int8", PlyType::Int8},       {"uchar", PlyType::UInt8},
      {"uint8", PlyType::UInt8},   {"short", PlyType::Int16},     {"int16", PlyType::Int16},
      {"ushort", PlyType::UInt16}, {"uint16", PlyType::UInt16},   {"int", PlyType::Int32},
      {"int32", PlyType::Int32},   {"uint", PlyType::UInt32},     {"uint32", PlyType::UInt32},
      {"float", PlyType::Float32}, {"float32", PlyType::Float32}, {"double", PlyType::Float64},
      {"float64", PlyType::Float64}};
  for (const auto& [name, type] : kNames) {
    if (s == name) {
      t = type;
      return true;
    }
  }
  return false;
}

std::size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::Int8:
    case PlyType::UInt8: return 1;
    case PlyType::Int16:
    case PlyType::UInt16: return 2;
    case PlyType::Int32:
    case PlyType::UInt32:
    case PlyType::Float32: return 4;
    case PlyType::Float64: return 8;
  }
  return 0;
}

double ply_load(PlyType t, const char* p) {
  switch (t) {
    case PlyType::Int8: return load_le<std::int8_t>(p);
    case PlyType::UInt8: return load_le<std::uint8_t>(p);
    case PlyType::Int16: return load_le<std::int16_t>(p);
    case PlyType::UInt16: return load_le<std::uint16_t>(p);
    case PlyType::Int32: return load_le<std::int32_t>(p);
    case PlyType::UInt32: return load_le<std::uint32_t>(p);
    case PlyType::Float32: return load_le<float>(p);
    case PlyType::Float64: return load_le<double>(p);
  }
  return 0.0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::Float32;
  bool is_list = false;
  PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

struct PlyHeader {
  bool binary = false;
  std::vector<PlyElement> elements;
  bool has_declared_range = false;
  double declared_lo = 0.0;
  double declared_hi = 0.0;
  std::size_t data_offset = 0;
  std::size_t lines = 0;
};

[[noreturn]] void ply_error(const std::filesystem::path& path, const std::string& where,
                            const std::string& what) {
  fail(ErrorKind::Parse, "'" + path.string() + "' " + where + ": " + what);
}

PlyHeader parse_ply_header(const std::vector<char>& data, const std::filesystem::path& path) {
  PlyHeader h;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool saw_format = false;
  auto next_line = [&](std::string& line) {
    if (pos >= data.size()) return false;
    const auto* begin = data.data() + pos;
    const auto* end = static_cast<const char*>(std::memchr(begin, '\n', data.size() - pos));
    const std::size_t len = end ? static_cast<std::size_t>(end - begin) : data.size() - pos;
    line.assign(begin, len);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos += len + (end ? 1 : 0);
    ++line_no;
    return true;
  };
  std::string line;
  if (!next_line(line) || line != "ply") ply_error(path, "line 1", "missing 'ply' magic");
  for (;;) {
    if (!next_line(line)) {
      ply_error(path, "line " + std::to_string(line_no + 1), "header ends without end_header");
    }
    const std::string where = "line " + std::to_string(line_no);
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key.empty()) continue;
    if (key == "end_header") break;
    if (key == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt == "ascii") {
        h.binary = false;
      } else if (fmt == "binary_little_endian") {
        h.binary = true;
      } else {
        ply_error(path, where, "unsupported format '" + fmt + "'");
      }
      saw_format = true;
    } else if (key == "comment" || key == "obj_info") {
      std::string tag;
      ss >> tag;
      if (tag == "intensity_range") {
        if (!(ss >> h.declared_lo >> h.declared_hi) || !(h.declared_hi > h.declared_lo)) {
          ply_error(path, where, "intensity_range needs two increasing numbers");
        }
        h.has_declared_range = true;
      }
    } else if (key == "element") {
      PlyElement e;
      long long count = -1;
      if (!(ss >> e.name >> count) || count < 0) ply_error(path, where, "malformed element line");
      e.count = static_cast<std::size_t>(count);
      h.elements.push_back(std::move(e));
    } else if (key == "property") {
      if (h.elements.empty()) ply_error(path, where, "property before any element");
      PlyProperty p;
      std::string type;
      ss >> type;
      if (type == "list") {
        std::string count_type, item_type;
        ss >> count_type >> item_type >> p.name;
        if (!parse_ply_type(count_type, p.count_type) || !parse_ply_type(item_type, p.type)) {
          ply_error(path, where, "unknown list property type");
        }
        p.is_list = true;
      } else {
        if (!parse_ply_type(type, p.type)) ply_error(path, where, "unknown type '" + type + "'");
        ss >> p.name;
      }
      if (p.name.empty()) ply_error(path, where, "property without a name");
      h.elements.back().properties.push_back(std::move(p));
    } else {
      ply_error(path, where, "unexpected header keyword '" + key + "'");
    }
  }
  if (!saw_format) ply_error(path, "header", "missing format line");
  h.data_offset = pos;
  h.lines = line_no;
  return h;
}

int find_property(const PlyElement& e, std::initializer_list<const char*> names) {
  for (const char* name : names) {
    for (std::size_t i = 0; i < e.properties.size(); ++i) {
      if (e.properties[i].name == name && !e.properties[i].is_list) return static_cast<int>(i);
    }
  }
  return -1;
}

}  // namespace

LoadedCloud load_ply(const std::filesystem::path& path) {
  const auto data = read_file(path);
  const PlyHeader h = parse_ply_header(data, path);

  const PlyElement* vertex = nullptr;
  for (const auto& e : h.elements) {
    if (e.name == "vertex") vertex = &e;
  }
  if (!vertex) ply_error(path, "header", "no 'vertex' element");
  const int ix = find_property(*vertex, {"x"});
  const int iy = find_property(*vertex, {"y"});
  const int iz = find_property(*vertex, {"z"});
  const int ii = find_property(*vertex, {"intensity", "reflectance"});
  if (ix < 0) ply_error(path, "header", "vertex element has no 'x' property");
  if (iy < 0) ply_error(path, "header", "vertex element has no 'y' property");
  if (iz < 0) ply_error(path, "header", "vertex element has no 'z' property");
  if (ii < 0) ply_error(path, "header", "vertex element has no 'intensity' property");

  std::vector<CartesianPoint> pts;
  std::vector<double> raw;
  pts.reserve(vertex->count);
  raw.reserve(vertex->count);
  std::size_t dropped = 0;
  std::vector<double> values;

  auto accept = [&] {
    const CartesianPoint p{values[static_cast<std::size_t>(ix)],
                           values[static_cast<std::size_t>(iy)],
                           values[static_cast<std::size_t>(iz)]};
    const double a = values[static_cast<std::size_t>(ii)];
    if (!is_finite(p) || !std::isfinite(a)) {
      ++dropped;
      return;
    }
    pts.push_back(p);
    raw.push_back(a);
  };

  if (h.binary) {
    std::size_t off = h.data_offset;
    auto need = [&](std::size_t bytes) {
      if (data.size() - off < bytes) {
        ply_error(path, "byte offset " + std::to_string(off), "binary data truncated");
      }
    };
    for (const auto& e : h.elements) {
      for (std::size_t n = 0; n < e.count; ++n) {
        values.assign(e.properties.size(), 0.0);
        for (std::size_t pi = 0; pi < e.properties.size(); ++pi) {
          const auto& p = e.properties[pi];
          if (p.is_list) {
            need(ply_size(p.count_type));
            const double items = ply_load(p.count_type, data.data() + off);
            off += ply_size(p.count_type);
            if (!(items >= 0.0)) ply_error(path, "byte offset " + std::to_string(off), "bad list");
            const std::size_t bytes = static_cast<std::size_t>(items) * ply_size(p.type);
            need(bytes);
            off += bytes;
          } else {
            need(ply_size(p.type));
            values[pi] = ply_load(p.type, data.data() + off);
            off += ply_size(p.type);
          }
        }
        if (&e == vertex) accept();
      }
    }
  } else {
    std::size_t pos = h.data_offset;
    std::size_t line_no = h.lines;
    std::string line;
    auto next_line = [&]() -> bool {
      while (pos < data.size()) {
        const auto* begin = data.data() + pos;
        const auto* end = static_cast<const char*>(std::memchr(begin, '\n', data.size() - pos));
        const std::size_t len = end ? static_cast<std::size_t>(end - begin) : data.size() - pos;
        line.assign(begin, len);
        pos += len + (end ? 1 : 0);
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
      }
      return false;
    };
    for (const auto& e : h.elements) {
      for (std::size_t n = 0; n < e.count; ++n) {
        const std::string where = "line " + std::to_string(line_no + 1);
        if (!next_line()) ply_error(path, where, "ascii data truncated");
        std::istringstream ss(line);
        values.assign(e.properties.size(), 0.0);
        for (std::size_t pi = 0; pi < e.properties.size(); ++pi) {
          const auto& p = e.properties[pi];
          std::string tok;
          if (p.is_list) {
            long long items = -1;
            if (!(ss >> items) || items < 0) ply_error(path, "line " + std::to_string(line_no), "bad list");
            for (long long i = 0; i < items; ++i) ss >> tok;
            continue;
          }
          if (!(ss >> tok)) {
            ply_error(path, "line " + std::to_string(line_no),
                      "missing value for property '" + p.name + "'");
          }
          try {
            values[pi] = std::stod(tok);
          } catch (const std::logic_error&) {
            ply_error(path, "line " + std::to_string(line_no), "bad number '" + tok + "'");
          }
        }
        if (&e == vertex) accept();
      }
    }
  }

  // Map intensities onto [0, 255].
  double lo = 0.0;
  double hi = 255.0;
  if (h.has_declared_range) {
    lo = h.declared_lo;
    hi = h.declared_hi;
  } else if (vertex->properties[static_cast<std::size_t>(ii)].type != PlyType::UInt8 &&
             !raw.empty()) {
    lo = *std::min_element(raw.begin(), raw.end());
    hi = *std::max_element(raw.begin(), raw.end());
  }
  std::vector<double> attrs(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    // A constant intensity carries no range; keep it as is on the 8-bit scale.
    attrs[i] = hi > lo ? clamp_attribute((raw[i] - lo) / (hi - lo) * 255.0) : clamp_attribute(raw[i]);
  }
  return {PointCloud(std::move(pts), std::move(attrs)), dropped};
}

void write_ply(const std::filesystem::path& path, const PointCloud& pc, PlyEncoding encoding) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot create '" + path.string() + "'");
  out << "ply\n"
      << (encoding == PlyEncoding::Ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n")
      << "comment intensity_range 0 255\n"
      << "element vertex " << pc.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "property double intensity\nend_header\n";
  const auto pts = pc.points();
  const auto attrs = pc.attributes();
  if (encoding == PlyEncoding::Ascii) {
    char buf[128];
    for (std::size_t i = 0; i < pc.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", pts[i].x, pts[i].y, pts[i].z,
                    attrs[i]);
      out << buf;
    }
  } else {
    for (std::size_t i = 0; i < pc.size(); ++i) {
      store_le(out, pts[i].x);
      store_le(out, pts[i].y);
      store_le(out, pts[i].z);
      store_le(out, attrs[i]);
    }
  }
  if (!out) fail(ErrorKind::Io, "error writing '" + path.string() + "'");
}

LoadedCloud load_point_cloud(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".bin") return load_kitti_bin(path);
  if (ext == ".ply") return load_ply(path);
  fail(ErrorKind::MalformedFile, "unknown point cloud format '" + ext + "' (expected .bin or .ply)");
}

// ---------------------------------------------------------------------------
// Synthetic sweeps

namespace {

struct Box {
  CartesianPoint lo;
  CartesianPoint hi;
  double reflectivity;
};

// Slab test for a ray from the origin; returns the entry distance or +inf.
double hit_box(const CartesianPoint& d, const Box& b) {
  double t_near = 0.0;
  double t_far = std::numeric_limits<double>::infinity();
  const double dir[3] = {d.x, d.y, d.z};
  const double lo[3] = {b.lo.x, b.lo.y, b.lo.z};
  const double hi[3] = {b.hi.x, b.hi.y, b.hi.z};
  for (int a = 0; a < 3; ++a) {
    if (dir[a] == 0.0) {
      if (lo[a] > 0.0 || hi[a] < 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    double t0 = lo[a] / dir[a];
    double t1 = hi[a] / dir[a];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::numeric_limits<double>::infinity();
  }
  return t_near > 0.0 ? t_near : std::numeric_limits<double>::infinity();
}

}  // namespace

PointCloud synth_sweep(const SweepSpec& spec, std::uint64_t seed) {
  if (spec.beams < 1 || !(spec.azimuth_step > 0.0) || !(spec.max_range > 0.0) ||
      !(spec.noise_sigma >= 0.0) || !(spec.intensity_noise >= 0.0) || spec.boxes < 0 ||
      !(spec.elevation_max >= spec.elevation_min)) {
    fail(ErrorKind::InvalidConfig, "synth_sweep: invalid sweep spec");
  }
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Box> boxes;
  const double ground = -spec.sensor_height;
  while (static_cast<int>(boxes.size()) < spec.boxes) {
    const double sx = 1.5 + 6.5 * unit(gen);
    const double sy = 1.5 + 6.5 * unit(gen);
    const double sz = 1.0 + 4.0 * unit(gen);
    const double radius = 4.0 + (0.6 * spec.max_range - 4.0) * unit(gen);
    const double angle = 2.0 * std::numbers::pi * unit(gen);
    const double rho = 0.2 + 0.7 * unit(gen);
    const double cx = radius * std::cos(angle);
    const double cy = radius * std::sin(angle);
    // Keep the sensor outside every obstacle.
    if (std::hypot(cx, cy) < 0.5 * std::hypot(sx, sy) + 1.0) continue;
    boxes.push_back({{cx - sx / 2, cy - sy / 2, ground}, {cx + sx / 2, cy + sy / 2, ground + sz}, rho});
  }

  std::normal_distribution<double> range_noise(0.0, spec.noise_sigma > 0 ? spec.noise_sigma : 1.0);
  std::normal_distribution<double> level_noise(0.0, spec.intensity_noise > 0 ? spec.intensity_noise : 1.0);
  const auto azimuths = static_cast<std::size_t>(std::floor(2.0 * std::numbers::pi / spec.azimuth_step));

  std::vector<CartesianPoint> pts;
  std::vector<double> attrs;
  for (int b = 0; b < spec.beams; ++b) {
    const double el = spec.beams == 1
                          ? spec.elevation_min
                          : spec.elevation_min + (spec.elevation_max - spec.elevation_min) * b /
                                                     (spec.beams - 1);
    for (std::size_t a = 0; a < azimuths; ++a) {
      const double az = -std::numbers::pi + spec.azimuth_step * static_cast<double>(a);
      const CartesianPoint d{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
      double t = std::numeric_limits<double>::infinity();
      double rho = 0.0;
      if (d.z < 0.0) {
        t = ground / d.z;
        const double gx = t * d.x;
        const double gy = t * d.y;
        if (spec.intensity == IntensityModel::Checker) {
          const bool odd = (static_cast<long long>(std::floor(gx / 2.0)) +
                            static_cast<long long>(std::floor(gy / 2.0))) & 1;
          rho = odd ? 0.8 : 0.2;
        } else {
          rho = 0.35;
        }
      }
      for (const auto& box : boxes) {
        const double tb = hit_box(d, box);
        if (tb < t) {
          t = tb;
          rho = box.reflectivity;
        }
      }
      if (!(t <= spec.max_range)) continue;
      const double range = std::max(t + (spec.noise_sigma > 0 ? range_noise(gen) : 0.0), 1e-3);
      double level = 0.0;
      switch (spec.intensity) {
        case IntensityModel::Constant: level = 128.0; break;
        case IntensityModel::RangeDecay: level = 255.0 * rho * std::exp(-range / 60.0); break;
        case IntensityModel::Checker: level = 255.0 * rho; break;
      }
      if (spec.intensity != IntensityModel::Constant && spec.intensity_noise > 0) {
        level += level_noise(gen);
      }
      pts.push_back({range * d.x, range * d.y, range * d.z});
      attrs.push_back(clamp_attribute(std::round(level)));
    }
  }
  return {std::move(pts), std::move(attrs)};
}

}  // namespace cylpc
