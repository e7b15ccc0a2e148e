#include "cylpc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "cylpc/coeff_codec.hpp"
#include "cylpc/error.hpp"

namespace cylpc {

int default_depth(CoordinateSystem system) noexcept {
  return system == CoordinateSystem::Cartesian ? kDefaultCartesianDepth : kDefaultCylindricalDepth;
}

PreparedFrame prepare_frame(const PointCloud& pc, const GridParams& grid) {
  const auto cfg = make_config(pc, grid.system, grid.depth, grid.log_radial, grid.r_min);
  PreparedFrame frame{voxelize(pc, cfg), {}, {}, pc.size()};
  frame.geometry = serialize(build_octree(frame.voxels));
  std::vector<WeightedLeaf> leaves;
  leaves.reserve(frame.voxels.voxels.size());
  for (const auto& v : frame.voxels.voxels) leaves.push_back({v.code, v.attribute, 1});
  frame.coefficients = raht_forward(leaves, cfg.depth());
  return frame;
}

double EncodedFrame::geometry_bpp() const {
  return 8.0 * static_cast<double>(geometry_bytes) / static_cast<double>(point_count);
}
double EncodedFrame::attribute_bpp() const {
  return cylpc::attribute_bpp(8 * static_cast<std::uint64_t>(attribute_bytes), point_count);
}
double EncodedFrame::total_bpp() const {
  return 8.0 * static_cast<double>(bytes.size()) / static_cast<double>(point_count);
}

EncodedFrame encode_prepared(const PreparedFrame& frame, double qstep) {
  const auto q = quantize(frame.coefficients, qstep);
  const auto symbols = q.symbols();
  const auto payload = rlgr_encode(symbols);
  Bitstream bs{BitstreamHeader::describe(frame.voxels.config, frame.point_count, qstep),
               frame.geometry.bytes, payload.bytes};
  EncodedFrame out;
  out.bytes = write_bitstream(bs);
  out.geometry_bytes = bs.geometry.size();
  out.attribute_bytes = bs.attributes.size();
  out.point_count = frame.point_count;
  out.voxel_count = frame.voxels.voxels.size();
  return out;
}

EncodedFrame encode_frame(const PointCloud& pc, const GridParams& grid, double qstep) {
  if (!(qstep > 0.0)) fail(ErrorKind::InvalidConfig, "qstep must be > 0");
  return encode_prepared(prepare_frame(pc, grid), qstep);
}

DecodedFrame decode_frame(std::span<const std::uint8_t> bytes) {
  Bitstream bs = read_bitstream(bytes);
  const VoxelGridConfig cfg = bs.header.config();
  Octree geometry;
  try {
    geometry = deserialize(bs.geometry, cfg.depth());
  } catch (const Error& e) {
    fail(ErrorKind::CorruptStream, std::string("geometry section: ") + e.what());
  }
  const auto leaves = geometry.leaves();
  std::vector<std::int64_t> symbols;
  try {
    symbols = rlgr_decode({bs.attributes, leaves.size()});
  } catch (const Error& e) {
    fail(ErrorKind::CorruptStream, std::string("attribute section: ") + e.what());
  }
  const auto coeffs = dequantize(QuantizedStream::from_symbols(symbols, bs.header.qstep));
  const auto decoded = raht_inverse(coeffs, geometry);

  DecodedFrame out{bs.header, VoxelizedCloud{cfg, {}}, {}};
  out.voxels.voxels.reserve(decoded.size());
  for (const auto& leaf : decoded) {
    // Corrupt payloads can decode to huge or non-finite values.
    const double a = std::isfinite(leaf.attribute) ? std::clamp(leaf.attribute, 0.0, 255.0) : 0.0;
    out.voxels.voxels.push_back({leaf.code, a, 1});
  }
  out.cloud = devoxelize(out.voxels);
  return out;
}

FrameEvaluation evaluate_prepared(const PointCloud& pc, const PreparedFrame& frame,
                                  std::span<const std::size_t> point_voxel, double qstep) {
  const EncodedFrame enc = encode_prepared(frame, qstep);
  const DecodedFrame dec = decode_frame(enc.bytes);

  FrameEvaluation ev;
  ev.qstep = qstep;
  ev.geometry_bpp = enc.geometry_bpp();
  ev.attribute_bpp = enc.attribute_bpp();
  ev.total_bpp = enc.total_bpp();
  ev.voxel_count = enc.voxel_count;

  const auto& src = frame.voxels.voxels;
  const auto& out = dec.voxels.voxels;
  std::vector<double> a(src.size());
  std::vector<double> b(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    a[i] = src[i].attribute;
    b[i] = out[i].attribute;
  }
  ev.voxel_mse = mse(a, b);

  std::vector<double> decoded_points(pc.size());
  for (std::size_t i = 0; i < pc.size(); ++i) decoded_points[i] = out[point_voxel[i]].attribute;
  ev.point_mse = mse(pc.attributes(), decoded_points);
  ev.psnr = psnr_attribute(pc.attributes(), decoded_points);
  return ev;
}

std::vector<RatePoint> SweepResult::rate_points() const {
  std::vector<RatePoint> pts;
  pts.reserve(runs.size());
  for (const auto& r : runs) pts.push_back({r.attribute_bpp, r.psnr.db()});
  std::sort(pts.begin(), pts.end(), [](const RatePoint& x, const RatePoint& y) { return x.bpp < y.bpp; });
  return pts;
}

SweepResult rd_sweep(const PointCloud& pc, const GridParams& grid, std::span<const double> qsteps) {
  for (double q : qsteps) {
    if (!(q > 0.0) || !std::isfinite(q)) {
      fail(ErrorKind::InvalidConfig, "qstep must be finite and > 0, got " + std::to_string(q));
    }
  }
  const PreparedFrame frame = prepare_frame(pc, grid);
  const auto slots = point_to_voxel(pc, frame.voxels);
  SweepResult result;
  result.grid = grid;
  result.geometry_bpp = geometry_bpp(frame.geometry, frame.point_count);
  result.runs.resize(qsteps.size());

  std::exception_ptr error;
  const auto n = static_cast<std::ptrdiff_t>(qsteps.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      result.runs[static_cast<std::size_t>(i)] =
          evaluate_prepared(pc, frame, slots, qsteps[static_cast<std::size_t>(i)]);
    } catch (...) {
#pragma omp critical(cylpc_sweep_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return result;
}

SystemComparison compare_systems(const PointCloud& pc, int cartesian_depth, int cylindrical_depth,
                                 std::span<const double> qsteps, bool log_radial, double r_min) {
  SystemComparison c;
  c.cartesian = rd_sweep(pc, {CoordinateSystem::Cartesian, cartesian_depth, false, r_min}, qsteps);
  c.cylindrical =
      rd_sweep(pc, {CoordinateSystem::Cylindrical, cylindrical_depth, log_radial, r_min}, qsteps);
  c.bd = bd_metrics(RdCurve::from_samples(c.cartesian.rate_points()),
                    RdCurve::from_samples(c.cylindrical.rate_points()));
  return c;
}

}  // namespace cylpc
