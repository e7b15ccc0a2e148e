// cylpc: encode, decode and evaluate LiDAR sweeps with octree geometry and
// RAHT-coded intensities in Cartesian or cylindrical voxel grids.
//
// Exit codes: 0 success, 2 usage error, 3 malformed input, 4 corrupt bitstream.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include "cylpc/error.hpp"
#include "cylpc/ingest.hpp"
#include "cylpc/pipeline.hpp"

namespace {

using namespace cylpc;

constexpr int kExitUsage = 2;
constexpr int kExitMalformed = 3;
constexpr int kExitCorrupt = 4;

struct GridOptions {
  std::string coords = "cylindrical";
  int depth = 0;  // 0 picks the per-system default
  bool log_radial = false;
  double r_min = kDefaultRMin;

  GridParams params() const {
    GridParams g;
    g.system = coords == "cartesian" ? CoordinateSystem::Cartesian : CoordinateSystem::Cylindrical;
    g.depth = depth > 0 ? depth : default_depth(g.system);
    g.log_radial = log_radial;
    g.r_min = r_min;
    return g;
  }
};

void add_grid_options(CLI::App* cmd, GridOptions& opt) {
  cmd->add_option("--coords", opt.coords, "Coordinate system")
      ->check(CLI::IsMember({"cartesian", "cylindrical"}))
      ->capture_default_str();
  cmd->add_option("--depth", opt.depth, "Octree depth (default 16 cartesian, 13 cylindrical)")
      ->check(CLI::Range(1, 21));
  cmd->add_flag("--log-radial", opt.log_radial, "Partition the radius logarithmically");
  cmd->add_option("--r-min", opt.r_min, "Lower radius clamp of the log-radial axis (m)")
      ->capture_default_str();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

PointCloud load_input(const std::string& path) {
  auto loaded = load_point_cloud(path);
  if (loaded.dropped_points > 0) {
    std::cerr << "warning: dropped " << loaded.dropped_points << " non-finite points from "
              << path << "\n";
  }
  if (loaded.cloud.empty()) fail(ErrorKind::InvalidInput, "'" + path + "' contains no points");
  return std::move(loaded.cloud);
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot create '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::Io, "error writing '" + path + "'");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot create '" + path + "'");
  return out;
}

void print_sweep(std::ostream& os, const SweepResult& s) {
  os << "system=" << to_string(s.grid.system) << " depth=" << s.grid.depth
     << " log_radial=" << (s.grid.log_radial ? 1 : 0) << " geometry_bpp=" << fmt(s.geometry_bpp)
     << "\n";
  for (const auto& r : s.runs) {
    os << "  qstep=" << r.qstep << " attribute_bpp=" << fmt(r.attribute_bpp)
       << " psnr_db=" << (r.psnr.is_lossless() ? std::string("inf") : fmt(r.psnr.db())) << "\n";
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Octree/RAHT point cloud codec with cylindrical voxelization"};
  app.require_subcommand(1);

  // encode
  std::string input;
  std::string output;
  double qstep = 8.0;
  GridOptions grid;
  auto* encode = app.add_subcommand("encode", "Encode a .bin/.ply frame into a bitstream");
  encode->add_option("input", input, "Input point cloud (.bin or .ply)")->required();
  add_grid_options(encode, grid);
  encode->add_option("--qstep", qstep, "Quantizer step")->check(CLI::PositiveNumber)->capture_default_str();
  encode->add_option("--out", output, "Output bitstream")->required();

  // decode
  std::string bitstream;
  bool binary = false;
  auto* decode = app.add_subcommand("decode", "Decode a bitstream into a PLY file");
  decode->add_option("bitstream", bitstream, "Input bitstream")->required();
  decode->add_option("--out", output, "Output PLY")->required();
  decode->add_flag("--binary", binary, "Write binary little-endian PLY");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Encode, decode and report rate and PSNR");
  evaluate->add_option("input", input, "Input point cloud")->required();
  add_grid_options(evaluate, grid);
  evaluate->add_option("--qstep", qstep, "Quantizer step")->check(CLI::PositiveNumber)->capture_default_str();

  // rd-sweep
  std::vector<double> qsteps(kDefaultQsteps.begin(), kDefaultQsteps.end());
  std::string csv;
  auto* sweep = app.add_subcommand("rd-sweep", "Rate-distortion sweep over quantizer steps");
  sweep->add_option("input", input, "Input point cloud")->required();
  add_grid_options(sweep, grid);
  sweep->add_option("--qsteps", qsteps, "Comma-separated quantizer steps")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  sweep->add_option("--csv", csv, "Output CSV (bpp,psnr_db)")->required();

  // compare
  int depth_cart = kDefaultCartesianDepth;
  int depth_cyl = kDefaultCylindricalDepth;
  std::string report;
  auto* compare = app.add_subcommand("compare", "Compare cartesian and cylindrical coding");
  compare->add_option("input", input, "Input point cloud")->required();
  compare->add_option("--depth-cart", depth_cart, "Cartesian octree depth")
      ->check(CLI::Range(1, 21))
      ->capture_default_str();
  compare->add_option("--depth-cyl", depth_cyl, "Cylindrical octree depth")
      ->check(CLI::Range(1, 21))
      ->capture_default_str();
  compare->add_option("--qsteps", qsteps, "Comma-separated quantizer steps")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  compare->add_flag("--log-radial", grid.log_radial, "Log-radial cylindrical partition");
  compare->add_option("--r-min", grid.r_min, "Log-radial lower clamp (m)")->capture_default_str();
  compare->add_option("--out", report, "Text report path (stdout if omitted)");
  compare->add_option("--csv", csv, "CSV report path");

  // analyze
  int analyze_depth = 8;
  std::size_t k = 5;
  std::string occupancy_csv;
  auto* analyze = app.add_subcommand("analyze", "kNN density and voxel occupancy statistics");
  analyze->add_option("input", input, "Input point cloud")->required();
  analyze->add_option("--depth", analyze_depth, "Octree depth")->check(CLI::Range(1, 21))->capture_default_str();
  analyze->add_option("--k", k, "Neighbours per point")->check(CLI::PositiveNumber)->capture_default_str();
  analyze->add_flag("--log-radial", grid.log_radial, "Log-radial cylindrical partition");
  analyze->add_option("--r-min", grid.r_min, "Log-radial lower clamp (m)")->capture_default_str();
  analyze->add_option("--csv", csv, "kNN CSV (r,mean_knn_distance)")->required();
  analyze->add_option("--occupancy-csv", occupancy_csv, "Occupancy CSV (system,depth,voxels,mean_points)")
      ->required();

  // synth
  std::uint64_t seed = 1;
  std::string model = "range-decay";
  SweepSpec spec;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic LiDAR sweep");
  synth->add_option("--seed", seed, "Random seed")->capture_default_str();
  synth->add_option("--beams", spec.beams, "Beam count")->check(CLI::Range(1, 1024))->capture_default_str();
  synth->add_option("--intensity", model, "Intensity model")
      ->check(CLI::IsMember({"constant", "range-decay", "checker"}))
      ->capture_default_str();
  synth->add_option("--out", output, "Output file (.bin or .ply)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (encode->parsed()) {
    const auto pc = load_input(input);
    const auto enc = encode_frame(pc, grid.params(), qstep);
    write_bytes(output, enc.bytes);
    std::cout << "points=" << enc.point_count << "\n"
              << "voxels=" << enc.voxel_count << "\n"
              << "geometry_bytes=" << enc.geometry_bytes << "\n"
              << "attribute_bytes=" << enc.attribute_bytes << "\n"
              << "header_bytes=" << enc.overhead_bytes() << "\n"
              << "total_bytes=" << enc.bytes.size() << "\n"
              << "geometry_bpp=" << fmt(enc.geometry_bpp()) << "\n"
              << "attribute_bpp=" << fmt(enc.attribute_bpp()) << "\n"
              << "total_bpp=" << fmt(enc.total_bpp()) << "\n";
  } else if (decode->parsed()) {
    const auto dec = decode_frame(read_bytes(bitstream));
    write_ply(output, dec.cloud, binary ? PlyEncoding::BinaryLittleEndian : PlyEncoding::Ascii);
    std::cout << "points=" << dec.header.point_count << "\n"
              << "voxels=" << dec.cloud.size() << "\n";
  } else if (evaluate->parsed()) {
    const auto pc = load_input(input);
    const auto params = grid.params();
    const auto frame = prepare_frame(pc, params);
    const auto slots = point_to_voxel(pc, frame.voxels);
    const auto ev = evaluate_prepared(pc, frame, slots, qstep);
    std::cout << "system=" << to_string(params.system) << "\n"
              << "depth=" << params.depth << "\n"
              << "voxels=" << ev.voxel_count << "\n"
              << "geometry_bpp=" << fmt(ev.geometry_bpp) << "\n"
              << "attribute_bpp=" << fmt(ev.attribute_bpp) << "\n"
              << "total_bpp=" << fmt(ev.total_bpp) << "\n"
              << "psnr_db=" << (ev.psnr.is_lossless() ? std::string("inf") : fmt(ev.psnr.db())) << "\n"
              << "voxel_mse=" << fmt(ev.voxel_mse) << "\n";
  } else if (sweep->parsed()) {
    if (qsteps.size() < 4) fail(ErrorKind::InvalidConfig, "rd-sweep needs at least 4 qsteps");
    const auto pc = load_input(input);
    const auto result = rd_sweep(pc, grid.params(), qsteps);
    auto out = open_out(csv);
    write_rd_csv(out, result.rate_points());
    out << "# geometry_bpp=" << fmt(result.geometry_bpp) << "\n";
    print_sweep(std::cout, result);
  } else if (compare->parsed()) {
    if (qsteps.size() < 4) fail(ErrorKind::InvalidConfig, "compare needs at least 4 qsteps");
    const auto pc = load_input(input);
    const auto c = compare_systems(pc, depth_cart, depth_cyl, qsteps, grid.log_radial, grid.r_min);
    const double saving = 100.0 * (1.0 - c.cylindrical.geometry_bpp / c.cartesian.geometry_bpp);
    auto write_report = [&](std::ostream& os) {
      print_sweep(os, c.cartesian);
      print_sweep(os, c.cylindrical);
      os << "bd_delta_psnr_db=" << fmt(c.bd.delta_psnr_db) << "\n"
         << "bd_delta_rate_percent=" << fmt(c.bd.delta_rate_percent) << "\n"
         << "geometry_bpp_cartesian=" << fmt(c.cartesian.geometry_bpp) << "\n"
         << "geometry_bpp_cylindrical=" << fmt(c.cylindrical.geometry_bpp) << "\n"
         << "geometry_saving_percent=" << fmt(saving) << "\n";
    };
    if (report.empty()) {
      write_report(std::cout);
    } else {
      auto out = open_out(report);
      write_report(out);
    }
    if (!csv.empty()) {
      auto out = open_out(csv);
      out << "metric,value\n"
          << "bd_delta_psnr_db," << fmt(c.bd.delta_psnr_db) << "\n"
          << "bd_delta_rate_percent," << fmt(c.bd.delta_rate_percent) << "\n"
          << "geometry_bpp_cartesian," << fmt(c.cartesian.geometry_bpp) << "\n"
          << "geometry_bpp_cylindrical," << fmt(c.cylindrical.geometry_bpp) << "\n";
    }
  } else if (analyze->parsed()) {
    const auto pc = load_input(input);
    {
      auto out = open_out(csv);
      out << "r,mean_knn_distance\n";
      char line[96];
      for (const auto& s : knn_mean_distance(pc, k)) {
        std::snprintf(line, sizeof line, "%.6g,%.6g\n", s.r, s.mean_distance);
        out << line;
      }
    }
    auto out = open_out(occupancy_csv);
    out << "system,depth,voxels,mean_points\n";
    for (auto system : {CoordinateSystem::Cartesian, CoordinateSystem::Cylindrical}) {
      const auto cfg = make_config(pc, system, analyze_depth, grid.log_radial, grid.r_min);
      const auto stats = occupancy_stats(voxelize(pc, cfg));
      out << to_string(system) << "," << analyze_depth << "," << stats.voxels << ","
          << fmt(stats.mean_points) << "\n";
      std::cout << to_string(system) << ": voxels=" << stats.voxels
                << " mean_points=" << fmt(stats.mean_points) << "\n";
    }
  } else if (synth->parsed()) {
    static const std::map<std::string, IntensityModel> kModels{
        {"constant", IntensityModel::Constant},
        {"range-decay", IntensityModel::RangeDecay},
        {"checker", IntensityModel::Checker}};
    spec.intensity = kModels.at(model);
    const auto pc = synth_sweep(spec, seed);
    if (pc.empty()) fail(ErrorKind::InvalidInput, "sweep produced no returns");
    const std::string ext = std::filesystem::path(output).extension().string();
    if (ext == ".bin") {
      write_kitti_bin(output, pc);
    } else if (ext == ".ply") {
      write_ply(output, pc);
    } else {
      fail(ErrorKind::InvalidConfig, "synth output must end in .bin or .ply");
    }
    std::cout << "points=" << pc.size() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const cylpc::Error& e) {
    std::cerr << "error (" << cylpc::to_string(e.kind()) << "): " << e.what() << "\n";
    switch (e.kind()) {
      case cylpc::ErrorKind::CorruptStream: return kExitCorrupt;
      case cylpc::ErrorKind::InvalidConfig: return kExitUsage;
      default: return kExitMalformed;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMalformed;
  }
}
