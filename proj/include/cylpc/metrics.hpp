#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace cylpc {

/// Attribute PSNR with a 255 peak. Identical signals yield a lossless marker
/// instead of a number.
class Psnr {
 public:
  static Psnr lossless() noexcept { return Psnr(true, std::numeric_limits<double>::infinity()); }
  static Psnr decibels(double db) noexcept { return Psnr(false, db); }

  bool is_lossless() const noexcept { return lossless_; }
  // +inf when lossless.
  double db() const noexcept { return db_; }

 private:
  Psnr(bool lossless, double db) : lossless_(lossless), db_(db) {}
  bool lossless_;
  double db_;
};

Psnr psnr_attribute(std::span<const double> original, std::span<const double> decoded);
double mse(std::span<const double> original, std::span<const double> decoded);

double attribute_bpp(std::uint64_t bits, std::size_t point_count);

struct RatePoint {
  double bpp = 0.0;
  double psnr_db = 0.0;  // +inf marks a lossless point
};

/// At least four finite points, strictly increasing in bpp.
class RdCurve {
 public:
  explicit RdCurve(std::vector<RatePoint> points);

  // Sorts by rate, drops lossless points and repeated rates (keeping the best
  // PSNR), then validates. Use for raw sweep output.
  static RdCurve from_samples(std::vector<RatePoint> samples);

  std::span<const RatePoint> points() const noexcept { return points_; }
  // Adjacent pairs where PSNR drops as rate grows; tolerated, only reported.
  std::size_t monotonicity_violations() const noexcept;

 private:
  std::vector<RatePoint> points_;
};

struct BdResult {
  double delta_psnr_db = 0.0;       // average PSNR gain of B over A
  double delta_rate_percent = 0.0;  // average rate change of B relative to A
};

/// Classic Bjontegaard deltas: cubic least-squares fits of PSNR against
/// log10(rate) and of log10(rate) against PSNR, integrated in closed form over
/// the overlapping interval of the two curves.
BdResult bd_metrics(const RdCurve& a, const RdCurve& b);

// "bpp,psnr_db" with six significant digits; lossless rows read "inf".
void write_rd_csv(std::ostream& out, std::span<const RatePoint> points);
std::vector<RatePoint> read_rd_csv(std::istream& in);

}  // namespace cylpc
