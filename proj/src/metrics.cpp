#include "cylpc/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "cylpc/error.hpp"

namespace cylpc {

double mse(std::span<const double> original, std::span<const double> decoded) {
  if (original.size() != decoded.size()) {
    fail(ErrorKind::InvalidInput, "attribute lengths differ: " + std::to_string(original.size()) +
                                      " vs " + std::to_string(decoded.size()));
  }
  if (original.empty()) fail(ErrorKind::InvalidInput, "attribute lists are empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    const double d = original[i] - decoded[i];
    sum += d * d;
  }
  return sum / static_cast<double>(original.size());
}

Psnr psnr_attribute(std::span<const double> original, std::span<const double> decoded) {
  const double m = mse(original, decoded);
  if (m == 0.0) return Psnr::lossless();
  return Psnr::decibels(10.0 * std::log10(255.0 * 255.0 / m));
}

double attribute_bpp(std::uint64_t bits, std::size_t point_count) {
  if (point_count == 0) fail(ErrorKind::InvalidInput, "attribute_bpp: point count must be >= 1");
  return static_cast<double>(bits) / static_cast<double>(point_count);
}

RdCurve::RdCurve(std::vector<RatePoint> points) : points_(std::move(points)) {
  if (points_.size() < 4) {
    fail(ErrorKind::InvalidInput,
         "rd curve needs at least 4 points, got " + std::to_string(points_.size()));
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!(p.bpp > 0.0) || !std::isfinite(p.bpp) || !std::isfinite(p.psnr_db)) {
      fail(ErrorKind::InvalidInput, "rd point " + std::to_string(i) +
                                        " needs finite bpp > 0 and finite PSNR");
    }
    if (i > 0 && !(p.bpp > points_[i - 1].bpp)) {
      fail(ErrorKind::InvalidInput, "rd curve rates must be strictly increasing");
    }
  }
}

RdCurve RdCurve::from_samples(std::vector<RatePoint> samples) {
  std::erase_if(samples, [](const RatePoint& p) { return !std::isfinite(p.psnr_db); });
  std::sort(samples.begin(), samples.end(), [](const RatePoint& a, const RatePoint& b) {
    return a.bpp < b.bpp || (a.bpp == b.bpp && a.psnr_db > b.psnr_db);
  });
  samples.erase(std::unique(samples.begin(), samples.end(),
                            [](const RatePoint& a, const RatePoint& b) { return a.bpp == b.bpp; }),
                samples.end());
  return RdCurve(std::move(samples));
}

std::size_t RdCurve::monotonicity_violations() const noexcept {
  std::size_t n = 0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (points_[i].psnr_db < points_[i - 1].psnr_db) ++n;
  }
  return n;
}

namespace {

using Cubic = Eigen::Vector4d;  // c0 + c1 x + c2 x^2 + c3 x^3

Cubic fit_cubic(const std::vector<double>& x, const std::vector<double>& y) {
  Eigen::MatrixXd v(static_cast<Eigen::Index>(x.size()), 4);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    v(r, 0) = 1.0;
    v(r, 1) = x[i];
    v(r, 2) = x[i] * x[i];
    v(r, 3) = x[i] * x[i] * x[i];
    rhs(r) = y[i];
  }
  return v.colPivHouseholderQr().solve(rhs);
}

double antiderivative(const Cubic& c, double x) {
  return x * (c[0] + x * (c[1] / 2.0 + x * (c[2] / 3.0 + x * c[3] / 4.0)));
}

double mean_gap(const std::vector<double>& xa, const std::vector<double>& ya,
                const std::vector<double>& xb, const std::vector<double>& yb, const char* what) {
  const double lo = std::max(*std::min_element(xa.begin(), xa.end()),
                             *std::min_element(xb.begin(), xb.end()));
  const double hi = std::min(*std::max_element(xa.begin(), xa.end()),
                             *std::max_element(xb.begin(), xb.end()));
  if (!(hi > lo)) {
    fail(ErrorKind::InvalidInput, std::string("rd curves do not overlap in ") + what);
  }
  const Cubic pa = fit_cubic(xa, ya);
  const Cubic pb = fit_cubic(xb, yb);
  const double ia = antiderivative(pa, hi) - antiderivative(pa, lo);
  const double ib = antiderivative(pb, hi) - antiderivative(pb, lo);
  return (ib - ia) / (hi - lo);
}

}  // namespace

BdResult bd_metrics(const RdCurve& a, const RdCurve& b) {
  std::vector<double> la, pa, lb, pb;
  for (const auto& p : a.points()) {
    la.push_back(std::log10(p.bpp));
    pa.push_back(p.psnr_db);
  }
  for (const auto& p : b.points()) {
    lb.push_back(std::log10(p.bpp));
    pb.push_back(p.psnr_db);
  }
  BdResult r;
  r.delta_psnr_db = mean_gap(la, pa, lb, pb, "rate");
  const double log_gap = mean_gap(pa, la, pb, lb, "PSNR");
  r.delta_rate_percent = (std::pow(10.0, log_gap) - 1.0) * 100.0;
  return r;
}

void write_rd_csv(std::ostream& out, std::span<const RatePoint> points) {
  out << "bpp,psnr_db\n";
  char line[64];
  for (const auto& p : points) {
    if (std::isinf(p.psnr_db)) {
      std::snprintf(line, sizeof line, "%.6g,inf\n", p.bpp);
    } else {
      std::snprintf(line, sizeof line, "%.6g,%.6g\n", p.bpp, p.psnr_db);
    }
    out << line;
  }
}

std::vector<RatePoint> read_rd_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Parse, "rd csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "bpp,psnr_db") fail(ErrorKind::Parse, "rd csv: expected header 'bpp,psnr_db'");
  std::vector<RatePoint> points;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      fail(ErrorKind::Parse, "rd csv line " + std::to_string(line_no) + ": expected two fields");
    }
    try {
      std::size_t used = 0;
      RatePoint p;
      const std::string rate = line.substr(0, comma);
      const std::string psnr = line.substr(comma + 1);
      p.bpp = std::stod(rate, &used);
      if (used != rate.size()) throw std::invalid_argument(rate);
      p.psnr_db = std::stod(psnr, &used);
      if (used != psnr.size()) throw std::invalid_argument(psnr);
      points.push_back(p);
    } catch (const std::logic_error&) {
      fail(ErrorKind::Parse, "rd csv line " + std::to_string(line_no) + ": bad number");
    }
  }
  return points;
}

}  // namespace cylpc
