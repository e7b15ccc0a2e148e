#pragma once

// Independent Bjontegaard reference: normal-equation cubic fit solved by
// Gaussian elimination in long double, then dense trapezoid integration.

#include <algorithm>
#include <span>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "cylpc/metrics.hpp"

namespace cylpc::fixtures {

inline std::array<long double, 4> oracle_fit(const std::vector<double>& x,
                                              const std::vector<double>& y) {
  long double m[4][5] = {};
  for (std::size_t i = 0; i < x.size(); ++i) {
    long double pw[7];
    pw[0] = 1;
    for (int p = 1; p < 7; ++p) pw[p] = pw[p - 1] * x[i];
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) m[r][c] += pw[r + c];
      m[r][4] += pw[r] * y[i];
    }
  }
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r) {
      if (std::fabs(m[r][c]) > std::fabs(m[piv][c])) piv = r;
    }
    for (int k = 0; k < 5; ++k) std::swap(m[c][k], m[piv][k]);
    for (int r = 0; r < 4; ++r) {
      if (r == c) continue;
      const long double f = m[r][c] / m[c][c];
      for (int k = c; k < 5; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return {m[0][4] / m[0][0], m[1][4] / m[1][1], m[2][4] / m[2][2], m[3][4] / m[3][3]};
}

inline long double oracle_eval(const std::array<long double, 4>& c, long double x) {
  return c[0] + x * (c[1] + x * (c[2] + x * c[3]));
}

inline double oracle_gap(const std::vector<double>& xa, const std::vector<double>& ya,
                         const std::vector<double>& xb, const std::vector<double>& yb) {
  const double lo = std::max(*std::min_element(xa.begin(), xa.end()),
                             *std::min_element(xb.begin(), xb.end()));
  const double hi = std::min(*std::max_element(xa.begin(), xa.end()),
                             *std::max_element(xb.begin(), xb.end()));
  const auto pa = oracle_fit(xa, ya);
  const auto pb = oracle_fit(xb, yb);
  constexpr int kSteps = 200000;
  const long double h = (static_cast<long double>(hi) - lo) / kSteps;
  long double sum = 0;
  for (int i = 0; i <= kSteps; ++i) {
    const long double x = lo + i * h;
    const long double d = oracle_eval(pb, x) - oracle_eval(pa, x);
    sum += (i == 0 || i == kSteps) ? d / 2 : d;
  }
  return static_cast<double>(sum * h / (static_cast<long double>(hi) - lo));
}

inline BdResult oracle_bd(std::span<const RatePoint> a, std::span<const RatePoint> b) {
  std::vector<double> la, pa, lb, pb;
  for (const auto& p : a) {
    la.push_back(std::log10(p.bpp));
    pa.push_back(p.psnr_db);
  }
  for (const auto& p : b) {
    lb.push_back(std::log10(p.bpp));
    pb.push_back(p.psnr_db);
  }
  BdResult r;
  r.delta_psnr_db = oracle_gap(la, pa, lb, pb);
  r.delta_rate_percent = (std::pow(10.0, oracle_gap(pa, la, pb, lb)) - 1.0) * 100.0;
  return r;
}

}  // namespace cylpc::fixtures
