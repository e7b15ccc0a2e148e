#include "cylpc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "cylpc/error.hpp"

namespace cylpc::kernels {

namespace {

constexpr std::size_t kNoPoint = std::numeric_limits<std::size_t>::max();

// Reports out-of-range bins through `ok` rather than throwing so it can run
// inside an OpenMP region.
std::uint64_t code_of(const CartesianPoint& p, const VoxelGridConfig& cfg, bool& ok) {
  const auto b = cfg.bin(p);
  const std::int64_t n = cfg.bins_per_axis();
  ok = b[0] >= 0 && b[0] < n && b[1] >= 0 && b[1] < n && b[2] >= 0 && b[2] < n;
  if (!ok) return 0;
  return morton::encode(static_cast<std::uint32_t>(b[0]), static_cast<std::uint32_t>(b[1]),
                        static_cast<std::uint32_t>(b[2]));
}

[[noreturn]] void out_of_range(std::span<const CartesianPoint> points, std::size_t i) {
  const auto& p = points[i];
  fail(ErrorKind::OutOfRange, "point " + std::to_string(i) + " (" + std::to_string(p.x) + ", " +
                                  std::to_string(p.y) + ", " + std::to_string(p.z) +
                                  ") lies outside the voxel grid bounds");
}

double distance(const CartesianPoint& a, const CartesianPoint& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double coord(const CartesianPoint& p, int axis) {
  return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
}

double mean_of_sorted(std::vector<double>& d, std::size_t k) {
  std::sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k));
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += d[i];
  return s / static_cast<double>(k);
}

// Balanced k-d tree stored implicitly in a permuted index array: the node for
// range [lo, hi) keeps its splitting point at the midpoint.
class KdTree {
 public:
  explicit KdTree(std::span<const CartesianPoint> points) : points_(points), index_(points.size()) {
    std::iota(index_.begin(), index_.end(), std::size_t{0});
    axis_.assign(points.size(), 0);
    build(0, index_.size());
  }

  // k nearest distances to points_[query], excluding the query itself.
  void nearest(std::size_t query, std::size_t k, std::vector<double>& heap) const {
    heap.clear();
    search(0, index_.size(), query, k, heap);
  }

 private:
  void build(std::size_t lo, std::size_t hi) {
    if (hi - lo <= 1) return;
    double mn[3] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
    double mx[3] = {-mn[0], -mn[1], -mn[2]};
    for (std::size_t i = lo; i < hi; ++i) {
      for (int a = 0; a < 3; ++a) {
        const double c = coord(points_[index_[i]], a);
        mn[a] = std::min(mn[a], c);
        mx[a] = std::max(mx[a], c);
      }
    }
    int axis = 0;
    for (int a = 1; a < 3; ++a) {
      if (mx[a] - mn[a] > mx[axis] - mn[axis]) axis = a;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(index_.begin() + static_cast<std::ptrdiff_t>(lo),
                     index_.begin() + static_cast<std::ptrdiff_t>(mid),
                     index_.begin() + static_cast<std::ptrdiff_t>(hi),
                     [&](std::size_t a, std::size_t b) {
                       return coord(points_[a], axis) < coord(points_[b], axis);
                     });
    axis_[mid] = axis;
    build(lo, mid);
    build(mid + 1, hi);
  }

  void search(std::size_t lo, std::size_t hi, std::size_t query, std::size_t k,
              std::vector<double>& heap) const {
    if (lo >= hi) return;
    const std::size_t mid = lo + (hi - lo) / 2;
    const std::size_t idx = index_[mid];
    const CartesianPoint& q = points_[query];
    if (idx != query) {
      const double d = distance(q, points_[idx]);
      if (heap.size() < k) {
        heap.push_back(d);
        std::push_heap(heap.begin(), heap.end());
      } else if (d < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = d;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    if (hi - lo == 1) return;
    const int axis = axis_[mid];
    const double diff = coord(q, axis) - coord(points_[idx], axis);
    const bool left_first = diff < 0.0;
    if (left_first) {
      search(lo, mid, query, k, heap);
    } else {
      search(mid + 1, hi, query, k, heap);
    }
    if (heap.size() < k || std::abs(diff) <= heap.front()) {
      if (left_first) {
        search(mid + 1, hi, query, k, heap);
      } else {
        search(lo, mid, query, k, heap);
      }
    }
  }

  std::span<const CartesianPoint> points_;
  std::vector<std::size_t> index_;
  std::vector<int> axis_;
};

void check_knn(std::size_t n, std::size_t k) {
  if (k == 0 || n <= k) {
    fail(ErrorKind::InvalidInput, "knn: need 0 < k < N (k = " + std::to_string(k) +
                                      ", N = " + std::to_string(n) + ")");
  }
}

std::size_t chunk_count(std::size_t draws) {
  return (draws + kMonteCarloChunk - 1) / kMonteCarloChunk;
}

std::mt19937_64 chunk_generator(std::uint64_t seed, std::size_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

template <typename Sample>
double chunk_sum(std::size_t chunk, std::size_t draws, const UniformErrorBox& errors,
                 std::uint64_t seed, Sample&& sample) {
  auto gen = chunk_generator(seed, chunk);
  std::uniform_real_distribution<double> u0(-errors.half_width[0], errors.half_width[0]);
  std::uniform_real_distribution<double> u1(-errors.half_width[1], errors.half_width[1]);
  std::uniform_real_distribution<double> u2(-errors.half_width[2], errors.half_width[2]);
  const std::size_t begin = chunk * kMonteCarloChunk;
  const std::size_t end = std::min(draws, begin + kMonteCarloChunk);
  double sum = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double e1 = u0(gen);
    const double e2 = u1(gen);
    const double e3 = u2(gen);
    sum += sample(e1, e2, e3);
  }
  return sum;
}

void check_mc(const UniformErrorBox& errors, std::size_t draws) {
  if (draws == 0) fail(ErrorKind::InvalidInput, "monte carlo: draws must be positive");
  for (double w : errors.half_width) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      fail(ErrorKind::InvalidInput, "monte carlo: half widths must be finite and >= 0");
    }
  }
}

template <typename Sample>
double mc_serial(const UniformErrorBox& errors, std::size_t draws, std::uint64_t seed,
                 Sample&& sample) {
  check_mc(errors, draws);
  const std::size_t chunks = chunk_count(draws);
  double total = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) total += chunk_sum(c, draws, errors, seed, sample);
  return total / static_cast<double>(draws);
}

template <typename Sample>
double mc_parallel(const UniformErrorBox& errors, std::size_t draws, std::uint64_t seed,
                   Sample&& sample) {
  check_mc(errors, draws);
  const std::size_t chunks = chunk_count(draws);
  std::vector<double> sums(chunks);
  const auto n = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < n; ++c) {
    sums[static_cast<std::size_t>(c)] =
        chunk_sum(static_cast<std::size_t>(c), draws, errors, seed, sample);
  }
  double total = 0.0;
  for (double s : sums) total += s;
  return total / static_cast<double>(draws);
}

}  // namespace

namespace serial {

std::vector<std::uint64_t> voxel_codes(std::span<const CartesianPoint> points,
                                       const VoxelGridConfig& cfg) {
  std::vector<std::uint64_t> codes(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool ok = false;
    codes[i] = code_of(points[i], cfg, ok);
    if (!ok) out_of_range(points, i);
  }
  return codes;
}

std::vector<double> knn_mean_distance(std::span<const CartesianPoint> points, std::size_t k) {
  check_knn(points.size(), k);
  std::vector<double> out(points.size());
  std::vector<double> d;
  d.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    d.clear();
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j != i) d.push_back(distance(points[i], points[j]));
    }
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k - 1), d.end());
    out[i] = mean_of_sorted(d, k);
  }
  return out;
}

double mc_mean_error_cylindrical(double r, const UniformErrorBox& errors, std::size_t draws,
                                 std::uint64_t seed) {
  if (!(r >= 0.0)) fail(ErrorKind::InvalidInput, "monte carlo: r must be >= 0");
  return mc_serial(errors, draws, seed,
                   [r](double e1, double e2, double e3) { return voxelization_error_cylindrical(r, e1, e2, e3); });
}

double mc_mean_error_cartesian(const UniformErrorBox& errors, std::size_t draws,
                               std::uint64_t seed) {
  return mc_serial(errors, draws, seed,
                   [](double e1, double e2, double e3) { return e1 * e1 + e2 * e2 + e3 * e3; });
}

}  // namespace serial

namespace parallel {

std::vector<std::uint64_t> voxel_codes(std::span<const CartesianPoint> points,
                                       const VoxelGridConfig& cfg) {
  std::vector<std::uint64_t> codes(points.size());
  std::size_t first_bad = kNoPoint;
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for reduction(min : first_bad)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    bool ok = false;
    codes[u] = code_of(points[u], cfg, ok);
    if (!ok) first_bad = std::min(first_bad, u);
  }
  if (first_bad != kNoPoint) out_of_range(points, first_bad);
  return codes;
}

std::vector<double> knn_mean_distance(std::span<const CartesianPoint> points, std::size_t k) {
  check_knn(points.size(), k);
  const KdTree tree(points);
  std::vector<double> out(points.size());
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel
  {
    std::vector<double> heap;
    heap.reserve(k + 1);
#pragma omp for schedule(dynamic, 256)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      tree.nearest(static_cast<std::size_t>(i), k, heap);
      out[static_cast<std::size_t>(i)] = mean_of_sorted(heap, k);
    }
  }
  return out;
}

double mc_mean_error_cylindrical(double r, const UniformErrorBox& errors, std::size_t draws,
                                 std::uint64_t seed) {
  if (!(r >= 0.0)) fail(ErrorKind::InvalidInput, "monte carlo: r must be >= 0");
  return mc_parallel(errors, draws, seed,
                     [r](double e1, double e2, double e3) { return voxelization_error_cylindrical(r, e1, e2, e3); });
}

double mc_mean_error_cartesian(const UniformErrorBox& errors, std::size_t draws,
                               std::uint64_t seed) {
  return mc_parallel(errors, draws, seed,
                     [](double e1, double e2, double e3) { return e1 * e1 + e2 * e2 + e3 * e3; });
}

}  // namespace parallel

}  // namespace cylpc::kernels
