#include "cylpc/raht.hpp"

#include <string>

#include "cylpc/error.hpp"

namespace cylpc {

namespace {

void check_leaves(std::span<const std::uint64_t> codes, int depth) {
  if (depth < 1 || depth > morton::kMaxDepth) {
    fail(ErrorKind::InvalidInput, "raht: depth out of range: " + std::to_string(depth));
  }
  if (codes.empty()) fail(ErrorKind::InvalidInput, "raht: no leaves");
  const std::uint64_t limit = std::uint64_t{1} << (3 * depth);
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (codes[i] >= limit) {
      fail(ErrorKind::InvalidInput, "raht: leaf " + std::to_string(i) + " exceeds depth");
    }
    if (i > 0 && codes[i] == codes[i - 1]) {
      fail(ErrorKind::InvalidInput, "raht: duplicate leaf index at position " + std::to_string(i));
    }
    if (i > 0 && codes[i] < codes[i - 1]) {
      fail(ErrorKind::InvalidInput, "raht: leaves not sorted at position " + std::to_string(i));
    }
  }
}

void check_weights(std::span<const std::uint32_t> weights, std::size_t n) {
  if (!weights.empty() && weights.size() != n) {
    fail(ErrorKind::InvalidInput, "raht: weight count does not match leaf count");
  }
  for (std::uint32_t w : weights) {
    if (w == 0) fail(ErrorKind::InvalidInput, "raht: leaf weights must be >= 1");
  }
}

// Merge schedule derived from geometry only. Step s merges nodes keyed by
// code >> s whose keys differ only in the lowest bit; steps without any pair
// are dropped since they leave the node list untouched.
struct MergeStep {
  std::vector<std::uint32_t> first;        // per output node: first input node
  std::vector<std::uint32_t> high_index;   // per output node: slot in highs, or kNoPair
  std::vector<double> weight;              // per input node
  std::size_t inputs = 0;
};

constexpr std::uint32_t kNoPair = 0xffffffffu;

struct MergePlan {
  std::vector<MergeStep> steps;
  std::size_t highs = 0;
};

MergePlan make_plan(std::span<const std::uint64_t> codes, std::span<const std::uint32_t> weights,
                    int depth) {
  MergePlan plan;
  std::vector<std::uint64_t> keys(codes.begin(), codes.end());
  std::vector<double> w(codes.size(), 1.0);
  for (std::size_t i = 0; i < weights.size(); ++i) w[i] = weights[i];

  for (int s = 0; s < 3 * depth && keys.size() > 1; ++s) {
    bool any_pair = false;
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
      if ((keys[i] >> 1) == (keys[i + 1] >> 1)) {
        any_pair = true;
        break;
      }
    }
    if (!any_pair) {
      for (auto& k : keys) k >>= 1;
      continue;
    }
    MergeStep step;
    step.inputs = keys.size();
    step.weight = w;
    std::vector<std::uint64_t> next_keys;
    std::vector<double> next_w;
    next_keys.reserve(keys.size());
    next_w.reserve(keys.size());
    for (std::size_t i = 0; i < keys.size();) {
      step.first.push_back(static_cast<std::uint32_t>(i));
      if (i + 1 < keys.size() && (keys[i] >> 1) == (keys[i + 1] >> 1)) {
        step.high_index.push_back(static_cast<std::uint32_t>(plan.highs++));
        next_w.push_back(w[i] + w[i + 1]);
        i += 2;
      } else {
        step.high_index.push_back(kNoPair);
        next_w.push_back(w[i]);
        i += 1;
      }
      next_keys.push_back(keys[i - 1] >> 1);
    }
    keys = std::move(next_keys);
    w = std::move(next_w);
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

constexpr std::ptrdiff_t kParallelThreshold = 4096;

}  // namespace

CoefficientStream raht_forward(std::span<const WeightedLeaf> leaves, int depth) {
  std::vector<std::uint64_t> codes(leaves.size());
  std::vector<std::uint32_t> weights(leaves.size());
  std::vector<double> cur(leaves.size());
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    codes[i] = leaves[i].code;
    weights[i] = leaves[i].weight;
    cur[i] = leaves[i].attribute;
  }
  check_leaves(codes, depth);
  check_weights(weights, codes.size());

  const MergePlan plan = make_plan(codes, weights, depth);
  CoefficientStream out;
  out.highs.resize(plan.highs);
  std::vector<double> next;
  for (const auto& step : plan.steps) {
    const auto n = static_cast<std::ptrdiff_t>(step.first.size());
    next.resize(step.first.size());
#pragma omp parallel for if (n > kParallelThreshold)
    for (std::ptrdiff_t o = 0; o < n; ++o) {
      const std::uint32_t f = step.first[static_cast<std::size_t>(o)];
      const std::uint32_t h = step.high_index[static_cast<std::size_t>(o)];
      if (h == kNoPair) {
        next[static_cast<std::size_t>(o)] = cur[f];
      } else {
        const detail::Butterfly b(step.weight[f], step.weight[f + 1]);
        b.forward(cur[f], cur[f + 1], next[static_cast<std::size_t>(o)], out.highs[h]);
      }
    }
    cur.swap(next);
  }
  out.dc = cur.front();
  return out;
}

std::vector<WeightedLeaf> raht_inverse(const CoefficientStream& coeffs,
                                       std::span<const std::uint64_t> codes,
                                       std::span<const std::uint32_t> weights, int depth) {
  check_leaves(codes, depth);
  check_weights(weights, codes.size());
  if (coeffs.size() != codes.size()) {
    fail(ErrorKind::InvalidInput, "raht_inverse: " + std::to_string(coeffs.size()) +
                                      " coefficients for " + std::to_string(codes.size()) +
                                      " leaves");
  }
  const MergePlan plan = make_plan(codes, weights, depth);
  std::vector<double> cur{coeffs.dc};
  std::vector<double> prev;
  for (auto it = plan.steps.rbegin(); it != plan.steps.rend(); ++it) {
    const auto& step = *it;
    const auto n = static_cast<std::ptrdiff_t>(step.first.size());
    prev.resize(step.inputs);
#pragma omp parallel for if (n > kParallelThreshold)
    for (std::ptrdiff_t o = 0; o < n; ++o) {
      const std::uint32_t f = step.first[static_cast<std::size_t>(o)];
      const std::uint32_t h = step.high_index[static_cast<std::size_t>(o)];
      if (h == kNoPair) {
        prev[f] = cur[static_cast<std::size_t>(o)];
      } else {
        const detail::Butterfly b(step.weight[f], step.weight[f + 1]);
        b.inverse(cur[static_cast<std::size_t>(o)], coeffs.highs[h], prev[f], prev[f + 1]);
      }
    }
    cur.swap(prev);
  }
  std::vector<WeightedLeaf> out(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) {
    out[i] = {codes[i], cur[i], weights.empty() ? 1u : weights[i]};
  }
  return out;
}

std::vector<WeightedLeaf> raht_inverse(const CoefficientStream& coeffs, const Octree& geometry) {
  if (geometry.levels.empty()) fail(ErrorKind::InvalidInput, "raht_inverse: empty geometry");
  return raht_inverse(coeffs, geometry.leaves(), geometry.leaf_weights, geometry.depth);
}

namespace serial {

namespace {

struct Node {
  std::uint64_t key;
  double value;
  double weight;
};

}  // namespace

CoefficientStream raht_forward(std::span<const WeightedLeaf> leaves, int depth) {
  std::vector<std::uint64_t> codes;
  std::vector<std::uint32_t> weights;
  for (const auto& l : leaves) {
    codes.push_back(l.code);
    weights.push_back(l.weight);
  }
  check_leaves(codes, depth);
  check_weights(weights, codes.size());

  std::vector<Node> nodes;
  for (const auto& l : leaves) nodes.push_back({l.code, l.attribute, double(l.weight)});
  CoefficientStream out;
  for (int s = 0; s < 3 * depth; ++s) {
    std::vector<Node> merged;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (i + 1 < nodes.size() && (nodes[i].key >> 1) == (nodes[i + 1].key >> 1)) {
        const detail::Butterfly b(nodes[i].weight, nodes[i + 1].weight);
        double low = 0.0;
        double high = 0.0;
        b.forward(nodes[i].value, nodes[i + 1].value, low, high);
        out.highs.push_back(high);
        merged.push_back({nodes[i].key >> 1, low, nodes[i].weight + nodes[i + 1].weight});
        ++i;
      } else {
        merged.push_back({nodes[i].key >> 1, nodes[i].value, nodes[i].weight});
      }
    }
    nodes = std::move(merged);
  }
  out.dc = nodes.front().value;
  return out;
}

std::vector<WeightedLeaf> raht_inverse(const CoefficientStream& coeffs,
                                       std::span<const std::uint64_t> codes,
                                       std::span<const std::uint32_t> weights, int depth) {
  check_leaves(codes, depth);
  check_weights(weights, codes.size());
  if (coeffs.size() != codes.size()) {
    fail(ErrorKind::InvalidInput, "raht_inverse: coefficient count does not match leaf count");
  }
  // Replay the forward merges on geometry to learn the tree, then unwind it.
  std::vector<std::vector<Node>> per_step;
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    nodes.push_back({codes[i], 0.0, weights.empty() ? 1.0 : double(weights[i])});
  }
  for (int s = 0; s < 3 * depth; ++s) {
    per_step.push_back(nodes);
    std::vector<Node> merged;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (i + 1 < nodes.size() && (nodes[i].key >> 1) == (nodes[i + 1].key >> 1)) {
        merged.push_back({nodes[i].key >> 1, 0.0, nodes[i].weight + nodes[i + 1].weight});
        ++i;
      } else {
        merged.push_back({nodes[i].key >> 1, 0.0, nodes[i].weight});
      }
    }
    nodes = std::move(merged);
  }

  std::vector<double> values{coeffs.dc};
  std::size_t high_end = coeffs.highs.size();
  for (int s = 3 * depth - 1; s >= 0; --s) {
    const auto& inputs = per_step[static_cast<std::size_t>(s)];
    std::size_t pairs = 0;
    for (std::size_t i = 0; i + 1 < inputs.size(); ++i) {
      if ((inputs[i].key >> 1) == (inputs[i + 1].key >> 1)) {
        ++pairs;
        ++i;
      }
    }
    std::size_t h = high_end - pairs;
    high_end = h;
    std::vector<double> expanded(inputs.size());
    std::size_t o = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i, ++o) {
      if (i + 1 < inputs.size() && (inputs[i].key >> 1) == (inputs[i + 1].key >> 1)) {
        const detail::Butterfly b(inputs[i].weight, inputs[i + 1].weight);
        b.inverse(values[o], coeffs.highs[h++], expanded[i], expanded[i + 1]);
        ++i;
      } else {
        expanded[i] = values[o];
      }
    }
    values = std::move(expanded);
  }
  std::vector<WeightedLeaf> out(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) {
    out[i] = {codes[i], values[i], weights.empty() ? 1u : weights[i]};
  }
  return out;
}

}  // namespace serial

}  // namespace cylpc
