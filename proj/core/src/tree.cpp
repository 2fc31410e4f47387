#include <algorithm>
#include <array>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "fleetrisk/error.hpp"
#include "fleetrisk/learners.hpp"
#include "fleetrisk/schema_io.hpp"

namespace fleetrisk {
namespace {

using ClassCounts = std::array<std::size_t, kNumRiskClasses>;

double gini(const ClassCounts& counts, std::size_t total) {
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (auto c : counts) {
    const double p = double(c) / double(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

// Majority class; ties resolve to the higher risk.
RiskLabel majority(const ClassCounts& counts) {
  int best = 0;
  for (int c = 1; c < kNumRiskClasses; ++c) {
    if (counts[c] >= counts[best]) best = c;
  }
  return label_from_index(best);
}

struct Builder {
  const Dataset& x;
  std::span<const RiskLabel> y;
  int max_depth;
  std::vector<DecisionTree::Node>& nodes;

  int build(std::vector<std::size_t>& index, int depth) {
    ClassCounts counts{};
    for (auto i : index) ++counts[class_index(y[i])];
    const int node_id = static_cast<int>(nodes.size());
    nodes.push_back({});
    nodes[node_id].label = majority(counts);

    const std::size_t n = index.size();
    const double parent = gini(counts, n);
    if (depth >= max_depth || parent == 0.0) return node_id;

    double best_impurity = parent - 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> order(index);
    for (std::size_t f = 0; f < x.cols(); ++f) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x.row(a)[f] < x.row(b)[f];
      });
      ClassCounts left{};
      for (std::size_t k = 0; k + 1 < n; ++k) {
        ++left[class_index(y[order[k]])];
        const double v = x.row(order[k])[f];
        const double next = x.row(order[k + 1])[f];
        if (!(v < next)) continue;
        ClassCounts right{};
        for (int c = 0; c < kNumRiskClasses; ++c) right[c] = counts[c] - left[c];
        const std::size_t n_left = k + 1;
        const std::size_t n_right = n - n_left;
        const double impurity =
            (double(n_left) * gini(left, n_left) + double(n_right) * gini(right, n_right)) /
            double(n);
        if (impurity < best_impurity) {
          best_impurity = impurity;
          best_feature = static_cast<int>(f);
          best_threshold = v + 0.5 * (next - v);
        }
      }
    }
    if (best_feature < 0) return node_id;

    std::vector<std::size_t> left_index;
    std::vector<std::size_t> right_index;
    for (auto i : index) {
      (x.row(i)[best_feature] <= best_threshold ? left_index : right_index).push_back(i);
    }
    index.clear();
    index.shrink_to_fit();
    nodes[node_id].feature = best_feature;
    nodes[node_id].threshold = best_threshold;
    const int left = build(left_index, depth + 1);
    const int right = build(right_index, depth + 1);
    nodes[node_id].left = left;
    nodes[node_id].right = right;
    return node_id;
  }
};

}  // namespace

DecisionTree fit_tree_baseline(const Dataset& x, std::span<const RiskLabel> y, int depth) {
  if (x.rows() == 0) throw Error(ErrorKind::Domain, "empty training set");
  if (y.size() != x.rows()) {
    throw Error(ErrorKind::Alignment, "label count does not match the training set");
  }
  if (depth < 0) throw Error(ErrorKind::Config, "tree depth must be >= 0");
  DecisionTree tree;
  std::vector<std::size_t> index(x.rows());
  std::iota(index.begin(), index.end(), std::size_t{0});
  Builder{x, y, depth, tree.nodes_}.build(index, 0);
  return tree;
}

RiskLabel DecisionTree::predict(std::span<const double> x) const {
  int id = 0;
  while (nodes_[id].feature >= 0) {
    const auto& node = nodes_[id];
    id = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes_[id].label;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes_[i].feature >= 0) {
      level[nodes_[i].left] = level[i] + 1;
      level[nodes_[i].right] = level[i] + 1;
    }
  }
  return deepest;
}

void DecisionTree::save(std::ostream& out) const {
  out << "tree " << nodes_.size() << '\n';
  for (const auto& node : nodes_) {
    out << node.feature << ' ' << format_double(node.threshold) << ' ' << node.left << ' '
        << node.right << ' ' << to_string(node.label) << '\n';
  }
}

DecisionTree DecisionTree::load(std::istream& in) {
  std::string word;
  std::size_t n = 0;
  if (!(in >> word >> n) || word != "tree" || n == 0) {
    throw Error(ErrorKind::Parse, "model file: expected 'tree'");
  }
  DecisionTree tree;
  for (std::size_t i = 0; i < n; ++i) {
    Node node;
    std::string threshold;
    std::string label;
    if (!(in >> node.feature >> threshold >> node.left >> node.right >> label)) {
      throw Error(ErrorKind::Parse, "model file: truncated tree");
    }
    node.threshold = std::stod(threshold);
    node.label = parse_risk_label(label);
    tree.nodes_.push_back(node);
  }
  return tree;
}

}  // namespace fleetrisk
