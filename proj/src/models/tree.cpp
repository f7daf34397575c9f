#include <algorithm>
#include <functional>
#include <numeric>

#include "paqreg/models/trees.hpp"

namespace paqreg::models {

SortedColumns::SortedColumns(const Matrix& X) : order_(X.cols) {
  for (std::size_t f = 0; f < X.cols; ++f) {
    auto& o = order_[f];
    o.resize(X.rows);
    std::iota(o.begin(), o.end(), 0);
    std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return X(a, f) < X(b, f); });
  }
}

namespace {

struct Split {
  int feature = -1;
  std::size_t n_left = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, std::span<const double> y, std::span<const std::size_t> samples,
              const SortedColumns& sorted, const TreeParams& params, Rng& rng)
      : X_(X), params_(params), rng_(rng), rows_(samples.begin(), samples.end()), goes_left_(samples.size(), 0) {
    const std::size_t m = samples.size();
    target_.resize(m);
    for (std::size_t p = 0; p < m; ++p) target_[p] = y[samples[p]];

    // positions_of[row] lists the sample positions holding that row, so each
    // feature's row order expands into a position order without re-sorting.
    std::vector<std::vector<std::size_t>> positions_of(X.rows);
    for (std::size_t p = 0; p < m; ++p) positions_of[samples[p]].push_back(p);
    order_.resize(X.cols);
    for (std::size_t f = 0; f < X.cols; ++f) {
      auto& o = order_[f];
      o.reserve(m);
      for (std::size_t row : sorted.order(f))
        for (std::size_t p : positions_of[row]) o.push_back(p);
    }
    scratch_.resize(m);
    features_.resize(X.cols);
    std::iota(features_.begin(), features_.end(), 0);
  }

  std::vector<TreeNode> build() {
    if (!rows_.empty()) grow(0, rows_.size(), 0);
    return std::move(nodes_);
  }

 private:
  double x_at(std::size_t pos, std::size_t f) const { return X_(rows_[pos], f); }

  int grow(std::size_t b, std::size_t e, std::size_t depth) {
    const std::size_t n = e - b;
    const auto& any = order_.empty() ? identity_range(b, e) : order_[0];
    double sum = 0.0, lo = target_[any[b]], hi = lo;
    for (std::size_t i = b; i < e; ++i) {
      const double t = target_[any[i]];
      sum += t;
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    const int id = static_cast<int>(nodes_.size());
    TreeNode node;
    node.n_samples = n;
    node.value = (lo == hi) ? lo : sum / static_cast<double>(n);
    nodes_.push_back(node);

    if (depth >= params_.max_depth || n < 2 * std::max<std::size_t>(params_.min_samples_leaf, 1) || lo == hi ||
        order_.empty())
      return id;

    const Split best = find_split(b, e, sum);
    if (best.feature < 0 || !(best.gain > 0.0)) return id;

    const auto& fo = order_[static_cast<std::size_t>(best.feature)];
    for (std::size_t i = b; i < e; ++i) goes_left_[fo[i]] = (i - b) < best.n_left ? 1 : 0;
    for (auto& o : order_) {
      auto* out = scratch_.data();
      std::size_t l = 0, r = best.n_left;
      for (std::size_t i = b; i < e; ++i) {
        if (goes_left_[o[i]])
          out[l++] = o[i];
        else
          out[r++] = o[i];
      }
      std::copy(out, out + n, o.begin() + static_cast<std::ptrdiff_t>(b));
    }

    const int left = grow(b, b + best.n_left, depth + 1);
    const int right = grow(b + best.n_left, e, depth + 1);
    TreeNode& self = nodes_[static_cast<std::size_t>(id)];
    self.feature = best.feature;
    self.threshold = best.threshold;
    self.gain = best.gain;
    self.left = left;
    self.right = right;
    return id;
  }

  Split find_split(std::size_t b, std::size_t e, double sum) {
    const std::size_t n = e - b;
    const std::size_t min_leaf = std::max<std::size_t>(params_.min_samples_leaf, 1);
    const double parent = sum * sum / static_cast<double>(n);

    std::size_t n_try = features_.size();
    if (params_.max_features > 0 && params_.max_features < features_.size()) {
      n_try = params_.max_features;
      for (std::size_t i = 0; i < n_try; ++i) {
        const std::size_t j = i + rng_.below(features_.size() - i);
        std::swap(features_[i], features_[j]);
      }
    }
    std::vector<std::size_t> candidates(features_.begin(), features_.begin() + static_cast<std::ptrdiff_t>(n_try));
    std::sort(candidates.begin(), candidates.end());

    Split best;
    for (std::size_t f : candidates) {
      const auto& o = order_[f];
      double left_sum = 0.0;
      for (std::size_t i = b; i + 1 < e; ++i) {
        left_sum += target_[o[i]];
        const std::size_t nl = i - b + 1;
        const std::size_t nr = n - nl;
        if (nl < min_leaf) continue;
        if (nr < min_leaf) break;
        const double xa = x_at(o[i], f), xb = x_at(o[i + 1], f);
        if (!(xa < xb)) continue;
        const double right_sum = sum - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(nl) +
                            right_sum * right_sum / static_cast<double>(nr) - parent;
        if (gain > best.gain) {
          double thr = xa + (xb - xa) / 2.0;
          if (!(thr < xb)) thr = xa;
          best = {static_cast<int>(f), nl, thr, gain};
        }
      }
    }
    return best;
  }

  const std::vector<std::size_t>& identity_range(std::size_t, std::size_t e) {
    if (identity_.size() < e) {
      identity_.resize(rows_.size());
      std::iota(identity_.begin(), identity_.end(), 0);
    }
    return identity_;
  }

  const Matrix& X_;
  const TreeParams& params_;
  Rng& rng_;
  std::vector<std::size_t> rows_;
  std::vector<double> target_;
  std::vector<std::vector<std::size_t>> order_;
  std::vector<std::size_t> scratch_;
  std::vector<char> goes_left_;
  std::vector<std::size_t> features_;
  std::vector<std::size_t> identity_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

RegressionTree RegressionTree::fit(const Matrix& X, std::span<const double> y, std::span<const std::size_t> samples,
                                   const SortedColumns& sorted, const TreeParams& params, Rng& rng) {
  if (y.size() != X.rows) throw InputError("tree: target length does not match rows");
  if (sorted.n_features() != X.cols) throw InputError("tree: sorted index built for a different matrix");
  RegressionTree tree;
  tree.nodes_ = TreeBuilder(X, y, samples, sorted, params, rng).build();
  return tree;
}

double RegressionTree::predict(std::span<const double> x) const {
  if (nodes_.empty()) return 0.0;
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& nd = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right);
  }
  return nodes_[i].value;
}

std::size_t RegressionTree::depth() const {
  std::function<std::size_t(std::size_t)> rec = [&](std::size_t i) -> std::size_t {
    const auto& nd = nodes_[i];
    if (nd.is_leaf()) return 0;
    return 1 + std::max(rec(static_cast<std::size_t>(nd.left)), rec(static_cast<std::size_t>(nd.right)));
  };
  return nodes_.empty() ? 0 : rec(0);
}

void RegressionTree::add_importance(std::span<double> importance) const {
  for (const auto& nd : nodes_)
    if (!nd.is_leaf()) importance[static_cast<std::size_t>(nd.feature)] += nd.gain;
}

nlohmann::json RegressionTree::to_json() const {
  std::function<nlohmann::json(std::size_t)> rec = [&](std::size_t i) {
    const auto& nd = nodes_[i];
    if (nd.is_leaf()) return nlohmann::json{{"value", nd.value}, {"n", nd.n_samples}};
    return nlohmann::json{{"feature", nd.feature},
                          {"threshold", nd.threshold},
                          {"gain", nd.gain},
                          {"value", nd.value},
                          {"n", nd.n_samples},
                          {"left", rec(static_cast<std::size_t>(nd.left))},
                          {"right", rec(static_cast<std::size_t>(nd.right))}};
  };
  return nodes_.empty() ? nlohmann::json(nullptr) : rec(0);
}

RegressionTree RegressionTree::from_json(const nlohmann::json& j) {
  RegressionTree tree;
  if (j.is_null()) return tree;
  std::function<int(const nlohmann::json&)> rec = [&](const nlohmann::json& jn) -> int {
    const int id = static_cast<int>(tree.nodes_.size());
    TreeNode nd;
    nd.value = jn.at("value").get<double>();
    nd.n_samples = jn.value("n", std::size_t{0});
    tree.nodes_.push_back(nd);
    if (jn.contains("feature")) {
      const int l = rec(jn.at("left"));
      const int r = rec(jn.at("right"));
      auto& self = tree.nodes_[static_cast<std::size_t>(id)];
      self.feature = jn.at("feature").get<int>();
      self.threshold = jn.at("threshold").get<double>();
      self.gain = jn.value("gain", 0.0);
      self.left = l;
      self.right = r;
    }
    return id;
  };
  rec(j);
  return tree;
}

}  // namespace paqreg::models
