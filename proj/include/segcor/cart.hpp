#pragma once

#include <string>
#include <vector>

#include "segcor/context_features.hpp"

namespace segcor {

/// One supervised example: a senone and the signed boundary error it was
/// observed with.
struct TrainingExample {
  Senone senone;
  double target = 0.0;  // seconds
};

struct TreeMetrics {
  double rmse = 0.0;
  double correlation = 0.0;  // 0 by convention when either side is constant
  double mean_error = 0.0;
  double mean_abs_error = 0.0;
};

/// Binary regression tree over senones. Questions are categorical equality
/// on one value or numeric <= threshold; leaves carry the mean, population
/// stddev, and count of the training targets routed to them.
class RegressionTree {
public:
  struct Node {
    bool is_leaf = true;
    // question (internal nodes)
    int feature = -1;
    bool categorical = true;
    std::string category;
    double threshold = 0.0;
    int yes = -1, no = -1;
    // leaf payload
    double mean = 0.0;
    double stddev = 0.0;
    long count = 0;

    bool operator==(const Node&) const = default;
  };

  /// Grows the tree by greedy variance reduction: at each node every
  /// candidate question is scored by the count-weighted sum of child
  /// variances (categorical one-vs-rest per observed value, numeric
  /// midpoints between consecutive distinct values); growth stops when no
  /// candidate leaves both children with >= stop_size examples or improves
  /// impurity. Ties prefer the lowest feature index, then the smallest
  /// threshold or lexicographically smallest category.
  static RegressionTree train(const std::vector<TrainingExample>& examples, int stop_size,
                              const FeatureSchema& schema);

  /// Mean of the leaf the senone routes to. A categorical value that equals
  /// no question's category (including values unseen in training) follows
  /// the "no" branch.
  double predict(const Senone& senone) const;

  TreeMetrics evaluate(const std::vector<TrainingExample>& examples) const;

  /// Text form: a `;; schema <hash>` header line followed by one
  /// s-expression, questions `((name is value) yes no)` or
  /// `((name <= threshold) yes no)`, leaves `((mean stddev count))`,
  /// reals with 6 decimals.
  std::string serialize(const FeatureSchema& schema) const;
  static RegressionTree parse(const std::string& text, const FeatureSchema& schema);

  const std::string& schema_hash() const { return schema_hash_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t leaf_count() const;
  long min_leaf_count() const;

  bool operator==(const RegressionTree&) const = default;

private:
  std::string schema_hash_;
  std::vector<Node> nodes_;  // root at index 0
};

}  // namespace segcor
