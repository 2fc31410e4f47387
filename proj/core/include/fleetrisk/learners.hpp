#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "fleetrisk/rng.hpp"
#include "fleetrisk/types.hpp"

namespace fleetrisk {

// Dense row-major design matrix.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::size_t n_cols) : n_cols_(n_cols) {}

  std::size_t rows() const { return n_cols_ == 0 ? 0 : values_.size() / n_cols_; }
  std::size_t cols() const { return n_cols_; }
  bool empty() const { return values_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * n_cols_, n_cols_);
  }

  // Throws ErrorKind::Domain on a width mismatch.
  void push_row(std::span<const double> row);

 private:
  std::size_t n_cols_ = 0;
  std::vector<double> values_;
};

struct TrainingHyper {
  double learning_rate = 0.5;
  int epochs = 300;
  double l2 = 1e-4;
  // Empty means logistic regression.
  std::vector<std::size_t> hidden_sizes;
  // Score-time dropout; the only source of stochastic scoring.
  double dropout_rate = 0.0;
  std::uint64_t seed = 1;
};

void validate(const TrainingHyper& hyper);

// Binary scorer producing values in [0, 1].
class RowScorer {
 public:
  virtual ~RowScorer() = default;

  // Deterministic when `noise` is null.
  virtual double score(std::span<const double> x, Rng* noise = nullptr) const = 0;
};

enum class LossKind { CrossEntropy, SquaredError };

// Fully connected tanh network with a sigmoid output unit. Inputs are
// standardized with statistics captured at fit time.
class FeedForwardNet final : public RowScorer {
 public:
  FeedForwardNet() = default;
  FeedForwardNet(std::size_t input_dim, std::vector<std::size_t> hidden_sizes,
                 double dropout_rate);

  double score(std::span<const double> x, Rng* noise = nullptr) const override;

  std::size_t input_dim() const { return layer_sizes_.empty() ? 0 : layer_sizes_.front(); }
  const std::vector<std::size_t>& layer_sizes() const { return layer_sizes_; }
  double dropout_rate() const { return dropout_rate_; }

  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }
  std::size_t parameter_count() const;

  void set_standardization(std::vector<double> mean, std::vector<double> scale);
  // Fills mean/scale from the columns of X; constant columns get scale 1.
  void fit_standardization(const Dataset& x);

  // Training loss after every accepted step.
  const std::vector<double>& loss_history() const { return loss_history_; }
  std::vector<double>& loss_history() { return loss_history_; }

  void initialize(std::uint64_t seed);

  void save(std::ostream& out) const;
  static FeedForwardNet load(std::istream& in);

  friend bool operator==(const FeedForwardNet& a, const FeedForwardNet& b) {
    return a.layer_sizes_ == b.layer_sizes_ && a.params_ == b.params_ && a.mean_ == b.mean_ &&
           a.scale_ == b.scale_ && a.dropout_rate_ == b.dropout_rate_;
  }

 private:
  friend double network_objective(const FeedForwardNet&, std::span<const double>, const Dataset&,
                                  std::span<const double>, std::span<const double>, double,
                                  LossKind, std::vector<double>*);

  double forward(std::span<const double> params, std::span<const double> x, Rng* noise) const;

  std::vector<std::size_t> layer_sizes_;
  std::vector<double> params_;
  std::vector<double> mean_;
  std::vector<double> scale_;
  double dropout_rate_ = 0.0;
  std::vector<double> loss_history_;
};

// Mean (optionally weighted) loss of `net` evaluated at `params` plus
// 0.5 * l2 * ||weights||^2 (biases unpenalized). When `gradient` is non-null
// it receives the analytic gradient with respect to `params`.
double network_objective(const FeedForwardNet& net, std::span<const double> params,
                         const Dataset& x, std::span<const double> targets,
                         std::span<const double> sample_weights, double l2, LossKind loss,
                         std::vector<double>* gradient);

// L2-regularized logistic regression by full-batch gradient descent. A step
// that would raise the loss is rejected and the learning rate halved, so the
// recorded loss never increases. Throws ErrorKind::DegenerateTarget when y
// holds a single class.
FeedForwardNet fit_logistic(const Dataset& x, std::span<const int> y, const TrainingHyper& hyper,
                            std::span<const double> sample_weights = {});

// Same optimizer with hidden layers (hyper.hidden_sizes must be non-empty).
FeedForwardNet fit_mlp(const Dataset& x, std::span<const int> y, const TrainingHyper& hyper,
                       std::span<const double> sample_weights = {});

// Squared error on the sigmoid output against real targets in [0, 1].
FeedForwardNet fit_regressor(const Dataset& x, std::span<const double> targets,
                             const TrainingHyper& hyper);

// Axis-aligned CART classifier over the three risk classes.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    RiskLabel label = RiskLabel::Low;
  };

  RiskLabel predict(std::span<const double> x) const;
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t depth() const;

  void save(std::ostream& out) const;
  static DecisionTree load(std::istream& in);

 private:
  friend DecisionTree fit_tree_baseline(const Dataset&, std::span<const RiskLabel>, int);
  std::vector<Node> nodes_;
};

// Gini-impurity splits up to `depth` levels. Leaf ties go to the higher risk.
DecisionTree fit_tree_baseline(const Dataset& x, std::span<const RiskLabel> y, int depth);

// Indices of a bootstrap sample with exactly ceil(n / 2) rows of each class,
// each class resampled with replacement.
std::vector<std::size_t> balanced_bootstrap(std::span<const int> y, Rng& rng);

class StochasticEnsemble {
 public:
  const std::vector<FeedForwardNet>& members() const { return members_; }
  const std::vector<std::uint64_t>& member_seeds() const { return member_seeds_; }

  void save(std::ostream& out) const;
  static StochasticEnsemble load(std::istream& in);

 private:
  friend StochasticEnsemble ensemble_fit(const Dataset&, std::span<const int>, std::size_t,
                                         const TrainingHyper&);
  std::vector<FeedForwardNet> members_;
  std::vector<std::uint64_t> member_seeds_;
};

// Each member is trained on its own balanced bootstrap; member seeds derive
// from (hyper.seed, member index).
StochasticEnsemble ensemble_fit(const Dataset& x, std::span<const int> y,
                                std::size_t n_models, const TrainingHyper& hyper);

// Mean over members x draws of stochastic scores. With dropout disabled each
// member is scored once.
double ensemble_score(const StochasticEnsemble& ensemble, std::span<const double> x,
                      std::size_t n_draws, Rng& rng);

}  // namespace fleetrisk
