#include "fleetrisk/learners.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "fleetrisk/error.hpp"
#include "fleetrisk/schema_io.hpp"

namespace fleetrisk {
namespace {

constexpr double kAcceptTolerance = 1e-9;
constexpr int kMaxRejections = 60;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// -(y log p + (1 - y) log(1 - p)) with p = sigmoid(z), stable for large |z|.
double logistic_loss(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

void check_binary_targets(std::span<const int> y, std::size_t rows) {
  if (rows == 0) throw Error(ErrorKind::Domain, "empty training set");
  if (y.size() != rows) {
    throw Error(ErrorKind::Alignment, "training set has " + std::to_string(rows) +
                                          " rows but " + std::to_string(y.size()) + " targets");
  }
  bool has0 = false;
  bool has1 = false;
  for (int v : y) {
    if (v == 0) {
      has0 = true;
    } else if (v == 1) {
      has1 = true;
    } else {
      throw Error(ErrorKind::Domain, "binary targets must be 0 or 1");
    }
  }
  if (!has0 || !has1) {
    throw Error(ErrorKind::DegenerateTarget, "targets contain a single class");
  }
}

void write_vector(std::ostream& out, const char* tag, const std::vector<double>& values) {
  out << tag << ' ' << values.size();
  for (double v : values) out << ' ' << format_double(v);
  out << '\n';
}

std::vector<double> read_vector(std::istream& in, const char* tag) {
  std::string word;
  std::size_t n = 0;
  if (!(in >> word) || word != tag || !(in >> n)) {
    throw Error(ErrorKind::Parse, std::string("model file: expected '") + tag + "'");
  }
  std::vector<double> values(n);
  for (auto& v : values) {
    if (!(in >> word)) throw Error(ErrorKind::Parse, std::string("model file: truncated ") + tag);
    v = std::stod(word);
  }
  return values;
}

FeedForwardNet train_network(const Dataset& x, std::span<const double> targets,
                             std::span<const double> sample_weights, const TrainingHyper& hyper,
                             LossKind loss) {
  validate(hyper);
  if (!sample_weights.empty() && sample_weights.size() != x.rows()) {
    throw Error(ErrorKind::Alignment, "sample weight count does not match the training set");
  }
  FeedForwardNet net(x.cols(), hyper.hidden_sizes, hyper.dropout_rate);
  net.fit_standardization(x);
  net.initialize(hyper.seed);

  auto params = net.parameters();
  std::vector<double> gradient;
  double current =
      network_objective(net, params, x, targets, sample_weights, hyper.l2, loss, &gradient);
  net.loss_history().push_back(current);

  double rate = hyper.learning_rate;
  std::vector<double> candidate(params.size());
  std::vector<double> candidate_gradient;
  int rejections = 0;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (std::size_t i = 0; i < params.size(); ++i) candidate[i] = params[i] - rate * gradient[i];
    const double next = network_objective(net, candidate, x, targets, sample_weights, hyper.l2,
                                          loss, &candidate_gradient);
    if (std::isfinite(next) && next <= current + kAcceptTolerance) {
      params.swap(candidate);
      gradient.swap(candidate_gradient);
      current = next;
      net.loss_history().push_back(current);
      rejections = 0;
    } else {
      rate *= 0.5;
      if (++rejections > kMaxRejections) break;
    }
  }
  net.parameters() = std::move(params);
  return net;
}

}  // namespace

void Dataset::push_row(std::span<const double> row) {
  if (n_cols_ == 0 && values_.empty()) n_cols_ = row.size();
  if (row.size() != n_cols_) {
    throw Error(ErrorKind::Domain, "row of width " + std::to_string(row.size()) +
                                       " pushed into a dataset of width " +
                                       std::to_string(n_cols_));
  }
  values_.insert(values_.end(), row.begin(), row.end());
}

void validate(const TrainingHyper& hyper) {
  if (!(hyper.learning_rate > 0.0)) throw Error(ErrorKind::Config, "learning_rate must be > 0");
  if (hyper.epochs < 1) throw Error(ErrorKind::Config, "epochs must be positive");
  if (hyper.l2 < 0.0) throw Error(ErrorKind::Config, "l2 must be >= 0");
  if (!(hyper.dropout_rate >= 0.0 && hyper.dropout_rate < 1.0)) {
    throw Error(ErrorKind::Config, "dropout_rate must lie in [0, 1)");
  }
  for (auto h : hyper.hidden_sizes) {
    if (h == 0) throw Error(ErrorKind::Config, "hidden layer sizes must be positive");
  }
}

FeedForwardNet::FeedForwardNet(std::size_t input_dim, std::vector<std::size_t> hidden_sizes,
                               double dropout_rate)
    : dropout_rate_(dropout_rate) {
  layer_sizes_.push_back(input_dim);
  layer_sizes_.insert(layer_sizes_.end(), hidden_sizes.begin(), hidden_sizes.end());
  layer_sizes_.push_back(1);
  params_.assign(parameter_count(), 0.0);
  mean_.assign(input_dim, 0.0);
  scale_.assign(input_dim, 1.0);
}

std::size_t FeedForwardNet::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    n += layer_sizes_[l + 1] * (layer_sizes_[l] + 1);
  }
  return n;
}

void FeedForwardNet::set_standardization(std::vector<double> mean, std::vector<double> scale) {
  mean_ = std::move(mean);
  scale_ = std::move(scale);
}

void FeedForwardNet::fit_standardization(const Dataset& x) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  mean_.assign(d, 0.0);
  scale_.assign(d, 1.0);
  if (n == 0) return;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = x.row(i);
    for (std::size_t k = 0; k < d; ++k) mean_[k] += r[k];
  }
  for (auto& m : mean_) m /= double(n);
  std::vector<double> var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = x.row(i);
    for (std::size_t k = 0; k < d; ++k) var[k] += (r[k] - mean_[k]) * (r[k] - mean_[k]);
  }
  for (std::size_t k = 0; k < d; ++k) {
    const double sd = std::sqrt(var[k] / double(n));
    scale_[k] = sd > 1e-12 ? sd : 1.0;
  }
}

void FeedForwardNet::initialize(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x1417));
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    const auto fan_in = layer_sizes_[l];
    const auto fan_out = layer_sizes_[l + 1];
    const double limit = std::sqrt(6.0 / double(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (std::size_t i = 0; i < fan_out * fan_in; ++i) params_[offset + i] = dist(rng);
    offset += fan_out * fan_in;
    for (std::size_t i = 0; i < fan_out; ++i) params_[offset + i] = 0.0;
    offset += fan_out;
  }
}

double FeedForwardNet::forward(std::span<const double> params, std::span<const double> x,
                               Rng* noise) const {
  if (x.size() != input_dim()) {
    throw Error(ErrorKind::Domain, "input of width " + std::to_string(x.size()) +
                                       " scored by a model of width " +
                                       std::to_string(input_dim()));
  }
  std::vector<double> act(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) act[k] = (x[k] - mean_[k]) / scale_[k];
  const bool stochastic = noise != nullptr && dropout_rate_ > 0.0;
  std::bernoulli_distribution keep(1.0 - dropout_rate_);
  const double rescale = 1.0 / (1.0 - dropout_rate_);

  std::size_t offset = 0;
  std::vector<double> next;
  double output = 0.0;
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    if (stochastic) {
      for (auto& a : act) a = keep(*noise) ? a * rescale : 0.0;
    }
    const auto n_in = layer_sizes_[l];
    const auto n_out = layer_sizes_[l + 1];
    const double* w = params.data() + offset;
    const double* b = w + n_out * n_in;
    next.assign(n_out, 0.0);
    for (std::size_t o = 0; o < n_out; ++o) {
      double z = b[o];
      for (std::size_t i = 0; i < n_in; ++i) z += w[o * n_in + i] * act[i];
      next[o] = z;
    }
    offset += n_out * (n_in + 1);
    if (l + 2 == layer_sizes_.size()) {
      output = next[0];
    } else {
      for (auto& z : next) z = std::tanh(z);
      act.swap(next);
    }
  }
  return sigmoid(output);
}

double FeedForwardNet::score(std::span<const double> x, Rng* noise) const {
  return forward(params_, x, noise);
}

double network_objective(const FeedForwardNet& net, std::span<const double> params,
                         const Dataset& x, std::span<const double> targets,
                         std::span<const double> sample_weights, double l2, LossKind loss,
                         std::vector<double>* gradient) {
  const auto& sizes = net.layer_sizes_;
  const std::size_t n_layers = sizes.size() - 1;
  if (params.size() != net.parameter_count()) {
    throw Error(ErrorKind::Domain, "parameter vector has the wrong length");
  }
  if (targets.size() != x.rows()) {
    throw Error(ErrorKind::Alignment, "target count does not match the training set");
  }
  if (gradient) gradient->assign(params.size(), 0.0);

  std::vector<std::size_t> offsets(n_layers);
  for (std::size_t l = 0, off = 0; l < n_layers; ++l) {
    offsets[l] = off;
    off += sizes[l + 1] * (sizes[l] + 1);
  }

  std::vector<std::vector<double>> acts(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) acts[l].resize(sizes[l]);
  std::vector<double> delta;
  std::vector<double> prev_delta;

  double loss_sum = 0.0;
  double weight_sum = 0.0;
  for (std::size_t s = 0; s < x.rows(); ++s) {
    const double sw = sample_weights.empty() ? 1.0 : sample_weights[s];
    const auto row = x.row(s);
    for (std::size_t k = 0; k < row.size(); ++k) {
      acts[0][k] = (row[k] - net.mean_[k]) / net.scale_[k];
    }
    double z_out = 0.0;
    for (std::size_t l = 0; l < n_layers; ++l) {
      const auto n_in = sizes[l];
      const auto n_out = sizes[l + 1];
      const double* w = params.data() + offsets[l];
      const double* b = w + n_out * n_in;
      for (std::size_t o = 0; o < n_out; ++o) {
        double z = b[o];
        for (std::size_t i = 0; i < n_in; ++i) z += w[o * n_in + i] * acts[l][i];
        if (l + 1 == n_layers) {
          z_out = z;
        } else {
          acts[l + 1][o] = std::tanh(z);
        }
      }
    }
    const double y = targets[s];
    const double p = sigmoid(z_out);
    double d_out = 0.0;
    if (loss == LossKind::CrossEntropy) {
      loss_sum += sw * logistic_loss(z_out, y);
      d_out = p - y;
    } else {
      loss_sum += sw * (p - y) * (p - y);
      d_out = 2.0 * (p - y) * p * (1.0 - p);
    }
    weight_sum += sw;
    if (!gradient) continue;

    auto& g = *gradient;
    delta.assign(1, sw * d_out);
    for (std::size_t l = n_layers; l-- > 0;) {
      const auto n_in = sizes[l];
      const auto n_out = sizes[l + 1];
      const double* w = params.data() + offsets[l];
      double* gw = g.data() + offsets[l];
      double* gb = gw + n_out * n_in;
      for (std::size_t o = 0; o < n_out; ++o) {
        for (std::size_t i = 0; i < n_in; ++i) gw[o * n_in + i] += delta[o] * acts[l][i];
        gb[o] += delta[o];
      }
      if (l == 0) break;
      prev_delta.assign(n_in, 0.0);
      for (std::size_t o = 0; o < n_out; ++o) {
        for (std::size_t i = 0; i < n_in; ++i) prev_delta[i] += w[o * n_in + i] * delta[o];
      }
      for (std::size_t i = 0; i < n_in; ++i) {
        const double a = acts[l][i];
        prev_delta[i] *= 1.0 - a * a;
      }
      delta.swap(prev_delta);
    }
  }
  if (weight_sum <= 0.0) throw Error(ErrorKind::Domain, "sample weights sum to zero");

  double penalty = 0.0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t n_w = sizes[l + 1] * sizes[l];
    for (std::size_t i = 0; i < n_w; ++i) penalty += params[offsets[l] + i] * params[offsets[l] + i];
  }
  if (gradient) {
    auto& g = *gradient;
    for (auto& v : g) v /= weight_sum;
    for (std::size_t l = 0; l < n_layers; ++l) {
      const std::size_t n_w = sizes[l + 1] * sizes[l];
      for (std::size_t i = 0; i < n_w; ++i) g[offsets[l] + i] += l2 * params[offsets[l] + i];
    }
  }
  return loss_sum / weight_sum + 0.5 * l2 * penalty;
}

FeedForwardNet fit_logistic(const Dataset& x, std::span<const int> y, const TrainingHyper& hyper,
                            std::span<const double> sample_weights) {
  check_binary_targets(y, x.rows());
  TrainingHyper linear = hyper;
  linear.hidden_sizes.clear();
  const std::vector<double> targets(y.begin(), y.end());
  return train_network(x, targets, sample_weights, linear, LossKind::CrossEntropy);
}

FeedForwardNet fit_mlp(const Dataset& x, std::span<const int> y, const TrainingHyper& hyper,
                       std::span<const double> sample_weights) {
  if (hyper.hidden_sizes.empty()) {
    throw Error(ErrorKind::Config, "fit_mlp needs at least one hidden layer");
  }
  check_binary_targets(y, x.rows());
  const std::vector<double> targets(y.begin(), y.end());
  return train_network(x, targets, sample_weights, hyper, LossKind::CrossEntropy);
}

FeedForwardNet fit_regressor(const Dataset& x, std::span<const double> targets,
                             const TrainingHyper& hyper) {
  if (x.rows() == 0) throw Error(ErrorKind::Domain, "empty training set");
  for (double t : targets) {
    if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::Domain, "regression targets must lie in [0, 1]");
  }
  return train_network(x, targets, {}, hyper, LossKind::SquaredError);
}

void FeedForwardNet::save(std::ostream& out) const {
  out << "feedforward 1\nlayers " << layer_sizes_.size();
  for (auto s : layer_sizes_) out << ' ' << s;
  out << "\ndropout " << format_double(dropout_rate_) << '\n';
  write_vector(out, "mean", mean_);
  write_vector(out, "scale", scale_);
  write_vector(out, "params", params_);
}

FeedForwardNet FeedForwardNet::load(std::istream& in) {
  std::string word;
  int version = 0;
  if (!(in >> word >> version) || word != "feedforward" || version != 1) {
    throw Error(ErrorKind::Parse, "model file: expected 'feedforward 1'");
  }
  std::size_t n_layers = 0;
  if (!(in >> word >> n_layers) || word != "layers" || n_layers < 2) {
    throw Error(ErrorKind::Parse, "model file: bad layer line");
  }
  std::vector<std::size_t> sizes(n_layers);
  for (auto& s : sizes) in >> s;
  if (!(in >> word) || word != "dropout" || !(in >> word)) {
    throw Error(ErrorKind::Parse, "model file: missing dropout");
  }
  const double dropout = std::stod(word);
  std::vector<std::size_t> hidden(sizes.begin() + 1, sizes.end() - 1);
  FeedForwardNet net(sizes.front(), hidden, dropout);
  auto mean = read_vector(in, "mean");
  auto scale = read_vector(in, "scale");
  net.params_ = read_vector(in, "params");
  if (net.params_.size() != net.parameter_count() || mean.size() != sizes.front() ||
      scale.size() != sizes.front()) {
    throw Error(ErrorKind::Parse, "model file: vector sizes do not match the architecture");
  }
  net.set_standardization(std::move(mean), std::move(scale));
  return net;
}

std::vector<std::size_t> balanced_bootstrap(std::span<const int> y, Rng& rng) {
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i] != 0 ? 1 : 0].push_back(i);
  if (by_class[0].empty() || by_class[1].empty()) {
    throw Error(ErrorKind::DegenerateTarget, "balanced bootstrap needs both classes");
  }
  const std::size_t per_class = (y.size() + 1) / 2;
  std::vector<std::size_t> sample;
  sample.reserve(2 * per_class);
  for (const auto& members : by_class) {
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    for (std::size_t i = 0; i < per_class; ++i) sample.push_back(members[pick(rng)]);
  }
  return sample;
}

StochasticEnsemble ensemble_fit(const Dataset& x, std::span<const int> y, std::size_t n_models,
                                const TrainingHyper& hyper) {
  check_binary_targets(y, x.rows());
  if (n_models == 0) throw Error(ErrorKind::Config, "ensemble needs at least one model");
  StochasticEnsemble ensemble;
  for (std::size_t m = 0; m < n_models; ++m) {
    const auto member_seed = derive_seed(hyper.seed, m);
    Rng rng(member_seed);
    const auto sample = balanced_bootstrap(y, rng);
    Dataset boot(x.cols());
    std::vector<int> boot_y;
    boot_y.reserve(sample.size());
    for (auto i : sample) {
      boot.push_row(x.row(i));
      boot_y.push_back(y[i]);
    }
    TrainingHyper member = hyper;
    member.seed = member_seed;
    ensemble.members_.push_back(member.hidden_sizes.empty() ? fit_logistic(boot, boot_y, member)
                                                            : fit_mlp(boot, boot_y, member));
    ensemble.member_seeds_.push_back(member_seed);
  }
  return ensemble;
}

double ensemble_score(const StochasticEnsemble& ensemble, std::span<const double> x,
                      std::size_t n_draws, Rng& rng) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& member : ensemble.members()) {
    if (member.dropout_rate() == 0.0 || n_draws == 0) {
      sum += member.score(x);
      ++count;
      continue;
    }
    for (std::size_t d = 0; d < n_draws; ++d) {
      sum += member.score(x, &rng);
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / double(count);
}

void StochasticEnsemble::save(std::ostream& out) const {
  out << "ensemble " << members_.size() << '\n';
  for (std::size_t m = 0; m < members_.size(); ++m) {
    out << "member_seed " << member_seeds_[m] << '\n';
    members_[m].save(out);
  }
}

StochasticEnsemble StochasticEnsemble::load(std::istream& in) {
  std::string word;
  std::size_t n = 0;
  if (!(in >> word >> n) || word != "ensemble") {
    throw Error(ErrorKind::Parse, "model file: expected 'ensemble'");
  }
  StochasticEnsemble ensemble;
  for (std::size_t m = 0; m < n; ++m) {
    std::uint64_t seed = 0;
    if (!(in >> word >> seed) || word != "member_seed") {
      throw Error(ErrorKind::Parse, "model file: expected 'member_seed'");
    }
    ensemble.member_seeds_.push_back(seed);
    ensemble.members_.push_back(FeedForwardNet::load(in));
  }
  return ensemble;
}

}  // namespace fleetrisk
