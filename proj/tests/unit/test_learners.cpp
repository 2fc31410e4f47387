#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "fleetrisk/error.hpp"
#include "fleetrisk/learners.hpp"
#include "oracles.hpp"

using namespace fleetrisk;

namespace {

Dataset random_dataset(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> d(0.0, 1.5);
  Dataset x(cols);
  std::vector<double> row(cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (auto& v : row) v = d(rng);
    x.push_row(row);
  }
  return x;
}

std::vector<double> random_params(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d(0.0, 0.8);
  std::vector<double> p(n);
  for (auto& v : p) v = d(rng);
  return p;
}

double accuracy(const FeedForwardNet& net, const Dataset& x, const std::vector<int>& y) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) hits += (net.score(x.row(i)) > 0.5) == (y[i] == 1);
  return double(hits) / double(x.rows());
}

}  // namespace

TEST_SUITE("learners") {
  TEST_CASE("gradient checks") {
    std::mt19937_64 rng(21);
    for (const auto& hidden : std::vector<std::vector<std::size_t>>{{}, {4}, {5, 3}}) {
      for (auto loss : {LossKind::CrossEntropy, LossKind::SquaredError}) {
        for (int point = 0; point < 5; ++point) {
          const auto x = random_dataset(rng, 12, 3);
          FeedForwardNet net(3, hidden, 0.0);
          net.fit_standardization(x);
          std::vector<double> targets, weights;
          std::uniform_real_distribution<double> u(0.0, 1.0);
          for (std::size_t i = 0; i < x.rows(); ++i) {
            targets.push_back(loss == LossKind::CrossEntropy ? double(u(rng) < 0.5) : u(rng));
            weights.push_back(0.5 + u(rng));
          }
          const auto params = random_params(rng, net.parameter_count());
          CHECK(oracle::gradient_check(net, params, x, targets, weights, 0.01, loss) < 1e-4);
          CHECK(oracle::gradient_check(net, params, x, targets, {}, 0.0, loss) < 1e-4);
        }
      }
    }
  }

  TEST_CASE("logistic regression separates a separable set") {
    std::mt19937_64 rng(4);
    const auto x = random_dataset(rng, 80, 2);
    std::vector<int> y;
    for (std::size_t i = 0; i < x.rows(); ++i) y.push_back(x.row(i)[0] > 0 ? 1 : 0);
    TrainingHyper hyper{.learning_rate = 1.0, .epochs = 2000, .l2 = 0.0};
    const auto net = fit_logistic(x, y, hyper);
    CHECK(accuracy(net, x, y) == 1.0);
    const auto& losses = net.loss_history();
    for (std::size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] <= losses[i - 1] + 1e-9);
  }

  TEST_CASE("constant inputs converge to the base rate") {
    Dataset x(2);
    std::vector<int> y;
    for (int i = 0; i < 40; ++i) {
      x.push_row(std::vector<double>{1.0, -2.0});
      y.push_back(i % 4 == 0 ? 1 : 0);
    }
    TrainingHyper hyper{.learning_rate = 1.0, .epochs = 3000, .l2 = 0.0};
    const auto net = fit_logistic(x, y, hyper);
    CHECK(net.score(x.row(0)) == doctest::Approx(0.25).epsilon(1e-3 / 0.25));
  }

  TEST_CASE("single-class targets are degenerate") {
    Dataset x(1);
    x.push_row(std::vector<double>{1.0});
    x.push_row(std::vector<double>{2.0});
    const std::vector<int> y = {1, 1};
    for (auto fit : {fit_logistic, fit_mlp}) {
      try {
        TrainingHyper h;
        h.hidden_sizes = {2};
        fit(x, y, h, {});
        FAIL("expected a degenerate-target error");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateTarget);
      }
    }
    Rng rng(1);
    CHECK_THROWS_AS(ensemble_fit(x, y, 3, TrainingHyper{}), Error);
  }

  TEST_CASE("mlp learns XOR") {
    Dataset x(2);
    const std::vector<int> y = {0, 1, 1, 0};
    x.push_row(std::vector<double>{0, 0});
    x.push_row(std::vector<double>{0, 1});
    x.push_row(std::vector<double>{1, 0});
    x.push_row(std::vector<double>{1, 1});
    TrainingHyper hyper{.learning_rate = 1.0, .epochs = 4000, .l2 = 0.0, .hidden_sizes = {8}, .seed = 3};
    const auto net = fit_mlp(x, y, hyper);
    CHECK(accuracy(net, x, y) == 1.0);
    CHECK_THROWS_AS(fit_mlp(x, y, TrainingHyper{}), Error);
  }

  TEST_CASE("dropout controls stochastic scoring") {
    std::mt19937_64 gen(8);
    const auto x = random_dataset(gen, 30, 3);
    std::vector<int> y;
    for (std::size_t i = 0; i < x.rows(); ++i) y.push_back(x.row(i)[1] > 0.2 ? 1 : 0);
    TrainingHyper hyper{.epochs = 100, .hidden_sizes = {6}, .dropout_rate = 0.0};
    const auto plain = fit_mlp(x, y, hyper);
    Rng rng(5);
    const double deterministic = plain.score(x.row(0));
    for (int d = 0; d < 10; ++d) CHECK(plain.score(x.row(0), &rng) == deterministic);

    hyper.dropout_rate = 0.3;
    const auto noisy = fit_mlp(x, y, hyper);
    std::set<double> seen;
    for (int d = 0; d < 10; ++d) seen.insert(noisy.score(x.row(0), &rng));
    CHECK(seen.size() > 1);
    CHECK(noisy.score(x.row(0)) == noisy.score(x.row(0)));
  }

  TEST_CASE("model text format round-trips") {
    std::mt19937_64 gen(2);
    const auto x = random_dataset(gen, 20, 4);
    std::vector<int> y;
    for (std::size_t i = 0; i < x.rows(); ++i) y.push_back(i % 2);
    const auto net = fit_mlp(x, y, TrainingHyper{.epochs = 20, .hidden_sizes = {3}, .dropout_rate = 0.2});
    std::stringstream s;
    net.save(s);
    CHECK(s.str().rfind("feedforward 1\n", 0) == 0);
    const auto back = FeedForwardNet::load(s);
    CHECK(back == net);
    CHECK(back.score(x.row(3)) == net.score(x.row(3)));
    std::istringstream broken("feedforward 2\n");
    CHECK_THROWS_AS(FeedForwardNet::load(broken), Error);
  }

  TEST_CASE("decision tree") {
    Dataset x(1);
    std::vector<RiskLabel> y;
    for (int i = 0; i < 10; ++i) {
      x.push_row(std::vector<double>{double(i)});
      y.push_back(RiskLabel::Medium);
    }
    auto tree = fit_tree_baseline(x, y, 4);
    CHECK(tree.nodes().size() == 1);
    CHECK(tree.predict(std::vector<double>{100.0}) == RiskLabel::Medium);

    for (int i = 0; i < 10; ++i) y[i] = i < 4 ? RiskLabel::Low : RiskLabel::High;
    tree = fit_tree_baseline(x, y, 1);
    CHECK(tree.depth() == 1);
    for (int i = 0; i < 10; ++i) CHECK(tree.predict(x.row(i)) == y[i]);

    // Identical inputs, tied classes: the leaf keeps the higher risk.
    Dataset same(1);
    same.push_row(std::vector<double>{1.0});
    same.push_row(std::vector<double>{1.0});
    const std::vector<RiskLabel> tie = {RiskLabel::Low, RiskLabel::High};
    CHECK(fit_tree_baseline(same, tie, 3).predict(std::vector<double>{1.0}) == RiskLabel::High);
    const std::vector<RiskLabel> tie2 = {RiskLabel::Medium, RiskLabel::Low};
    CHECK(fit_tree_baseline(same, tie2, 0).predict(std::vector<double>{1.0}) == RiskLabel::Medium);

    std::stringstream s;
    tree.save(s);
    const auto back = DecisionTree::load(s);
    for (int i = 0; i < 10; ++i) CHECK(back.predict(x.row(i)) == y[i]);
    CHECK_THROWS_AS(fit_tree_baseline(Dataset(1), {}, 2), Error);
  }

  TEST_CASE("balanced bootstrap") {
    std::vector<int> y(23, 0);
    for (int i = 0; i < 5; ++i) y[i * 3] = 1;
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
      const auto idx = balanced_bootstrap(y, rng);
      std::size_t ones = 0;
      for (auto i : idx) ones += y[i];
      CHECK(ones == 12);
      CHECK(idx.size() == 24);
    }
  }

  TEST_CASE("ensemble") {
    std::mt19937_64 gen(13);
    const auto x = random_dataset(gen, 60, 3);
    std::vector<int> y;
    for (std::size_t i = 0; i < x.rows(); ++i) y.push_back(x.row(i)[0] + x.row(i)[2] > 1.0 ? 1 : 0);
    TrainingHyper hyper{.epochs = 60, .hidden_sizes = {4}, .dropout_rate = 0.0, .seed = 17};
    const auto ens = ensemble_fit(x, y, 5, hyper);
    CHECK(ens.members().size() == 5);
    CHECK(std::set<std::uint64_t>(ens.member_seeds().begin(), ens.member_seeds().end()).size() == 5);

    std::stringstream a, b;
    ens.save(a);
    ensemble_fit(x, y, 5, hyper).save(b);
    CHECK(a.str() == b.str());
    const auto loaded = StochasticEnsemble::load(a);
    std::stringstream c;
    loaded.save(c);
    CHECK(c.str() == b.str());

    Rng rng(1);
    double mean = 0;
    for (const auto& m : ens.members()) mean += m.score(x.row(0));
    mean /= 5;
    CHECK(ensemble_score(ens, x.row(0), 20, rng) == doctest::Approx(mean).epsilon(1e-14));
    CHECK(ensemble_score(ens, x.row(0), 1, rng) == doctest::Approx(mean).epsilon(1e-14));

    hyper.dropout_rate = 0.3;
    const auto noisy = ensemble_fit(x, y, 5, hyper);
    auto variance = [&](std::size_t draws) {
      std::vector<double> s;
      for (int k = 0; k < 200; ++k) s.push_back(ensemble_score(noisy, x.row(1), draws, rng));
      double m = 0, v = 0;
      for (double t : s) m += t;
      m /= double(s.size());
      for (double t : s) v += (t - m) * (t - m);
      for (double t : s) {
        CHECK(t >= 0.0);
        CHECK(t <= 1.0);
      }
      return v / double(s.size() - 1);
    };
    CHECK(variance(100) < variance(5));
  }

  TEST_CASE("hyper validation") {
    TrainingHyper h;
    h.learning_rate = 0.0;
    CHECK_THROWS_AS(validate(h), Error);
    h = TrainingHyper{};
    h.dropout_rate = 1.0;
    CHECK_THROWS_AS(validate(h), Error);
    h = TrainingHyper{};
    h.hidden_sizes = {0};
    CHECK_THROWS_AS(validate(h), Error);
  }
}
