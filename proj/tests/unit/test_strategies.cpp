#include <map>

#include "doctest.h"
#include "fixtures.hpp"
#include "fleetrisk/error.hpp"
#include "fleetrisk/features.hpp"
#include "fleetrisk/labeling.hpp"
#include "fleetrisk/scoring.hpp"
#include "fleetrisk/strategies.hpp"
#include "oracles.hpp"

using namespace fleetrisk;
using oracle::parse_labels;

namespace {

std::vector<std::vector<RiskLabel>> per_window(const FleetTable& test,
                                               const std::vector<RiskLabel>& labels) {
  std::vector<std::vector<RiskLabel>> out;
  for (const auto& span : truck_spans(test)) {
    out.emplace_back(labels.begin() + long(span.begin), labels.begin() + long(span.end));
  }
  return out;
}

double score_of(const TrainTestSplit& split, const std::vector<RiskLabel>& pred) {
  std::vector<RiskLabel> t;
  std::vector<Generation> g;
  for (const auto& r : split.truth.rows) {
    t.push_back(*r.risk_level);
    g.push_back(r.gen);
  }
  return challenge_score(t, pred, g).final_score;
}

}  // namespace

TEST_SUITE("strategies") {
  TEST_CASE("healthy decision") {
    const TwoStepConfig cfg;
    const std::vector<double> zeros(10, 0.0), ones(10, 1.0);
    CHECK(healthy_decision(zeros, cfg) == HealthDecision::Healthy);
    CHECK(healthy_decision(ones, cfg) == HealthDecision::NonHealthy);
    const std::vector<double> spike = {0.1, 0.2, 0.9};
    CHECK(healthy_decision(spike, cfg) == HealthDecision::NonHealthy);
    CHECK_THROWS_AS(healthy_decision(std::vector<double>{}, cfg), Error);
  }

  TEST_CASE("baseline 3/7") {
    CHECK(baseline_73(10) == parse_labels("MMMHHHHHHH"));
    CHECK(baseline_73(7) == parse_labels("HHHHHHH"));
    CHECK(baseline_73(12) == parse_labels("MMMMMHHHHHHH"));
    CHECK(baseline_73(3) == parse_labels("HHH"));
  }

  TEST_CASE("aux adjustment") {
    const TwoStepConfig cfg;  // aux_lo 0.2, aux_hi 0.6, shift 2
    const auto base = baseline_73(10);
    CHECK(adjust_with_aux(base, 0.4, cfg) == base);
    CHECK(adjust_with_aux(base, 1.0, cfg) == parse_labels("MHHHHHHHHH"));
    CHECK(adjust_with_aux(base, 0.0, cfg) == parse_labels("MMMMMHHHHH"));
    TwoStepConfig wide = cfg;
    wide.boundary_shift_limit = 20;
    CHECK(adjust_with_aux(base, 1.0, wide) == parse_labels("HHHHHHHHHH"));
    CHECK(adjust_with_aux(base, 0.0, wide) == parse_labels("MMMMMMMMMM"));
    for (double aux = 0.0; aux <= 1.0; aux += 0.05) {
      CHECK(is_single_jump_or_low(adjust_with_aux(base, aux, cfg)));
    }
  }

  TEST_CASE("percentile split and jump target") {
    CHECK(percentile_to_split(0.65, 10) == 6);
    CHECK(percentile_to_split(0.0, 7) == 0);
    CHECK(percentile_to_split(1.0, 7) == 7);
    CHECK(percentile_to_split(-0.2, 7) == 0);
    CHECK(percentile_to_split(1.3, 7) == 7);
    CHECK(jump_target(parse_labels("MMMMMMHHHH")) == doctest::Approx(0.6));
    CHECK(jump_target(parse_labels("HHHHHHHHHH")) == 0.0);
    CHECK(jump_target(parse_labels("MMMMMMMMMM")) == 1.0);
    for (const char* bad : {"LMMHHHHHHH", "MMHHMHHHHH", "LLLLLLLLLL"}) {
      try {
        jump_target(parse_labels(bad));
        FAIL("expected a target-construction error");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TargetConstruction);
      }
    }
    for (std::size_t length = 1; length <= 12; ++length) {
      for (std::size_t k = 0; k <= length; ++k) {
        const auto labels = jump_labels(k, length);
        CHECK(percentile_to_split(jump_target(labels), length) == k);
      }
    }
  }

  TEST_CASE("monotonic post-processing") {
    CHECK(enforce_monotonic_risk(parse_labels("LMLH")) == parse_labels("LMMH"));
    CHECK(enforce_monotonic_risk(parse_labels("LLHH")) == parse_labels("LLHH"));
    CHECK(enforce_monotonic_risk(parse_labels("HLLL")) == parse_labels("HHHH"));
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 200; ++trial) {
      const auto x = oracle::random_labels(rng, 1 + trial % 12);
      const auto y = enforce_monotonic_risk(x);
      CHECK(y == oracle::running_max(x));
      CHECK(enforce_monotonic_risk(y) == y);
      for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] >= x[i]);
    }
  }

  TEST_CASE("majority vote") {
    CHECK(majority_vote(parse_labels("HHM")) == RiskLabel::High);
    CHECK(majority_vote(parse_labels("LH")) == RiskLabel::High);
    CHECK(majority_vote(parse_labels("MLL")) == RiskLabel::Low);
    // Exhaustive over all vote tables of up to four voters.
    for (std::size_t n = 1; n <= 4; ++n) {
      std::size_t combos = 1;
      for (std::size_t k = 0; k < n; ++k) combos *= 3;
      for (std::size_t code = 0; code < combos; ++code) {
        std::vector<RiskLabel> votes;
        std::size_t c = code;
        std::map<int, int> count;
        for (std::size_t k = 0; k < n; ++k) {
          votes.push_back(label_from_index(int(c % 3)));
          ++count[int(c % 3)];
          c /= 3;
        }
        int top = 0;
        for (auto [cls, k] : count) top = std::max(top, k);
        int expected = -1;
        for (auto [cls, k] : count) {
          if (k == top) expected = std::max(expected, cls);
        }
        CHECK(majority_vote(votes) == label_from_index(expected));
      }
    }
  }

  TEST_CASE("strategy names") {
    for (auto k : {StrategyKind::TwoStep, StrategyKind::Jump, StrategyKind::PseudoLabel,
                   StrategyKind::TreeBaseline, StrategyKind::Oracle}) {
      CHECK(parse_strategy(to_string(k)) == k);
    }
    CHECK_THROWS_AS(parse_strategy("xgboost"), Error);
  }

  TEST_CASE("config validation") {
    TwoStepConfig t;
    t.aux_lo = 0.7;
    CHECK_THROWS_AS(validate(t), Error);
    JumpConfig j{1.5};
    CHECK_THROWS_AS(validate(j), Error);
    PseudoLabelConfig p;
    p.n_iterations = 2;
    CHECK_THROWS_AS(validate(p), Error);
    p = PseudoLabelConfig{};
    p.capacity_schedule = {{16}, {8}, {8}};
    CHECK_THROWS_AS(validate(p), Error);
    p = PseudoLabelConfig{};
    p.confidence_fraction = 0.0;
    CHECK_THROWS_AS(validate(p), Error);
  }

  TEST_CASE("strategies on a small fleet") {
    const auto data = fixture::small_split();
    const auto settings = fixture::fast_settings();
    const auto prepared = prepare_tables(data.split.train, data.split.test, StrategyKind::TwoStep,
                                         settings.features, true);
    const auto n = data.split.test.rows.size();

    const auto two = twostep_predict(prepared.train, prepared.test, settings);
    const auto jump = jump_predict(prepared.train, prepared.test, settings);
    const auto pseudo = pseudolabel_train_predict(prepared.train, prepared.test, settings);
    const auto tree = tree_baseline_predict(data.split.train, data.split.test, settings);
    CHECK(two.size() == n);
    CHECK(jump.size() == n);
    CHECK(pseudo.size() == n);
    CHECK(tree.size() == n);
    for (const auto& w : per_window(data.split.test, two)) CHECK(is_single_jump_or_low(w));
    for (const auto& w : per_window(data.split.test, jump)) CHECK(is_single_jump_or_low(w));
    for (const auto& w : per_window(data.split.test, pseudo)) CHECK(w == oracle::running_max(w));

    CHECK(twostep_predict(prepared.train, prepared.test, settings) == two);
    CHECK(score_of(data.split, oracle_predict(data.split.test, data.split.test_failures)) == 1.0);
    CHECK(score_of(data.split, two) > 0.3);
  }

  TEST_CASE("degenerate thresholds") {
    const auto data = fixture::small_split();
    auto settings = fixture::fast_settings();
    settings.jump.healthy_threshold = 1.0;
    const auto prepared = prepare_tables(data.split.train, data.split.test, StrategyKind::Jump,
                                         settings.features, true);
    for (auto l : jump_predict(prepared.train, prepared.test, settings)) CHECK(l == RiskLabel::Low);

    settings.twostep.healthy = {1.0, 1.0, 1.0};
    for (auto l : twostep_predict(prepared.train, prepared.test, settings)) CHECK(l == RiskLabel::Low);
  }

  TEST_CASE("a single pseudo-label iteration is plain train and predict") {
    const auto data = fixture::small_split();
    auto settings = fixture::fast_settings();
    settings.pseudolabel.n_iterations = 1;
    settings.pseudolabel.capacity_schedule = {{8}};
    const auto prepared = prepare_tables(data.split.train, data.split.test,
                                         StrategyKind::PseudoLabel, settings.features, true);
    const auto a = pseudolabel_train_predict(prepared.train, prepared.test, settings);
    settings.pseudolabel.confidence_fraction = 0.9;
    CHECK(pseudolabel_train_predict(prepared.train, prepared.test, settings) == a);
  }

  TEST_CASE("training data without failures is rejected") {
    const auto data = fixture::small_split();
    FleetTable healthy_only = data.split.train;
    std::erase_if(healthy_only.rows, [&](const Readout& r) {
      return data.generated.failures.at(r.chassis_id).has_value();
    });
    const auto settings = fixture::fast_settings();
    for (auto kind : {StrategyKind::TwoStep, StrategyKind::Jump, StrategyKind::PseudoLabel}) {
      try {
        predict(kind, healthy_only, data.split.test, settings);
        FAIL("expected a strategy error");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Strategy);
      }
    }
    CHECK_THROWS_AS(predict(StrategyKind::Oracle, data.split.train, data.split.test, settings), Error);
  }
}
