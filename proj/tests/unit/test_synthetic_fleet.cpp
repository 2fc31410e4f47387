#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "fleetrisk/error.hpp"
#include "fleetrisk/labeling.hpp"
#include "fleetrisk/schema_io.hpp"
#include "fleetrisk/synthetic_fleet.hpp"

using namespace fleetrisk;

namespace {

GeneratorConfig small_config() {
  GeneratorConfig c;
  c.n_trucks = 40;
  c.n_features = 6;
  c.n_signal_features = 2;
  return c;
}

std::string dump(const FleetTable& t) {
  std::ostringstream out;
  write_fleet_table(t, out);
  return out.str();
}

std::pair<double, double> mean_var(const std::vector<double>& x) {
  double m = 0;
  for (double v : x) m += v;
  m /= double(x.size());
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return {m, s / double(x.size() - 1)};
}

}  // namespace

TEST_SUITE("synthetic-fleet") {
  TEST_CASE("failure count is the rounded fraction") {
    GeneratorConfig c = small_config();
    c.n_trucks = 10;
    c.failure_fraction = 0.3;
    c.seed = 7;
    const auto g = generate_fleet(c);
    std::size_t failed = 0;
    for (const auto& [id, f] : g.failures) failed += f.has_value();
    CHECK(failed == 3);
    CHECK(g.failures.size() == 10);
  }

  TEST_CASE("series structure") {
    const auto c = small_config();
    const auto g = generate_fleet(c);
    CHECK_FALSE(g.fleet.has_labels);
    validate_fleet_table(g.fleet);
    std::set<std::string> variant_ids;
    for (const auto& v : g.variants.rows) {
      variant_ids.insert(v.chassis_id);
      CHECK(v.specs.size() == kNumVariantSpecs);
    }
    const auto spans = truck_spans(g.fleet);
    CHECK(spans.size() == c.n_trucks);
    for (const auto& span : spans) {
      const auto& first = g.fleet.rows[span.begin];
      const auto& last = g.fleet.rows[span.end - 1];
      CHECK(first.timestep == 1);
      CHECK(int(span.size()) >= c.min_length);
      CHECK(int(span.size()) <= c.max_length);
      CHECK(variant_ids.count(first.chassis_id) == 1);
      const auto f = g.failures.at(first.chassis_id);
      if (f) CHECK(*f == last.timestep);
      for (std::size_t i = span.begin; i < span.end; ++i) CHECK(g.fleet.rows[i].gen == first.gen);
    }
  }

  TEST_CASE("determinism") {
    const auto c = small_config();
    const auto a = generate_fleet(c);
    const auto b = generate_fleet(c);
    CHECK(dump(a.fleet) == dump(b.fleet));
    CHECK(a.variants == b.variants);
    CHECK(a.failures == b.failures);
    auto other = c;
    other.seed = c.seed + 1;
    CHECK(dump(generate_fleet(other).fleet) != dump(a.fleet));
  }

  TEST_CASE("no-signal configuration makes failed and healthy trucks alike") {
    GeneratorConfig c;
    c.n_trucks = 400;
    c.n_features = 3;
    c.n_signal_features = 1;
    c.failure_fraction = 0.5;
    c.drift_strength = 0.0;
    c.gen2_shift = 0.0;
    c.gen2_scale = 1.0;
    c.outlier_rate = 0.0;
    const auto g = generate_fleet(c);
    // Centre each truck on its feature baseline, then compare the residuals.
    std::vector<double> failed, healthy;
    for (const auto& r : g.fleet.rows) {
      const double resid = r.features[0] - g.baselines[0];
      (g.failures.at(r.chassis_id) ? failed : healthy).push_back(resid);
    }
    const auto [mf, vf] = mean_var(failed);
    const auto [mh, vh] = mean_var(healthy);
    const double z = (mf - mh) / std::sqrt(vf / double(failed.size()) + vh / double(healthy.size()));
    CHECK(std::abs(z) < 4.0);
    CHECK(vf / vh == doctest::Approx(1.0).epsilon(0.1));
  }

  TEST_CASE("planted drift is visible near failure") {
    GeneratorConfig c = small_config();
    c.n_trucks = 200;
    c.outlier_rate = 0.0;
    c.gen2_fraction = 0.0;
    const auto g = generate_fleet(c);
    const auto labeled = label_fleet(g.fleet, g.failures);
    double high = 0, low = 0;
    std::size_t nh = 0, nl = 0;
    for (const auto& r : labeled.rows) {
      const double v = r.features[0] - g.baselines[0];
      if (*r.risk_level == RiskLabel::High) {
        high += v;
        ++nh;
      } else if (*r.risk_level == RiskLabel::Low) {
        low += v;
        ++nl;
      }
    }
    CHECK(high / double(nh) - low / double(nl) > 1.0);
  }

  TEST_CASE("split") {
    const auto c = small_config();
    const auto g = generate_fleet(c);
    const auto s = split_train_test(g, c);
    CHECK(s.train.has_labels);
    CHECK_FALSE(s.test.has_labels);
    std::set<std::string> train_ids, test_ids;
    for (const auto& r : s.train.rows) {
      CHECK(r.gen == Generation::Gen1);
      train_ids.insert(r.chassis_id);
    }
    const auto spans = truck_spans(s.test);
    for (const auto& span : spans) {
      CHECK(span.size() == kWindowLength);
      test_ids.insert(s.test.rows[span.begin].chassis_id);
    }
    for (const auto& id : train_ids) CHECK(test_ids.count(id) == 0);
    CHECK(train_ids.size() + test_ids.size() + s.skipped_trucks == c.n_trucks);
    REQUIRE(s.truth.rows.size() == s.test.rows.size());
    for (std::size_t i = 0; i < s.test.rows.size(); ++i) {
      CHECK(s.truth.rows[i].chassis_id == s.test.rows[i].chassis_id);
      CHECK(s.truth.rows[i].timestep == s.test.rows[i].timestep);
      CHECK(s.truth.rows[i].gen == s.test.rows[i].gen);
    }
    // Failed test trucks end their window on a High readout.
    for (const auto& span : spans) {
      const auto& last = s.truth.rows[span.end - 1];
      if (s.test_failures.at(last.chassis_id)) CHECK(*last.risk_level == RiskLabel::High);
    }
  }

  TEST_CASE("split without gen1 trucks") {
    GeneratorConfig c = small_config();
    c.gen2_fraction = 1.0;
    try {
      split_train_test(generate_fleet(c), c);
      FAIL("expected a split error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Split);
    }
  }

  TEST_CASE("config validation") {
    auto bad = small_config();
    bad.min_length = 12;
    CHECK_THROWS_AS(validate(bad), Error);
    bad = small_config();
    bad.n_signal_features = 0;
    CHECK_THROWS_AS(generate_fleet(bad), Error);
    bad = small_config();
    bad.n_signal_features = 7;
    CHECK_THROWS_AS(validate(bad), Error);
    bad = small_config();
    bad.noise_sigma = 0.0;
    CHECK_THROWS_AS(validate(bad), Error);
    bad = small_config();
    bad.outlier_rate = 1.0;
    CHECK_THROWS_AS(validate(bad), Error);
    bad = small_config();
    bad.min_length = 50;
    bad.max_length = 40;
    CHECK_THROWS_AS(validate(bad), Error);

    const auto full = full_scale_config();
    CHECK(full.n_trucks == 7280);
    CHECK(full.n_features == 304);
    validate(full);
  }
}
