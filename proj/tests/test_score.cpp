#include "test_util.hpp"

#include <numbers>

using anm::ErrorCode;
using anm::PenaltyRule;
using anm::ScoreConfig;
using testutil::error_code_of;

namespace {

anm::Dataset three_node_data(std::uint64_t seed, std::size_t n = 200) {
  const auto spec = anm::random_anm_spec(anm::make_dag(3, {{0, 1}, {0, 2}, {1, 2}}), 0.3, 0.4,
                                         anm::NoiseSpec::gaussian(1.0), seed);
  return anm::sample_anm(spec, n, seed + 1);
}

}  // namespace

TEST_SUITE("score") {
  TEST_CASE("penalty arithmetic") {
    CHECK(anm::penalty(300, 2, PenaltyRule::inv_sqrt_n()) == doctest::Approx(2.0 / std::sqrt(300.0)).epsilon(1e-15));
    CHECK(anm::penalty(300, 2, PenaltyRule::inv_sqrt_n()) == doctest::Approx(0.11547).epsilon(1e-4));
    CHECK(anm::penalty(std::exp(2.0), 1, PenaltyRule::inv_log_n()) == 0.5);
    for (const auto& rule : {PenaltyRule::inv_log_n(), PenaltyRule::inv_sqrt_n(), PenaltyRule::fixed(3.0), PenaltyRule::none()})
      CHECK(anm::penalty(50, 0, rule) == 0.0);
    CHECK(anm::penalty(10, 3, PenaltyRule::fixed(0.25)) == 0.75);
    CHECK(anm::penalty(10, 3, PenaltyRule::none()) == 0.0);
    CHECK(error_code_of([] { anm::penalty(1, 1, PenaltyRule::inv_log_n()); }) == ErrorCode::too_few_points);
  }

  TEST_CASE("adding an edge changes the penalty by the rate") {
    for (std::size_t n : {10u, 300u, 12345u})
      for (const auto& rule : {PenaltyRule::inv_log_n(), PenaltyRule::inv_sqrt_n(), PenaltyRule::fixed(0.7)})
        for (int e = 0; e < 15; ++e) {
          const double step = anm::penalty(n, e + 1, rule) - anm::penalty(n, e, rule);
          CHECK(step == doctest::Approx(rule.rate(n)).epsilon(1e-14));
        }
  }

  TEST_CASE("root family loglik is near the Gaussian entropy") {
    const auto data = anm::Dataset::from_columns({testutil::normals(1000, 50)});
    anm::FamilyCache cache;
    const auto& fit = anm::family_score(data, 0, 0, {}, cache);
    CHECK(std::abs(fit.loglik + 0.5 * std::log(2 * std::numbers::pi * std::numbers::e)) < 0.08);
    CHECK(fit.residuals == testutil::to_vector(data.column(0)));
  }

  TEST_CASE("a real parent raises the family likelihood") {
    const auto x = testutil::normals(400, 51);
    const auto e = testutil::normals(400, 52, 0.1);
    std::vector<double> y(400);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] * x[i] * x[i] + e[i];
    const auto data = anm::Dataset::from_columns({x, y});
    anm::FamilyCache cache;
    const double with_parent = anm::family_score(data, 1, 0b01, {}, cache).loglik;
    const double without = anm::family_score(data, 1, 0, {}, cache).loglik;
    CHECK(with_parent > without + 1.0);
  }

  TEST_CASE("cache returns the same fit without refitting") {
    const auto data = three_node_data(53);
    anm::FamilyCache cache;
    const auto& a = anm::family_score(data, 2, 0b011, {}, cache);
    CHECK(cache.fit_count() == 1);
    const auto& b = anm::family_score(data, 2, 0b011, {}, cache);
    CHECK(&a == &b);
    CHECK(cache.fit_count() == 1);
    anm::family_score(data, 2, 0b001, {}, cache);
    CHECK(cache.fit_count() == 2);
    CHECK(cache.size() == 2);

    // Another config rebinds the cache.
    ScoreConfig other;
    other.smoother.span = 0.5;
    anm::family_score(data, 2, 0b011, other, cache);
    CHECK(cache.fit_count() == 1);
  }

  TEST_CASE("score decomposes into family terms") {
    anm::Rng rng(54);
    const auto data4 = anm::sample_anm(
        anm::random_anm_spec(anm::make_dag(4, {{0, 1}, {1, 2}, {0, 3}}), 0.2, 0.4, anm::NoiseSpec::gaussian(1.0), 55),
        150, 56);
    for (const auto& config : {ScoreConfig{}, ScoreConfig{{}, {}, PenaltyRule::inv_log_n()}}) {
      anm::FamilyCache cache, fresh;
      for (int trial = 0; trial < 30; ++trial) {
        const anm::Dag g = testutil::random_dag(4, rng);
        const anm::Score s = anm::score_dag(data4, g, config, cache);
        double sum = 0.0;
        for (int k = 0; k < 4; ++k) sum += anm::family_score(data4, k, g.parent_mask(k), config, fresh).loglik;
        CHECK(s.loglik == sum);
        CHECK(s.penalty == anm::penalty(150, g.edge_count(), config.penalty));
        CHECK(s.total == sum - s.penalty);
        CHECK(anm::score_dag(data4, g, config, cache).total == s.total);
      }
    }
  }

  TEST_CASE("cubic model prefers the causal direction") {
    int forward_wins = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
      const auto data = anm::gen_cubic(300, 1.0, 1.0, 1000 + rep);
      anm::FamilyCache cache;
      const double fwd = anm::score_dag(data, anm::make_dag(2, {{0, 1}}), {}, cache).total;
      const double bwd = anm::score_dag(data, anm::make_dag(2, {{1, 0}}), {}, cache).total;
      forward_wins += fwd > bwd;
    }
    CHECK(forward_wins >= 85);
  }

  TEST_CASE("errors carry the family") {
    const std::vector<double> constant(50, 1.0);
    const auto data = anm::Dataset::from_columns({constant, testutil::normals(50, 57)});
    anm::FamilyCache cache;
    try {
      anm::family_score(data, 1, 0b01, {}, cache);
      FAIL("expected an error");
    } catch (const anm::Error& e) {
      CHECK(e.code() == ErrorCode::degenerate_x);
      CHECK(std::string(e.what()).find("X2") != std::string::npos);
      CHECK(std::string(e.what()).find("X1") != std::string::npos);
    }
    CHECK(error_code_of([&] { anm::score_dag(data, anm::make_dag(3, {}), {}, cache); }) == ErrorCode::dimension_mismatch);
  }
}
