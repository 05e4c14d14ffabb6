#include "test_util.hpp"

#include <set>

using anm::ErrorCode;
using testutil::error_code_of;

namespace {

// Recounts a group directly from the records.
void check_summary_matches(const anm::ExperimentReport& report) {
  std::set<std::string> names;
  for (const auto& r : report.records) names.insert(r.group);
  CHECK(report.groups.size() == names.size());
  auto check = [&](const anm::GroupSummary& s, const std::string& group) {
    std::size_t trials = 0, correct = 0, wrong = 0, abstained = 0;
    long shd_sum = 0;
    for (const auto& r : report.records) {
      if (!group.empty() && r.group != group) continue;
      ++trials;
      if (!r.chosen) {
        ++abstained;
        CHECK(r.shd == -1);
        continue;
      }
      CHECK(r.shd == anm::shd(*r.chosen, r.truth));
      CHECK(r.correct == (r.shd == 0));
      shd_sum += r.shd;
      (r.correct ? correct : wrong)++;
    }
    CHECK(s.trials == trials);
    CHECK(s.correct == correct);
    CHECK(s.wrong == wrong);
    CHECK(s.abstained == abstained);
    CHECK(s.decided == trials - abstained);
    if (trials) {
      CHECK(s.accuracy == static_cast<double>(correct) / static_cast<double>(trials));
      CHECK(s.wrong_rate == static_cast<double>(wrong) / static_cast<double>(trials));
      CHECK(s.abstain_rate == static_cast<double>(abstained) / static_cast<double>(trials));
    }
    if (trials > abstained)
      CHECK(s.mean_shd == static_cast<double>(shd_sum) / static_cast<double>(trials - abstained));
  };
  for (const auto& g : report.groups) check(g, g.group);
  check(report.overall, "");
}

bool same_records(const anm::ExperimentReport& a, const anm::ExperimentReport& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& x = a.records[i];
    const auto& y = b.records[i];
    if (x.group != y.group || x.unit != y.unit || x.replicate != y.replicate || x.seed != y.seed || x.n != y.n ||
        !(x.truth == y.truth) || x.chosen != y.chosen || x.shd != y.shd)
      return false;
  }
  return true;
}

void write_pair(const testutil::TempDir& dir, const std::string& name, const anm::Dataset& data, bool swap) {
  std::string body;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const double a = data(i, swap ? 1 : 0), b = data(i, swap ? 0 : 1);
    body += anm::format_double(a) + "\t" + anm::format_double(b) + "\n";
  }
  dir.file(name, body);
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("grid cells with equal parameters are identical") {
    const auto g = anm::run_bq_grid({0.0, 0.0, 1.0}, {1.0}, 100, 10, {}, 200);
    CHECK(g.wrong[0] == g.wrong[1]);
    CHECK(g.rates.size() == 3);
    CHECK(g.rate(0, 0) == g.rate(1, 0));
    const auto again = anm::run_bq_grid({0.0, 0.0, 1.0}, {1.0}, 100, 10, {}, 200);
    CHECK(again.wrong == g.wrong);
  }

  TEST_CASE("single-trial grid cells") {
    const auto g = anm::run_bq_grid({0.0, 0.5}, {0.5, 1.0, 2.0}, 80, 1, {}, 201);
    for (double r : g.rates) CHECK((r == 0.0 || r == 1.0));
    CHECK(anm::run_bq_grid({0.0, 0.5}, {0.5, 1.0, 2.0}, 80, 1, {}, 201).rates == g.rates);
    CHECK(error_code_of([] { anm::run_bq_grid({0.0}, {1.0}, 80, 0, {}, 1); }) == ErrorCode::empty_experiment);
  }

  TEST_CASE("grid wrong counts match direct pairwise comparison") {
    const auto g = anm::run_bq_grid({0.0}, {1.0}, 120, 12, {}, 202);
    // Regenerate one cell's trials by hand through the public generator.
    std::size_t wrong = 0;
    for (std::uint64_t t = 0; t < 12; ++t) {
      const auto data = anm::gen_cubic(120, 0.0, 1.0, anm::derive_seed(202, {t}));
      const auto r = anm::exhaustive_search(data, {});
      wrong += r.find(anm::make_dag(2, {{1, 0}}))->total > r.find(anm::make_dag(2, {{0, 1}}))->total;
    }
    CHECK(g.wrong[0] == wrong);
  }

  TEST_CASE("nonlinearity sweep") {
    const auto s = anm::run_nonlinearity_sweep({0.0, 0.3}, 3, 4, 100, {}, 203);
    CHECK(s.rates.size() == 2);
    CHECK(s.wrong[0] <= 12);
    CHECK(s.rates[1] == static_cast<double>(s.wrong[1]) / 12.0);
    CHECK(anm::run_nonlinearity_sweep({0.0, 0.3}, 3, 4, 100, {}, 203).wrong == s.wrong);
  }

  TEST_CASE("three-node study") {
    const auto r0 = anm::run_three_node(2, 3, 120, 0.39, 0.4, 0.0, {}, 204);
    CHECK(r0.records.size() == 6);
    CHECK(r0.overall.abstained == 0);
    CHECK(r0.overall.decision_rate == 1.0);
    check_summary_matches(r0);
    const auto r1 = anm::run_three_node(2, 3, 120, 0.39, 0.4, 0.05, {}, 204);
    CHECK(r1.overall.wrong <= r0.overall.wrong);
    for (std::size_t i = 0; i < r0.records.size(); ++i) {
      CHECK(r0.records[i].seed == r1.records[i].seed);
      if (r1.records[i].chosen) CHECK(*r1.records[i].chosen == *r0.records[i].chosen);
    }
    check_summary_matches(r1);
    CHECK(same_records(r0, anm::run_three_node(2, 3, 120, 0.39, 0.4, 0.0, {}, 204)));
  }

  TEST_CASE("consistency curve") {
    anm::BivariateGenerator gen;
    gen.kind = anm::BivariateGenerator::Kind::cubic;
    const auto r = anm::run_consistency_curve({60, 120}, 5, gen, {}, 205);
    CHECK(r.groups.size() == 2);
    CHECK(r.groups[0].group == "n=60");
    CHECK(r.group("n=120").trials == 5);
    check_summary_matches(r);
    CHECK(same_records(r, anm::run_consistency_curve({60, 120}, 5, gen, {}, 205)));
    CHECK(error_code_of([&] { anm::run_consistency_curve({60}, 0, gen, {}, 1); }) == ErrorCode::empty_experiment);
    CHECK(error_code_of([&] { anm::run_consistency_curve({}, 3, gen, {}, 1); }) == ErrorCode::empty_experiment);
    CHECK(error_code_of([&] { anm::run_consistency_curve({100, 50}, 3, gen, {}, 1); }) == ErrorCode::invalid_argument);

    anm::BivariateGenerator none;
    none.kind = anm::BivariateGenerator::Kind::independent;
    CHECK(none.truth().edge_count() == 0);
    const auto d = none.sample(2000, 1, 2);
    CHECK(std::abs(testutil::corr(testutil::to_vector(d.column(0)), testutil::to_vector(d.column(1)))) < 0.1);
  }

  TEST_CASE("summaries recount from records") {
    anm::ExperimentReport rep;
    const auto truth = anm::make_dag(2, {{0, 1}});
    rep.records = {
        {"a", "", 0, 0, 1, 10, truth, truth, true, 0},
        {"a", "", 1, 0, 2, 10, truth, anm::make_dag(2, {}), false, 1},
        {"b", "", 0, 0, 3, 10, truth, std::nullopt, false, -1},
        {"b", "", 1, 0, 4, 10, truth, anm::make_dag(2, {{1, 0}}), false, 1},
    };
    anm::finalize_report(rep);
    REQUIRE(rep.groups.size() == 2);
    CHECK(rep.group("a").accuracy == 0.5);
    CHECK(rep.group("b").abstain_rate == 0.5);
    CHECK(rep.group("b").wrong_rate == 0.5);
    CHECK(rep.overall.mean_shd == doctest::Approx(2.0 / 3.0));
    check_summary_matches(rep);
  }

  TEST_CASE("pairs metadata formats") {
    testutil::TempDir dir;
    const auto meta = dir.file("meta.txt",
                               "# comment\n"
                               "p1 1 2\n"
                               "\n"
                               "p2 2 1\n"
                               "pair0003 1 1 2 2 1.0\n"
                               "pair0004 1 2 3 3 1.0\n");
    const auto entries = anm::load_pairs_metadata(meta);
    REQUIRE(entries.size() == 4);
    CHECK(entries[0].cause == 0);
    CHECK(entries[0].effect == 1);
    CHECK(entries[1].cause == 1);
    CHECK(entries[2].id == "pair0003");
    CHECK(!entries[2].multivariate);
    CHECK(entries[3].multivariate);
    CHECK(error_code_of([&] { anm::load_pairs_metadata((dir.path() / "nope.txt").string()); }) ==
          ErrorCode::missing_metadata);
    const auto bad = dir.file("bad.txt", "p1 x 2\n");
    CHECK(error_code_of([&] { anm::load_pairs_metadata(bad); }) == ErrorCode::parse_error);
  }

  TEST_CASE("pairs evaluation") {
    testutil::TempDir dir;
    anm::BivariateGenerator gen;
    gen.nl_lo = 0.35;
    gen.nl_hi = 0.4;
    write_pair(dir, "a.txt", gen.sample(400, 11, 12), false);
    write_pair(dir, "b", gen.sample(700, 13, 14), true);
    write_pair(dir, "pairc.txt", gen.sample(150, 15, 16), false);
    dir.file("bad.txt", "1 2\n3 oops\n");
    const auto meta = dir.file("meta.txt",
                               "a 1 2\n"
                               "b 2 1\n"
                               "c 1 2\n"
                               "m 1 2 3 3 1\n"
                               "missing 1 2\n"
                               "bad 1 2\n");
    anm::PairsOptions opt;
    opt.subsample_cap = 500;
    opt.reps = 3;
    const auto rep = anm::eval_pairs(dir.path().string(), meta, opt, {}, 206);
    REQUIRE(rep.records.size() == 3);
    CHECK(rep.skipped.size() == 3);
    // n=400 is below the cap: scored once on the full data.
    CHECK(rep.records[0].label == "a");
    CHECK(rep.records[0].n == 400);
    CHECK(rep.records[0].replicate == 1);
    CHECK(rep.records[1].n == 500);
    CHECK(rep.records[1].replicate == 3);
    CHECK(rep.records[1].truth == anm::make_dag(2, {{1, 0}}));
    check_summary_matches(rep);

    // Below the cap the seed cannot matter.
    const auto other = anm::eval_pairs(dir.path().string(), meta, opt, {}, 999);
    CHECK(other.records[0].chosen == rep.records[0].chosen);
    CHECK(other.records[2].chosen == rep.records[2].chosen);

    CHECK(error_code_of([&] {
            anm::eval_pairs(dir.path().string(), (dir.path() / "none.txt").string(), opt, {}, 1);
          }) == ErrorCode::missing_metadata);
  }
}
