#include "test_util.hpp"

using anm::ErrorCode;
using anm::json;
using testutil::error_code_of;

TEST_SUITE("io") {
  TEST_CASE("whitespace file without header") {
    testutil::TempDir dir;
    const auto path = dir.file("d.txt", "1 2\n3 4\n5\t6\n  7 8  \n9 10\n");
    anm::LoadStats stats;
    const auto d = anm::load_dataset(path, &stats);
    CHECK(d.rows() == 5);
    CHECK(d.cols() == 2);
    CHECK(d(2, 1) == 6.0);
    CHECK(d.names() == std::vector<std::string>{"X1", "X2"});
    CHECK(!stats.had_header);
    CHECK(stats.rows_read == 5);
  }

  TEST_CASE("header row becomes the names") {
    testutil::TempDir dir;
    const auto d = anm::load_dataset(dir.file("h.txt", "x y\n1 2\n3 4\n"));
    CHECK(d.names() == std::vector<std::string>{"x", "y"});
    CHECK(d.rows() == 2);
    const auto c = anm::load_dataset(dir.file("h.csv", "a,b,c\r\n1,2,3\r\n4,5,6e-1\r\n"));
    CHECK(c.names() == std::vector<std::string>{"a", "b", "c"});
    CHECK(c(1, 2) == 0.6);
  }

  TEST_CASE("parse errors name the line") {
    testutil::TempDir dir;
    const auto path = dir.file("bad.txt", "1.0 2.0\n1.0 abc\n");
    try {
      anm::load_dataset(path);
      FAIL("expected ParseError");
    } catch (const anm::Error& e) {
      CHECK(e.code() == ErrorCode::parse_error);
      CHECK(std::string(e.what()).find(":2:") != std::string::npos);
      CHECK(std::string(e.what()).rfind("ParseError", 0) == 0);
    }
    CHECK(error_code_of([&] { anm::load_dataset(dir.file("ragged.txt", "1 2\n3\n")); }) == ErrorCode::parse_error);
    CHECK(error_code_of([&] { anm::load_dataset(dir.file("empty.txt", "\n\n")); }) == ErrorCode::empty_file);
    CHECK(error_code_of([&] { anm::load_dataset(dir.file("onlyhead.txt", "a b\n")); }) == ErrorCode::empty_file);
    CHECK(error_code_of([&] { anm::load_dataset((dir.path() / "absent.txt").string()); }) == ErrorCode::io_error);
  }

  TEST_CASE("non-finite rows are dropped and counted") {
    testutil::TempDir dir;
    anm::LoadStats stats;
    const auto d = anm::load_dataset(dir.file("nan.txt", "1 2\nnan 3\n4 inf\n5 6\n"), &stats);
    CHECK(d.rows() == 2);
    CHECK(stats.rejected_nonfinite == 2);
    CHECK(d(1, 0) == 5.0);
  }

  TEST_CASE("csv round trip is exact") {
    testutil::TempDir dir;
    const auto data = anm::gen_cubic(50, 0.7, 1.3, 300);
    const auto path = (dir.path() / "rt.csv").string();
    anm::write_csv(data, path);
    const auto back = anm::load_dataset(path);
    CHECK(back.names() == data.names());
    for (std::size_t i = 0; i < data.rows(); ++i)
      for (std::size_t k = 0; k < data.cols(); ++k) CHECK(back(i, k) == data(i, k));
  }

  TEST_CASE("dataset construction") {
    CHECK(error_code_of([] { anm::Dataset::from_columns({{1.0, 2.0}, {1.0}}); }) == ErrorCode::shape_mismatch);
    CHECK(error_code_of([] { anm::Dataset::from_columns({{1.0, std::nan("")}}); }) == ErrorCode::invalid_argument);
    const auto d = anm::Dataset::from_columns({{1, 2, 3}, {4, 5, 6}}, {"a", "b"});
    const std::vector<std::size_t> rows = {2, 0};
    const auto s = d.select_rows(rows, "sub");
    CHECK(s(0, 1) == 6.0);
    CHECK(s.provenance() == "sub");
    const std::vector<std::size_t> cols = {1};
    CHECK(d.select_columns(cols).names() == std::vector<std::string>{"b"});
  }

  TEST_CASE("json round trips") {
    anm::Rng rng(301);
    for (int rep = 0; rep < 50; ++rep) {
      const auto g = testutil::random_dag(1 + static_cast<int>(rng() % 6), rng);
      CHECK(anm::dag_from_json(json::parse(anm::to_json(g).dump())) == g);
    }
    const auto f = anm::gen_wiener_function(302, 0.25);
    const auto back = anm::edge_function_from_json(json::parse(anm::to_json(f).dump()));
    CHECK(back.ordinates() == f.ordinates());
    for (double x : {-2.0, -0.3, 0.77, 4.0}) CHECK(back(x) == f(x));
    CHECK(error_code_of([] { anm::dag_from_json(json::parse("{\"d\": 2}")); }) == ErrorCode::parse_error);
  }

  TEST_CASE("ranking and decision serialization") {
    const auto data = anm::gen_cubic(100, 1.0, 1.0, 303);
    const auto r = anm::exhaustive_search(data, {});
    const auto j = anm::to_json(r);
    REQUIRE(j.size() == 3);
    CHECK(j[0]["total"].get<double>() == r.best().score.total);
    CHECK(anm::dag_from_json(j[0]["dag"]) == r.best().score.dag);
    const auto d = anm::to_json(anm::decide(r, 0.0));
    CHECK(d["outcome"] == "selected");
    CHECK(anm::to_json(anm::decide(r, 2.0))["outcome"] == "abstained");
    const auto csv = anm::ranking_to_csv(r);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  }

  TEST_CASE("grid csv layout") {
    const auto g = anm::run_bq_grid({-1.0, 0.0, 1.0}, {1.0, 2.0}, 60, 2, {}, 304);
    const auto csv = anm::to_csv(g);
    CHECK(csv.rfind("b,q,trials,false_rate\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
    CHECK(anm::format_double(0.1) == "0.10000000000000001");
  }
}
