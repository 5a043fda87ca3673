#include <filesystem>

#include "doctest.h"
#include "stardyn/file_io.hpp"
#include "stardyn/survey.hpp"

using namespace stardyn;

TEST_CASE("tail shapes")
{
  CHECK(classify_tail({1, 2, 4, 6, 8, 10}, 10).tag() == "evens-plus-one");
  CHECK(classify_tail({1, 2, 4, 5, 6, 7, 8, 9, 10}, 10) == Tail{TailShape::CofiniteFrom, 4});
  CHECK(classify_tail({1, 2, 4, 5, 6, 7, 8, 9, 10}, 10).tag() == "cofinite-from-4");
  CHECK(classify_tail({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 10).tag() == "cofinite-from-1");
  CHECK(classify_tail({1, 3, 6}, 10).tag() == "other");
  CHECK(classify_tail({1, 9, 10}, 10).tag() == "cofinite-from-9");
  CHECK(classify_tail({1, 10}, 10).tag() == "other");
  CHECK(classify_tail({}, 10).tag() == "other");
}

TEST_CASE("survey of three branches and four points")
{
  const SurveyResult s = classify_all(3, 4);
  REQUIRE(s.records.size() == 1);
  const ClassRecord& r = s.records.front();
  CHECK(to_string(r.pattern) == "n=3 k=4; b1: 1; b2: 2; b3: 3");
  CHECK(r.raw_count == 6);
  CHECK(r.theorem1);
  CHECK(r.present.size() == 10);
  CHECK(r.tail.tag() == "cofinite-from-1");
  CHECK(r.chaos_iterate == 1);
  CHECK(s.counts == ClassCounts{6, 1, 1});

  const std::string csv = render_table(s, TableFormat::Csv);
  CHECK(csv.rfind("pattern,pattern_class,digraph_class,theorem1,nplus2,periods,tail,chaos_iterate\n", 0) == 0);
  const auto rows = parse_table(csv, TableFormat::Csv);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][0] == "n=3 k=4; b1: 1; b2: 2; b3: 3");
  CHECK(rows[0][3] == "true");
  CHECK(rows[0][5] == "1 2 3 4 5 6 7 8 9 10");
}

TEST_CASE("survey of three branches and five points")
{
  const SurveyResult s = classify_all(3, 5);
  CHECK(s.records.size() == 12);
  CHECK(s.counts.raw == 72);
  for (const auto& r : s.records) {
    CAPTURE(to_string(r.pattern));
    // the center theorem applies exactly when f^3(o) is off the branch of f(o)
    CHECK(r.theorem1 == (r.pattern.branch_of(3) != r.pattern.branch_of(1)));
    CHECK(r.present.contains(5));
    CHECK(r.chaos_iterate.has_value());
    CHECK(r.nplus2 == !r.theorem1);
    // case 2 (x1 inside x3) is the one without period 3
    if (r.nplus2)
      CHECK(r.tail.tag() == (r.pattern.rank_of(1) < r.pattern.rank_of(3) ? "cofinite-from-4" : "cofinite-from-1"));
  }

  SurveyOptions filtered;
  filtered.filter = SurveyFilter::Theorem1Inapplicable;
  const SurveyResult f = classify_all(3, 5, filtered);
  for (const auto& r : f.records)
    CHECK_FALSE(r.theorem1);
  CHECK(f.records.size() < s.records.size());
}

TEST_CASE("tables round trip between formats and are identical across worker counts")
{
  SurveyOptions one;
  one.max_period = 8;
  SurveyOptions many = one;
  many.jobs = 4;
  const SurveyResult a = classify_all(3, 5, one);
  const SurveyResult b = classify_all(3, 5, many);
  for (TableFormat fmt : {TableFormat::Json, TableFormat::Csv})
    CHECK(render_table(a, fmt) == render_table(b, fmt));
  CHECK(summary_json(a).dump() == summary_json(b).dump());

  const auto from_csv = parse_table(render_table(a, TableFormat::Csv), TableFormat::Csv);
  const auto from_json = parse_table(render_table(a, TableFormat::Json), TableFormat::Json);
  CHECK(from_csv == from_json);
  CHECK(from_csv.size() == a.records.size());
}

TEST_CASE("emit_table writes the rendered table")
{
  const SurveyResult s = classify_all(3, 4);
  const auto dir = std::filesystem::temp_directory_path() / "stardyn_survey_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "t.csv";
  emit_table(s, TableFormat::Csv, path);
  CHECK(read_file(path) == render_table(s, TableFormat::Csv));
  CHECK_FALSE(std::filesystem::exists(dir / "t.csv.tmp"));
  CHECK_THROWS(emit_table(s, TableFormat::Csv, dir / "missing" / "t.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("self-check catches a corrupted golden digraph")
{
  PaperGoldens g = PaperGoldens::defaults();
  g.example1_edges.erase("[0,4]->[0,1]");
  const VerifyReport r = verify_paper(g);
  CHECK_FALSE(r.all_passed());
  bool found = false;
  for (const auto& c : r.checks)
    if (c.name == "example1-digraph") {
      found = true;
      CHECK_FALSE(c.passed);
      CHECK(c.detail.find("[0,4]->[0,1]") != std::string::npos);
    } else if (!c.advisory) {
      CHECK(c.passed);
    }
  CHECK(found);
  CHECK(r.text().find("FAIL example1-digraph") != std::string::npos);
}
