#pragma once

//
// survey.hpp
//
// Exhaustive classification campaigns over all patterns of a given branch
// count and orbit size, machine-readable tables, and the self-check that
// reproduces the published examples and counts.
//

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "stardyn/report.hpp"

namespace stardyn {

enum class TailShape { CofiniteFrom, EvensPlusOne, Other };

struct Tail {
  TailShape shape = TailShape::Other;
  int from = 0;  // start of the run for CofiniteFrom
  std::string tag() const;
  bool operator==(const Tail&) const = default;
};

// Finite-horizon reading of a period set within [1, bound]:
// EvensPlusOne when it is exactly {1} and the even numbers; CofiniteFrom(m)
// when [m, bound] is inside the set for the least such m <= bound - 1;
// Other otherwise.
Tail classify_tail(const std::set<int>& present, int bound);

struct ClassRecord {
  explicit ClassRecord(StarPattern p) : pattern(std::move(p)) {}

  StarPattern pattern;
  std::uint64_t raw_count = 0;  // labeled patterns in the branch-permutation class
  int pattern_class = 0;        // 1-based, in enumeration order
  int digraph_class = 0;        // 1-based, in order of first appearance
  bool theorem1 = false;
  bool nplus2 = false;
  std::set<int> present;
  std::set<int> absent;
  Tail tail;
  std::optional<int> chaos_iterate;
  std::optional<Genscramble> chaos;
  std::optional<Cascade> cascade;
};

enum class SurveyFilter { None, Theorem1Inapplicable };

struct SurveyOptions {
  int max_period = 10;
  int max_iterate = 2;
  SurveyFilter filter = SurveyFilter::None;
  unsigned jobs = 1;
  OracleOptions oracle;
  std::uint64_t enumeration_cap = 1'000'000;
};

struct ClassCounts {
  std::uint64_t raw = 0;
  std::uint64_t branch_permutation = 0;
  std::uint64_t digraph_isomorphism = 0;
  bool operator==(const ClassCounts&) const = default;
};

struct SurveyResult {
  int n = 0;
  int k = 0;
  SurveyOptions options;
  std::vector<ClassRecord> records;
  ClassCounts counts;
};

// All-branches patterns only. Throws CapExceeded or InconsistencyError.
SurveyResult classify_all(int n, int k, SurveyOptions options = {});

enum class TableFormat { Json, Csv };

std::string render_table(const SurveyResult& survey, TableFormat format);
// Writes through a temporary file and renames it into place.
void emit_table(const SurveyResult& survey, TableFormat format, const std::filesystem::path& path);

// Row-wise string view of a rendered table, for comparing formats.
std::vector<std::vector<std::string>> parse_table(const std::string& text, TableFormat format);

nlohmann::ordered_json summary_json(const SurveyResult& survey);

// ---- published-claims self-check ----

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  // A failed advisory check is reported as a discrepancy, not a failure.
  bool advisory = false;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
  std::string text() const;
  nlohmann::ordered_json json() const;
};

// Expected digraphs, as "[a,b]->[c,d]" edge strings, for the two examples.
struct PaperGoldens {
  std::set<std::string> example1_vertices;
  std::set<std::string> example1_edges;
  std::set<std::string> example2_vertices;
  std::set<std::string> example2_edges;
  int published_class_count = 24;

  static PaperGoldens defaults();
};

inline constexpr const char* kExample1 = "n=3 k=5; b1: 1 3; b2: 2; b3: 4";
inline constexpr const char* kExample2 = "n=3 k=6; b1: 1 3 5; b2: 2; b3: 4";

VerifyReport verify_paper(const PaperGoldens& goldens = PaperGoldens::defaults(),
                          unsigned jobs = 1);

// "[a,b]->[c,d]" for every edge.
std::set<std::string> edge_labels(const CoverDigraph& g);

}  // namespace stardyn
