#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "stardyn/star_pattern.hpp"

using namespace stardyn;

namespace {

const char* kEx1 = "n=3 k=5; b1: 1 3; b2: 2; b3: 4";
const char* kEx2 = "n=3 k=6; b1: 1 3 5; b2: 2; b3: 4";

bool has_violation(const std::vector<std::string>& v, const std::string& needle)
{
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

// Every labeled pattern, generated without the library's enumeration code.
std::vector<StarPattern> brute_force(int n, int k, bool all_branches)
{
  std::vector<StarPattern> out;
  std::vector<int> assign(k - 1, 0);
  for (;;) {
    std::vector<std::vector<int>> branches(n);
    for (int i = 1; i < k; ++i)
      branches[assign[i - 1]].push_back(i);
    bool ok = !all_branches || std::all_of(branches.begin(), branches.end(), [](auto& b) { return !b.empty(); });
    if (ok) {
      // every ordering of every branch
      std::function<void(int)> rec = [&](int b) {
        if (b == n) {
          out.push_back(StarPattern::from_branches(n, k, branches));
          return;
        }
        std::sort(branches[b].begin(), branches[b].end());
        do {
          rec(b + 1);
        } while (std::next_permutation(branches[b].begin(), branches[b].end()));
      };
      rec(0);
    }
    int pos = 0;
    while (pos < k - 1 && ++assign[pos] == n)
      assign[pos++] = 0;
    if (pos == k - 1)
      break;
  }
  return out;
}

std::vector<int> identity_perm(int n)
{
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

}  // namespace

TEST_CASE("parse the two worked examples")
{
  const StarPattern p = parse_pattern(kEx1);
  CHECK(p.branch_count() == 3);
  CHECK(p.orbit_size() == 5);
  CHECK(p.branch_of(1) == 0);
  CHECK(p.branch_of(3) == 0);
  CHECK(p.rank_of(1) == 1);
  CHECK(p.rank_of(3) == 2);
  CHECK(p.branch_of(2) == 1);
  CHECK(p.branch_of(4) == 2);
  CHECK(p.branch_of(0) == kCenterBranch);
  CHECK(to_string(p) == kEx1);

  const StarPattern q = parse_pattern(kEx2);
  CHECK(q.branch_length(0) == 3);
  CHECK(q.point_at(0, 3) == 5);
  CHECK(to_string(q) == kEx2);
}

TEST_CASE("empty branch is rejected only when all branches are required")
{
  const char* text = "n=2 k=2; b1: 1; b2:";
  CHECK_THROWS_AS(parse_pattern(text, {.require_all_branches = true}), PatternError);
  try {
    parse_pattern(text, {.require_all_branches = true});
  } catch (const PatternError& e) {
    CHECK(has_violation(e.violations(), "b2 empty"));
  }
  const StarPattern p = parse_pattern(text);
  CHECK(p.branch_length(1) == 0);
  CHECK(to_string(p) == "n=2 k=2; b1: 1; b2:");
}

TEST_CASE("syntax errors report a position")
{
  try {
    parse_pattern("n=3 k=5; b1: 1 3 b2: 2; b3: 4");
    FAIL("expected a syntax error");
  } catch (const PatternError& e) {
    REQUIRE(e.position().has_value());
    CHECK(*e.position() == 17);
  }
  CHECK_THROWS_AS(parse_pattern("n=3 k=5; b2: 1 3; b1: 2; b3: 4"), PatternError);
  CHECK_THROWS_AS(parse_pattern("k=5 n=3; b1: 1 3; b2: 2; b3: 4"), PatternError);
  CHECK_THROWS_AS(parse_pattern("n=3 k=5; b1: 1 3; b2: 2"), PatternError);
  CHECK_THROWS_AS(parse_pattern("n=3 k=5; b1: 1 3; b2: 2; b3: 4 x"), PatternError);
}

TEST_CASE("semantic errors from the parser")
{
  CHECK_THROWS_AS(parse_pattern("n=3 k=5; b1: 1 3; b2: 2 3; b3: 4"), PatternError);  // duplicate
  CHECK_THROWS_AS(parse_pattern("n=3 k=5; b1: 1 3; b2: 2; b3: 5"), PatternError);    // out of range
  CHECK_THROWS_AS(parse_pattern("n=3 k=5; b1: 1 3; b2: 2; b3:"), PatternError);      // 4 missing
}

TEST_CASE("validate lists every violation")
{
  SUBCASE("example is valid")
  {
    CHECK(validate(parse_pattern(kEx1).spec(), true).empty());
  }
  SUBCASE("rank gap")
  {
    PatternSpec s{2, 3, {0, 1, 1}, {0, 1, 3}};
    CHECK(has_violation(validate(s), "rank gap"));
  }
  SUBCASE("orbit too small")
  {
    PatternSpec s{2, 1, {0}, {0}};
    CHECK(has_violation(validate(s), "orbit too small"));
  }
  SUBCASE("several at once")
  {
    PatternSpec s{2, 4, {0, 1, 1, 7}, {0, 1, 1, 1}};
    const auto v = validate(s);
    CHECK(has_violation(v, "duplicate rank"));
    CHECK(has_violation(v, "out of range"));
    CHECK(v.size() >= 2);
  }
  SUBCASE("missing branch with the flag")
  {
    PatternSpec s{3, 3, {0, 1, 2}, {0, 1, 1}};
    CHECK(validate(s, false).empty());
    CHECK(has_violation(validate(s, true), "branch b3 empty"));
  }
}

TEST_CASE("text and JSON round trips")
{
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const int k = 2 + static_cast<int>(rng() % 9);
    const StarPattern p = sample_pattern(n, k, false, rng);
    CHECK(parse_pattern(to_string(p)) == p);
    CHECK(pattern_from_json(nlohmann::json::parse(to_json(p).dump())) == p);
  }
  CHECK(to_json(parse_pattern(kEx2)).dump() == R"({"n":3,"k":6,"branches":[[1,3,5],[2],[4]]})");
  const auto lines = parse_pattern_lines(std::string("# comment\n\n") + kEx1 + "\n" + kEx2 + "\n");
  REQUIRE(lines.size() == 2);
  CHECK(to_string(lines[1]) == kEx2);
}

TEST_CASE("arcs of the first example")
{
  const StarPattern p = parse_pattern(kEx1);
  const Arc a12 = arc({1}, {2}, p);
  CHECK(a12.path() == std::vector<MarkedPoint>{{1}, {0}, {2}});
  CHECK(a12.center_interior());

  const Arc a03 = arc({0}, {3}, p);
  CHECK(a03.path() == std::vector<MarkedPoint>{{0}, {1}, {3}});
  CHECK_FALSE(a03.center_interior());

  const Arc a13 = arc({1}, {3}, p);
  CHECK(a13.path() == std::vector<MarkedPoint>{{1}, {3}});
  CHECK(a13.segments() == SegmentSet::single(3));

  CHECK(arc_contains(a12, arc({0}, {1}, p)));
  CHECK(arc_contains(a13, a13));
  CHECK_FALSE(arc_contains(a13, arc({0}, {1}, p)));

  CHECK_THROWS_AS(arc({2}, {2}, p), std::invalid_argument);
  const StarPattern q = parse_pattern(kEx2);
  CHECK_THROWS_AS(arc_contains(a12, arc({0}, {1}, q)), std::invalid_argument);
}

TEST_CASE("arcs are contiguous chains and satisfy the tree triangle inequality")
{
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const StarPattern p = sample_pattern(2 + static_cast<int>(rng() % 3), 3 + static_cast<int>(rng() % 6), false, rng);
    const int k = p.orbit_size();
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        if (a == b)
          continue;
        const Arc ab = arc({a}, {b}, p);
        // consecutive path points are the endpoints of one basic interval
        SegmentSet from_path;
        for (std::size_t i = 0; i + 1 < ab.path().size(); ++i) {
          const int x = ab.path()[i].index, y = ab.path()[i + 1].index;
          const int outer = p.rank_of(x) > p.rank_of(y) ? x : y;
          const int inner = outer == x ? y : x;
          CHECK(p.inner_of(outer) == inner);
          from_path |= SegmentSet::single(outer);
        }
        CHECK(from_path == ab.segments());
        CHECK(ab.segments() == arc_segments(p, a, b));
        CHECK(arc({b}, {a}, p).segments() == ab.segments());
        for (int c = 0; c < k; ++c) {
          if (c == a || c == b)
            continue;
          const int lhs = arc({a}, {b}, p).segments().size() + arc({b}, {c}, p).segments().size();
          CHECK(lhs >= arc({a}, {c}, p).segments().size());
        }
      }
  }
}

TEST_CASE("canonical forms")
{
  const StarPattern ex1 = parse_pattern(kEx1);
  const StarPattern swapped = permute_branches(ex1, {0, 2, 1});
  CHECK(swapped != ex1);
  CHECK(canonicalize(swapped) == canonicalize(ex1));
  CHECK(canonicalize(ex1) == ex1);

  // first-visit relabeling already holds for the second example
  const StarPattern ex2 = parse_pattern(kEx2);
  CHECK(canonicalize(ex2) == ex2);

  std::mt19937_64 rng(2024);
  for (int i = 0; i < 100; ++i) {
    const StarPattern p = sample_pattern(2 + static_cast<int>(rng() % 4), 2 + static_cast<int>(rng() % 8), false, rng);
    CHECK(canonicalize(canonicalize(p)) == canonicalize(p));
  }
}

TEST_CASE("canonicalize is a class function and picks the least member")
{
  std::mt19937_64 rng(77);
  for (int i = 0; i < 50; ++i) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const StarPattern p = sample_pattern(n, 2 + static_cast<int>(rng() % 7), false, rng);
    const StarPattern c = canonicalize(p);
    std::vector<int> perm = identity_perm(n);
    StarPattern least = p;
    do {
      const StarPattern q = permute_branches(p, perm);
      CHECK(canonicalize(q) == c);
      least = std::min(least, q);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(least == c);
  }
}

TEST_CASE("enumeration counts")
{
  CHECK(enumerate_patterns(3, 4, true).size() == 1);
  CHECK(enumerate_patterns(3, 5, true).size() == 12);
  // one non-center point cannot meet two branches
  CHECK(enumerate_patterns(2, 2, true).empty());
  CHECK(enumerate_patterns(2, 2, false).size() == 1);
  CHECK(enumerate_patterns(2, 3, true).size() == 1);
  CHECK_THROWS_AS(enumerate_patterns(4, 9, false, 10), CapExceeded);
}

TEST_CASE("enumeration is duplicate-free and closed under brute force")
{
  for (int n = 2; n <= 4; ++n)
    for (int k = 2; k <= 6; ++k)
      for (bool all : {false, true}) {
        CAPTURE(n);
        CAPTURE(k);
        CAPTURE(all);
        const auto listed = enumerate_patterns(n, k, all);
        CHECK(std::is_sorted(listed.begin(), listed.end()));
        std::map<StarPattern, int> seen;
        for (const auto& p : listed) {
          CHECK(canonicalize(p) == p);
          seen[p] = 0;
        }
        CHECK(seen.size() == listed.size());
        const auto raw = brute_force(n, k, all);
        for (const auto& q : raw) {
          auto it = seen.find(canonicalize(q));
          REQUIRE(it != seen.end());
          ++it->second;
        }
        std::uint64_t total = 0;
        for (const auto& [p, hits] : seen) {
          CHECK(static_cast<std::uint64_t>(hits) == class_size(p));
          total += class_size(p);
        }
        CHECK(total == raw.size());
      }
}

TEST_CASE("orbit types")
{
  // containing the center
  FiniteOrbitSpec with_center{3, {{kCenterBranch, 0}, {0, 1}, {1, 1}}, {1, 2, 0}};
  CHECK(orbit_type(with_center) == std::set<int>{1});

  // 3-cycle, one point per branch
  FiniteOrbitSpec three{3, {{0, 1}, {1, 1}, {2, 1}}, {1, 2, 0}};
  CHECK(orbit_type(three) == std::set<int>{3});

  // two points on the first branch, the closer one mapping into it
  FiniteOrbitSpec four{3, {{0, 1}, {0, 2}, {1, 1}, {2, 1}}, {1, 2, 3, 0}};
  CHECK(orbit_type(four).contains(1));

  // a 2-cycle of branches
  FiniteOrbitSpec two{2, {{0, 1}, {1, 1}}, {1, 0}};
  CHECK(orbit_type(two) == std::set<int>{2});

  FiniteOrbitSpec broken{2, {{0, 1}, {1, 1}, {1, 2}}, {1, 0, 2}};
  CHECK_FALSE(validate(broken).empty());
  CHECK_THROWS_AS(orbit_type(broken), PatternError);
}
