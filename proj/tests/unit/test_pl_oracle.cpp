#include <algorithm>
#include <functional>
#include <random>

#include "doctest.h"
#include "stardyn/cover_digraph.hpp"
#include "stardyn/pl_map.hpp"

using namespace stardyn;

namespace {

const StarPattern& ex1()
{
  static const StarPattern p = parse_pattern("n=3 k=5; b1: 1 3; b2: 2; b3: 4");
  return p;
}

const StarPattern& ex2()
{
  static const StarPattern p = parse_pattern("n=3 k=6; b1: 1 3 5; b2: 2; b3: 4");
  return p;
}

StarPoint pt(int branch1, Rational c)
{
  return StarPoint(branch1 - 1, std::move(c));
}

std::vector<int> divisors_below(int p)
{
  std::vector<int> out;
  for (int d = 1; d < p; ++d)
    if (p % d == 0)
      out.push_back(d);
  return out;
}

}  // namespace

TEST_CASE("realization of the first example")
{
  const PLMap m = realize(ex1());
  CHECK(evaluate(m, marked_point(ex1(), 4)) == StarPoint::center());
  CHECK(evaluate(m, pt(1, Rational(1, 3))) == pt(1, Rational(1, 3)));
  CHECK(evaluate(m, StarPoint::center()) == marked_point(ex1(), 1));
  CHECK(evaluate(m, marked_point(ex1(), 3)) == marked_point(ex1(), 4));
  CHECK(marked_point(ex1(), 4) == pt(3, 1));
  CHECK(evaluate_iterate(m, StarPoint::center(), 5) == StarPoint::center());
  CHECK_THROWS_AS(evaluate(m, pt(2, 2)), std::out_of_range);
  CHECK(to_string(pt(1, Rational(1, 2))) == "b1:1/2");
  CHECK(to_string(StarPoint::center()) == "o");
  CHECK(StarPoint(1, 0) == StarPoint::center());
}

TEST_CASE("realization of the second example")
{
  const PLMap m = realize(ex2());
  CHECK(evaluate(m, marked_point(ex2(), 5)) == StarPoint::center());
  for (int i = 0; i < 6; ++i)
    CHECK(evaluate(m, marked_point(ex2(), i)) == marked_point(ex2(), (i + 1) % 6));
}

TEST_CASE("images of arcs")
{
  const PLMap m1 = realize(ex1());
  const StarPattern& p = ex1();
  CHECK(image_of_arc(m1, arc({0}, {1}, p)) == arc({1}, {2}, p).segments());
  CHECK(image_of_arc(m1, arc({0}, {4}, p)) == arc({0}, {1}, p).segments());

  const PLMap m2 = realize(ex2());
  const StarPattern& q = ex2();
  const SegmentSet img = image_of_arc(m2, arc({0}, {4}, q));
  CHECK(img == arc({1}, {5}, q).segments());
  CHECK(img.contains(arc({1}, {3}, q).segments()));
  CHECK(img.contains(arc({3}, {5}, q).segments()));
}

TEST_CASE("continuity and Markov consistency on every small pattern")
{
  for (int n = 2; n <= 3; ++n)
    for (int k = 2; k <= 6; ++k)
      for (const auto& p : enumerate_patterns(n, k, false)) {
        CAPTURE(to_string(p));
        const PLMap m = realize(p);
        // pieces partition each branch and agree at shared ends
        for (int b = 0; b < n; ++b) {
          const auto pieces = m.pieces_on(b);
          if (p.branch_length(b) == 0) {
            CHECK(pieces.empty());
            continue;
          }
          REQUIRE_FALSE(pieces.empty());
          CHECK(pieces.front().lo == 0);
          CHECK(pieces.back().hi == p.branch_length(b));
          for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
            CHECK(pieces[i].hi == pieces[i + 1].lo);
            const Rational y1 = pieces[i].slope * pieces[i].hi + pieces[i].offset;
            const Rational y2 = pieces[i + 1].slope * pieces[i + 1].lo + pieces[i + 1].offset;
            CHECK(y1 == y2);
            CHECK((y1 == 0 || pieces[i].target_branch == pieces[i + 1].target_branch));
          }
          for (const auto& piece : pieces) {
            CHECK(piece.slope != 0);
            const Rational a = piece.slope * piece.lo + piece.offset;
            const Rational c = piece.slope * piece.hi + piece.offset;
            CHECK(std::min(a, c) >= 0);
            CHECK(std::max(a, c) <= p.branch_length(piece.target_branch));
          }
        }
        for (int s : p.all_segments().members())
          CHECK(image_of_segments(m, SegmentSet::single(s)) ==
                arc_segments(p, p.successor(p.inner_of(s)), p.successor(s)));
      }
}

TEST_CASE("periodic points of the examples")
{
  const PLMap m1 = realize(ex1());
  CHECK(periodic_points(m1, 3).empty());
  const auto five = periodic_points(m1, 5);
  int on_orbit = 0;
  for (const auto& w : five)
    on_orbit += w.on_center_orbit;
  CHECK(on_orbit == 5);
  const auto fixed = periodic_points(m1, 1);
  REQUIRE(fixed.size() == 1);
  CHECK(fixed[0].point == pt(1, Rational(1, 3)));

  const PLMap m2 = realize(ex2());
  CHECK(periodic_points(m2, 3).empty());
  CHECK_FALSE(periodic_points(m2, 2).empty());
  CHECK_THROWS_AS(periodic_points(m2, 10, {.cylinder_cap = 100}), CapExceeded);
}

TEST_CASE("oracle soundness and per-cylinder completeness")
{
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const int k = 2 + static_cast<int>(rng() % 6);
    const StarPattern p = sample_pattern(n, k, false, rng);
    CAPTURE(to_string(p));
    const PLMap m = realize(p);
    const int pmax = 6;
    const auto scan = scan_periodic_points(m, pmax);
    for (int q = 1; q <= pmax; ++q) {
      for (const auto& w : scan.witnesses[q]) {
        CHECK(evaluate_iterate(m, w.point, q) == w.point);
        for (int d : divisors_below(q))
          CHECK(evaluate_iterate(m, w.point, d) != w.point);
        CHECK(static_cast<int>(w.itinerary.size()) == q);
      }
      // a cylinder whose image covers its domain holds a fixed point of f^q
      const auto fixed = fixed_points_of_iterate(m, q);
      for_each_cylinder(m, q, [&](const Cylinder& c) {
        if (c.image_branch != c.domain_branch || c.image_lo > c.lo || c.image_hi < c.hi)
          return;
        const bool hit = std::any_of(fixed.begin(), fixed.end(), [&](const StarPoint& x) {
          const Rational coord = x.is_center() ? Rational(0) : x.coord();
          return (x.is_center() || x.branch() == c.domain_branch) && c.lo <= coord && coord <= c.hi;
        });
        CHECK(hit);
      });
      // every fixed point of f^q has a least period dividing q
      for (const auto& x : fixed) {
        const auto lp = least_period(m, x, q);
        REQUIRE(lp.has_value());
        CHECK(q % *lp == 0);
      }
    }
  }
}

TEST_CASE("a map fixing an interval pointwise")
{
  // f^2 is the identity on b1, so its points of period 2 form intervals.
  const StarPattern p = parse_pattern("n=2 k=2; b1: 1; b2:");
  const PLMap m = realize(p);
  const auto two = periodic_points(m, 2);
  REQUIRE_FALSE(two.empty());
  CHECK(std::any_of(two.begin(), two.end(), [](const PeriodicWitness& w) { return w.on_fixed_interval; }));
  CHECK(evaluate_iterate(m, two.front().point, 2) == two.front().point);
}

TEST_CASE("loop points")
{
  const StarPattern& p = ex1();
  const PLMap m = realize(p);
  {
    const std::vector<Arc> loop{arc({0}, {1}, p), arc({0}, {1}, p)};
    CHECK(loop_point(m, loop) == pt(1, Rational(1, 3)));
  }
  {
    const std::vector<Arc> loop{arc({0}, {2}, p), arc({1}, {3}, p), arc({0}, {2}, p)};
    const StarPoint x = loop_point(m, loop);
    CHECK(evaluate_iterate(m, x, 2) == x);
    CHECK(in_segments(p, loop[0].segments(), x));
    CHECK(in_segments(p, loop[1].segments(), evaluate(m, x)));
    const auto two = periodic_points(m, 2);
    CHECK(std::any_of(two.begin(), two.end(), [&](const PeriodicWitness& w) { return w.point == x; }));
  }
  {
    const std::vector<Arc> bad{arc({0}, {4}, p), arc({1}, {3}, p), arc({0}, {4}, p)};
    try {
      loop_point(m, bad);
      FAIL("expected a LoopError");
    } catch (const LoopError& e) {
      CHECK(e.step() == 1);
    }
  }
  {
    const std::vector<Arc> interior{arc({0}, {1}, p), arc({1}, {2}, p), arc({0}, {1}, p)};
    CHECK_THROWS_AS(loop_point(m, interior), LoopError);
  }
}

TEST_CASE("loop points for every short digraph loop (n <= 3, k <= 6)")
{
  for (int n = 2; n <= 3; ++n)
    for (int k = 2; k <= 6; ++k)
      for (const auto& p : enumerate_patterns(n, k, false)) {
        CAPTURE(to_string(p));
        const PLMap m = realize(p);
        const CoverDigraph g = cover_digraph(p);
        const int V = g.size();
        std::vector<Arc> arcs;
        for (int v = 0; v < V; ++v)
          arcs.push_back(arc({g.vertex(v).inner}, {g.vertex(v).outer}, p));
        // every closed walk of length up to 6
        std::vector<int> walk;
        std::function<void(int, int)> extend = [&](int len, int limit) {
          if (static_cast<int>(walk.size()) > 1 && walk.back() == walk.front()) {
            std::vector<Arc> loop;
            for (int v : walk)
              loop.push_back(arcs[v]);
            const StarPoint x = loop_point(m, loop);
            StarPoint y = x;
            for (std::size_t i = 0; i < walk.size(); ++i) {
              CHECK(in_segments(p, loop[i].segments(), y));
              if (i + 1 < walk.size())
                y = evaluate(m, y);
            }
            CHECK(y == x);
          }
          if (len == limit)
            return;
          for (int w = 0; w < V; ++w)
            if (g.has_edge(walk.back(), w)) {
              walk.push_back(w);
              extend(len + 1, limit);
              walk.pop_back();
            }
        };
        for (int v = 0; v < V; ++v) {
          walk = {v};
          extend(0, 6);
        }
      }
}

TEST_CASE("unit metric and the scrambled-pair probe")
{
  const StarPattern& q = ex2();
  const PLMap m = realize(q);
  CHECK(unit_distance(q, pt(1, 3), StarPoint::center()) == 1);
  CHECK(unit_distance(q, pt(1, Rational(3, 2)), pt(2, Rational(1, 2))) == Rational(1, 2) + Rational(1, 2));

  const StarPoint x = pt(2, Rational(1, 10));
  CHECK(scramble_probe(m, x, x, 50) == std::pair<Rational, Rational>{0, 0});

  const auto fixed = periodic_points(m, 1);
  REQUIRE(fixed.size() == 1);
  const auto centre_gap = scramble_probe(m, fixed[0].point, StarPoint::center(), 12, 6);
  CHECK(centre_gap.first == centre_gap.second);

  // regression values from the first exact run
  const auto [lo, hi] = scramble_probe(m, pt(2, Rational(1, 10)), pt(2, Rational(1, 9)), 200, 2);
  CHECK(lo == Rational(1, 45));
  CHECK(hi == Rational(71, 45));
  CHECK(lo < Rational(1, 10));
  CHECK(hi > Rational(1, 10));
}
