#pragma once

//
// pl_map.hpp
//
// Canonical piecewise-linear realization of a star pattern, exact
// evaluation, exact images of marked arcs, and the periodic-point oracle.
//
// Each basic interval [r-1, r] on a branch is mapped arclength-linearly onto
// the arc between the images of its endpoints and is split where that arc
// passes through the center, so every piece lands in one closed branch.
// Slopes and offsets are integers, hence f preserves denominators.
//

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "stardyn/rational.hpp"
#include "stardyn/star_pattern.hpp"

namespace stardyn {

// A point of the metric star. The center is normalized to
// (kCenterBranch, 0) so equality is structural.
class StarPoint {
 public:
  StarPoint() = default;
  StarPoint(int branch, Rational coord);

  static StarPoint center() { return {}; }

  int branch() const { return branch_; }
  const Rational& coord() const { return coord_; }
  bool is_center() const { return branch_ == kCenterBranch; }

  auto operator<=>(const StarPoint& o) const
  {
    if (auto c = branch_ <=> o.branch_; c != 0)
      return c;
    if (coord_ < o.coord_) return std::strong_ordering::less;
    if (coord_ > o.coord_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  bool operator==(const StarPoint& o) const { return branch_ == o.branch_ && coord_ == o.coord_; }

 private:
  int branch_ = kCenterBranch;
  Rational coord_ = 0;
};

StarPoint marked_point(const StarPattern& p, int index);
std::string to_string(const StarPoint& x);

struct Piece {
  int segment = 0;  // basic interval containing the piece
  int source_branch = 0;
  Rational lo, hi;  // source coordinates, lo < hi
  int target_branch = 0;
  Rational slope;   // nonzero integer
  Rational offset;  // integer
};

class PLMap {
 public:
  const StarPattern& pattern() const { return pattern_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  // Pieces on branch b, ascending in source coordinate.
  std::span<const Piece> pieces_on(int b) const;

 private:
  friend PLMap realize(const StarPattern& p);
  explicit PLMap(StarPattern p) : pattern_(std::move(p)) {}

  StarPattern pattern_;
  std::vector<Piece> pieces_;
  std::vector<std::size_t> branch_start_;
};

PLMap realize(const StarPattern& p);

// Exact image. Throws std::out_of_range for points off the star and
// std::logic_error if adjacent pieces disagree at a shared boundary.
StarPoint evaluate(const PLMap& m, const StarPoint& x);
StarPoint evaluate_iterate(const PLMap& m, StarPoint x, int times);

// Exact image of a union of basic intervals, computed from the pieces. For
// marked arcs the image is again a union of basic intervals.
SegmentSet image_of_segments(const PLMap& m, SegmentSet segments);
SegmentSet image_of_arc(const PLMap& m, const Arc& a);

// Whether x lies in the union of the given basic intervals.
bool in_segments(const StarPattern& p, SegmentSet segments, const StarPoint& x);

struct PeriodicWitness {
  StarPoint point;
  int period = 0;
  std::vector<int> itinerary;      // piece ids of x, f(x), ..., f^{period-1}(x)
  bool on_center_orbit = false;
  bool on_fixed_interval = false;  // representative of an interval fixed by f^period
};

inline constexpr std::uint64_t kDefaultCylinderCap = 1'000'000;

struct OracleOptions {
  std::uint64_t cylinder_cap = kDefaultCylinderCap;
};

// Result of one forward-subdivision sweep to depth `max_period`.
struct PeriodScan {
  int max_period = 0;
  // witnesses[p] lists the points of least period exactly p (index 0 unused).
  std::vector<std::vector<PeriodicWitness>> witnesses;
  // cylinders[p] counts the cylinders of f^p that were examined.
  std::vector<std::uint64_t> cylinders;
};

// Throws CapExceeded when more than `cylinder_cap` cylinders would be visited.
PeriodScan scan_periodic_points(const PLMap& m, int max_period, OracleOptions options = {});

// Points of least period exactly p, sorted by point.
std::vector<PeriodicWitness> periodic_points(const PLMap& m, int p, OracleOptions options = {});

// Least period of x, or nullopt when x is not periodic within `limit` steps.
std::optional<int> least_period(const PLMap& m, const StarPoint& x, int limit);

// A maximal interval of the domain on which f^depth is affine and lands in
// one closed branch.
struct Cylinder {
  int domain_branch = 0;
  Rational lo, hi;
  int image_branch = 0;
  Rational slope, offset;  // f^depth(c) = slope * c + offset on [lo, hi]
  Rational image_lo, image_hi;
};

// Visits every depth-`depth` cylinder in deterministic order.
template <typename Visitor>
void for_each_cylinder(const PLMap& m, int depth, Visitor&& visit, OracleOptions options = {});

// Every fixed point of f^p (any least period), including one representative
// per interval fixed pointwise. Sorted, deduplicated.
std::vector<StarPoint> fixed_points_of_iterate(const PLMap& m, int p, OracleOptions options = {});

// A point x of I_0 with f^m(x) = x and f^i(x) in I_i, where I_0..I_m is an
// f-loop of marked arcs. Throws LoopError naming the first failing step.
class LoopError : public std::invalid_argument {
 public:
  LoopError(const std::string& what, int step) : std::invalid_argument(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

StarPoint loop_point(const PLMap& m, std::span<const Arc> loop);

// Distance in the metric with every branch rescaled to unit length.
Rational unit_distance(const StarPattern& p, const StarPoint& x, const StarPoint& y);

// Min and max of the unit-metric gap between g^i(x) and g^i(y), i = 1..steps,
// where g = f^iterate. Diagnostic only.
std::pair<Rational, Rational> scramble_probe(const PLMap& m, const StarPoint& x,
                                             const StarPoint& y, int steps, int iterate = 1);

// ---- implementation details shared with the template ----

namespace detail {

void cylinder_walk(const PLMap& m, int depth, OracleOptions options,
                   const std::function<void(int, const Cylinder&)>& on_cylinder);

}  // namespace detail

template <typename Visitor>
void for_each_cylinder(const PLMap& m, int depth, Visitor&& visit, OracleOptions options)
{
  detail::cylinder_walk(m, depth, options, [&](int d, const Cylinder& c) {
    if (d == depth)
      visit(c);
  });
}

}  // namespace stardyn
