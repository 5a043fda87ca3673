// Periodic-point oracle: forward subdivision of the domain into cylinders on
// which an iterate is affine, then exact linear fixed-point solving per
// cylinder.

#include "stardyn/pl_map.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

namespace stardyn {

namespace {

Rational apply(const Piece& piece, const Rational& c)
{
  return piece.slope * c + piece.offset;
}

// Restricts `c` to the part whose image lies in [a, b] (a subset of the image).
void restrict_image(Cylinder& c, const Rational& a, const Rational& b)
{
  Rational x = (a - c.offset) / c.slope, y = (b - c.offset) / c.slope;
  if (x > y)
    std::swap(x, y);
  c.lo = std::move(x);
  c.hi = std::move(y);
  c.image_lo = a;
  c.image_hi = b;
}

Cylinder first_cylinder(const Piece& piece)
{
  Cylinder c{piece.source_branch, piece.lo, piece.hi, piece.target_branch,
             piece.slope,         piece.offset, apply(piece, piece.lo), apply(piece, piece.hi)};
  if (c.image_lo > c.image_hi)
    std::swap(c.image_lo, c.image_hi);
  return c;
}

Cylinder extend(const Cylinder& c, const Piece& piece)
{
  Cylinder out = c;
  restrict_image(out, std::max(c.image_lo, piece.lo), std::min(c.image_hi, piece.hi));
  Rational a = apply(piece, out.image_lo), b = apply(piece, out.image_hi);
  if (a > b)
    std::swap(a, b);
  out.slope = piece.slope * c.slope;
  out.offset = piece.slope * c.offset + piece.offset;
  out.image_branch = piece.target_branch;
  out.image_lo = std::move(a);
  out.image_hi = std::move(b);
  return out;
}

// Clip returns false to prune; it may shrink the cylinder.
template <typename Clip, typename OnCylinder>
void descend(const PLMap& m, Cylinder& c, int d, int depth, Clip& clip, OnCylinder& on,
             std::uint64_t& visited, std::uint64_t cap)
{
  if (++visited > cap)
    throw CapExceeded("oracle exceeded cylinder cap of " + std::to_string(cap), cap);
  if (!clip(d, c))
    return;
  on(d, c);
  if (d == depth)
    return;
  for (const Piece& piece : m.pieces_on(c.image_branch)) {
    if (piece.lo >= c.image_hi)
      break;
    if (piece.hi <= c.image_lo)
      continue;
    Cylinder child = extend(c, piece);
    descend(m, child, d + 1, depth, clip, on, visited, cap);
  }
}

template <typename Clip, typename OnCylinder>
std::uint64_t walk(const PLMap& m, int depth, SegmentSet start, Clip clip, OnCylinder on,
                   std::uint64_t cap)
{
  std::uint64_t visited = 0;
  for (const Piece& piece : m.pieces()) {
    if (!start.contains(piece.segment))
      continue;
    Cylinder c = first_cylinder(piece);
    descend(m, c, 1, depth, clip, on, visited, cap);
  }
  return visited;
}

struct FixedHit {
  StarPoint point;
  // Set when the iterate is the identity on [point, interval_end].
  std::optional<StarPoint> interval_end;
};

std::optional<FixedHit> fixed_point_in(const Cylinder& c)
{
  if (c.domain_branch != c.image_branch) {
    // Only the center can be fixed when domain and image sit on different branches.
    if (c.lo == 0 && c.offset == 0)
      return FixedHit{StarPoint::center(), std::nullopt};
    return std::nullopt;
  }
  if (c.slope == 1) {
    if (c.offset != 0)
      return std::nullopt;
    return FixedHit{StarPoint(c.domain_branch, c.lo), StarPoint(c.domain_branch, c.hi)};
  }
  Rational x = c.offset / (1 - c.slope);
  if (x < c.lo || x > c.hi)
    return std::nullopt;
  return FixedHit{StarPoint(c.domain_branch, x), std::nullopt};
}

int piece_index(const PLMap& m, const StarPoint& x)
{
  const auto& pieces = m.pieces();
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Piece& piece = pieces[i];
    if (x.is_center() ? piece.lo == 0
                      : (piece.source_branch == x.branch() && piece.lo <= x.coord() &&
                         x.coord() <= piece.hi))
      return static_cast<int>(i);
  }
  throw std::out_of_range("point " + to_string(x) + " is not on the star");
}

PeriodicWitness make_witness(const PLMap& m, const StarPoint& x, int period, bool interval)
{
  PeriodicWitness w{x, period, {}, false, interval};
  StarPoint y = x;
  for (int i = 0; i < period; ++i) {
    w.itinerary.push_back(piece_index(m, y));
    y = evaluate(m, y);
  }
  const StarPattern& p = m.pattern();
  for (int i = 0; i < p.orbit_size(); ++i)
    w.on_center_orbit = w.on_center_orbit || marked_point(p, i) == x;
  return w;
}

// ---- machine-integer walk ----
//
// Image endpoints of every cylinder are integers (pieces map their ends to
// marked points or the center), and so are composed slopes and offsets. A
// cylinder is therefore (S, O, image range); its domain is the preimage.
// f keeps denominators, so orbits of fixed points are int64 too.

struct Overflow {};

std::int64_t mul(std::int64_t a, std::int64_t b)
{
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw Overflow{};
  return r;
}

std::int64_t add(std::int64_t a, std::int64_t b)
{
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r))
    throw Overflow{};
  return r;
}

std::int64_t to_i64(const BigInt& z)
{
  if (z > std::numeric_limits<std::int64_t>::max() || z < std::numeric_limits<std::int64_t>::min())
    throw Overflow{};
  return z.convert_to<std::int64_t>();
}

// x <= num/den and x >= num/den for den > 0.
bool le_frac(std::int64_t x, std::int64_t num, std::int64_t den)
{
  return static_cast<__int128>(x) * den <= num;
}
bool ge_frac(std::int64_t x, std::int64_t num, std::int64_t den)
{
  return static_cast<__int128>(x) * den >= num;
}

struct IntPiece {
  int index;  // position in PLMap::pieces()
  int source_branch, target_branch;
  std::int64_t slope, offset;
  std::int64_t lo_num, lo_den, hi_num, hi_den;
  std::int64_t y_lo, y_hi;  // images of lo and hi
};

// num/den on a branch, den > 0, in lowest terms; the center is (-1, 0, 1).
struct IntPoint {
  int branch = kCenterBranch;
  std::int64_t num = 0, den = 1;
  auto operator<=>(const IntPoint&) const = default;
};

IntPoint make_point(int branch, std::int64_t num, std::int64_t den)
{
  if (den < 0) {
    num = -num;
    den = -den;
  }
  if (num == 0)
    return {};
  const std::int64_t g = std::gcd(num, den);
  return {branch, num / g, den / g};
}

StarPoint to_star(const IntPoint& x)
{
  if (x.branch == kCenterBranch)
    return StarPoint::center();
  return StarPoint(x.branch, Rational(BigInt(x.num), BigInt(x.den)));
}

struct IntCylinder {
  int domain_branch;
  int image_branch;
  std::int64_t slope, offset, image_lo, image_hi;
};

class IntMap {
 public:
  explicit IntMap(const PLMap& m) : pattern_(m.pattern()), branches_(m.pattern().branch_count())
  {
    const auto& pieces = m.pieces();
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const Piece& piece = pieces[i];
      IntPiece q{static_cast<int>(i),
                 piece.source_branch,
                 piece.target_branch,
                 to_i64(numerator(piece.slope)),
                 to_i64(numerator(piece.offset)),
                 to_i64(numerator(piece.lo)),
                 to_i64(denominator(piece.lo)),
                 to_i64(numerator(piece.hi)),
                 to_i64(denominator(piece.hi)),
                 to_i64(numerator(apply(piece, piece.lo))),
                 to_i64(numerator(apply(piece, piece.hi)))};
      all_.push_back(q);
      branches_[piece.source_branch].push_back(q);
    }
    for (int i = 0; i < pattern_.orbit_size(); ++i)
      marked_.push_back(i == 0 ? IntPoint{} : IntPoint{pattern_.branch_of(i), pattern_.rank_of(i), 1});
  }

  const std::vector<IntPiece>& all() const { return all_; }
  const std::vector<IntPiece>& on(int b) const { return branches_[b]; }

  // First piece containing x, in PLMap::pieces() order.
  const IntPiece& piece_of(const IntPoint& x) const
  {
    if (x.branch == kCenterBranch) {
      for (const IntPiece& q : all_)
        if (q.lo_num == 0)
          return q;
    } else {
      for (const IntPiece& q : branches_[x.branch])
        if (static_cast<__int128>(q.lo_num) * x.den <= static_cast<__int128>(x.num) * q.lo_den &&
            static_cast<__int128>(x.num) * q.hi_den <= static_cast<__int128>(q.hi_num) * x.den)
          return q;
    }
    throw std::out_of_range("point is not on the star");
  }

  IntPoint image(const IntPoint& x, const IntPiece& q) const
  {
    const std::int64_t num = add(mul(q.slope, x.num), mul(q.offset, x.den));
    return make_point(q.target_branch, num, x.den);
  }

  bool on_center_orbit(const IntPoint& x) const
  {
    return std::find(marked_.begin(), marked_.end(), x) != marked_.end();
  }

 private:
  const StarPattern& pattern_;
  std::vector<IntPiece> all_;
  std::vector<std::vector<IntPiece>> branches_;
  std::vector<IntPoint> marked_;
};

// Witness for x when its least period is exactly p.
std::optional<PeriodicWitness> int_witness(const IntMap& m, const IntPoint& x, int p)
{
  PeriodicWitness w{to_star(x), p, {}, m.on_center_orbit(x), false};
  IntPoint y = x;
  for (int i = 1; i <= p; ++i) {
    const IntPiece& q = m.piece_of(y);
    w.itinerary.push_back(q.index);
    y = m.image(y, q);
    if (y == x)
      return i == p ? std::optional(std::move(w)) : std::nullopt;
  }
  return std::nullopt;
}

IntCylinder int_extend(const IntCylinder& c, const IntPiece& q)
{
  const std::int64_t a =
      ge_frac(c.image_lo, q.lo_num, q.lo_den) ? add(mul(q.slope, c.image_lo), q.offset) : q.y_lo;
  const std::int64_t b =
      le_frac(c.image_hi, q.hi_num, q.hi_den) ? add(mul(q.slope, c.image_hi), q.offset) : q.y_hi;
  return {c.domain_branch,
          q.target_branch,
          mul(q.slope, c.slope),
          add(mul(q.slope, c.offset), q.offset),
          std::min(a, b),
          std::max(a, b)};
}

template <typename OnCylinder>
void int_descend(const IntMap& m, const IntCylinder& c, int d, int depth, OnCylinder& on,
                 std::uint64_t& visited, std::uint64_t cap)
{
  if (++visited > cap)
    throw CapExceeded("oracle exceeded cylinder cap of " + std::to_string(cap), cap);
  on(d, c);
  if (d == depth)
    return;
  for (const IntPiece& q : m.on(c.image_branch)) {
    if (le_frac(c.image_hi, q.lo_num, q.lo_den))
      break;
    if (ge_frac(c.image_lo, q.hi_num, q.hi_den))
      continue;
    int_descend(m, int_extend(c, q), d + 1, depth, on, visited, cap);
  }
}

std::vector<int> proper_divisors(int p)
{
  std::vector<int> out;
  for (int d = 1; d < p; ++d)
    if (p % d == 0)
      out.push_back(d);
  return out;
}

struct FixedSets {
  std::vector<IntPoint> int_points;
  std::set<StarPoint> points;
  std::vector<std::pair<StarPoint, StarPoint>> intervals;
};

}  // namespace

namespace detail {

void cylinder_walk(const PLMap& m, int depth, OracleOptions options,
                   const std::function<void(int, const Cylinder&)>& on_cylinder)
{
  if (depth < 1)
    throw std::invalid_argument("cylinder depth must be positive");
  walk(m, depth, m.pattern().all_segments(), [](int, Cylinder&) { return true; }, on_cylinder,
       options.cylinder_cap);
}

}  // namespace detail

std::optional<int> least_period(const PLMap& m, const StarPoint& x, int limit)
{
  StarPoint y = x;
  for (int i = 1; i <= limit; ++i) {
    y = evaluate(m, y);
    if (y == x)
      return i;
  }
  return std::nullopt;
}

PeriodScan scan_periodic_points(const PLMap& m, int max_period, OracleOptions options)
{
  if (max_period < 1)
    throw std::invalid_argument("max_period must be positive");

  std::vector<FixedSets> fixed(max_period + 1);
  PeriodScan scan;
  scan.max_period = max_period;
  scan.cylinders.assign(max_period + 1, 0);
  scan.witnesses.assign(max_period + 1, {});

  auto record = [&](int d, const std::optional<FixedHit>& hit) {
    if (!hit)
      return;
    if (hit->interval_end)
      fixed[d].intervals.emplace_back(hit->point, *hit->interval_end);
    else
      fixed[d].points.insert(hit->point);
  };
  std::optional<IntMap> im;
  try {
    im.emplace(m);
    std::uint64_t visited = 0;
    auto on = [&](int d, const IntCylinder& c) {
      ++scan.cylinders[d];
      if (c.domain_branch != c.image_branch) {
        // only the center can be fixed
        if (c.offset == 0 && c.image_lo == 0)
          fixed[d].int_points.push_back({});
        return;
      }
      if (c.slope == 1) {
        if (c.offset == 0)
          fixed[d].intervals.emplace_back(StarPoint(c.domain_branch, c.image_lo),
                                          StarPoint(c.domain_branch, c.image_hi));
        return;
      }
      // x = O / (1 - S) lies in the cylinder iff it lies in the image range
      __int128 num = c.offset, den = 1 - static_cast<__int128>(c.slope);
      if (den < 0) {
        num = -num;
        den = -den;
      }
      if (c.image_lo * den > num || c.image_hi * den < num)
        return;
      if (den > std::numeric_limits<std::int64_t>::max())
        throw Overflow{};
      fixed[d].int_points.push_back(make_point(c.domain_branch, static_cast<std::int64_t>(num),
                                               static_cast<std::int64_t>(den)));
    };
    for (const IntPiece& q : im->all()) {
      const IntCylinder root{q.source_branch, q.target_branch, q.slope, q.offset, std::min(q.y_lo, q.y_hi),
                             std::max(q.y_lo, q.y_hi)};
      int_descend(*im, root, 1, max_period, on, visited, options.cylinder_cap);
    }
  } catch (const Overflow&) {
    // Too deep for 64 bits: redo the sweep exactly.
    im.reset();
    fixed.assign(max_period + 1, {});
    scan.cylinders.assign(max_period + 1, 0);
    walk(
        m, max_period, m.pattern().all_segments(), [](int, Cylinder&) { return true; },
        [&](int d, const Cylinder& c) {
          ++scan.cylinders[d];
          record(d, fixed_point_in(c));
        },
        options.cylinder_cap);
  }

  for (int p = 1; p <= max_period; ++p) {
    std::set<StarPoint> seen;
    std::vector<PeriodicWitness> found;
    auto& ips = fixed[p].int_points;
    // by value, which is the StarPoint order, so `found` needs no resort below
    std::sort(ips.begin(), ips.end(), [](const IntPoint& u, const IntPoint& v) {
      if (u.branch != v.branch)
        return u.branch < v.branch;
      return static_cast<__int128>(u.num) * v.den < static_cast<__int128>(v.num) * u.den;
    });
    ips.erase(std::unique(ips.begin(), ips.end()), ips.end());
    for (const IntPoint& x : ips) {
      std::optional<PeriodicWitness> w;
      try {
        w = int_witness(*im, x, p);
      } catch (const Overflow&) {
        fixed[p].points.insert(to_star(x));
        continue;
      }
      // int points never reach `points`, so no duplicates here
      if (w)
        found.push_back(std::move(*w));
    }
    for (const StarPoint& x : fixed[p].points) {
      if (least_period(m, x, p) == p && seen.insert(x).second)
        found.push_back(make_witness(m, x, p, false));
    }
    // f^p is the identity on each interval; f^d for d | p is affine there,
    // so it either fixes the whole interval or at most one point of it.
    const auto divisors = proper_divisors(p);
    for (const auto& [a, b] : fixed[p].intervals) {
      const bool generic_smaller = std::any_of(divisors.begin(), divisors.end(), [&](int d) {
        return evaluate_iterate(m, a, d) == a && evaluate_iterate(m, b, d) == b;
      });
      if (generic_smaller)
        continue;
      const int slots = static_cast<int>(divisors.size()) + 2;
      for (int i = 1; i < slots; ++i) {
        StarPoint x(a.is_center() ? b.branch() : a.branch(),
                    a.coord() + (b.coord() - a.coord()) * Rational(i, slots));
        if (least_period(m, x, p) == p) {
          if (seen.insert(x).second)
            found.push_back(make_witness(m, x, p, true));
          break;
        }
      }
    }
    if (!fixed[p].points.empty() || !fixed[p].intervals.empty())
      std::sort(found.begin(), found.end(),
                [](const PeriodicWitness& u, const PeriodicWitness& v) { return u.point < v.point; });
    scan.witnesses[p] = std::move(found);
  }
  return scan;
}

std::vector<PeriodicWitness> periodic_points(const PLMap& m, int p, OracleOptions options)
{
  return scan_periodic_points(m, p, options).witnesses[p];
}

std::vector<StarPoint> fixed_points_of_iterate(const PLMap& m, int p, OracleOptions options)
{
  std::set<StarPoint> out;
  for_each_cylinder(
      m, p,
      [&](const Cylinder& c) {
        if (auto hit = fixed_point_in(c))
          out.insert(hit->point);
      },
      options);
  return {out.begin(), out.end()};
}

StarPoint loop_point(const PLMap& m, std::span<const Arc> loop)
{
  const StarPattern& p = m.pattern();
  if (loop.size() < 2)
    throw LoopError("a loop needs at least two arcs", 0);
  const int length = static_cast<int>(loop.size()) - 1;
  for (int i = 0; i <= length; ++i) {
    if (loop[i].pattern_fingerprint() != p.fingerprint())
      throw LoopError("arc " + std::to_string(i) + " belongs to a different pattern", i);
  }
  for (int i = 1; i <= length; ++i) {
    if (loop[i].center_interior())
      throw LoopError("center is interior to arc " + std::to_string(i) + " " + loop[i].label(), i);
    if (!image_of_arc(m, loop[i - 1]).contains(loop[i].segments()))
      throw LoopError("arc " + loop[i - 1].label() + " does not cover " + loop[i].label(), i);
  }
  if (!loop[length].segments().contains(loop[0].segments()))
    throw LoopError("last arc " + loop[length].label() + " does not contain " + loop[0].label(),
                    length);

  // Coordinate range of each arc after the first; they lie in one closed branch.
  struct Range {
    int branch;
    Rational lo, hi;
  };
  std::vector<Range> ranges(length + 1);
  for (int i = 1; i <= length; ++i) {
    const auto members = loop[i].segments().members();
    int lo = p.orbit_size(), hi = 0;
    for (int s : members) {
      lo = std::min(lo, p.rank_of(s) - 1);
      hi = std::max(hi, p.rank_of(s));
    }
    ranges[i] = {p.branch_of(members.front()), lo, hi};
  }

  auto itinerary_ok = [&](const StarPoint& x) {
    StarPoint y = x;
    if (!in_segments(p, loop[0].segments(), y))
      return false;
    for (int i = 1; i <= length; ++i) {
      y = evaluate(m, y);
      if (!in_segments(p, loop[i].segments(), y))
        return false;
    }
    return y == x;
  };

  std::optional<StarPoint> answer;
  try {
    walk(
        m, length, loop[0].segments(),
        [&](int d, Cylinder& c) {
          if (answer)
            return false;
          const Range& r = ranges[d];
          if (c.image_branch != r.branch)
            return false;
          Rational a = std::max(c.image_lo, r.lo), b = std::min(c.image_hi, r.hi);
          if (a >= b)
            return false;
          restrict_image(c, a, b);
          return true;
        },
        [&](int d, const Cylinder& c) {
          if (d != length || answer)
            return;
          if (auto hit = fixed_point_in(c)) {
            StarPoint x = hit->point;
            if (hit->interval_end)
              x = StarPoint(c.domain_branch, (c.lo + c.hi) / 2);
            if (itinerary_ok(x))
              answer = x;
          }
        },
        kDefaultCylinderCap);
  } catch (const CapExceeded&) {
    // Fall through to the marked points.
  }
  if (answer)
    return *answer;

  // Fixed points reached only through a marked endpoint lie on the center orbit.
  for (int i = 0; i < p.orbit_size(); ++i) {
    StarPoint x = marked_point(p, i);
    if (itinerary_ok(x))
      return x;
  }
  throw std::logic_error("no loop point found for a verified loop");
}

}  // namespace stardyn
