#include "stardyn/pl_map.hpp"

#include <algorithm>
#include <stdexcept>

namespace stardyn {

StarPoint::StarPoint(int branch, Rational coord) : branch_(branch), coord_(std::move(coord))
{
  if (coord_ < 0)
    throw std::out_of_range("negative star coordinate");
  if (coord_ == 0)
    branch_ = kCenterBranch;
  else if (branch_ == kCenterBranch)
    throw std::out_of_range("center with nonzero coordinate");
}

StarPoint marked_point(const StarPattern& p, int index)
{
  if (index == 0)
    return StarPoint::center();
  return {p.branch_of(index), Rational(p.rank_of(index))};
}

std::string to_string(const StarPoint& x)
{
  if (x.is_center())
    return "o";
  return "b" + std::to_string(x.branch() + 1) + ":" + to_string(x.coord());
}

std::span<const Piece> PLMap::pieces_on(int b) const
{
  return std::span<const Piece>(pieces_).subspan(branch_start_[b],
                                                 branch_start_[b + 1] - branch_start_[b]);
}

PLMap realize(const StarPattern& p)
{
  PLMap m(p);
  for (int b = 0; b < p.branch_count(); ++b) {
    m.branch_start_.push_back(m.pieces_.size());
    for (int r = 1; r <= p.branch_length(b); ++r) {
      const int segment = p.point_at(b, r);
      const int fp = p.successor(p.point_at(b, r - 1));
      const int fq = p.successor(segment);
      const int bp = p.branch_of(fp), bq = p.branch_of(fq);
      const Rational cp = p.rank_of(fp), cq = p.rank_of(fq);
      const Rational base = r - 1;

      if (bp == kCenterBranch || bq == kCenterBranch || bp == bq) {
        const Rational slope = cq - cp;
        m.pieces_.push_back({segment, b, base, base + 1, bp == kCenterBranch ? bq : bp, slope,
                             cp - slope * base});
      } else {
        // Down to the center along bp, then out along bq.
        const Rational length = cp + cq;
        const Rational turn = base + cp / length;
        m.pieces_.push_back({segment, b, base, turn, bp, -length, cp + length * base});
        m.pieces_.push_back({segment, b, turn, base + 1, bq, length, -length * base - cp});
      }
    }
  }
  m.branch_start_.push_back(m.pieces_.size());
  return m;
}

namespace {

Rational apply(const Piece& piece, const Rational& c)
{
  return piece.slope * c + piece.offset;
}

BigInt floor_nonneg(const Rational& q)
{
  return numerator(q) / denominator(q);
}

BigInt ceil_nonneg(const Rational& q)
{
  return (numerator(q) + denominator(q) - 1) / denominator(q);
}

}  // namespace

StarPoint evaluate(const PLMap& m, const StarPoint& x)
{
  const StarPattern& p = m.pattern();
  if (x.is_center())
    return marked_point(p, p.successor(0));
  if (x.branch() < 0 || x.branch() >= p.branch_count() || x.coord() > p.branch_length(x.branch()))
    throw std::out_of_range("point " + to_string(x) + " is not on the star");

  std::optional<StarPoint> image;
  for (const Piece& piece : m.pieces_on(x.branch())) {
    if (x.coord() < piece.lo || x.coord() > piece.hi)
      continue;
    StarPoint y(piece.target_branch, apply(piece, x.coord()));
    if (image && *image != y)
      throw std::logic_error("pieces disagree at " + to_string(x));
    image = std::move(y);
  }
  return *image;
}

StarPoint evaluate_iterate(const PLMap& m, StarPoint x, int times)
{
  for (int i = 0; i < times; ++i)
    x = evaluate(m, x);
  return x;
}

SegmentSet image_of_segments(const PLMap& m, SegmentSet segments)
{
  const StarPattern& p = m.pattern();
  SegmentSet out;
  for (const Piece& piece : m.pieces()) {
    if (!segments.contains(piece.segment))
      continue;
    Rational a = apply(piece, piece.lo), b = apply(piece, piece.hi);
    if (a > b)
      std::swap(a, b);
    const long first = floor_nonneg(a).convert_to<long>() + 1;
    const long last = ceil_nonneg(b).convert_to<long>();
    for (long r = first; r <= last; ++r)
      out |= SegmentSet::single(p.point_at(piece.target_branch, static_cast<int>(r)));
  }
  return out;
}

SegmentSet image_of_arc(const PLMap& m, const Arc& a)
{
  if (a.pattern_fingerprint() != m.pattern().fingerprint())
    throw std::invalid_argument("arc belongs to a different pattern");
  return image_of_segments(m, a.segments());
}

bool in_segments(const StarPattern& p, SegmentSet segments, const StarPoint& x)
{
  for (int s : segments.members()) {
    const int r = p.rank_of(s);
    if (x.is_center()) {
      if (r == 1)
        return true;
    } else if (p.branch_of(s) == x.branch() && x.coord() >= r - 1 && x.coord() <= r) {
      return true;
    }
  }
  return false;
}

Rational unit_distance(const StarPattern& p, const StarPoint& x, const StarPoint& y)
{
  auto scaled = [&](const StarPoint& z) -> Rational {
    return z.is_center() ? Rational(0) : z.coord() / p.branch_length(z.branch());
  };
  if (x.is_center() || y.is_center() || x.branch() == y.branch())
    return abs(scaled(x) - scaled(y));
  return scaled(x) + scaled(y);
}

std::pair<Rational, Rational> scramble_probe(const PLMap& m, const StarPoint& x,
                                             const StarPoint& y, int steps, int iterate)
{
  if (steps < 1 || iterate < 1)
    throw std::invalid_argument("scramble_probe needs steps >= 1 and iterate >= 1");
  StarPoint a = x, b = y;
  std::optional<Rational> lo, hi;
  for (int i = 1; i <= steps; ++i) {
    a = evaluate_iterate(m, a, iterate);
    b = evaluate_iterate(m, b, iterate);
    Rational gap = unit_distance(m.pattern(), a, b);
    if (!lo || gap < *lo)
      lo = gap;
    if (!hi || gap > *hi)
      hi = gap;
  }
  return {*lo, *hi};
}

}  // namespace stardyn
