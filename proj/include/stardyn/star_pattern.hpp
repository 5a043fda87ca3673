#pragma once

//
// star_pattern.hpp
//
// Orbit patterns of the center of an n-od, arcs between marked points, and
// enumeration of patterns up to relabeling of the branches.
//
// Conventions used throughout the library:
//
//  - Branches are 0-based internally (`0..n-1`) and 1-based in every text or
//    JSON form ("b1", "b2", ...).
//  - Orbit index 0 is the center o; index i is f^i(o). The dynamics on the
//    orbit is the successor i -> (i+1) mod k.
//  - A non-center orbit point of rank r on branch b sits at coordinate r on
//    that branch. Branch b has length m_b, the number of orbit points on it.
//  - Basic interval number i (1 <= i < k) is the minimal arc whose outer
//    endpoint is orbit point i; its inner endpoint is the point of rank
//    rank(i)-1 on the same branch, or the center when rank(i) = 1.
//

#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace stardyn {

inline constexpr int kCenterBranch = -1;
inline constexpr int kMaxOrbitSize = 64;

// Thrown when a pattern (or orbit spec) violates its invariants. `what()`
// joins all violations; `violations()` lists them individually.
class PatternError : public std::invalid_argument {
 public:
  explicit PatternError(std::vector<std::string> violations);
  PatternError(std::string message, std::size_t position);

  const std::vector<std::string>& violations() const { return violations_; }
  // Byte offset of a syntax error in the parsed text, if any.
  std::optional<std::size_t> position() const { return position_; }

 private:
  std::vector<std::string> violations_;
  std::optional<std::size_t> position_;
};

// Thrown when an enumeration or search would exceed its configured cap.
class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(std::string what, std::uint64_t cap)
      : std::runtime_error(std::move(what)), cap_(cap) {}
  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t cap_;
};

// Unvalidated pattern data in the raw (branch, rank) form. Branch ids are
// 1-based here, as in the text format; entry 0 (the center) is ignored.
struct PatternSpec {
  int n = 0;
  int k = 0;
  std::vector<int> branch_of;
  std::vector<int> rank_of;
};

// Returns every violated invariant; empty means valid.
std::vector<std::string> validate(const PatternSpec& spec,
                                  bool require_all_branches = false);

struct MarkedPoint {
  int index = 0;
  auto operator<=>(const MarkedPoint&) const = default;
};

// Set of basic intervals, bit i standing for basic interval i.
class SegmentSet {
 public:
  constexpr SegmentSet() = default;
  constexpr explicit SegmentSet(std::uint64_t bits) : bits_(bits) {}

  static SegmentSet single(int segment) { return SegmentSet(std::uint64_t{1} << segment); }

  bool contains(int segment) const { return (bits_ >> segment) & 1U; }
  bool contains(SegmentSet other) const { return (other.bits_ & ~bits_) == 0; }
  bool intersects(SegmentSet other) const { return (bits_ & other.bits_) != 0; }
  bool empty() const { return bits_ == 0; }
  int size() const { return __builtin_popcountll(bits_); }
  std::uint64_t bits() const { return bits_; }
  std::vector<int> members() const;

  SegmentSet operator|(SegmentSet o) const { return SegmentSet(bits_ | o.bits_); }
  SegmentSet operator&(SegmentSet o) const { return SegmentSet(bits_ & o.bits_); }
  SegmentSet& operator|=(SegmentSet o) { bits_ |= o.bits_; return *this; }
  bool operator==(const SegmentSet&) const = default;

 private:
  std::uint64_t bits_ = 0;
};

class StarPattern {
 public:
  // Validates; throws PatternError listing every violation.
  static StarPattern from_spec(const PatternSpec& spec, bool require_all_branches = false);
  // `branches[b]` lists orbit indices of branch b (0-based) in increasing rank.
  static StarPattern from_branches(int n, int k, const std::vector<std::vector<int>>& branches,
                                   bool require_all_branches = false);

  int branch_count() const { return n_; }
  int orbit_size() const { return k_; }

  // 0-based branch of orbit point i, kCenterBranch for the center.
  int branch_of(int i) const { return branch_of_[i]; }
  // Rank (= integer coordinate) of orbit point i; 0 for the center.
  int rank_of(int i) const { return rank_of_[i]; }
  int successor(int i) const { return (i + 1) % k_; }
  int iterate(int i, int t) const { return static_cast<int>((i + static_cast<long long>(t)) % k_); }

  int branch_length(int b) const { return static_cast<int>(branches_[b].size()); }
  const std::vector<std::vector<int>>& branches() const { return branches_; }
  // Orbit index at (branch, rank); rank 0 is the center.
  int point_at(int branch, int rank) const { return rank == 0 ? 0 : branches_[branch][rank - 1]; }

  // Inner endpoint of basic interval `segment`.
  int inner_of(int segment) const { return point_at(branch_of_[segment], rank_of_[segment] - 1); }
  bool all_branches_hit() const;
  // Every basic interval of the pattern.
  SegmentSet all_segments() const;

  PatternSpec spec() const;
  std::uint64_t fingerprint() const;

  auto operator<=>(const StarPattern& o) const
  {
    if (auto c = n_ <=> o.n_; c != 0) return c;
    if (auto c = k_ <=> o.k_; c != 0) return c;
    if (auto c = branch_of_ <=> o.branch_of_; c != 0) return c;
    return rank_of_ <=> o.rank_of_;
  }
  bool operator==(const StarPattern& o) const
  {
    return n_ == o.n_ && k_ == o.k_ && branch_of_ == o.branch_of_ && rank_of_ == o.rank_of_;
  }

 private:
  StarPattern() = default;

  int n_ = 0;
  int k_ = 0;
  std::vector<int> branch_of_;
  std::vector<int> rank_of_;
  std::vector<std::vector<int>> branches_;
};

// ---- text and JSON forms ----

struct ParseOptions {
  bool require_all_branches = false;
};

// Grammar: `n=<int> k=<int>; b1: <idx>*; b2: <idx>*; ...; bn: <idx>*`
StarPattern parse_pattern(std::string_view text, ParseOptions options = {});
std::string to_string(const StarPattern& p);

// Reads one pattern per line; blank lines and lines starting with '#' are skipped.
std::vector<StarPattern> parse_pattern_lines(std::string_view text, ParseOptions options = {});

nlohmann::ordered_json to_json(const StarPattern& p);
StarPattern pattern_from_json(const nlohmann::json& j, ParseOptions options = {});

// ---- arcs ----

class Arc {
 public:
  MarkedPoint a() const { return path_.front(); }
  MarkedPoint b() const { return path_.back(); }
  // Marked points traversed from a to b.
  const std::vector<MarkedPoint>& path() const { return path_; }
  SegmentSet segments() const { return segments_; }
  bool center_interior() const { return center_interior_; }
  // Identifies the pattern the arc was built on; mixed comparisons are rejected.
  std::uint64_t pattern_fingerprint() const { return fingerprint_; }

  // "[a,b]" with orbit indices.
  std::string label() const;

  bool operator==(const Arc&) const = default;

 private:
  friend Arc arc(MarkedPoint, MarkedPoint, const StarPattern&);
  Arc() = default;

  std::uint64_t fingerprint_ = 0;
  std::vector<MarkedPoint> path_;
  SegmentSet segments_;
  bool center_interior_ = false;
};

// The unique arc from a to b. Throws std::invalid_argument when a == b.
Arc arc(MarkedPoint a, MarkedPoint b, const StarPattern& p);

// Basic-interval containment. Throws std::invalid_argument for arcs of
// different patterns.
bool arc_contains(const Arc& outer, const Arc& inner);

// Segments of arc(a, b), without materializing the path.
SegmentSet arc_segments(const StarPattern& p, int a, int b);

// ---- symmetry ----

// Least pattern under relabeling of branches: branches are renumbered in
// order of first visit by x1, x2, ..., unvisited branches last in their
// original order. This minimizes the branch_of sequence lexicographically.
StarPattern canonicalize(const StarPattern& p);

// `perm[old] = new` (0-based).
StarPattern permute_branches(const StarPattern& p, const std::vector<int>& perm);

// Number of labeled patterns in the branch-permutation class of p.
std::uint64_t class_size(const StarPattern& p);

// One canonical representative per branch-permutation class, ascending.
std::vector<StarPattern> enumerate_patterns(int n, int k, bool all_branches,
                                            std::uint64_t cap = 1'000'000);

// Uniform over raw (branch, rank) assignments; rejection-samples when
// `all_branches` is set, so n must not exceed k-1 in that case.
StarPattern sample_pattern(int n, int k, bool all_branches, std::mt19937_64& rng);

// ---- general finite orbits ----

struct OrbitPoint {
  int branch = kCenterBranch;  // 0-based; kCenterBranch means the center
  int rank = 0;
  auto operator<=>(const OrbitPoint&) const = default;
};

// A finite orbit that need not contain the center; `next[i]` is the index
// of the image of `points[i]`.
struct FiniteOrbitSpec {
  int n = 0;
  std::vector<OrbitPoint> points;
  std::vector<int> next;
};

std::vector<std::string> validate(const FiniteOrbitSpec& spec);

// {1} when the orbit contains the center; otherwise the cycle lengths of the
// partial branch map. Throws PatternError on an invalid spec.
std::set<int> orbit_type(const FiniteOrbitSpec& spec);

}  // namespace stardyn
