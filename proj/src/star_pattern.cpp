#include "stardyn/star_pattern.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace stardyn {

namespace {

std::string join(const std::vector<std::string>& items)
{
  std::string out;
  for (const auto& s : items) {
    if (!out.empty())
      out += "; ";
    out += s;
  }
  return out;
}

std::string branch_name(int b0)
{
  return "b" + std::to_string(b0 + 1);
}

}  // namespace

PatternError::PatternError(std::vector<std::string> violations)
    : std::invalid_argument(join(violations)), violations_(std::move(violations))
{
}

PatternError::PatternError(std::string message, std::size_t position)
    : std::invalid_argument("syntax error at offset " + std::to_string(position) + ": " + message),
      violations_{message},
      position_(position)
{
}

std::vector<int> SegmentSet::members() const
{
  std::vector<int> out;
  for (std::uint64_t b = bits_; b != 0; b &= b - 1)
    out.push_back(__builtin_ctzll(b));
  return out;
}

std::vector<std::string> validate(const PatternSpec& spec, bool require_all_branches)
{
  std::vector<std::string> errors;
  if (spec.n < 2)
    errors.push_back("branch count " + std::to_string(spec.n) + " below 2");
  if (spec.k < 2)
    errors.push_back("orbit too small: k=" + std::to_string(spec.k));
  if (spec.k > kMaxOrbitSize)
    errors.push_back("orbit too large: k=" + std::to_string(spec.k) + " exceeds " +
                     std::to_string(kMaxOrbitSize));
  if (!errors.empty())
    return errors;
  if (static_cast<int>(spec.branch_of.size()) != spec.k ||
      static_cast<int>(spec.rank_of.size()) != spec.k) {
    errors.push_back("expected " + std::to_string(spec.k) + " branch/rank entries");
    return errors;
  }

  std::vector<std::vector<int>> ranks(spec.n);
  for (int i = 1; i < spec.k; ++i) {
    const int b = spec.branch_of[i];
    const int r = spec.rank_of[i];
    if (b < 1 || b > spec.n) {
      errors.push_back("branch id " + std::to_string(b) + " of point " + std::to_string(i) +
                       " out of range");
      continue;
    }
    if (r < 1) {
      errors.push_back("rank " + std::to_string(r) + " of point " + std::to_string(i) +
                       " not positive");
      continue;
    }
    ranks[b - 1].push_back(r);
  }
  for (int b = 0; b < spec.n; ++b) {
    auto& rs = ranks[b];
    std::sort(rs.begin(), rs.end());
    if (std::adjacent_find(rs.begin(), rs.end()) != rs.end())
      errors.push_back("duplicate rank on branch " + branch_name(b));
    else if (!rs.empty() && rs.back() != static_cast<int>(rs.size()))
      errors.push_back("rank gap on branch " + branch_name(b));
    if (require_all_branches && rs.empty())
      errors.push_back("branch " + branch_name(b) + " empty while all branches are required");
  }
  return errors;
}

StarPattern StarPattern::from_spec(const PatternSpec& spec, bool require_all_branches)
{
  if (auto errors = validate(spec, require_all_branches); !errors.empty())
    throw PatternError(std::move(errors));

  StarPattern p;
  p.n_ = spec.n;
  p.k_ = spec.k;
  p.branch_of_.assign(spec.k, kCenterBranch);
  p.rank_of_.assign(spec.k, 0);
  p.branches_.assign(spec.n, {});
  for (int i = 1; i < spec.k; ++i) {
    p.branch_of_[i] = spec.branch_of[i] - 1;
    p.rank_of_[i] = spec.rank_of[i];
    p.branches_[spec.branch_of[i] - 1].push_back(i);
  }
  for (auto& br : p.branches_)
    std::sort(br.begin(), br.end(), [&](int x, int y) { return p.rank_of_[x] < p.rank_of_[y]; });
  return p;
}

StarPattern StarPattern::from_branches(int n, int k, const std::vector<std::vector<int>>& branches,
                                       bool require_all_branches)
{
  std::vector<std::string> errors;
  if (static_cast<int>(branches.size()) != n)
    errors.push_back("expected " + std::to_string(n) + " branches, got " +
                     std::to_string(branches.size()));
  PatternSpec spec{n, k, std::vector<int>(std::max(k, 0), 0), std::vector<int>(std::max(k, 0), 0)};
  for (std::size_t b = 0; b < branches.size(); ++b) {
    for (std::size_t r = 0; r < branches[b].size(); ++r) {
      const int idx = branches[b][r];
      if (idx < 1 || idx >= k) {
        errors.push_back("orbit index " + std::to_string(idx) + " out of range on " +
                         branch_name(static_cast<int>(b)));
      } else if (spec.branch_of[idx] != 0) {
        errors.push_back("duplicate orbit index " + std::to_string(idx));
      } else {
        spec.branch_of[idx] = static_cast<int>(b) + 1;
        spec.rank_of[idx] = static_cast<int>(r) + 1;
      }
    }
  }
  for (int i = 1; i < k && static_cast<int>(spec.branch_of.size()) == k; ++i)
    if (spec.branch_of[i] == 0)
      errors.push_back("orbit index " + std::to_string(i) + " missing");
  if (!errors.empty())
    throw PatternError(std::move(errors));
  return from_spec(spec, require_all_branches);
}

bool StarPattern::all_branches_hit() const
{
  return std::all_of(branches_.begin(), branches_.end(), [](const auto& b) { return !b.empty(); });
}

SegmentSet StarPattern::all_segments() const
{
  const std::uint64_t all = (k_ == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << k_) - 1);
  return SegmentSet(all & ~std::uint64_t{1});
}

PatternSpec StarPattern::spec() const
{
  PatternSpec s{n_, k_, std::vector<int>(k_, 0), rank_of_};
  for (int i = 1; i < k_; ++i)
    s.branch_of[i] = branch_of_[i] + 1;
  return s;
}

std::uint64_t StarPattern::fingerprint() const
{
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  mix(static_cast<std::uint64_t>(n_));
  mix(static_cast<std::uint64_t>(k_));
  for (int i = 1; i < k_; ++i) {
    mix(static_cast<std::uint64_t>(branch_of_[i]));
    mix(static_cast<std::uint64_t>(rank_of_[i]));
  }
  return h;
}

// ---- arcs ----

std::string Arc::label() const
{
  return "[" + std::to_string(a().index) + "," + std::to_string(b().index) + "]";
}

Arc arc(MarkedPoint a, MarkedPoint b, const StarPattern& p)
{
  const int k = p.orbit_size();
  if (a.index < 0 || a.index >= k || b.index < 0 || b.index >= k)
    throw std::invalid_argument("marked point out of range");
  if (a == b)
    throw std::invalid_argument("arc endpoints coincide");

  Arc out;
  out.fingerprint_ = p.fingerprint();
  const int ba = p.branch_of(a.index), bb = p.branch_of(b.index);
  const int ra = p.rank_of(a.index), rb = p.rank_of(b.index);

  auto walk = [&](int branch, int from, int to) {
    const int step = from < to ? 1 : -1;
    for (int r = from; r != to + step; r += step)
      out.path_.push_back({p.point_at(branch, r)});
    for (int r = std::min(from, to) + 1; r <= std::max(from, to); ++r)
      out.segments_ |= SegmentSet::single(p.point_at(branch, r));
  };

  if (ba == kCenterBranch || bb == kCenterBranch || ba == bb) {
    walk(ba == kCenterBranch ? bb : ba, ra, rb);
  } else {
    walk(ba, ra, 0);
    out.path_.pop_back();
    walk(bb, 0, rb);
    out.center_interior_ = true;
  }
  return out;
}

bool arc_contains(const Arc& outer, const Arc& inner)
{
  if (outer.pattern_fingerprint() != inner.pattern_fingerprint())
    throw std::invalid_argument("arcs belong to different patterns");
  return outer.segments().contains(inner.segments());
}

SegmentSet arc_segments(const StarPattern& p, int a, int b)
{
  SegmentSet out;
  auto add = [&](int branch, int lo, int hi) {
    for (int r = lo + 1; r <= hi; ++r)
      out |= SegmentSet::single(p.point_at(branch, r));
  };
  const int ba = p.branch_of(a), bb = p.branch_of(b);
  const int ra = p.rank_of(a), rb = p.rank_of(b);
  if (ba == kCenterBranch || bb == kCenterBranch || ba == bb) {
    add(ba == kCenterBranch ? bb : ba, std::min(ra, rb), std::max(ra, rb));
  } else {
    add(ba, 0, ra);
    add(bb, 0, rb);
  }
  return out;
}

// ---- symmetry ----

StarPattern permute_branches(const StarPattern& p, const std::vector<int>& perm)
{
  std::vector<std::vector<int>> branches(p.branch_count());
  for (int b = 0; b < p.branch_count(); ++b)
    branches.at(perm.at(b)) = p.branches()[b];
  return StarPattern::from_branches(p.branch_count(), p.orbit_size(), branches);
}

StarPattern canonicalize(const StarPattern& p)
{
  const int n = p.branch_count();
  std::vector<int> perm(n, -1);
  int next = 0;
  for (int i = 1; i < p.orbit_size(); ++i) {
    const int b = p.branch_of(i);
    if (perm[b] < 0)
      perm[b] = next++;
  }
  for (int b = 0; b < n; ++b)
    if (perm[b] < 0)
      perm[b] = next++;
  return permute_branches(p, perm);
}

std::uint64_t class_size(const StarPattern& p)
{
  int empty = 0;
  for (int b = 0; b < p.branch_count(); ++b)
    empty += p.branch_length(b) == 0;
  std::uint64_t size = 1;
  for (int i = empty + 1; i <= p.branch_count(); ++i)
    size *= static_cast<std::uint64_t>(i);
  return size;
}

std::vector<StarPattern> enumerate_patterns(int n, int k, bool all_branches, std::uint64_t cap)
{
  if (n < 2 || k < 2 || k > kMaxOrbitSize)
    throw std::invalid_argument("enumerate_patterns needs n >= 2 and 2 <= k <= 64");

  std::vector<StarPattern> out;
  std::vector<int> labels(k, -1);

  // Orderings of every branch: iterate the cartesian product of permutations.
  auto emit_orderings = [&](std::vector<std::vector<int>> branches) {
    for (auto& b : branches)
      std::sort(b.begin(), b.end());
    while (true) {
      if (out.size() >= cap)
        throw CapExceeded("pattern enumeration exceeded cap of " + std::to_string(cap), cap);
      out.push_back(StarPattern::from_branches(n, k, branches));
      std::size_t b = 0;
      for (; b < branches.size(); ++b) {
        if (std::next_permutation(branches[b].begin(), branches[b].end()))
          break;
      }
      if (b == branches.size())
        return;
    }
  };

  // Restricted growth strings: labels in order of first visit.
  auto recurse = [&](auto&& self, int i, int used) -> void {
    if (i == k) {
      if (all_branches && used < n)
        return;
      std::vector<std::vector<int>> branches(n);
      for (int j = 1; j < k; ++j)
        branches[labels[j]].push_back(j);
      emit_orderings(std::move(branches));
      return;
    }
    // Enough points left to reach every branch?
    if (all_branches && used + (k - i) < n)
      return;
    for (int b = 0; b <= std::min(used, n - 1); ++b) {
      labels[i] = b;
      self(self, i + 1, std::max(used, b + 1));
    }
  };
  recurse(recurse, 1, 0);

  std::sort(out.begin(), out.end());
  return out;
}

StarPattern sample_pattern(int n, int k, bool all_branches, std::mt19937_64& rng)
{
  if (all_branches && n > k - 1)
    throw std::invalid_argument("cannot hit every branch with fewer orbit points than branches");
  std::uniform_int_distribution<int> pick(0, n - 1);
  while (true) {
    std::vector<std::vector<int>> branches(n);
    for (int i = 1; i < k; ++i)
      branches[pick(rng)].push_back(i);
    if (all_branches &&
        std::any_of(branches.begin(), branches.end(), [](const auto& b) { return b.empty(); }))
      continue;
    for (auto& b : branches)
      std::shuffle(b.begin(), b.end(), rng);
    return StarPattern::from_branches(n, k, branches);
  }
}

}  // namespace stardyn
