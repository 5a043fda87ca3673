#include "stardyn/star_pattern.hpp"

#include <algorithm>
#include <map>

namespace stardyn {

std::vector<std::string> validate(const FiniteOrbitSpec& spec)
{
  std::vector<std::string> errors;
  const int size = static_cast<int>(spec.points.size());
  if (spec.n < 1)
    errors.push_back("branch count must be positive");
  if (size == 0)
    errors.push_back("orbit is empty");
  if (static_cast<int>(spec.next.size()) != size)
    errors.push_back("successor table size differs from point count");
  if (!errors.empty())
    return errors;

  std::map<int, std::vector<int>> ranks;
  int centers = 0;
  for (const auto& pt : spec.points) {
    if (pt.branch == kCenterBranch) {
      ++centers;
    } else if (pt.branch < 0 || pt.branch >= spec.n) {
      errors.push_back("branch id out of range");
    } else if (pt.rank < 1) {
      errors.push_back("rank not positive");
    } else {
      ranks[pt.branch].push_back(pt.rank);
    }
  }
  if (centers > 1)
    errors.push_back("center listed more than once");
  for (auto& [b, rs] : ranks) {
    std::sort(rs.begin(), rs.end());
    if (std::adjacent_find(rs.begin(), rs.end()) != rs.end())
      errors.push_back("duplicate rank on branch b" + std::to_string(b + 1));
    else if (rs.back() != static_cast<int>(rs.size()))
      errors.push_back("rank gap on branch b" + std::to_string(b + 1));
  }

  if (std::any_of(spec.next.begin(), spec.next.end(), [&](int j) { return j < 0 || j >= size; })) {
    errors.push_back("successor index out of range");
    return errors;
  }
  int steps = 0;
  int i = 0;
  do {
    i = spec.next[i];
    ++steps;
  } while (i != 0 && steps <= size);
  if (i != 0 || steps != size)
    errors.push_back("successor table is not a single cycle through all points");
  return errors;
}

std::set<int> orbit_type(const FiniteOrbitSpec& spec)
{
  if (auto errors = validate(spec); !errors.empty())
    throw PatternError(std::move(errors));

  const bool has_center = std::any_of(spec.points.begin(), spec.points.end(),
                                      [](const OrbitPoint& p) { return p.branch == kCenterBranch; });
  if (has_center)
    return {1};

  // Partial map on branches via the point of each branch closest to the center.
  std::vector<int> branch_map(spec.n, -1);
  for (std::size_t i = 0; i < spec.points.size(); ++i) {
    if (spec.points[i].rank == 1)
      branch_map[spec.points[i].branch] = spec.points[spec.next[i]].branch;
  }

  std::set<int> types;
  for (int start = 0; start < spec.n; ++start) {
    // `start` lies on a cycle iff iterating returns to it within n steps.
    int b = start;
    for (int len = 1; len <= spec.n; ++len) {
      b = branch_map[b];
      if (b < 0)
        break;
      if (b == start) {
        types.insert(len);
        break;
      }
    }
  }
  return types;
}

}  // namespace stardyn
