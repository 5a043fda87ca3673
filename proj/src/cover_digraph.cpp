#include "stardyn/cover_digraph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "stardyn/rational.hpp"

namespace stardyn {

std::vector<BasicInterval> basic_intervals(const StarPattern& p)
{
  std::vector<BasicInterval> out;
  for (int b = 0; b < p.branch_count(); ++b) {
    for (int r = 1; r <= p.branch_length(b); ++r)
      out.push_back({p.point_at(b, r - 1), p.point_at(b, r), b, r});
  }
  return out;
}

CoverDigraph::CoverDigraph(std::vector<BasicInterval> vertices,
                           std::vector<std::uint64_t> successors)
    : vertices_(std::move(vertices)), successors_(std::move(successors))
{
  if (vertices_.size() != successors_.size() || vertices_.size() > 64)
    throw std::invalid_argument("malformed covering digraph");
}

int CoverDigraph::position_of(int segment) const
{
  for (int i = 0; i < size(); ++i)
    if (vertices_[i].outer == segment)
      return i;
  return -1;
}

std::vector<std::pair<int, int>> CoverDigraph::edges() const
{
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j)
      if (has_edge(i, j))
        out.emplace_back(i, j);
  return out;
}

CoverDigraph cover_digraph(const StarPattern& p)
{
  auto vertices = basic_intervals(p);
  std::vector<std::uint64_t> successors(vertices.size(), 0);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const SegmentSet image =
        arc_segments(p, p.successor(vertices[i].inner), p.successor(vertices[i].outer));
    for (std::size_t j = 0; j < vertices.size(); ++j)
      if (image.contains(vertices[j].outer))
        successors[i] |= std::uint64_t{1} << j;
  }
  return CoverDigraph(std::move(vertices), std::move(successors));
}

std::vector<ClosedWalkLength> closed_walk_lengths(const CoverDigraph& g, int bound)
{
  const int n = g.size();
  using Matrix = std::vector<std::vector<BigInt>>;
  Matrix adj(n, std::vector<BigInt>(n, 0));
  int self_loops = 0;
  for (int i = 0; i < n; ++i) {
    self_loops += g.has_edge(i, i);
    for (int j = 0; j < n; ++j)
      adj[i][j] = g.has_edge(i, j) ? 1 : 0;
  }

  std::vector<ClosedWalkLength> out;
  Matrix power = adj;
  for (int len = 1; len <= bound; ++len) {
    BigInt trace = 0;
    for (int i = 0; i < n; ++i)
      trace += power[i][i];
    if (trace > 0)
      out.push_back({len, trace == self_loops});
    if (len == bound)
      break;
    Matrix next(n, std::vector<BigInt>(n, 0));
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l)
        if (power[i][l] != 0)
          for (int j = 0; j < n; ++j)
            if (g.has_edge(l, j))
              next[i][j] += power[i][l];
    power = std::move(next);
  }
  return out;
}

std::optional<Cascade> find_cascade(const CoverDigraph& g)
{
  std::optional<Cascade> best;
  for (int base = 0; base < g.size(); ++base) {
    if (!g.has_edge(base, base))
      continue;
    // Breadth-first search for the shortest return to `base` avoiding the self-loop.
    std::vector<int> parent(g.size(), -1);
    std::deque<int> queue;
    for (int j = 0; j < g.size(); ++j) {
      if (j != base && g.has_edge(base, j)) {
        parent[j] = base;
        queue.push_back(j);
      }
    }
    int last = -1;
    while (!queue.empty() && last < 0) {
      const int v = queue.front();
      queue.pop_front();
      if (g.has_edge(v, base)) {
        last = v;
        break;
      }
      for (int j = 0; j < g.size(); ++j) {
        if (j != base && parent[j] < 0 && g.has_edge(v, j)) {
          parent[j] = v;
          queue.push_back(j);
        }
      }
    }
    if (last < 0)
      continue;
    std::vector<int> cycle;
    for (int v = last; v != base; v = parent[v])
      cycle.push_back(g.vertex(v).outer);
    cycle.push_back(g.vertex(base).outer);
    std::reverse(cycle.begin(), cycle.end());
    const int m = static_cast<int>(cycle.size());
    if (!best || m < best->m)
      best = Cascade{g.vertex(base).outer, std::move(cycle), m};
  }
  return best;
}

std::string isomorphism_key(const CoverDigraph& g)
{
  const int n = g.size();
  // Color refinement, then exhaustive search within color classes.
  std::vector<int> color(n);
  for (int i = 0; i < n; ++i) {
    int out = __builtin_popcountll(g.successors(i)), in = 0;
    for (int j = 0; j < n; ++j)
      in += g.has_edge(j, i);
    color[i] = (g.has_edge(i, i) ? 1 : 0) + 2 * (out + 65 * in);
  }
  for (int round = 0; round < n; ++round) {
    std::vector<std::vector<int>> signature(n);
    for (int i = 0; i < n; ++i) {
      std::vector<int> outs, ins;
      for (int j = 0; j < n; ++j) {
        if (g.has_edge(i, j))
          outs.push_back(color[j]);
        if (g.has_edge(j, i))
          ins.push_back(color[j]);
      }
      std::sort(outs.begin(), outs.end());
      std::sort(ins.begin(), ins.end());
      signature[i] = {color[i], -1};
      signature[i].insert(signature[i].end(), outs.begin(), outs.end());
      signature[i].push_back(-2);
      signature[i].insert(signature[i].end(), ins.begin(), ins.end());
    }
    std::map<std::vector<int>, int> ids;
    for (const auto& s : signature)
      ids.emplace(s, 0);
    int next = 0;
    for (auto& [s, id] : ids)
      id = next++;
    std::vector<int> refined(n);
    for (int i = 0; i < n; ++i)
      refined[i] = ids[signature[i]];
    const bool stable = std::set<int>(refined.begin(), refined.end()).size() ==
                        std::set<int>(color.begin(), color.end()).size();
    color = std::move(refined);
    if (stable)
      break;
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::pair(color[a], a) < std::pair(color[b], b); });

  // Cells of equal color, permuted independently.
  std::vector<std::pair<int, int>> cells;
  for (int i = 0; i < n;) {
    int j = i;
    while (j < n && color[order[j]] == color[order[i]])
      ++j;
    cells.emplace_back(i, j);
    i = j;
  }

  auto encode = [&](const std::vector<int>& ord) {
    std::string s(static_cast<std::size_t>(n) * n, '0');
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (g.has_edge(ord[i], ord[j]))
          s[static_cast<std::size_t>(i) * n + j] = '1';
    return s;
  };

  std::string best;
  bool first = true;
  auto recurse = [&](auto&& self, std::size_t cell) -> void {
    if (cell == cells.size()) {
      std::string s = encode(order);
      if (first || s < best) {
        best = std::move(s);
        first = false;
      }
      return;
    }
    auto [lo, hi] = cells[cell];
    std::sort(order.begin() + lo, order.begin() + hi);
    do {
      self(self, cell + 1);
    } while (std::next_permutation(order.begin() + lo, order.begin() + hi));
  };
  recurse(recurse, 0);

  std::string key = std::to_string(n) + ":";
  for (int i = 0; i < n; ++i)
    key += std::to_string(color[order[i]]) + ",";
  return key + ":" + best;
}

std::string to_dot(const CoverDigraph& g, const std::string& name)
{
  std::ostringstream out;
  out << "digraph " << name << " {\n";
  for (int i = 0; i < g.size(); ++i)
    out << "  v" << i << " [label=\"" << g.vertex(i).label() << "\"];\n";
  for (auto [i, j] : g.edges())
    out << "  v" << i << " -> v" << j << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace stardyn
