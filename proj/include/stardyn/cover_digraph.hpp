#pragma once

// Basic intervals of a pattern and the f-covering digraph on them.

#include <optional>
#include <string>
#include <vector>

#include "stardyn/star_pattern.hpp"

namespace stardyn {

struct BasicInterval {
  int inner = 0;  // orbit index; 0 is the center
  int outer = 0;  // orbit index, also the segment id
  int branch = 0;
  int rank = 0;   // rank of the outer endpoint
  std::string label() const
  {
    return "[" + std::to_string(inner) + "," + std::to_string(outer) + "]";
  }
  bool operator==(const BasicInterval&) const = default;
};

// Ordered by (branch, rank).
std::vector<BasicInterval> basic_intervals(const StarPattern& p);

class CoverDigraph {
 public:
  CoverDigraph(std::vector<BasicInterval> vertices, std::vector<std::uint64_t> successors);

  int size() const { return static_cast<int>(vertices_.size()); }
  const std::vector<BasicInterval>& vertices() const { return vertices_; }
  const BasicInterval& vertex(int i) const { return vertices_[i]; }
  bool has_edge(int from, int to) const { return (successors_[from] >> to) & 1U; }
  std::uint64_t successors(int v) const { return successors_[v]; }
  // Vertex position of a segment id, -1 if absent.
  int position_of(int segment) const;
  std::vector<std::pair<int, int>> edges() const;

  bool operator==(const CoverDigraph&) const = default;

 private:
  std::vector<BasicInterval> vertices_;
  std::vector<std::uint64_t> successors_;
};

// Edge [a,b] -> J iff J lies in arc(f(a), f(b)).
CoverDigraph cover_digraph(const StarPattern& p);

struct ClosedWalkLength {
  int length = 0;
  // Every closed walk of this length stays on one self-looped vertex.
  bool self_loop_only = false;
};

std::vector<ClosedWalkLength> closed_walk_lengths(const CoverDigraph& g, int bound);

// A self-looped vertex on a shortest simple cycle of length m >= 2 through it.
struct Cascade {
  int base = 0;                // segment id of B_0
  std::vector<int> cycle;      // segment ids B_0 .. B_{m-1}
  int m = 0;
};

std::optional<Cascade> find_cascade(const CoverDigraph& g);

// Equal keys iff the digraphs are isomorphic (self-loops included).
std::string isomorphism_key(const CoverDigraph& g);

// One node per basic interval labeled "[a,b]", one edge per covering.
std::string to_dot(const CoverDigraph& g, const std::string& name = "G");

}  // namespace stardyn
