#pragma once

//
// certificates.hpp
//
// Replayable evidence for the presence of periods and for Li-Yorke chaos.
//
// Every certificate names marked points and marked arcs only, so a verifier
// can re-derive its claim from the pattern alone (`replay`). Absence of a
// period is never claimed by a structural certificate; only the oracle's
// exhaustion (`OracleAbsence`) records it.
//

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "stardyn/cover_digraph.hpp"
#include "stardyn/pl_map.hpp"
#include "stardyn/star_pattern.hpp"

namespace stardyn {

struct ArcEnds {
  int a = 0;
  int b = 0;
  std::string label() const { return "[" + std::to_string(a) + "," + std::to_string(b) + "]"; }
  bool operator==(const ArcEnds&) const = default;
};

// f^3(o) off the closed branch of f(o). Coverings A -> A -> B -> A hold
// with A = [u, v].
struct Theorem1Case {
  int case_id = 0;
  int u = 0, v = 0;
  ArcEnds A, B;
};

// Orbit of size n+2 meeting every branch with f^3(o) beside f(o).
// Case 1: A -> A -> B1 -> A. Case 2: A -> A -> B1 -> B2 -> B3 -> A and the
// 2-loop B1 -> B2 -> B1 on disjoint intervals.
struct NPlus2Case {
  int case_id = 0;
  int u = 0, v = 0;
  ArcEnds A;
  std::vector<ArcEnds> B;
};

// Self-looped basic interval B_0 on a simple cycle of length m >= 2:
// every period >= m is present.
struct CascadeCertificate {
  Cascade cascade;
};

// Iterate g = f^t, marked points u, v with g(v) < u < v <= g(u) along
// [g(u), g(v)], and a g-loop B_0 = [u, v], B_1 in [g(v), u], ...,
// B_{p-1} disjoint from (u, v), B_p containing B_0 (stored as B_0).
struct Genscramble {
  int t = 1;
  int u = 0, v = 0;
  std::vector<ArcEnds> loop;  // B_0 .. B_p
};

// The center itself has period k.
struct CenterOrbit {
  int k = 0;
};

// Baseline from the Sharkovskii order: an orbit of type 1 and size k.
struct ForcingBaseline {
  int k = 0;
};

struct OracleWitness {
  PeriodicWitness witness;
};

struct OracleAbsence {
  int period = 0;
  std::uint64_t cylinders = 0;
};

using Certificate = std::variant<Theorem1Case, NPlus2Case, CascadeCertificate, Genscramble,
                                 CenterOrbit, ForcingBaseline, OracleWitness, OracleAbsence>;

std::string kind(const Certificate& c);

// Whether the certificate asserts a point of least period q. Genscramble and
// OracleAbsence assert no period.
bool claims_period(const Certificate& c, int q);

nlohmann::ordered_json to_json(const Certificate& c);
// {"point": {"branch": b, "coord": "num/den"}, "period": p, "on_center_orbit": bool};
// branch 0 is the center.
nlohmann::ordered_json to_json(const PeriodicWitness& w);

struct ReplayResult {
  bool ok = true;
  std::string reason;
  explicit operator bool() const { return ok; }
};

// Re-derives the certificate's claim from the pattern alone.
ReplayResult replay(const StarPattern& p, const Certificate& c);

// Independent check of the chaos hypotheses using the exact
// piecewise-linear images and freshly built arcs.
ReplayResult replay_genscramble(const PLMap& m, const Genscramble& g);

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Images of unions of basic intervals under iterates of f, computed from the
// marked-point dynamics: the image of basic interval [a,b] is arc(f(a), f(b)).
class SegmentDynamics {
 public:
  explicit SegmentDynamics(const StarPattern& p);
  SegmentSet image(SegmentSet s, int t = 1) const;
  const StarPattern& pattern() const { return pattern_; }

 private:
  StarPattern pattern_;
  std::vector<SegmentSet> image_of_segment_;
};

std::optional<Theorem1Case> check_center_theorem(const StarPattern& p);

// Throws PreconditionError unless n >= 3, k = n + 2 and every branch is hit.
// Returns none when check_center_theorem already applies.
std::optional<NPlus2Case> check_nplus2_theorem(const StarPattern& p);
bool nplus2_preconditions_hold(const StarPattern& p);

// Searches g = f^t for t = 1..max_iterate. Theorem-derived certificates are
// tried first at t = 1, then marked pairs (u, v) in index order with a
// shortest loop for each.
std::optional<Genscramble> find_genscramble(const StarPattern& p, int max_iterate);

// Periods asserted by the theorem certificates, restricted to [1, bound].
std::set<int> claimed_periods(const Certificate& c, int bound);

}  // namespace stardyn
