#include "stardyn/certificates.hpp"

#include <algorithm>
#include <deque>

#include "stardyn/forcing_orders.hpp"

namespace stardyn {

SegmentDynamics::SegmentDynamics(const StarPattern& p) : pattern_(p)
{
  image_of_segment_.resize(p.orbit_size());
  for (int s = 1; s < p.orbit_size(); ++s)
    image_of_segment_[s] = arc_segments(p, p.successor(p.inner_of(s)), p.successor(s));
}

SegmentSet SegmentDynamics::image(SegmentSet s, int t) const
{
  for (int i = 0; i < t; ++i) {
    SegmentSet next;
    for (int seg : s.members())
      next |= image_of_segment_[seg];
    s = next;
  }
  return s;
}

namespace {

SegmentSet segs(const StarPattern& p, const ArcEnds& a)
{
  return arc_segments(p, a.a, a.b);
}

bool center_interior(const StarPattern& p, int a, int b)
{
  const int ba = p.branch_of(a), bb = p.branch_of(b);
  return ba != kCenterBranch && bb != kCenterBranch && ba != bb;
}

// g(v) < u < v <= g(u) in the ordering of [g(u), g(v)] that starts at g(v).
bool compatible_order(const StarPattern& p, int t, int u, int v)
{
  const int gu = p.iterate(u, t), gv = p.iterate(v, t);
  if (gu == gv)
    return false;
  const auto path = arc({gv}, {gu}, p).path();
  auto pos = [&](int x) {
    const auto it = std::find(path.begin(), path.end(), MarkedPoint{x});
    return it == path.end() ? -1 : static_cast<int>(it - path.begin());
  };
  const int pu = pos(u), pv = pos(v);
  return pu > 0 && pv > pu;
}

// Chaos loop conditions evaluated on marked-point dynamics.
ReplayResult check_loop(const SegmentDynamics& dyn, const Genscramble& g)
{
  const StarPattern& p = dyn.pattern();
  const int k = p.orbit_size();
  auto fail = [](std::string why) { return ReplayResult{false, std::move(why)}; };
  if (g.t < 1)
    return fail("iterate must be positive");
  if (g.u < 0 || g.u >= k || g.v < 0 || g.v >= k || g.u == g.v)
    return fail("u, v must be distinct marked points");
  if (center_interior(p, g.u, g.v))
    return fail("center interior to (u,v)");
  if (!compatible_order(p, g.t, g.u, g.v))
    return fail("ordering g(v) < u < v <= g(u) fails");
  if (g.loop.size() < 3)
    return fail("loop too short");
  for (const auto& b : g.loop)
    if (b.a < 0 || b.a >= k || b.b < 0 || b.b >= k || b.a == b.b)
      return fail("loop arc " + b.label() + " malformed");
  const SegmentSet b0 = arc_segments(p, g.u, g.v);
  if (segs(p, g.loop.front()) != b0)
    return fail("B_0 differs from [u,v]");
  const std::size_t last = g.loop.size() - 1;
  for (std::size_t i = 1; i <= last; ++i) {
    if (center_interior(p, g.loop[i].a, g.loop[i].b))
      return fail("center interior to " + g.loop[i].label());
    if (!dyn.image(segs(p, g.loop[i - 1]), g.t).contains(segs(p, g.loop[i])))
      return fail(g.loop[i - 1].label() + " does not cover " + g.loop[i].label());
  }
  if (!segs(p, g.loop[last]).contains(b0))
    return fail("B_p does not contain B_0");
  if (!arc_segments(p, p.iterate(g.v, g.t), g.u).contains(segs(p, g.loop[1])))
    return fail("B_1 not inside [g(v),u]");
  if (segs(p, g.loop[last - 1]).intersects(b0))
    return fail("B_{p-1} meets (u,v)");
  return {};
}

// Tree distance with integer rank coordinates.
Rational tree_distance(const StarPoint& x, const StarPoint& y)
{
  if (x.is_center() || y.is_center() || x.branch() == y.branch())
    return abs(x.coord() - y.coord());
  return x.coord() + y.coord();
}

}  // namespace

// ---- certificate basics ----

std::string kind(const Certificate& c)
{
  struct Visitor {
    std::string operator()(const Theorem1Case&) const { return "theorem1"; }
    std::string operator()(const NPlus2Case&) const { return "nplus2"; }
    std::string operator()(const CascadeCertificate&) const { return "cascade"; }
    std::string operator()(const Genscramble&) const { return "genscramble"; }
    std::string operator()(const CenterOrbit&) const { return "center_orbit"; }
    std::string operator()(const ForcingBaseline&) const { return "forcing"; }
    std::string operator()(const OracleWitness&) const { return "oracle_witness"; }
    std::string operator()(const OracleAbsence&) const { return "oracle_absence"; }
  };
  return std::visit(Visitor{}, c);
}

bool claims_period(const Certificate& c, int q)
{
  struct Visitor {
    int q;
    bool operator()(const Theorem1Case&) const { return true; }
    bool operator()(const NPlus2Case& n) const
    {
      // case 1: cascade of length 2; case 2: length 4 plus the 2-loop
      return n.case_id == 1 ? q >= 2 : (q == 2 || q >= 4);
    }
    bool operator()(const CascadeCertificate& c) const { return q >= c.cascade.m; }
    bool operator()(const Genscramble&) const { return false; }
    bool operator()(const CenterOrbit& o) const { return q == o.k; }
    bool operator()(const ForcingBaseline& f) const { return sharkovskii_le(q, f.k); }
    bool operator()(const OracleWitness& w) const { return q == w.witness.period; }
    bool operator()(const OracleAbsence&) const { return false; }
  };
  return std::visit(Visitor{q}, c);
}

std::set<int> claimed_periods(const Certificate& c, int bound)
{
  std::set<int> out;
  for (int q = 1; q <= bound; ++q)
    if (claims_period(c, q))
      out.insert(q);
  return out;
}

namespace {

nlohmann::ordered_json arcs_json(const std::vector<ArcEnds>& arcs)
{
  auto out = nlohmann::ordered_json::array();
  for (const auto& a : arcs)
    out.push_back(a.label());
  return out;
}

}  // namespace

nlohmann::ordered_json to_json(const PeriodicWitness& w)
{
  const auto& x = w.point;
  nlohmann::ordered_json j;
  j["point"] = {{"branch", x.is_center() ? 0 : x.branch() + 1}, {"coord", to_string(x.coord())}};
  j["period"] = w.period;
  j["on_center_orbit"] = w.on_center_orbit;
  return j;
}

nlohmann::ordered_json to_json(const Certificate& c)
{
  nlohmann::ordered_json j;
  j["kind"] = kind(c);
  struct Visitor {
    nlohmann::ordered_json& j;
    void operator()(const Theorem1Case& t) const
    {
      j["case"] = t.case_id;
      j["u"] = t.u;
      j["v"] = t.v;
      j["A"] = t.A.label();
      j["B"] = t.B.label();
    }
    void operator()(const NPlus2Case& n) const
    {
      j["case"] = n.case_id;
      j["u"] = n.u;
      j["v"] = n.v;
      j["A"] = n.A.label();
      j["B"] = arcs_json(n.B);
    }
    void operator()(const CascadeCertificate& c) const
    {
      j["base"] = c.cascade.base;
      j["cycle"] = c.cascade.cycle;
      j["m"] = c.cascade.m;
    }
    void operator()(const Genscramble& g) const
    {
      j["t"] = g.t;
      j["u"] = g.u;
      j["v"] = g.v;
      j["loop"] = arcs_json(g.loop);
    }
    void operator()(const CenterOrbit& o) const { j["period"] = o.k; }
    void operator()(const ForcingBaseline& f) const
    {
      j["order"] = 1;
      j["k"] = f.k;
    }
    void operator()(const OracleWitness& w) const
    {
      const auto wj = to_json(w.witness);
      for (const auto& [key, value] : wj.items())
        j[key] = value;
    }
    void operator()(const OracleAbsence& a) const
    {
      j["period"] = a.period;
      j["cylinders"] = a.cylinders;
    }
  };
  std::visit(Visitor{j}, c);
  return j;
}

// ---- theorem checks ----

std::optional<Theorem1Case> check_center_theorem(const StarPattern& p)
{
  const int k = p.orbit_size();
  const int x1 = 1, x2 = 2 % k, x3 = 3 % k;
  const int b1 = p.branch_of(x1);
  // k = 3 wraps x3 onto o; the case-1..3 arcs still verify there, so o
  // counts as off the branch of x1 in that one case.
  if ((x3 == 0 && k != 3) || (x3 != 0 && p.branch_of(x3) == b1))
    return std::nullopt;

  Theorem1Case c;
  if (p.branch_of(x2) != b1) {
    c = {1, 0, x1, {}, {x2, 0}};
  } else if (p.rank_of(x1) < p.rank_of(x2)) {
    c = {2, x1, x2, {}, {0, x1}};
  } else {
    c = {3, x2, 0, {}, {x1, x2}};
  }
  c.A = {c.u, c.v};

  const SegmentDynamics dyn(p);
  const SegmentSet a = segs(p, c.A), b = segs(p, c.B);
  if (!dyn.image(a).contains(a) || !dyn.image(a).contains(b) || !dyn.image(b).contains(a))
    throw std::logic_error("center theorem coverings fail for " + to_string(p));
  return c;
}

bool nplus2_preconditions_hold(const StarPattern& p)
{
  return p.branch_count() >= 3 && p.orbit_size() == p.branch_count() + 2 && p.all_branches_hit();
}

std::optional<NPlus2Case> check_nplus2_theorem(const StarPattern& p)
{
  if (!nplus2_preconditions_hold(p))
    throw PreconditionError("n+2 theorem needs n >= 3, k = n+2 and every branch hit");
  if (check_center_theorem(p))
    return std::nullopt;

  // x1 and x3 share a branch, x2 and x4 sit alone on two others.
  NPlus2Case c;
  if (p.rank_of(3) < p.rank_of(1))
    c = {1, 0, 3, {0, 3}, {{0, 4}}};
  else
    c = {2, 0, 1, {0, 1}, {{0, 2}, {1, 3}, {0, 4}}};

  const SegmentDynamics dyn(p);
  auto covers = [&](const ArcEnds& x, const ArcEnds& y) {
    return dyn.image(segs(p, x)).contains(segs(p, y));
  };
  bool ok = covers(c.A, c.A) && covers(c.A, c.B.front()) && covers(c.B.back(), c.A);
  for (std::size_t i = 0; i + 1 < c.B.size(); ++i)
    ok = ok && covers(c.B[i], c.B[i + 1]);
  if (c.case_id == 2)
    ok = ok && covers(c.B[1], c.B[0]) && !segs(p, c.B[0]).intersects(segs(p, c.B[1]));
  if (!ok)
    throw std::logic_error("n+2 theorem coverings fail for " + to_string(p));
  return c;
}

// ---- chaos search ----

std::optional<Genscramble> find_genscramble(const StarPattern& p, int max_iterate)
{
  if (max_iterate < 1)
    throw std::invalid_argument("max_iterate must be positive");
  const SegmentDynamics dyn(p);

  if (auto t1 = check_center_theorem(p)) {
    Genscramble g{1, t1->u, t1->v, {t1->A, t1->B, t1->A}};
    if (check_loop(dyn, g))
      return g;
  }
  if (nplus2_preconditions_hold(p)) {
    if (auto n2 = check_nplus2_theorem(p)) {
      Genscramble g{1, n2->u, n2->v, {n2->A}};
      g.loop.insert(g.loop.end(), n2->B.begin(), n2->B.end());
      g.loop.push_back(n2->A);
      if (check_loop(dyn, g))
        return g;
    }
  }

  // Candidate loop members: marked arcs inside one closed branch.
  std::vector<ArcEnds> candidates;
  std::vector<SegmentSet> candidate_segs;
  for (int b = 0; b < p.branch_count(); ++b)
    for (int lo = 0; lo <= p.branch_length(b); ++lo)
      for (int hi = lo + 1; hi <= p.branch_length(b); ++hi) {
        candidates.push_back({p.point_at(b, lo), p.point_at(b, hi)});
        candidate_segs.push_back(segs(p, candidates.back()));
      }
  const int nc = static_cast<int>(candidates.size());
  const int max_loop = 2 * (p.orbit_size() - 1) + 2;

  for (int t = 1; t <= max_iterate; ++t) {
    std::vector<SegmentSet> image(nc);
    for (int i = 0; i < nc; ++i)
      image[i] = dyn.image(candidate_segs[i], t);

    for (int u = 0; u < p.orbit_size(); ++u) {
      for (int v = 0; v < p.orbit_size(); ++v) {
        if (u == v || center_interior(p, u, v) || !compatible_order(p, t, u, v))
          continue;
        const SegmentSet b0 = arc_segments(p, u, v);
        const SegmentSet b0_image = dyn.image(b0, t);
        const SegmentSet first_slot = arc_segments(p, p.iterate(v, t), u);

        std::vector<int> parent(nc, -2), depth(nc, 0);
        std::deque<int> queue;
        for (int i = 0; i < nc; ++i) {
          if (b0_image.contains(candidate_segs[i]) && first_slot.contains(candidate_segs[i])) {
            parent[i] = -1;
            depth[i] = 1;
            queue.push_back(i);
          }
        }
        int last = -1;
        while (!queue.empty()) {
          const int c = queue.front();
          queue.pop_front();
          if (!candidate_segs[c].intersects(b0) && image[c].contains(b0)) {
            last = c;
            break;
          }
          if (depth[c] + 1 >= max_loop)
            continue;
          for (int d = 0; d < nc; ++d) {
            if (parent[d] == -2 && image[c].contains(candidate_segs[d])) {
              parent[d] = c;
              depth[d] = depth[c] + 1;
              queue.push_back(d);
            }
          }
        }
        if (last < 0)
          continue;
        Genscramble g{t, u, v, {}};
        for (int c = last; c >= 0; c = parent[c])
          g.loop.push_back(candidates[c]);
        g.loop.push_back({u, v});
        std::reverse(g.loop.begin(), g.loop.end());
        g.loop.push_back({u, v});
        return g;
      }
    }
  }
  return std::nullopt;
}

// ---- replay ----

ReplayResult replay_genscramble(const PLMap& m, const Genscramble& g)
{
  const StarPattern& p = m.pattern();
  const int k = p.orbit_size();
  auto fail = [](std::string why) { return ReplayResult{false, std::move(why)}; };
  if (g.t < 1 || g.loop.size() < 3)
    return fail("malformed certificate");
  if (g.u < 0 || g.u >= k || g.v < 0 || g.v >= k || g.u == g.v)
    return fail("u, v must be distinct marked points");

  auto image = [&](SegmentSet s) {
    for (int i = 0; i < g.t; ++i)
      s = image_of_segments(m, s);
    return s;
  };

  try {
    const Arc uv = arc({g.u}, {g.v}, p);
    if (uv.center_interior())
      return fail("center interior to (u,v)");

    // Ordering along [g(u), g(v)] by distance from g(v), with exact images.
    const StarPoint u = marked_point(p, g.u), v = marked_point(p, g.v);
    const StarPoint gu = evaluate_iterate(m, u, g.t), gv = evaluate_iterate(m, v, g.t);
    const Rational span = tree_distance(gv, gu);
    auto on_arc = [&](const StarPoint& w) {
      return tree_distance(gv, w) + tree_distance(w, gu) == span;
    };
    if (!on_arc(u) || !on_arc(v))
      return fail("u or v off the arc [g(u),g(v)]");
    const Rational du = tree_distance(gv, u), dv = tree_distance(gv, v);
    if (!(0 < du && du < dv && dv <= span))
      return fail("ordering g(v) < u < v <= g(u) fails");

    std::vector<Arc> loop;
    for (const auto& b : g.loop)
      loop.push_back(arc({b.a}, {b.b}, p));
    if (loop.front().segments() != uv.segments())
      return fail("B_0 differs from [u,v]");
    for (std::size_t i = 1; i < loop.size(); ++i) {
      if (loop[i].center_interior())
        return fail("center interior to " + loop[i].label());
      if (!image(loop[i - 1].segments()).contains(loop[i].segments()))
        return fail(loop[i - 1].label() + " does not cover " + loop[i].label());
    }
    if (!arc_contains(loop.back(), uv))
      return fail("B_p does not contain B_0");

    // B_1 inside [g(v), u]: both endpoints of B_1 on that arc.
    const Rational first_span = tree_distance(gv, u);
    for (const MarkedPoint e : {loop[1].a(), loop[1].b()}) {
      const StarPoint w = marked_point(p, e.index);
      if (tree_distance(gv, w) + tree_distance(w, u) != first_span)
        return fail("B_1 not inside [g(v),u]");
    }
    if (loop[loop.size() - 2].segments().intersects(uv.segments()))
      return fail("B_{p-1} meets (u,v)");
  } catch (const std::invalid_argument& e) {
    return fail(e.what());
  }
  return {};
}

ReplayResult replay(const StarPattern& p, const Certificate& c)
{
  auto fail = [](std::string why) { return ReplayResult{false, std::move(why)}; };
  if (const auto* t = std::get_if<Theorem1Case>(&c)) {
    auto again = check_center_theorem(p);
    if (!again || again->case_id != t->case_id || again->u != t->u || again->v != t->v ||
        again->A != t->A || again->B != t->B)
      return fail("theorem1 case does not re-derive");
    Genscramble g{1, t->u, t->v, {t->A, t->B, t->A}};
    if (auto r = check_loop(SegmentDynamics(p), g); !r)
      return r;
    return {};
  }
  if (const auto* n = std::get_if<NPlus2Case>(&c)) {
    if (!nplus2_preconditions_hold(p))
      return fail("n+2 preconditions fail");
    auto again = check_nplus2_theorem(p);
    if (!again || again->case_id != n->case_id || again->A != n->A || again->B != n->B)
      return fail("n+2 case does not re-derive");
    return {};
  }
  if (const auto* cc = std::get_if<CascadeCertificate>(&c)) {
    const auto g = cover_digraph(p);
    const auto& cyc = cc->cascade.cycle;
    if (cc->cascade.m < 2 || static_cast<int>(cyc.size()) != cc->cascade.m ||
        cyc.front() != cc->cascade.base)
      return fail("malformed cascade");
    std::vector<int> pos;
    for (int s : cyc) {
      const int i = g.position_of(s);
      if (i < 0)
        return fail("cascade vertex is not a basic interval");
      pos.push_back(i);
    }
    if (!g.has_edge(pos.front(), pos.front()))
      return fail("cascade base lacks a self-loop");
    for (std::size_t i = 0; i < pos.size(); ++i)
      if (!g.has_edge(pos[i], pos[(i + 1) % pos.size()]))
        return fail("cascade cycle edge missing");
    auto sorted = pos;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      return fail("cascade cycle repeats a vertex");
    return {};
  }
  if (const auto* g = std::get_if<Genscramble>(&c)) {
    if (auto r = check_loop(SegmentDynamics(p), *g); !r)
      return r;
    return replay_genscramble(realize(p), *g);
  }
  if (const auto* o = std::get_if<CenterOrbit>(&c))
    return o->k == p.orbit_size() ? ReplayResult{} : fail("orbit size differs");
  if (const auto* f = std::get_if<ForcingBaseline>(&c))
    return f->k == p.orbit_size() ? ReplayResult{} : fail("orbit size differs");
  if (const auto* w = std::get_if<OracleWitness>(&c)) {
    const PLMap m = realize(p);
    if (least_period(m, w->witness.point, w->witness.period) != w->witness.period)
      return fail("witness does not have the stated least period");
    return {};
  }
  if (const auto* a = std::get_if<OracleAbsence>(&c)) {
    if (!periodic_points(realize(p), a->period).empty())
      return fail("oracle finds a point of the period");
    return {};
  }
  return fail("unknown certificate");
}

}  // namespace stardyn
