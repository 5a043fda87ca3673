#include "stardyn/survey.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "stardyn/file_io.hpp"
#include "stardyn/forcing_orders.hpp"

namespace stardyn {

std::string Tail::tag() const
{
  switch (shape) {
    case TailShape::CofiniteFrom: return "cofinite-from-" + std::to_string(from);
    case TailShape::EvensPlusOne: return "evens-plus-one";
    case TailShape::Other: return "other";
  }
  return "other";
}

Tail classify_tail(const std::set<int>& present, int bound)
{
  std::set<int> evens{1};
  for (int q = 2; q <= bound; q += 2)
    evens.insert(q);
  if (present == evens)
    return {TailShape::EvensPlusOne, 0};
  if (bound < 2 || !present.contains(bound))
    return {};
  int m = bound;
  while (m > 1 && present.contains(m - 1))
    --m;
  if (m > bound - 1)
    return {};
  return {TailShape::CofiniteFrom, m};
}

namespace {

ClassRecord classify_one(const StarPattern& p, const SurveyOptions& o)
{
  ReportOptions ro{o.max_period, o.max_iterate, o.oracle};
  const PeriodicityReport r = periodicity_report(p, ro);
  if (r.oracle_depth < o.max_period)
    throw CapExceeded("oracle cylinders for " + to_string(p), o.oracle.cylinder_cap);
  ClassRecord c{p};
  c.raw_count = class_size(p);
  c.theorem1 = r.theorem1.has_value();
  c.nplus2 = r.nplus2.has_value();
  c.present = r.present();
  c.absent = r.absent();
  c.tail = classify_tail(c.present, o.max_period);
  if (r.chaos) {
    c.chaos_iterate = r.chaos->t;
    c.chaos = r.chaos;
  }
  c.cascade = r.cascade;
  return c;
}

}  // namespace

SurveyResult classify_all(int n, int k, SurveyOptions options)
{
  if (options.max_period < 1 || options.max_iterate < 1)
    throw std::invalid_argument("max_period and max_iterate must be positive");
  std::vector<StarPattern> patterns = enumerate_patterns(n, k, true, options.enumeration_cap);
  if (options.filter == SurveyFilter::Theorem1Inapplicable)
    std::erase_if(patterns, [](const StarPattern& p) { return check_center_theorem(p).has_value(); });

  // Workers fill fixed slots; the merge below only reads them in order.
  std::vector<std::optional<ClassRecord>> slots(patterns.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= patterns.size())
        return;
      try {
        slots[i] = classify_one(patterns[i], options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next = patterns.size();
        return;
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(patterns.size())));
  if (jobs <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j)
      pool.emplace_back(work);
  }
  if (failure)
    std::rethrow_exception(failure);

  SurveyResult out{n, k, options, {}, {}};
  std::map<std::string, int> digraph_ids;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    ClassRecord c = std::move(*slots[i]);
    c.pattern_class = static_cast<int>(i) + 1;
    const std::string key = isomorphism_key(cover_digraph(c.pattern));
    auto [it, fresh] = digraph_ids.emplace(key, static_cast<int>(digraph_ids.size()) + 1);
    c.digraph_class = it->second;
    out.counts.raw += c.raw_count;
    out.records.push_back(std::move(c));
  }
  out.counts.branch_permutation = out.records.size();
  out.counts.digraph_isomorphism = digraph_ids.size();
  return out;
}

// ---- tables ----

namespace {

const std::vector<std::string> kColumns = {"pattern", "pattern_class", "digraph_class", "theorem1",
                                           "nplus2",  "periods",       "tail",          "chaos_iterate"};

std::string join_set(const std::set<int>& s)
{
  std::string out;
  for (int q : s)
    out += (out.empty() ? "" : " ") + std::to_string(q);
  return out;
}

std::vector<std::string> row_of(const ClassRecord& c)
{
  return {to_string(c.pattern),
          std::to_string(c.pattern_class),
          std::to_string(c.digraph_class),
          c.theorem1 ? "true" : "false",
          c.nplus2 ? "true" : "false",
          join_set(c.present),
          c.tail.tag(),
          c.chaos_iterate ? std::to_string(*c.chaos_iterate) : "none"};
}

std::string csv_field(const std::string& s)
{
  if (s.find_first_of(",\"\n;") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"')
      out += '"';
    out += ch;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line)
{
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

nlohmann::ordered_json record_json(const ClassRecord& c)
{
  nlohmann::ordered_json j;
  j["pattern"] = to_string(c.pattern);
  j["pattern_class"] = c.pattern_class;
  j["digraph_class"] = c.digraph_class;
  j["theorem1"] = c.theorem1;
  j["nplus2"] = c.nplus2;
  j["periods"] = c.present;
  j["tail"] = c.tail.tag();
  j["chaos_iterate"] = c.chaos_iterate ? nlohmann::ordered_json(*c.chaos_iterate) : nlohmann::ordered_json(nullptr);
  j["raw_count"] = c.raw_count;
  j["absent"] = c.absent;
  j["chaos"] = c.chaos ? to_json(Certificate{*c.chaos}) : nlohmann::ordered_json(nullptr);
  j["cascade"] = c.cascade ? to_json(Certificate{CascadeCertificate{*c.cascade}}) : nlohmann::ordered_json(nullptr);
  return j;
}

}  // namespace

nlohmann::ordered_json summary_json(const SurveyResult& s)
{
  nlohmann::ordered_json j;
  j["n"] = s.n;
  j["k"] = s.k;
  j["max_period"] = s.options.max_period;
  j["max_iterate"] = s.options.max_iterate;
  j["filter"] = s.options.filter == SurveyFilter::Theorem1Inapplicable ? "theorem1-inapplicable" : "none";
  j["counts"] = {{"raw", s.counts.raw},
                 {"branch_permutation", s.counts.branch_permutation},
                 {"digraph_isomorphism", s.counts.digraph_isomorphism}};
  return j;
}

std::string render_table(const SurveyResult& s, TableFormat format)
{
  if (format == TableFormat::Csv) {
    std::string out;
    for (std::size_t i = 0; i < kColumns.size(); ++i)
      out += (i ? "," : "") + kColumns[i];
    out += '\n';
    for (const auto& c : s.records) {
      const auto row = row_of(c);
      for (std::size_t i = 0; i < row.size(); ++i)
        out += (i ? "," : "") + csv_field(row[i]);
      out += '\n';
    }
    return out;
  }
  nlohmann::ordered_json j = summary_json(s);
  j["columns"] = kColumns;
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& c : s.records)
    j["records"].push_back(record_json(c));
  return j.dump(2) + "\n";
}

std::vector<std::vector<std::string>> parse_table(const std::string& text, TableFormat format)
{
  std::vector<std::vector<std::string>> rows;
  if (format == TableFormat::Csv) {
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
      if (header) {
        header = false;
        continue;
      }
      if (!line.empty())
        rows.push_back(split_csv_line(line));
    }
    return rows;
  }
  const auto j = nlohmann::json::parse(text);
  for (const auto& r : j.at("records")) {
    std::vector<std::string> row;
    for (const auto& col : kColumns) {
      const auto& v = r.at(col);
      if (v.is_string())
        row.push_back(v.get<std::string>());
      else if (v.is_boolean())
        row.push_back(v.get<bool>() ? "true" : "false");
      else if (v.is_null())
        row.push_back("none");
      else if (v.is_array())
        row.push_back(join_set(v.get<std::set<int>>()));
      else
        row.push_back(v.dump());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit_table(const SurveyResult& s, TableFormat format, const std::filesystem::path& path)
{
  write_file_atomic(path, render_table(s, format));
}

// ---- self-check ----

std::set<std::string> edge_labels(const CoverDigraph& g)
{
  std::set<std::string> out;
  for (auto [i, j] : g.edges())
    out.insert(g.vertex(i).label() + "->" + g.vertex(j).label());
  return out;
}

PaperGoldens PaperGoldens::defaults()
{
  PaperGoldens g;
  g.example1_vertices = {"[0,1]", "[1,3]", "[0,2]", "[0,4]"};
  g.example1_edges = {"[0,1]->[0,1]", "[0,1]->[0,2]", "[0,2]->[1,3]",
                      "[1,3]->[0,2]", "[1,3]->[0,4]", "[0,4]->[0,1]"};
  g.example2_vertices = {"[0,1]", "[0,2]", "[1,3]", "[0,4]", "[3,5]"};
  g.example2_edges = {"[0,1]->[0,1]", "[0,1]->[0,2]", "[0,2]->[1,3]", "[1,3]->[0,2]",
                      "[1,3]->[0,4]", "[0,4]->[1,3]", "[0,4]->[3,5]", "[3,5]->[0,4]"};
  return g;
}

bool VerifyReport::all_passed() const
{
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed || c.advisory; });
}

std::string VerifyReport::text() const
{
  std::string out;
  for (const auto& c : checks) {
    out += (c.passed ? "PASS " : c.advisory ? "DISCREPANCY " : "FAIL ") + c.name;
    if (!c.detail.empty())
      out += ": " + c.detail;
    out += '\n';
  }
  out += all_passed() ? "all checks passed\n" : "some checks failed\n";
  return out;
}

nlohmann::ordered_json VerifyReport::json() const
{
  nlohmann::ordered_json j;
  j["passed"] = all_passed();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks)
    j["checks"].push_back({{"name", c.name},
                                 {"passed", c.passed},
                                 {"advisory", c.advisory},
                                 {"detail", c.detail}});
  return j;
}

namespace {

std::string set_diff(const std::set<std::string>& want, const std::set<std::string>& got)
{
  std::string missing, extra;
  for (const auto& s : want)
    if (!got.contains(s))
      missing += (missing.empty() ? "" : " ") + s;
  for (const auto& s : got)
    if (!want.contains(s))
      extra += (extra.empty() ? "" : " ") + s;
  std::string out;
  if (!missing.empty())
    out += "missing {" + missing + "}";
  if (!extra.empty())
    out += std::string(out.empty() ? "" : "; ") + "unexpected {" + extra + "}";
  return out;
}

CheckResult digraph_check(const std::string& name, const char* pattern,
                          const std::set<std::string>& vertices, const std::set<std::string>& edges)
{
  const CoverDigraph g = cover_digraph(parse_pattern(pattern));
  std::set<std::string> got_vertices;
  for (int i = 0; i < g.size(); ++i)
    got_vertices.insert(g.vertex(i).label());
  const std::set<std::string> got_edges = edge_labels(g);
  std::string diff;
  if (auto d = set_diff(vertices, got_vertices); !d.empty())
    diff += "vertices: " + d;
  if (auto d = set_diff(edges, got_edges); !d.empty())
    diff += std::string(diff.empty() ? "" : "; ") + "edges: " + d;
  if (diff.empty())
    return {name, true, std::to_string(got_vertices.size()) + " vertices, " +
                            std::to_string(got_edges.size()) + " edges"};
  return {name, false, diff};
}

std::string brace(const std::set<int>& s)
{
  std::string out;
  for (int q : s)
    out += (out.empty() ? "" : ",") + std::to_string(q);
  return "{" + out + "}";
}

CheckResult periodicity_check(const std::string& name, const PeriodicityReport& r,
                              const std::set<int>& present, const std::set<int>& absent)
{
  const bool ok = r.present() == present && r.absent() == absent;
  std::string detail = "present " + brace(r.present()) + " absent " + brace(r.absent());
  if (!ok)
    detail += "; expected present " + brace(present) + " absent " + brace(absent);
  return {name, ok, detail};
}

}  // namespace

VerifyReport verify_paper(const PaperGoldens& goldens, unsigned jobs)
{
  VerifyReport v;
  const StarPattern ex1 = parse_pattern(kExample1);
  const StarPattern ex2 = parse_pattern(kExample2);

  v.checks.push_back(
      digraph_check("example1-digraph", kExample1, goldens.example1_vertices, goldens.example1_edges));
  {
    const auto r1 = periodicity_report(ex1);
    v.checks.push_back(periodicity_check("example1-periodicity", r1, {1, 2, 4, 5, 6, 7, 8, 9, 10}, {3}));
    v.checks.push_back({"example1-chaos", r1.chaos.has_value(),
                        r1.chaos ? "certified at t=" + std::to_string(r1.chaos->t) : "not found"});
    v.checks.push_back({"example1-theorem1-inapplicable", !r1.theorem1.has_value(),
                        r1.theorem1 ? "center theorem unexpectedly applies" : ""});
  }

  v.checks.push_back(
      digraph_check("example2-digraph", kExample2, goldens.example2_vertices, goldens.example2_edges));
  {
    std::string bad;
    for (const auto& w : closed_walk_lengths(cover_digraph(ex2), 9))
      if (w.length % 2 == 1 && !w.self_loop_only)
        bad += (bad.empty() ? "" : ",") + std::to_string(w.length);
    v.checks.push_back({"example2-odd-walks-self-loop-only", bad.empty(),
                        bad.empty() ? "lengths 1,3,5,7,9" : "mixed odd walks of length " + bad});
  }
  {
    const auto r2 = periodicity_report(ex2);
    std::set<int> absent{3, 5, 7, 9};
    v.checks.push_back(periodicity_check("example2-periodicity", r2, {1, 2, 4, 6, 8, 10}, absent));
    const bool ok = r2.chaos && r2.chaos->t == 2 && r2.chaos->u == 0 && r2.chaos->v == 2;
    std::string detail = "not found";
    if (r2.chaos)
      detail = "t=" + std::to_string(r2.chaos->t) + " u=" + std::to_string(r2.chaos->u) +
               " v=" + std::to_string(r2.chaos->v);
    v.checks.push_back({"example2-genscramble", ok, detail});
  }
  v.checks.push_back({"example2-successor-modulus", parse_pattern(kExample2).orbit_size() == 6,
                      "published text says j=i+1 mod 5 for a 6-point orbit; realized as mod 6"});

  {
    SurveyOptions o;
    o.jobs = jobs;
    const auto s = classify_all(3, 4, o);
    const bool ok = s.records.size() == 1 && s.records[0].theorem1 && s.records[0].present.size() == 10 &&
                    s.records[0].chaos_iterate == 1;
    v.checks.push_back({"n3-k4-full-periodicity", ok, std::to_string(s.records.size()) + " class(es)"});
  }

  {
    SurveyOptions o;
    o.filter = SurveyFilter::Theorem1Inapplicable;
    o.jobs = jobs;
    const auto s = classify_all(3, 6, o);
    const auto want = static_cast<std::uint64_t>(goldens.published_class_count);
    std::string counts = "raw " + std::to_string(s.counts.raw) + ", branch-permutation " +
                         std::to_string(s.counts.branch_permutation) + ", digraph-isomorphism " +
                         std::to_string(s.counts.digraph_isomorphism);
    std::string match = "none";
    if (s.counts.digraph_isomorphism == want)
      match = "digraph-isomorphism";
    else if (s.counts.branch_permutation == want)
      match = "branch-permutation";
    else if (s.counts.raw == want)
      match = "raw";
    v.checks.push_back({"n3-k6-class-count", match != "none",
                        counts + "; published " + std::to_string(want) + "; matching convention: " + match,
                        true});

    std::string bad_tail, bad_chaos;
    for (const auto& c : s.records) {
      if (c.tail.shape == TailShape::Other)
        bad_tail += (bad_tail.empty() ? "" : " | ") + to_string(c.pattern);
      if (!c.chaos_iterate || *c.chaos_iterate > 2)
        bad_chaos += (bad_chaos.empty() ? "" : " | ") + to_string(c.pattern);
    }
    v.checks.push_back({"n3-k6-tails", bad_tail.empty(),
                        bad_tail.empty() ? "every class cofinite or evens-plus-one" : "other: " + bad_tail});
    v.checks.push_back({"n3-k6-chaos-t-le-2", bad_chaos.empty(),
                        bad_chaos.empty() ? "every class certified at t<=2" : "uncertified: " + bad_chaos});
  }

  {
    std::string bad;
    bool some_absent3 = false;
    for (int n = 3; n <= 4; ++n) {
      SurveyOptions o;
      o.jobs = jobs;
      const auto s = classify_all(n, n + 2, o);
      for (const auto& c : s.records) {
        std::set<int> need;
        for (int q = 1; q <= s.options.max_period; ++q)
          if (q != 3)
            need.insert(q);
        const bool ok = std::includes(c.present.begin(), c.present.end(), need.begin(), need.end()) &&
                        c.chaos_iterate.has_value();
        if (!ok)
          bad += (bad.empty() ? "" : " | ") + to_string(c.pattern);
        some_absent3 = some_absent3 || c.absent.contains(3);
      }
    }
    v.checks.push_back({"nplus2-all-periods-but-3", bad.empty() && some_absent3,
                        !bad.empty() ? "violations: " + bad
                                     : (some_absent3 ? "holds; period 3 absent in some class"
                                                     : "no class lacks period 3")});
  }

  {
    std::set<long long> s;
    for (long long m = 1; m <= 100; ++m)
      if (sharkovskii_le(m, 4))
        s.insert(m);
    const bool ok = s == std::set<long long>{1, 2, 4};
    v.checks.push_back({"segment-4-forcing", ok, ok ? "{1,2,4}" : "unexpected forced set"});
  }
  return v;
}

}  // namespace stardyn
