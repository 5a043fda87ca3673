#include "stardyn/rational.hpp"
#include "stardyn/star_pattern.hpp"

#include <cctype>

namespace stardyn {

Rational parse_rational(const std::string& text)
{
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos)
      return Rational(BigInt(text));
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    if (den == 0)
      throw std::invalid_argument("zero denominator in \"" + text + "\"");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("malformed rational \"" + text + "\"");
  }
}

namespace {

class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  void skip_ws()
  {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }
  bool at_end()
  {
    skip_ws();
    return pos_ >= text_.size();
  }
  bool peek(char c)
  {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  void expect(char c)
  {
    if (!peek(c))
      fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  bool peek_digit()
  {
    skip_ws();
    return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
  }
  int integer()
  {
    if (!peek_digit())
      fail("expected integer");
    long long v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_++] - '0');
      if (v > 1'000'000)
        fail("integer too large");
    }
    return static_cast<int>(v);
  }
  [[noreturn]] void fail(const std::string& message) const { throw PatternError(message, pos_); }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

StarPattern parse_pattern(std::string_view text, ParseOptions options)
{
  Scanner in(text);
  in.expect('n');
  in.expect('=');
  const int n = in.integer();
  in.expect('k');
  in.expect('=');
  const int k = in.integer();
  in.expect(';');
  if (n < 1 || n > 64)
    in.fail("branch count out of range");

  std::vector<std::vector<int>> branches;
  while (!in.at_end()) {
    in.expect('b');
    const int label = in.integer();
    if (label != static_cast<int>(branches.size()) + 1)
      in.fail("expected branch label b" + std::to_string(branches.size() + 1));
    in.expect(':');
    branches.emplace_back();
    while (in.peek_digit())
      branches.back().push_back(in.integer());
    if (in.at_end())
      break;
    in.expect(';');
  }
  if (static_cast<int>(branches.size()) != n)
    in.fail("expected " + std::to_string(n) + " branches, found " +
            std::to_string(branches.size()));
  return StarPattern::from_branches(n, k, branches, options.require_all_branches);
}

std::string to_string(const StarPattern& p)
{
  std::string out = "n=" + std::to_string(p.branch_count()) + " k=" + std::to_string(p.orbit_size());
  for (int b = 0; b < p.branch_count(); ++b) {
    out += "; b" + std::to_string(b + 1) + ":";
    for (int idx : p.branches()[b])
      out += " " + std::to_string(idx);
  }
  return out;
}

std::vector<StarPattern> parse_pattern_lines(std::string_view text, ParseOptions options)
{
  std::vector<StarPattern> out;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos)
      end = text.size();
    auto line = text.substr(start, end - start);
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos && line[first] != '#') {
      try {
        out.push_back(parse_pattern(line, options));
      } catch (const PatternError& e) {
        throw PatternError({"line " + std::to_string(line_no) + ": " + e.what()});
      }
    }
    start = end + 1;
  }
  return out;
}

nlohmann::ordered_json to_json(const StarPattern& p)
{
  nlohmann::ordered_json j;
  j["n"] = p.branch_count();
  j["k"] = p.orbit_size();
  j["branches"] = p.branches();
  return j;
}

StarPattern pattern_from_json(const nlohmann::json& j, ParseOptions options)
{
  try {
    return StarPattern::from_branches(j.at("n").get<int>(), j.at("k").get<int>(),
                                      j.at("branches").get<std::vector<std::vector<int>>>(),
                                      options.require_all_branches);
  } catch (const nlohmann::json::exception& e) {
    throw PatternError({std::string("malformed pattern JSON: ") + e.what()});
  }
}

}  // namespace stardyn
