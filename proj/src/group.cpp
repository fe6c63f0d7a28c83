#include "lacuna/group.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "lacuna/errors.hpp"

namespace lacuna {
namespace {

int letter_key(Letter l) { return 2 * (std::abs(l) - 1) + (l < 0 ? 1 : 0); }

void require_free(const GroupSpec& g, const char* op) {
  if (!g.is_free()) fail(ErrorCode::Unsupported, std::string(op) + " requires a free group");
}

void push_reduced(std::vector<Letter>& w, Letter l) {
  if (!w.empty() && w.back() == -l)
    w.pop_back();
  else
    w.push_back(l);
}

long double ball_size(int n, int radius) {
  if (n == 1) return 2.0L * radius + 1.0L;
  long double q = 2.0L * n - 1.0L;
  return 1.0L + 2.0L * n * (std::pow(q, static_cast<long double>(radius)) - 1.0L) / (q - 1.0L);
}

}  // namespace

GroupSpec GroupSpec::free(int n) {
  if (n < 1) fail(ErrorCode::InvalidInput, "free group rank must be >= 1", {{"rank", n}});
  return {GroupKind::Free, n};
}

GroupSpec GroupSpec::parse(const std::string& name) {
  if (name == "Z") return integers();
  if (name == "N") return naturals();
  if (name.size() >= 2 && name[0] == 'F') {
    char* end = nullptr;
    long n = std::strtol(name.c_str() + 1, &end, 10);
    if (end && *end == '\0' && n >= 1 && n <= 1000) return free(static_cast<int>(n));
  }
  fail(ErrorCode::InvalidInput, "unknown group '" + name + "'", {{"expected", "F<n>, Z or N"}});
}

std::string GroupSpec::name() const {
  switch (kind) {
    case GroupKind::Free: return "F" + std::to_string(rank);
    case GroupKind::Integer: return "Z";
    case GroupKind::Natural: return "N";
  }
  return "?";
}

bool compatible(const GroupSpec& a, const GroupSpec& b) {
  if (a.is_free() || b.is_free()) return a == b;
  return true;
}

std::size_t ElementHash::operator()(const Element& e) const noexcept {
  std::size_t h = std::hash<std::int64_t>{}(e.value);
  for (Letter l : e.word) h = h * 1000003u ^ static_cast<std::size_t>(l + 4096);
  return h;
}

Element identity(const GroupSpec&) { return {}; }

Element generator(const GroupSpec& g, int index) {
  require_free(g, "generator");
  if (index < 1 || index > g.rank)
    fail(ErrorCode::InvalidInput, "generator index out of range", {{"index", index}, {"rank", g.rank}});
  return {{index}, 0};
}

Element reduce(const GroupSpec& g, std::span<const Letter> letters) {
  require_free(g, "reduce");
  Element out;
  for (Letter l : letters) {
    if (l == 0 || std::abs(l) > g.rank)
      fail(ErrorCode::InvalidInput, "generator index out of range", {{"letter", l}, {"rank", g.rank}});
    push_reduced(out.word, l);
  }
  return out;
}

Element mul(const GroupSpec& g, const Element& a, const Element& b) {
  if (g.is_numeric()) return Element::integer(a.value + b.value);
  Element out = a;
  for (Letter l : b.word) push_reduced(out.word, l);
  return out;
}

Element inv(const GroupSpec& g, const Element& a) {
  switch (g.kind) {
    case GroupKind::Natural:
      fail(ErrorCode::Unsupported, "inversion is not defined in N; embed the set in Z first");
    case GroupKind::Integer:
      return Element::integer(-a.value);
    case GroupKind::Free: {
      Element out;
      out.word.reserve(a.word.size());
      for (auto it = a.word.rbegin(); it != a.word.rend(); ++it) out.word.push_back(-*it);
      return out;
    }
  }
  return {};
}

std::size_t length(const GroupSpec& g, const Element& a) {
  if (g.is_numeric()) return static_cast<std::size_t>(a.value < 0 ? -a.value : a.value);
  return a.word.size();
}

bool is_identity(const GroupSpec& g, const Element& a) {
  return g.is_numeric() ? a.value == 0 : a.word.empty();
}

bool is_valid(const GroupSpec& g, const Element& a) {
  if (g.is_numeric()) return a.word.empty() && (g.kind == GroupKind::Integer || a.value >= 0);
  if (a.value != 0) return false;
  for (std::size_t i = 0; i < a.word.size(); ++i) {
    Letter l = a.word[i];
    if (l == 0 || std::abs(l) > g.rank) return false;
    if (i > 0 && a.word[i - 1] == -l) return false;
  }
  return true;
}

std::strong_ordering canonical_compare(const GroupSpec& g, const Element& a, const Element& b) {
  if (g.is_numeric()) return a.value <=> b.value;
  if (auto c = a.word.size() <=> b.word.size(); c != 0) return c;
  for (std::size_t i = 0; i < a.word.size(); ++i)
    if (auto c = letter_key(a.word[i]) <=> letter_key(b.word[i]); c != 0) return c;
  return std::strong_ordering::equal;
}

std::string format_element(const GroupSpec& g, const Element& a) {
  if (g.is_numeric()) return std::to_string(a.value);
  if (a.word.empty()) return "e";
  std::string s;
  for (std::size_t i = 0; i < a.word.size(); ++i) {
    if (i) s += ' ';
    s += 'a';
    s += std::to_string(std::abs(a.word[i]));
    if (a.word[i] < 0) s += "^-1";
  }
  return s;
}

Element parse_element(const GroupSpec& g, const std::string& text) {
  if (g.is_numeric()) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(text, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != text.size())
      fail(ErrorCode::InvalidInput, "malformed integer element '" + text + "'");
    Element e = Element::integer(v);
    if (!is_valid(g, e)) fail(ErrorCode::InvalidInput, "element '" + text + "' is not in " + g.name());
    return e;
  }
  std::istringstream in(text);
  std::string tok;
  std::vector<Letter> letters;
  bool saw_identity = false;
  while (in >> tok) {
    if (tok == "e") {
      saw_identity = true;
      continue;
    }
    if (tok.size() < 2 || tok[0] != 'a')
      fail(ErrorCode::InvalidInput, "malformed letter '" + tok + "' in '" + text + "'");
    std::size_t caret = tok.find('^');
    std::string idx = tok.substr(1, caret == std::string::npos ? std::string::npos : caret - 1);
    long exponent = 1;
    char* end = nullptr;
    long index = std::strtol(idx.c_str(), &end, 10);
    if (idx.empty() || *end != '\0')
      fail(ErrorCode::InvalidInput, "malformed letter '" + tok + "' in '" + text + "'");
    if (caret != std::string::npos) {
      std::string ex = tok.substr(caret + 1);
      exponent = std::strtol(ex.c_str(), &end, 10);
      if (ex.empty() || *end != '\0' || exponent == 0 || std::labs(exponent) > 1'000'000)
        fail(ErrorCode::InvalidInput, "malformed exponent in '" + tok + "'");
    }
    if (index < 1 || index > g.rank)
      fail(ErrorCode::InvalidInput, "generator index out of range", {{"letter", tok}, {"rank", g.rank}});
    Letter l = static_cast<Letter>(exponent > 0 ? index : -index);
    for (long k = 0; k < std::labs(exponent); ++k) letters.push_back(l);
  }
  if (letters.empty() && !saw_identity) fail(ErrorCode::InvalidInput, "empty element string");
  return reduce(g, letters);
}

FiniteSet::FiniteSet(GroupSpec group, std::vector<Element> elements)
    : group_(group), elements_(std::move(elements)) {
  index_.reserve(elements_.size());
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const Element& e = elements_[i];
    if (!is_valid(group_, e))
      fail(ErrorCode::InvalidInput, "element not valid in " + group_.name(),
           {{"element", format_element(group_, e)}});
    if (!index_.emplace(e, i).second)
      fail(ErrorCode::InvalidInput, "duplicate element in set", {{"element", format_element(group_, e)}});
  }
}

std::ptrdiff_t FiniteSet::find(const Element& e) const {
  auto it = index_.find(e);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

FiniteSet FiniteSet::sorted() const {
  std::vector<Element> v = elements_;
  std::sort(v.begin(), v.end(),
            [&](const Element& a, const Element& b) { return canonical_compare(group_, a, b) < 0; });
  return FiniteSet(group_, std::move(v));
}

FiniteSet FiniteSet::with_group(GroupSpec g) const {
  if (!compatible(group_, g))
    fail(ErrorCode::InvalidInput, "cannot move a set from " + group_.name() + " to " + g.name());
  return FiniteSet(g, elements_);
}

FiniteSet ball(const GroupSpec& g, int radius, const Limits& limits) {
  require_free(g, "ball");
  if (radius < 0) fail(ErrorCode::InvalidInput, "radius must be >= 0", {{"radius", radius}});
  long double predicted = ball_size(g.rank, radius);
  if (predicted > static_cast<long double>(limits.max_elements))
    fail(ErrorCode::LimitExceeded, "ball exceeds the element cap",
         {{"radius", radius}, {"predicted", static_cast<double>(predicted)}, {"cap", limits.max_elements}});
  std::vector<Element> out;
  out.reserve(static_cast<std::size_t>(predicted));
  out.push_back({});
  std::size_t layer_begin = 0;
  for (int r = 1; r <= radius; ++r) {
    std::size_t layer_end = out.size();
    for (std::size_t i = layer_begin; i < layer_end; ++i) {
      for (int key = 0; key < 2 * g.rank; ++key) {
        Letter l = (key % 2 == 0) ? key / 2 + 1 : -(key / 2 + 1);
        const auto& w = out[i].word;
        if (!w.empty() && w.back() == -l) continue;
        Element e = out[i];
        e.word.push_back(l);
        out.push_back(std::move(e));
      }
    }
    layer_begin = layer_end;
  }
  return FiniteSet(g, std::move(out));
}

FiniteSet sphere(const GroupSpec& g, int k, const Limits& limits) {
  FiniteSet b = ball(g, k, limits);
  std::vector<Element> out;
  for (const Element& e : b.elements())
    if (static_cast<int>(e.word.size()) == k) out.push_back(e);
  return FiniteSet(g, std::move(out));
}

FiniteSet interval(const GroupSpec& g, std::int64_t lo, std::int64_t hi, const Limits& limits) {
  if (!g.is_numeric()) fail(ErrorCode::Unsupported, "intervals are defined in Z and N only");
  if (hi < lo) return FiniteSet(g, {});
  if (static_cast<std::uint64_t>(hi - lo) + 1 > limits.max_elements)
    fail(ErrorCode::LimitExceeded, "interval exceeds the element cap", {{"lo", lo}, {"hi", hi}});
  std::vector<Element> out;
  for (std::int64_t v = lo; v <= hi; ++v) out.push_back(Element::integer(v));
  return FiniteSet(g, std::move(out));
}

FiniteSet generators(const GroupSpec& g) {
  require_free(g, "generators");
  std::vector<Element> out;
  for (int i = 1; i <= g.rank; ++i) out.push_back(generator(g, i));
  return FiniteSet(g, std::move(out));
}

namespace {

struct FreeSearch {
  const FiniteSet& s;
  const Limits& limits;
  std::vector<Element> inverses;
  std::vector<Factor> path;
  std::uint64_t examined = 0;

  bool dfs(const Element& product, int remaining) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (int ex : {1, -1}) {
        if (!path.empty() && path.back().index == i && path.back().exponent == -ex) continue;
        Element next = mul(s.group(), product, ex > 0 ? s[i] : inverses[i]);
        path.push_back({i, ex});
        if (remaining == 1) {
          if (++examined > limits.max_tuples)
            fail(ErrorCode::LimitExceeded, "freeness search exceeds the product cap",
                 {{"cap", limits.max_tuples}});
          if (next.word.empty()) return true;
        } else if (dfs(next, remaining - 1)) {
          return true;
        }
        path.pop_back();
      }
    }
    return false;
  }
};

}  // namespace

FreenessResult is_free_set(const FiniteSet& s, int depth, const Limits& limits) {
  require_free(s.group(), "is_free_set");
  if (depth < 1) fail(ErrorCode::InvalidInput, "depth must be >= 1", {{"depth", depth}});
  FreeSearch search{s, limits, {}, {}, 0};
  for (const Element& e : s.elements()) search.inverses.push_back(inv(s.group(), e));
  FreenessResult r;
  r.depth = depth;
  for (int k = 1; k <= depth && !s.empty(); ++k) {
    search.path.clear();
    if (search.dfs(identity(s.group()), k)) {
      r.holds = false;
      r.witness = search.path;
      break;
    }
  }
  r.examined = search.examined;
  return r;
}

namespace {

struct LeinertSearch {
  const FiniteSet& s;
  const Limits& limits;
  GroupSpec arith;
  std::vector<Element> inverses;
  std::vector<std::size_t> path;
  std::uint64_t examined = 0;

  bool dfs(const Element& product, std::size_t target) {
    std::size_t pos = path.size();  // 0-based; even positions enter inverted
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (pos > 0 && path.back() == i) continue;
      Element next = mul(arith, product, pos % 2 == 0 ? inverses[i] : s[i]);
      path.push_back(i);
      if (pos + 1 == target) {
        if (++examined > limits.max_tuples)
          fail(ErrorCode::LimitExceeded, "Leinert search exceeds the tuple cap", {{"cap", limits.max_tuples}});
        if (is_identity(arith, next)) return true;
      } else if (dfs(next, target)) {
        return true;
      }
      path.pop_back();
    }
    return false;
  }
};

}  // namespace

LeinertResult leinert_check(const FiniteSet& s, int depth, const Limits& limits) {
  if (depth < 1) fail(ErrorCode::InvalidInput, "depth must be >= 1", {{"depth", depth}});
  // Sets in N are checked inside Z.
  GroupSpec arith = s.group().is_numeric() ? GroupSpec::integers() : s.group();
  LeinertSearch search{s, limits, arith, {}, {}, 0};
  for (const Element& e : s.elements()) search.inverses.push_back(inv(arith, e));
  LeinertResult r;
  r.depth = depth;
  for (int k = 2; k <= depth && s.size() >= 2; ++k) {
    search.path.clear();
    if (search.dfs(identity(arith), static_cast<std::size_t>(2 * k))) {
      r.holds = false;
      r.witness = search.path;
      break;
    }
  }
  r.examined = search.examined;
  return r;
}

}  // namespace lacuna
