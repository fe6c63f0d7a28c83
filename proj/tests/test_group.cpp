#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "lacuna/errors.hpp"
#include "lacuna/group.hpp"
#include "lacuna/rng.hpp"

using namespace lacuna;

namespace {

std::size_t ball_size(int n, int r) {
  std::size_t total = 1, sphere = 2 * static_cast<std::size_t>(n);
  for (int k = 1; k <= r; ++k) {
    total += sphere;
    sphere *= 2 * static_cast<std::size_t>(n) - 1;
  }
  return total;
}

Element word(const GroupSpec& g, const std::string& s) { return parse_element(g, s); }

}  // namespace

TEST_CASE("group names parse and print") {
  CHECK(GroupSpec::parse("F3") == GroupSpec::free(3));
  CHECK(GroupSpec::parse("Z").name() == "Z");
  CHECK(GroupSpec::parse("N").name() == "N");
  CHECK_THROWS_AS(GroupSpec::parse("G7"), Error);
  CHECK_THROWS_AS(GroupSpec::parse("F0"), Error);
}

TEST_CASE("free reduction and inverses") {
  GroupSpec g = GroupSpec::free(2);
  Element a = word(g, "a1 a2"), b = word(g, "a2^-1 a1");
  CHECK(format_element(g, mul(g, a, b)) == "a1 a1");
  CHECK(is_identity(g, mul(g, a, inv(g, a))));
  CHECK(format_element(g, word(g, "a1 a1^-1 a2")) == "a2");
  CHECK(format_element(g, word(g, "a1^3")) == "a1 a1 a1");
  CHECK(format_element(g, identity(g)) == "e");
  CHECK(length(g, word(g, "a1 a2 a2")) == 3);
  CHECK_THROWS_AS(word(g, "a3"), Error);
  CHECK_THROWS_AS(word(g, "b1"), Error);
}

TEST_CASE("numeric groups") {
  GroupSpec z = GroupSpec::integers(), n = GroupSpec::naturals();
  CHECK(mul(z, Element::integer(3), Element::integer(-5)).value == -2);
  CHECK(inv(z, Element::integer(4)).value == -4);
  CHECK_THROWS_AS(inv(n, Element::integer(4)), Error);
  CHECK_THROWS_AS(parse_element(n, "-1"), Error);
  CHECK(compatible(z, n));
  CHECK_FALSE(compatible(z, GroupSpec::free(1)));
}

TEST_CASE("ball and sphere sizes match the tree count") {
  for (int n = 1; n <= 4; ++n)
    for (int r = 0; r <= 4; ++r) {
      GroupSpec g = GroupSpec::free(n);
      CHECK(ball(g, r).size() == ball_size(n, r));
      if (r >= 1) CHECK(sphere(g, r).size() == ball_size(n, r) - ball_size(n, r - 1));
    }
  CHECK_THROWS_AS(ball(GroupSpec::integers(), 3), Error);
  CHECK(interval(GroupSpec::integers(), -3, 3).size() == 7);
  CHECK(interval(GroupSpec::naturals(), 0, 16).size() == 17);
}

TEST_CASE("ball enumeration is in canonical order without duplicates") {
  GroupSpec g = GroupSpec::free(2);
  FiniteSet b = ball(g, 3);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(seen.insert(format_element(g, b[i])).second);
    if (i > 0) CHECK(canonical_compare(g, b[i - 1], b[i]) == std::strong_ordering::less);
  }
  CHECK(format_element(g, b[1]) == "a1");
  CHECK(format_element(g, b[2]) == "a1^-1");
  CHECK(format_element(g, b[3]) == "a2");
}

TEST_CASE("enumeration guard") {
  Limits tight;
  tight.max_elements = 100;
  CHECK_THROWS_AS(ball(GroupSpec::free(3), 4, tight), Error);
  try {
    ball(GroupSpec::free(3), 4, tight);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LimitExceeded);
  }
}

TEST_CASE("finite sets reject duplicates and foreign elements") {
  GroupSpec g = GroupSpec::free(2);
  CHECK_THROWS_AS(FiniteSet(g, {word(g, "a1"), word(g, "a1")}), Error);
  CHECK_THROWS_AS(FiniteSet(g, {Element{{3}, 0}}), Error);
  FiniteSet s(g, {word(g, "a2"), word(g, "a1")});
  CHECK(s.find(word(g, "a1")) == 1);
  CHECK(format_element(g, s.sorted()[0]) == "a1");
}

TEST_CASE("freeness of generators and a non-free set") {
  GroupSpec g = GroupSpec::free(3);
  CHECK(is_free_set(generators(g), 4).holds);
  FiniteSet bad(g, {word(g, "a1"), word(g, "a1 a1")});
  FreenessResult r = is_free_set(bad, 3);
  REQUIRE_FALSE(r.holds);
  Element prod = identity(g);
  for (const auto& f : r.witness) prod = mul(g, prod, f.exponent < 0 ? inv(g, bad[f.index]) : bad[f.index]);
  CHECK(is_identity(g, prod));
  // x^2 y^-1 = e
  FiniteSet comm(g, {word(g, "a1 a2"), word(g, "a1 a2 a1 a2")});
  CHECK_FALSE(is_free_set(comm, 4).holds);
}

TEST_CASE("Leinert check") {
  GroupSpec g = GroupSpec::free(2);
  CHECK(leinert_check(FiniteSet(g, {identity(g), word(g, "a1"), word(g, "a2")}), 3).holds);
  // In Z: x1^-1 x2 x3^-1 x4 = -1 + 2 - 3 + 2 = 0 for {1, 2, 3}.
  FiniteSet z(GroupSpec::integers(), {Element::integer(1), Element::integer(2), Element::integer(3)});
  LeinertResult r = leinert_check(z, 2);
  REQUIRE_FALSE(r.holds);
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < r.witness.size(); ++i) sum += (i % 2 == 0 ? -1 : 1) * z[r.witness[i]].value;
  CHECK(sum == 0);
  for (std::size_t i = 1; i < r.witness.size(); ++i) CHECK(r.witness[i] != r.witness[i - 1]);
  // x2 + x4 = x1 + x3 forces {x2, x4} = {x1, x3} for distinct powers of two.
  FiniteSet p(GroupSpec::naturals(), {Element::integer(1), Element::integer(2), Element::integer(4), Element::integer(8)});
  CHECK(leinert_check(p, 2).holds);
}

TEST_CASE("a set free to depth 2m passes Leinert to depth m") {
  GroupSpec g = GroupSpec::free(2);
  FiniteSet pool = ball(g, 2);
  Rng rng(11);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Element> el;
    std::set<std::size_t> picks;
    while (picks.size() < 3) picks.insert(static_cast<std::size_t>(rng.below(pool.size())));
    for (auto i : picks) el.push_back(pool[i]);
    FiniteSet s(g, el);
    if (is_free_set(s, 4).holds) {
      CHECK(leinert_check(s, 2).holds);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

namespace {

// Independent oracle: evaluate every formal word of length <= m over S^{+-1}
// with no symbol followed by its own inverse.
bool free_by_enumeration(const FiniteSet& s, int m) {
  const GroupSpec& g = s.group();
  struct Node {
    Element value;
    int last;  // signed 1-based symbol
  };
  std::vector<Node> layer{{identity(g), 0}};
  for (int len = 1; len <= m; ++len) {
    std::vector<Node> next;
    for (const auto& n : layer)
      for (std::size_t i = 0; i < s.size(); ++i)
        for (int sg : {1, -1}) {
          int sym = sg * static_cast<int>(i + 1);
          if (sym == -n.last) continue;
          Element v = mul(g, n.value, sg > 0 ? s[i] : inv(g, s[i]));
          if (is_identity(g, v)) return false;
          next.push_back({v, sym});
        }
    layer = std::move(next);
  }
  return true;
}

bool leinert_by_enumeration(const FiniteSet& s, int m) {
  GroupSpec g = s.group().is_numeric() ? GroupSpec::integers() : s.group();
  const std::size_t n = s.size();
  for (int k = 2; k <= m; ++k) {
    std::vector<std::size_t> idx(2 * static_cast<std::size_t>(k), 0);
    while (true) {
      bool ok = true;
      for (std::size_t i = 1; i < idx.size(); ++i) ok = ok && idx[i] != idx[i - 1];
      if (ok) {
        Element v = identity(g);
        for (std::size_t i = 0; i < idx.size(); ++i) v = mul(g, v, i % 2 == 0 ? inv(g, s[idx[i]]) : s[idx[i]]);
        if (is_identity(g, v)) return false;
      }
      std::size_t p = 0;
      while (p < idx.size() && ++idx[p] == n) idx[p++] = 0;
      if (p == idx.size()) break;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("reduction examples") {
  GroupSpec g = GroupSpec::free(2);
  CHECK(format_element(g, reduce(g, std::vector<Letter>{1, 2, -2, 1})) == "a1 a1");
  CHECK(is_identity(g, reduce(g, std::vector<Letter>{})));
  CHECK(format_element(g, inv(g, word(g, "a1 a2"))) == "a2^-1 a1^-1");
  CHECK(format_element(g, mul(g, word(g, "a1 a2"), word(g, "a2^-1 a1"))) == "a1 a1");
  CHECK(mul(GroupSpec::naturals(), Element::integer(3), Element::integer(5)).value == 8);
  CHECK_THROWS_AS(reduce(g, std::vector<Letter>{3}), Error);
}

TEST_CASE("group laws on random words") {
  GroupSpec g = GroupSpec::free(3);
  FiniteSet pool = ball(g, 3);
  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    const Element& a = pool[rng.below(pool.size())];
    const Element& b = pool[rng.below(pool.size())];
    const Element& c = pool[rng.below(pool.size())];
    CHECK(mul(g, mul(g, a, b), c) == mul(g, a, mul(g, b, c)));
    CHECK(inv(g, mul(g, a, b)) == mul(g, inv(g, b), inv(g, a)));
    CHECK(length(g, mul(g, a, b)) <= length(g, a) + length(g, b));
    CHECK(reduce(g, a.word) == a);
  }
}

TEST_CASE("ball nesting and spheres") {
  GroupSpec g = GroupSpec::free(2);
  FiniteSet b2 = ball(g, 2), b3 = ball(g, 3), s3 = sphere(g, 3);
  for (const auto& x : b2.elements()) CHECK(b3.contains(x));
  for (const auto& x : s3.elements()) CHECK_FALSE(b2.contains(x));
  CHECK(b2.size() + s3.size() == b3.size());
  CHECK(ball(g, 0).size() == 1);
  CHECK(b2.size() == 17);
  CHECK(sphere(g, 2).size() == 12);
}

TEST_CASE("freeness agrees with exhaustive word evaluation") {
  GroupSpec g = GroupSpec::free(2);
  std::vector<FiniteSet> sets = {
      FiniteSet(g, {word(g, "a1"), word(g, "a2")}),
      FiniteSet(g, {word(g, "a1"), word(g, "a1 a1")}),
      FiniteSet(g, {word(g, "a1 a2"), word(g, "a2 a1")}),
      FiniteSet(g, {word(g, "a1"), word(g, "a2"), word(g, "a1 a2")}),
      FiniteSet(g, {word(g, "a1 a2 a1^-1"), word(g, "a2")}),
  };
  for (const auto& s : sets)
    for (int m = 1; m <= 5; ++m) CHECK(is_free_set(s, m).holds == free_by_enumeration(s, m));
  CHECK(is_free_set(sets[0], 6).holds);
  FreenessResult r = is_free_set(sets[1], 4);
  CHECK_FALSE(r.holds);
  CHECK(r.witness.size() == 3);
}

TEST_CASE("Leinert agrees with exhaustive tuple scan") {
  GroupSpec g = GroupSpec::free(2);
  GroupSpec z = GroupSpec::integers();
  std::vector<FiniteSet> sets = {
      FiniteSet(g, {word(g, "a1"), word(g, "a2")}),
      FiniteSet(g, {word(g, "a1"), word(g, "a2"), word(g, "a1 a2")}),
      FiniteSet(z, {Element::integer(0), Element::integer(1), Element::integer(3)}),
      FiniteSet(z, {Element::integer(1), Element::integer(2), Element::integer(3)}),
      FiniteSet(GroupSpec::naturals(), {Element::integer(1), Element::integer(2), Element::integer(4)}),
  };
  for (const auto& s : sets)
    for (int m = 2; m <= 3; ++m) CHECK(leinert_check(s, m).holds == leinert_by_enumeration(s, m));
}
