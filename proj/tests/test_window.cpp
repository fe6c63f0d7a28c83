#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "lacuna/errors.hpp"
#include "lacuna/experiments.hpp"
#include "lacuna/serialize.hpp"
#include "lacuna/window.hpp"

using namespace lacuna;

namespace {

std::set<std::pair<std::string, std::string>> pairs(const Window& w) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& e : w.entries)
    out.insert({format_element(w.rows.group(), w.rows[e.row]), format_element(w.cols.group(), w.cols[e.col])});
  return out;
}

FiniteSet ints(GroupSpec g, std::initializer_list<std::int64_t> v) {
  std::vector<Element> el;
  for (auto x : v) el.push_back(Element::integer(x));
  return FiniteSet(g, el);
}

}  // namespace

TEST_CASE("indicator of two generators on ball(1)") {
  GroupSpec g = GroupSpec::free(2);
  FiniteSet b = ball(g, 1);
  Window w = relation_window(generators(g), b, b);
  std::set<std::pair<std::string, std::string>> want = {{"e", "a1"}, {"a1", "e"}, {"e", "a2"}, {"a2", "e"}};
  CHECK(pairs(w) == want);
  CHECK(w.is_01());
}

TEST_CASE("difference map on an interval gives the diagonal") {
  GroupSpec z = GroupSpec::integers();
  FiniteSet iv = interval(z, 0, 4);
  Window w = build_window(WeightFunction::indicator(ints(z, {0}), "delta"), ProductKind::inv_right(), iv, iv);
  REQUIRE(w.entries.size() == 5);
  for (const auto& e : w.entries) CHECK(e.row == e.col);
}

TEST_CASE("empty weight gives an empty window") {
  GroupSpec g = GroupSpec::free(2);
  FiniteSet b = ball(g, 2);
  CHECK(relation_window(FiniteSet(g, {}), b, b).entries.empty());
}

TEST_CASE("entries match brute force over all pairs") {
  GroupSpec g = GroupSpec::free(2);
  FiniteSet b = ball(g, 2), lam = sphere(g, 2);
  for (ProductKind p : {ProductKind::product(), ProductKind::inv_right(), ProductKind::inv_left()}) {
    WeightFunction phi = WeightFunction::indicator(lam, "sphere");
    Window w = build_window(phi, p, b, b);
    std::size_t count = 0;
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) {
        Element x = p.tag == ProductTag::Product          ? mul(g, b[i], b[j])
                    : p.tag == ProductTag::ProductInvRight ? mul(g, b[i], inv(g, b[j]))
                                                           : mul(g, inv(g, b[i]), b[j]);
        if (lam.contains(x)) ++count;
      }
    CHECK(w.entries.size() == count);
  }
}

TEST_CASE("additive window over N and Z") {
  GroupSpec n = GroupSpec::naturals(), z = GroupSpec::integers();
  FiniteSet lam = ints(n, {1, 2, 4, 8, 16, 32, 64});
  FiniteSet rows = interval(n, 0, 63), cols = interval(z, -63, 63);
  Window w = relation_window(lam, rows, cols);
  std::size_t count = 0;
  for (std::int64_t s = 0; s <= 63; ++s)
    for (std::int64_t t = -63; t <= 63; ++t)
      for (std::int64_t k = 1; k <= 64; k *= 2) count += (s + t == k);
  CHECK(w.entries.size() == count);
}

TEST_CASE("Paley windows") {
  GroupSpec n = GroupSpec::naturals();
  Window w = paley_window(ints(n, {1}), 0, 3);
  std::set<std::pair<std::string, std::string>> want = {{"0", "1"}, {"1", "0"}};
  CHECK(pairs(w) == want);
  Window p = paley_window(ints(n, {1, 2, 4, 8, 16, 32}), 0, 31);
  std::size_t count = 0;
  for (int s = 0; s < 32; ++s)
    for (int t = 0; t < 32; ++t)
      for (int k = 1; k <= 32; k *= 2) count += (s + t == k);
  CHECK(p.entries.size() == count);
  CHECK(paley_window(FiniteSet(n, {}), 0, 7).entries.empty());
}

TEST_CASE("fiber bounds") {
  GroupSpec g = GroupSpec::free(2);
  FiniteSet b = ball(g, 2);
  FiberBounds fb = fiber_bound_check(ProductKind::product(), b, b);
  CHECK(fb.row_direction == 1);
  CHECK(fb.col_direction == 1);
  GroupSpec n = GroupSpec::naturals();
  FiniteSet iv = interval(n, 0, 9);
  fb = fiber_bound_check(ProductKind::product(), iv, iv);
  CHECK(fb.row_direction == 1);
  CHECK(fb.col_direction == 1);

  GroupSpec z = GroupSpec::integers();
  FiniteSet three = interval(z, 0, 2);
  CustomTable t;
  t.group = z;
  for (int s = 0; s < 3; ++s) t.values.push_back({Element::integer(s), Element::integer(s), Element::integer(s)});
  fb = fiber_bound_check(ProductKind::custom(t), three, three);
  CHECK(fb.row_direction == 3);
  CHECK(fb.col_direction == 1);
  // p(s, t) = s violates the default cap of 1.
  try {
    build_window(WeightFunction::indicator(ints(z, {1}), "delta"), ProductKind::custom(t), three, three);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidInput);
    CHECK(e.detail().at("fiber_size") == 3);
  }
  t.fiber_cap = 3;
  Window w = build_window(WeightFunction::indicator(ints(z, {1}), "delta"), ProductKind::custom(t), three, three);
  CHECK(w.entries.size() == 3);
  CustomTable incomplete = t;
  incomplete.values.pop_back();
  CHECK_THROWS_AS(build_window(WeightFunction::indicator(ints(z, {1}), "delta"), ProductKind::custom(incomplete), three, three), Error);
}

TEST_CASE("inverse-right window is the product window with inverted columns") {
  GroupSpec g = GroupSpec::free(2);
  FiniteSet rows = ball(g, 2), cols = ball(g, 2);
  std::vector<Element> inv_cols;
  for (const auto& t : cols.elements()) inv_cols.push_back(inv(g, t));
  FiniteSet cols_inv(g, inv_cols);
  WeightFunction phi = WeightFunction::indicator(sphere(g, 2), "sphere");
  Window a = build_window(phi, ProductKind::inv_right(), rows, cols);
  Window b = build_window(phi, ProductKind::product(), rows, cols_inv);
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t k = 0; k < a.entries.size(); ++k) {
    CHECK(a.entries[k].row == b.entries[k].row);
    CHECK(a.entries[k].col == b.entries[k].col);
  }
}

TEST_CASE("relation windows have unit weights and bounded row degree") {
  GroupSpec g = GroupSpec::free(2);
  FiniteSet lam = sphere(g, 2), b = ball(g, 3);
  Window w = relation_window(lam, b, b);
  std::vector<std::size_t> deg(b.size(), 0);
  for (const auto& e : w.entries) {
    CHECK(e.weight == cplx(1.0, 0.0));
    ++deg[e.row];
  }
  for (auto d : deg) CHECK(d <= lam.size());
}

TEST_CASE("restricting the domain restricts the entries") {
  GroupSpec g = GroupSpec::free(2);
  FiniteSet lam = sphere(g, 2);
  Window big = relation_window(lam, ball(g, 3), ball(g, 3));
  Window small = relation_window(lam, ball(g, 2), ball(g, 2));
  auto pb = pairs(big);
  for (const auto& p : pairs(small)) CHECK(pb.count(p) == 1);
}

TEST_CASE("window validation") {
  GroupSpec z = GroupSpec::integers();
  FiniteSet r = interval(z, 0, 1);
  CHECK_THROWS_AS(make_window(r, r, {{0, 2, 1.0}}, {}), Error);
  CHECK_THROWS_AS(make_window(r, r, {{0, 0, 1.0}, {0, 0, 2.0}}, {}), Error);
  CHECK_THROWS_AS(make_window(r, r, {{0, 0, 0.0}}, {}), Error);
  Window w = make_window(r, r, {{1, 1, 2.0}, {0, 1, 1.0}}, {});
  CHECK(w.entries[0].row == 0);
  CHECK_FALSE(w.is_01());
}

TEST_CASE("window JSON round trip and id") {
  GroupSpec g = GroupSpec::free(2);
  Window w = build_window(WeightFunction::indicator(generators(g), "gens").scaled(cplx(0.5, -2)), ProductKind::product(),
                          ball(g, 2), ball(g, 2));
  json j = window_to_json(w);
  Window back = window_from_json(j);
  CHECK(window_id(back) == j.at("id").get<std::string>());
  CHECK(dump_json(window_to_json(back)) == dump_json(j));
  CHECK(j.at("id").get<std::string>().rfind("sha256:", 0) == 0);
}
