#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lacuna/errors.hpp"
#include "lacuna/partition.hpp"
#include "lacuna/rng.hpp"
#include "lacuna/serialize.hpp"

using namespace lacuna;

namespace {

Window random_window(Rng& rng, int max_side, std::size_t max_entries, bool binary) {
  Eigen::Index s = 1 + static_cast<Eigen::Index>(rng.below(max_side));
  Eigen::Index t = 1 + static_cast<Eigen::Index>(rng.below(max_side));
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(s, t);
  std::size_t want = std::min<std::size_t>(max_entries, 1 + rng.below(static_cast<std::uint64_t>(s * t)));
  std::size_t placed = 0;
  while (placed < want) {
    Eigen::Index i = static_cast<Eigen::Index>(rng.below(s)), j = static_cast<Eigen::Index>(rng.below(t));
    if (m(i, j) != cplx(0)) continue;
    m(i, j) = binary ? cplx(1) : cplx(rng.normal(), rng.normal());
    ++placed;
  }
  return window_from_dense(m);
}

// Exhaustive minimum of max(C1, C2) and of the integer count.
std::pair<double, std::int64_t> brute_partition(const Window& w) {
  std::size_t n = w.entries.size();
  double best = INFINITY;
  std::int64_t best_count = INT64_MAX;
  std::vector<std::uint8_t> a(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<double> row(w.num_rows(), 0), col(w.num_cols(), 0);
    std::vector<std::int64_t> rc(w.num_rows(), 0), cc(w.num_cols(), 0);
    for (std::size_t k = 0; k < n; ++k) {
      const auto& e = w.entries[k];
      if (mask >> k & 1) {
        row[e.row] += std::norm(e.weight);
        ++rc[e.row];
      } else {
        col[e.col] += std::norm(e.weight);
        ++cc[e.col];
      }
    }
    double v = std::sqrt(std::max(*std::max_element(row.begin(), row.end()), *std::max_element(col.begin(), col.end())));
    std::int64_t c = std::max(*std::max_element(rc.begin(), rc.end()), *std::max_element(cc.begin(), cc.end()));
    best = std::min(best, v);
    best_count = std::min(best_count, c);
  }
  return {best, best_count};
}

// Grid search over theta in {0, 1/g, ..., 1} per entry.
double grid_split(const Window& w, int g) {
  std::size_t n = w.entries.size();
  std::vector<int> th(n, 0);
  double best = INFINITY;
  while (true) {
    std::vector<double> row(w.num_rows(), 0), col(w.num_cols(), 0);
    for (std::size_t k = 0; k < n; ++k) {
      double x = static_cast<double>(th[k]) / g, a = std::norm(w.entries[k].weight);
      row[w.entries[k].row] += x * x * a;
      col[w.entries[k].col] += (1 - x) * (1 - x) * a;
    }
    best = std::min(best, std::sqrt(std::max(*std::max_element(row.begin(), row.end()),
                                             *std::max_element(col.begin(), col.end()))));
    std::size_t p = 0;
    while (p < n && ++th[p] > g) th[p++] = 0;
    if (p == n) break;
  }
  return best;
}

}  // namespace

TEST_CASE("0/1 partition examples") {
  PartitionCertificate id = min_partition_01(window_from_dense(Eigen::MatrixXcd::Identity(5, 5)));
  CHECK(*id.count == 1);
  CHECK(id.c == doctest::Approx(1.0));
  PartitionCertificate full = min_partition_01(window_from_dense(Eigen::MatrixXcd::Ones(4, 4)));
  CHECK(*full.count == 2);
  CHECK(full.c == doctest::Approx(std::sqrt(2.0)));
  CHECK(brute_partition(window_from_dense(Eigen::MatrixXcd::Ones(4, 4))).second == 2);
  CHECK(full.optimality == Optimality::Exact);
  CHECK(full.method == "max-flow");
}

TEST_CASE("0/1 partition matches exhaustive search") {
  Rng rng(101);
  for (int trial = 0; trial < 150; ++trial) {
    Window w = random_window(rng, 6, 12, true);
    PartitionCertificate c = min_partition_01(w);
    auto [v, cnt] = brute_partition(w);
    CHECK(*c.count == cnt);
    CHECK(c.c == doctest::Approx(v).epsilon(1e-12));
    CHECK(verify_certificate(c, w).pass);
  }
}

TEST_CASE("relation window of two generators against exhaustive search") {
  GroupSpec g = GroupSpec::free(2);
  Window w = relation_window(generators(g), ball(g, 1), ball(g, 2));
  REQUIRE(w.entries.size() <= 20);
  CHECK(*min_partition_01(w).count == brute_partition(w).second);
}

TEST_CASE("weighted partition rejects nothing and 0/1 solver rejects weights") {
  Eigen::MatrixXcd m(2, 2);
  m << 1, 2, 0, 1;
  Window w = window_from_dense(m);
  try {
    min_partition_01(w);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WrongVariant);
  }
  CHECK(min_partition_weighted(w).c > 0);
}

TEST_CASE("weighted examples") {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(4, 4);
  d.diagonal() << 1, cplx(0, -3), 2, 0.5;
  PartitionCertificate c = min_partition_weighted(window_from_dense(d));
  CHECK(c.c == doctest::Approx(3.0));
  CHECK(std::all_of(c.assignment.begin(), c.assignment.end(), [](auto a) { return a == 1; }));
  PartitionCertificate two = min_partition_weighted(window_from_dense(Eigen::MatrixXcd::Ones(2, 2)));
  CHECK(two.c == doctest::Approx(1.0));
}

TEST_CASE("weighted branch and bound matches exhaustive search; heuristic is an upper bound") {
  Rng rng(202);
  for (int trial = 0; trial < 60; ++trial) {
    Window w = random_window(rng, 5, 14, false);
    PartitionCertificate exact = min_partition_weighted_exact(w);
    PartitionCertificate heur = min_partition_weighted_heuristic(w);
    double brute = brute_partition(w).first;
    CHECK(exact.c == doctest::Approx(brute).epsilon(1e-12));
    CHECK(heur.c >= exact.c - 1e-12);
    CHECK(exact.optimality == Optimality::Exact);
    CHECK(heur.optimality == Optimality::Heuristic);
    CHECK(verify_certificate(exact, w).pass);
    CHECK(verify_certificate(heur, w).pass);
  }
}

TEST_CASE("exact solver guard") {
  Window w = window_from_dense(Eigen::MatrixXcd::Ones(5, 5));
  try {
    min_partition_weighted_exact(w);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LimitExceeded);
  }
  CHECK(min_partition_weighted(w).optimality == Optimality::Heuristic);
}

TEST_CASE("monotonicity under adding entries") {
  Rng rng(303);
  for (int trial = 0; trial < 40; ++trial) {
    Window w = random_window(rng, 5, 10, true);
    Eigen::MatrixXcd m = w.dense();
    Eigen::Index i = static_cast<Eigen::Index>(rng.below(m.rows())), j = static_cast<Eigen::Index>(rng.below(m.cols()));
    m(i, j) = 1;
    CHECK(*min_partition_01(window_from_dense(m)).count >= *min_partition_01(w).count);
  }
}

TEST_CASE("scaling equivariance") {
  Rng rng(404);
  for (int trial = 0; trial < 20; ++trial) {
    Window w = random_window(rng, 4, 10, false);
    Eigen::MatrixXcd m = w.dense();
    cplx lambda(0.6, -2.2);
    PartitionCertificate a = min_partition_weighted_exact(w);
    PartitionCertificate b = min_partition_weighted_exact(window_from_dense(lambda * m));
    CHECK(b.c == doctest::Approx(std::abs(lambda) * a.c).epsilon(1e-12));
    SplitCertificate sa = min_split(w), sb = min_split(window_from_dense(lambda * m));
    CHECK(sb.value == doctest::Approx(std::abs(lambda) * sa.value).epsilon(1e-6));
  }
  // An optimal 0/1 assignment stays optimal for the weighted solver after scaling.
  Window w01 = window_from_dense(Eigen::MatrixXcd::Ones(3, 4));
  PartitionCertificate p = min_partition_01(w01);
  Window scaled = window_from_dense(2.5 * Eigen::MatrixXcd::Ones(3, 4));
  LineConstants k = partition_constants(scaled, p.assignment);
  CHECK(std::max(k.c1, k.c2) == doctest::Approx(min_partition_weighted_exact(scaled).c));
}

TEST_CASE("tampered certificates fail verification") {
  Window w = window_from_dense(Eigen::MatrixXcd::Identity(3, 3));
  PartitionCertificate c = min_partition_01(w);
  REQUIRE(c.c1 == 0.0);
  PartitionCertificate flipped = c;
  flipped.assignment[0] = flipped.assignment[0] == 1 ? 2 : 1;
  CHECK_FALSE(verify_certificate(flipped, w).pass);
  PartitionCertificate edited = c;
  edited.c1 += 1e-6;
  Verification v = verify_certificate(edited, w);
  CHECK_FALSE(v.pass);
  CHECK(v.failures.at(0).find("recomputed") != std::string::npos);
  PartitionCertificate other = c;
  other.window_id = "sha256:00";
  CHECK_THROWS_AS(verify_certificate(other, w), Error);
}

TEST_CASE("split examples") {
  Eigen::MatrixXcd one(1, 1);
  one << cplx(3, 4);
  SplitCertificate s = min_split(window_from_dense(one));
  CHECK(s.value == doctest::Approx(2.5).epsilon(1e-6));
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
  d.diagonal() << 1, -4, 2;
  SplitCertificate sd = min_split(window_from_dense(d));
  CHECK(sd.value <= 4.0 + 1e-9);
  CHECK(sd.value >= 4.0 / 2 - 1e-9);
  CHECK(sd.value == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(min_split(window_from_dense(Eigen::MatrixXcd::Zero(2, 2))).value == 0.0);
}

TEST_CASE("split matches a grid search and sits below the partition value") {
  Rng rng(505);
  for (int trial = 0; trial < 40; ++trial) {
    Window w = random_window(rng, 3, 3, false);
    SplitCertificate s = min_split(w);
    double grid = grid_split(w, 100);
    CHECK(s.value <= grid + 1e-9);
    CHECK(s.lower_bound <= grid + 1e-9);
    CHECK(s.value >= s.lower_bound - 1e-12);
    CHECK(s.residual <= 1e-9);
    CHECK(verify_certificate(s, w).pass);
  }
  for (int trial = 0; trial < 40; ++trial) {
    Window w = random_window(rng, 6, 20, false);
    CHECK(min_split(w).value <= min_partition_weighted(w).c + 1e-9);
  }
}

TEST_CASE("certificate JSON round trip") {
  Rng rng(606);
  Window w = random_window(rng, 5, 12, false);
  PartitionCertificate p = min_partition_weighted(w);
  CHECK(dump_json(to_json(partition_from_json(to_json(p)))) == dump_json(to_json(p)));
  SplitCertificate s = min_split(w);
  SplitCertificate back = split_from_json(to_json(s));
  CHECK(verify_certificate(back, w).pass);
  CHECK(dump_json(to_json(back)) == dump_json(to_json(s)));
}
