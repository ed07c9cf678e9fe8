#include <catch2/catch_amalgamated.hpp>

#include "symsector/config.hpp"

using namespace symsector;

TEST_CASE("center of mass") {
  CHECK(center_of_mass(Configuration::line({0.0, 2.0})) == Point(1.0, 0.0));
  CHECK(center_of_mass(Configuration::plane({{0.0, 1.0}, {0.0, -1.0}})) == Point(0.0, 0.0));
  CHECK(center_of_mass(Configuration::plane({{1.0, 1.0}}, {3})) == Point(1.0, 1.0));
  CHECK_THROWS_WITH(center_of_mass(Configuration{}), "empty configuration");
}

TEST_CASE("radius") {
  CHECK(radius(Configuration::line({0.0, 2.0})) == 1.0);
  CHECK(radius(Configuration::plane({{1.0, 1.0}}, {3})) == 0.0);
  CHECK(radius(Configuration::line({0.0, 1.0, 5.0})) == 3.0);
  CHECK_THROWS_AS(radius(Configuration{}), std::invalid_argument);
}

TEST_CASE("separation") {
  CHECK(separation(Configuration::line({0.0}), Configuration::line({3.0})) == 3.0);
  CHECK(separation(Configuration::line({0.0, 1.0}), Configuration::line({1.5, 4.0})) == 0.5);
  CHECK(separation(Configuration::plane({{0.0, 0.0}}), Configuration::plane({{3.0, 4.0}})) == 5.0);
  CHECK_THROWS_AS(separation(Configuration{}, Configuration::line({0.0})), std::invalid_argument);
}

TEST_CASE("canonical form") {
  Configuration c(1, {{2.0, 0.0}, {0.0, 0.0}, {2.0, 0.0}}, {1, 2, 3});
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[0] == Point(0.0, 0.0));
  CHECK(c.mult[0] == 2);
  CHECK(c.mult[1] == 4);
  CHECK(c.total_size() == 6);
  // re-canonicalization is a fixed point
  Configuration again(c.dim, c.points, c.mult);
  CHECK(again == c);
  // near-coincident points stay distinct
  Configuration d(1, {{0.0, 0.0}, {1e-15, 0.0}}, {1, 1});
  CHECK(d.points.size() == 2);
  CHECK_THROWS_AS(Configuration(1, {{0.0, 1.0}}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(Configuration(2, {{0.0, 0.0}}, {0}), std::invalid_argument);
}

TEST_CASE("make_clustering_rule matches the existence recursion") {
  auto rule = make_clustering_rule(2, 1.0, 0.1);
  CHECK(rule.r[0] == Catch::Approx(5.0 / 33.0).epsilon(1e-14));
  CHECK(rule.r[1] == Catch::Approx(19.0 / 15.0).epsilon(1e-14));
  CHECK(rule.d[1] == 1.0);
  auto rule3 = make_clustering_rule(3, 1.0, 0.1);
  CHECK(rule3.d[2] == Catch::Approx(6.6 * 19.0 / 15.0).epsilon(1e-14));
  CHECK(validate_rule(rule).ok);
  CHECK(validate_rule(rule3).ok);
  CHECK_THROWS_AS(make_clustering_rule(0, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_clustering_rule(2, -1.0, 0.1), std::invalid_argument);
}

TEST_CASE("validate_rule counterexamples") {
  ClusteringRule bad{{1.0, 2.0}, {0.0, 1.0}};
  auto v = validate_rule(bad);  // needs d_2 > 6 r_1 = 6
  CHECK_FALSE(v.ok);
  CHECK_FALSE(v.violations.empty());
  ClusteringRule good{{0.1, 10.0}, {0.0, 1.0}};
  CHECK(validate_rule(good).ok);
}

TEST_CASE("relax_rule strictly widens r and shrinks d") {
  auto rule = make_clustering_rule(4, 1.0, 0.1);
  auto relaxed = relax_rule(rule);
  CHECK(validate_rule(relaxed).ok);
  for (int i = 0; i < 4; ++i) CHECK(relaxed.r[i] > rule.r[i]);
  for (int i = 1; i < 4; ++i) CHECK(relaxed.d[i] < rule.d[i]);
  CHECK(relaxed.d[0] == 0.0);
  auto twice = relax_rule(relaxed);
  CHECK(validate_rule(twice).ok);
  ClusteringRule bad{{1.0, 2.0}, {0.0, 1.0}};
  CHECK_THROWS_AS(relax_rule(bad), std::invalid_argument);
}

TEST_CASE("random rules from the constructor always validate") {
  SplitMix64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    int N = rng.uniform_int(1, 64);
    double d2 = std::pow(10.0, rng.uniform(-3.0, 3.0));
    double eps = rng.uniform(1e-3, 2.0);
    CHECK(validate_rule(make_clustering_rule(N, d2, eps)).ok);
  }
}

TEST_CASE("partition enumeration") {
  auto p0 = enumerate_partitions(0);
  REQUIRE(p0.size() == 1);
  CHECK(p0[0].empty());
  auto p3 = enumerate_partitions(3);
  REQUIRE(p3.size() == 3);
  CHECK(p3[0] == Partition{3});
  CHECK(p3[1] == Partition{2, 1});
  CHECK(p3[2] == Partition{1, 1, 1});
  CHECK(enumerate_partitions(8).size() == 22);
}

TEST_CASE("composition enumeration") {
  auto c2 = enumerate_compositions(2);
  // regression: 2^{n+1} - 1 compositions of n
  CHECK(c2.size() == 7);
  int with_one_middle = 0;
  std::vector<OrderedComposition> expect = {
      {0, {1}, 1}, {0, {2}, 0}, {1, {1}, 0}};
  for (const auto& c : c2)
    if (c.middles.size() == 1) {
      ++with_one_middle;
      CHECK(std::find(expect.begin(), expect.end(), c) != expect.end());
    }
  CHECK(with_one_middle == 3);
  for (int n = 0; n <= 10; ++n)
    CHECK(enumerate_compositions(n).size() == (1u << (n + 1)) - 1);
  // cut positions
  OrderedComposition comp(1, {2, 2}, 0);
  CHECK(comp.total() == 5);
  CHECK(comp.cuts() == std::vector<int>{1, 3, 5});
}

TEST_CASE("shift invariance of center and radius") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    int dim = trial % 2 ? 2 : 1;
    int m = rng.uniform_int(1, 6);
    std::vector<Point> pts;
    std::vector<int> ms;
    for (int i = 0; i < m; ++i) {
      pts.emplace_back(rng.uniform(-5.0, 5.0), dim == 2 ? rng.uniform(-5.0, 5.0) : 0.0);
      ms.push_back(rng.uniform_int(1, 3));
    }
    Configuration c(dim, pts, ms);
    Point s(rng.uniform(-3.0, 3.0), dim == 2 ? rng.uniform(-3.0, 3.0) : 0.0);
    Configuration cs = c.shifted(s);
    double scale = 1.0 + std::abs(center_of_mass(c)) + std::abs(s);
    CHECK(std::abs(center_of_mass(cs) - (center_of_mass(c) + s)) <= 1e-12 * scale);
    CHECK(std::abs(radius(cs) - radius(c)) <= 1e-12 * (1.0 + radius(c)));
  }
}
