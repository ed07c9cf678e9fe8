#include <catch2/catch_amalgamated.hpp>

#include "symsector/boxcover.hpp"
#include "symsector/clustering.hpp"

using namespace symsector;

namespace {

Configuration random_config(SplitMix64& rng, int dim, int max_points, double spread) {
  int m = rng.uniform_int(1, max_points);
  std::vector<Point> pts;
  std::vector<int> ms;
  for (int i = 0; i < m; ++i) {
    pts.emplace_back(rng.uniform(-spread, spread), dim == 2 ? rng.uniform(-spread, spread) : 0.0);
    ms.push_back(1);
  }
  return Configuration(dim, pts, ms);
}

}  // namespace

TEST_CASE("confinement") {
  auto rule = make_clustering_rule(2, 1.0, 0.1);  // r_2 = 19/15
  CHECK(is_confined(Configuration::line({5.0}), rule));
  CHECK(is_confined(Configuration::line({0.0, 2.0}), rule));   // radius 1 < 19/15
  CHECK_FALSE(is_confined(Configuration::line({0.0, 4.0}), rule));  // radius 2
  CHECK_THROWS_WITH(is_confined(Configuration::line({0.0, 1.0, 2.0}), rule), "rule too short");
}

TEST_CASE("separation predicate") {
  auto rule = make_clustering_rule(2, 1.0, 0.1);  // d_2 = 1
  auto a = Configuration::line({0.0});
  CHECK(is_separated(a, Configuration::line({100.0}), rule));
  CHECK_FALSE(is_separated(a, Configuration::line({0.5}), rule));
  CHECK(is_separated(Configuration::line({100.0}), a, rule) ==
        is_separated(a, Configuration::line({100.0}), rule));
  CHECK_THROWS_AS(is_separated(a, Configuration::line({1.0, 2.0}), rule), std::invalid_argument);
}

TEST_CASE("greedy decomposition") {
  auto rule = make_clustering_rule(3, 1.0, 0.1);
  SECTION("far singletons stay split") {
    auto dec = greedy_cluster_decompose(Configuration::line({0.0, 50.0, 100.0}), rule);
    CHECK(dec.parts.size() == 3);
  }
  SECTION("non-separated pair merges") {
    auto dec = greedy_cluster_decompose(Configuration::line({0.0, 0.1}), rule);
    REQUIRE(dec.parts.size() == 1);
    CHECK(dec.parts[0].total_size() == 2);
  }
  SECTION("single fat point is one part") {
    auto dec = greedy_cluster_decompose(Configuration::line({1.0}, {3}), rule);
    REQUIRE(dec.parts.size() == 1);
    CHECK(dec.type() == Partition{3});
  }
}

TEST_CASE("finest decomposition") {
  auto rule = make_clustering_rule(3, 1.0, 0.1);
  auto c = Configuration::line({0.0, 0.1, 100.0});
  auto finest = finest_decomposition(c, rule);
  REQUIRE(finest.parts.size() == 2);
  CHECK(finest.type() == Partition{2, 1});
  SECTION("finest refines every greedy output") {
    SplitMix64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      auto cfg = random_config(rng, trial % 2 ? 2 : 1, 5, 3.0);
      auto rule5 = make_clustering_rule(5, 1.0, 0.1);
      auto fine = finest_decomposition(cfg, rule5);
      for (std::uint64_t seed = 0; seed < 3; ++seed)
        CHECK(fine.refines(greedy_cluster_decompose(cfg, rule5, seed)));
    }
  }
}

TEST_CASE("lattice operations") {
  auto rule = make_clustering_rule(6, 1.0, 0.1);
  SplitMix64 rng(5);
  int coarsening_nontrivial = 0;
  for (int trial = 0; trial < 150; ++trial) {
    auto cfg = random_config(rng, trial % 2 ? 2 : 1, 6, 4.0);
    auto d1 = greedy_cluster_decompose(cfg, rule, 2 * trial);
    auto d2 = greedy_cluster_decompose(cfg, rule, 2 * trial + 1);
    auto ref = common_refinement(d1, d2);
    CHECK(ref.refines(d1));
    CHECK(ref.refines(d2));
    auto coar = common_coarsening(d1, d2);
    CHECK(d1.refines(coar));
    CHECK(d2.refines(coar));
    if (coar.parts.size() != d1.parts.size()) ++coarsening_nontrivial;
    // idempotents
    CHECK(common_refinement(d1, d1).refines(d1));
    CHECK(d1.refines(common_refinement(d1, d1)));
  }
  (void)coarsening_nontrivial;
}

TEST_CASE("stratum membership") {
  auto rule = make_clustering_rule(3, 1.0, 0.1);
  auto c = Configuration::line({0.0, 0.1, 100.0});
  CHECK(stratum_membership(c, rule, {2, 1}));
  CHECK_FALSE(stratum_membership(c, rule, {1, 1, 1}));
  CHECK(stratum_membership(Configuration::line({0.0, 50.0, 100.0}), rule, {1, 1, 1}));
  // any confined configuration admits the one-part decomposition
  CHECK(stratum_membership(Configuration::line({0.0, 0.05, 0.1}), rule, {3}));
  CHECK_THROWS_AS(stratum_membership(c, rule, {2, 2}), std::invalid_argument);
}

TEST_CASE("merging lemma fuzz") {
  // confined and not separated implies the union is confined
  auto rule = make_clustering_rule(8, 1.0, 0.15);
  SplitMix64 rng(9);
  int observed = 0;
  for (int trial = 0; trial < 10000 && observed < 2000; ++trial) {
    int dim = trial % 2 ? 2 : 1;
    auto a = random_config(rng, dim, 4, 0.5);
    auto b = random_config(rng, dim, 4, 0.5);
    if (a.total_size() + b.total_size() > rule.levels()) continue;
    if (!is_confined(a, rule) || !is_confined(b, rule)) continue;
    if (is_separated(a, b, rule)) continue;
    CHECK(is_confined(a.plus(b), rule));
    ++observed;
  }
  CHECK(observed > 100);
}

TEST_CASE("cluster distance bound") {
  auto rule = make_clustering_rule(7, 1.0, 0.1);
  SplitMix64 rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    auto cfg = random_config(rng, trial % 2 ? 2 : 1, 7, 5.0);
    auto dec = greedy_cluster_decompose(cfg, rule, trial);
    for (std::size_t i = 0; i < dec.parts.size(); ++i)
      for (std::size_t j = i + 1; j < dec.parts.size(); ++j) {
        double bound = 2.0 * (rule.r[dec.parts[i].total_size() - 1] +
                              rule.r[dec.parts[j].total_size() - 1]);
        CHECK(separation(dec.parts[i], dec.parts[j]) > bound);
      }
  }
}

TEST_CASE("nesting of parts across decompositions") {
  auto rule = make_clustering_rule(6, 1.0, 0.1);
  SplitMix64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    auto cfg = random_config(rng, trial % 2 ? 2 : 1, 6, 2.0);
    auto d1 = greedy_cluster_decompose(cfg, rule, 3 * trial);
    auto d2 = greedy_cluster_decompose(cfg, rule, 3 * trial + 1);
    for (const auto& x : d1.parts)
      for (const auto& y : d2.parts) {
        int common = 0;
        for (const auto& p : x.points)
          if (std::find(y.points.begin(), y.points.end(), p) != y.points.end()) ++common;
        bool disjoint = common == 0;
        bool nested = common == static_cast<int>(x.points.size()) ||
                      common == static_cast<int>(y.points.size());
        CHECK((disjoint || nested));
      }
  }
}

TEST_CASE("contraction compatibility with the real-part projection") {
  auto rule = make_clustering_rule(6, 1.0, 0.1);
  SplitMix64 rng(19);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 150; ++trial) {
    auto cfg = random_config(rng, 2, 5, 3.0);
    // project to the line with multiplicity merging
    std::vector<Point> re;
    for (const auto& p : cfg.points) re.emplace_back(p.real(), 0.0);
    Configuration proj(1, re, cfg.mult);
    auto base = finest_decomposition(proj, rule);
    // lift: group complex points by which projected part their real part is in
    std::vector<Configuration> lifted;
    for (const auto& part : base.parts) {
      std::vector<Point> pts;
      std::vector<int> ms;
      for (std::size_t i = 0; i < cfg.points.size(); ++i) {
        Point rp(cfg.points[i].real(), 0.0);
        if (std::find(part.points.begin(), part.points.end(), rp) != part.points.end()) {
          pts.push_back(cfg.points[i]);
          ms.push_back(cfg.mult[i]);
        }
      }
      lifted.emplace_back(2, pts, ms);
    }
    // refine each lifted group by its own finest decomposition and concatenate
    std::vector<Configuration> parts;
    for (const auto& grp : lifted) {
      auto sub = finest_decomposition(grp, rule);
      parts.insert(parts.end(), sub.parts.begin(), sub.parts.end());
    }
    CHECK_NOTHROW(ClusterDecomposition(cfg, parts, rule));
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("stratum containment under multiplicity") {
  auto rule = make_clustering_rule(6, 1.0, 0.1);
  SplitMix64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    int dim = trial % 2 ? 2 : 1;
    int m = rng.uniform_int(1, 3);
    std::vector<Point> pts;
    std::vector<int> ms;
    int total = 0;
    for (int i = 0; i < m && total < 6; ++i) {
      int mu = rng.uniform_int(1, std::min(3, 6 - total));
      pts.emplace_back(rng.uniform(-2.0, 2.0), dim == 2 ? rng.uniform(-2.0, 2.0) : 0.0);
      ms.push_back(mu);
      total += mu;
    }
    Configuration cfg(dim, pts, ms);
    // the greedy decomposition from the multiplicity start witnesses a
    // stratum type coarsening the multiplicity partition
    auto dec = greedy_cluster_decompose(cfg, rule, trial);
    CHECK(stratum_membership(cfg, rule, dec.type()));
  }
}

TEST_CASE("center-of-mass function check") {
  auto rule = make_clustering_rule(4, 1.0, 0.1);
  SplitMix64 rng(29);
  std::vector<Configuration> samples;
  for (int i = 0; i < 20; ++i) {
    // two clusters of two points, centers farther apart than d_4
    double gap = rng.uniform(2.0 * rule.d[3], 3.0 * rule.d[3]);
    double r1 = 0.2 * rule.r[1];
    samples.push_back(Configuration::line({-gap / 2 - r1, -gap / 2 + r1, gap / 2 - r1, gap / 2 + r1}));
  }
  Partition tau{2, 2};

  SECTION("total center of mass passes with zero change") {
    auto f = [](const Configuration& c) { return center_of_mass(c).real(); };
    auto rep = is_cm_function(f, samples, tau, rule, {.tol = 1e-9, .seed = 1});
    CHECK(rep.pass);
    CHECK(rep.checked == samples.size());
  }
  SECTION("min pairwise distance fails") {
    auto f = [](const Configuration& c) {
      double best = 1e300;
      auto xs = c.expanded();
      for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j) best = std::min(best, std::abs(xs[i] - xs[j]));
      return best;
    };
    auto rep = is_cm_function(f, samples, tau, rule, {.tol = 1e-9, .seed = 2});
    CHECK_FALSE(rep.pass);
  }
  SECTION("stratum mismatch is skipped with a note") {
    auto f = [](const Configuration&) { return 0.0; };
    std::vector<Configuration> bad{Configuration::line({0.0, 100.0})};
    auto rep = is_cm_function(f, bad, Partition{2}, rule, {});
    CHECK(rep.skipped == 1);
    CHECK_FALSE(rep.notes.empty());
  }
}
