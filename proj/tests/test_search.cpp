#include "bsa/construct.hpp"
#include "bsa/search.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace bsa;

namespace {

SearchConfig quick(std::uint64_t seed, int restarts = 2, int iterations = 300) {
  SearchConfig c;
  c.seed = seed;
  c.restarts = restarts;
  c.iterations = iterations;
  return c;
}

NormSpec random_polytope(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vector> v;
  for (int i = 0; i < 3 + 2 * dim; ++i) {
    Vector x = Vector::NullaryExpr(dim, [&] { return g(rng); });
    v.push_back(x);
    v.push_back(-x);
  }
  return NormSpec::polytope(v);
}

}  // namespace

TEST(Search, ConfigValidation) {
  SearchConfig c;
  EXPECT_NO_THROW(validate_config(c));
  c.decay = 1.0;
  EXPECT_THROW(validate_config(c), Error);
  c = {};
  c.restarts = 0;
  EXPECT_THROW(validate_config(c), Error);
}

TEST(Search, BruteForceExamples) {
  PointSet pair(NormSpec::lp(2.0, 2), {unit_vector(2, 0), -unit_vector(2, 0)});
  const double two = brute_force_margin(pair, 0, 1, 360);
  EXPECT_LE(two, 2.0 + 1e-12);
  EXPECT_GT(two, 2.0 - 1e-3);

  PointSet e3(NormSpec::lp(2.0, 3), {unit_vector(3, 0), unit_vector(3, 1), unit_vector(3, 2)});
  EXPECT_NEAR(brute_force_margin(e3, 0, 1, 64), std::sqrt(2.0), 1e-2);

  PointSet sq(NormSpec::lp_inf(2), {make_vector({1, 1}), make_vector({-1, -1}), make_vector({1, -1}), make_vector({-1, 1})});
  EXPECT_NEAR(brute_force_margin(sq, 0, 2, 720), 2.0, 1e-2);

  EXPECT_THROW(brute_force_margin(PointSet(NormSpec::lp(2.0, 4), {unit_vector(4, 0), unit_vector(4, 1)}), 0, 1, 10),
               Error);
}

TEST(Search, BruteForceIsALowerBoundThatTightens) {
  std::mt19937_64 rng(79);
  for (int i = 0; i < 10; ++i) {
    const NormSpec s = i % 2 ? random_polytope(rng, 2) : NormSpec::lp(1.2 + 0.3 * i, 2);
    std::vector<Vector> pts;
    for (int k = 0; k < 4; ++k) pts.push_back(detail::random_unit(s, rng));
    PointSet set(s, pts);
    for (std::size_t y = 0; y < 4; ++y) {
      for (std::size_t x = 0; x < 4; ++x) {
        if (x == y) continue;
        const double exact = pair_margin(set, y, x).margin;
        double prev_gap = std::numeric_limits<double>::infinity();
        for (int grid : {90, 180, 360}) {
          const double b = brute_force_margin(set, y, x, grid);
          EXPECT_LE(b, exact + 1e-9);
          // The 90-grid is a subset of the 180-grid, so the gap cannot grow.
          EXPECT_LE(exact - b, prev_gap + 1e-12);
          prev_gap = exact - b;
        }
      }
    }
  }
}

TEST(Search, AllPairsOracleMatchesSingle) {
  std::mt19937_64 rng(83);
  const NormSpec s = random_polytope(rng, 3);
  std::vector<Vector> pts;
  for (int k = 0; k < 4; ++k) pts.push_back(detail::random_unit(s, rng));
  PointSet set(s, pts);
  const Matrix all = brute_force_margins(set, 24);
  for (std::size_t y = 0; y < 4; ++y) {
    for (std::size_t x = 0; x < 4; ++x) {
      if (x != y) EXPECT_EQ(all(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)), brute_force_margin(set, y, x, 24));
    }
  }
}

TEST(Search, GreedySeparated) {
  const auto two = greedy_separated(NormSpec::lp(2.0, 2), 2, 500, 1);
  EXPECT_GT(separation(two), 2.0 - 1e-2);
  const auto cube = greedy_separated(NormSpec::lp_inf(2), 4, 4000, 2);
  EXPECT_GE(separation(cube), 2.0 - 1e-2);
  const auto simplex = greedy_separated(NormSpec::lp(2.0, 3), 4, 2000, 3);
  EXPECT_GE(separation(simplex), 1.5);
  for (const auto& p : simplex.points()) EXPECT_NEAR(p.norm(), 1.0, 1e-12);
}

TEST(Search, AnnealPairIsAntipodal) {
  for (const auto& s : {NormSpec::lp(2.0, 2), NormSpec::lp(3.0, 3), NormSpec::lp_inf(2)}) {
    const auto r = anneal_bsa(s, 2, quick(5, 1, 20));
    EXPECT_NEAR(r.report.d, 2.0, 1e-9);
  }
}

TEST(Search, AnnealEuclideanSquare) {
  const auto r = anneal_bsa(NormSpec::lp(2.0, 2), 4, quick(7, 1, 3000));
  EXPECT_GE(r.report.d, std::sqrt(2.0) - 1e-2);
  EXPECT_TRUE(check_certificate(r.certificate).valid);
}

TEST(Search, AnnealL1Triple) {
  const auto r = anneal_bsa(NormSpec::lp(1.0, 3), 3, quick(11, 1, 6000));
  EXPECT_GE(r.report.d, 2.0 - 1e-2);
}

TEST(Search, AnnealIsDeterministicAndMonotone) {
  const auto a = anneal_bsa(NormSpec::lp(3.0, 2), 3, quick(13, 2, 200));
  const auto b = anneal_bsa(NormSpec::lp(3.0, 2), 3, quick(13, 2, 200));
  EXPECT_EQ(a.report.d, b.report.d);
  for (std::size_t i = 0; i < a.set.size(); ++i) EXPECT_EQ(a.set[i], b.set[i]);
  for (std::size_t k = 1; k < a.best_trace.size(); ++k) EXPECT_GE(a.best_trace[k], a.best_trace[k - 1]);

  // A longer run of the same seed replays the same prefix.
  const auto longer = anneal_bsa(NormSpec::lp(3.0, 2), 3, quick(13, 1, 400));
  const auto shorter = anneal_bsa(NormSpec::lp(3.0, 2), 3, quick(13, 1, 200));
  EXPECT_GE(longer.report.d, shorter.report.d);
}

TEST(Search, AntipodalSearch) {
  const auto four = max_antipodal_search(NormSpec::lp(2.0, 2), 4, quick(17, 1, 3000));
  ASSERT_TRUE(four.found);
  for (const auto& m : four.witness->report.margins) EXPECT_GE(m.margin, std::sqrt(2.0) - 1e-2);
  EXPECT_TRUE(max_antipodal_search(NormSpec::lp(2.0, 2), 2, quick(19, 1, 10)).found);
  EXPECT_FALSE(max_antipodal_search(NormSpec::lp(2.0, 2), 5, quick(23, 2, 300)).found);
  EXPECT_THROW(max_antipodal_search(NormSpec::lp(2.0, 2), 6, quick(1)), Error);
}

TEST(Search, KaLowerBound) {
  const auto two = ka_lower_bound(NormSpec::lp(2.0, 3), 2, quick(29, 1, 10));
  EXPECT_NEAR(two.best_d, 2.0, 1e-9);

  const auto sq = validate_space(explicit_polytope(NormSpec::lp_inf(2)));
  const AuerbachSystem canonical{{unit_vector(2, 0), unit_vector(2, 1)}, {unit_vector(2, 0), unit_vector(2, 1)}, sq, {1.0}, 0};
  const auto renormed = renorm_equilateral_family(sq, canonical).space;
  const auto r = ka_lower_bound(renormed, 4, quick(31, 2, 300));
  EXPECT_GE(r.best_d, 2.0 - 1e-2);
  EXPECT_TRUE(check_certificate(r.witness).valid);
  EXPECT_EQ(r.per_count.size(), 3u);
}
