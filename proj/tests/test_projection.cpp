#include "bsa/convex/projection.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace bsa;
using namespace bsa::convex;

namespace {

LinearConstraint le(Vector n, double b) { return {std::move(n), b, ConstraintKind::LessEqual}; }
LinearConstraint eq(Vector n, double b) { return {std::move(n), b, ConstraintKind::Equal}; }

// One plain Dykstra sweep from scratch (zero corrections): a projection onto
// the polyhedron is a fixed point of every row projection it satisfies.
Vector one_sweep(Vector x, const Polyhedron& poly) {
  for (const auto& row : poly.rows) x = detail::project_row(x, row);
  return x;
}

}  // namespace

TEST(Projection, Hyperplane) {
  Polyhedron poly{{eq(make_vector({1.0, 0.0}), 1.0)}, 2};
  const auto r = project_polyhedron(Vector::Zero(2), poly);
  ASSERT_EQ(r.status, ProjectionStatus::Converged);
  EXPECT_NEAR((r.point - make_vector({1.0, 0.0})).norm(), 0.0, 1e-12);
}

TEST(Projection, Quadrant) {
  Polyhedron poly{{le(make_vector({1.0, 0.0}), 1.0), le(make_vector({0.0, -1.0}), 0.0)}, 2};
  const auto r = project_polyhedron(make_vector({2.0, 0.0}), poly);
  ASSERT_EQ(r.status, ProjectionStatus::Converged);
  EXPECT_NEAR((r.point - make_vector({1.0, 0.0})).norm(), 0.0, 1e-12);
}

TEST(Projection, MarginProgramOfEuclideanBasis) {
  // y = e1, x = e2, z = e3: f.(y-x) = 1, f.(z-x) >= 0, f.(y-z) >= 0.
  const Vector e1 = unit_vector(3, 0), e2 = unit_vector(3, 1), e3 = unit_vector(3, 2);
  Polyhedron poly{{eq(e1 - e2, 1.0), le(e2 - e3, 0.0), le(e3 - e1, 0.0)}, 3};
  const auto r = project_polyhedron(Vector::Zero(3), poly);
  ASSERT_EQ(r.status, ProjectionStatus::Converged);
  EXPECT_NEAR((r.point - make_vector({0.5, -0.5, 0.0})).norm(), 0.0, 1e-10);
  EXPECT_NEAR(r.point.norm(), 1.0 / std::sqrt(2.0), 1e-10);
}

TEST(Projection, PolishingOffStillConverges) {
  Polyhedron poly{{le(make_vector({1.0, 1.0}), 1.0), le(make_vector({1.0, -1.0}), 0.0)}, 2};
  ProjectionOptions opt;
  opt.polish = false;
  const auto r = project_polyhedron(make_vector({3.0, 0.5}), poly, opt);
  ASSERT_EQ(r.status, ProjectionStatus::Converged);
  EXPECT_FALSE(r.polished);
  // Projection of (3, .5) onto the cone vertex region is (.5, .5).
  EXPECT_NEAR((r.point - make_vector({0.5, 0.5})).norm(), 0.0, 1e-8);
}

TEST(Projection, RandomPolyhedraAreFeasibleFixedPoints) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> dims(2, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = dims(rng);
    const Vector inside = Vector::NullaryExpr(n, [&] { return g(rng); });
    Polyhedron poly;
    poly.dim = n;
    for (int i = 0; i < 2 * n + 2; ++i) {
      const Vector a = Vector::NullaryExpr(n, [&] { return g(rng); });
      poly.rows.push_back(le(a, a.dot(inside) + std::abs(g(rng))));
    }
    const Vector a = Vector::NullaryExpr(n, [&] { return g(rng); });
    poly.rows.push_back(eq(a, a.dot(inside)));
    const Vector p = 3.0 * Vector::NullaryExpr(n, [&] { return g(rng); });
    const auto r = project_polyhedron(p, poly);
    ASSERT_EQ(r.status, ProjectionStatus::Converged) << trial;
    EXPECT_LE(poly.violation(r.point), 1e-8) << trial;
    EXPECT_LE((one_sweep(r.point, poly) - r.point).norm(), 1e-9) << trial;
    // Optimality: no feasible point sampled on the segment toward `inside` is closer.
    for (double t : {1e-3, 1e-2, 0.1, 0.5}) {
      const Vector q = (1 - t) * r.point + t * inside;
      EXPECT_GE((q - p).norm(), (r.point - p).norm() - 1e-9) << trial;
    }
  }
}
