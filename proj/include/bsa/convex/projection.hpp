#pragma once

// Euclidean projection onto a polyhedron by Dykstra's alternating projections.
//
// Every row projection is closed form. Because Dykstra converges only
// linearly, the iterate is periodically handed to an active-set KKT solve; when
// that solve certifies the KKT conditions the result is the exact projection.

#include "bsa/convex/linear_program.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace bsa::convex {

struct Polyhedron {
  std::vector<LinearConstraint> rows;
  Eigen::Index dim = 0;

  /// Largest violation of any row, measured in the row's own units.
  double violation(const Vector& x) const {
    double worst = 0.0;
    for (const auto& row : rows) {
      const double r = row.normal.dot(x) - row.offset;
      worst = std::max(worst, row.kind == ConstraintKind::Equal ? std::abs(r) : r);
    }
    return worst;
  }

  bool contains(const Vector& x, double tol) const { return violation(x) <= tol; }
};

inline void validate_polyhedron(const Polyhedron& poly) {
  if (poly.rows.empty()) throw Error(ErrorCode::InvalidInput, "polyhedron: empty constraint list");
  for (const auto& row : poly.rows) {
    require_same_dim(row.normal.size(), poly.dim, "polyhedron row");
    if (!row.normal.allFinite() || !std::isfinite(row.offset)) {
      throw Error(ErrorCode::InvalidInput, "polyhedron: non-finite row");
    }
  }
}

enum class ProjectionStatus { Converged, NotConverged };

struct ProjectionResult {
  ProjectionStatus status = ProjectionStatus::NotConverged;
  Vector point;
  double residual = 0.0;  // max row violation of `point`
  int sweeps = 0;
  bool polished = false;  // true when certified by the KKT conditions
};

struct ProjectionOptions {
  int max_iter = 100000;     // Dykstra sweeps
  double move_tol = 1e-10;   // stop when a sweep moves the iterate and corrections less than this
  bool polish = true;
  int polish_every = 20;
  double kkt_tol = 1e-12;
};

namespace detail {

inline std::vector<Eigen::Index> working_indices(const std::vector<bool>& working) {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < working.size(); ++i) {
    if (working[i]) idx.push_back(static_cast<Eigen::Index>(i));
  }
  return idx;
}

/// Whether row `cand` is linearly independent of the rows in `idx`.
inline bool row_independent(const Polyhedron& poly, const std::vector<Eigen::Index>& idx, Eigen::Index cand) {
  Matrix a(static_cast<Eigen::Index>(idx.size()) + 1, poly.dim);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    a.row(static_cast<Eigen::Index>(r)) = poly.rows[static_cast<std::size_t>(idx[r])].normal.transpose();
  }
  a.row(a.rows() - 1) = poly.rows[static_cast<std::size_t>(cand)].normal.transpose();
  Eigen::FullPivLU<Matrix> lu(a);
  lu.setThreshold(1e-10);
  return lu.rank() == a.rows();
}

/// Greedy independent working set: equality rows first, then seeded rows in index order.
inline std::vector<bool> independent_working_set(const Polyhedron& poly, const std::vector<bool>& seed) {
  std::vector<bool> working(poly.rows.size(), false);
  std::vector<Eigen::Index> idx;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < poly.rows.size(); ++i) {
      const bool eq = poly.rows[i].kind == ConstraintKind::Equal;
      if (pass == 0 ? !eq : (eq || !seed[i])) continue;
      if (row_independent(poly, idx, static_cast<Eigen::Index>(i))) {
        working[i] = true;
        idx.push_back(static_cast<Eigen::Index>(i));
      }
    }
  }
  return working;
}

/// Most violated row outside the working set that keeps the set independent.
/// Returns -1 when nothing is violated beyond `tol`, -2 when every violated
/// row is dependent on the working set.
inline Eigen::Index most_violated_independent(const Polyhedron& poly, const std::vector<bool>& working,
                                              const Vector& x, double tol) {
  std::vector<std::pair<double, Eigen::Index>> violated;
  for (std::size_t i = 0; i < poly.rows.size(); ++i) {
    if (working[i]) continue;
    const auto& row = poly.rows[i];
    const double r = (row.normal.dot(x) - row.offset) / std::max(row.normal.norm(), 1e-300);
    if (r > tol) violated.emplace_back(-r, static_cast<Eigen::Index>(i));
  }
  if (violated.empty()) return -1;
  std::sort(violated.begin(), violated.end());
  const auto idx = working_indices(working);
  for (const auto& [neg, i] : violated) {
    if (row_independent(poly, idx, i)) return i;
  }
  return -2;
}

/// Projects `p` onto {A_W x = b_W} for the working set W, iterating a
/// primal-dual active-set loop until the full KKT system of the projection
/// holds. Returns nothing if the loop does not settle.
inline std::optional<Vector> kkt_projection(const Vector& p, const Polyhedron& poly,
                                            std::vector<bool> working, double tol) {
  using Eigen::Index;
  const Index m = static_cast<Index>(poly.rows.size());
  double scale = 1.0;
  for (const auto& row : poly.rows) scale = std::max(scale, std::abs(row.offset));
  scale = std::max(scale, p.cwiseAbs().maxCoeff());
  working = independent_working_set(poly, working);

  for (int iter = 0; iter < 4 * static_cast<int>(m) + 10; ++iter) {
    const std::vector<Index> idx = working_indices(working);
    Vector x = p;
    Vector lambda;
    if (!idx.empty()) {
      const Index k = static_cast<Index>(idx.size());
      Matrix a(k, poly.dim);
      Vector b(k);
      for (Index r = 0; r < k; ++r) {
        const auto& row = poly.rows[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])];
        a.row(r) = row.normal.transpose();
        b(r) = row.offset;
      }
      const Matrix gram = a * a.transpose();
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(gram);
      lambda = cod.solve(a * p - b);
      x = p - a.transpose() * lambda;
      if ((a * x - b).cwiseAbs().maxCoeff() > 1e-9 * scale) return std::nullopt;
    }

    // Primal feasibility of rows outside the working set.
    const Index worst_row = most_violated_independent(poly, working, x, tol * scale);
    if (worst_row == -2) return std::nullopt;
    if (worst_row >= 0) {
      working[static_cast<std::size_t>(worst_row)] = true;
      continue;
    }

    // Dual feasibility: inequality multipliers must be nonnegative.
    Index drop = -1;
    double most_negative = -tol * scale;
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const auto& row = poly.rows[static_cast<std::size_t>(idx[r])];
      if (row.kind == ConstraintKind::Equal) continue;
      const double mu = lambda(static_cast<Index>(r)) * row.normal.norm();
      if (mu < most_negative) {
        most_negative = mu;
        drop = idx[r];
      }
    }
    if (drop >= 0) {
      working[static_cast<std::size_t>(drop)] = false;
      continue;
    }
    return x;
  }
  return std::nullopt;
}

inline Vector project_row(const Vector& z, const LinearConstraint& row) {
  const double nn = row.normal.squaredNorm();
  if (nn == 0.0) return z;
  const double r = row.normal.dot(z) - row.offset;
  if (row.kind == ConstraintKind::LessEqual && r <= 0.0) return z;
  return z - (r / nn) * row.normal;
}

}  // namespace detail

/// Euclidean projection of `point` onto `poly`.
inline ProjectionResult project_polyhedron(const Vector& point, const Polyhedron& poly,
                                           const ProjectionOptions& opt = {}) {
  validate_polyhedron(poly);
  require_same_dim(point.size(), poly.dim, "project_polyhedron");

  const std::size_t m = poly.rows.size();
  std::vector<Vector> corrections(m, Vector::Zero(poly.dim));
  Vector x = point;
  ProjectionResult result;

  for (int sweep = 1; sweep <= opt.max_iter; ++sweep) {
    const Vector start = x;
    double correction_move = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const Vector z = x + corrections[i];
      x = detail::project_row(z, poly.rows[i]);
      const Vector next = z - x;
      correction_move = std::max(correction_move, (next - corrections[i]).norm());
      corrections[i] = next;
    }
    result.sweeps = sweep;

    if (opt.polish && (sweep == 1 || sweep % opt.polish_every == 0)) {
      std::vector<bool> working(m, false);
      for (std::size_t i = 0; i < m; ++i) {
        const auto& row = poly.rows[i];
        const double slack = row.offset - row.normal.dot(x);
        working[i] = corrections[i].squaredNorm() > 1e-28 || std::abs(slack) <= 1e-9;
      }
      if (auto exact = detail::kkt_projection(point, poly, working, opt.kkt_tol)) {
        result.point = *exact;
        result.residual = poly.violation(*exact);
        result.status = ProjectionStatus::Converged;
        result.polished = true;
        return result;
      }
    }

    // The iterate alone can stall while the corrections still drift.
    if ((x - start).norm() < opt.move_tol && correction_move < opt.move_tol) {
      result.point = x;
      result.residual = poly.violation(x);
      result.status = ProjectionStatus::Converged;
      return result;
    }
  }
  result.point = x;
  result.residual = poly.violation(x);
  result.status = ProjectionStatus::NotConverged;
  return result;
}

}  // namespace bsa::convex
