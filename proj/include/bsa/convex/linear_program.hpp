#pragma once

// Dense two-phase simplex with Bland's rule.
//
// Instances here are tiny (tens of variables, at most a few thousand rows), so
// the tableau is kept dense and every pivot is deterministic.

#include "bsa/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace bsa::convex {

enum class ConstraintKind { LessEqual, Equal };

/// One row `normal . x (<= | =) offset`.
struct LinearConstraint {
  Vector normal;
  double offset = 0.0;
  ConstraintKind kind = ConstraintKind::LessEqual;
};

/// maximize objective . x subject to the rows; variables are >= 0 unless
/// flagged free.
struct LinearProgram {
  Vector objective;
  std::vector<LinearConstraint> constraints;
  std::vector<bool> free_variables;

  Eigen::Index variable_count() const { return objective.size(); }
  bool is_free(Eigen::Index j) const {
    return !free_variables.empty() && free_variables[static_cast<std::size_t>(j)];
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  Vector optimizer;
};

struct LpOptions {
  double optimality_tol = 1e-9;
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-9;
  int max_pivots = 200000;
};

namespace detail {

class SimplexTableau {
 public:
  SimplexTableau(Matrix a, Vector b, std::vector<Eigen::Index> basis)
      : tab_(a.rows() + 1, a.cols() + 1), basis_(std::move(basis)) {
    tab_.setZero();
    tab_.topLeftCorner(a.rows(), a.cols()) = a;
    tab_.topRightCorner(a.rows(), 1) = b;
  }

  Eigen::Index rows() const { return tab_.rows() - 1; }
  Eigen::Index cols() const { return tab_.cols() - 1; }
  double& rhs(Eigen::Index i) { return tab_(i, cols()); }
  double rhs(Eigen::Index i) const { return tab_(i, cols()); }
  double at(Eigen::Index i, Eigen::Index j) const { return tab_(i, j); }
  double reduced_cost(Eigen::Index j) const { return tab_(rows(), j); }
  double objective_value() const { return tab_(rows(), cols()); }
  const std::vector<Eigen::Index>& basis() const { return basis_; }

  /// Loads cost vector c (maximization) and prices out the current basis.
  void set_objective(const Vector& c) {
    const Eigen::Index m = rows();
    tab_.row(m).setZero();
    tab_.row(m).head(cols()) = -c.transpose();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double cb = c(basis_[static_cast<std::size_t>(i)]);
      if (cb != 0.0) tab_.row(m) += cb * tab_.row(i);
    }
  }

  void pivot(Eigen::Index r, Eigen::Index s) {
    const double p = tab_(r, s);
    tab_.row(r) /= p;
    for (Eigen::Index i = 0; i < tab_.rows(); ++i) {
      if (i == r) continue;
      const double factor = tab_(i, s);
      if (factor != 0.0) tab_.row(i) -= factor * tab_.row(r);
    }
    tab_(r, s) = 1.0;
    basis_[static_cast<std::size_t>(r)] = s;
  }

  /// Removes constraint rows (used for redundant rows after phase one).
  void drop_rows(const std::vector<bool>& drop) {
    Eigen::Index keep = 0;
    for (bool d : drop) keep += d ? 0 : 1;
    Matrix next(keep + 1, tab_.cols());
    std::vector<Eigen::Index> next_basis;
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < rows(); ++i) {
      if (drop[static_cast<std::size_t>(i)]) continue;
      next.row(r++) = tab_.row(i);
      next_basis.push_back(basis_[static_cast<std::size_t>(i)]);
    }
    next.row(r) = tab_.row(rows());
    tab_ = std::move(next);
    basis_ = std::move(next_basis);
  }

  enum class Outcome { Optimal, Unbounded, PivotLimit };

  /// Bland's rule: lowest-index improving column, lowest-index basic variable
  /// among minimum-ratio ties.
  Outcome run(const std::vector<bool>& allowed, const LpOptions& opt, int& pivots) {
    const Eigen::Index m = rows();
    while (true) {
      Eigen::Index entering = -1;
      for (Eigen::Index j = 0; j < cols(); ++j) {
        if (allowed[static_cast<std::size_t>(j)] && reduced_cost(j) < -opt.optimality_tol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return Outcome::Optimal;

      Eigen::Index leaving = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        const double a = tab_(i, entering);
        if (a <= opt.pivot_tol) continue;
        const double ratio = std::max(rhs(i), 0.0) / a;
        const double tie = 1e-12 * std::max(1.0, std::abs(best));
        if (leaving < 0 || ratio < best - tie) {
          best = ratio;
          leaving = i;
        } else if (ratio <= best + tie &&
                   basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leaving)]) {
          leaving = i;
        }
      }
      if (leaving < 0) return Outcome::Unbounded;
      if (++pivots > opt.max_pivots) return Outcome::PivotLimit;
      pivot(leaving, entering);
    }
  }

 private:
  Matrix tab_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace detail

/// Solves `lp`. Returns Optimal with an optimal basic solution, or the
/// Infeasible / Unbounded status. Throws NumericalBreakdown when the final
/// basis cannot be refactorized or the pivot budget runs out.
inline LpResult lp_solve(const LinearProgram& lp, const LpOptions& opt = {}) {
  using Eigen::Index;
  const Index n = lp.variable_count();
  if (!lp.free_variables.empty()) {
    require_same_dim(static_cast<Index>(lp.free_variables.size()), n, "lp_solve free flags");
  }
  for (const auto& row : lp.constraints) {
    require_same_dim(row.normal.size(), n, "lp_solve constraint");
    if (!row.normal.allFinite() || !std::isfinite(row.offset)) {
      throw Error(ErrorCode::InvalidInput, "lp_solve: non-finite constraint data");
    }
  }
  if (!lp.objective.allFinite()) throw Error(ErrorCode::InvalidInput, "lp_solve: non-finite objective");

  // Column layout: structural (free variables split into +/- parts), slacks, artificials.
  std::vector<Index> plus(static_cast<std::size_t>(n)), minus(static_cast<std::size_t>(n), -1);
  Index ncols = 0;
  for (Index j = 0; j < n; ++j) {
    plus[static_cast<std::size_t>(j)] = ncols++;
    if (lp.is_free(j)) minus[static_cast<std::size_t>(j)] = ncols++;
  }
  const Index m = static_cast<Index>(lp.constraints.size());
  std::vector<Index> slack(static_cast<std::size_t>(m), -1), art(static_cast<std::size_t>(m), -1);
  std::vector<double> sign(static_cast<std::size_t>(m), 1.0);
  for (Index i = 0; i < m; ++i) {
    const auto& row = lp.constraints[static_cast<std::size_t>(i)];
    if (row.kind == ConstraintKind::LessEqual) slack[static_cast<std::size_t>(i)] = ncols++;
  }
  const Index first_art = ncols;
  for (Index i = 0; i < m; ++i) {
    const auto& row = lp.constraints[static_cast<std::size_t>(i)];
    if (row.offset < 0.0) sign[static_cast<std::size_t>(i)] = -1.0;
    if (row.kind == ConstraintKind::Equal || row.offset < 0.0) art[static_cast<std::size_t>(i)] = ncols++;
  }

  Matrix a = Matrix::Zero(m, ncols);
  Vector b(m);
  std::vector<Index> basis(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const auto& row = lp.constraints[u];
    for (Index j = 0; j < n; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      a(i, plus[uj]) = sign[u] * row.normal(j);
      if (minus[uj] >= 0) a(i, minus[uj]) = -sign[u] * row.normal(j);
    }
    if (slack[u] >= 0) a(i, slack[u]) = sign[u];
    if (art[u] >= 0) a(i, art[u]) = 1.0;
    b(i) = sign[u] * row.offset;
    basis[u] = art[u] >= 0 ? art[u] : slack[u];
  }
  const Matrix a_original = a;
  const Vector b_original = b;

  detail::SimplexTableau tab(a, b, basis);
  int pivots = 0;
  std::vector<bool> allowed(static_cast<std::size_t>(ncols), true);

  // Phase one: maximize -sum(artificials).
  if (first_art < ncols) {
    Vector c1 = Vector::Zero(ncols);
    c1.tail(ncols - first_art).setConstant(-1.0);
    tab.set_objective(c1);
    if (tab.run(allowed, opt, pivots) == detail::SimplexTableau::Outcome::PivotLimit) {
      throw Error(ErrorCode::NumericalBreakdown, "lp_solve: pivot limit in phase one");
    }
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    if (tab.objective_value() < -opt.feasibility_tol * scale) return LpResult{LpStatus::Infeasible, 0.0, Vector()};

    // Drive artificials out of the basis; rows that cannot pivot are redundant.
    // A basic artificial sits at (numerically) zero level, so its rhs is
    // zeroed first: pivoting a residual through a small element would spread
    // it into the other rows.
    std::vector<bool> drop(static_cast<std::size_t>(tab.rows()), false);
    for (Index i = 0; i < tab.rows(); ++i) {
      if (tab.basis()[static_cast<std::size_t>(i)] < first_art) continue;
      tab.rhs(i) = 0.0;
      double row_max = 0.0;
      for (Index j = 0; j < first_art; ++j) row_max = std::max(row_max, std::abs(tab.at(i, j)));
      Index best = -1;
      double mag = std::max(opt.pivot_tol, 1e-7 * row_max);
      for (Index j = 0; j < first_art; ++j) {
        if (std::abs(tab.at(i, j)) > mag) {
          mag = std::abs(tab.at(i, j));
          best = j;
        }
      }
      if (best >= 0) {
        tab.pivot(i, best);
      } else {
        drop[static_cast<std::size_t>(i)] = true;
      }
    }
    tab.drop_rows(drop);
    for (Index j = first_art; j < ncols; ++j) allowed[static_cast<std::size_t>(j)] = false;
  }

  // Phase two.
  Vector c = Vector::Zero(ncols);
  for (Index j = 0; j < n; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    c(plus[uj]) = lp.objective(j);
    if (minus[uj] >= 0) c(minus[uj]) = -lp.objective(j);
  }
  tab.set_objective(c);
  const auto outcome = tab.run(allowed, opt, pivots);
  if (outcome == detail::SimplexTableau::Outcome::PivotLimit) {
    throw Error(ErrorCode::NumericalBreakdown, "lp_solve: pivot limit in phase two");
  }
  if (outcome == detail::SimplexTableau::Outcome::Unbounded) return LpResult{LpStatus::Unbounded, 0.0, Vector()};

  // Read the basic solution, then refactorize the basis from the original data
  // to shed accumulated pivoting error.
  Vector x_std = Vector::Zero(ncols);
  for (Index i = 0; i < tab.rows(); ++i) x_std(tab.basis()[static_cast<std::size_t>(i)]) = tab.rhs(i);

  if (tab.rows() > 0) {
    // Rows that survived phase one are identified by matching against a_original.
    // Every surviving row keeps its basic column, so solving B x_B = b over
    // all original rows in the least-squares sense recovers x_B exactly when
    // the dropped rows were redundant.
    const Index k = tab.rows();
    Matrix basis_cols(m, k);
    for (Index r = 0; r < k; ++r) basis_cols.col(r) = a_original.col(tab.basis()[static_cast<std::size_t>(r)]);
    Eigen::ColPivHouseholderQR<Matrix> qr(basis_cols);
    qr.setThreshold(1e-12);
    if (qr.rank() < k) throw Error(ErrorCode::NumericalBreakdown, "lp_solve: singular final basis");
    const Vector xb = qr.solve(b_original);
    const double residual = (basis_cols * xb - b_original).cwiseAbs().maxCoeff();
    Vector refined = Vector::Zero(ncols);
    for (Index r = 0; r < k; ++r) refined(tab.basis()[static_cast<std::size_t>(r)]) = xb(r);
    const double drift = (refined - x_std).cwiseAbs().maxCoeff();
    if (residual <= 1e-9 * std::max(1.0, b_original.cwiseAbs().maxCoeff()) && drift <= 1e-6) {
      x_std = refined;
    }
  }
  for (Index j = 0; j < ncols; ++j) {
    if (x_std(j) < 0.0) {
      if (x_std(j) < -1e-7) throw Error(ErrorCode::NumericalBreakdown, "lp_solve: negative basic variable");
      x_std(j) = 0.0;
    }
  }

  Vector x(n);
  for (Index j = 0; j < n; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    x(j) = x_std(plus[uj]) - (minus[uj] >= 0 ? x_std(minus[uj]) : 0.0);
  }
  return LpResult{LpStatus::Optimal, lp.objective.dot(x), x};
}

/// Phase-one feasibility check of a constraint system.
inline bool lp_feasible(const std::vector<LinearConstraint>& rows, Eigen::Index variable_count,
                        const std::vector<bool>& free_variables = {}, const LpOptions& opt = {}) {
  LinearProgram lp{Vector::Zero(variable_count), rows, free_variables};
  return lp_solve(lp, opt).status == LpStatus::Optimal;
}

}  // namespace bsa::convex
