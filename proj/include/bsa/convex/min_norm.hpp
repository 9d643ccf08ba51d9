#pragma once

// Minimum dual norm over a polyhedron, and operator norms.
//
// Routes by the geometry of the dual ball:
//   * Euclidean dual: projection of the origin (Dykstra + KKT polish).
//   * polyhedral dual (l_1, l_inf, polytope polars): exact LP.
//   * l_q, 1 < q < inf, q != 2: active-set method whose equality subproblems
//     are solved through their smooth Lagrange dual by damped Newton. When it
//     certifies KKT the answer is exact; otherwise projected subgradient
//     descent takes over and the result is flagged approximate.

#include "bsa/convex/linear_program.hpp"
#include "bsa/convex/projection.hpp"
#include "bsa/normed_space.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

namespace bsa::convex {

enum class MinNormStatus { Optimal, Infeasible, NotConverged };

struct MinNormResult {
  MinNormStatus status = MinNormStatus::Infeasible;
  double value = 0.0;
  Vector argmin;
  bool approximate = false;
  /// Primal violation of argmin for exact routes; last relative improvement
  /// of the subgradient route otherwise.
  double residual = 0.0;
};

struct MinNormOptions {
  ProjectionOptions projection;
  bool exact_active_set = true;  // false forces the subgradient route for general q
  int subgradient_iters = 20000;
  double subgradient_rel_tol = 1e-7;
  /// Sign-pattern rows for an l_1 dual ball up to this dimension, auxiliary variables beyond.
  int sign_pattern_max_dim = 4;
};

namespace detail {

/// Gradient of 0.5*|u|_p^2 (the duality map into the conjugate space).
inline Vector duality_map(const Vector& u, double p) {
  const double n = bsa::detail::lp_norm(u, Exponent::finite(p));
  Vector out = Vector::Zero(u.size());
  if (n == 0.0) return out;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double w = u(i) / n;
    const double mag = n * std::pow(std::abs(w), p - 1.0);
    out(i) = w < 0 ? -mag : mag;
  }
  return out;
}

/// Newton solve of min_nu 0.5*|A^T nu|_p^2 - b.nu. The minimizer yields
/// f = J_p(A^T nu), the least l_q-norm solution of A f = b.
struct EqualitySolve {
  Vector nu;
  Vector f;
  bool converged = false;
};

inline EqualitySolve solve_equality_subproblem(const Matrix& a, const Vector& b, double p) {
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * scale;
  auto psi = [&](const Vector& nu) {
    const double n = bsa::detail::lp_norm(a.transpose() * nu, Exponent::finite(p));
    return 0.5 * n * n - b.dot(nu);
  };

  EqualitySolve out;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a * a.transpose());
  out.nu = cod.solve(b);
  for (int it = 0; it < 200; ++it) {
    const Vector u = a.transpose() * out.nu;
    out.f = duality_map(u, p);
    const Vector g = a * out.f - b;
    if (g.cwiseAbs().maxCoeff() <= tol) {
      out.converged = true;
      return out;
    }

    // Hessian of 0.5|u|_p^2 in normalized form: (p-1) diag|w|^(p-2) + (2-p) s s^T.
    const double n = bsa::detail::lp_norm(u, Exponent::finite(p));
    Matrix h = Matrix::Zero(a.rows(), a.rows());
    if (n > 0.0) {
      Vector s(u.size());
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double w = u(i) / n;
        const double mag = std::pow(std::abs(w), p - 1.0);
        s(i) = w < 0 ? -mag : mag;
        if (a.col(i).cwiseAbs().maxCoeff() == 0.0) continue;
        const double d = w == 0.0 ? (p < 2.0 ? 1e12 : 0.0)
                                  : std::min(1e12, (p - 1.0) * std::pow(std::abs(w), p - 2.0));
        h.noalias() += d * a.col(i) * a.col(i).transpose();
      }
      const Vector as = a * s;
      h.noalias() += (2.0 - p) * as * as.transpose();
    }
    h.diagonal().array() += 1e-14 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
    Vector step = -h.ldlt().solve(g);
    if (!step.allFinite() || step.dot(g) >= 0.0) step = -g;

    const double base = psi(out.nu);
    double t = 1.0;
    bool moved = false;
    while (t > 1e-20) {
      const Vector trial = out.nu + t * step;
      if (psi(trial) <= base + 1e-4 * t * g.dot(step)) {
        out.nu = trial;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  // Newton stalls at roundoff level when |A^T nu| has near-zero entries; the
  // remaining residual is removed by the minimal Euclidean correction.
  out.f = duality_map(a.transpose() * out.nu, p);
  const Vector r = a * out.f - b;
  out.converged = r.cwiseAbs().maxCoeff() <= 1e-7 * scale;
  if (out.converged) out.f -= a.transpose() * cod.solve(r);
  return out;
}

inline double row_scale(const Polyhedron& poly) {
  double s = 1.0;
  for (const auto& row : poly.rows) s = std::max(s, std::abs(row.offset));
  return s;
}

inline std::vector<bool> active_rows(const Polyhedron& poly, const Vector& x, double tol) {
  std::vector<bool> active(poly.rows.size(), false);
  for (std::size_t i = 0; i < poly.rows.size(); ++i) {
    const auto& row = poly.rows[i];
    active[i] = std::abs(row.normal.dot(x) - row.offset) <= tol * std::max(1.0, row.normal.norm());
  }
  return active;
}

/// Primal active-set solve of min |f|_q over the polyhedron, q = conjugate
/// of p, started from a feasible point. Each step moves toward the minimizer
/// on the current working set and stops at the first blocking row; blocking
/// rows are never in the span of the working set, so it stays independent.
inline std::optional<Vector> lq_active_set(const Polyhedron& poly, double p, Vector f) {
  using Eigen::Index;
  const Index m = static_cast<Index>(poly.rows.size());
  const double scale = row_scale(poly);
  const double q = p / (p - 1.0);
  std::vector<bool> working = independent_working_set(poly, active_rows(poly, f, 1e-9 * scale));

  for (int iter = 0; iter < 8 * static_cast<int>(m) + 20; ++iter) {
    const std::vector<Index> idx = working_indices(working);
    const Index k = static_cast<Index>(idx.size());
    Vector target = Vector::Zero(poly.dim);
    Matrix a(k, poly.dim);
    if (k > 0) {
      Vector b(k);
      for (Index r = 0; r < k; ++r) {
        const auto& row = poly.rows[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])];
        a.row(r) = row.normal.transpose();
        b(r) = row.offset;
      }
      const auto sub = solve_equality_subproblem(a, b, p);
      if (!sub.converged) return std::nullopt;
      target = sub.f;
    }

    // Ratio test along f -> target.
    const Vector dir = target - f;
    double step = 1.0;
    Index blocking = -1;
    for (std::size_t i = 0; i < poly.rows.size(); ++i) {
      const auto& row = poly.rows[i];
      if (working[i] || row.kind == ConstraintKind::Equal) continue;
      const double rate = row.normal.dot(dir);
      if (rate <= 1e-14 * row.normal.norm() * std::max(dir.norm(), 1e-300)) continue;
      const double room = std::max(0.0, row.offset - row.normal.dot(f));
      if (room / rate < step) {
        step = room / rate;
        blocking = static_cast<Index>(i);
      }
    }
    f += step * dir;
    if (blocking >= 0) {
      working[static_cast<std::size_t>(blocking)] = true;
      continue;
    }

    // At the working-set minimizer. J_q(f) = A^T nu; an active inequality needs nu <= 0.
    if (k == 0) return f;
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a.transpose());
    const Vector nu = cod.solve(duality_map(f, q));
    Index drop = -1;
    double most_positive = 1e-9 * std::max(1e-300, nu.cwiseAbs().maxCoeff());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const auto& row = poly.rows[static_cast<std::size_t>(idx[r])];
      if (row.kind == ConstraintKind::Equal) continue;
      const double v = nu(static_cast<Index>(r)) * row.normal.norm();
      if (v > most_positive) {
        most_positive = v;
        drop = idx[r];
      }
    }
    if (drop < 0) return f;
    working[static_cast<std::size_t>(drop)] = false;
  }
  return std::nullopt;
}


}  // namespace detail

/// Projected subgradient descent for min |f|_q over the polyhedron with
/// diminishing steps; always approximate.
inline MinNormResult min_norm_subgradient(const DualView& dual, const Polyhedron& poly, const Vector& start,
                                          const MinNormOptions& opt = {}) {
  const double q = dual.base.lp_data().p.conjugate().value();
  Vector f = start;
  Vector best = f;
  double best_value = dual.eval(f);
  const double step0 = 0.1 * std::max(f.norm(), 1e-12);
  double last_improvement = 1.0;
  int since_improvement = 0;
  for (int k = 0; k < opt.subgradient_iters; ++k) {
    const double nrm = dual.eval(f);
    if (nrm == 0.0) break;
    Vector g(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double w = f(i) / nrm;
      const double mag = std::pow(std::abs(w), q - 1.0);
      g(i) = w < 0 ? -mag : mag;
    }
    const Vector trial = f - (step0 / std::sqrt(k + 1.0)) * g / std::max(g.norm(), 1e-300);
    const auto proj = project_polyhedron(trial, poly, opt.projection);
    f = proj.point;
    const double v = dual.eval(f);
    if (v < best_value && poly.contains(f, 1e-9 * detail::row_scale(poly))) {
      last_improvement = (best_value - v) / std::max(best_value, 1e-300);
      if (last_improvement < opt.subgradient_rel_tol) ++since_improvement;
      else since_improvement = 0;
      best_value = v;
      best = f;
    } else {
      ++since_improvement;
    }
    if (since_improvement > 200) break;
  }
  MinNormResult out;
  out.status = MinNormStatus::Optimal;
  out.value = best_value;
  out.argmin = best;
  out.approximate = true;
  out.residual = last_improvement;
  return out;
}

/// min{|f|' : f in poly} where |.|' is the dual norm of `dual.base`.
inline MinNormResult min_norm_over_polyhedron(const DualView& dual, const Polyhedron& poly,
                                              const MinNormOptions& opt = {}) {
  validate_polyhedron(poly);
  require_same_dim(poly.dim, dual.dim(), "min_norm_over_polyhedron");
  const Eigen::Index n = poly.dim;

  if (dual.is_polyhedral()) {
    // Variables (f free, t >= 0[, u >= 0]); maximize -t.
    const NormSpec& base = dual.base;
    const bool l1_dual = base.is_lp() && base.lp_data().p.is_infinite();
    const bool use_aux = l1_dual && n > opt.sign_pattern_max_dim;
    const Eigen::Index nv = n + 1 + (use_aux ? n : 0);
    LinearProgram lp;
    lp.objective = Vector::Zero(nv);
    lp.objective(n) = -1.0;
    lp.free_variables.assign(static_cast<std::size_t>(nv), false);
    for (Eigen::Index j = 0; j < n; ++j) lp.free_variables[static_cast<std::size_t>(j)] = true;
    for (const auto& row : poly.rows) {
      Vector r = Vector::Zero(nv);
      r.head(n) = row.normal;
      lp.constraints.push_back({r, row.offset, row.kind});
    }
    auto add_le = [&](const Vector& r) { lp.constraints.push_back({r, 0.0, ConstraintKind::LessEqual}); };
    if (base.is_polytope()) {
      for (const auto& v : base.vertices()) {
        Vector r = Vector::Zero(nv);
        r.head(n) = v;
        r(n) = -1.0;
        add_le(r);
      }
    } else if (!l1_dual) {
      // l_1 primal: dual is the box |f_i| <= t.
      for (Eigen::Index i = 0; i < n; ++i) {
        for (double s : {1.0, -1.0}) {
          Vector r = Vector::Zero(nv);
          r(i) = s;
          r(n) = -1.0;
          add_le(r);
        }
      }
    } else if (!use_aux) {
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        Vector r = Vector::Zero(nv);
        for (Eigen::Index i = 0; i < n; ++i) r(i) = (mask >> i) & 1u ? -1.0 : 1.0;
        r(n) = -1.0;
        add_le(r);
      }
    } else {
      for (Eigen::Index i = 0; i < n; ++i) {
        for (double s : {1.0, -1.0}) {
          Vector r = Vector::Zero(nv);
          r(i) = s;
          r(n + 1 + i) = -1.0;
          add_le(r);
        }
      }
      Vector r = Vector::Zero(nv);
      r.tail(n).setOnes();
      r(n) = -1.0;
      add_le(r);
    }
    const auto res = lp_solve(lp);
    MinNormResult out;
    if (res.status == LpStatus::Infeasible) return out;
    if (res.status != LpStatus::Optimal) {
      throw Error(ErrorCode::NumericalBreakdown, "min-norm LP unbounded");
    }
    out.status = MinNormStatus::Optimal;
    out.argmin = res.optimizer.head(n);
    out.value = dual.eval(out.argmin);
    out.residual = poly.violation(out.argmin);
    return out;
  }

  // Smooth duals: decide feasibility exactly first.
  std::vector<LinearConstraint> rows = poly.rows;
  if (!lp_feasible(rows, n, std::vector<bool>(static_cast<std::size_t>(n), true))) return MinNormResult{};

  // The Euclidean projection of the origin is the q = 2 answer and a warm start otherwise.
  ProjectionResult proj = project_polyhedron(Vector::Zero(n), poly, opt.projection);
  if (proj.status != ProjectionStatus::Converged) {
    // Three doubling budgets; a residual that does not shrink means no convergence is coming.
    double previous = proj.residual;
    bool shrinking = false;
    ProjectionOptions budget = opt.projection;
    for (int attempt = 0; attempt < 3 && proj.status != ProjectionStatus::Converged; ++attempt) {
      budget.max_iter *= 2;
      proj = project_polyhedron(Vector::Zero(n), poly, budget);
      shrinking = proj.residual < previous;
      previous = proj.residual;
    }
    if (proj.status != ProjectionStatus::Converged) {
      MinNormResult out;
      out.status = shrinking ? MinNormStatus::NotConverged : MinNormStatus::Infeasible;
      out.argmin = proj.point;
      out.value = dual.eval(proj.point);
      out.approximate = true;
      out.residual = proj.residual;
      return out;
    }
  }

  MinNormResult out;
  out.status = MinNormStatus::Optimal;
  if (dual.is_euclidean()) {
    out.argmin = proj.point;
    out.value = proj.point.norm();
    out.residual = proj.residual;
    out.approximate = !proj.polished;
    return out;
  }

  const double p = dual.base.lp_data().p.value();
  if (opt.exact_active_set) {
    if (auto f = detail::lq_active_set(poly, p, proj.point)) {
      out.argmin = *f;
      out.value = dual.eval(*f);
      out.residual = poly.violation(*f);
      return out;
    }
  }
  return min_norm_subgradient(dual, poly, proj.point, opt);
}

/// Operator norm of T: domain -> codomain. Exact for polyhedral domains
/// (max over vertices); power iteration on T^T T for l_2 -> l_2.
inline double operator_norm(const Matrix& t, const NormSpec& domain, const NormSpec& codomain,
                            std::uint64_t seed = 0) {
  require_same_dim(t.cols(), domain.dim(), "operator_norm domain");
  require_same_dim(t.rows(), codomain.dim(), "operator_norm codomain");
  if (domain.is_polyhedral()) {
    const NormSpec ball = explicit_polytope(domain);
    double best = 0.0;
    for (const auto& v : ball.vertices()) best = std::max(best, norm_eval(codomain, t * v));
    return best;
  }
  const bool l2_domain = domain.is_lp() && domain.lp_data().p.is_two();
  const bool l2_codomain = codomain.is_lp() && codomain.lp_data().p.is_two();
  if (!(l2_domain && l2_codomain)) {
    throw Error(ErrorCode::UnsupportedNormPair, "operator_norm needs a polyhedral domain or l_2 -> l_2");
  }

  const Matrix gram = t.transpose() * t;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vector v(t.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = gauss(rng);
  if (v.norm() == 0.0) v.setOnes();
  v.normalize();
  double lambda = v.dot(gram * v);
  for (int it = 0; it < 100000; ++it) {
    Vector w = gram * v;
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    const double next = v.dot(gram * v);
    const bool done = std::abs(next - lambda) <= 1e-13 * std::max(next, 1e-300);
    lambda = next;
    if (done) break;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace bsa::convex
