#pragma once

// Finite-dimensional norms: l_p (1 <= p <= inf) and centrally symmetric
// polytope balls described by their vertices. Provides primal and dual
// evaluation, norming (support) points, the union renorming
// conv(B u {+-points}) and polyhedral approximations of smooth l_p balls.

#include "bsa/convex/linear_program.hpp"
#include "bsa/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <variant>
#include <vector>

namespace bsa {

/// An l_p exponent; p = inf is a distinguished value, never a float infinity.
class Exponent {
 public:
  static Exponent infinity() { return Exponent(0.0, true); }
  static Exponent finite(double p) { return Exponent(p, false); }
  /// Maps +inf onto the distinguished value.
  static Exponent from_double(double p) { return std::isinf(p) && p > 0 ? infinity() : finite(p); }

  bool is_infinite() const { return infinite_; }
  /// Finite value; meaningless when is_infinite().
  double value() const { return value_; }
  bool is_one() const { return !infinite_ && value_ == 1.0; }
  bool is_two() const { return !infinite_ && value_ == 2.0; }
  bool is_polyhedral() const { return infinite_ || value_ == 1.0; }

  /// Hoelder conjugate q with 1/p + 1/q = 1.
  Exponent conjugate() const {
    if (infinite_) return finite(1.0);
    if (value_ == 1.0) return infinity();
    return finite(value_ / (value_ - 1.0));
  }

  bool operator==(const Exponent& o) const {
    return infinite_ == o.infinite_ && (infinite_ || value_ == o.value_);
  }

 private:
  Exponent(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

struct LpNorm {
  Exponent p = Exponent::finite(2.0);
  Eigen::Index dim = 0;
};

struct PolytopeNorm {
  std::vector<Vector> vertices;
  Eigen::Index dim = 0;
};

class NormSpec {
 public:
  static NormSpec lp(double p, Eigen::Index dim) { return lp(Exponent::from_double(p), dim); }
  static NormSpec lp(Exponent p, Eigen::Index dim) {
    NormSpec s;
    s.data_ = LpNorm{p, dim};
    return s;
  }
  static NormSpec lp_inf(Eigen::Index dim) { return lp(Exponent::infinity(), dim); }

  /// Raw polytope; no validation. Pass through validate_space() before use.
  static NormSpec unchecked_polytope(std::vector<Vector> vertices) {
    NormSpec s;
    const Eigen::Index dim = vertices.empty() ? 0 : vertices.front().size();
    s.data_ = PolytopeNorm{std::move(vertices), dim};
    return s;
  }
  /// Validated and canonicalized polytope.
  static NormSpec polytope(std::vector<Vector> vertices);

  bool is_lp() const { return std::holds_alternative<LpNorm>(data_); }
  bool is_polytope() const { return std::holds_alternative<PolytopeNorm>(data_); }
  const LpNorm& lp_data() const { return std::get<LpNorm>(data_); }
  const PolytopeNorm& polytope_data() const { return std::get<PolytopeNorm>(data_); }
  const std::vector<Vector>& vertices() const { return polytope_data().vertices; }

  Eigen::Index dim() const {
    return is_lp() ? lp_data().dim : polytope_data().dim;
  }

  /// True when the unit ball (and hence the dual ball) is a polytope.
  bool is_polyhedral() const { return is_polytope() || lp_data().p.is_polyhedral(); }

  bool operator==(const NormSpec& o) const {
    if (is_lp() != o.is_lp()) return false;
    if (is_lp()) return lp_data().p == o.lp_data().p && dim() == o.dim();
    const auto& a = vertices();
    const auto& b = o.vertices();
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].size() != b[i].size() || a[i] != b[i]) return false;
    }
    return true;
  }

 private:
  std::variant<LpNorm, PolytopeNorm> data_;
};

// ---------------------------------------------------------------------------
// l_p closed forms

namespace detail {

inline double lp_norm(const Vector& x, const Exponent& p) {
  if (x.size() == 0) return 0.0;
  const double m = x.cwiseAbs().maxCoeff();
  if (p.is_infinite() || m == 0.0) return m;
  if (p.is_one()) return x.cwiseAbs().sum();
  if (p.is_two()) return x.norm();
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x(i)) / m, p.value());
  return m * std::pow(s, 1.0 / p.value());
}

/// x in the convex hull of `others` (lambda >= 0, sum lambda = 1)?
inline bool in_hull(const Vector& x, const std::vector<Vector>& others) {
  if (others.empty()) return false;
  const Eigen::Index k = static_cast<Eigen::Index>(others.size());
  std::vector<convex::LinearConstraint> rows;
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    Vector row(k);
    for (Eigen::Index j = 0; j < k; ++j) row(j) = others[static_cast<std::size_t>(j)](d);
    rows.push_back({row, x(d), convex::ConstraintKind::Equal});
  }
  rows.push_back({Vector::Ones(k), 1.0, convex::ConstraintKind::Equal});
  return convex::lp_feasible(rows, k);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Validation

/// Canonicalizes a norm: l_p specs are checked, polytope vertex lists lose
/// duplicates and non-extreme points. Symmetry is checked, never completed.
inline NormSpec validate_space(const NormSpec& spec) {
  if (spec.is_lp()) {
    const auto& lp = spec.lp_data();
    if (!lp.p.is_infinite() && !(lp.p.value() >= 1.0 && std::isfinite(lp.p.value()))) {
      throw Error(ErrorCode::BadExponent, "p must satisfy 1 <= p <= inf");
    }
    if (lp.dim < 1) throw Error(ErrorCode::DegenerateBall, "dimension must be positive");
    return spec;
  }

  const auto& raw = spec.vertices();
  if (raw.empty()) throw Error(ErrorCode::DegenerateBall, "polytope has no vertices");
  const Eigen::Index dim = raw.front().size();
  if (dim < 1) throw Error(ErrorCode::DegenerateBall, "zero-dimensional vertex");
  for (const auto& v : raw) {
    require_same_dim(v.size(), dim, "polytope vertex");
    if (!v.allFinite()) throw Error(ErrorCode::InvalidInput, "non-finite polytope vertex");
  }

  constexpr double kSymTol = 1e-12;
  auto close = [&](const Vector& a, const Vector& b) {
    return (a - b).cwiseAbs().maxCoeff() <= kSymTol * std::max(1.0, a.cwiseAbs().maxCoeff());
  };

  for (const auto& v : raw) {
    const bool has_mirror = std::any_of(raw.begin(), raw.end(), [&](const Vector& w) { return close(w, -v); });
    if (!has_mirror) throw Error(ErrorCode::NotSymmetric, "missing the reflection of a vertex");
  }

  std::vector<Vector> unique;
  for (const auto& v : raw) {
    if (v.cwiseAbs().maxCoeff() == 0.0) continue;
    if (std::none_of(unique.begin(), unique.end(), [&](const Vector& w) { return close(w, v); })) {
      unique.push_back(v);
    }
  }
  if (unique.empty()) throw Error(ErrorCode::DegenerateBall, "all vertices are zero");

  Matrix span(dim, static_cast<Eigen::Index>(unique.size()));
  for (std::size_t j = 0; j < unique.size(); ++j) span.col(static_cast<Eigen::Index>(j)) = unique[j];
  Eigen::FullPivLU<Matrix> lu(span);
  lu.setThreshold(1e-10);
  if (lu.rank() < dim) throw Error(ErrorCode::DegenerateBall, "vertices do not span the space");

  // Drop points inside the hull of the remaining ones. Removing a non-extreme
  // point leaves the hull unchanged, so a single ordered pass suffices.
  std::vector<bool> keep(unique.size(), true);
  for (std::size_t i = 0; i < unique.size(); ++i) {
    std::vector<Vector> others;
    for (std::size_t j = 0; j < unique.size(); ++j) {
      if (j != i && keep[j]) others.push_back(unique[j]);
    }
    if (detail::in_hull(unique[i], others)) keep[i] = false;
  }
  std::vector<Vector> extreme;
  for (std::size_t i = 0; i < unique.size(); ++i) {
    if (keep[i]) extreme.push_back(unique[i]);
  }
  return NormSpec::unchecked_polytope(std::move(extreme));
}

inline NormSpec NormSpec::polytope(std::vector<Vector> vertices) {
  return validate_space(unchecked_polytope(std::move(vertices)));
}

// ---------------------------------------------------------------------------
// Evaluation

/// Primal norm. Polytope balls use the Minkowski functional
/// min{sum a_i : a >= 0, sum a_i v_i = x}.
inline double norm_eval(const NormSpec& spec, const Vector& x) {
  require_same_dim(x.size(), spec.dim(), "norm_eval");
  if (spec.is_lp()) return detail::lp_norm(x, spec.lp_data().p);
  if (x.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  const auto& verts = spec.vertices();
  const Eigen::Index k = static_cast<Eigen::Index>(verts.size());
  convex::LinearProgram lp;
  lp.objective = -Vector::Ones(k);
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    Vector row(k);
    for (Eigen::Index j = 0; j < k; ++j) row(j) = verts[static_cast<std::size_t>(j)](d);
    lp.constraints.push_back({row, x(d), convex::ConstraintKind::Equal});
  }
  const auto res = convex::lp_solve(lp);
  if (res.status != convex::LpStatus::Optimal) {
    throw Error(ErrorCode::NumericalBreakdown, "Minkowski functional LP did not solve");
  }
  return -res.value;
}

/// Dual norm sup{f.x : |x| <= 1}.
inline double dual_norm_eval(const NormSpec& spec, const Vector& f) {
  require_same_dim(f.size(), spec.dim(), "dual_norm_eval");
  if (spec.is_lp()) return detail::lp_norm(f, spec.lp_data().p.conjugate());
  double best = 0.0;
  for (const auto& v : spec.vertices()) best = std::max(best, std::abs(f.dot(v)));
  return best;
}

/// A unit vector x with f.x equal to the dual norm of f. Ties go to the lowest index.
inline Vector support_point(const NormSpec& spec, const Vector& f) {
  require_same_dim(f.size(), spec.dim(), "support_point");
  if (f.cwiseAbs().maxCoeff() == 0.0) throw Error(ErrorCode::ZeroFunctional, "support_point of zero");
  const Eigen::Index n = f.size();

  if (spec.is_polytope()) {
    const auto& verts = spec.vertices();
    std::size_t best = 0;
    for (std::size_t i = 1; i < verts.size(); ++i) {
      if (f.dot(verts[i]) > f.dot(verts[best])) best = i;
    }
    return verts[best];
  }

  const Exponent p = spec.lp_data().p;
  Vector x = Vector::Zero(n);
  if (p.is_one()) {
    Eigen::Index k = 0;
    for (Eigen::Index i = 1; i < n; ++i) {
      if (std::abs(f(i)) > std::abs(f(k))) k = i;
    }
    x(k) = f(k) > 0 ? 1.0 : -1.0;
    return x;
  }
  if (p.is_infinite()) {
    for (Eigen::Index i = 0; i < n; ++i) x(i) = f(i) < 0 ? -1.0 : 1.0;
    return x;
  }
  const double q = p.conjugate().value();
  const Vector g = f / detail::lp_norm(f, p.conjugate());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mag = std::pow(std::abs(g(i)), q - 1.0);
    x(i) = g(i) < 0 ? -mag : mag;
  }
  return x;
}

/// The dual space (X*, |.|') of a norm.
struct DualView {
  NormSpec base;

  double eval(const Vector& f) const { return dual_norm_eval(base, f); }
  Eigen::Index dim() const { return base.dim(); }
  /// Euclidean dual (base is l_2).
  bool is_euclidean() const { return base.is_lp() && base.lp_data().p.is_two(); }
  bool is_polyhedral() const { return base.is_polyhedral(); }
};

// ---------------------------------------------------------------------------
// Constructions of new norms

/// Explicit vertex description of l_1 (cross-polytope) or l_inf (cube) balls.
inline NormSpec explicit_polytope(const NormSpec& spec) {
  if (spec.is_polytope()) return spec;
  const auto& lp = spec.lp_data();
  const Eigen::Index n = lp.dim;
  std::vector<Vector> verts;
  if (lp.p.is_one() || n == 1) {
    for (Eigen::Index i = 0; i < n; ++i) {
      verts.push_back(unit_vector(n, i));
      verts.push_back(-unit_vector(n, i));
    }
    return NormSpec::unchecked_polytope(std::move(verts));
  }
  if (lp.p.is_infinite()) {
    if (n > 12) throw Error(ErrorCode::UnsupportedDimension, "cube vertex list limited to dim <= 12");
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      Vector v(n);
      for (Eigen::Index i = 0; i < n; ++i) v(i) = (mask >> i) & 1u ? -1.0 : 1.0;
      verts.push_back(v);
    }
    return NormSpec::unchecked_polytope(std::move(verts));
  }
  throw Error(ErrorCode::NotPolytope, "l_p ball with 1 < p < inf is not a polytope");
}

/// conv(B_base u {+-points}); the caller supplies the scaled points.
inline NormSpec renorm_union(const NormSpec& base, const std::vector<Vector>& points) {
  if (!base.is_polytope()) throw Error(ErrorCode::NotPolytope, "renorm_union needs a polytope base");
  std::vector<Vector> verts = base.vertices();
  for (const auto& p : points) {
    require_same_dim(p.size(), base.dim(), "renorm_union point");
    verts.push_back(p);
    verts.push_back(-p);
  }
  return validate_space(NormSpec::unchecked_polytope(std::move(verts)));
}

struct PolyhedralApprox {
  NormSpec space;
  /// Upper bound r with |x|_approx <= r |x|_p; always |x|_approx >= |x|_p.
  double ratio_bound = 1.0;
  /// True when ratio_bound is exact (dims 1-2, polyhedral p); dim 3 uses a dense sample.
  bool ratio_exact = true;
};

namespace detail {

inline std::vector<Vector> fibonacci_sphere(int count) {
  std::vector<Vector> pts;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts.push_back(make_vector({r * std::cos(phi), r * std::sin(phi), z}));
  }
  return pts;
}

inline double snap(double x) { return std::abs(x) < 1e-15 ? 0.0 : x; }

}  // namespace detail

/// Inscribed polytope with vertices on the l_p sphere along a deterministic
/// symmetric direction grid: uniform angles in dim 2, a Fibonacci sphere
/// united with its antipodes in dim 3.
inline PolyhedralApprox polyhedral_approx(const NormSpec& spec, int direction_count) {
  if (!spec.is_lp()) throw Error(ErrorCode::InvalidInput, "polyhedral_approx expects an l_p norm");
  const auto& lp = spec.lp_data();
  if (lp.p.is_polyhedral() || lp.dim == 1) {
    return {validate_space(explicit_polytope(lp.dim == 1 ? NormSpec::lp(1.0, 1) : spec)), 1.0, true};
  }
  if (lp.dim > 3) throw Error(ErrorCode::UnsupportedDimension, "polyhedral_approx supports dim <= 3");
  if (direction_count < 4) throw Error(ErrorCode::InvalidInput, "need at least 4 directions");

  std::vector<Vector> dirs;
  if (lp.dim == 2) {
    const int half = (direction_count + 1) / 2;
    for (int k = 0; k < half; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / (2.0 * half);
      dirs.push_back(make_vector({detail::snap(std::cos(theta)), detail::snap(std::sin(theta))}));
    }
  } else {
    dirs = detail::fibonacci_sphere(direction_count);
  }
  std::vector<Vector> verts;
  for (const auto& d : dirs) {
    const Vector v = d / detail::lp_norm(d, lp.p);
    verts.push_back(v);
    verts.push_back(-v);
  }
  NormSpec poly = validate_space(NormSpec::unchecked_polytope(std::move(verts)));

  PolyhedralApprox out{poly, 1.0, lp.dim == 2};
  if (lp.dim == 2) {
    // Edges join angularly consecutive vertices; the ratio is 1 / min |x|_p on the boundary.
    auto ordered = poly.vertices();
    std::sort(ordered.begin(), ordered.end(), [](const Vector& a, const Vector& b) {
      return std::atan2(a(1), a(0)) < std::atan2(b(1), b(0));
    });
    double min_norm = 1.0;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      const Vector& a = ordered[i];
      const Vector& b = ordered[(i + 1) % ordered.size()];
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (detail::lp_norm(a + m1 * (b - a), lp.p) < detail::lp_norm(a + m2 * (b - a), lp.p)) {
          hi = m2;
        } else {
          lo = m1;
        }
      }
      min_norm = std::min(min_norm, detail::lp_norm(a + 0.5 * (lo + hi) * (b - a), lp.p));
    }
    out.ratio_bound = 1.0 / min_norm;
  } else {
    double worst = 1.0;
    for (const auto& u : detail::fibonacci_sphere(8 * direction_count + 1)) {
      worst = std::max(worst, norm_eval(poly, u) / detail::lp_norm(u, lp.p));
    }
    out.ratio_bound = worst;
  }
  return out;
}

}  // namespace bsa
