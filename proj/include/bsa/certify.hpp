#pragma once

// Bounded-and-separated-antipodal (b.s.a.) certificates.
//
// A finite set S is a (c1, c2, d)-b.s.a. set when every point has norm <= c1
// and every pair x != y admits a functional f with dual norm <= c2,
// f(y) - f(x) >= d > 0 and f(x) <= f(z) <= f(y) for all z in S.
//
// The optimal margin of a pair,
//   d*(x, y; S) = max{ f(y) - f(x) : |f|' <= 1, f(x) <= f(z) <= f(y) },
// is computed through the normalization
//   d* = 1 / min{ |f|' : f.(y - x) = 1, f.(z - x) >= 0, f.(y - z) >= 0 }.

#include "bsa/convex/min_norm.hpp"
#include "bsa/normed_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bsa {

/// A finite point set in a normed space; points are pairwise distinct.
class PointSet {
 public:
  PointSet(NormSpec space, std::vector<Vector> points) : space_(std::move(space)), points_(std::move(points)) {
    for (const auto& p : points_) {
      require_same_dim(p.size(), space_.dim(), "PointSet point");
      if (!p.allFinite()) throw Error(ErrorCode::InvalidInput, "PointSet: non-finite coordinate");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
      for (std::size_t j = i + 1; j < points_.size(); ++j) {
        if (norm_eval(space_, points_[i] - points_[j]) <= 1e-12) {
          throw Error(ErrorCode::DuplicatePoint,
                      "points " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
        }
      }
    }
  }

  const NormSpec& space() const { return space_; }
  const std::vector<Vector>& points() const { return points_; }
  const Vector& operator[](std::size_t i) const { return points_[i]; }
  std::size_t size() const { return points_.size(); }
  Eigen::Index dim() const { return space_.dim(); }

  /// The set {alpha x : x in S}.
  PointSet scaled(double alpha) const {
    std::vector<Vector> pts;
    for (const auto& p : points_) pts.push_back(alpha * p);
    return PointSet(space_, std::move(pts));
  }

 private:
  NormSpec space_;
  std::vector<Vector> points_;
};

struct Functional {
  Vector coeffs;
  double dual_norm = 0.0;

  static Functional make(const NormSpec& space, Vector coeffs) {
    const double dn = dual_norm_eval(space, coeffs);
    return Functional{std::move(coeffs), dn};
  }
  double operator()(const Vector& x) const { return coeffs.dot(x); }
};

/// Separating data for one unordered pair: `functional` is maximal at
/// points[upper] and minimal at points[lower].
struct PairCertificate {
  std::size_t upper = 0;
  std::size_t lower = 0;
  Functional functional;
  double margin = 0.0;
};

struct BsaCertificate {
  PointSet set;
  std::vector<PairCertificate> pairs;
  double c1 = 0.0;
  double c2 = 0.0;
  double d = 0.0;

  const PairCertificate* find(std::size_t i, std::size_t j) const {
    for (const auto& pc : pairs) {
      if ((pc.upper == i && pc.lower == j) || (pc.upper == j && pc.lower == i)) return &pc;
    }
    return nullptr;
  }
};

struct PairMargin {
  std::size_t upper = 0;
  std::size_t lower = 0;
  double margin = 0.0;
  double distance = 0.0;
};

struct MarginReport {
  std::vector<PairMargin> margins;
  double d = 0.0;           // min pair margin
  double separation = 0.0;  // min pairwise distance
  double c1 = 0.0;          // max point norm
  double ka_lower = 0.0;    // b.s.a. constant of S / max(c1, 1)
  double k_lower = 0.0;     // separation of S / max(c1, 1)
  bool approximate = false; // some margin came from the approximate route
};

struct Violation {
  std::optional<std::pair<std::size_t, std::size_t>> pair;  // (upper, lower); empty for point/global checks
  std::optional<std::size_t> point;
  std::string inequality;
  double slack = 0.0;  // negative: amount by which the inequality fails
};

struct Verdict {
  bool valid = true;
  /// d > tol, i.e. the certified margins are strictly positive (the set is antipodal).
  bool separated = false;
  std::vector<Violation> violations;
};

// ---------------------------------------------------------------------------

/// Re-checks every inequality of the certificate against its stated (c1, c2, d).
inline Verdict check_certificate(const BsaCertificate& cert, double tol = 1e-7) {
  const auto& set = cert.set;
  const auto& space = set.space();
  Verdict verdict;
  auto fail = [&](Violation v) {
    verdict.valid = false;
    verdict.violations.push_back(std::move(v));
  };

  for (std::size_t i = 0; i < set.size(); ++i) {
    const double slack = cert.c1 - norm_eval(space, set[i]);
    if (slack < -tol) fail({std::nullopt, i, "norm<=c1", slack});
  }

  std::vector<std::vector<int>> seen(set.size(), std::vector<int>(set.size(), 0));
  for (const auto& pc : cert.pairs) {
    if (pc.upper >= set.size() || pc.lower >= set.size() || pc.upper == pc.lower) {
      throw Error(ErrorCode::IndexError, "certificate pair index out of range");
    }
    require_same_dim(pc.functional.coeffs.size(), space.dim(), "certificate functional");
    const std::pair<std::size_t, std::size_t> key{pc.upper, pc.lower};
    ++seen[std::min(pc.upper, pc.lower)][std::max(pc.upper, pc.lower)];

    const auto& f = pc.functional;
    const double dn = dual_norm_eval(space, f.coeffs);
    if (std::abs(dn - f.dual_norm) > tol) fail({key, std::nullopt, "cached_dual_norm", -std::abs(dn - f.dual_norm)});
    if (cert.c2 - dn < -tol) fail({key, std::nullopt, "dual_norm<=c2", cert.c2 - dn});

    const double fy = f(set[pc.upper]);
    const double fx = f(set[pc.lower]);
    if (fy - fx - cert.d < -tol) fail({key, std::nullopt, "f(y)-f(x)>=d", fy - fx - cert.d});
    if (std::abs(pc.margin - (fy - fx)) > tol) {
      fail({key, std::nullopt, "margin=f(y)-f(x)", -std::abs(pc.margin - (fy - fx))});
    }
    for (std::size_t k = 0; k < set.size(); ++k) {
      if (k == pc.upper || k == pc.lower) continue;
      const double fz = f(set[k]);
      if (fz - fx < -tol) fail({key, k, "f(x)<=f(z)", fz - fx});
      if (fy - fz < -tol) fail({key, k, "f(z)<=f(y)", fy - fz});
    }
  }
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      if (seen[i][j] == 0) fail({std::pair{i, j}, std::nullopt, "pair_present", -1.0});
      if (seen[i][j] > 1) fail({std::pair{i, j}, std::nullopt, "pair_unique", -1.0});
    }
  }
  verdict.separated = cert.d > tol;
  return verdict;
}

struct PairMarginResult {
  double margin = 0.0;
  Functional functional;
  bool approximate = false;
};

/// Builds the normalized margin program for the oriented pair (y, x).
inline convex::Polyhedron margin_polyhedron(const PointSet& set, std::size_t y_index, std::size_t x_index) {
  const Vector& y = set[y_index];
  const Vector& x = set[x_index];
  convex::Polyhedron poly;
  poly.dim = set.dim();
  poly.rows.push_back({y - x, 1.0, convex::ConstraintKind::Equal});
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (k == y_index || k == x_index) continue;
    poly.rows.push_back({x - set[k], 0.0, convex::ConstraintKind::LessEqual});  // f(z - x) >= 0
    poly.rows.push_back({set[k] - y, 0.0, convex::ConstraintKind::LessEqual});  // f(y - z) >= 0
  }
  return poly;
}

/// Optimal margin d*(x, y; S) and a unit functional attaining it. Margin 0
/// with the zero functional when no admissible functional exists.
inline PairMarginResult pair_margin(const PointSet& set, std::size_t y_index, std::size_t x_index,
                                    const convex::MinNormOptions& opt = {}) {
  if (y_index >= set.size() || x_index >= set.size() || y_index == x_index) {
    throw Error(ErrorCode::IndexError, "pair_margin: indices must be distinct and in range");
  }
  const NormSpec& space = set.space();
  const auto poly = margin_polyhedron(set, y_index, x_index);
  auto res = convex::min_norm_over_polyhedron(DualView{space}, poly, opt);

  PairMarginResult out;
  out.functional = Functional{Vector::Zero(set.dim()), 0.0};
  if (res.status == convex::MinNormStatus::Infeasible) return out;
  if (res.status == convex::MinNormStatus::NotConverged) {
    throw Error(ErrorCode::NumericalBreakdown, "pair_margin: margin program did not converge");
  }

  Vector f = res.argmin;
  out.approximate = res.approximate;
  if (!poly.contains(f, 1e-10)) {
    // Approximate routes may leave a small violation; projecting restores feasibility.
    f = convex::project_polyhedron(f, poly).point;
  }
  const double dn = dual_norm_eval(space, f);
  if (dn <= 0.0) return out;
  const Vector unit = f / dn;
  out.functional = Functional::make(space, unit);
  out.margin = std::max(0.0, out.functional(set[y_index]) - out.functional(set[x_index]));
  return out;
}

/// Minimum pairwise distance.
inline double separation(const PointSet& set) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      best = std::min(best, norm_eval(set.space(), set[i] - set[j]));
    }
  }
  return best;
}

struct CertifyResult {
  MarginReport report;
  BsaCertificate certificate;
};

/// Certifies every unordered pair (both orientations, the larger kept) and
/// assembles the report and a (c1, 1, d) certificate.
inline CertifyResult certify_set(const PointSet& set, const convex::MinNormOptions& opt = {}) {
  if (set.size() < 2) throw Error(ErrorCode::TooSmall, "certify_set needs at least two points");
  const NormSpec& space = set.space();

  MarginReport report;
  std::vector<PairCertificate> pairs;
  double c1 = 0.0;
  for (const auto& p : set.points()) c1 = std::max(c1, norm_eval(space, p));

  double d = std::numeric_limits<double>::infinity();
  double sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      auto forward = pair_margin(set, j, i, opt);
      auto backward = pair_margin(set, i, j, opt);
      const bool keep_forward = forward.margin >= backward.margin;
      auto& best = keep_forward ? forward : backward;
      PairCertificate pc;
      pc.upper = keep_forward ? j : i;
      pc.lower = keep_forward ? i : j;
      pc.functional = best.functional;
      pc.margin = best.margin;
      const double dist = norm_eval(space, set[i] - set[j]);
      report.margins.push_back({pc.upper, pc.lower, pc.margin, dist});
      report.approximate = report.approximate || best.approximate;
      d = std::min(d, pc.margin);
      sep = std::min(sep, dist);
      pairs.push_back(std::move(pc));
    }
  }
  report.d = d;
  report.separation = sep;
  report.c1 = c1;
  const double shrink = std::max(c1, 1.0);
  report.ka_lower = d / shrink;
  report.k_lower = sep / shrink;

  BsaCertificate cert{set, std::move(pairs), c1, 1.0, d};
  return {std::move(report), std::move(cert)};
}

inline bool is_antipodal(const PointSet& set, double tol = 1e-9, const convex::MinNormOptions& opt = {}) {
  if (set.size() < 2) throw Error(ErrorCode::TooSmall, "is_antipodal needs at least two points");
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      // The margin is symmetric under f -> -f, so one orientation decides.
      if (std::max(pair_margin(set, j, i, opt).margin, pair_margin(set, i, j, opt).margin) <= tol) return false;
    }
  }
  return true;
}

struct EquilateralResult {
  bool flag = false;
  double lambda = 0.0;  // mean pairwise distance
};

inline EquilateralResult is_equilateral(const PointSet& set, double tol = 1e-9) {
  if (set.size() < 2) throw Error(ErrorCode::TooSmall, "is_equilateral needs at least two points");
  std::vector<double> dists;
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) dists.push_back(norm_eval(set.space(), set[i] - set[j]));
  }
  double mean = 0.0;
  for (double x : dists) mean += x;
  mean /= static_cast<double>(dists.size());
  const bool flag = std::all_of(dists.begin(), dists.end(), [&](double x) { return std::abs(x - mean) <= tol; });
  return {flag, mean};
}

struct TransportResult {
  BsaCertificate certificate;
  double delta = 1.0;          // |T|
  double inverse_norm = 1.0;   // |T^{-1}|
};

/// Moves a certificate through an isomorphism T with |T^{-1}| <= 1:
/// z_i = T y_i / delta and g = f o T^{-1}, where delta = |T|.
inline TransportResult transport_certificate(const BsaCertificate& cert, const Matrix& t, const NormSpec& target,
                                             double tol = 1e-7) {
  const NormSpec& source = cert.set.space();
  require_same_dim(t.cols(), source.dim(), "transport_certificate T columns");
  require_same_dim(t.rows(), target.dim(), "transport_certificate T rows");
  if (t.rows() != t.cols()) throw Error(ErrorCode::NotInvertible, "T must be square");
  Eigen::FullPivLU<Matrix> lu(t);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw Error(ErrorCode::NotInvertible, "T is singular");
  const Matrix t_inv = lu.inverse();

  const double inv_norm = convex::operator_norm(t_inv, target, source);
  if (inv_norm > 1.0 + 1e-9) {
    throw Error(ErrorCode::NormBoundViolated, "|T^-1| = " + std::to_string(inv_norm) + " exceeds 1");
  }
  const double delta = convex::operator_norm(t, source, target);

  std::vector<Vector> pts;
  for (const auto& y : cert.set.points()) pts.push_back(t * y / delta);
  PointSet image(target, std::move(pts));

  std::vector<PairCertificate> pairs;
  double d = std::numeric_limits<double>::infinity();
  double c2 = 0.0;
  for (const auto& pc : cert.pairs) {
    PairCertificate out;
    out.upper = pc.upper;
    out.lower = pc.lower;
    out.functional = Functional::make(target, t_inv.transpose() * pc.functional.coeffs);
    out.margin = out.functional(image[pc.upper]) - out.functional(image[pc.lower]);
    d = std::min(d, out.margin);
    c2 = std::max(c2, out.functional.dual_norm);
    pairs.push_back(std::move(out));
  }
  double c1 = 0.0;
  for (const auto& z : image.points()) c1 = std::max(c1, norm_eval(target, z));
  if (pairs.empty()) d = 0.0;

  TransportResult result{BsaCertificate{std::move(image), std::move(pairs), c1, c2, d}, delta, inv_norm};
  const auto verdict = check_certificate(result.certificate, tol);
  if (!verdict.valid) throw Error(ErrorCode::NumericalBreakdown, "transported certificate failed re-verification");
  return result;
}

}  // namespace bsa
