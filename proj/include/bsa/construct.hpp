#pragma once

// Generators for explicit b.s.a. families. Each returns the point set together
// with hand-built separating functionals, so the claimed constants can be
// re-checked by check_certificate independently of the margin solver.

#include "bsa/certify.hpp"

#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace bsa {

struct NamedFamily {
  PointSet set;
  std::vector<PairCertificate> pairs;
  double c1 = 1.0;
  double c2 = 1.0;
  double d = 0.0;
  std::string provenance;
  std::map<std::string, double> parameters;

  BsaCertificate certificate() const { return {set, pairs, c1, c2, d}; }
};

struct AuerbachSystem {
  std::vector<Vector> vectors;
  std::vector<Vector> functionals;
  NormSpec space;
  std::vector<double> determinant_history;  // |det| after each sweep, starting value first
  int sweeps = 0;
};

/// Largest deviation from |x_i| = 1, |x_i*| = 1 and x_i*(x_j) = delta_ij.
inline double auerbach_defect(const AuerbachSystem& sys) {
  double worst = 0.0;
  for (std::size_t i = 0; i < sys.vectors.size(); ++i) {
    worst = std::max(worst, std::abs(norm_eval(sys.space, sys.vectors[i]) - 1.0));
    worst = std::max(worst, std::abs(dual_norm_eval(sys.space, sys.functionals[i]) - 1.0));
    for (std::size_t j = 0; j < sys.vectors.size(); ++j) {
      worst = std::max(worst, std::abs(sys.functionals[i].dot(sys.vectors[j]) - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

namespace detail {

inline PairCertificate oriented_pair(const NormSpec& space, const PointSet& set, std::size_t upper, std::size_t lower,
                                     Vector coeffs) {
  auto f = Functional::make(space, std::move(coeffs));
  const double margin = f(set[upper]) - f(set[lower]);
  return {upper, lower, std::move(f), margin};
}

inline std::string format_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

inline void require_valid_system(const AuerbachSystem& sys) {
  if (sys.vectors.size() != sys.functionals.size() || sys.vectors.empty()) {
    throw Error(ErrorCode::InvalidInput, "Auerbach system needs matching nonempty vectors and functionals");
  }
  for (const auto& v : sys.vectors) require_same_dim(v.size(), sys.space.dim(), "Auerbach vector");
  for (const auto& f : sys.functionals) require_same_dim(f.size(), sys.space.dim(), "Auerbach functional");
  if (auerbach_defect(sys) > 1e-7) throw Error(ErrorCode::InvalidInput, "not an Auerbach system");
}

}  // namespace detail

/// Canonical basis of l_p^n with g_kl = 2^{1/p-1}(e_k* - e_l*); claimed (1, 1, 2^{1/p}).
inline NamedFamily lp_basis_family(Exponent p, Eigen::Index n) {
  if (p.is_infinite()) throw Error(ErrorCode::UseSummingFamily, "use the summing family for p = inf");
  if (n < 2) throw Error(ErrorCode::TooSmall, "lp_basis_family needs n >= 2");
  const NormSpec space = validate_space(NormSpec::lp(p, n));
  std::vector<Vector> pts;
  for (Eigen::Index i = 0; i < n; ++i) pts.push_back(unit_vector(n, i));
  PointSet set(space, std::move(pts));

  const double c = std::pow(2.0, 1.0 / p.value() - 1.0);
  std::vector<PairCertificate> pairs;
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = k + 1; l < n; ++l) {
      pairs.push_back(detail::oriented_pair(space, set, static_cast<std::size_t>(k), static_cast<std::size_t>(l),
                                            c * (unit_vector(n, k) - unit_vector(n, l))));
    }
  }
  NamedFamily fam{std::move(set), std::move(pairs), 1.0, 1.0, std::pow(2.0, 1.0 / p.value()), "lp-basis", {}};
  fam.parameters["p"] = p.value();
  fam.parameters["n"] = static_cast<double>(n);
  return fam;
}

inline NamedFamily lp_basis_family(double p, Eigen::Index n) { return lp_basis_family(Exponent::from_double(p), n); }

/// y_m = e_1 + ... + e_m - e_{m+1} in l_inf^n, m = 1..n-1; pair (m < m') separated
/// by e_{m+1}*. Claimed (1, 1, 2).
inline NamedFamily summing_family(Eigen::Index n) {
  if (n < 3) throw Error(ErrorCode::TooSmall, "summing_family needs n >= 3");
  const NormSpec space = NormSpec::lp_inf(n);
  std::vector<Vector> pts;
  for (Eigen::Index m = 1; m < n; ++m) {
    Vector y = Vector::Zero(n);
    y.head(m).setOnes();
    y(m) = -1.0;
    pts.push_back(y);
  }
  PointSet set(space, std::move(pts));
  std::vector<PairCertificate> pairs;
  for (std::size_t a = 0; a < set.size(); ++a) {
    for (std::size_t b = a + 1; b < set.size(); ++b) {
      // Point a is y_{a+1}, whose -1 sits at index a + 1.
      pairs.push_back(detail::oriented_pair(space, set, b, a, unit_vector(n, static_cast<Eigen::Index>(a) + 1)));
    }
  }
  NamedFamily fam{std::move(set), std::move(pairs), 1.0, 1.0, 2.0, "summing", {}};
  fam.parameters["n"] = static_cast<double>(n);
  return fam;
}

enum class AuerbachStart { Canonical, Random };

struct AuerbachOptions {
  AuerbachStart start = AuerbachStart::Canonical;
  int max_sweeps = 10000;
  double gain_tol = 1e-12;  // stop when a sweep raises |det| by less than this, relatively
};

/// Cyclic determinant ascent: x_i is replaced by a support point of the
/// cofactor functional v -> det(x_1, .., v, .., x_n). At a fixed point the
/// rows of X^{-1} are norm-one biorthogonal functionals.
inline AuerbachSystem auerbach_ascent(const NormSpec& space, std::uint64_t seed = 0, const AuerbachOptions& opt = {}) {
  const NormSpec sp = validate_space(space);
  const Eigen::Index n = sp.dim();
  Matrix x(n, n);

  auto try_random = [&](std::uint64_t s) {
    std::mt19937_64 rng(s);
    std::normal_distribution<double> g(0.0, 1.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      Vector v = Vector::NullaryExpr(n, [&] { return g(rng); });
      const double nv = norm_eval(sp, v);
      x.col(j) = nv > 0.0 ? Vector(v / nv) : Vector(v);
    }
    return std::abs(x.determinant()) > 1e-12;
  };

  bool ok = false;
  if (opt.start == AuerbachStart::Canonical) {
    for (Eigen::Index j = 0; j < n; ++j) x.col(j) = unit_vector(n, j) / norm_eval(sp, unit_vector(n, j));
    ok = std::abs(x.determinant()) > 1e-12;
  }
  for (std::uint64_t k = 0; k < 10 && !ok; ++k) ok = try_random(seed + k);
  if (!ok) throw Error(ErrorCode::DegenerateStart, "zero determinant after 10 random starts");

  AuerbachSystem sys;
  sys.space = sp;
  double det = std::abs(x.determinant());
  sys.determinant_history.push_back(det);
  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    const double before = det;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Matrix inv = x.inverse();
      const Vector cofactor = x.determinant() * inv.row(i).transpose();
      x.col(i) = support_point(sp, cofactor);
    }
    det = std::abs(x.determinant());
    sys.determinant_history.push_back(det);
    sys.sweeps = sweep + 1;
    if (det - before <= opt.gain_tol * before) break;
  }

  const Matrix inv = x.inverse();
  for (Eigen::Index i = 0; i < n; ++i) {
    sys.vectors.push_back(x.col(i));
    sys.functionals.push_back(inv.row(i).transpose());
  }
  return sys;
}

/// Points x_i with lambda_ij (x_i*/2 - x_j*/2), lambda_ij = 1 / |x_i*/2 - x_j*/2|'.
/// Claimed (1, 1, min lambda_ij); requires every lambda_ij > 1.
inline NamedFamily strict_convex_family(const AuerbachSystem& sys) {
  detail::require_valid_system(sys);
  PointSet set(sys.space, sys.vectors);
  std::vector<PairCertificate> pairs;
  NamedFamily fam{set, {}, 1.0, 1.0, 0.0, "strict-convex", {}};
  double lambda_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      const Vector h = 0.5 * (sys.functionals[i] - sys.functionals[j]);
      const double lambda = 1.0 / dual_norm_eval(sys.space, h);
      if (lambda <= 1.0 + 1e-9) {
        throw Error(ErrorCode::NotStrictlyConvexEvidence,
                    "lambda_" + std::to_string(i) + "_" + std::to_string(j) + " = " + detail::format_number(lambda));
      }
      fam.parameters["lambda_" + std::to_string(i) + "_" + std::to_string(j)] = lambda;
      lambda_min = std::min(lambda_min, lambda);
      pairs.push_back(detail::oriented_pair(sys.space, set, i, j, lambda * h));
    }
  }
  fam.pairs = std::move(pairs);
  fam.d = set.size() < 2 ? 0.0 : lambda_min;
  return fam;
}

/// The 2n points +-x_i, ordered x_1, -x_1, x_2, -x_2, ...; x_i/-x_i split by x_i*,
/// same-sign pairs by t(x_i* - x_j*), opposite-sign pairs by s(x_i* + x_j*).
/// Claimed (1, 1, min(2, 2t, 2s)); requires s, t > 1/2.
inline NamedFamily plus_minus_family(const AuerbachSystem& sys) {
  detail::require_valid_system(sys);
  const std::size_t n = sys.vectors.size();
  std::vector<Vector> pts;
  for (const auto& v : sys.vectors) {
    pts.push_back(v);
    pts.push_back(-v);
  }
  PointSet set(sys.space, std::move(pts));
  auto plus = [](std::size_t i) { return 2 * i; };
  auto minus = [](std::size_t i) { return 2 * i + 1; };
  const auto& fs = sys.functionals;

  NamedFamily fam{set, {}, 1.0, 1.0, 0.0, "plus-minus", {}};
  double d = 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    fam.pairs.push_back(detail::oriented_pair(sys.space, set, plus(i), minus(i), fs[i]));
    for (std::size_t j = i + 1; j < n; ++j) {
      const double t = 1.0 / dual_norm_eval(sys.space, fs[i] - fs[j]);
      const double s = 1.0 / dual_norm_eval(sys.space, fs[i] + fs[j]);
      const std::string tag = std::to_string(i) + "_" + std::to_string(j);
      if (t <= 0.5 + 1e-9) throw Error(ErrorCode::NotStrictlyConvexEvidence, "t_" + tag + " = " + detail::format_number(t));
      if (s <= 0.5 + 1e-9) throw Error(ErrorCode::NotStrictlyConvexEvidence, "s_" + tag + " = " + detail::format_number(s));
      fam.parameters["t_" + tag] = t;
      fam.parameters["s_" + tag] = s;
      d = std::min({d, 2.0 * t, 2.0 * s});
      const Vector diff = t * (fs[i] - fs[j]);
      const Vector sum = s * (fs[i] + fs[j]);
      fam.pairs.push_back(detail::oriented_pair(sys.space, set, plus(i), plus(j), diff));
      fam.pairs.push_back(detail::oriented_pair(sys.space, set, minus(j), minus(i), diff));
      fam.pairs.push_back(detail::oriented_pair(sys.space, set, plus(i), minus(j), sum));
      fam.pairs.push_back(detail::oriented_pair(sys.space, set, plus(j), minus(i), sum));
    }
  }
  fam.d = d;
  return fam;
}

struct RenormedFamily {
  NormSpec space;
  NamedFamily family;
};

/// Renorms with V = conv(B u {+-2x_i}); the points +-2x_i are then a normalized
/// 2-equilateral set, certified by certify_set on the new norm. l_1 and l_inf
/// bases are taken as their explicit polytopes.
inline RenormedFamily renorm_equilateral_family(const NormSpec& base, const AuerbachSystem& sys) {
  detail::require_valid_system(sys);
  const NormSpec poly = validate_space(explicit_polytope(base));
  require_same_dim(poly.dim(), sys.space.dim(), "renorm_equilateral_family");

  std::vector<Vector> doubled;
  for (const auto& v : sys.vectors) doubled.push_back(2.0 * v);
  const NormSpec renormed = renorm_union(poly, doubled);

  std::vector<Vector> pts;
  for (const auto& v : doubled) {
    pts.push_back(v);
    pts.push_back(-v);
  }
  PointSet set(renormed, std::move(pts));
  for (const auto& p : set.points()) {
    if (std::abs(norm_eval(renormed, p) - 1.0) > 1e-9) {
      throw Error(ErrorCode::NumericalBreakdown, "renormed point is not normalized");
    }
  }
  const auto certified = certify_set(set);
  NamedFamily fam{set, certified.certificate.pairs, 1.0, 1.0, 2.0, "renorm-equilateral", {}};
  fam.parameters["certified_d"] = certified.report.d;
  return {renormed, std::move(fam)};
}

/// Normalizes a biorthogonal system: y_i = x_i/|x_i|, y_i* = |x_i| x_i*, with pair
/// (i, j) split by y_i*. Claimed (1, M, 1), M = max |y_i*|'.
inline NamedFamily normalize_biorthogonal(const std::vector<Vector>& vectors, const std::vector<Vector>& functionals,
                                          const NormSpec& space) {
  if (vectors.size() != functionals.size() || vectors.size() < 2) {
    throw Error(ErrorCode::InvalidInput, "need at least two vectors with matching functionals");
  }
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    require_same_dim(vectors[i].size(), space.dim(), "biorthogonal vector");
    require_same_dim(functionals[i].size(), space.dim(), "biorthogonal functional");
    for (std::size_t j = 0; j < vectors.size(); ++j) {
      if (std::abs(functionals[i].dot(vectors[j]) - (i == j ? 1.0 : 0.0)) > 1e-8) {
        throw Error(ErrorCode::NotBiorthogonal,
                    "x*_" + std::to_string(i) + "(x_" + std::to_string(j) + ") is off");
      }
    }
  }
  std::vector<Vector> ys;
  std::vector<Vector> yf;
  double m = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const double nx = norm_eval(space, vectors[i]);
    ys.push_back(vectors[i] / nx);
    yf.push_back(nx * functionals[i]);
    m = std::max(m, dual_norm_eval(space, yf.back()));
  }
  PointSet set(space, ys);
  NamedFamily fam{set, {}, 1.0, m, 1.0, "biorthogonal", {}};
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      fam.pairs.push_back(detail::oriented_pair(space, set, i, j, yf[i]));
    }
  }
  fam.parameters["M"] = m;
  return fam;
}

}  // namespace bsa
