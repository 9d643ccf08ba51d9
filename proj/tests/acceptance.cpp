// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "bsa/construct.hpp"
#include "bsa/search.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace bsa;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// ---------------------------------------------------------------------------
// Independent oracles

/// Symmetric polytope from generators; keeps the raw generators for the oracles.
struct RandomPolytope {
  std::vector<Vector> generators;
  NormSpec space;
};

RandomPolytope random_polytope(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> count(dim, dim + 4);
  std::vector<Vector> gens;
  const int k = count(rng);
  for (int i = 0; i < k; ++i) {
    Vector v = Vector::NullaryExpr(dim, [&] { return g(rng); });
    gens.push_back(v);
    gens.push_back(-v);
  }
  return {gens, NormSpec::polytope(gens)};
}

/// Facets {a.x <= 1} of the symmetric hull, by checking every line (plane)
/// through two (three) generators.
std::vector<Vector> facets(const std::vector<Vector>& gens) {
  const Eigen::Index dim = gens.front().size();
  std::vector<Vector> out;
  auto consider = [&](Vector a, double b) {
    if (b < 0) {
      a = -a;
      b = -b;
    }
    if (b <= 1e-12 * a.norm()) return;
    a /= b;
    for (const auto& v : gens) {
      if (a.dot(v) > 1.0 + 1e-9) return;
    }
    out.push_back(a);
  };
  const std::size_t m = gens.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (dim == 2) {
        const Vector e = gens[j] - gens[i];
        const Vector a = make_vector({-e(1), e(0)});
        consider(a, a.dot(gens[i]));
        continue;
      }
      for (std::size_t k = j + 1; k < m; ++k) {
        const Eigen::Vector3d a =
            Eigen::Vector3d(gens[j] - gens[i]).cross(Eigen::Vector3d(gens[k] - gens[i]));
        if (a.norm() < 1e-12) continue;
        consider(Vector(a), Vector(a).dot(gens[i]));
      }
    }
  }
  return out;
}

double gauge(const std::vector<Vector>& facet_normals, const Vector& x) {
  double best = 0.0;
  for (const auto& a : facet_normals) best = std::max(best, a.dot(x));
  return best;
}

double support(const std::vector<Vector>& gens, const Vector& f) {
  double best = 0.0;
  for (const auto& v : gens) best = std::max(best, f.dot(v));
  return best;
}

double lp_norm_closed(const Vector& x, double p) {
  if (std::isinf(p)) return x.cwiseAbs().maxCoeff();
  return std::pow(x.cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

Vector random_direction(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  return Vector::NullaryExpr(dim, [&] { return g(rng); });
}

// ---------------------------------------------------------------------------

Outcome lp_constants() {
  Outcome o;
  double worst = 0.0;
  double slowest = 0.0;
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    for (int n : {3, 5, 8}) {
      const auto t0 = Clock::now();
      const auto fam = lp_basis_family(p, n);
      const auto r = certify_set(fam.set);
      const double dt = seconds_since(t0);
      const double err = std::abs(r.report.d - std::pow(2.0, 1.0 / p));
      worst = std::max(worst, err);
      slowest = std::max(slowest, dt);
      if (err > 1e-6 || dt >= 1.0 || r.report.approximate) {
        o.pass = false;
        o.detail += fmt(" [p=%g n=%g d=%.12f t=%.3fs]", p, n, r.report.d, dt);
      }
    }
  }
  o.detail = fmt("max |d - 2^(1/p)| = %.2e, slowest run %.3f s", worst, slowest) + o.detail;
  return o;
}

Outcome c0_family() {
  Outcome o;
  double worst = 0.0;
  for (int n : {4, 6, 10}) {
    const auto fam = summing_family(n);
    const auto r = certify_set(fam.set);
    const Verdict v = check_certificate(fam.certificate());
    const double err = std::abs(r.report.d - 2.0);
    worst = std::max(worst, err);
    const bool ok = err <= 1e-6 && v.valid && fam.c1 == 1.0 && fam.c2 == 1.0 && std::abs(fam.d - 2.0) <= 1e-6 &&
                    std::abs(r.report.c1 - 1.0) <= 1e-12;
    if (!ok) {
      o.pass = false;
      o.detail += fmt(" [n=%g d=%.12f valid=%g]", n, r.report.d, v.valid);
    }
  }
  o.detail = fmt("(1,1,2) claimed and re-checked, max |d - 2| = %.2e", worst) + o.detail;
  return o;
}

Outcome smooth_plus_minus() {
  Outcome o;
  double min_d = 1e9;
  double euclid_err = 0.0;
  for (double p : {1.5, 2.0, 3.0}) {
    for (int n : {2, 3}) {
      const auto sys = auerbach_ascent(NormSpec::lp(p, n));
      const auto fam = plus_minus_family(sys);
      const auto r = certify_set(fam.set);
      const bool valid = check_certificate(fam.certificate()).valid;
      min_d = std::min(min_d, r.report.d);
      bool ok = valid && fam.set.size() == static_cast<std::size_t>(2 * n) && r.report.d > 1.0 + 1e-3;
      if (p == 2.0) {
        euclid_err = std::max(euclid_err, std::abs(r.report.d - std::sqrt(2.0)));
        ok = ok && std::abs(r.report.d - std::sqrt(2.0)) <= 1e-6;
      }
      if (!ok) {
        o.pass = false;
        o.detail += fmt(" [p=%g n=%g d=%.12f valid=%g]", p, n, r.report.d, valid);
      }
    }
  }
  o.detail = fmt("2n points, min d = %.9f, p=2 |d - sqrt2| = %.2e", min_d, euclid_err) + o.detail;
  return o;
}

Outcome renorming() {
  Outcome o;
  std::mt19937_64 rng(404);
  double worst_d = 0.0;
  double worst_gap = -1e9;
  for (int dim : {2, 3}) {
    const NormSpec base = validate_space(explicit_polytope(NormSpec::lp_inf(dim)));
    std::vector<Vector> id;
    for (int i = 0; i < dim; ++i) id.push_back(unit_vector(dim, i));
    const AuerbachSystem canonical{id, id, base, {1.0}, 0};
    for (const AuerbachSystem& sys : {canonical, auerbach_ascent(base)}) {
      const auto renormed = renorm_equilateral_family(base, sys);
      const auto& fam = renormed.family;
      const auto r = certify_set(fam.set);
      const bool valid = check_certificate(fam.certificate()).valid;
      worst_d = std::max(worst_d, std::abs(r.report.d - 2.0));

      // The points are exactly {+-2 x_i} and sit on the new unit sphere.
      const auto new_facets = facets(renormed.space.vertices());
      bool points_ok = fam.set.size() == static_cast<std::size_t>(2 * dim);
      for (std::size_t i = 0; i < sys.vectors.size() && points_ok; ++i) {
        const Vector& plus = fam.set[2 * i];
        const Vector& minus = fam.set[2 * i + 1];
        points_ok = (plus - 2.0 * sys.vectors[i]).norm() <= 1e-12 && (minus + 2.0 * sys.vectors[i]).norm() <= 1e-12 &&
                    std::abs(gauge(new_facets, plus) - 1.0) <= 1e-9;
      }
      if (!(valid && points_ok && fam.c1 == 1.0 && fam.c2 == 1.0 && std::abs(r.report.d - 2.0) <= 1e-6)) {
        o.pass = false;
        o.detail += fmt(" [dim=%g d=%.12f valid=%g points=%g]", dim, r.report.d, valid, points_ok);
      }

      // |x|' <= |x| <= 2|x|' with |.| the max norm.
      for (int k = 0; k < 1000; ++k) {
        const Vector x = random_direction(rng, dim);
        const double old_norm = lp_norm_closed(x, INFINITY);
        const double new_norm = gauge(new_facets, x);
        const double gap = std::max(new_norm - old_norm, old_norm - 2.0 * new_norm);
        worst_gap = std::max(worst_gap, gap);
        if (gap > 1e-9) o.pass = false;
      }
    }
  }
  o.detail = fmt("square and cube, max |d - 2| = %.2e, worst norm-equivalence excess %.2e", worst_d, worst_gap) +
             o.detail;
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(505);
  double worst = 0.0;
  int positive = 0;
  int total = 0;
  for (int dim : {2, 3}) {
    const int norms = dim == 2 ? 20 : 10;
    const int grid = dim == 2 ? 720 : 64;
    for (int t = 0; t < norms; ++t) {
      const auto poly = random_polytope(rng, dim);
      const auto fs = facets(poly.generators);
      std::vector<Vector> pts;
      for (int k = 0; k < 4; ++k) {
        const Vector v = random_direction(rng, dim);
        pts.push_back(v / gauge(fs, v));
      }
      const PointSet set(poly.space, pts);
      for (std::size_t y = 0; y < 4; ++y) {
        for (std::size_t x = 0; x < 4; ++x) {
          if (x == y) continue;
          const double exact = pair_margin(set, y, x).margin;
          const double grid_value = brute_force_margin(set, y, x, grid);
          worst = std::max(worst, std::abs(exact - grid_value));
          ++total;
          if (exact > 1e-6) ++positive;
        }
      }
    }
  }
  o.pass = worst <= 1e-2;
  std::ostringstream os;
  os << total << " ordered pairs (" << positive << " with positive margin), max |exact - grid| = " << std::scientific
     << std::setprecision(2) << worst;
  o.detail = os.str();
  return o;
}

Outcome auerbach_suite() {
  Outcome o;
  std::mt19937_64 rng(606);
  double worst = 0.0;
  int nonmonotone = 0;
  for (int t = 0; t < 50; ++t) {
    const int dim = t % 2 ? 3 : 2;
    const auto poly = random_polytope(rng, dim);
    const auto fs = facets(poly.generators);
    const auto sys = auerbach_ascent(poly.space, static_cast<std::uint64_t>(t));
    for (std::size_t i = 0; i < sys.vectors.size(); ++i) {
      worst = std::max(worst, std::abs(gauge(fs, sys.vectors[i]) - 1.0));
      worst = std::max(worst, std::abs(support(poly.generators, sys.functionals[i]) - 1.0));
      for (std::size_t j = 0; j < sys.vectors.size(); ++j) {
        worst = std::max(worst, std::abs(sys.functionals[i].dot(sys.vectors[j]) - (i == j ? 1.0 : 0.0)));
      }
    }
    const auto& h = sys.determinant_history;
    for (std::size_t k = 1; k < h.size(); ++k) {
      if (h[k] < h[k - 1] * (1.0 - 1e-12)) ++nonmonotone;
    }
  }
  o.pass = worst <= 1e-8 && nonmonotone == 0;
  o.detail = fmt("50 random polytope norms, max Auerbach defect %.2e, determinant decreases: %g", worst, nonmonotone);
  return o;
}

Outcome cardinality() {
  Outcome o;
  const auto t0 = Clock::now();
  SearchConfig four;
  four.seed = 17;
  four.restarts = 1;
  four.iterations = 3000;
  const auto found = max_antipodal_search(NormSpec::lp(2.0, 2), 4, four);
  double min_margin = found.witness ? found.witness->report.d : 0.0;
  bool four_ok = found.found && found.witness && check_certificate(found.witness->certificate).valid;
  if (four_ok) {
    for (const auto& m : found.witness->report.margins) four_ok = four_ok && m.margin >= std::sqrt(2.0) - 1e-2;
  }

  // 20 seeds x 500 iterations = 10^4 annealing iterations.
  int five_found = 0;
  double best_five = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    SearchConfig c;
    c.seed = 1000 + s;
    c.restarts = 1;
    c.iterations = 500;
    const auto r = max_antipodal_search(NormSpec::lp(2.0, 2), 5, c);
    if (r.found) ++five_found;
    best_five = std::max(best_five, r.witness->report.d);
  }
  const double dt = seconds_since(t0);
  o.pass = four_ok && five_found == 0 && dt < 120.0;
  o.detail = fmt("4-point witness min margin %.6f, 5-point found %g times (best d %.2e), %.1f s", min_margin, five_found,
                 best_five, dt);
  return o;
}

Outcome invariants() {
  Outcome o;
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 5);

  // A random small space together with an independent norm oracle.
  struct Space {
    NormSpec spec;
    std::function<double(const Vector&)> norm;
  };
  auto make_space = [&](int dim) -> Space {
    switch (pick(rng) % 3) {
      case 0: {
        const double p = 1.0 + 3.0 * unif(rng);
        return {NormSpec::lp(p, dim), [p](const Vector& x) { return lp_norm_closed(x, p); }};
      }
      case 1: {
        const double p = pick(rng) % 2 ? 1.0 : INFINITY;
        return {NormSpec::lp(p, dim), [p](const Vector& x) { return lp_norm_closed(x, p); }};
      }
      default: {
        auto poly = random_polytope(rng, dim);
        auto fs = facets(poly.generators);
        return {poly.space, [fs](const Vector& x) { return gauge(fs, x); }};
      }
    }
  };
  auto random_set = [&](const Space& s, int count) {
    std::vector<Vector> pts;
    for (int k = 0; k < count; ++k) {
      const Vector v = random_direction(rng, s.spec.dim());
      pts.push_back(v * ((0.5 + 0.5 * unif(rng)) / s.norm(v)));
    }
    return PointSet(s.spec, pts);
  };

  int fail_distance = 0, fail_scaling = 0, fail_monotone = 0, fail_ka = 0, fail_equilateral = 0;
  double worst_scaling = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int dim = 2 + t % 2;
    const Space s = make_space(dim);
    const PointSet set = random_set(s, 3 + t % 2);
    const auto r = certify_set(set);

    for (const auto& m : r.report.margins) {
      if (m.margin > s.norm(set[m.upper] - set[m.lower]) + 1e-9) ++fail_distance;
    }

    const double alpha = 0.2 + 2.8 * unif(rng);
    const double scaled = certify_set(set.scaled(alpha)).report.d;
    worst_scaling = std::max(worst_scaling, std::abs(scaled - alpha * r.report.d));
    if (std::abs(scaled - alpha * r.report.d) > 1e-7) ++fail_scaling;

    std::vector<Vector> more = set.points();
    const Vector extra = random_direction(rng, dim);
    more.push_back(extra / s.norm(extra));
    const PointSet bigger(s.spec, more);
    for (std::size_t y = 0; y < set.size(); ++y) {
      for (std::size_t x = 0; x < set.size(); ++x) {
        if (x != y && pair_margin(bigger, y, x).margin > pair_margin(set, y, x).margin + 1e-9) ++fail_monotone;
      }
    }

    if (r.report.ka_lower > r.report.k_lower + 1e-9) ++fail_ka;

    // Equilateral families: l_p bases and the summing family.
    const bool summing = t % 4 == 3;
    const NamedFamily fam =
        summing ? summing_family(3 + t % 5) : lp_basis_family(1.0 + 3.0 * unif(rng), 2 + t % 5);
    const auto eq = is_equilateral(fam.set, 1e-9);
    if (!eq.flag || certify_set(fam.set).report.d < eq.lambda - 1e-6) ++fail_equilateral;
  }
  o.pass = fail_distance + fail_scaling + fail_monotone + fail_ka + fail_equilateral == 0;
  std::ostringstream os;
  os << "200 instances; failures: margin<=distance " << fail_distance << ", scaling " << fail_scaling
     << " (worst " << std::scientific << std::setprecision(2) << worst_scaling << "), monotone " << fail_monotone
     << ", ka<=k " << fail_ka << ", equilateral " << fail_equilateral;
  o.detail = os.str();
  return o;
}

Outcome transport() {
  Outcome o;
  std::mt19937_64 rng(909);
  int failures = 0;
  double worst_shortfall = -1e9;
  for (int t = 0; t < 20; ++t) {
    const int dim = 2 + t % 2;
    const auto poly = random_polytope(rng, dim);
    const auto fs = facets(poly.generators);
    std::vector<Vector> pts;
    for (int k = 0; k < 4; ++k) {
      const Vector v = random_direction(rng, dim);
      pts.push_back(v / gauge(fs, v));
    }
    const auto cert = certify_set(PointSet(poly.space, pts)).certificate;

    Matrix T = Matrix::Identity(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) T.row(i) += 0.6 * random_direction(rng, dim).transpose();
    const Matrix Tinv = T.inverse();
    // Scale so that |T^{-1}| = 1; the max over generators is exact for a polytope domain.
    double inv_norm = 0.0;
    for (const auto& v : poly.generators) inv_norm = std::max(inv_norm, gauge(fs, Tinv * v));
    T *= inv_norm;
    double delta = 0.0;
    for (const auto& v : poly.generators) delta = std::max(delta, gauge(fs, T * v));

    const auto moved = transport_certificate(cert, T, poly.space);
    const Verdict v = check_certificate(moved.certificate);
    const double shortfall = cert.d / delta - moved.certificate.d;
    worst_shortfall = std::max(worst_shortfall, shortfall);
    if (!v.valid || shortfall > 1e-7) ++failures;
  }

  double worst_rotation = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int dim = 2 + t % 2;
    Eigen::HouseholderQR<Matrix> qr(Matrix::NullaryExpr(dim, dim, [&] { return random_direction(rng, 1)(0); }));
    const Matrix Q = qr.householderQ();
    std::vector<Vector> pts;
    std::vector<Vector> rotated;
    for (int k = 0; k < 4; ++k) {
      const Vector v = random_direction(rng, dim).normalized();
      pts.push_back(v);
      rotated.push_back(Q * v);
    }
    const NormSpec l2 = NormSpec::lp(2.0, dim);
    const auto a = certify_set(PointSet(l2, pts)).report;
    const auto b = certify_set(PointSet(l2, rotated)).report;
    for (std::size_t k = 0; k < a.margins.size(); ++k) {
      worst_rotation = std::max(worst_rotation, std::abs(a.margins[k].margin - b.margins[k].margin));
    }
  }
  if (worst_rotation > 1e-9) ++failures;
  o.pass = failures == 0;
  o.detail = fmt("20 maps: worst d_old/delta - d_new = %.2e; l2 rotations: max margin change %.2e", worst_shortfall,
                 worst_rotation);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"lp basis constants", lp_constants},
      {"c0 summing family", c0_family},
      {"smooth-space 2n sets", smooth_plus_minus},
      {"renorming to K_a = 2", renorming},
      {"oracle equivalence", oracle_equivalence},
      {"Auerbach suite", auerbach_suite},
      {"cardinality consistency", cardinality},
      {"invariant battery", invariants},
      {"transport", transport},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %zu %s: %s (%s; %.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
