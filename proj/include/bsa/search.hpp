#pragma once

// Desk-scale extremal search (lower bounds only) and grid oracles that
// check the exact margin solver independently.

#include "bsa/certify.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace bsa {

struct SearchConfig {
  std::uint64_t seed = 0;
  int restarts = 4;
  int iterations = 2000;  // proposals per restart
  double initial_temperature = 0.3;
  double decay = 0.95;     // temperature factor per `decay_every` proposals
  int decay_every = 100;
  double step_scale = 0.5;  // Gaussian step = temperature * step_scale
  double tolerance = 1e-9;  // success threshold for antipodal search
};

inline void validate_config(const SearchConfig& c) {
  if (c.restarts < 1 || c.iterations < 1 || c.decay_every < 1) {
    throw Error(ErrorCode::InvalidInput, "restarts, iterations and decay_every must be positive");
  }
  if (!(c.initial_temperature > 0.0) || !(c.step_scale > 0.0) || !(c.tolerance > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "temperature, step scale and tolerance must be positive");
  }
  if (!(c.decay > 0.0 && c.decay < 1.0)) throw Error(ErrorCode::InvalidInput, "decay must lie in (0, 1)");
}

// ---------------------------------------------------------------------------
// Grid oracle

namespace detail {

/// Deterministic direction grid: `grid` angles in the plane; in space, a
/// grid x grid lattice on each face of the cube, projected radially.
inline std::vector<Vector> direction_grid(Eigen::Index dim, int grid) {
  std::vector<Vector> dirs;
  if (dim == 1) return {make_vector({1.0}), make_vector({-1.0})};
  if (dim == 2) {
    for (int k = 0; k < grid; ++k) {
      const double th = 2.0 * std::numbers::pi * k / grid;
      dirs.push_back(make_vector({std::cos(th), std::sin(th)}));
    }
    return dirs;
  }
  for (int axis = 0; axis < 3; ++axis) {
    for (double side : {1.0, -1.0}) {
      for (int a = 0; a < grid; ++a) {
        for (int b = 0; b < grid; ++b) {
          const double u = -1.0 + 2.0 * (a + 0.5) / grid;
          const double v = -1.0 + 2.0 * (b + 0.5) / grid;
          Vector d(3);
          d(axis) = side;
          d((axis + 1) % 3) = u;
          d((axis + 2) % 3) = v;
          dirs.push_back(d);
        }
      }
    }
  }
  return dirs;
}

/// Directions where the margin program can attain its optimum but a finite
/// grid would miss it: orthogonal to one (plane) or two (space) of the order
/// constraint normals. For polyhedral norms the planes f.(v_a - v_b) = 0, on
/// which the dual norm has its kinks, join the list, so every vertex of the
/// normalized program is among the candidates.
inline std::vector<Vector> boundary_rays(const PointSet& set, std::size_t y, std::size_t x) {
  std::vector<Vector> normals;
  for (std::size_t z = 0; z < set.size(); ++z) {
    if (z == y || z == x) continue;
    normals.push_back(set[z] - set[x]);
    normals.push_back(set[y] - set[z]);
  }
  if (set.space().is_polyhedral()) {
    const auto verts = explicit_polytope(set.space()).vertices();
    for (std::size_t a = 0; a < verts.size(); ++a) {
      for (std::size_t b = a + 1; b < verts.size(); ++b) normals.push_back(verts[a] - verts[b]);
    }
  }
  std::vector<Vector> rays;
  if (set.dim() == 2) {
    for (const auto& w : normals) {
      rays.push_back(make_vector({-w(1), w(0)}));
      rays.push_back(make_vector({w(1), -w(0)}));
    }
  } else if (set.dim() == 3) {
    for (std::size_t a = 0; a < normals.size(); ++a) {
      for (std::size_t b = a + 1; b < normals.size(); ++b) {
        const Eigen::Vector3d c = Eigen::Vector3d(normals[a]).cross(Eigen::Vector3d(normals[b]));
        rays.push_back(Vector(c));
        rays.push_back(Vector(-c));
      }
    }
  }
  std::erase_if(rays, [](const Vector& r) { return r.norm() <= 1e-14; });
  return rays;
}

/// Best feasible f(y) - f(x); `values` holds each functional evaluated at every point.
inline double scan_margin(std::size_t y, std::size_t x, const std::vector<Vector>& values) {
  double best = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const Vector& fv = values[k];
    const double fy = fv(static_cast<Eigen::Index>(y));
    const double fx = fv(static_cast<Eigen::Index>(x));
    if (fy - fx <= best) continue;
    bool ok = true;
    for (Eigen::Index z = 0; z < fv.size() && ok; ++z) ok = fv(z) >= fx - 1e-9 && fv(z) <= fy + 1e-9;
    if (ok) best = fy - fx;
  }
  return best;
}

inline void normalize_dirs(const PointSet& set, std::vector<Vector>& dirs, std::vector<Vector>& values) {
  Matrix pts(set.dim(), static_cast<Eigen::Index>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) pts.col(static_cast<Eigen::Index>(i)) = set[i];
  for (auto& d : dirs) {
    d /= dual_norm_eval(set.space(), d);
    values.push_back(pts.transpose() * d);
  }
}

}  // namespace detail

/// Grid lower bound on the margin d*(x, y; S) for dim <= 3.
inline double brute_force_margin(const PointSet& set, std::size_t y_index, std::size_t x_index, int grid) {
  if (set.dim() > 3) throw Error(ErrorCode::UnsupportedDimension, "grid oracle supports dim <= 3");
  if (y_index >= set.size() || x_index >= set.size() || y_index == x_index) {
    throw Error(ErrorCode::IndexError, "brute_force_margin: indices must be distinct and in range");
  }
  if (grid < 1) throw Error(ErrorCode::InvalidInput, "grid must be positive");
  std::vector<Vector> dirs = detail::direction_grid(set.dim(), grid);
  for (auto& r : detail::boundary_rays(set, y_index, x_index)) dirs.push_back(std::move(r));
  std::vector<Vector> values;
  detail::normalize_dirs(set, dirs, values);
  return detail::scan_margin(y_index, x_index, values);
}

/// Grid lower bounds for every ordered pair; entry (y, x) bounds d*(x, y; S).
inline Matrix brute_force_margins(const PointSet& set, int grid) {
  if (set.dim() > 3) throw Error(ErrorCode::UnsupportedDimension, "grid oracle supports dim <= 3");
  if (grid < 1) throw Error(ErrorCode::InvalidInput, "grid must be positive");
  std::vector<Vector> dirs = detail::direction_grid(set.dim(), grid);
  std::vector<Vector> values;
  detail::normalize_dirs(set, dirs, values);
  const auto n = static_cast<Eigen::Index>(set.size());
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t y = 0; y < set.size(); ++y) {
    for (std::size_t x = 0; x < set.size(); ++x) {
      if (x == y) continue;
      std::vector<Vector> rays = detail::boundary_rays(set, y, x);
      std::vector<Vector> ray_values;
      detail::normalize_dirs(set, rays, ray_values);
      const double grid_best = detail::scan_margin(y, x, values);
      const double ray_best = detail::scan_margin(y, x, ray_values);
      out(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = std::max(grid_best, ray_best);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Searches

namespace detail {

inline Vector random_unit(const NormSpec& space, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    Vector v = Vector::NullaryExpr(space.dim(), [&] { return g(rng); });
    const double nv = norm_eval(space, v);
    if (nv > 1e-12) return v / nv;
  }
}

inline double min_distance_to(const NormSpec& space, const std::vector<Vector>& pts, const Vector& c,
                              std::size_t skip = static_cast<std::size_t>(-1)) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i != skip) best = std::min(best, norm_eval(space, pts[i] - c));
  }
  return best;
}

inline double min_separation(const NormSpec& space, const std::vector<Vector>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, norm_eval(space, pts[i] - pts[j]));
  }
  return best;
}

}  // namespace detail

/// Farthest-point greedy over a pool of random unit vectors, followed by
/// exchange passes that swap a point for a pool candidate whenever that
/// raises the minimum separation.
inline PointSet greedy_separated(const NormSpec& space, int count, int candidate_pool, std::uint64_t seed) {
  if (count < 2) throw Error(ErrorCode::TooSmall, "greedy_separated needs count >= 2");
  if (candidate_pool < count) throw Error(ErrorCode::InvalidInput, "candidate pool smaller than count");
  const NormSpec sp = validate_space(space);
  std::mt19937_64 rng(seed);
  std::vector<Vector> pool;
  for (int i = 0; i < candidate_pool; ++i) pool.push_back(detail::random_unit(sp, rng));

  // Distances from every candidate to the chosen set.
  std::vector<Vector> chosen{detail::random_unit(sp, rng)};
  std::vector<double> gap(pool.size());
  for (std::size_t k = 0; k < pool.size(); ++k) gap[k] = norm_eval(sp, pool[k] - chosen[0]);
  while (static_cast<int>(chosen.size()) < count) {
    const auto far = static_cast<std::size_t>(std::max_element(gap.begin(), gap.end()) - gap.begin());
    chosen.push_back(pool[far]);
    for (std::size_t k = 0; k < pool.size(); ++k) gap[k] = std::min(gap[k], norm_eval(sp, pool[k] - pool[far]));
  }

  double current = detail::min_separation(sp, chosen);
  for (int pass = 0; pass < 50; ++pass) {
    bool improved = false;
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      // Best replacement for point i, judged by its distance to the others.
      std::size_t best_k = pool.size();
      double best_gap = detail::min_distance_to(sp, chosen, chosen[i], i);
      for (std::size_t k = 0; k < pool.size(); ++k) {
        const double g = detail::min_distance_to(sp, chosen, pool[k], i);
        if (g > best_gap) {
          best_gap = g;
          best_k = k;
        }
      }
      if (best_k == pool.size()) continue;
      std::vector<Vector> trial = chosen;
      trial[i] = pool[best_k];
      const double sep = detail::min_separation(sp, trial);
      if (sep > current + 1e-15) {
        chosen = std::move(trial);
        current = sep;
        improved = true;
      }
    }
    if (!improved) break;
  }
  return PointSet(sp, std::move(chosen));
}

struct AnnealResult {
  PointSet set;
  MarginReport report;
  BsaCertificate certificate;
  std::vector<double> best_trace;  // best d after each proposal of the winning restart
};

namespace detail {

/// Starting configuration: antipodal pairs +-u_i, plus one random point for odd counts.
inline std::vector<Vector> antipodal_start(const NormSpec& space, int count, std::mt19937_64& rng) {
  std::vector<Vector> pts;
  while (static_cast<int>(pts.size()) + 2 <= count) {
    const Vector u = random_unit(space, rng);
    pts.push_back(u);
    pts.push_back(-u);
  }
  if (static_cast<int>(pts.size()) < count) pts.push_back(random_unit(space, rng));
  return pts;
}

/// Index of the point equal to -pts[i], or pts.size() if there is none.
inline std::size_t partner_of(const std::vector<Vector>& pts, std::size_t i) {
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (j != i && (pts[j] + pts[i]).cwiseAbs().maxCoeff() < 1e-12) return j;
  }
  return pts.size();
}

inline bool collides(const NormSpec& space, const std::vector<Vector>& pts, const Vector& c, std::size_t skip) {
  return min_distance_to(space, pts, c, skip) < 1e-9;
}

}  // namespace detail

/// Simulated annealing of `count` unit vectors, maximizing the certified d.
/// Deterministic for a given config; the best configuration over all restarts wins
/// (earliest restart on ties).
inline AnnealResult anneal_bsa(const NormSpec& space, int count, const SearchConfig& config) {
  if (count < 2) throw Error(ErrorCode::TooSmall, "anneal_bsa needs count >= 2");
  validate_config(config);
  const NormSpec sp = validate_space(space);
  auto objective = [&](const std::vector<Vector>& pts) { return certify_set(PointSet(sp, pts)).report.d; };

  std::optional<std::vector<Vector>> best_pts;
  double best_d = -1.0;
  std::vector<double> best_trace;
  for (int r = 0; r < config.restarts; ++r) {
    std::mt19937_64 rng(config.seed + static_cast<std::uint64_t>(r));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, count - 1);

    std::vector<Vector> pts = detail::antipodal_start(sp, count, rng);
    double d = objective(pts);
    std::vector<Vector> local_best = pts;
    double local_d = d;
    std::vector<double> trace;
    for (int k = 0; k < config.iterations; ++k) {
      const double temp = config.initial_temperature * std::pow(config.decay, k / config.decay_every);
      const auto i = static_cast<std::size_t>(pick(rng));
      Vector moved = pts[i] + temp * config.step_scale * Vector::NullaryExpr(sp.dim(), [&] { return gauss(rng); });
      const double u = unif(rng);
      const double nm = norm_eval(sp, moved);
      if (nm > 1e-12) {
        moved /= nm;
        // Antipodal 4-sets in the plane are parallelograms, so moving one point
        // alone almost always drops d to 0. A partner -p_i moves with it.
        const std::size_t partner = detail::partner_of(pts, i);
        std::vector<Vector> trial = pts;
        trial[i] = moved;
        if (partner != pts.size()) trial[partner] = -moved;
        if (!detail::collides(sp, trial, moved, i) &&
            (partner == pts.size() || !detail::collides(sp, trial, -moved, partner))) {
          const double td = objective(trial);
          if (td >= d || u < std::exp((td - d) / temp)) {
            pts = std::move(trial);
            d = td;
            if (d > local_d) {
              local_d = d;
              local_best = pts;
            }
          }
        }
      }
      trace.push_back(local_d);
    }
    if (local_d > best_d) {
      best_d = local_d;
      best_pts = local_best;
      best_trace = std::move(trace);
    }
  }

  PointSet set(sp, *best_pts);
  auto certified = certify_set(set);
  if (!check_certificate(certified.certificate).valid) {
    throw Error(ErrorCode::NumericalBreakdown, "search witness failed re-verification");
  }
  return {set, std::move(certified.report), std::move(certified.certificate), std::move(best_trace)};
}

struct AntipodalSearchResult {
  bool found = false;
  std::optional<AnnealResult> witness;  // best configuration, present whether found or not
};

/// Looks for an antipodal set of the given cardinality: annealing on the
/// minimum pair margin, success when it exceeds config.tolerance.
inline AntipodalSearchResult max_antipodal_search(const NormSpec& space, int cardinality, const SearchConfig& config) {
  if (space.dim() > 3) throw Error(ErrorCode::UnsupportedDimension, "antipodal search supports dim <= 3");
  if (cardinality < 2) throw Error(ErrorCode::TooSmall, "cardinality must be >= 2");
  if (cardinality > (1 << space.dim()) + 1) {
    throw Error(ErrorCode::InvalidInput, "cardinality above 2^dim + 1 is pointless");
  }
  auto best = anneal_bsa(space, cardinality, config);
  const bool found = best.report.d > config.tolerance;
  return {found, std::move(best)};
}

struct KaBound {
  double best_d = 0.0;
  BsaCertificate witness;
  MarginReport report;
  std::vector<std::pair<int, double>> per_count;  // (count, d)
};

/// Best certified d over counts 2..max_count; a finite-set lower bound on K_a.
inline KaBound ka_lower_bound(const NormSpec& space, int max_count, const SearchConfig& config) {
  if (max_count < 2) throw Error(ErrorCode::TooSmall, "max_count must be >= 2");
  std::optional<AnnealResult> best;
  std::vector<std::pair<int, double>> per_count;
  for (int count = 2; count <= max_count; ++count) {
    auto r = anneal_bsa(space, count, config);
    per_count.emplace_back(count, r.report.d);
    if (!best || r.report.d > best->report.d) best = std::move(r);
  }
  return {best->report.d, best->certificate, best->report, std::move(per_count)};
}

}  // namespace bsa
