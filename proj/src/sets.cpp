#include "vifp/sets.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace vifp {

namespace {

constexpr std::uint64_t kPoolSeed = 0x5e75eedull;

void check_dim(const ConvexSet& c, const Vec& x, const char* where) {
  if (c.dim() != x.size()) {
    throw DimensionError(std::string(where) + ": point has dimension " +
                         std::to_string(x.size()) + ", set has " + std::to_string(c.dim()));
  }
}

Vec project_box(const BoxSet& b, const Vec& x) {
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] = std::min(std::max(x[i], b.lower[i]), b.upper[i]);
  return y;
}

Vec project_ball(const BallSet& b, const Vec& x) {
  const Vec d = sub(x, b.center);
  const double len = norm(d);
  if (len <= b.radius) return x;
  return add(b.center, scaled(b.radius / len, d));
}

Vec project_halfspace(const HalfspaceSet& h, const Vec& x) {
  const double excess = dot(h.normal, x) - h.offset;
  if (excess <= 0.0) return x;
  return sub(x, scaled(excess / dot(h.normal, h.normal), h.normal));
}

Vec project_hyperplane(const HyperplaneSet& h, const Vec& x) {
  const double excess = dot(h.normal, x) - h.offset;
  return sub(x, scaled(excess / dot(h.normal, h.normal), h.normal));
}

// Sort-and-threshold projection onto { y >= 0, sum y = scale }; exact in
// finitely many steps.
Vec project_simplex(const SimplexSet& s, const Vec& x) {
  Vec u = x;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double running = 0.0;
  double tau = 0.0;
  std::size_t rho = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    running += u[j];
    const double t = (running - s.scale) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) {
      rho = j + 1;
      tau = t;
    }
  }
  (void)rho;
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::max(x[i] - tau, 0.0);
  return y;
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

ConvexSet ConvexSet::whole_space(std::size_t dim) {
  if (dim < 1) throw DimensionError("whole_space: dimension must be >= 1");
  return ConvexSet(Desc{WholeSpace{dim}});
}

ConvexSet ConvexSet::box(Vec lower, Vec upper) {
  check_same_dim(lower, upper, "box");
  if (lower.empty()) throw DimensionError("box: dimension must be >= 1");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i]))
      throw FeasibilityError("box: lower[" + std::to_string(i) + "] exceeds upper");
  }
  return ConvexSet(Desc{BoxSet{std::move(lower), std::move(upper)}});
}

ConvexSet ConvexSet::ball(Vec center, double radius) {
  if (center.empty()) throw DimensionError("ball: dimension must be >= 1");
  if (!(radius > 0.0)) throw FeasibilityError("ball: radius must be strictly positive");
  return ConvexSet(Desc{BallSet{std::move(center), radius}});
}

ConvexSet ConvexSet::halfspace(Vec normal, double offset) {
  if (normal.empty()) throw DimensionError("halfspace: dimension must be >= 1");
  if (norm(normal) <= kEpsEq) throw FeasibilityError("halfspace: normal is (numerically) zero");
  return ConvexSet(Desc{HalfspaceSet{std::move(normal), offset}});
}

ConvexSet ConvexSet::hyperplane(Vec normal, double offset) {
  if (normal.empty()) throw DimensionError("hyperplane: dimension must be >= 1");
  if (norm(normal) <= kEpsEq) throw FeasibilityError("hyperplane: normal is (numerically) zero");
  return ConvexSet(Desc{HyperplaneSet{std::move(normal), offset}});
}

ConvexSet ConvexSet::simplex(std::size_t dim, double scale) {
  if (dim < 1) throw DimensionError("simplex: dimension must be >= 1");
  if (!(scale > 0.0)) throw FeasibilityError("simplex: scale must be strictly positive");
  return ConvexSet(Desc{SimplexSet{dim, scale}});
}

ConvexSet ConvexSet::intersection(std::vector<ConvexSet> members, Vec witness) {
  if (members.empty()) throw FeasibilityError("intersection: empty member list");
  const std::size_t d = members.front().dim();
  for (const auto& m : members) {
    if (m.dim() != d) throw DimensionError("intersection: member dimensions differ");
  }
  if (witness.size() != d)
    throw DimensionError("intersection: witness has wrong dimension");
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!members[i].contains(witness, 1e-9)) {
      throw FeasibilityError("intersection: witness not contained in member " +
                             std::to_string(i) + " (" + members[i].kind() + ")");
    }
  }

  // Build a small pool of known-feasible points once; projection certificates
  // sample from it. Candidates are sequentially projected, then only accepted
  // if every member reports containment.
  IntersectionSet set{std::move(members), std::move(witness), {}};
  set.feasible_pool.push_back(set.witness);
  Rng rng(kPoolSeed);
  const double spread = 1.0 + norm(set.witness);
  for (int tries = 0; tries < 64 && set.feasible_pool.size() < 16; ++tries) {
    Vec p = add(set.witness, rng.uniform_vec(d, -spread, spread));
    for (int sweep = 0; sweep < 400; ++sweep) {
      for (const auto& m : set.members) p = m.project(p);
    }
    bool ok = true;
    for (const auto& m : set.members) ok = ok && m.contains(p, 1e-9);
    if (ok && finite(p)) set.feasible_pool.push_back(p);
  }
  return ConvexSet(Desc{std::move(set)});
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

std::size_t ConvexSet::dim() const {
  return std::visit(
      [](const auto& s) -> std::size_t {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeSpace>) return s.dim;
        else if constexpr (std::is_same_v<T, BoxSet>) return s.lower.size();
        else if constexpr (std::is_same_v<T, BallSet>) return s.center.size();
        else if constexpr (std::is_same_v<T, HalfspaceSet>) return s.normal.size();
        else if constexpr (std::is_same_v<T, HyperplaneSet>) return s.normal.size();
        else if constexpr (std::is_same_v<T, SimplexSet>) return s.dim;
        else return s.members.front().dim();
      },
      desc_);
}

std::string ConvexSet::kind() const {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeSpace>) return "whole_space";
        else if constexpr (std::is_same_v<T, BoxSet>) return "box";
        else if constexpr (std::is_same_v<T, BallSet>) return "ball";
        else if constexpr (std::is_same_v<T, HalfspaceSet>) return "halfspace";
        else if constexpr (std::is_same_v<T, HyperplaneSet>) return "hyperplane";
        else if constexpr (std::is_same_v<T, SimplexSet>) return "simplex";
        else return "intersection";
      },
      desc_);
}

Vec ConvexSet::project(const Vec& x) const {
  check_dim(*this, x, "project");
  if (!finite(x)) throw Error("project: non-finite input point");
  return std::visit(
      [&x](const auto& s) -> Vec {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeSpace>) return x;
        else if constexpr (std::is_same_v<T, BoxSet>) return project_box(s, x);
        else if constexpr (std::is_same_v<T, BallSet>) return project_ball(s, x);
        else if constexpr (std::is_same_v<T, HalfspaceSet>) return project_halfspace(s, x);
        else if constexpr (std::is_same_v<T, HyperplaneSet>) return project_hyperplane(s, x);
        else if constexpr (std::is_same_v<T, SimplexSet>) return project_simplex(s, x);
        else return project_intersection(s, x);
      },
      desc_);
}

bool ConvexSet::contains(const Vec& x, double eps) const {
  check_dim(*this, x, "contains");
  return std::visit(
      [&x, eps](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeSpace>) {
          return true;
        } else if constexpr (std::is_same_v<T, BoxSet>) {
          for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] < s.lower[i] - eps || x[i] > s.upper[i] + eps) return false;
          return true;
        } else if constexpr (std::is_same_v<T, BallSet>) {
          return dist(x, s.center) <= s.radius + eps;
        } else if constexpr (std::is_same_v<T, HalfspaceSet>) {
          // signed geometric distance to the boundary
          return (dot(s.normal, x) - s.offset) / norm(s.normal) <= eps;
        } else if constexpr (std::is_same_v<T, HyperplaneSet>) {
          return std::abs(dot(s.normal, x) - s.offset) / norm(s.normal) <= eps;
        } else if constexpr (std::is_same_v<T, SimplexSet>) {
          double sum = 0.0;
          for (double c : x) {
            if (c < -eps) return false;
            sum += c;
          }
          return std::abs(sum - s.scale) <= eps * std::sqrt(static_cast<double>(x.size()));
        } else {
          for (const auto& m : s.members)
            if (!m.contains(x, eps)) return false;
          return true;
        }
      },
      desc_);
}

Vec ConvexSet::any_point() const {
  return std::visit(
      [this](const auto& s) -> Vec {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IntersectionSet>) return s.witness;
        else return project(zeros(dim()));
      },
      desc_);
}

// ---------------------------------------------------------------------------
// Dykstra sweeps for intersections
// ---------------------------------------------------------------------------

Vec project_intersection(const IntersectionSet& c, const Vec& x, int max_sweeps) {
  const std::size_t m = c.members.size();
  if (x.size() != c.members.front().dim())
    throw DimensionError("project_intersection: dimension mismatch");

  Vec y = x;
  std::vector<Vec> increments(m, zeros(x.size()));

  const double stall_tol = 1e-14 * (1.0 + norm(x));

  auto certificate_violation = [&](const Vec& point) {
    // optimality of a metric projection against known feasible points:
    // <x - y, w - y> <= 0 for every feasible w
    double worst = 0.0;
    const Vec residual = sub(x, point);
    for (const Vec& w : c.feasible_pool) {
      worst = std::max(worst, dot(residual, sub(w, point)));
    }
    return worst;
  };

  auto feasible = [&](const Vec& point) {
    for (const auto& member : c.members)
      if (!member.contains(point, 1e-9)) return false;
    return true;
  };

  double best_violation = std::numeric_limits<double>::infinity();
  Vec best = y;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const Vec before = y;
    for (std::size_t i = 0; i < m; ++i) {
      const Vec w = add(y, increments[i]);
      y = c.members[i].project(w);
      increments[i] = sub(w, y);
    }
    const double moved = dist(y, before);
    if (feasible(y)) {
      const double viol = certificate_violation(y);
      if (viol < best_violation) {
        best_violation = viol;
        best = y;
      }
      const double cert_tol =
          kEpsEq * std::max(1.0, dist(x, y) * (1.0 + norm(y)));
      if (moved <= stall_tol && viol <= cert_tol) return y;
    }
  }

  throw ProjectionError(
      "project_intersection: no certified projection within " +
          std::to_string(max_sweeps) + " sweeps (best optimality violation " +
          std::to_string(best_violation) + ")",
      best, best_violation);
}

}  // namespace vifp
