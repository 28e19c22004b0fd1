#pragma once

#include <string>
#include <variant>
#include <vector>

#include "vifp/core.hpp"

namespace vifp {

class ConvexSet;

struct WholeSpace {
  std::size_t dim;
};

struct BoxSet {
  Vec lower;
  Vec upper;
};

struct BallSet {
  Vec center;
  double radius;
};

/// { x : <normal, x> <= offset }
struct HalfspaceSet {
  Vec normal;
  double offset;
};

/// { x : <normal, x> = offset }
struct HyperplaneSet {
  Vec normal;
  double offset;
};

/// { x : x >= 0, sum x = scale }
struct SimplexSet {
  std::size_t dim;
  double scale;
};

/// Finite intersection with a stored feasibility witness and a small pool of
/// feasible points used to certify projection optimality.
struct IntersectionSet {
  std::vector<ConvexSet> members;
  Vec witness;
  std::vector<Vec> feasible_pool;
};

inline constexpr int kDefaultMaxSweeps = 10000;

/// Description of a closed convex set admitting an exact metric projection.
/// Immutable after construction; all queries are pure.
class ConvexSet {
 public:
  using Desc =
      std::variant<WholeSpace, BoxSet, BallSet, HalfspaceSet, HyperplaneSet, SimplexSet,
                   IntersectionSet>;

  static ConvexSet whole_space(std::size_t dim);
  static ConvexSet box(Vec lower, Vec upper);
  static ConvexSet ball(Vec center, double radius);
  static ConvexSet halfspace(Vec normal, double offset);
  static ConvexSet hyperplane(Vec normal, double offset);
  static ConvexSet simplex(std::size_t dim, double scale);
  static ConvexSet intersection(std::vector<ConvexSet> members, Vec witness);

  std::size_t dim() const;
  std::string kind() const;
  const Desc& desc() const { return desc_; }

  /// Nearest point of the set. For intersections this runs correction sweeps
  /// with the default sweep budget.
  Vec project(const Vec& x) const;

  bool contains(const Vec& x, double eps = kEpsEq) const;

  /// A deterministic feasible point (witness for intersections).
  Vec any_point() const;

 private:
  explicit ConvexSet(Desc d) : desc_(std::move(d)) {}
  Desc desc_;
};

/// Dykstra correction sweeps for intersections. Returns a point within eps_eq
/// of the exact projection, certified against sampled feasible points; throws
/// ProjectionError with the best iterate if the certificate is not reached
/// within max_sweeps.
Vec project_intersection(const IntersectionSet& c, const Vec& x,
                         int max_sweeps = kDefaultMaxSweeps);

}  // namespace vifp
