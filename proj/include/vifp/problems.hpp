#pragma once

#include <optional>
#include <string>

#include "vifp/core.hpp"
#include "vifp/operators.hpp"
#include "vifp/sets.hpp"

namespace vifp {

/// A certified test problem: the feasible set, the monotone operator, and the
/// mapping family, with a nonempty joint solution set witnessed at generation
/// time.
struct ProblemInstance {
  ConvexSet c;
  IsmOperator a;
  WMapping w;
  std::optional<Vec> oracle_hint;  // exact solution when the construction pins one
  std::string label;
};

/// Quadratic objective over the unit box: f(x) = 1/2 x^T Q x + c^T x with the
/// given symmetric PSD Q; the family is the box projection at every level.
ProblemInstance quadratic_box_instance(Matrix q, Vec c, std::string label = "quadratic_box");

/// Random Q with spectrum in [0.5, 2] and c in [-2, 2]^d.
ProblemInstance gen_quadratic_box(std::size_t d, Rng& rng);

/// m contractions toward a common interior target of Ball(0, 2), factors in
/// [0.3, 0.9]; the operator is zero, so the joint solution set is exactly the
/// target.
ProblemInstance gen_common_fixed_family(std::size_t d, std::size_t m, Rng& rng);

/// A k-strictly pseudocontractive point reflection through the origin with a
/// random scaling draw; the operator is the residual I - S with
/// alpha = (1-k)/2 and the admissible step interval (0, 1-k).
ProblemInstance gen_pseudocontractive(std::size_t d, double k, Rng& rng);

struct ContractionSpeedInstance {
  PointMapping t;
  Vec fixed_point;
  double sigma;
};

/// A contraction toward a random point, factor in [0.5, 0.95], for
/// iterations-to-tolerance comparisons.
ContractionSpeedInstance gen_contraction_speed(Rng& rng);

}  // namespace vifp
