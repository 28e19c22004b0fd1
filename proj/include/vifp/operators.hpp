#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vifp/core.hpp"
#include "vifp/sets.hpp"

namespace vifp {

/// Default sampling policy for certificates: pairs drawn from the unit box
/// scaled by 10.
inline constexpr int kCertPairs = 10000;
inline constexpr double kCertBoxHalfWidth = 10.0;
inline constexpr std::uint64_t kCertSeed = 0xce2715ull;

// ---------------------------------------------------------------------------
// PointMapping: self-mappings T of the ambient space / of C
// ---------------------------------------------------------------------------

class PointMapping {
 public:
  struct Identity {};
  struct Constant {
    Vec target;
  };
  /// x -> center + factor * (x - center)
  struct Scale {
    double factor;
    Vec center;
  };
  struct ProjectOnto {
    ConvexSet set;
  };
  struct Stage;
  /// Nested averaged recursion over stages (mu_k, T_k):
  ///   v_{m+1} = x,   v_k = mu_k * T_k(v_{k+1}) + (1 - mu_k) * x,
  /// applied value is v_1.
  struct AveragedComposition {
    std::vector<Stage> stages;
  };

  using Desc = std::variant<Identity, Constant, Scale, ProjectOnto, AveragedComposition>;

  static PointMapping identity();
  static PointMapping constant(Vec target);
  static PointMapping scale(double factor, Vec center);
  static PointMapping project_onto(ConvexSet set);
  static PointMapping averaged_composition(std::vector<std::pair<double, PointMapping>> stages);

  Vec apply(const Vec& x) const;

  /// 0 when the mapping works in any dimension (Identity).
  std::size_t dim() const;

  /// True when nonexpansivity follows from the construction itself
  /// (projections, |factor| <= 1, averaged stages of certified members).
  bool certified_nonexpansive() const;

  const Desc& desc() const { return *desc_; }
  std::string kind() const;

 private:
  PointMapping(Desc d, bool certified);
  std::shared_ptr<const Desc> desc_;  // immutable, cheap to copy
  bool certified_;
};

struct PointMapping::Stage {
  double mu;
  std::shared_ptr<const PointMapping> map;
};

/// Samples `pairs` point pairs and checks ||Tx - Ty|| <= ||x - y|| up to
/// relative slack 1e-10.
bool verify_nonexpansive(const PointMapping& t, std::size_t dim, Rng& rng,
                         int pairs = kCertPairs);

/// Like verify_nonexpansive but returns the first violating pair, if any.
std::optional<std::pair<Vec, Vec>> nonexpansive_violation(const PointMapping& t,
                                                          std::size_t dim, Rng& rng,
                                                          int pairs = kCertPairs);

// ---------------------------------------------------------------------------
// IsmOperator: inverse strongly monotone operators A
// ---------------------------------------------------------------------------

class IsmOperator {
 public:
  struct Zero {
    std::size_t dim;
  };
  /// x -> M x + shift
  struct Affine {
    Matrix m;
    Vec shift;
  };
  /// Gradient of f(x) = 1/2 x^T Q x + c^T x with symmetric PSD Q: x -> Q x + c
  struct GradientQuadratic {
    Matrix q;
    Vec c;
  };
  /// x -> x - S(x) for a k-strictly pseudocontractive S
  struct PseudocontractionResidual {
    PointMapping s;
    double k;
  };
  /// An arbitrary mapping admitted through a Lipschitz declaration.
  struct LipschitzMapping {
    PointMapping map;
    double declared_l;
    std::size_t dim;
  };

  using Desc =
      std::variant<Zero, Affine, GradientQuadratic, PseudocontractionResidual, LipschitzMapping>;

  static IsmOperator zero(std::size_t dim);
  /// Certifies constants at construction: exact eigenanalysis when the matrix
  /// is symmetric, sampled estimates otherwise.
  static IsmOperator affine(Matrix m, Vec shift);
  /// Declared-constant path: the declaration is rejected unless the sampled
  /// estimate stays above alpha - 1e-8.
  static IsmOperator affine_declared(Matrix m, Vec shift, double alpha);
  static IsmOperator gradient_quadratic(Matrix q, Vec c);

  Vec apply(const Vec& x) const;
  std::size_t dim() const;

  /// Certified inverse-strong-monotonicity constant; +inf for constant
  /// operators (the defining inequality is vacuous).
  double alpha() const { return alpha_; }
  double lipschitz() const { return lipschitz_; }
  /// The 2/L value from the Lipschitz route, when that route was used.
  std::optional<double> alpha_lipschitz() const { return alpha_lipschitz_; }

  const Desc& desc() const { return *desc_; }
  std::string kind() const;

 private:
  friend IsmOperator ism_from_lipschitz(PointMapping, double, std::size_t, Rng&);
  friend IsmOperator ism_from_pseudocontraction(PointMapping, double, std::size_t, Rng&);
  IsmOperator(Desc d, double alpha, double lipschitz,
              std::optional<double> alpha_lipschitz = std::nullopt);
  std::shared_ptr<const Desc> desc_;
  double alpha_;
  double lipschitz_;
  std::optional<double> alpha_lipschitz_;
};

/// min over sampled pairs of <Ax - Ay, x - y> / ||Ax - Ay||^2, skipping pairs
/// with ||Ax - Ay|| below the equality tolerance. Throws CertificationError
/// when every pair is degenerate.
double estimate_ism_constant(const IsmOperator& a, Rng& rng, int pairs = kCertPairs);

/// Wraps an L-Lipschitz mapping as an operator. The stored alpha is the
/// sampled certificate; alpha_lipschitz() reports 2/L. Rejects mappings that
/// violate L on a sampled pair or never move any sampled pair.
IsmOperator ism_from_lipschitz(PointMapping t, double l, std::size_t dim, Rng& rng);

/// A = I - S for a k-strictly pseudocontractive S, with alpha = (1 - k) / 2.
/// The defining inequality is certified by sampling.
IsmOperator ism_from_pseudocontraction(PointMapping s, double k, std::size_t dim, Rng& rng);

// ---------------------------------------------------------------------------
// WMapping: the family {T_n} with weights {mu_n}
// ---------------------------------------------------------------------------

struct WMapping {
  enum class Tail { RepeatLast, Identity, None };

  std::vector<PointMapping> family;  // T_1, T_2, ... (prefix)
  std::vector<double> mu;            // broadcast: level k uses mu[min(k-1, size-1)]
  Tail tail = Tail::RepeatLast;
  int depth_cap = 64;

  /// Validates weights and certifies every family member nonexpansive by
  /// sampling; throws CertificationError with the witnessing pair otherwise.
  static WMapping certified(std::vector<PointMapping> family, std::vector<double> mu,
                            Tail tail, int depth_cap, std::size_t dim,
                            std::uint64_t cert_seed = kCertSeed, int cert_pairs = kCertPairs);

  int prefix_len() const { return static_cast<int>(family.size()); }
  const PointMapping& member(int k) const;  // 1-based, honoring the tail rule
  double mu_at(int k) const;                // 1-based

  /// W_n x via the backward recursion; n mapping applications.
  Vec apply(int n, const Vec& x) const;

  /// W_n x for the smallest n with level gap <= tol; throws ConvergenceError
  /// carrying the last gap when the cap is reached first.
  Vec apply_limit(const Vec& x, double tol) const;

  /// The depth-n evaluation packaged as a single mapping.
  PointMapping as_mapping(int depth) const;
};

}  // namespace vifp
