#include "vifp/operators.hpp"

#include <cmath>
#include <limits>

namespace vifp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec sample_point(std::size_t dim, Rng& rng) {
  return rng.uniform_vec(dim, -kCertBoxHalfWidth, kCertBoxHalfWidth);
}

}  // namespace

// ---------------------------------------------------------------------------
// PointMapping
// ---------------------------------------------------------------------------

PointMapping::PointMapping(Desc d, bool certified)
    : desc_(std::make_shared<const Desc>(std::move(d))), certified_(certified) {}

PointMapping PointMapping::identity() { return PointMapping(Desc{Identity{}}, true); }

PointMapping PointMapping::constant(Vec target) {
  if (target.empty()) throw DimensionError("constant mapping: empty target");
  if (!finite(target)) throw Error("constant mapping: non-finite target");
  return PointMapping(Desc{Constant{std::move(target)}}, true);
}

PointMapping PointMapping::scale(double factor, Vec center) {
  if (center.empty()) throw DimensionError("scale mapping: empty center");
  if (!std::isfinite(factor)) throw Error("scale mapping: non-finite factor");
  const bool certified = std::abs(factor) <= 1.0;
  return PointMapping(Desc{Scale{factor, std::move(center)}}, certified);
}

PointMapping PointMapping::project_onto(ConvexSet set) {
  return PointMapping(Desc{ProjectOnto{std::move(set)}}, true);
}

PointMapping PointMapping::averaged_composition(
    std::vector<std::pair<double, PointMapping>> stages) {
  if (stages.empty()) throw Error("averaged_composition: no stages");
  AveragedComposition comp;
  bool certified = true;
  for (auto& [mu, map] : stages) {
    if (!(mu >= 0.0 && mu <= 1.0))
      throw CorridorError("averaged_composition: stage weight " + std::to_string(mu) +
                          " outside [0,1]");
    certified = certified && map.certified_nonexpansive();
    comp.stages.push_back(Stage{mu, std::make_shared<const PointMapping>(std::move(map))});
  }
  return PointMapping(Desc{std::move(comp)}, certified);
}

Vec PointMapping::apply(const Vec& x) const {
  return std::visit(
      [&x](const auto& m) -> Vec {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Identity>) {
          return x;
        } else if constexpr (std::is_same_v<T, Constant>) {
          check_same_dim(m.target, x, "constant mapping");
          return m.target;
        } else if constexpr (std::is_same_v<T, Scale>) {
          check_same_dim(m.center, x, "scale mapping");
          return combine(m.factor, x, 1.0 - m.factor, m.center);
        } else if constexpr (std::is_same_v<T, ProjectOnto>) {
          return m.set.project(x);
        } else {
          Vec v = x;
          for (auto it = m.stages.rbegin(); it != m.stages.rend(); ++it) {
            v = combine(it->mu, it->map->apply(v), 1.0 - it->mu, x);
          }
          return v;
        }
      },
      *desc_);
}

std::size_t PointMapping::dim() const {
  return std::visit(
      [](const auto& m) -> std::size_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Identity>) return 0;
        else if constexpr (std::is_same_v<T, Constant>) return m.target.size();
        else if constexpr (std::is_same_v<T, Scale>) return m.center.size();
        else if constexpr (std::is_same_v<T, ProjectOnto>) return m.set.dim();
        else {
          for (const auto& st : m.stages) {
            if (const std::size_t d = st.map->dim(); d != 0) return d;
          }
          return 0;
        }
      },
      *desc_);
}

bool PointMapping::certified_nonexpansive() const { return certified_; }

std::string PointMapping::kind() const {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Identity>) return "identity";
        else if constexpr (std::is_same_v<T, Constant>) return "constant";
        else if constexpr (std::is_same_v<T, Scale>) return "scale";
        else if constexpr (std::is_same_v<T, ProjectOnto>) return "project";
        else return "averaged_composition";
      },
      *desc_);
}

std::optional<std::pair<Vec, Vec>> nonexpansive_violation(const PointMapping& t,
                                                          std::size_t dim, Rng& rng,
                                                          int pairs) {
  if (pairs < 1) throw Error("nonexpansive_violation: pairs must be >= 1");
  if (dim < 1) throw DimensionError("nonexpansive_violation: dimension must be >= 1");
  for (int i = 0; i < pairs; ++i) {
    const Vec x = sample_point(dim, rng);
    const Vec y = sample_point(dim, rng);
    const double in = dist(x, y);
    const double out = dist(t.apply(x), t.apply(y));
    if (out > in * (1.0 + 1e-10)) return std::make_pair(x, y);
  }
  return std::nullopt;
}

bool verify_nonexpansive(const PointMapping& t, std::size_t dim, Rng& rng, int pairs) {
  return !nonexpansive_violation(t, dim, rng, pairs).has_value();
}

// ---------------------------------------------------------------------------
// IsmOperator
// ---------------------------------------------------------------------------

IsmOperator::IsmOperator(Desc d, double alpha, double lipschitz,
                         std::optional<double> alpha_lipschitz)
    : desc_(std::make_shared<const Desc>(std::move(d))),
      alpha_(alpha),
      lipschitz_(lipschitz),
      alpha_lipschitz_(alpha_lipschitz) {}

IsmOperator IsmOperator::zero(std::size_t dim) {
  if (dim < 1) throw DimensionError("zero operator: dimension must be >= 1");
  return IsmOperator(Desc{Zero{dim}}, kInf, 0.0);
}

namespace {

// exact constants for a symmetric PSD matrix: alpha = 1/lambda_max over the
// nonzero part of the spectrum, lipschitz = lambda_max
std::pair<double, double> symmetric_psd_constants(const Vec& eigenvalues,
                                                  const char* what) {
  double lam_max = 0.0;
  for (double lam : eigenvalues) lam_max = std::max(lam_max, lam);
  const double lam_min = eigenvalues.front();
  if (lam_min < -1e-9 * std::max(1.0, lam_max)) {
    throw CertificationError(std::string(what) + ": matrix is not positive semidefinite "
                             "(eigenvalue " + std::to_string(lam_min) + ")");
  }
  if (lam_max <= 1e-14) return {kInf, 0.0};  // constant operator
  return {1.0 / lam_max, lam_max};
}

double spectral_norm(const Matrix& m) {
  const Vec ev = symmetric_eigenvalues(matmul(m.transpose(), m));
  return std::sqrt(std::max(0.0, ev.back()));
}

}  // namespace

IsmOperator IsmOperator::affine(Matrix m, Vec shift) {
  if (m.rows != m.cols) throw DimensionError("affine operator: matrix not square");
  if (shift.size() != m.rows) throw DimensionError("affine operator: shift dimension");
  if (m.is_symmetric(1e-12)) {
    const auto [alpha, lipschitz] = symmetric_psd_constants(symmetric_eigenvalues(m), "affine");
    return IsmOperator(Desc{Affine{std::move(m), std::move(shift)}}, alpha, lipschitz);
  }
  // no exact route for nonsymmetric matrices: sampled certificate
  const double lipschitz = spectral_norm(m);
  IsmOperator provisional(Desc{Affine{std::move(m), std::move(shift)}}, 1.0, lipschitz);
  Rng rng(kCertSeed);
  const double est = estimate_ism_constant(provisional, rng, kCertPairs);
  if (est <= 1e-12)
    throw CertificationError("affine: sampled pairs give no positive monotonicity constant");
  const double alpha = std::min(est, lipschitz > 0.0 ? 1.0 / lipschitz : kInf);
  return IsmOperator(Desc(provisional.desc()), alpha, lipschitz);
}

IsmOperator IsmOperator::affine_declared(Matrix m, Vec shift, double alpha) {
  if (!(alpha > 0.0)) throw CertificationError("declared alpha must be strictly positive");
  IsmOperator op = affine(std::move(m), std::move(shift));
  Rng rng(kCertSeed);
  double est = kInf;
  try {
    est = estimate_ism_constant(op, rng, kCertPairs);
  } catch (const CertificationError&) {
    // constant operator: any declaration is admissible
  }
  if (est < alpha - 1e-8) {
    throw CertificationError("declared alpha " + std::to_string(alpha) +
                             " rejected: sampled estimate " + std::to_string(est));
  }
  return IsmOperator(Desc{op.desc()}, alpha, op.lipschitz());
}

IsmOperator IsmOperator::gradient_quadratic(Matrix q, Vec c) {
  if (q.rows != q.cols) throw DimensionError("gradient_quadratic: matrix not square");
  if (c.size() != q.rows) throw DimensionError("gradient_quadratic: linear term dimension");
  if (!q.is_symmetric(1e-9))
    throw CertificationError("gradient_quadratic: matrix must be symmetric");
  const auto [alpha, lipschitz] =
      symmetric_psd_constants(symmetric_eigenvalues(q), "gradient_quadratic");
  return IsmOperator(Desc{GradientQuadratic{std::move(q), std::move(c)}}, alpha, lipschitz);
}

Vec IsmOperator::apply(const Vec& x) const {
  return std::visit(
      [&x](const auto& op) -> Vec {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, Zero>) {
          if (x.size() != op.dim) throw DimensionError("zero operator: dimension mismatch");
          return zeros(op.dim);
        } else if constexpr (std::is_same_v<T, Affine>) {
          return add(op.m.apply(x), op.shift);
        } else if constexpr (std::is_same_v<T, GradientQuadratic>) {
          return add(op.q.apply(x), op.c);
        } else if constexpr (std::is_same_v<T, PseudocontractionResidual>) {
          return sub(x, op.s.apply(x));
        } else {
          return op.map.apply(x);
        }
      },
      *desc_);
}

std::size_t IsmOperator::dim() const {
  return std::visit(
      [](const auto& op) -> std::size_t {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, Zero>) return op.dim;
        else if constexpr (std::is_same_v<T, Affine>) return op.m.rows;
        else if constexpr (std::is_same_v<T, GradientQuadratic>) return op.q.rows;
        else if constexpr (std::is_same_v<T, PseudocontractionResidual>) return op.s.dim();
        else return op.dim;
      },
      *desc_);
}

std::string IsmOperator::kind() const {
  return std::visit(
      [](const auto& op) -> std::string {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, Zero>) return "zero";
        else if constexpr (std::is_same_v<T, Affine>) return "affine";
        else if constexpr (std::is_same_v<T, GradientQuadratic>) return "gradient_quadratic";
        else if constexpr (std::is_same_v<T, PseudocontractionResidual>)
          return "pseudocontraction_residual";
        else return "lipschitz";
      },
      *desc_);
}

double estimate_ism_constant(const IsmOperator& a, Rng& rng, int pairs) {
  if (pairs < 1) throw Error("estimate_ism_constant: pairs must be >= 1");
  const std::size_t d = a.dim();
  if (d < 1) throw DimensionError("estimate_ism_constant: operator dimension unknown");
  double best = kInf;
  int usable = 0;
  for (int i = 0; i < pairs; ++i) {
    const Vec x = sample_point(d, rng);
    const Vec y = sample_point(d, rng);
    const Vec da = sub(a.apply(x), a.apply(y));
    const double denom = dot(da, da);
    if (std::sqrt(denom) <= kEpsEq) continue;  // inequality vacuous
    ++usable;
    best = std::min(best, dot(da, sub(x, y)) / denom);
  }
  if (usable == 0)
    throw CertificationError("estimate_ism_constant: all sampled pairs degenerate");
  return best;
}

IsmOperator ism_from_lipschitz(PointMapping t, double l, std::size_t dim, Rng& rng) {
  if (!(l > 0.0)) throw CertificationError("ism_from_lipschitz: L must be strictly positive");
  if (dim < 1) throw DimensionError("ism_from_lipschitz: dimension must be >= 1");
  double max_ratio = 0.0;
  for (int i = 0; i < kCertPairs; ++i) {
    const Vec x = sample_point(dim, rng);
    const Vec y = sample_point(dim, rng);
    const double in = dist(x, y);
    if (in <= kEpsEq) continue;
    const double ratio = dist(t.apply(x), t.apply(y)) / in;
    if (ratio > l * (1.0 + 1e-9)) {
      throw CertificationError("ism_from_lipschitz: sampled pair violates the declared "
                               "Lipschitz constant (ratio " + std::to_string(ratio) + ")",
                               std::make_pair(x, y));
    }
    max_ratio = std::max(max_ratio, ratio);
  }
  if (max_ratio <= 1e-12) {
    throw CertificationError(
        "ism_from_lipschitz: mapping never moves sampled pairs; L is not attained");
  }
  IsmOperator provisional(IsmOperator::Desc{IsmOperator::LipschitzMapping{t, l, dim}}, 1.0, l);
  const double est = estimate_ism_constant(provisional, rng, kCertPairs);
  if (est <= 1e-12)
    throw CertificationError("ism_from_lipschitz: sampled monotonicity constant is not positive");
  return IsmOperator(IsmOperator::Desc{IsmOperator::LipschitzMapping{std::move(t), l, dim}}, est,
                     l, 2.0 / l);
}

IsmOperator ism_from_pseudocontraction(PointMapping s, double k, std::size_t dim, Rng& rng) {
  if (!(k >= 0.0 && k < 1.0))
    throw CorridorError("ism_from_pseudocontraction: k must lie in [0, 1)");
  if (dim < 1) throw DimensionError("ism_from_pseudocontraction: dimension must be >= 1");
  for (int i = 0; i < kCertPairs; ++i) {
    const Vec x = sample_point(dim, rng);
    const Vec y = sample_point(dim, rng);
    const Vec sx = s.apply(x);
    const Vec sy = s.apply(y);
    const double lhs = dot(sub(sx, sy), sub(sx, sy));
    const double base = dot(sub(x, y), sub(x, y));
    const Vec rx = sub(x, sx);
    const Vec ry = sub(y, sy);
    const double residual_gap = dot(sub(rx, ry), sub(rx, ry));
    if (lhs > base + k * residual_gap + 1e-9 * (1.0 + base)) {
      throw CertificationError("ism_from_pseudocontraction: sampled pair violates the "
                               "defining inequality",
                               std::make_pair(x, y));
    }
  }
  const double alpha = 0.5 * (1.0 - k);
  return IsmOperator(IsmOperator::Desc{IsmOperator::PseudocontractionResidual{std::move(s), k}},
                     alpha, 2.0 / (1.0 - k));
}

// ---------------------------------------------------------------------------
// WMapping
// ---------------------------------------------------------------------------

WMapping WMapping::certified(std::vector<PointMapping> family, std::vector<double> mu,
                             Tail tail, int depth_cap, std::size_t dim,
                             std::uint64_t cert_seed, int cert_pairs) {
  if (family.empty()) throw Error("wmapping: family prefix is empty");
  if (mu.empty()) throw Error("wmapping: weight schedule is empty");
  if (depth_cap < 1) throw Error("wmapping: depth cap must be >= 1");
  for (double m : mu) {
    if (!(m > 0.0 && m < 1.0))
      throw CorridorError("wmapping: weight " + std::to_string(m) +
                          " outside (0, 1)");
  }
  Rng rng(cert_seed);
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (family[i].certified_nonexpansive()) continue;
    if (auto pair = nonexpansive_violation(family[i], dim, rng, cert_pairs)) {
      throw CertificationError("wmapping: family member " + std::to_string(i + 1) + " (" +
                                   family[i].kind() + ") is not nonexpansive on a sampled pair",
                               pair);
    }
  }
  return WMapping{std::move(family), std::move(mu), tail, depth_cap};
}

const PointMapping& WMapping::member(int k) const {
  static const PointMapping kIdentity = PointMapping::identity();
  if (k < 1) throw Error("wmapping: member index must be >= 1");
  const int m = prefix_len();
  if (k <= m) return family[static_cast<std::size_t>(k - 1)];
  switch (tail) {
    case Tail::RepeatLast:
      return family.back();
    case Tail::Identity:
      return kIdentity;
    case Tail::None:
      throw Error("wmapping: level " + std::to_string(k) + " exceeds the family prefix (" +
                  std::to_string(m) + ") and no tail rule is set");
  }
  throw Error("wmapping: invalid tail rule");
}

double WMapping::mu_at(int k) const {
  if (k < 1) throw Error("wmapping: weight index must be >= 1");
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(k - 1), mu.size() - 1);
  return mu[i];
}

Vec WMapping::apply(int n, const Vec& x) const {
  if (n < 1) throw Error("wmapping: depth must be >= 1");
  if (n > depth_cap)
    throw Error("wmapping: depth " + std::to_string(n) + " exceeds cap " +
                std::to_string(depth_cap));
  Vec v = x;
  for (int k = n; k >= 1; --k) {
    const double m = mu_at(k);
    v = combine(m, member(k).apply(v), 1.0 - m, x);
  }
  return v;
}

Vec WMapping::apply_limit(const Vec& x, double tol) const {
  if (!(tol > 0.0)) throw Error("wmapping: tolerance must be strictly positive");
  Vec prev = apply(1, x);
  double gap = kInf;
  for (int n = 2; n <= depth_cap; ++n) {
    Vec cur = apply(n, x);
    gap = dist(cur, prev);
    if (gap <= tol) return cur;
    prev = std::move(cur);
  }
  throw ConvergenceError("wmapping: level gap " + std::to_string(gap) +
                             " still above tolerance at the depth cap",
                         prev, gap);
}

PointMapping WMapping::as_mapping(int depth) const {
  if (depth < 1 || depth > depth_cap) throw Error("wmapping: invalid packaging depth");
  std::vector<std::pair<double, PointMapping>> stages;
  stages.reserve(static_cast<std::size_t>(depth));
  for (int k = 1; k <= depth; ++k) stages.emplace_back(mu_at(k), member(k));
  return PointMapping::averaged_composition(std::move(stages));
}

}  // namespace vifp
