#include "vifp/problems.hpp"

#include <cmath>

#include "vifp/diagnostics.hpp"

namespace vifp {

namespace {

WMapping certified_family(std::vector<PointMapping> members, std::size_t dim) {
  return WMapping::certified(std::move(members), {0.5}, WMapping::Tail::RepeatLast, 64, dim);
}

}  // namespace

ProblemInstance quadratic_box_instance(Matrix q, Vec c, std::string label) {
  const std::size_t d = q.rows;
  if (c.size() != d) throw DimensionError("quadratic_box_instance: linear term dimension");
  ConvexSet box = ConvexSet::box(zeros(d), Vec(d, 1.0));
  IsmOperator grad = IsmOperator::gradient_quadratic(std::move(q), std::move(c));
  WMapping w = certified_family({PointMapping::project_onto(box)}, d);
  ProblemInstance inst{box, std::move(grad), std::move(w), std::nullopt, std::move(label)};
  inst.oracle_hint = oracle_solve(inst.c, inst.a, inst.w);  // nonempty-solution witness
  return inst;
}

ProblemInstance gen_quadratic_box(std::size_t d, Rng& rng) {
  if (d < 1 || d > 20) throw Error("gen_quadratic_box: d must lie in [1, 20]");
  Matrix q = random_symmetric_with_spectrum(d, 0.5, 2.0, rng);
  Vec c = rng.uniform_vec(d, -2.0, 2.0);
  return quadratic_box_instance(std::move(q), std::move(c),
                                "quadratic_box(d=" + std::to_string(d) + ")");
}

ProblemInstance gen_common_fixed_family(std::size_t d, std::size_t m, Rng& rng) {
  if (d < 1 || d > 20) throw Error("gen_common_fixed_family: d must lie in [1, 20]");
  if (m < 1 || m > 32) throw Error("gen_common_fixed_family: m must lie in [1, 32]");

  Vec direction = rng.normal_vec(d);
  const double len = norm(direction);
  if (len > 0.0) direction = scaled(1.0 / len, direction);
  const Vec target = scaled(rng.uniform(0.0, 1.5), direction);

  std::vector<PointMapping> members;
  members.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    members.push_back(PointMapping::scale(rng.uniform(0.3, 0.9), target));
  }

  ProblemInstance inst{ConvexSet::ball(zeros(d), 2.0), IsmOperator::zero(d),
                       certified_family(std::move(members), d), target,
                       "common_fixed_family(d=" + std::to_string(d) +
                           ",m=" + std::to_string(m) + ")"};
  const Vec witness = oracle_solve(inst.c, inst.a, inst.w);
  if (dist(witness, target) > 1e-8)
    throw CertificationError("gen_common_fixed_family: oracle disagrees with the target");
  return inst;
}

ProblemInstance gen_pseudocontractive(std::size_t d, double k, Rng& rng) {
  if (d < 1 || d > 20) throw Error("gen_pseudocontractive: d must lie in [1, 20]");
  if (!(k >= 0.0 && k < 1.0)) throw CorridorError("gen_pseudocontractive: k must lie in [0, 1)");

  for (int attempt = 0; attempt < 8; ++attempt) {
    const double sigma = rng.uniform(0.8, 1.0);
    const double factor = -sigma * 0.5 * (1.0 + k);  // reflection composed with scaling
    PointMapping s = PointMapping::scale(factor, zeros(d));
    try {
      IsmOperator a = ism_from_pseudocontraction(s, k, d, rng);
      ProblemInstance inst{ConvexSet::ball(zeros(d), 2.0), std::move(a),
                           certified_family({PointMapping::identity()}, d), zeros(d),
                           "pseudocontractive(d=" + std::to_string(d) +
                               ",k=" + std::to_string(k) + ")"};
      const Vec witness = oracle_solve(inst.c, inst.a, inst.w);
      if (norm(witness) > 1e-8)
        throw CertificationError("gen_pseudocontractive: oracle drifted from the origin");
      return inst;
    } catch (const CertificationError&) {
      continue;
    }
  }
  throw CertificationError("gen_pseudocontractive: certification failed across retries");
}

ContractionSpeedInstance gen_contraction_speed(Rng& rng) {
  const std::size_t d = 1 + static_cast<std::size_t>(rng.uniform() * 4.0);
  const double sigma = rng.uniform(0.5, 0.95);
  const Vec z = rng.uniform_vec(d, -1.0, 1.0);
  return ContractionSpeedInstance{PointMapping::scale(sigma, z), z, sigma};
}

}  // namespace vifp
