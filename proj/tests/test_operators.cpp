#include <doctest.h>

#include <cmath>
#include <limits>

#include "vifp/operators.hpp"

using namespace vifp;

TEST_SUITE_BEGIN("operators");

TEST_CASE("apply_operator: hand values") {
  CHECK(IsmOperator::zero(2).apply({5, 5}) == Vec{0, 0});
  CHECK(IsmOperator::affine(Matrix::identity(2), zeros(2)).apply({1, 2}) == Vec{1, 2});

  Rng rng(3);
  const IsmOperator a = ism_from_pseudocontraction(PointMapping::constant(zeros(2)), 0.0, 2, rng);
  CHECK(a.apply({3, 4}) == Vec{3, 4});  // x - S x with S constant 0
  CHECK_THROWS_AS(IsmOperator::zero(2).apply({1, 2, 3}), DimensionError);
}

TEST_CASE("apply_mapping: hand values") {
  CHECK(PointMapping::identity().apply({7}) == Vec{7});
  CHECK(PointMapping::scale(0.5, zeros(2)).apply({2, 4}) == Vec{1, 2});
  CHECK(approx_eq(PointMapping::project_onto(ConvexSet::box({0, 0}, {1, 1})).apply({2, -1}),
                  {1, 0}));
  CHECK_THROWS_AS(PointMapping::constant({1, 2}).apply({1, 2, 3}), DimensionError);
}

TEST_CASE("w_apply: identity family is the identity at any depth") {
  const WMapping w{{PointMapping::identity()}, {0.5}, WMapping::Tail::RepeatLast, 64};
  CHECK(w.apply(5, {1, 2}) == Vec{1, 2});
  CHECK(w.apply(64, {1, 2}) == Vec{1, 2});
}

TEST_CASE("w_apply: single constant level") {
  const WMapping w{{PointMapping::constant(zeros(2))}, {0.5}, WMapping::Tail::Identity, 64};
  CHECK(approx_eq(w.apply(1, {2, 0}), {1, 0}));
}

TEST_CASE("w_apply: two constant levels collapse to half") {
  const WMapping w{{PointMapping::constant(zeros(2)), PointMapping::constant(zeros(2))},
                   {0.5},
                   WMapping::Tail::Identity,
                   64};
  CHECK(approx_eq(w.apply(2, {1, 0}), {0.5, 0}));
}

TEST_CASE("w_apply: depth errors") {
  const WMapping capped{{PointMapping::identity()}, {0.5}, WMapping::Tail::RepeatLast, 8};
  CHECK_THROWS(capped.apply(9, {1, 2}));
  const WMapping no_tail{{PointMapping::identity()}, {0.5}, WMapping::Tail::None, 64};
  CHECK_THROWS(no_tail.apply(2, {1, 2}));
}

TEST_CASE("w_limit_apply: identity family converges immediately") {
  const WMapping w{{PointMapping::identity()}, {0.5}, WMapping::Tail::RepeatLast, 64};
  CHECK(w.apply_limit({3, -1}, 1e-12) == Vec{3, -1});
}

TEST_CASE("w_limit_apply: constant family limit by hand unroll") {
  // all levels map to 0 with mu = 0.5, so every depth evaluates to x/2 and the
  // level gap is exactly zero from depth 2 on
  const WMapping w{{PointMapping::constant(zeros(2))}, {0.5}, WMapping::Tail::RepeatLast, 64};
  for (int n = 1; n <= 8; ++n) CHECK(approx_eq(w.apply(n, {1, 0}), {0.5, 0}));
  CHECK(approx_eq(w.apply_limit({1, 0}, 1e-8), {0.5, 0}));
}

TEST_CASE("w_limit_apply: identity tail freezes the evaluation above level 1") {
  const WMapping w{{PointMapping::scale(0.25, {1.0, 1.0})}, {0.5}, WMapping::Tail::Identity, 64};
  const Vec x{4, 0};
  const Vec w1 = w.apply(1, x);
  CHECK(approx_eq(w.apply(5, x), w1));
  CHECK(approx_eq(w.apply(64, x), w1));
  CHECK(approx_eq(w.apply_limit(x, 1e-10), w1));
}

TEST_CASE("w_limit_apply: cap reached reports the gap") {
  // level gaps shrink like (mu * sigma)^n, far above 1e-12 at cap 3
  const WMapping w{{PointMapping::scale(0.9, {1, 0})}, {0.5}, WMapping::Tail::RepeatLast, 3};
  CHECK_THROWS_AS(w.apply_limit({5, 5}, 1e-12), ConvergenceError);
}

TEST_CASE("estimate_ism_constant: identity and diagonal spectra") {
  Rng rng(5);
  const IsmOperator identity = IsmOperator::affine(Matrix::identity(3), zeros(3));
  CHECK(estimate_ism_constant(identity, rng, 2000) == doctest::Approx(1.0).epsilon(1e-9));

  const IsmOperator diag = IsmOperator::affine(Matrix::diagonal({1, 2}), zeros(2));
  const double est = estimate_ism_constant(diag, rng, 10000);
  CHECK(est >= 0.5 - 1e-9);  // certified value is exact, the estimate never dips below
  CHECK(est <= 0.52);        // and the sampled minimum approaches the eigendirection value
  CHECK(diag.alpha() == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(estimate_ism_constant(IsmOperator::zero(2), rng, 100), CertificationError);
}

TEST_CASE("verify_nonexpansive: hand cases") {
  Rng rng(7);
  CHECK(verify_nonexpansive(PointMapping::identity(), 2, rng, 500));
  CHECK_FALSE(verify_nonexpansive(PointMapping::scale(2.0, zeros(2)), 2, rng, 500));
  CHECK(verify_nonexpansive(PointMapping::project_onto(ConvexSet::ball(zeros(2), 1.0)), 2, rng,
                            500));
  CHECK(verify_nonexpansive(PointMapping::project_onto(ConvexSet::simplex(3, 1.0)), 3, rng,
                            500));
}

TEST_CASE("ism_from_lipschitz: certified constant and declared-formula value") {
  Rng rng(9);
  const IsmOperator grad = ism_from_lipschitz(PointMapping::identity(), 1.0, 2, rng);
  CHECK(grad.alpha() == doctest::Approx(1.0).epsilon(1e-9));
  REQUIRE(grad.alpha_lipschitz().has_value());
  CHECK(*grad.alpha_lipschitz() == doctest::Approx(2.0).epsilon(1e-12));

  const IsmOperator half = ism_from_lipschitz(PointMapping::scale(0.5, zeros(2)), 0.5, 2, rng);
  CHECK(half.alpha() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(*half.alpha_lipschitz() == doctest::Approx(4.0).epsilon(1e-12));

  // constant mappings never attain a positive Lipschitz constant
  CHECK_THROWS_AS(ism_from_lipschitz(PointMapping::constant(zeros(2)), 1.0, 2, rng),
                  CertificationError);
  // declared constant below the sampled ratio is rejected with a witness
  CHECK_THROWS_AS(ism_from_lipschitz(PointMapping::scale(0.9, zeros(2)), 0.5, 2, rng),
                  CertificationError);
}

TEST_CASE("ism_from_pseudocontraction: hand cases") {
  Rng rng(11);
  const IsmOperator from_identity =
      ism_from_pseudocontraction(PointMapping::identity(), 0.0, 2, rng);
  CHECK(from_identity.apply({3, -2}) == Vec{0, 0});
  CHECK(from_identity.alpha() == doctest::Approx(0.5).epsilon(1e-12));

  const IsmOperator from_reflection =
      ism_from_pseudocontraction(PointMapping::scale(-1.0, zeros(2)), 0.0, 2, rng);
  CHECK(from_reflection.apply({1, 2}) == Vec{2, 4});  // (I - S) x = 2x
  CHECK(from_reflection.alpha() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(estimate_ism_constant(from_reflection, rng, 2000) ==
        doctest::Approx(0.5).epsilon(1e-9));

  const IsmOperator from_contraction =
      ism_from_pseudocontraction(PointMapping::scale(0.5, zeros(2)), 0.0, 2, rng);
  CHECK(from_contraction.apply({2, 0}) == Vec{1, 0});  // 0.5 x

  // an expansion violates the defining inequality for k = 0
  CHECK_THROWS_AS(ism_from_pseudocontraction(PointMapping::scale(2.0, zeros(2)), 0.0, 2, rng),
                  CertificationError);
}

TEST_CASE("wmapping certification rejects expansive members with a witness") {
  try {
    WMapping::certified({PointMapping::scale(2.0, zeros(2))}, {0.5},
                        WMapping::Tail::RepeatLast, 64, 2);
    FAIL("expected CertificationError");
  } catch (const CertificationError& e) {
    REQUIRE(e.witness.has_value());
    const auto& [x, y] = *e.witness;
    const PointMapping t = PointMapping::scale(2.0, zeros(2));
    CHECK(dist(t.apply(x), t.apply(y)) > dist(x, y));
  }
}

TEST_CASE("wmapping weight validation") {
  CHECK_THROWS_AS(WMapping::certified({PointMapping::identity()}, {1.0},
                                      WMapping::Tail::RepeatLast, 64, 2),
                  CorridorError);
  CHECK_THROWS_AS(WMapping::certified({PointMapping::identity()}, {0.0},
                                      WMapping::Tail::RepeatLast, 64, 2),
                  CorridorError);
}

TEST_CASE("W_n is nonexpansive across depths on sampled pairs") {
  Rng build(13);
  const Vec target{0.3, -0.2};
  const WMapping w = WMapping::certified(
      {PointMapping::scale(0.7, target), PointMapping::project_onto(ConvexSet::ball(zeros(2), 2)),
       PointMapping::scale(-0.9, target)},
      {0.5}, WMapping::Tail::RepeatLast, 64, 2);
  Rng rng(17);
  for (int depth : {1, 2, 3, 8, 21, 64}) {
    for (int i = 0; i < 200; ++i) {
      const Vec x = rng.uniform_vec(2, -10, 10);
      const Vec y = rng.uniform_vec(2, -10, 10);
      CHECK(dist(w.apply(depth, x), w.apply(depth, y)) <= dist(x, y) * (1 + 1e-10) + 1e-10);
    }
  }
}

TEST_CASE("packaged mapping reproduces the depth evaluation") {
  const Vec z{0.2, -0.6};
  const WMapping w = WMapping::certified(
      {PointMapping::scale(0.7, z), PointMapping::scale(-0.4, z),
       PointMapping::project_onto(ConvexSet::ball(zeros(2), 2.0))},
      {0.5, 0.3, 0.6}, WMapping::Tail::RepeatLast, 64, 2);
  Rng rng(41);
  for (int depth : {1, 2, 5, 12}) {
    const PointMapping packaged = w.as_mapping(depth);
    CHECK(packaged.certified_nonexpansive());
    for (int i = 0; i < 50; ++i) {
      const Vec x = rng.uniform_vec(2, -4, 4);
      CHECK(approx_eq(packaged.apply(x), w.apply(depth, x), 1e-12));
    }
  }
}

TEST_CASE("common fixed points are fixed by W_n") {
  const Vec z{0.4, 0.1};
  const WMapping w = WMapping::certified(
      {PointMapping::scale(0.5, z), PointMapping::scale(-0.8, z), PointMapping::scale(0.9, z)},
      {0.5}, WMapping::Tail::RepeatLast, 64, 2);
  for (int depth : {1, 2, 3, 10, 64}) CHECK(dist(w.apply(depth, z), z) <= 1e-10);
}

TEST_CASE("level gaps decay on contraction families") {
  const Vec z{0.1, 0.5};
  const WMapping w = WMapping::certified(
      {PointMapping::scale(0.6, z), PointMapping::scale(0.4, z), PointMapping::scale(0.8, z)},
      {0.5}, WMapping::Tail::RepeatLast, 64, 2);
  Rng rng(19);
  for (int i = 0; i < 20; ++i) {
    const Vec x = rng.uniform_vec(2, -5, 5);
    double prev_gap = std::numeric_limits<double>::infinity();
    for (int n = 2; n < 30; ++n) {
      const double gap = dist(w.apply(n + 1, x), w.apply(n, x));
      if (n > 2) CHECK(gap <= prev_gap + 1e-12);
      prev_gap = gap;
    }
  }
}

TEST_CASE("remark-1 consistency: sampled lipschitz ratio at most 1/alpha") {
  Rng rng(23);
  const std::vector<IsmOperator> ops = {
      IsmOperator::affine(Matrix::diagonal({1, 2}), zeros(2)),
      IsmOperator::gradient_quadratic(Matrix::diagonal({0.5, 1.7}), zeros(2)),
      ism_from_pseudocontraction(PointMapping::scale(-1.0, zeros(2)), 0.0, 2, rng)};
  for (const auto& a : ops) {
    double max_ratio = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const Vec x = rng.uniform_vec(2, -10, 10);
      const Vec y = rng.uniform_vec(2, -10, 10);
      const double in = dist(x, y);
      if (in <= kEpsEq) continue;
      max_ratio = std::max(max_ratio, dist(a.apply(x), a.apply(y)) / in);
    }
    CHECK(max_ratio <= 1.0 / a.alpha() + 1e-8);
    CHECK(a.alpha() <= 1.0 / a.lipschitz() + 1e-8);
  }
}

TEST_CASE("nonsymmetric affine operators get sampled certificates") {
  // sym part is the identity, ||M|| = sqrt(1.25): the monotonicity ratio is
  // constant at 1/1.25 = 0.8 in every direction
  Matrix m(2, 2);
  m.at(0, 0) = 1.0;
  m.at(0, 1) = 0.5;
  m.at(1, 0) = -0.5;
  m.at(1, 1) = 1.0;
  const IsmOperator a = IsmOperator::affine(m, zeros(2));
  CHECK(a.alpha() == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(a.lipschitz() == doctest::Approx(std::sqrt(1.25)).epsilon(1e-12));
  CHECK(a.alpha() <= 1.0 / a.lipschitz() + 1e-8);

  // indefinite symmetric matrices are rejected outright
  CHECK_THROWS_AS(IsmOperator::affine(Matrix::diagonal({1, -1}), zeros(2)),
                  CertificationError);
}

TEST_CASE("gradient_quadratic requires symmetry and positive semidefiniteness") {
  Matrix skew(2, 2);
  skew.at(0, 1) = 1.0;
  skew.at(1, 0) = -1.0;
  CHECK_THROWS_AS(IsmOperator::gradient_quadratic(skew, zeros(2)), CertificationError);
  CHECK_THROWS_AS(IsmOperator::gradient_quadratic(Matrix::diagonal({1, -1}), zeros(2)),
                  CertificationError);
}

TEST_CASE("declared affine constants are checked against the sampled estimate") {
  CHECK_THROWS_AS(IsmOperator::affine_declared(Matrix::diagonal({1, 2}), zeros(2), 0.9),
                  CertificationError);
  const IsmOperator ok = IsmOperator::affine_declared(Matrix::diagonal({1, 2}), zeros(2), 0.5);
  CHECK(ok.alpha() == doctest::Approx(0.5));
}

TEST_SUITE_END();
