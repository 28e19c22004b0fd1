#include <doctest.h>

#include <cmath>

#include "vifp/problems.hpp"
#include "vifp/schemes.hpp"

using namespace vifp;

namespace {

WMapping identity_family() {
  return WMapping{{PointMapping::identity()}, {0.5}, WMapping::Tail::RepeatLast, 64};
}

}  // namespace

TEST_SUITE_BEGIN("schemes");

TEST_CASE("schedules: emitted values and bounds") {
  const ParamSchedule c = ParamSchedule::constant(0.4);
  CHECK(c.at(0) == 0.4);
  CHECK(c.at(999) == 0.4);
  CHECK(c.lo() == 0.4);
  CHECK(c.hi() == 0.4);

  const ParamSchedule p = ParamSchedule::periodic({0.2, 0.3, 0.5});
  CHECK(p.at(0) == 0.2);
  CHECK(p.at(4) == 0.3);
  CHECK(p.lo() == 0.2);
  CHECK(p.hi() == 0.5);

  const ParamSchedule h = ParamSchedule::harmonic(0.01, 0.8);
  CHECK(h.at(0) == 0.8);
  CHECK(h.at(7) == doctest::Approx(0.1));
  CHECK(h.at(100000) == 0.01);
  for (int n = 0; n < 200; ++n) {
    CHECK(h.at(n) >= h.lo());
    CHECK(h.at(n) <= h.hi());
  }
}

TEST_CASE("scheme names round-trip") {
  for (SchemeKind k : {SchemeKind::Karahan12, SchemeKind::IidukaTakahashiD,
                       SchemeKind::TakahashiToyodaA, SchemeKind::YaoB, SchemeKind::KhanC}) {
    CHECK(scheme_from_name(scheme_name(k)) == k);
  }
  CHECK_THROWS_AS(scheme_from_name("nope"), ConfigError);
}

TEST_CASE("step_karahan: solutions are stationary") {
  const ConvexSet c = ConvexSet::box({0, 0}, {1, 1});
  const IsmOperator a = IsmOperator::zero(2);
  const WMapping w = identity_family();
  const SchemeState s{0, {0.25, 0.75}, {}};
  const SchemeState next = step_karahan(s, c, a, w, 0.5, 0.5);
  CHECK(approx_eq(next.x, s.x));
  CHECK(next.n == 1);
}

TEST_CASE("step_karahan: whole-space identity operator collapses in one step") {
  const ConvexSet c = ConvexSet::whole_space(2);
  const IsmOperator a = IsmOperator::affine(Matrix::identity(2), zeros(2));
  const WMapping w = identity_family();
  const SchemeState s{0, {4, 0}, {}};
  const SchemeState next = step_karahan(s, c, a, w, 1.0, 0.5);
  // t = x - x = 0, y = x/2, next = y - y = 0
  CHECK(approx_eq(next.x, {0, 0}));
  REQUIRE(next.aux.has_value());
  CHECK(approx_eq(*next.aux, {2, 0}));
}

TEST_CASE("step_karahan: one-dimensional hand unroll") {
  const ConvexSet c = ConvexSet::box({0}, {1});
  const IsmOperator a = IsmOperator::zero(1);
  const WMapping w{{PointMapping::constant({0.5})}, {0.5}, WMapping::Tail::RepeatLast, 64};
  const SchemeState s{0, {1}, {}};
  const SchemeState next = step_karahan(s, c, a, w, 0.5, 0.5);
  REQUIRE(next.aux.has_value());
  CHECK((*next.aux)[0] == doctest::Approx(0.875).epsilon(1e-14));
  CHECK(next.x[0] == doctest::Approx(0.6875).epsilon(1e-14));
}

TEST_CASE("step_karahan: lambda outside the admissible interval") {
  const ConvexSet c = ConvexSet::whole_space(2);
  const IsmOperator a = IsmOperator::affine(Matrix::identity(2), zeros(2));  // alpha = 1
  const WMapping w = identity_family();
  const SchemeState s{0, {1, 1}, {}};
  CHECK_THROWS_AS(step_karahan(s, c, a, w, 2.0, 0.5), CorridorError);
  CHECK_THROWS_AS(step_karahan(s, c, a, w, -0.1, 0.5), CorridorError);
}

TEST_CASE("step_iiduka_takahashi: degenerate weights and geometric pull") {
  const ConvexSet c = ConvexSet::whole_space(2);
  const IsmOperator a = IsmOperator::zero(2);
  const PointMapping t = PointMapping::identity();
  const Vec anchor{3, -1};

  const SchemeState s{0, {1, 1}, {}};
  CHECK(approx_eq(step_iiduka_takahashi(s, c, a, t, 0.5, 1.0, anchor).x, anchor));
  CHECK(approx_eq(step_iiduka_takahashi(s, c, a, t, 0.5, 0.0, anchor).x, s.x));

  // anchored at the solution, the distance halves every step
  SchemeState state{0, {1, 1}, {}};
  const Vec z = anchor;
  double prev = dist(state.x, z);
  for (int i = 0; i < 10; ++i) {
    state = step_iiduka_takahashi(state, c, a, t, 0.5, 0.5, z);
    CHECK(dist(state.x, z) == doctest::Approx(0.5 * prev).epsilon(1e-12));
    prev = dist(state.x, z);
  }
}

TEST_CASE("step_takahashi_toyoda: hand cases") {
  const ConvexSet c = ConvexSet::whole_space(1);
  const IsmOperator a = IsmOperator::zero(1);
  CHECK(approx_eq(
      step_takahashi_toyoda({0, {0.7}, {}}, c, a, PointMapping::identity(), 0.5, 0.5).x,
      {0.7}));
  const SchemeState halved =
      step_takahashi_toyoda({0, {1.0}, {}}, c, a, PointMapping::constant({0.0}), 0.5, 0.5);
  CHECK(halved.x[0] == doctest::Approx(0.5).epsilon(1e-14));
  // common fixed point stays put
  const PointMapping toward = PointMapping::scale(0.5, {0.2});
  CHECK(approx_eq(step_takahashi_toyoda({0, {0.2}, {}}, c, a, toward, 0.5, 0.5).x, {0.2}));
}

TEST_CASE("step_yao: printed and amended inner arguments") {
  const ConvexSet c = ConvexSet::whole_space(2);
  const IsmOperator a = IsmOperator::zero(2);
  const PointMapping s = PointMapping::identity();
  const Vec u{9, 9};
  const SchemeState st{0, {1, 1}, {}};

  CHECK(approx_eq(step_yao(st, c, a, s, 0.0, 1.0, 0.0, 0.5, u, false).x, st.x));
  CHECK(approx_eq(step_yao(st, c, a, s, 1.0, 0.0, 0.0, 0.5, u, false).x, u));

  // weights (0, 0.5, 0.5), lambda = 0.5, zero operator: the printed form uses
  // the point y_n itself, contracting by 0.75; the amended form uses A y = 0
  const SchemeState printed = step_yao(st, c, a, s, 0.0, 0.5, 0.5, 0.5, u, false);
  CHECK(approx_eq(printed.x, {0.75, 0.75}));
  const SchemeState amended = step_yao(st, c, a, s, 0.0, 0.5, 0.5, 0.5, u, true);
  CHECK(approx_eq(amended.x, st.x));

  CHECK_THROWS_AS(step_yao(st, c, a, s, 0.3, 0.3, 0.3, 0.5, u, false), CorridorError);
}

TEST_CASE("step_khan: hand cases") {
  const PointMapping t = PointMapping::scale(0.5, {0.0});
  SchemeState st{0, {1.0}, {}};
  st = step_khan(st, t, 0.5);
  REQUIRE(st.aux.has_value());
  CHECK((*st.aux)[0] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(st.x[0] == doctest::Approx(0.375).epsilon(1e-14));

  CHECK(approx_eq(step_khan({0, {2, 3}, {}}, PointMapping::identity(), 0.5).x, {2, 3}));
  const PointMapping toward = PointMapping::scale(0.5, {0.4, 0.1});
  CHECK(approx_eq(step_khan({0, {0.4, 0.1}, {}}, toward, 0.5).x, {0.4, 0.1}));
  CHECK_THROWS_AS(step_khan({0, {1.0}, {}}, t, 1.5), CorridorError);
}

TEST_CASE("run_scheme: stationary start terminates immediately") {
  const ProblemInstance p = quadratic_box_instance(Matrix::diagonal({1}), {-2});
  REQUIRE(p.oracle_hint.has_value());
  CHECK(approx_eq(*p.oracle_hint, {1.0}, 1e-9));

  SchemeSpec spec;
  spec.lambda = ParamSchedule::constant(0.9);
  const Trace trace = run_scheme(spec, p.c, p.a, p.w, *p.oracle_hint, {});
  CHECK(trace.terminated_by == Termination::Tolerance);
  CHECK(trace.records.size() == 1);
  CHECK(trace.iterations() == 0);
}

TEST_CASE("run_scheme: max_iter 0 emits only the initial record") {
  const ProblemInstance p = quadratic_box_instance(Matrix::diagonal({1}), {-2});
  SchemeSpec spec;
  spec.lambda = ParamSchedule::constant(0.9);
  StopRule stop;
  stop.max_iter = 0;
  const Trace trace = run_scheme(spec, p.c, p.a, p.w, {0.0}, stop);
  CHECK(trace.records.size() == 1);
  CHECK(trace.terminated_by == Termination::MaxIter);
}

TEST_CASE("run_scheme: converges on the quadratic box problem") {
  const ProblemInstance p = quadratic_box_instance(Matrix::diagonal({1}), {-2});
  SchemeSpec spec;
  spec.lambda = ParamSchedule::constant(0.9);
  StopRule stop;
  stop.max_iter = 5000;
  RunOptions opts;
  opts.oracle_point = p.oracle_hint;
  const Trace trace = run_scheme(spec, p.c, p.a, p.w, {0.0}, stop, opts);
  CHECK(trace.terminated_by == Termination::Tolerance);
  CHECK(trace.iterations() <= 5000);

  const TraceRecord& last = trace.final_record();
  CHECK(last.residual_vi <= 1e-8);
  CHECK(last.residual_fix <= 1e-8);
  REQUIRE(last.dist_to_oracle.has_value());
  CHECK(*last.dist_to_oracle <= 1e-6);
  CHECK(trace.final_coupling <= 10 * stop.tol);

  // distance to the solution never increases along the run
  const FejerReport fejer = fejer_check(trace, *p.oracle_hint);
  CHECK(fejer.pass);

  // the terminal point solves the fixed-point reformulation for the run's
  // lambda and the zero set does not move with lambda
  for (double lam : {0.27, 0.54, 0.81}) {
    CHECK(residual_vi(p.c, p.a, last.x, lam) <= 1e-7);
  }
}

TEST_CASE("run_scheme: x0 outside the set is projected and recorded") {
  const ProblemInstance p = quadratic_box_instance(Matrix::diagonal({1}), {-2});
  SchemeSpec spec;
  spec.lambda = ParamSchedule::constant(0.9);
  const Trace trace = run_scheme(spec, p.c, p.a, p.w, {7.0}, {});
  CHECK(trace.x0_projected);
  CHECK(approx_eq(trace.records.front().x, {1.0}, 1e-9));
}

TEST_CASE("run_scheme: corridor rejection happens before any iteration") {
  const ProblemInstance p = quadratic_box_instance(Matrix::diagonal({1}), {-2});  // alpha = 1
  SchemeSpec spec;
  spec.lambda = ParamSchedule::constant(2.0);
  CHECK_THROWS_AS(run_scheme(spec, p.c, p.a, p.w, {0.0}, {}), CorridorError);

  SchemeSpec bad_alpha;
  bad_alpha.lambda = ParamSchedule::constant(0.9);
  bad_alpha.alpha = ParamSchedule::constant(1.0);
  CHECK_THROWS_AS(run_scheme(bad_alpha, p.c, p.a, p.w, {0.0}, {}), CorridorError);
}

TEST_CASE("solutions are stationary for every stepper") {
  // boundary solution with a nonzero operator value: the fixed-point
  // reformulation pins it exactly
  const ProblemInstance p = quadratic_box_instance(Matrix::identity(2), {-2.0, -0.5});
  const Vec z = *p.oracle_hint;  // (1, 0.5)
  REQUIRE(approx_eq(z, {1.0, 0.5}, 1e-9));
  const PointMapping t = p.w.as_mapping(1);
  const SchemeState at{3, z, {}};

  CHECK(approx_eq(step_karahan(at, p.c, p.a, p.w, 0.45, 0.5).x, z, kEpsEq));
  CHECK(approx_eq(step_takahashi_toyoda(at, p.c, p.a, t, 0.45, 0.5).x, z, kEpsEq));
  CHECK(approx_eq(step_khan(at, t, 0.5).x, z, kEpsEq));
  // anchor-blended steppers fix the solution when anchored there
  CHECK(approx_eq(step_iiduka_takahashi(at, p.c, p.a, t, 0.45, 0.5, z).x, z, kEpsEq));
  CHECK(approx_eq(step_yao(at, p.c, p.a, t, 0.2, 0.4, 0.4, 0.45, z, true).x, z, kEpsEq));
}

TEST_CASE("run_scheme: periodic and harmonic schedules stay inside corridors") {
  const ProblemInstance p = quadratic_box_instance(Matrix::identity(2), {-0.5, -0.25});
  SchemeSpec spec;
  spec.lambda = ParamSchedule::periodic({0.3, 0.9, 0.6});
  spec.alpha = ParamSchedule::harmonic(0.2, 0.8);
  StopRule stop;
  stop.max_iter = 5000;
  const Trace trace = run_scheme(spec, p.c, p.a, p.w, {1.0, 1.0}, stop);
  CHECK(trace.terminated_by == Termination::Tolerance);
  CHECK(dist(trace.final_record().x, {0.5, 0.25}) <= 1e-6);
}

TEST_CASE("run_scheme: trace completeness") {
  const ProblemInstance p = quadratic_box_instance(Matrix::diagonal({1.5}), {-0.75});
  SchemeSpec spec;
  spec.lambda = ParamSchedule::constant(0.6);
  const Trace trace = run_scheme(spec, p.c, p.a, p.w, {0.9}, {});
  REQUIRE(!trace.records.empty());
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    CHECK(trace.records[i].n == static_cast<int>(i));
    CHECK(trace.records[i].residual_vi >= 0.0);
    CHECK(trace.records[i].residual_fix >= 0.0);
  }
}

TEST_SUITE_END();
