#include "vifp/schemes.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace vifp {

// ---------------------------------------------------------------------------
// ParamSchedule
// ---------------------------------------------------------------------------

ParamSchedule ParamSchedule::constant(double value) {
  if (!std::isfinite(value)) throw ConfigError("schedule: non-finite constant");
  return ParamSchedule(Desc{Constant{value}});
}

ParamSchedule ParamSchedule::periodic(std::vector<double> values) {
  if (values.empty()) throw ConfigError("schedule: empty period");
  for (double v : values)
    if (!std::isfinite(v)) throw ConfigError("schedule: non-finite period entry");
  return ParamSchedule(Desc{PeriodicList{std::move(values)}});
}

ParamSchedule ParamSchedule::harmonic(double lo, double hi) {
  if (!(lo <= hi)) throw ConfigError("schedule: harmonic needs lo <= hi");
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw ConfigError("schedule: non-finite harmonic bounds");
  return ParamSchedule(Desc{HarmonicClamped{lo, hi}});
}

double ParamSchedule::at(int n) const {
  return std::visit(
      [n](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return s.value;
        } else if constexpr (std::is_same_v<T, PeriodicList>) {
          return s.values[static_cast<std::size_t>(n) % s.values.size()];
        } else {
          return std::max(s.lo, std::min(s.hi, s.hi / static_cast<double>(n + 1)));
        }
      },
      desc_);
}

double ParamSchedule::lo() const {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Constant>) return s.value;
        else if constexpr (std::is_same_v<T, PeriodicList>)
          return *std::min_element(s.values.begin(), s.values.end());
        else return s.lo;
      },
      desc_);
}

double ParamSchedule::hi() const {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Constant>) return s.value;
        else if constexpr (std::is_same_v<T, PeriodicList>)
          return *std::max_element(s.values.begin(), s.values.end());
        else return s.hi;
      },
      desc_);
}

std::string ParamSchedule::kind() const {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Constant>) return "constant";
        else if constexpr (std::is_same_v<T, PeriodicList>) return "periodic";
        else return "harmonic";
      },
      desc_);
}

// ---------------------------------------------------------------------------
// Scheme names
// ---------------------------------------------------------------------------

std::string scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::Karahan12:
      return "karahan12";
    case SchemeKind::IidukaTakahashiD:
      return "iiduka-takahashi";
    case SchemeKind::TakahashiToyodaA:
      return "takahashi-toyoda";
    case SchemeKind::YaoB:
      return "yao";
    case SchemeKind::KhanC:
      return "khan";
  }
  return "unknown";
}

SchemeKind scheme_from_name(const std::string& name) {
  if (name == "karahan12") return SchemeKind::Karahan12;
  if (name == "iiduka-takahashi") return SchemeKind::IidukaTakahashiD;
  if (name == "takahashi-toyoda") return SchemeKind::TakahashiToyodaA;
  if (name == "yao") return SchemeKind::YaoB;
  if (name == "khan") return SchemeKind::KhanC;
  throw ConfigError("unknown scheme name '" + name + "'");
}

// ---------------------------------------------------------------------------
// Steppers
// ---------------------------------------------------------------------------

namespace {

void check_lambda(double lambda_n, double two_alpha, const char* scheme) {
  if (!(lambda_n > 0.0) || !(lambda_n < two_alpha)) {
    throw CorridorError(std::string(scheme) + ": lambda_n = " + std::to_string(lambda_n) +
                        " outside the admissible interval (0, " + std::to_string(two_alpha) +
                        ")");
  }
}

void check_weight(double alpha_n, const char* scheme) {
  if (!(alpha_n >= 0.0 && alpha_n <= 1.0)) {
    throw CorridorError(std::string(scheme) + ": alpha_n = " + std::to_string(alpha_n) +
                        " outside [0, 1]");
  }
}

Vec forward_backward(const ConvexSet& c, const IsmOperator& a, const Vec& x, double lam) {
  return c.project(sub(x, scaled(lam, a.apply(x))));
}

}  // namespace

SchemeState step_karahan(const SchemeState& state, const ConvexSet& c, const IsmOperator& a,
                         const WMapping& w, double lambda_n, double alpha_n) {
  check_lambda(lambda_n, 2.0 * a.alpha(), "karahan12");
  check_weight(alpha_n, "karahan12");
  const int depth = std::min(state.n + 1, w.depth_cap);

  const Vec t = forward_backward(c, a, state.x, lambda_n);
  const Vec y = combine(1.0 - alpha_n, state.x, alpha_n, w.apply(depth, t));
  const Vec next = w.apply(depth, forward_backward(c, a, y, lambda_n));
  return SchemeState{state.n + 1, next, y};
}

SchemeState step_iiduka_takahashi(const SchemeState& state, const ConvexSet& c,
                                  const IsmOperator& a, const PointMapping& t, double lambda_n,
                                  double alpha_n, const Vec& anchor) {
  check_lambda(lambda_n, 2.0 * a.alpha(), "iiduka-takahashi");
  check_weight(alpha_n, "iiduka-takahashi");
  const Vec inner = t.apply(forward_backward(c, a, state.x, lambda_n));
  return SchemeState{state.n + 1, combine(alpha_n, anchor, 1.0 - alpha_n, inner), std::nullopt};
}

SchemeState step_takahashi_toyoda(const SchemeState& state, const ConvexSet& c,
                                  const IsmOperator& a, const PointMapping& t, double lambda_n,
                                  double alpha_n) {
  check_lambda(lambda_n, 2.0 * a.alpha(), "takahashi-toyoda");
  check_weight(alpha_n, "takahashi-toyoda");
  const Vec inner = t.apply(forward_backward(c, a, state.x, lambda_n));
  return SchemeState{state.n + 1, combine(alpha_n, state.x, 1.0 - alpha_n, inner), std::nullopt};
}

SchemeState step_yao(const SchemeState& state, const ConvexSet& c, const IsmOperator& a,
                     const PointMapping& s, double alpha_n, double beta_n, double gamma_n,
                     double lambda_n, const Vec& u, bool amended) {
  check_lambda(lambda_n, 2.0 * a.alpha(), "yao");
  check_weight(alpha_n, "yao");
  check_weight(beta_n, "yao");
  check_weight(gamma_n, "yao");
  if (std::abs(alpha_n + beta_n + gamma_n - 1.0) > kEpsEq) {
    throw CorridorError("yao: weights sum to " + std::to_string(alpha_n + beta_n + gamma_n) +
                        ", expected 1");
  }
  const Vec y = forward_backward(c, a, state.x, lambda_n);
  const Vec direction = amended ? a.apply(y) : y;
  const Vec inner = s.apply(c.project(sub(state.x, scaled(lambda_n, direction))));
  Vec next = combine(beta_n, state.x, gamma_n, inner);
  next = combine(1.0, next, alpha_n, u);
  return SchemeState{state.n + 1, next, y};
}

SchemeState step_khan(const SchemeState& state, const PointMapping& t, double alpha_n) {
  check_weight(alpha_n, "khan");
  const Vec y = combine(alpha_n, state.x, 1.0 - alpha_n, t.apply(state.x));
  return SchemeState{state.n + 1, t.apply(y), y};
}

// ---------------------------------------------------------------------------
// Run loop
// ---------------------------------------------------------------------------

namespace {

void validate_schedules(const SchemeSpec& spec, double alpha_certified) {
  if (spec.uses_lambda()) {
    const double lo = spec.lambda.lo();
    const double hi = spec.lambda.hi();
    if (!(lo > 0.0))
      throw CorridorError(spec.name() + ": lambda schedule lower bound " + std::to_string(lo) +
                          " must be strictly positive");
    if (std::isfinite(alpha_certified)) {
      const double limit = 2.0 * alpha_certified * (1.0 - 1e-6);
      if (hi > limit) {
        throw CorridorError(spec.name() + ": lambda schedule upper bound " + std::to_string(hi) +
                            " reaches 2*alpha = " + std::to_string(2.0 * alpha_certified) +
                            " (certified alpha " + std::to_string(alpha_certified) + ")");
      }
    }
  }
  const bool yao = spec.kind == SchemeKind::YaoB;
  if (!yao) {
    const double lo = spec.alpha.lo();
    const double hi = spec.alpha.hi();
    if (!(lo > 0.0) || !(hi < 1.0)) {
      throw CorridorError(spec.name() + ": alpha schedule [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "] must lie strictly inside (0, 1)");
    }
  } else {
    if (!spec.beta || !spec.gamma)
      throw ConfigError("yao: beta and gamma schedules are required");
  }
}

double pick_residual(const TraceRecord& rec, StopRule::Residual kind) {
  switch (kind) {
    case StopRule::Residual::VI:
      return rec.residual_vi;
    case StopRule::Residual::FixedPoint:
      return rec.residual_fix;
    case StopRule::Residual::Combined:
      return std::max(rec.residual_vi, rec.residual_fix);
  }
  return rec.residual_vi;
}

}  // namespace

Trace run_scheme(const SchemeSpec& spec, const ConvexSet& c, const IsmOperator& a,
                 const WMapping& w, const Vec& x0, const StopRule& stop,
                 const RunOptions& opts) {
  if (!(stop.tol > 0.0)) throw ConfigError("stop rule: tol must be strictly positive");
  if (stop.max_iter < 0) throw ConfigError("stop rule: max_iter must be >= 0");
  validate_schedules(spec, a.alpha());

  Trace trace;
  trace.scheme = spec.name();
  trace.config_echo = opts.config_echo;
  if (trace.config_echo.empty()) {
    trace.config_echo = "scheme=" + spec.name();
    if (spec.uses_lambda()) {
      trace.config_echo += " lambda=[" + std::to_string(spec.lambda.lo()) + "," +
                           std::to_string(spec.lambda.hi()) + "]";
    }
    trace.config_echo += " alpha=[" + std::to_string(spec.alpha.lo()) + "," +
                         std::to_string(spec.alpha.hi()) + "] tol=" + std::to_string(stop.tol) +
                         " max_iter=" + std::to_string(stop.max_iter);
  }

  SchemeState state;
  state.x = x0;
  if (!c.contains(x0, 1e-9)) {
    state.x = c.project(x0);
    trace.x0_projected = true;
  }

  const Vec anchor = spec.anchor.value_or(c.project(zeros(c.dim())));
  const PointMapping baseline =
      opts.baseline_map.value_or(w.as_mapping(std::min(w.prefix_len(), w.depth_cap)));

  auto record = [&](std::int64_t ns) {
    TraceRecord rec;
    rec.n = state.n;
    rec.x = state.x;
    const double lam_report = spec.uses_lambda() ? spec.lambda.at(std::max(0, state.n - 1)) : 1.0;
    rec.residual_vi = residual_vi(c, a, state.x, lam_report);
    rec.residual_fix = residual_fix(w, state.x, std::min(state.n + 1, w.depth_cap));
    if (opts.oracle_point) rec.dist_to_oracle = dist(state.x, *opts.oracle_point);
    rec.step_time_ns = ns;
    trace.records.push_back(std::move(rec));
  };

  auto take_step = [&](const SchemeState& from) {
    const double lambda_n = spec.lambda.at(from.n);
    const double alpha_n = spec.alpha.at(from.n);
    switch (spec.kind) {
      case SchemeKind::Karahan12:
        return step_karahan(from, c, a, w, lambda_n, alpha_n);
      case SchemeKind::IidukaTakahashiD:
        return step_iiduka_takahashi(from, c, a, baseline, lambda_n, alpha_n, anchor);
      case SchemeKind::TakahashiToyodaA:
        return step_takahashi_toyoda(from, c, a, baseline, lambda_n, alpha_n);
      case SchemeKind::YaoB:
        return step_yao(from, c, a, baseline, alpha_n, spec.beta->at(from.n),
                        spec.gamma->at(from.n), lambda_n, anchor, spec.yao_amended);
      case SchemeKind::KhanC:
        return step_khan(from, baseline, alpha_n);
    }
    throw Error("run_scheme: unknown scheme kind");
  };

  const auto wall_start = std::chrono::steady_clock::now();
  record(0);

  while (true) {
    if (pick_residual(trace.records.back(), stop.kind) <= stop.tol) {
      trace.terminated_by = Termination::Tolerance;
      break;
    }
    if (state.n >= stop.max_iter) {
      trace.terminated_by = Termination::MaxIter;
      break;
    }

    const auto t0 = std::chrono::steady_clock::now();
    SchemeState next = take_step(state);
    const auto t1 = std::chrono::steady_clock::now();

    if (!finite(next.x)) {
      trace.terminated_by = Termination::Error;
      trace.error = "non-finite iterate produced at n = " + std::to_string(next.n);
      break;
    }
    if (next.aux) trace.final_coupling = dist(state.x, *next.aux);
    state = std::move(next);
    record(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
  }

  // the companion point of the terminal iterate: at a tolerance stop both
  // residuals are small, so this gap is bounded by a small multiple of tol
  if (trace.terminated_by == Termination::Tolerance && state.n > 0) {
    try {
      const SchemeState probe = take_step(state);
      if (probe.aux) trace.final_coupling = dist(state.x, *probe.aux);
    } catch (const Error&) {
      // keep the last per-step value
    }
  }

  trace.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            wall_start)
                      .count();
  return trace;
}

}  // namespace vifp
