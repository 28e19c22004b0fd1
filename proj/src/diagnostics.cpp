#include "vifp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace vifp {

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::Tolerance:
      return "tolerance";
    case Termination::MaxIter:
      return "max_iter";
    case Termination::Error:
      return "error";
  }
  return "unknown";
}

const TraceRecord& Trace::final_record() const {
  if (records.empty()) throw Error("trace: no records");
  return records.back();
}

double residual_vi(const ConvexSet& c, const IsmOperator& a, const Vec& x, double lam) {
  if (!(lam > 0.0)) throw CorridorError("residual_vi: lambda must be strictly positive");
  const Vec step = sub(x, scaled(lam, a.apply(x)));
  return dist(x, c.project(step));
}

double residual_fix(const WMapping& w, const Vec& x, int depth) {
  return dist(x, w.apply(depth, x));
}

FejerReport fejer_check(const Trace& trace, const Vec& z, double slack) {
  FejerReport report;
  if (trace.records.size() < 2) return report;
  report.deltas.reserve(trace.records.size() - 1);
  double prev = dist(trace.records.front().x, z);
  for (std::size_t i = 1; i < trace.records.size(); ++i) {
    const double cur = dist(trace.records[i].x, z);
    report.deltas.push_back(cur - prev);
    prev = cur;
  }
  report.max_violation = 0.0;
  for (double d : report.deltas) report.max_violation = std::max(report.max_violation, d);
  report.pass = report.max_violation <= slack;
  return report;
}

namespace {

double combined_residual(const ConvexSet& c, const IsmOperator& a, const WMapping& w,
                         const Vec& x, double lam, int depth) {
  return std::max(residual_vi(c, a, x, lam), residual_fix(w, x, depth));
}

// Refining grid search on 1- and 2-D problems, effective final resolution
// <= 1e-4. Confirms the oracle point is at least as good as any grid point.
void grid_cross_check(const ConvexSet& c, const IsmOperator& a, const WMapping& w,
                      const Vec& z, double lam, int depth) {
  const std::size_t d = c.dim();
  if (d > 2) return;

  Vec lo(d), hi(d);
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] = z[i] - 2.0;
    hi[i] = z[i] + 2.0;
  }

  Vec best = z;
  double best_val = combined_residual(c, a, w, z, lam, depth);
  const int kPerAxis = 41;
  for (int level = 0; level < 4; ++level) {
    Vec level_best = best;
    double level_val = best_val;
    const std::size_t total = static_cast<std::size_t>(std::pow(kPerAxis, d));
    for (std::size_t flat = 0; flat < total; ++flat) {
      Vec p(d);
      std::size_t rem = flat;
      for (std::size_t i = 0; i < d; ++i) {
        const int k = static_cast<int>(rem % kPerAxis);
        rem /= kPerAxis;
        p[i] = lo[i] + (hi[i] - lo[i]) * k / (kPerAxis - 1);
      }
      if (!c.contains(p, 1e-9)) continue;
      const double val = combined_residual(c, a, w, p, lam, depth);
      if (val < level_val) {
        level_val = val;
        level_best = p;
      }
    }
    best = level_best;
    best_val = level_val;
    // refine around the incumbent
    for (std::size_t i = 0; i < d; ++i) {
      const double h = (hi[i] - lo[i]) / (kPerAxis - 1);
      lo[i] = best[i] - 2.0 * h;
      hi[i] = best[i] + 2.0 * h;
    }
  }

  const double z_val = combined_residual(c, a, w, z, lam, depth);
  if (z_val > best_val + 1e-9) {
    throw ConvergenceError("oracle_solve: grid search found a strictly better point "
                           "(grid residual " + std::to_string(best_val) +
                           ", oracle residual " + std::to_string(z_val) + ")",
                           best, z_val - best_val);
  }
}

}  // namespace

Vec oracle_solve(const ConvexSet& c, const IsmOperator& a, const WMapping& w) {
  const std::size_t d = c.dim();
  if (d > 20) throw Error("oracle_solve: desk-scale only (d <= 20)");
  if (a.dim() != 0 && a.dim() != d)
    throw DimensionError("oracle_solve: operator dimension mismatch");

  const double lam = 0.5 * std::min(a.alpha(), 0.1);
  const int depth = w.depth_cap;
  const long budget = 10000000;
  long steps = 0;

  Vec z = c.project(zeros(d));

  auto stalled_projected = [&] {
    while (true) {
      const Vec next = c.project(sub(z, scaled(lam, a.apply(z))));
      ++steps;
      const double gap = dist(next, z);
      z = next;
      if (gap <= 1e-13) return true;
      if (steps > budget) return false;
    }
  };
  auto stalled_fixed_point = [&] {
    while (true) {
      const Vec next = w.apply(depth, z);
      ++steps;
      const double gap = dist(next, z);
      z = next;
      if (gap <= 1e-13) return true;
      if (steps > budget) return false;
    }
  };

  while (true) {
    const bool a_ok = stalled_projected();
    const bool b_ok = stalled_fixed_point();
    const double rv = residual_vi(c, a, z, lam);
    const double rf = residual_fix(w, z, depth);
    if (a_ok && b_ok && rv <= 1e-12 && rf <= 1e-12) break;
    if (steps > budget) {
      throw ConvergenceError("oracle_solve: no joint stall within the step budget "
                             "(residual_vi " + std::to_string(rv) + ", residual_fix " +
                             std::to_string(rf) + "); the problem may have an empty "
                             "solution set",
                             z, std::max(rv, rf));
    }
  }

  grid_cross_check(c, a, w, z, lam, depth);
  return z;
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string trace_to_csv(const Trace& trace) {
  std::string out = "n,residual_vi,residual_fix,dist_to_oracle,step_time_ns\n";
  for (const auto& rec : trace.records) {
    out += std::to_string(rec.n);
    out += ',';
    out += fmt_double(rec.residual_vi);
    out += ',';
    out += fmt_double(rec.residual_fix);
    out += ',';
    if (rec.dist_to_oracle) out += fmt_double(*rec.dist_to_oracle);
    out += ',';
    out += std::to_string(rec.step_time_ns);
    out += '\n';
  }
  return out;
}

}  // namespace vifp
