#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vifp/core.hpp"
#include "vifp/operators.hpp"
#include "vifp/sets.hpp"

namespace vifp {

enum class Termination { Tolerance, MaxIter, Error };

std::string termination_name(Termination t);

struct TraceRecord {
  int n = 0;
  Vec x;
  double residual_vi = 0.0;
  double residual_fix = 0.0;
  std::optional<double> dist_to_oracle;
  std::int64_t step_time_ns = 0;
};

struct Trace {
  std::vector<TraceRecord> records;
  Termination terminated_by = Termination::Error;
  std::string error;        // set when terminated_by == Error
  std::string config_echo;  // resolved configuration of the run
  std::string scheme;       // fixed scheme name
  bool x0_projected = false;
  double final_coupling = std::numeric_limits<double>::quiet_NaN();  // last ||x_n - y_n||
  double wall_ms = 0.0;

  int iterations() const { return records.empty() ? 0 : records.back().n; }
  const TraceRecord& final_record() const;
};

/// || x - P_C(x - lam * A x) ||; zero exactly on the solution set, for any
/// lam > 0.
double residual_vi(const ConvexSet& c, const IsmOperator& a, const Vec& x, double lam);

/// || x - W_depth x ||; zero exactly on the family's common fixed points.
double residual_fix(const WMapping& w, const Vec& x, int depth);

struct FejerReport {
  std::vector<double> deltas;  // ||x_{n+1} - z|| - ||x_n - z|| per step
  double max_violation = 0.0;
  bool pass = true;
};

/// Distance-to-z monotonicity along a trace; passes when no step moves away
/// from z by more than `slack`.
FejerReport fejer_check(const Trace& trace, const Vec& z, double slack = 1e-9);

/// Independent high-accuracy solver: alternates a small-step projected
/// iteration with fixed-point refinement until both residuals fall below
/// 1e-12, then cross-checks 1- and 2-D problems against a refining grid
/// search. Throws ConvergenceError when the inner-step budget is exhausted.
Vec oracle_solve(const ConvexSet& c, const IsmOperator& a, const WMapping& w);

/// CSV with header n,residual_vi,residual_fix,dist_to_oracle,step_time_ns;
/// 17 significant digits, LF endings, empty field for an absent distance.
std::string trace_to_csv(const Trace& trace);

}  // namespace vifp
