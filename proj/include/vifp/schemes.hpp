#pragma once

#include <optional>
#include <string>
#include <variant>

#include "vifp/core.hpp"
#include "vifp/diagnostics.hpp"
#include "vifp/operators.hpp"
#include "vifp/sets.hpp"

namespace vifp {

// ---------------------------------------------------------------------------
// Parameter schedules
// ---------------------------------------------------------------------------

class ParamSchedule {
 public:
  struct Constant {
    double value;
  };
  struct PeriodicList {
    std::vector<double> values;
  };
  /// max(lo, min(hi, hi / (n + 1)))
  struct HarmonicClamped {
    double lo;
    double hi;
  };
  using Desc = std::variant<Constant, PeriodicList, HarmonicClamped>;

  static ParamSchedule constant(double value);
  static ParamSchedule periodic(std::vector<double> values);
  static ParamSchedule harmonic(double lo, double hi);

  double at(int n) const;
  double lo() const;
  double hi() const;
  const Desc& desc() const { return desc_; }
  std::string kind() const;

 private:
  explicit ParamSchedule(Desc d) : desc_(std::move(d)) {}
  Desc desc_;
};

// ---------------------------------------------------------------------------
// Scheme specification and state
// ---------------------------------------------------------------------------

enum class SchemeKind { Karahan12, IidukaTakahashiD, TakahashiToyodaA, YaoB, KhanC };

std::string scheme_name(SchemeKind kind);
SchemeKind scheme_from_name(const std::string& name);

struct SchemeSpec {
  SchemeKind kind = SchemeKind::Karahan12;
  ParamSchedule lambda = ParamSchedule::constant(0.1);
  ParamSchedule alpha = ParamSchedule::constant(0.5);
  std::optional<Vec> anchor;           // IidukaTakahashiD, YaoB
  std::optional<ParamSchedule> beta;   // YaoB
  std::optional<ParamSchedule> gamma;  // YaoB
  bool yao_amended = false;            // inner argument x - lam * A y instead of x - lam * y

  bool uses_lambda() const { return kind != SchemeKind::KhanC; }
  std::string name() const { return scheme_name(kind); }
};

struct SchemeState {
  int n = 0;
  Vec x;
  std::optional<Vec> aux;  // y_n, for schemes that form one
};

struct StopRule {
  enum class Residual { VI, FixedPoint, Combined };
  Residual kind = Residual::Combined;
  double tol = 1e-8;
  int max_iter = 100000;
};

// ---------------------------------------------------------------------------
// Steppers (pure state transitions)
// ---------------------------------------------------------------------------

/// t_n = P_C(x_n - lam A x_n); y_n = (1-a) x_n + a W_n t_n;
/// x_{n+1} = W_n P_C(y_n - lam A y_n), with W_n at depth min(n+1, cap).
SchemeState step_karahan(const SchemeState& state, const ConvexSet& c, const IsmOperator& a,
                         const WMapping& w, double lambda_n, double alpha_n);

/// x_{n+1} = a * anchor + (1-a) T P_C(x_n - lam A x_n)
SchemeState step_iiduka_takahashi(const SchemeState& state, const ConvexSet& c,
                                  const IsmOperator& a, const PointMapping& t, double lambda_n,
                                  double alpha_n, const Vec& anchor);

/// x_{n+1} = a x_n + (1-a) T P_C(x_n - lam A x_n)
SchemeState step_takahashi_toyoda(const SchemeState& state, const ConvexSet& c,
                                  const IsmOperator& a, const PointMapping& t, double lambda_n,
                                  double alpha_n);

/// y_n = P_C(x_n - lam A x_n);
/// x_{n+1} = a u + b x_n + g S P_C(x_n - lam y_n)         (printed form)
///           a u + b x_n + g S P_C(x_n - lam A y_n)       (amended)
SchemeState step_yao(const SchemeState& state, const ConvexSet& c, const IsmOperator& a,
                     const PointMapping& s, double alpha_n, double beta_n, double gamma_n,
                     double lambda_n, const Vec& u, bool amended);

/// y_n = a x_n + (1-a) T x_n; x_{n+1} = T y_n
SchemeState step_khan(const SchemeState& state, const PointMapping& t, double alpha_n);

// ---------------------------------------------------------------------------
// Run loop
// ---------------------------------------------------------------------------

struct RunOptions {
  std::optional<Vec> oracle_point;          // enables dist_to_oracle in the trace
  std::optional<PointMapping> baseline_map; // T for the single-mapping schemes;
                                            // defaults to the W-mapping at prefix depth
  std::string config_echo;
};

/// Validates schedules against the certified constants, projects x0 into C if
/// needed (recorded in the trace), then iterates until the selected residual
/// falls below tol or max_iter is reached. NaN/Inf iterates terminate the
/// trace with Termination::Error, keeping the finite prefix.
Trace run_scheme(const SchemeSpec& spec, const ConvexSet& c, const IsmOperator& a,
                 const WMapping& w, const Vec& x0, const StopRule& stop,
                 const RunOptions& opts = {});

}  // namespace vifp
