#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vifp {

/// A point of R^d. Dimension is fixed for the lifetime of a problem instance.
using Vec = std::vector<double>;

/// Default tolerance for point equality.
inline constexpr double kEpsEq = 1e-10;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operands of mismatched dimension.
struct DimensionError : Error {
  using Error::Error;
};

/// An infeasible or witness-less set description.
struct FeasibilityError : Error {
  using Error::Error;
};

/// A step-size or weight schedule outside its admissible interval.
struct CorridorError : Error {
  using Error::Error;
};

/// A sampled certificate (nonexpansivity, inverse strong monotonicity,
/// pseudocontractivity) failed; carries the violating pair when one exists.
struct CertificationError : Error {
  explicit CertificationError(const std::string& msg,
                              std::optional<std::pair<Vec, Vec>> pair = std::nullopt)
      : Error(msg), witness(std::move(pair)) {}
  std::optional<std::pair<Vec, Vec>> witness;
};

/// A projection sweep that did not reach its optimality certificate.
struct ProjectionError : Error {
  ProjectionError(const std::string& msg, Vec best, double viol)
      : Error(msg), best_iterate(std::move(best)), violation(viol) {}
  Vec best_iterate;
  double violation = 0.0;
};

/// An iteration that ran out of budget; carries the last iterate and gap.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& msg, std::optional<Vec> last = std::nullopt,
                   double gap = 0.0)
      : Error(msg), last_iterate(std::move(last)), last_gap(gap) {}
  std::optional<Vec> last_iterate;
  double last_gap = 0.0;
};

/// Malformed configuration input.
struct ConfigError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Tolerances
// ---------------------------------------------------------------------------

struct Tolerances {
  double eps_eq = kEpsEq;      // point-equality tolerance
  double eps_residual = 1e-8;  // stopping threshold
  int max_iter = 100000;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Vector arithmetic
// ---------------------------------------------------------------------------

void check_same_dim(const Vec& x, const Vec& y, const char* where);

double dot(const Vec& x, const Vec& y);
double norm(const Vec& x);
double dist(const Vec& x, const Vec& y);

/// a*x + b*y, coordinatewise.
Vec combine(double a, const Vec& x, double b, const Vec& y);

Vec add(const Vec& x, const Vec& y);
Vec sub(const Vec& x, const Vec& y);
Vec scaled(double a, const Vec& x);
Vec zeros(std::size_t d);

bool finite(const Vec& x);
bool approx_eq(const Vec& x, const Vec& y, double eps = kEpsEq);

// ---------------------------------------------------------------------------
// Deterministic randomness
// ---------------------------------------------------------------------------

/// Seeded generator with a portable output path: the engine is the
/// standard-specified mt19937_64 and all floating-point draws are derived from
/// raw bits here (not library distributions), so identical seeds give
/// identical streams everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double normal();
  Vec uniform_vec(std::size_t d, double lo, double hi);
  Vec normal_vec(std::size_t d);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Small dense matrices (row-major), enough for desk-scale eigenanalysis
// ---------------------------------------------------------------------------

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const Vec& d);
  static Matrix from_rows(const std::vector<Vec>& rows);

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  Vec apply(const Vec& x) const;
  Matrix transpose() const;
  bool is_symmetric(double tol = 1e-9) const;
};

Matrix matmul(const Matrix& a, const Matrix& b);

/// Eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi rotations.
Vec symmetric_eigenvalues(const Matrix& a);

/// Random orthogonal matrix (Gaussian draw + modified Gram-Schmidt).
Matrix random_orthogonal(std::size_t d, Rng& rng);

/// Random symmetric matrix with eigenvalues drawn uniformly from [lo, hi].
Matrix random_symmetric_with_spectrum(std::size_t d, double lo, double hi, Rng& rng);

}  // namespace vifp
