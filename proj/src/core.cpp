#include "vifp/core.hpp"

#include <algorithm>
#include <cmath>

namespace vifp {

void Tolerances::validate() const {
  if (!(eps_eq > 0.0)) throw ConfigError("eps_eq must be strictly positive");
  if (!(eps_residual > 0.0)) throw ConfigError("eps_residual must be strictly positive");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
}

void check_same_dim(const Vec& x, const Vec& y, const char* where) {
  if (x.size() != y.size()) {
    throw DimensionError(std::string(where) + ": dimension mismatch (" +
                         std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
  }
}

double dot(const Vec& x, const Vec& y) {
  check_same_dim(x, y, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm(const Vec& x) { return std::sqrt(dot(x, x)); }

double dist(const Vec& x, const Vec& y) {
  check_same_dim(x, y, "dist");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Vec combine(double a, const Vec& x, double b, const Vec& y) {
  check_same_dim(x, y, "combine");
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i] + b * y[i];
  return r;
}

Vec add(const Vec& x, const Vec& y) { return combine(1.0, x, 1.0, y); }
Vec sub(const Vec& x, const Vec& y) { return combine(1.0, x, -1.0, y); }

Vec scaled(double a, const Vec& x) {
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i];
  return r;
}

Vec zeros(std::size_t d) { return Vec(d, 0.0); }

bool finite(const Vec& x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool approx_eq(const Vec& x, const Vec& y, double eps) {
  if (x.size() != y.size()) return false;
  return dist(x, y) <= eps;
}

// ---------------------------------------------------------------------------
// Rng
// ---------------------------------------------------------------------------

double Rng::uniform() {
  // 53 random bits into [0, 1)
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller on raw uniforms
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

Vec Rng::uniform_vec(std::size_t d, double lo, double hi) {
  Vec v(d);
  for (auto& c : v) c = uniform(lo, hi);
  return v;
}

Vec Rng::normal_vec(std::size_t d) {
  Vec v(d);
  for (auto& c : v) c = normal();
  return v;
}

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(const Vec& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m.at(i, i) = d[i];
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) throw DimensionError("matrix: no rows");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols) throw DimensionError("matrix: ragged rows");
    for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

Vec Matrix::apply(const Vec& x) const {
  if (x.size() != cols) throw DimensionError("matrix apply: dimension mismatch");
  Vec y(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += at(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Matrix Matrix::transpose() const {
  Matrix t(cols, rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
  return t;
}

bool Matrix::is_symmetric(double tol) const {
  if (rows != cols) return false;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = i + 1; j < cols; ++j)
      if (std::abs(at(i, j) - at(j, i)) > tol) return false;
  return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw DimensionError("matmul: inner dimensions differ");
  Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c.at(i, j) += aik * b.at(k, j);
    }
  return c;
}

Vec symmetric_eigenvalues(const Matrix& m) {
  if (m.rows != m.cols) throw DimensionError("eigenvalues: matrix not square");
  const std::size_t n = m.rows;
  Matrix a = m;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a.at(i, j) * a.at(i, j);
    return std::sqrt(2.0 * s);
  };

  double scale = 0.0;
  for (double v : a.data) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return Vec(n, 0.0);

  // cyclic Jacobi sweeps
  for (int sweep = 0; sweep < 128 && off_norm() > 1e-15 * scale * n; ++sweep) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a.at(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a.at(k, p);
          const double akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a.at(p, k);
          const double aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  Vec ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a.at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

Matrix random_orthogonal(std::size_t d, Rng& rng) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    Matrix q(d, d);
    // columns: Gaussian draws, then modified Gram-Schmidt
    std::vector<Vec> cols(d);
    for (auto& c : cols) c = rng.normal_vec(d);
    bool ok = true;
    for (std::size_t j = 0; j < d && ok; ++j) {
      for (std::size_t i = 0; i < j; ++i) {
        const double p = dot(cols[j], cols[i]);
        cols[j] = sub(cols[j], scaled(p, cols[i]));
      }
      const double len = norm(cols[j]);
      if (len < 1e-8) {
        ok = false;
        break;
      }
      cols[j] = scaled(1.0 / len, cols[j]);
    }
    if (!ok) continue;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) q.at(i, j) = cols[j][i];
    return q;
  }
  throw Error("random_orthogonal: repeated degenerate draws");
}

Matrix random_symmetric_with_spectrum(std::size_t d, double lo, double hi, Rng& rng) {
  const Matrix v = random_orthogonal(d, rng);
  const Vec lam = rng.uniform_vec(d, lo, hi);
  // V diag(lam) V^T
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += v.at(i, k) * lam[k] * v.at(j, k);
      m.at(i, j) = s;
    }
  // symmetrize away rounding
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      const double avg = 0.5 * (m.at(i, j) + m.at(j, i));
      m.at(i, j) = avg;
      m.at(j, i) = avg;
    }
  return m;
}

}  // namespace vifp
