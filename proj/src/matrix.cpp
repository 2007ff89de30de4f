#include "ngdlab/matrix.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <utility>

namespace ngdlab {

namespace {

std::string shape_str(const Matrix& a) {
  std::ostringstream os;
  os << a.rows() << "x" << a.cols();
  return os.str();
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shapes " + shape_str(a) + " and " +
                     shape_str(b) + " do not match");
  }
}

void require_square(const Matrix& s, const char* op) {
  if (s.rows() != s.cols()) {
    throw ShapeError(std::string(op) + ": matrix is " + shape_str(s) +
                     ", expected square");
  }
}

// Grams and damped Grams are symmetric by construction; a gross asymmetry
// means the caller handed us the wrong matrix.
void require_symmetric(const Matrix& s, const char* op) {
  const double tol = 1e-8 * (s.max_abs() + 1.0);
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t j = i + 1; j < s.cols(); ++j) {
      if (std::abs(s(i, j) - s(j, i)) > tol) {
        throw ShapeError(std::string(op) + ": matrix is not symmetric");
      }
    }
  }
}

// In-place lower Cholesky. Returns false on a non-positive or non-finite
// pivot instead of throwing so the caller can apply its jitter policy.
bool cholesky_in_place(Matrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a(i, j);
      const double* ri = a.row_ptr(i);
      const double* rj = a.row_ptr(j);
      for (std::size_t k = 0; k < j; ++k) s -= ri[k] * rj[k];
      if (i == j) {
        if (!(s > 0.0) || !std::isfinite(s)) return false;
        a(i, i) = std::sqrt(s);
      } else {
        a(i, j) = s / a(j, j);
      }
    }
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = 0.0;
  }
  return true;
}

// Solves L Lᵀ X = B given the lower factor, all right-hand sides at once.
// Row operations keep the inner loops contiguous.
Matrix cholesky_back_substitute(const Matrix& l, const Matrix& b) {
  const std::size_t n = l.rows();
  const std::size_t k = b.cols();
  Matrix x = b;
  for (std::size_t i = 0; i < n; ++i) {
    double* xi = x.row_ptr(i);
    const double* li = l.row_ptr(i);
    for (std::size_t r = 0; r < i; ++r) {
      const double f = li[r];
      if (f == 0.0) continue;
      const double* xr = x.row_ptr(r);
      for (std::size_t c = 0; c < k; ++c) xi[c] -= f * xr[c];
    }
    const double d = l(i, i);
    for (std::size_t c = 0; c < k; ++c) xi[c] /= d;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double* xi = x.row_ptr(ii);
    for (std::size_t r = ii + 1; r < n; ++r) {
      const double f = l(r, ii);
      if (f == 0.0) continue;
      const double* xr = x.row_ptr(r);
      for (std::size_t c = 0; c < k; ++c) xi[c] -= f * xr[c];
    }
    const double d = l(ii, ii);
    for (std::size_t c = 0; c < k; ++c) xi[c] /= d;
  }
  return x;
}

// Factor with the retry policy: on failure add 1e-10*trace(S)/n to the
// diagonal and try again, at most three retries.
std::optional<Matrix> factor_with_jitter(const Matrix& s) {
  const std::size_t n = s.rows();
  const double jitter = 1e-10 * s.trace() / static_cast<double>(n);
  for (int attempt = 0; attempt <= 3; ++attempt) {
    Matrix a = s;
    if (attempt > 0 && jitter > 0.0) {
      const double bump = jitter * static_cast<double>(attempt);
      for (std::size_t i = 0; i < n; ++i) a(i, i) += bump;
    }
    if (cholesky_in_place(a)) return a;
    if (jitter <= 0.0) break;  // nothing to add; retrying is pointless
  }
  return std::nullopt;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("Matrix: value count does not match rows*cols");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::ones(std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  std::fill(m.data_.begin(), m.data_.end(), 1.0);
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("from_rows: ragged row lengths");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

bool Matrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::trace() const {
  const std::size_t n = std::min(rows_, cols_);
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) t += (*this)(i, i);
  return t;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* row = a.row_ptr(i);
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = row[j];
  }
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions " + shape_str(a) + " * " +
                     shape_str(b) + " do not agree");
  }
  Matrix c(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row_ptr(i);
    double* crow = c.row_ptr(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double av = arow[k];
      if (av == 0.0) continue;
      const double* brow = b.row_ptr(k);
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  return c;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "hadamard");
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] *= b.data()[i];
  return c;
}

Matrix khatri_rao_cols(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("khatri_rao_cols: column counts differ (" + shape_str(a) +
                     " vs " + shape_str(b) + ")");
  }
  const std::size_t p = a.rows();
  const std::size_t q = b.rows();
  const std::size_t m = a.cols();
  Matrix c(p * q, m);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      double* crow = c.row_ptr(i * q + j);
      const double* arow = a.row_ptr(i);
      const double* brow = b.row_ptr(j);
      for (std::size_t k = 0; k < m; ++k) crow[k] = arow[k] * brow[k];
    }
  }
  return c;
}

Matrix kron(const Matrix& u, const Matrix& v) {
  if (u.cols() != 1 || v.cols() != 1) {
    throw ShapeError("kron: expected column vectors, got " + shape_str(u) +
                     " and " + shape_str(v));
  }
  return khatri_rao_cols(u, v);
}

Matrix add_diagonal(const Matrix& s, double value) {
  require_square(s, "add_diagonal");
  Matrix out = s;
  for (std::size_t i = 0; i < s.rows(); ++i) out(i, i) += value;
  return out;
}

Matrix scaled(const Matrix& a, double factor) {
  Matrix out = a;
  for (double& v : out.data()) v *= factor;
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "add");
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "sub");
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

Matrix cholesky_solve(const Matrix& s, const Matrix& b) {
  require_square(s, "cholesky_solve");
  require_symmetric(s, "cholesky_solve");
  if (s.rows() != b.rows()) {
    throw ShapeError("cholesky_solve: system is " + shape_str(s) +
                     " but right-hand side is " + shape_str(b));
  }
  auto factor = factor_with_jitter(s);
  if (!factor) {
    throw SingularError(
        "cholesky_solve: factorization failed after 3 jitter retries (matrix "
        "is numerically singular or indefinite)");
  }
  return cholesky_back_substitute(*factor, b);
}

Matrix spd_inverse(const Matrix& s) {
  require_square(s, "spd_inverse");
  require_symmetric(s, "spd_inverse");
  Matrix a = s;
  if (!cholesky_in_place(a)) {
    throw SingularError("spd_inverse: matrix is not positive definite");
  }
  double dmin = a(0, 0);
  double dmax = a(0, 0);
  for (std::size_t i = 1; i < a.rows(); ++i) {
    dmin = std::min(dmin, a(i, i));
    dmax = std::max(dmax, a(i, i));
  }
  // (dmax/dmin)^2 is a cheap lower bound on the condition number of s.
  const double cond_estimate = (dmax / dmin) * (dmax / dmin);
  if (!(cond_estimate < 1e14)) {
    std::ostringstream os;
    os << "spd_inverse: matrix is near-singular (condition estimate "
       << cond_estimate << ")";
    throw SingularError(os.str());
  }
  Matrix inv = cholesky_back_substitute(a, Matrix::identity(s.rows()));
  // Symmetrize to remove the last bits of round-off asymmetry.
  for (std::size_t i = 0; i < inv.rows(); ++i) {
    for (std::size_t j = i + 1; j < inv.cols(); ++j) {
      const double v = 0.5 * (inv(i, j) + inv(j, i));
      inv(i, j) = v;
      inv(j, i) = v;
    }
  }
  return inv;
}

}  // namespace ngdlab
