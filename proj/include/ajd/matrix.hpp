#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ajd/errors.hpp"

namespace ajd {

namespace detail {

inline void check_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(std::string(what) + ": non-finite entry");
    }
  }
}

}  // namespace detail

/// Dense real matrix, row-major storage.
class Matrix {
 public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), e_(rows * cols, fill) {
    if (rows == 0 || cols == 0) throw Error("Matrix: dimensions must be positive");
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    if (r == 0) throw Error("Matrix::from_rows: empty");
    const std::size_t c = rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c) throw Error("Matrix::from_rows: ragged rows");
      std::size_t j = 0;
      for (double v : row) m(i, j++) = v;
      ++i;
    }
    detail::check_finite(m.entries(), "Matrix::from_rows");
    return m;
  }

  static Matrix from_entries(std::size_t rows, std::size_t cols, std::vector<double> entries) {
    if (entries.size() != rows * cols) throw Error("Matrix::from_entries: size mismatch");
    Matrix m(rows, cols);
    m.e_ = std::move(entries);
    detail::check_finite(m.entries(), "Matrix::from_entries");
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return e_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

  std::span<const double> entries() const { return e_; }
  std::span<double> entries() { return e_; }

  std::vector<double> col(std::size_t j) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
  }

  void set_col(std::size_t j, std::span<const double> v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> e_;
};

/// Real symmetric matrix with full square storage. Symmetry is exact by
/// construction: every mutation writes both (i,j) and (j,i).
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;

  explicit SymmetricMatrix(std::size_t dim) : dim_(dim), e_(dim * dim, 0.0) {
    if (dim == 0) throw Error("SymmetricMatrix: dimension must be positive");
  }

  /// Requires m(i,j) == m(j,i) bit-exactly; use symmetrized() for noisy input.
  static SymmetricMatrix from_full(const Matrix& m) {
    if (m.rows() != m.cols()) throw Error("SymmetricMatrix::from_full: not square");
    SymmetricMatrix s(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = i; j < m.cols(); ++j) {
        if (m(i, j) != m(j, i)) throw Error("SymmetricMatrix::from_full: asymmetric input");
        s.set(i, j, m(i, j));
      }
    detail::check_finite(s.entries(), "SymmetricMatrix::from_full");
    return s;
  }

  /// (m + m^T) / 2, for inputs symmetric only up to rounding.
  static SymmetricMatrix symmetrized(const Matrix& m) {
    if (m.rows() != m.cols()) throw Error("SymmetricMatrix::symmetrized: not square");
    SymmetricMatrix s(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = i; j < m.cols(); ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
    return s;
  }

  static SymmetricMatrix diagonal(std::span<const double> d) {
    SymmetricMatrix s(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) s.set(i, i, d[i]);
    return s;
  }

  static SymmetricMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    return from_full(Matrix::from_rows(rows));
  }

  std::size_t dim() const { return dim_; }

  double operator()(std::size_t i, std::size_t j) const { return e_[i * dim_ + j]; }

  void set(std::size_t i, std::size_t j, double v) {
    e_[i * dim_ + j] = v;
    e_[j * dim_ + i] = v;
  }

  void add(std::size_t i, std::size_t j, double v) { set(i, j, (*this)(i, j) + v); }

  std::span<const double> entries() const { return e_; }

  Matrix as_matrix() const {
    Matrix m(dim_, dim_);
    for (std::size_t i = 0; i < e_.size(); ++i) m.entries()[i] = e_[i];
    return m;
  }

  bool operator==(const SymmetricMatrix& other) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> e_;
};

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error("multiply: dimension mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const double ail = a(i, l);
      if (ail == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += ail * b(l, j);
    }
  return out;
}

inline Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

inline std::vector<double> matvec(const Matrix& a, std::span<const double> v) {
  if (a.cols() != v.size()) throw Error("matvec: dimension mismatch");
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

inline std::vector<double> matvec(const SymmetricMatrix& s, std::span<const double> v) {
  if (s.dim() != v.size()) throw Error("matvec: dimension mismatch");
  std::vector<double> out(s.dim(), 0.0);
  for (std::size_t i = 0; i < s.dim(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < s.dim(); ++j) acc += s(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

/// Sum of squared off-diagonal entries.
inline double off_norm2(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error("off_norm2: matrix not square");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) acc += a(i, j) * a(i, j);
  return acc;
}

/// Sum of squared diagonal entries.
inline double diag_norm2(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error("diag_norm2: matrix not square");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) acc += a(i, i) * a(i, i);
  return acc;
}

inline double off_norm2(const SymmetricMatrix& s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i)
    for (std::size_t j = i + 1; j < s.dim(); ++j) acc += 2.0 * s(i, j) * s(i, j);
  return acc;
}

inline double diag_norm2(const SymmetricMatrix& s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i) acc += s(i, i) * s(i, i);
  return acc;
}

inline double trace(const SymmetricMatrix& s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i) acc += s(i, i);
  return acc;
}

inline double frobenius_norm(const Matrix& a) {
  double acc = 0.0;
  for (double v : a.entries()) acc += v * v;
  return std::sqrt(acc);
}

inline double frobenius_norm(const SymmetricMatrix& s) {
  double acc = 0.0;
  for (double v : s.entries()) acc += v * v;
  return std::sqrt(acc);
}

inline double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.entries()) m = std::max(m, std::abs(v));
  return m;
}

/// max |(A^T A - I)_ij|, the orthonormality defect of A's columns.
inline double orthogonality_defect(const Matrix& a) {
  double defect = 0.0;
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t l = 0; l < a.rows(); ++l) acc += a(l, i) * a(l, j);
      const double target = (i == j) ? 1.0 : 0.0;
      defect = std::max(defect, std::abs(acc - target));
    }
  return defect;
}

/// Congruence B^T C B, evaluated once per (i <= j) pair and mirrored, so the
/// result is exactly symmetric.
inline SymmetricMatrix congruence(const SymmetricMatrix& c, const Matrix& b) {
  if (c.dim() != b.rows()) throw Error("congruence: dimension mismatch");
  const std::size_t r = b.cols();
  // W = C B
  Matrix w(c.dim(), r);
  for (std::size_t i = 0; i < c.dim(); ++i)
    for (std::size_t l = 0; l < c.dim(); ++l) {
      const double cil = c(i, l);
      if (cil == 0.0) continue;
      for (std::size_t j = 0; j < r; ++j) w(i, j) += cil * b(l, j);
    }
  SymmetricMatrix out(r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i; j < r; ++j) {
      double acc = 0.0;
      for (std::size_t l = 0; l < c.dim(); ++l) acc += b(l, i) * w(l, j);
      out.set(i, j, acc);
    }
  return out;
}

}  // namespace ajd
