#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hgcn {

#ifdef HGCN_SINGLE_PRECISION
using Real = float;
#else
using Real = double;
#endif

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, Real fill = Real{0});
  Matrix(std::initializer_list<std::initializer_list<Real>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  Real& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  Real operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<Real> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const Real> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

  std::span<Real> values() noexcept { return data_; }
  std::span<const Real> values() const noexcept { return data_; }

  void fill(Real v);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Real> data_;
};

/// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
/// transpose(a) * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a * transpose(b)
Matrix matmul_nt(const Matrix& a, const Matrix& b);

Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

/// a += scale * b
void axpy(Matrix& a, Real scale, const Matrix& b);

bool all_finite(const Matrix& m) noexcept;
Real max_abs(const Matrix& m) noexcept;
Real max_abs_diff(const Matrix& a, const Matrix& b);

/// Throws std::invalid_argument with `what` when the shapes differ.
void require_same_shape(const Matrix& a, const Matrix& b, const char* what);

}  // namespace hgcn
