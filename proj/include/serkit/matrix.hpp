#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace serkit {

// Dense row-major double matrix. Deliberately minimal; the numeric core of
// this library is small enough that a full linear-algebra dependency would
// be dead weight.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  std::vector<double> row(std::size_t r) const;

  bool same_shape(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }
  bool operator==(const Matrix& o) const = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

// Integer-valued square matrix for co-occurrence counts. Kept separate from
// Matrix so count invariants (nonnegative integers, symmetry) are not mixed
// into floating-point code paths.
class CoCountMatrix {
 public:
  CoCountMatrix() = default;
  explicit CoCountMatrix(std::size_t n) : n_(n), m_(n * n, 0) {}

  std::size_t size() const { return n_; }
  std::int64_t& at(std::size_t r, std::size_t c) { return m_[r * n_ + c]; }
  std::int64_t at(std::size_t r, std::size_t c) const { return m_[r * n_ + c]; }
  const std::vector<std::int64_t>& data() const { return m_; }

  Matrix as_matrix() const;
  bool operator==(const CoCountMatrix& o) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::int64_t> m_;
};

}  // namespace serkit
