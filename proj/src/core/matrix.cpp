#include "serkit/matrix.hpp"

#include <stdexcept>

namespace serkit {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw std::logic_error("Matrix: data size does not match shape");
}

std::vector<double> Matrix::row(std::size_t r) const {
  return std::vector<double>(data_.begin() + static_cast<long>(r * cols_),
                             data_.begin() + static_cast<long>((r + 1) * cols_));
}

Matrix CoCountMatrix::as_matrix() const {
  Matrix out(n_, n_);
  for (std::size_t i = 0; i < m_.size(); ++i)
    out.data()[i] = static_cast<double>(m_[i]);
  return out;
}

}  // namespace serkit
