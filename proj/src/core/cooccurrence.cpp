#include "serkit/cooccurrence.hpp"

#include <cmath>

namespace serkit {

namespace {

void add_set(CoCountMatrix& m, const std::vector<std::size_t>& present) {
  for (std::size_t a : present) {
    m.at(a, a) += 1;
    for (std::size_t b : present)
      if (b != a) m.at(a, b) += 1;
  }
}

}  // namespace

CoCountMatrix co_counts(const Corpus& c) {
  CoCountMatrix m(c.classes().size());
  std::vector<std::size_t> present;
  for (const auto& u : c.utterances()) {
    VoteCount vc = vote_counts(u, c.classes());
    present.clear();
    for (std::size_t i = 0; i < vc.counts.size(); ++i)
      if (vc.counts[i] > 0) present.push_back(i);
    add_set(m, present);
  }
  return m;
}

CoCountMatrix co_counts_from_binary(const Matrix& binary) {
  CoCountMatrix m(binary.cols());
  std::vector<std::size_t> present;
  for (std::size_t r = 0; r < binary.rows(); ++r) {
    present.clear();
    for (std::size_t j = 0; j < binary.cols(); ++j) {
      double v = binary.at(r, j);
      if (v != 0.0 && v != 1.0)
        throw InputError("co-occurrence: prediction matrix is not binary");
      if (v == 1.0) present.push_back(j);
    }
    add_set(m, present);
  }
  return m;
}

Matrix co_weights(const CoCountMatrix& m,
                  const std::vector<std::string>& classes) {
  std::size_t n = m.size();
  if (classes.size() != n)
    throw InputError("co-weights: class name count does not match matrix");
  for (std::size_t z = 0; z < n; ++z)
    if (m.at(z, z) == 0)
      throw InputError("co-weights: class '" + classes[z] +
                       "' never occurs; its column is undefined");
  Matrix w(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t z = 0; z < n; ++z)
      w.at(j, z) = static_cast<double>(m.at(j, z)) /
                   static_cast<double>(m.at(z, z));
  return w;
}

Matrix penalty_from_weights(const Matrix& w) {
  Matrix p(w.rows(), w.cols());
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t j = 0; j < w.cols(); ++j)
      p.at(i, j) = 1.0 - w.at(i, j);
  return p;
}

std::vector<double> row_sum_weights(const Matrix& penalty) {
  std::vector<double> out(penalty.rows(), 0.0);
  for (std::size_t j = 0; j < penalty.rows(); ++j)
    for (std::size_t z = 0; z < penalty.cols(); ++z)
      out[j] += penalty.at(j, z);
  return out;
}

double frobenius_distance(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b))
    throw InputError("frobenius distance: shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    double d = a.data()[i] - b.data()[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace serkit
