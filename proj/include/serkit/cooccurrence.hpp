#pragma once

#include <vector>

#include "serkit/corpus.hpp"
#include "serkit/matrix.hpp"

namespace serkit {

// Utterance-level co-occurrence counts. For each utterance, the set of
// classes with at least one in-set vote contributes 1 to every ordered pair
// (j, z) of distinct members and 1 to each member's diagonal cell, so the
// matrix is symmetric and the diagonal counts utterances where the class was
// voted at all. Vote multiplicities within an utterance do not matter.
CoCountMatrix co_counts(const Corpus& c);

// Same counting rule applied to the 1-rows of a binary prediction matrix
// (columns in class-set order). Rows with no set bit contribute nothing.
CoCountMatrix co_counts_from_binary(const Matrix& binary);

// Column-normalized co-occurrence: w[j][z] = m[j][z] / m[z][z]. Unit
// diagonal, generally asymmetric. A class that never occurs makes its column
// undefined; the error names that class.
Matrix co_weights(const CoCountMatrix& m, const std::vector<std::string>& classes);

// p = 1 - w: zero diagonal, rare pairings score near 1.
Matrix penalty_from_weights(const Matrix& w);

// Row sums of a penalty matrix; the per-class weights that the penalized
// loss algebraically collapses to.
std::vector<double> row_sum_weights(const Matrix& penalty);

double frobenius_distance(const Matrix& a, const Matrix& b);

}  // namespace serkit
